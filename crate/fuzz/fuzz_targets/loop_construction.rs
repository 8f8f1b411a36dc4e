#![no_main]

use grassflow::ambient::{AmbientSpace, Vec3};
use grassflow::flow::curvature_binormal;
use grassflow::loops::DiscreteLoop;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else { return };
    let space = if tag & 1 == 0 { AmbientSpace::Euclidean3 } else { AmbientSpace::unit_torus() };
    let vertices: Vec<Vec3> = rest
        .chunks_exact(24)
        .take(512)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
            Vec3::new(f(0), f(1), f(2))
        })
        .collect();
    let Ok(l) = DiscreteLoop::new(space, vertices) else { return };
    let _ = l.total_length();
    let _ = l.dual_lengths();
    let _ = l.center_of_mass();
    let _ = curvature_binormal(&l);
});
