#![no_main]

use grassflow::ambient::AmbientSpace;
use grassflow::formats::{parse_polyline, read_loops, write_polyline};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_polyline(text);
    for space in [AmbientSpace::Euclidean3, AmbientSpace::unit_torus()] {
        if let Ok(loops) = read_loops(text, space) {
            // anything accepted must survive a round trip
            let again = read_loops(&write_polyline(&loops), space).expect("written polyline parses");
            assert_eq!(again, loops);
        }
    }
});
