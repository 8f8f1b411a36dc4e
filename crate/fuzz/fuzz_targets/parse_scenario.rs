#![no_main]

use grassflow::formats::{LoopSpec, Scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scenario) = Scenario::from_json(text) else { return };
    // inline generators only; keep allocations bounded
    let small = match &scenario.loop_spec {
        Some(LoopSpec::Circle { n, .. } | LoopSpec::Ellipse { n, .. } | LoopSpec::TorusLoop { n, .. } | LoopSpec::Trefoil { n, .. }) => *n <= 4096,
        _ => false,
    };
    if small {
        let _ = scenario.build_loop(std::path::Path::new("."));
    }
});
