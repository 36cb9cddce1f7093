#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::gentle::{
    check_sandwich, gentle_bounds, gentle_difference_bounds, trace_norm_report, GentleInstance,
};
use pinchlab::matrix::Tolerance;

// Instance deserialization enforces the projector, PSD, trace, and
// hypothesis invariants; accepted instances must survive the whole bound
// pipeline without panicking.
fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(inst) = serde_json::from_str::<GentleInstance>(text) else {
        return;
    };
    let _ = serde_json::to_string(&inst);
    if inst.rho().rows() <= 32 {
        let tol = Tolerance::default();
        if let Ok(bounds) = gentle_bounds(&inst, &tol) {
            let _ = check_sandwich(&inst, &bounds, &tol);
        }
        let _ = gentle_difference_bounds(&inst, &tol);
        let _ = trace_norm_report(&inst);
    }
});
