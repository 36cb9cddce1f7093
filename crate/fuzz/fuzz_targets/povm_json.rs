#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::matrix::{ComplexMatrix, Tolerance};
use pinchlab::pinching::{converse_witness, pinch, ProjectivePovm};

// Deserialization runs the full measurement validation (Hermitian,
// idempotent, sums to identity); whatever survives it must be safe to
// pinch with and to build witnesses from.
fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(povm) = serde_json::from_str::<ProjectivePovm>(text) else {
        return;
    };
    let _ = serde_json::to_string(&povm);
    let d = povm.dimension();
    if d <= 32 {
        let tol = Tolerance::default();
        let mixed = ComplexMatrix::identity(d).unwrap().scaled(1.0 / d as f64);
        let _ = pinch(&mixed, &povm, &tol);
        let _ = converse_witness(&povm, None);
        let _ = converse_witness(&povm, Some(7));
    }
});
