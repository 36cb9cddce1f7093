#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::matrix::{hermitize, is_psd, trace_norm, ComplexMatrix, Tolerance};

// Parsing arbitrary bytes as a matrix document must never panic, and every
// successfully parsed matrix must be safe to feed to the order primitives.
fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(matrix) = serde_json::from_str::<ComplexMatrix>(text) else {
        return;
    };
    let _ = serde_json::to_string(&matrix);
    if matrix.is_square() && matrix.rows() <= 64 {
        let tol = Tolerance::default();
        let _ = hermitize(&matrix);
        let _ = is_psd(&matrix, &tol);
        let _ = trace_norm(&matrix);
    }
});
