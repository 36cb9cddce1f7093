#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::matrix::ComplexMatrix;
use pinchlab::pinching::{sum_conjugation, weighted_conjugation, OperatorFamily};
use pinchlab::spectrahedron::WeightVector;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(family) = serde_json::from_str::<OperatorFamily>(text) else {
        return;
    };
    let _ = serde_json::to_string(&family);
    if family.in_dim() <= 32 && family.out_dim() <= 32 && family.arity() <= 32 {
        let rho = ComplexMatrix::identity(family.in_dim()).unwrap();
        let _ = sum_conjugation(&rho, &family);
        let ones = WeightVector::new(vec![1.0; family.arity()]).unwrap();
        let _ = weighted_conjugation(&rho, &family, &ones);
    }
});
