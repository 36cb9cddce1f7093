#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::matrix::Tolerance;
use pinchlab::spectrahedron::{
    in_lower_direct, in_upper3_closed_form, in_upper_direct, in_upper_recursive,
    lower_sign_structure, WeightVector,
};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(w) = serde_json::from_str::<WeightVector>(text) else {
        return;
    };
    let _ = serde_json::to_string(&w);
    let _ = lower_sign_structure(&w);
    if w.arity() <= 64 {
        let tol = Tolerance::default();
        let direct = in_upper_direct(&w, &tol);
        let recursive = in_upper_recursive(&w, &tol);
        // The polynomial route may refuse band cases but must otherwise
        // agree with the eigenvalue route wherever both are numerically
        // meaningful (moderate magnitudes, certificate outside the band).
        let moderate = w.values().iter().all(|v| v.abs() <= 1e6);
        if let (Ok(d), Ok(r)) = (direct, recursive) {
            if moderate && d.certificate.abs() > tol.equality_band {
                if let Some(r) = r.decided() {
                    assert_eq!(r.member, d.member, "routes disagree on {:?}", w.values());
                }
            }
        }
        let _ = in_lower_direct(&w, &tol);
        if w.arity() == 3 {
            let _ = in_upper3_closed_form(&w, &tol);
        }
    }
});
