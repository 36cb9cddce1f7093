//! Membership tests and boundary samplers for the weight spectrahedra.
//!
//! The upper set collects the weight vectors `w` with `diag(w) ⪰ J` (valid
//! weights for the generalized upper pinching bound); the lower set those
//! with `diag(w) ⪯ J` (valid weights for the reverse bound). Membership is
//! decided two independent ways: directly, by an eigenvalue PSD check, and
//! recursively, by the Schur-complement polynomial criterion
//!
//!   w in upper(n)  <=>  (w_1..w_{n-1}) strictly interior to upper(n-1)
//!                       and  w_n >= 1 + 1ᵀ (diag(w_1..w_{n-1}) - J)⁻¹ 1,
//!
//! with the n = 2 base case `w_1 > 1 and (w_1 - 1)(w_2 - 1) >= 1`. The two
//! routes are kept independent so each can serve as the other's oracle.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{all_ones, is_psd, ComplexMatrix, Tolerance};

/// Real weight vector of arity `n >= 2`, candidate for spectrahedron
/// membership.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::ArityTooSmall(values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }

    /// The vector `(n, n, ..., n)` of arity `n`, always a member of the
    /// upper set.
    pub fn uniform_classical(n: usize) -> Result<Self> {
        Self::new(vec![n as f64; n])
    }
}

#[derive(Serialize, Deserialize)]
struct WeightVectorRepr {
    values: Vec<f64>,
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WeightVectorRepr {
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = WeightVectorRepr::deserialize(deserializer)?;
        WeightVector::new(repr.values).map_err(serde::de::Error::custom)
    }
}

/// Which spectrahedron a CLI query targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightSet {
    /// `diag(w) ⪰ J`: weights for the upper (generalized pinching) bound.
    Upper,
    /// `diag(w) ⪯ J`: weights for the lower (reverse pinching) bound.
    Lower,
}

/// Outcome of a membership test.
///
/// `certificate` is the decision margin: the gap's smallest eigenvalue for
/// the direct tests, the top-level scalar slack for the polynomial routes.
/// Membership corresponds to `certificate >= -tol`; `on_boundary` implies
/// membership with `|certificate|` inside the equality band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub member: bool,
    pub on_boundary: bool,
    pub certificate: f64,
}

/// Result of the recursive criterion: either a decision, or a refusal to
/// invert a near-singular prefix (the caller falls back to the direct test).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecursiveVerdict {
    Decided(MembershipVerdict),
    BoundaryIndeterminate,
}

impl RecursiveVerdict {
    pub fn decided(&self) -> Option<MembershipVerdict> {
        match self {
            RecursiveVerdict::Decided(v) => Some(*v),
            RecursiveVerdict::BoundaryIndeterminate => None,
        }
    }
}

fn verdict_from_psd(gap: &ComplexMatrix, tol: &Tolerance) -> Result<MembershipVerdict> {
    let v = is_psd(gap, tol)?;
    Ok(MembershipVerdict {
        member: v.holds,
        on_boundary: v.holds && v.is_tight(tol),
        certificate: v.min_gap_eigenvalue,
    })
}

/// Direct membership in the upper set: PSD check of `diag(w) - J`.
pub fn in_upper_direct(w: &WeightVector, tol: &Tolerance) -> Result<MembershipVerdict> {
    let n = w.arity();
    let gap = ComplexMatrix::diag_real(w.values())?.sub(&all_ones(n)?)?;
    verdict_from_psd(&gap, tol)
}

/// Direct membership in the lower set: PSD check of `J - diag(w)`.
pub fn in_lower_direct(w: &WeightVector, tol: &Tolerance) -> Result<MembershipVerdict> {
    let n = w.arity();
    let gap = all_ones(n)?.sub(&ComplexMatrix::diag_real(w.values())?)?;
    verdict_from_psd(&gap, tol)
}

// Scalar threshold of the Schur recursion: the smallest admissible next
// weight after a strictly interior prefix, 1 + 1ᵀ (diag(prefix) - J)⁻¹ 1.
// Computed by a Cholesky solve, never by forming the inverse.
fn next_weight_threshold(prefix: &[f64]) -> Option<f64> {
    let k = prefix.len();
    let m = DMatrix::from_fn(k, k, |i, j| if i == j { prefix[i] - 1.0 } else { -1.0 });
    let chol = Cholesky::new(m)?;
    let x = chol.solve(&DVector::from_element(k, 1.0));
    let total: f64 = x.sum();
    if !total.is_finite() {
        return None;
    }
    Some(1.0 + total)
}

enum Walk {
    // All proper-prefix slacks strictly positive; carries the last level's
    // slack and threshold for the non-strict final decision.
    Completed { final_slack: f64, final_threshold: f64 },
    // A proper prefix sits inside the band around its boundary; refusing to
    // invert it, per the tolerance policy.
    Indeterminate,
    // Decisively outside, with a negative certificate.
    Outside { certificate: f64 },
}

// Level-by-level slack walk. `values[0] > 1` is an exact sign test (no
// solve involved); every later level compares `values[k-1]` against the
// threshold of its prefix, strictly (margin > band) except at the last.
fn walk_upper(values: &[f64], band: f64) -> Walk {
    let n = values.len();
    if values[0] <= 1.0 {
        let certificate = if values[0] < 1.0 { values[0] - 1.0 } else { -1.0 };
        return Walk::Outside { certificate };
    }
    for k in 2..=n {
        let threshold = match next_weight_threshold(&values[..k - 1]) {
            Some(t) => t,
            None => return Walk::Indeterminate,
        };
        let slack = values[k - 1] - threshold;
        if k == n {
            return Walk::Completed {
                final_slack: slack,
                final_threshold: threshold,
            };
        }
        if slack <= band {
            if slack < -band {
                return Walk::Outside { certificate: slack };
            }
            return Walk::Indeterminate;
        }
    }
    unreachable!("loop returns at k = n");
}

/// Recursive Schur-complement membership in the upper set.
///
/// Agrees with [`in_upper_direct`] outside the equality band; inputs whose
/// prefixes fall inside the band return
/// [`RecursiveVerdict::BoundaryIndeterminate`] rather than risking a
/// near-singular solve.
pub fn in_upper_recursive(w: &WeightVector, tol: &Tolerance) -> Result<RecursiveVerdict> {
    Ok(match walk_upper(w.values(), tol.equality_band) {
        Walk::Outside { certificate } => RecursiveVerdict::Decided(MembershipVerdict {
            member: false,
            on_boundary: false,
            certificate,
        }),
        Walk::Indeterminate => RecursiveVerdict::BoundaryIndeterminate,
        Walk::Completed {
            final_slack,
            final_threshold,
        } => {
            let scale = 1f64.max(final_threshold.abs());
            let member = final_slack >= -tol.psd_slack * scale;
            RecursiveVerdict::Decided(MembershipVerdict {
                member,
                on_boundary: member && final_slack.abs() <= tol.equality_band * scale,
                certificate: final_slack,
            })
        }
    })
}

/// Recursive criterion with the documented fallback: boundary-indeterminate
/// inputs are settled by the direct eigenvalue test.
pub fn in_upper_recursive_or_direct(w: &WeightVector, tol: &Tolerance) -> Result<MembershipVerdict> {
    match in_upper_recursive(w, tol)? {
        RecursiveVerdict::Decided(v) => Ok(v),
        RecursiveVerdict::BoundaryIndeterminate => in_upper_direct(w, tol),
    }
}

/// Closed-form arity-3 criterion:
/// `w1 > 1`, `w2 > 1 + 1/(w1-1)`, and
/// `[(w1-1)(w2-1) - 1] * [(w1-1)(w3-1) - 1] >= w1²`, evaluated literally.
pub fn in_upper3_closed_form(w: &WeightVector, tol: &Tolerance) -> Result<MembershipVerdict> {
    if w.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: w.arity(),
        });
    }
    let (a1, a2, a3) = (w.values()[0], w.values()[1], w.values()[2]);
    let not_member = |certificate: f64| MembershipVerdict {
        member: false,
        on_boundary: false,
        certificate,
    };
    if a1 <= 1.0 {
        return Ok(not_member(if a1 < 1.0 { a1 - 1.0 } else { -1.0 }));
    }
    let gate = a2 - 1.0 - 1.0 / (a1 - 1.0);
    if gate < 0.0 {
        return Ok(not_member((a1 - 1.0) * gate));
    }
    if gate == 0.0 {
        return Ok(not_member(-a1 * a1));
    }
    let d2 = (a1 - 1.0) * (a2 - 1.0) - 1.0;
    let d3 = (a1 - 1.0) * (a3 - 1.0) - 1.0;
    let slack = d2 * d3 - a1 * a1;
    let scale = 1f64.max(a1 * a1);
    let member = slack >= -tol.psd_slack * scale;
    Ok(MembershipVerdict {
        member,
        on_boundary: member && slack.abs() <= tol.equality_band * scale,
        certificate: slack,
    })
}

/// Sign pattern of a lower-set candidate. Members are never `Violating`:
/// either every entry is nonpositive, or exactly one entry is positive and
/// all others strictly negative. Checked as a property, not assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignStructure {
    AllNonpositive,
    OnePositive,
    Violating,
}

pub fn lower_sign_structure(w: &WeightVector) -> SignStructure {
    let positives = w.values().iter().filter(|&&v| v > 0.0).count();
    match positives {
        0 => SignStructure::AllNonpositive,
        1 => {
            if w.values().iter().filter(|&&v| v <= 0.0).all(|&v| v < 0.0) {
                SignStructure::OnePositive
            } else {
                SignStructure::Violating
            }
        }
        _ => SignStructure::Violating,
    }
}

/// Appends the tight last weight to a strictly interior prefix, landing the
/// extended vector exactly on the upper set's boundary.
///
/// A length-1 prefix `(w1)` with `w1 = 1 + t` completes to `(1+t, 1+1/t)`.
pub fn complete_upper_boundary(prefix: &[f64], tol: &Tolerance) -> Result<WeightVector> {
    if prefix.is_empty() {
        return Err(Error::PrefixNotInterior);
    }
    if prefix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let interior = if prefix.len() == 1 {
        prefix[0] > 1.0
    } else {
        matches!(
            walk_upper(prefix, tol.equality_band),
            Walk::Completed { final_slack, .. } if final_slack > tol.equality_band
        )
    };
    if !interior {
        return Err(Error::PrefixNotInterior);
    }
    let threshold = next_weight_threshold(prefix).ok_or(Error::PrefixNotInterior)?;
    let mut values = prefix.to_vec();
    values.push(threshold);
    WeightVector::new(values)
}

// Margin floor used when drawing prefixes: keeps the completing solve well
// conditioned so sampled points land on the boundary to much better than
// the band.
const SAMPLER_INTERIOR_MARGIN: f64 = 1e-3;

fn prefix_strictly_interior(prefix: &[f64], margin: f64) -> bool {
    if prefix.len() == 1 {
        return prefix[0] - 1.0 > margin;
    }
    matches!(
        walk_upper(prefix, margin),
        Walk::Completed { final_slack, .. } if final_slack > margin
    )
}

/// Draws a boundary point of the upper set of the given arity.
///
/// With an explicit prefix (length `arity - 1`) the prefix is verified
/// interior and completed deterministically; otherwise prefixes are
/// rejection-sampled from a uniform box until one is strictly interior.
pub fn sample_upper_boundary(
    arity: usize,
    prefix: Option<&[f64]>,
    seed: u64,
    tol: &Tolerance,
) -> Result<WeightVector> {
    if arity < 2 {
        return Err(Error::ArityTooSmall(arity));
    }
    if let Some(p) = prefix {
        if p.len() != arity - 1 {
            return Err(Error::ArityMismatch {
                expected: arity - 1,
                got: p.len(),
            });
        }
        return complete_upper_boundary(p, tol);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_upper_boundary(&mut rng, arity, tol)
}

pub(crate) fn draw_upper_boundary<R: Rng>(
    rng: &mut R,
    arity: usize,
    tol: &Tolerance,
) -> Result<WeightVector> {
    if arity < 2 {
        return Err(Error::ArityTooSmall(arity));
    }
    let margin = SAMPLER_INTERIOR_MARGIN.max(tol.equality_band);
    let hi = 2.0 * arity as f64;
    loop {
        let candidate: Vec<f64> = (0..arity - 1)
            .map(|_| rng.random_range(1.2..hi))
            .collect();
        if prefix_strictly_interior(&candidate, margin) {
            return complete_upper_boundary(&candidate, tol);
        }
    }
}

/// The lower set's binary boundary curve `t ↦ (1-t, 1-1/t)`, `t > 0`.
pub fn sample_lower2_boundary(t: f64) -> Result<WeightVector> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::NonPositiveParameter(t));
    }
    WeightVector::new(vec![1.0 - t, 1.0 - 1.0 / t])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn wv(values: &[f64]) -> WeightVector {
        WeightVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn classical_vector_is_member_every_arity() {
        for n in 2..=6 {
            let w = WeightVector::uniform_classical(n).unwrap();
            assert!(in_upper_direct(&w, &tol()).unwrap().member, "n = {n}");
            let rec = in_upper_recursive(&w, &tol()).unwrap().decided().unwrap();
            assert!(rec.member, "recursive n = {n}");
        }
    }

    #[test]
    fn two_two_sits_on_the_boundary() {
        let v = in_upper_direct(&wv(&[2.0, 2.0]), &tol()).unwrap();
        assert!(v.member && v.on_boundary);
        assert!(v.certificate.abs() < 1e-12);

        let r = in_upper_recursive(&wv(&[2.0, 2.0]), &tol())
            .unwrap()
            .decided()
            .unwrap();
        assert!(r.member && r.on_boundary);
    }

    #[test]
    fn weight_at_most_one_excludes_membership() {
        let v = in_upper_direct(&wv(&[1.0, 10.0]), &tol()).unwrap();
        assert!(!v.member);
        let r = in_upper_recursive(&wv(&[1.0, 10.0]), &tol())
            .unwrap()
            .decided()
            .unwrap();
        assert!(!r.member);
    }

    #[test]
    fn recursive_arity3_boundary_at_six() {
        // (2, 3, x): member iff x >= 6; the completion of (2, 3) is exact.
        let b = complete_upper_boundary(&[2.0, 3.0], &tol()).unwrap();
        assert!((b.values()[2] - 6.0).abs() < 1e-9);

        let just_in = in_upper_recursive(&wv(&[2.0, 3.0, 6.0 + 1e-3]), &tol())
            .unwrap()
            .decided()
            .unwrap();
        assert!(just_in.member && !just_in.on_boundary);
        let just_out = in_upper_recursive(&wv(&[2.0, 3.0, 6.0 - 1e-3]), &tol())
            .unwrap()
            .decided()
            .unwrap();
        assert!(!just_out.member);
    }

    #[test]
    fn closed_form_examples() {
        // (3,3,3): product condition holds with equality, boundary point.
        let v = in_upper3_closed_form(&wv(&[3.0, 3.0, 3.0]), &tol()).unwrap();
        assert!(v.member && v.on_boundary);
        let direct = in_upper_direct(&wv(&[3.0, 3.0, 3.0]), &tol()).unwrap();
        assert!(direct.member && direct.certificate.abs() < 1e-12);

        // (2, 1.5, x): second gate fails for every x.
        for x in [0.1, 2.0, 7.0, 1e6] {
            let v = in_upper3_closed_form(&wv(&[2.0, 1.5, x]), &tol()).unwrap();
            assert!(!v.member, "x = {x}");
        }

        // (2, 3, 6): equality case.
        let v = in_upper3_closed_form(&wv(&[2.0, 3.0, 6.0]), &tol()).unwrap();
        assert!(v.member && v.on_boundary);

        assert!(matches!(
            in_upper3_closed_form(&wv(&[2.0, 2.0]), &tol()),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn lower_set_examples() {
        let v = in_lower_direct(&wv(&[0.0, 0.0]), &tol()).unwrap();
        assert!(v.member && v.on_boundary);

        // t = 2 on the boundary curve: (-1, 1/2).
        let b = sample_lower2_boundary(2.0).unwrap();
        assert_eq!(b.values(), &[-1.0, 0.5]);
        let v = in_lower_direct(&b, &tol()).unwrap();
        assert!(v.member && v.on_boundary);

        let v = in_lower_direct(&wv(&[0.5, 0.5]), &tol()).unwrap();
        assert!(!v.member);
    }

    #[test]
    fn lower_boundary_parametrization_points() {
        assert_eq!(sample_lower2_boundary(1.0).unwrap().values(), &[0.0, 0.0]);
        assert_eq!(sample_lower2_boundary(0.5).unwrap().values(), &[0.5, -1.0]);
        assert_eq!(sample_lower2_boundary(4.0).unwrap().values(), &[-3.0, 0.75]);
        assert!(sample_lower2_boundary(0.0).is_err());
        assert!(sample_lower2_boundary(-1.0).is_err());
    }

    #[test]
    fn sign_structure_classification() {
        assert_eq!(
            lower_sign_structure(&wv(&[-1.0, -2.0, 0.0])),
            SignStructure::AllNonpositive
        );
        assert_eq!(
            lower_sign_structure(&wv(&[0.5, -3.0])),
            SignStructure::OnePositive
        );
        assert_eq!(
            lower_sign_structure(&wv(&[0.5, 0.5])),
            SignStructure::Violating
        );
        // One positive entry with a zero elsewhere cannot be a member.
        assert_eq!(
            lower_sign_structure(&wv(&[0.5, 0.0, -3.0])),
            SignStructure::Violating
        );
        assert!(!in_lower_direct(&wv(&[0.5, 0.0, -3.0]), &tol()).unwrap().member);
    }

    #[test]
    fn boundary_completion_matches_curve() {
        // prefix (1+t) completes to (1+t, 1+1/t)
        for t in [0.5, 1.0, 4.0] {
            let b = complete_upper_boundary(&[1.0 + t], &tol()).unwrap();
            assert!((b.values()[1] - (1.0 + 1.0 / t)).abs() < 1e-12, "t = {t}");
        }
        assert_eq!(
            complete_upper_boundary(&[2.0], &tol()).unwrap().values(),
            &[2.0, 2.0]
        );
        assert!(matches!(
            complete_upper_boundary(&[1.0], &tol()),
            Err(Error::PrefixNotInterior)
        ));
        assert!(matches!(
            complete_upper_boundary(&[2.0, 2.0], &tol()),
            Err(Error::PrefixNotInterior)
        ));
    }

    #[test]
    fn sampled_boundary_points_are_tight() {
        for n in 2..=5 {
            for seed in 0..20u64 {
                let w = sample_upper_boundary(n, None, seed, &tol()).unwrap();
                let v = in_upper_direct(&w, &tol()).unwrap();
                assert!(
                    v.certificate.abs() <= tol().equality_band,
                    "n = {n} seed = {seed} cert = {}",
                    v.certificate
                );
            }
        }
    }

    #[test]
    fn upward_closure_of_upper_set() {
        for seed in 0..20u64 {
            let w = sample_upper_boundary(4, None, seed, &tol()).unwrap();
            let bumped: Vec<f64> = w
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v + 0.05 * (i + 1) as f64)
                .collect();
            let v = in_upper_direct(&wv(&bumped), &tol()).unwrap();
            assert!(v.member, "seed = {seed}");
        }
    }

    #[test]
    fn membership_verdict_json_schema() {
        let v = MembershipVerdict {
            member: true,
            on_boundary: false,
            certificate: 0.25,
        };
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"member":true,"on_boundary":false,"certificate":0.25}"#
        );
    }

    #[test]
    fn weight_vector_json_validation() {
        let w: WeightVector = serde_json::from_str(r#"{"values":[2.0,2.0]}"#).unwrap();
        assert_eq!(w.values(), &[2.0, 2.0]);
        assert!(serde_json::from_str::<WeightVector>(r#"{"values":[2.0]}"#).is_err());
    }

    proptest! {
        // Recursive and direct routes agree away from the band; midpoints of
        // members stay members (convexity).
        #[test]
        fn recursive_matches_direct(values in prop::collection::vec(0.5f64..8.0, 2..=5)) {
            let t = tol();
            let w = WeightVector::new(values).unwrap();
            let direct = in_upper_direct(&w, &t).unwrap();
            if direct.certificate.abs() > t.equality_band {
                match in_upper_recursive(&w, &t).unwrap() {
                    RecursiveVerdict::Decided(r) => prop_assert_eq!(r.member, direct.member),
                    RecursiveVerdict::BoundaryIndeterminate => {
                        // Allowed only when the polynomial route is itself
                        // band-blocked; the fallback must then agree.
                        let fb = in_upper_recursive_or_direct(&w, &t).unwrap();
                        prop_assert_eq!(fb.member, direct.member);
                    }
                }
            }
        }

        #[test]
        fn member_midpoints_are_members(seed_a in 0u64..500, seed_b in 0u64..500) {
            let t = tol();
            let a = sample_upper_boundary(3, None, seed_a, &t).unwrap();
            let b = sample_upper_boundary(3, None, seed_b, &t).unwrap();
            let mid: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect();
            let v = in_upper_direct(&WeightVector::new(mid).unwrap(), &t).unwrap();
            prop_assert!(v.certificate >= -t.equality_band);
        }

        #[test]
        fn sampled_members_exceed_one(seed in 0u64..300) {
            let t = tol();
            let w = sample_upper_boundary(4, None, seed, &t).unwrap();
            for &v in w.values() {
                prop_assert!(v > 1.0);
            }
        }
    }
}
