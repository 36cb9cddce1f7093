//! Pinching maps, weighted conjugation sums, and the Loewner-order
//! verifiers for the generalized and reverse inequalities.
//!
//! The generalized inequality states that for weights in the upper
//! spectrahedron, `(Σ Mᵢ) ρ (Σ Mᵢ)† ⪯ Σ wᵢ Mᵢ ρ Mᵢ†` for every PSD `ρ`;
//! the reverse inequality flips the order for weights in the lower set.
//! The converse direction is witnessed constructively: from fixed-point
//! unit vectors of a nontrivial projective measurement one builds a state
//! whose verification reduces exactly to spectrahedron membership.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_top_eigenvector, hermitize, is_psd, loewner_leq, normalized, vector_norm,
    ComplexMatrix, LoewnerVerdict, Tolerance,
};
use crate::randutil::gaussian_vector;
use crate::spectrahedron::WeightVector;

/// A projective measurement: `n >= 2` projectors of a common dimension that
/// are Hermitian and idempotent within the band and sum to the identity.
/// Invalid inputs are rejected at construction, never repaired.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePovm {
    dimension: usize,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectivePovm {
    pub fn new(projectors: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        if projectors.len() < 2 {
            return Err(Error::PovmTooSmall(projectors.len()));
        }
        let dimension = projectors[0].rows();
        for (index, p) in projectors.iter().enumerate() {
            if !p.is_square() || p.rows() != dimension {
                return Err(Error::InvalidProjector {
                    index,
                    reason: format!("expected {dimension}x{dimension}, got {}x{}", p.rows(), p.cols()),
                });
            }
            let scale = p.frobenius_norm().max(1.0);
            let herm_dev = p.hermiticity_deviation()?;
            if herm_dev > tol.equality_band * scale {
                return Err(Error::InvalidProjector {
                    index,
                    reason: format!("not Hermitian (deviation {herm_dev:.3e})"),
                });
            }
            let idem_dev = p.matmul(p)?.sub(p)?.frobenius_norm();
            if idem_dev > tol.equality_band * scale {
                return Err(Error::InvalidProjector {
                    index,
                    reason: format!("not idempotent (deviation {idem_dev:.3e})"),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dimension, dimension)?;
        for p in &projectors {
            sum = sum.add(p)?;
        }
        let deviation = sum.sub(&ComplexMatrix::identity(dimension)?)?.frobenius_norm();
        if deviation > tol.equality_band * (dimension as f64).sqrt().max(1.0) {
            return Err(Error::PovmSumNotIdentity { deviation });
        }
        Ok(Self {
            dimension,
            projectors,
        })
    }

    /// The computational-basis measurement: `d` rank-one projectors.
    pub fn computational_basis(dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::PovmTooSmall(dimension));
        }
        let projectors = (0..dimension)
            .map(|i| {
                let mut p = ComplexMatrix::zeros(dimension, dimension)?;
                p.set(i, i, Complex64::ONE);
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        ProjectivePovm::new(projectors, &Tolerance::default())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn arity(&self) -> usize {
        self.projectors.len()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// All projectors nonzero. The converse construction requires this.
    pub fn is_nontrivial(&self, tol: &Tolerance) -> bool {
        self.first_trivial(tol).is_none()
    }

    fn first_trivial(&self, tol: &Tolerance) -> Option<usize> {
        self.projectors
            .iter()
            .position(|p| p.frobenius_norm() <= tol.equality_band)
    }

    pub fn as_family(&self) -> OperatorFamily {
        OperatorFamily::new(self.projectors.clone()).expect("povm projectors form a family")
    }
}

#[derive(Serialize, Deserialize)]
struct PovmRepr {
    dimension: usize,
    projectors: Vec<ComplexMatrix>,
}

impl Serialize for ProjectivePovm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PovmRepr {
            dimension: self.dimension,
            projectors: self.projectors.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProjectivePovm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PovmRepr::deserialize(deserializer)?;
        let povm = ProjectivePovm::new(repr.projectors, &Tolerance::default())
            .map_err(serde::de::Error::custom)?;
        if povm.dimension != repr.dimension {
            return Err(serde::de::Error::custom(format!(
                "declared dimension {} does not match projectors ({})",
                repr.dimension, povm.dimension
            )));
        }
        Ok(povm)
    }
}

/// A family of `n >= 2` operators with a common shape, the `Mᵢ : A -> B`
/// of the inequalities. Rectangular shapes are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    in_dim: usize,
    out_dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl OperatorFamily {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.len() < 2 {
            return Err(Error::FamilyTooSmall(operators.len()));
        }
        let out_dim = operators[0].rows();
        let in_dim = operators[0].cols();
        for m in &operators[1..] {
            if m.rows() != out_dim || m.cols() != in_dim {
                return Err(Error::DimensionMismatch {
                    left: format!("{out_dim}x{in_dim}"),
                    right: format!("{}x{}", m.rows(), m.cols()),
                });
            }
        }
        Ok(Self {
            in_dim,
            out_dim,
            operators,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn arity(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// `Σ Mᵢ`.
    pub fn total(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.out_dim, self.in_dim).expect("positive dims");
        for m in &self.operators {
            s = s.add(m).expect("uniform shapes");
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    in_dim: usize,
    out_dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl Serialize for OperatorFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            operators: self.operators.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(deserializer)?;
        let fam = OperatorFamily::new(repr.operators).map_err(serde::de::Error::custom)?;
        if fam.in_dim != repr.in_dim || fam.out_dim != repr.out_dim {
            return Err(serde::de::Error::custom(format!(
                "declared shape {}x{} does not match operators ({}x{})",
                repr.out_dim, repr.in_dim, fam.out_dim, fam.in_dim
            )));
        }
        Ok(fam)
    }
}

fn require_psd_state(rho: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let v = is_psd(rho, tol)?;
    if v.min_gap_eigenvalue < -tol.equality_band * v.scale {
        return Err(Error::NotPsd {
            min_eigenvalue: v.min_gap_eigenvalue,
        });
    }
    Ok(())
}

/// The pinching map `ρ ↦ Σ Pᵢ ρ Pᵢ`: completely positive, trace preserving,
/// and PSD-preserving.
pub fn pinch(rho: &ComplexMatrix, povm: &ProjectivePovm, tol: &Tolerance) -> Result<ComplexMatrix> {
    if rho.rows() != povm.dimension() || !rho.is_square() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", rho.rows(), rho.cols()),
            right: format!("{0}x{0}", povm.dimension()),
        });
    }
    require_psd_state(rho, tol)?;
    let d = povm.dimension();
    let mut out = ComplexMatrix::zeros(d, d)?;
    for p in povm.projectors() {
        out = out.add(&p.matmul(rho)?.matmul(p)?)?;
    }
    hermitize(&out)
}

/// `Σ wᵢ Mᵢ ρ Mᵢ†`, hermitized.
pub fn weighted_conjugation(
    rho: &ComplexMatrix,
    family: &OperatorFamily,
    weights: &WeightVector,
) -> Result<ComplexMatrix> {
    if weights.arity() != family.arity() {
        return Err(Error::ArityMismatch {
            expected: family.arity(),
            got: weights.arity(),
        });
    }
    if rho.rows() != family.in_dim() || !rho.is_square() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", rho.rows(), rho.cols()),
            right: format!("{0}x{0}", family.in_dim()),
        });
    }
    let mut out = ComplexMatrix::zeros(family.out_dim(), family.out_dim())?;
    for (m, &w) in family.operators().iter().zip(weights.values()) {
        out = out.add(&m.matmul(rho)?.matmul(&m.adjoint())?.scaled(w))?;
    }
    hermitize(&out)
}

/// `(Σ Mᵢ) ρ (Σ Mᵢ)†`, hermitized.
pub fn sum_conjugation(rho: &ComplexMatrix, family: &OperatorFamily) -> Result<ComplexMatrix> {
    if rho.rows() != family.in_dim() || !rho.is_square() {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", rho.rows(), rho.cols()),
            right: format!("{0}x{0}", family.in_dim()),
        });
    }
    let s = family.total();
    hermitize(&s.matmul(rho)?.matmul(&s.adjoint())?)
}

/// Verifies the generalized upper inequality
/// `(Σ Mᵢ) ρ (Σ Mᵢ)† ⪯ Σ wᵢ Mᵢ ρ Mᵢ†` for one instance.
///
/// Holds for every PSD `ρ` whenever the weights lie in the upper set.
pub fn verify_generalized(
    family: &OperatorFamily,
    weights: &WeightVector,
    rho: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<LoewnerVerdict> {
    require_psd_state(rho, tol)?;
    let lhs = sum_conjugation(rho, family)?;
    let rhs = weighted_conjugation(rho, family, weights)?;
    loewner_leq(&lhs, &rhs, tol)
}

/// Verifies the reverse inequality
/// `Σ wᵢ Mᵢ ρ Mᵢ† ⪯ (Σ Mᵢ) ρ (Σ Mᵢ)†` for one instance.
///
/// Holds for every PSD `ρ` whenever the weights lie in the lower set.
pub fn verify_reverse(
    family: &OperatorFamily,
    weights: &WeightVector,
    rho: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<LoewnerVerdict> {
    require_psd_state(rho, tol)?;
    let lhs = weighted_conjugation(rho, family, weights)?;
    let rhs = sum_conjugation(rho, family)?;
    loewner_leq(&lhs, &rhs, tol)
}

/// Builds the converse witness state from fixed-point unit vectors of a
/// nontrivial projective measurement.
///
/// One unit vector `eᵢ` is taken in the range of each projector — the top
/// eigenvector by default, or a seeded random range vector when `seed` is
/// given — and the witness is the rank-one `|s⟩⟨s|` with `s = Σ eᵢ`.
pub fn converse_witness(povm: &ProjectivePovm, seed: Option<u64>) -> Result<ComplexMatrix> {
    let tol = Tolerance::default();
    if let Some(index) = povm.first_trivial(&tol) {
        return Err(Error::TrivialProjector(index));
    }
    let d = povm.dimension();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut total = vec![Complex64::ZERO; d];
    for p in povm.projectors() {
        let fixed_point = match rng.as_mut() {
            None => hermitian_top_eigenvector(&hermitize(p)?)?,
            Some(r) => loop {
                // Project a Gaussian vector onto the range; retry the rare
                // draw that lands (numerically) in the kernel.
                let candidate = p.matvec(&gaussian_vector(r, d))?;
                if vector_norm(&candidate) > 1e-8 {
                    break normalized(&candidate);
                }
            },
        };
        for (acc, v) in total.iter_mut().zip(&fixed_point) {
            *acc += v;
        }
    }
    ComplexMatrix::outer(&total, &total)
}

/// Tests the witnessed inequality `ρ_w ⪯ Σ wᵢ Pᵢ ρ_w Pᵢ` for the
/// deterministic witness of the measurement.
///
/// The outcome reproduces upper-set membership of the weights: true implies
/// membership (within the band) and false implies non-membership.
pub fn converse_check(
    povm: &ProjectivePovm,
    weights: &WeightVector,
    tol: &Tolerance,
) -> Result<bool> {
    if weights.arity() != povm.arity() {
        return Err(Error::ArityMismatch {
            expected: povm.arity(),
            got: weights.arity(),
        });
    }
    let witness = converse_witness(povm, None)?;
    let conjugated = weighted_conjugation(&witness, &povm.as_family(), weights)?;
    Ok(loewner_leq(&witness, &conjugated, tol)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrahedron::{in_upper_direct, sample_upper_boundary};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap()
    }

    fn trivial_povm(d: usize) -> ProjectivePovm {
        let id = ComplexMatrix::identity(d).unwrap();
        let zero = ComplexMatrix::zeros(d, d).unwrap();
        ProjectivePovm::new(vec![id, zero], &tol()).unwrap()
    }

    #[test]
    fn pinch_fixes_diagonal_states() {
        let rho = ComplexMatrix::diag_real(&[0.25, 0.75]).unwrap();
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let out = pinch(&rho, &povm, &tol()).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn pinch_plus_state_to_maximally_mixed() {
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let out = pinch(&plus_state(), &povm, &tol()).unwrap();
        let expected = ComplexMatrix::diag_real(&[0.5, 0.5]).unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn pinch_with_trivial_measurement_is_identity_map() {
        let rho = plus_state();
        let out = pinch(&rho, &trivial_povm(2), &tol()).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn pinch_rejects_indefinite_state() {
        let rho = ComplexMatrix::diag_real(&[1.0, -1.0]).unwrap();
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        assert!(matches!(
            pinch(&rho, &povm, &tol()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn weighted_conjugation_special_cases() {
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let family = povm.as_family();
        let rho = plus_state();

        // Unit weights reproduce the pinching map.
        let ones = WeightVector::new(vec![1.0, 1.0]).unwrap();
        let lhs = weighted_conjugation(&rho, &family, &ones).unwrap();
        let rhs = pinch(&rho, &povm, &tol()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);

        // Classical weights give n times the pinched state.
        let classical = WeightVector::new(vec![2.0, 2.0]).unwrap();
        let lhs = weighted_conjugation(&rho, &family, &classical).unwrap();
        assert!(lhs.max_abs_diff(&rhs.scaled(2.0)).unwrap() < 1e-14);

        // A single identity operator with weight c scales the state.
        let fam = trivial_povm(2).as_family();
        let w = WeightVector::new(vec![3.5, 7.0]).unwrap();
        let out = weighted_conjugation(&rho, &fam, &w).unwrap();
        assert!(out.max_abs_diff(&rho.scaled(3.5)).unwrap() < 1e-14);
    }

    #[test]
    fn sum_conjugation_cases() {
        let rho = plus_state();
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        // The projectors sum to the identity.
        let out = sum_conjugation(&rho, &povm.as_family()).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-14);

        // Cancelling family gives zero.
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(0.5, -0.5)])
            .unwrap();
        let fam = OperatorFamily::new(vec![m.clone(), m.scaled(-1.0)]).unwrap();
        let out = sum_conjugation(&rho, &fam).unwrap();
        assert!(out.max_abs() < 1e-14);

        // rho = identity reduces to S S†.
        let id = ComplexMatrix::identity(2).unwrap();
        let fam = OperatorFamily::new(vec![m.clone(), m.adjoint()]).unwrap();
        let s = fam.total();
        let expected = s.matmul(&s.adjoint()).unwrap();
        let out = sum_conjugation(&id, &fam).unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn generalized_inequality_tight_binary_case() {
        // weights (2,2), basis measurement, rho = |+><+|:
        // gap = [[.5,-.5],[-.5,.5]], eigenvalues {0, 1} -> holds tightly.
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let w = WeightVector::new(vec![2.0, 2.0]).unwrap();
        let v = verify_generalized(&povm.as_family(), &w, &plus_state(), &tol()).unwrap();
        assert!(v.holds);
        assert!(v.min_gap_eigenvalue.abs() < 1e-12);
        assert!(v.is_tight(&tol()));
    }

    #[test]
    fn reverse_inequality_zero_weights_always_hold() {
        let povm = ProjectivePovm::computational_basis(3).unwrap();
        let w = WeightVector::new(vec![0.0, 0.0, 0.0]).unwrap();
        let rho = ComplexMatrix::diag_real(&[0.2, 0.3, 0.5]).unwrap();
        let v = verify_reverse(&povm.as_family(), &w, &rho, &tol()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn witness_for_basis_measurement_is_all_ones() {
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let w = converse_witness(&povm, None).unwrap();
        // e_0, e_1 are the basis vectors up to phase, so the witness is the
        // all-ones matrix up to that phase, i.e. 2|+><+|.
        let expected = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(w.max_abs_diff(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn witness_is_psd_with_trace_norm_squared() {
        // Rank-2 projector in d = 3 alongside a rank-1 projector.
        let p1 = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]).unwrap();
        let p2 = ComplexMatrix::diag_real(&[0.0, 0.0, 1.0]).unwrap();
        let povm = ProjectivePovm::new(vec![p1, p2], &tol()).unwrap();
        for seed in [None, Some(7u64), Some(8)] {
            let w = converse_witness(&povm, seed).unwrap();
            let v = is_psd(&w, &tol()).unwrap();
            assert!(v.holds);
            // trace = ‖Σ eᵢ‖², and orthonormal fixed points give exactly 2.
            assert!((w.trace_re().unwrap() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn witness_requires_nontrivial_measurement() {
        assert!(matches!(
            converse_witness(&trivial_povm(2), None),
            Err(Error::TrivialProjector(1))
        ));
    }

    #[test]
    fn converse_check_reproduces_membership() {
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let t = tol();

        let member = WeightVector::new(vec![2.0, 2.0]).unwrap();
        assert!(converse_check(&povm, &member, &t).unwrap());
        assert!(in_upper_direct(&member, &t).unwrap().member);

        let outside = WeightVector::new(vec![1.5, 1.5]).unwrap();
        assert!(!converse_check(&povm, &outside, &t).unwrap());
        assert!(!in_upper_direct(&outside, &t).unwrap().member);

        for n in 2..=4 {
            let povm = ProjectivePovm::computational_basis(n).unwrap();
            let classical = WeightVector::uniform_classical(n).unwrap();
            assert!(converse_check(&povm, &classical, &t).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn converse_tight_at_sampled_boundary() {
        let t = tol();
        for seed in 0..10u64 {
            let w = sample_upper_boundary(3, None, seed, &t).unwrap();
            let povm = ProjectivePovm::computational_basis(3).unwrap();
            let witness = converse_witness(&povm, None).unwrap();
            let conj = weighted_conjugation(&witness, &povm.as_family(), &w).unwrap();
            let v = loewner_leq(&witness, &conj, &t).unwrap();
            assert!(v.holds, "seed {seed}");
            assert!(v.min_gap_eigenvalue.abs() <= 1e-7, "seed {seed}");
        }
    }

    #[test]
    fn pinching_map_is_cptp_on_random_instances() {
        // Trace preservation to 1e-10 (relative) and PSD output over 10^3
        // random (state, measurement) pairs, dims up to 8.
        use crate::harness::{random_projective_povm, random_psd, trial_seed};
        let t = tol();
        let mut count = 0;
        for k in 0..1_000u64 {
            let seed = trial_seed(0xc97c1, k);
            let d = 2 + (seed % 7) as usize; // 2..=8
            let n = 2 + (seed / 7 % (d as u64 - 1)) as usize; // 2..=d
            let povm = random_projective_povm(d, n, seed).unwrap();
            let rho = random_psd(d, seed ^ 0x5555, false);
            let pinched = pinch(&rho, &povm, &t).unwrap();
            let trace_in = rho.trace_re().unwrap();
            let trace_out = pinched.trace_re().unwrap();
            assert!(
                (trace_in - trace_out).abs() <= 1e-10 * trace_in,
                "trace drift at seed {seed}"
            );
            assert!(is_psd(&pinched, &t).unwrap().holds, "seed {seed}");
            count += 1;
        }
        assert_eq!(count, 1_000);
    }

    #[test]
    fn classical_weights_bound_arbitrary_families() {
        // With classical weights (n, ..., n) the generalized verifier covers
        // arbitrary operator families, not just measurements.
        use crate::harness::{random_family, random_psd};
        let t = tol();
        for seed in 0..25u64 {
            let n = 2 + (seed % 3) as usize;
            let fam = random_family(3, 4, n, seed).unwrap();
            let rho = random_psd(3, seed + 900, true);
            let w = WeightVector::uniform_classical(n).unwrap();
            let v = verify_generalized(&fam, &w, &rho, &t).unwrap();
            assert!(v.holds, "seed {seed}");
        }
    }

    #[test]
    fn just_below_boundary_fails_on_the_witness() {
        // Push the last weight below the boundary completion: the witness
        // built from the matching basis measurement must expose the failure.
        let t = tol();
        for seed in 0..10u64 {
            let boundary = sample_upper_boundary(3, None, seed, &t).unwrap();
            let mut below = boundary.values().to_vec();
            below[2] -= 1e-3;
            let below = WeightVector::new(below).unwrap();
            assert!(!in_upper_direct(&below, &t).unwrap().member, "seed {seed}");

            let povm = ProjectivePovm::computational_basis(3).unwrap();
            assert!(!converse_check(&povm, &below, &t).unwrap(), "seed {seed}");

            let witness = converse_witness(&povm, None).unwrap();
            let v = verify_generalized(&povm.as_family(), &below, &witness, &t).unwrap();
            assert!(!v.holds, "seed {seed}");
        }
    }

    #[test]
    fn povm_construction_rejects_invalid_input() {
        let not_projector = ComplexMatrix::diag_real(&[0.5, 0.0]).unwrap();
        let rest = ComplexMatrix::diag_real(&[0.5, 1.0]).unwrap();
        assert!(matches!(
            ProjectivePovm::new(vec![not_projector, rest], &tol()),
            Err(Error::InvalidProjector { .. })
        ));

        let p = ComplexMatrix::diag_real(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            ProjectivePovm::new(vec![p.clone(), p], &tol()),
            Err(Error::PovmSumNotIdentity { .. })
        ));

        let only_one = vec![ComplexMatrix::identity(2).unwrap()];
        assert!(matches!(
            ProjectivePovm::new(only_one, &tol()),
            Err(Error::PovmTooSmall(1))
        ));
    }

    #[test]
    fn family_json_schema() {
        let fam = trivial_povm(2).as_family();
        let s = serde_json::to_string(&fam).unwrap();
        assert!(s.starts_with(r#"{"in_dim":2,"out_dim":2,"operators":"#));
        let back: OperatorFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn povm_json_schema_validates() {
        let povm = ProjectivePovm::computational_basis(2).unwrap();
        let s = serde_json::to_string(&povm).unwrap();
        assert!(s.starts_with(r#"{"dimension":2,"projectors":"#));
        let back: ProjectivePovm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, povm);

        // A non-projector document must be rejected at parse time.
        let bad = r#"{"dimension":2,"projectors":[
            {"rows":2,"cols":2,"entries":[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]},
            {"rows":2,"cols":2,"entries":[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]}]}"#;
        assert!(serde_json::from_str::<ProjectivePovm>(bad).is_err());
    }
}
