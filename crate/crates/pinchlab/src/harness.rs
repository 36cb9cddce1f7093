//! Seeded instance generation and verification campaigns.
//!
//! Every trial is a pure function of (config, trial seed); trial seeds come
//! from a counter hash of the master seed, so trials are order-independent,
//! parallelizable, and individually replayable.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gentle::{
    check_sandwich, gentle_bounds, gentle_difference_bounds, trace_norm_report, GentleInstance,
};
use crate::matrix::{hermitize, ComplexMatrix, Tolerance};
use crate::pinching::{converse_check, verify_generalized, verify_reverse, OperatorFamily, ProjectivePovm};
use crate::randutil::gaussian_matrix;
use crate::spectrahedron::{
    draw_upper_boundary, in_lower_direct, in_upper_direct, in_upper_recursive, RecursiveVerdict,
    WeightVector,
};

/// Counter-based seed split (splitmix64 of `master + (index+1) * phi64`).
/// Trial seeds depend only on the master seed and the trial index.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    const PHI64: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(PHI64));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Wishart-style random PSD matrix `G G†` with complex-Gaussian `G`,
/// optionally normalized to unit trace.
pub fn random_psd(dim: usize, seed: u64, normalize: bool) -> ComplexMatrix {
    random_psd_with(&mut rng_from(seed), dim, normalize)
}

pub(crate) fn random_psd_with<R: Rng>(rng: &mut R, dim: usize, normalize: bool) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let gram = hermitize(&g.matmul(&g.adjoint()).expect("square")).expect("square");
    if normalize {
        let trace = gram.trace_re().expect("square");
        gram.scaled(1.0 / trace)
    } else {
        gram
    }
}

/// Haar-style random projective measurement: QR of a complex Gaussian
/// matrix (with the usual phase fix), columns partitioned into `n` nonempty
/// groups drawn uniformly over compositions of `d`.
pub fn random_projective_povm(dim: usize, n: usize, seed: u64) -> Result<ProjectivePovm> {
    random_projective_povm_with(&mut rng_from(seed), dim, n)
}

pub(crate) fn random_projective_povm_with<R: Rng>(
    rng: &mut R,
    dim: usize,
    n: usize,
) -> Result<ProjectivePovm> {
    if n < 2 || n > dim {
        return Err(Error::BadPartition { n, d: dim });
    }
    let unitary = random_unitary_with(rng, dim);
    let sizes = random_composition(rng, dim, n);

    let columns: Vec<Vec<num_complex::Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| unitary.get(i, j)).collect())
        .collect();
    let mut projectors = Vec::with_capacity(n);
    let mut offset = 0;
    for &size in &sizes {
        let mut p = ComplexMatrix::zeros(dim, dim)?;
        for column in &columns[offset..offset + size] {
            p = p.add(&ComplexMatrix::outer(column, column)?)?;
        }
        projectors.push(hermitize(&p)?);
        offset += size;
    }
    ProjectivePovm::new(projectors, &Tolerance::default())
}

fn random_unitary_with<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    use nalgebra::DMatrix;
    let g = gaussian_matrix(rng, dim, dim);
    let nm = DMatrix::from_fn(dim, dim, |i, j| g.get(i, j));
    let qr = nm.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Phase fix: scale each column so the corresponding diagonal of R is
    // real positive.
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { num_complex::Complex64::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase.conj();
        }
    }
    ComplexMatrix::new(dim, dim, (0..dim * dim).map(|k| q[(k / dim, k % dim)]).collect())
        .expect("finite unitary entries")
}

// Uniform composition of `total` into `parts` positive summands, via a
// uniform (parts-1)-subset of cut positions.
fn random_composition<R: Rng>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    let mut gaps: Vec<usize> = (1..total).collect();
    // Partial Fisher-Yates: the first parts-1 entries become the cut set.
    for i in 0..parts - 1 {
        let j = rng.random_range(i..gaps.len());
        gaps.swap(i, j);
    }
    let mut cuts: Vec<usize> = gaps[..parts - 1].to_vec();
    cuts.sort_unstable();
    cuts.push(total);
    let mut sizes = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        sizes.push(c - prev);
        prev = c;
    }
    sizes
}

/// Family of `n` independent complex-Gaussian `out_dim x in_dim` operators.
pub fn random_family(in_dim: usize, out_dim: usize, n: usize, seed: u64) -> Result<OperatorFamily> {
    random_family_with(&mut rng_from(seed), in_dim, out_dim, n)
}

pub(crate) fn random_family_with<R: Rng>(
    rng: &mut R,
    in_dim: usize,
    out_dim: usize,
    n: usize,
) -> Result<OperatorFamily> {
    let operators = (0..n).map(|_| gaussian_matrix(rng, out_dim, in_dim)).collect();
    OperatorFamily::new(operators)
}

/// Rejection-samples a strictly interior member of the upper set from a
/// uniform box.
pub fn sample_upper_interior(arity: usize, seed: u64, tol: &Tolerance) -> Result<WeightVector> {
    sample_upper_interior_with(&mut rng_from(seed), arity, tol)
}

pub(crate) fn sample_upper_interior_with<R: Rng>(
    rng: &mut R,
    arity: usize,
    tol: &Tolerance,
) -> Result<WeightVector> {
    if arity < 2 {
        return Err(Error::ArityTooSmall(arity));
    }
    let hi = 2.0 * arity as f64;
    loop {
        let candidate: Vec<f64> = (0..arity).map(|_| rng.random_range(1.05..hi)).collect();
        let w = WeightVector::new(candidate)?;
        let v = in_upper_direct(&w, tol)?;
        if v.member && v.certificate > tol.equality_band {
            return Ok(w);
        }
    }
}

/// All-nonpositive lower-set member (entries uniform in `[-3, 0]`), with
/// membership verified rather than assumed.
pub fn sample_lower_nonpositive(arity: usize, seed: u64, tol: &Tolerance) -> Result<WeightVector> {
    sample_lower_nonpositive_with(&mut rng_from(seed), arity, tol)
}

pub(crate) fn sample_lower_nonpositive_with<R: Rng>(
    rng: &mut R,
    arity: usize,
    tol: &Tolerance,
) -> Result<WeightVector> {
    if arity < 2 {
        return Err(Error::ArityTooSmall(arity));
    }
    loop {
        let candidate: Vec<f64> = (0..arity).map(|_| -rng.random_range(0.0..3.0)).collect();
        let w = WeightVector::new(candidate)?;
        if in_lower_direct(&w, tol)?.member {
            return Ok(w);
        }
    }
}

/// Random gentle-measurement instance in tight-epsilon mode: a normalized
/// Wishart state against one projector of a random binary measurement.
pub fn random_gentle_instance(dim: usize, seed: u64, tol: &Tolerance) -> Result<GentleInstance> {
    random_gentle_instance_with(&mut rng_from(seed), dim, tol)
}

pub(crate) fn random_gentle_instance_with<R: Rng>(
    rng: &mut R,
    dim: usize,
    tol: &Tolerance,
) -> Result<GentleInstance> {
    let dim = dim.max(2);
    let rho = random_psd_with(rng, dim, true);
    let povm = random_projective_povm_with(rng, dim, 2)?;
    GentleInstance::with_tight_epsilon(rho, povm.projectors()[0].clone(), tol)
}

/// Verification mode of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CampaignMode {
    /// Generalized upper inequality on random families, states, and
    /// interior/boundary upper-set weights.
    Generalized,
    /// Reverse inequality on lower-set boundary and all-nonpositive weights.
    Reverse,
    /// Converse witness check against direct membership.
    Converse,
    /// Gentle-measurement sandwich, difference bounds, and trace-norm bound.
    Gentle,
    /// Recursive vs direct membership agreement.
    Membership,
}

/// Campaign parameters. `dims` bounds the Hilbert-space dimensions drawn
/// per trial, `arities` the measurement/family sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub master_seed: u64,
    pub trials: u64,
    pub dims: Vec<usize>,
    pub arities: Vec<usize>,
    pub mode: CampaignMode,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidConfig("dims must be non-empty".into()));
        }
        if self.arities.is_empty() {
            return Err(Error::InvalidConfig("arities must be non-empty".into()));
        }
        if self.dims.contains(&0) {
            return Err(Error::InvalidConfig("dims must be positive".into()));
        }
        if self.arities.iter().any(|&n| n < 2) {
            return Err(Error::InvalidConfig("arities must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Fail,
    Indeterminate,
}

/// Outcome of one trial: a status and the most negative slack observed
/// (gap eigenvalues for the inequality modes, agreement margin otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub status: TrialStatus,
    pub violation: f64,
}

/// Aggregate record of a campaign. `worst_violation` is the most negative
/// slack seen across trials and `worst_instance_seed` replays the trial
/// that produced it; any failure therefore ships with its reproducing seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub pass_count: u64,
    pub fail_count: u64,
    pub indeterminate_count: u64,
    pub worst_violation: f64,
    pub worst_instance_seed: u64,
    pub wall_time_s: f64,
}

fn pick<R: Rng>(rng: &mut R, choices: &[usize]) -> usize {
    choices[rng.random_range(0..choices.len())]
}

/// Runs one trial. Everything the trial uses is derived from `seed` and
/// the config, so the same pair reproduces the same outcome bit-for-bit.
pub fn run_trial(cfg: &CampaignConfig, seed: u64, tol: &Tolerance) -> Result<TrialOutcome> {
    let rng = &mut rng_from(seed);
    match cfg.mode {
        CampaignMode::Generalized => {
            let n = pick(rng, &cfg.arities);
            let in_dim = pick(rng, &cfg.dims);
            let out_dim = pick(rng, &cfg.dims);
            let weights = if rng.random_bool(0.5) {
                draw_upper_boundary(rng, n, tol)?
            } else {
                sample_upper_interior_with(rng, n, tol)?
            };
            let family = random_family_with(rng, in_dim, out_dim, n)?;
            let rho = random_psd_with(rng, in_dim, true);
            let v = verify_generalized(&family, &weights, &rho, tol)?;
            Ok(TrialOutcome {
                status: if v.holds { TrialStatus::Pass } else { TrialStatus::Fail },
                violation: v.min_gap_eigenvalue,
            })
        }
        CampaignMode::Reverse => {
            let (n, weights) = if rng.random_bool(0.5) {
                // Boundary curve of the binary lower set, log-uniform in t.
                let t = 10f64.powf(rng.random_range(-1.0..1.0));
                (2, crate::spectrahedron::sample_lower2_boundary(t)?)
            } else {
                let n = pick(rng, &cfg.arities);
                (n, sample_lower_nonpositive_with(rng, n, tol)?)
            };
            let in_dim = pick(rng, &cfg.dims);
            let out_dim = pick(rng, &cfg.dims);
            let family = random_family_with(rng, in_dim, out_dim, n)?;
            let rho = random_psd_with(rng, in_dim, true);
            let v = verify_reverse(&family, &weights, &rho, tol)?;
            Ok(TrialOutcome {
                status: if v.holds { TrialStatus::Pass } else { TrialStatus::Fail },
                violation: v.min_gap_eigenvalue,
            })
        }
        CampaignMode::Converse => {
            let n = pick(rng, &cfg.arities);
            let dim = pick(rng, &cfg.dims).max(n);
            let povm = random_projective_povm_with(rng, dim, n)?;
            let hi = 2.0 * n as f64;
            let weights = WeightVector::new(
                (0..n).map(|_| rng.random_range(1.000001..hi)).collect(),
            )?;
            let direct = in_upper_direct(&weights, tol)?;
            if direct.certificate.abs() <= tol.equality_band {
                return Ok(TrialOutcome {
                    status: TrialStatus::Indeterminate,
                    violation: 0.0,
                });
            }
            let witnessed = converse_check(&povm, &weights, tol)?;
            if witnessed == direct.member {
                Ok(TrialOutcome {
                    status: TrialStatus::Pass,
                    violation: 0.0,
                })
            } else {
                Ok(TrialOutcome {
                    status: TrialStatus::Fail,
                    violation: -direct.certificate.abs(),
                })
            }
        }
        CampaignMode::Gentle => {
            let dim = pick(rng, &cfg.dims).max(2);
            let inst = random_gentle_instance_with(rng, dim, tol)?;
            let bounds = gentle_bounds(&inst, tol)?;
            let sandwich = check_sandwich(&inst, &bounds, tol)?;
            let mut violation = sandwich
                .lower
                .min_gap_eigenvalue
                .min(sandwich.upper.min_gap_eigenvalue);
            let mut ok = sandwich.holds();
            if inst.epsilon() > 0.0 {
                let (lower, upper) = gentle_difference_bounds(&inst, tol)?;
                let diff = inst.rho().sub(&inst.kept_block()?)?;
                let lo = crate::matrix::loewner_leq(&lower, &diff, tol)?;
                let hi = crate::matrix::loewner_leq(&diff, &upper, tol)?;
                ok &= lo.holds && hi.holds;
                violation = violation.min(lo.min_gap_eigenvalue).min(hi.min_gap_eigenvalue);
            }
            let report = trace_norm_report(&inst)?;
            let slack = report.bound_new - report.half_t1;
            ok &= report.within_new_bound(1e-8);
            violation = violation.min(slack);
            Ok(TrialOutcome {
                status: if ok { TrialStatus::Pass } else { TrialStatus::Fail },
                violation,
            })
        }
        CampaignMode::Membership => {
            let n = pick(rng, &cfg.arities);
            let hi = 2.0 * n as f64;
            let weights =
                WeightVector::new((0..n).map(|_| rng.random_range(0.5..hi)).collect())?;
            let direct = in_upper_direct(&weights, tol)?;
            if direct.certificate.abs() <= tol.equality_band {
                return Ok(TrialOutcome {
                    status: TrialStatus::Indeterminate,
                    violation: 0.0,
                });
            }
            match in_upper_recursive(&weights, tol)? {
                RecursiveVerdict::Decided(r) if r.member == direct.member => Ok(TrialOutcome {
                    status: TrialStatus::Pass,
                    violation: 0.0,
                }),
                RecursiveVerdict::Decided(_) => Ok(TrialOutcome {
                    status: TrialStatus::Fail,
                    violation: -direct.certificate.abs(),
                }),
                // The polynomial route refused a near-boundary prefix; the
                // direct test stands in, counted separately.
                RecursiveVerdict::BoundaryIndeterminate => Ok(TrialOutcome {
                    status: TrialStatus::Indeterminate,
                    violation: 0.0,
                }),
            }
        }
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var("PINCHLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

/// Executes a campaign: independent seeded trials (parallel, capped by
/// `PINCHLAB_THREADS`) merged by an associative aggregation. Reports are
/// bit-identical across runs except for `wall_time_s`.
pub fn run_campaign(cfg: &CampaignConfig, tol: &Tolerance) -> Result<CampaignReport> {
    cfg.validate()?;
    let start = Instant::now();
    let seeds: Vec<u64> = (0..cfg.trials).map(|i| trial_seed(cfg.master_seed, i)).collect();

    let run_all = || -> Result<Vec<TrialOutcome>> {
        seeds
            .par_iter()
            .map(|&s| run_trial(cfg, s, tol))
            .collect()
    };
    let outcomes = match thread_cap() {
        Some(cap) => rayon::ThreadPoolBuilder::new()
            .num_threads(cap)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;

    let mut pass_count = 0;
    let mut fail_count = 0;
    let mut indeterminate_count = 0;
    let mut worst_violation = f64::INFINITY;
    let mut worst_instance_seed = seeds[0];
    for (outcome, &seed) in outcomes.iter().zip(&seeds) {
        match outcome.status {
            TrialStatus::Pass => pass_count += 1,
            TrialStatus::Fail => fail_count += 1,
            TrialStatus::Indeterminate => indeterminate_count += 1,
        }
        if outcome.violation < worst_violation {
            worst_violation = outcome.violation;
            worst_instance_seed = seed;
        }
    }
    Ok(CampaignReport {
        config: cfg.clone(),
        pass_count,
        fail_count,
        indeterminate_count,
        worst_violation,
        worst_instance_seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
