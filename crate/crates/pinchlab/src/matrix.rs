//! Dense complex matrices and the semidefinite-order primitives.
//!
//! Everything downstream (spectrahedron membership, the pinching verifiers,
//! the gentle-measurement bounds) reduces to the operations in this module:
//! Hermitian symmetrization, PSD tests, Loewner comparison, and the trace
//! norm, all under one explicit [`Tolerance`] policy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense row-major complex matrix, the universal carrier for states,
/// projectors, operator families, and the all-ones matrix.
///
/// Invariants enforced at construction: positive dimensions, entry count
/// equal to `rows * cols`, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(Error::DimensionsTooLarge { rows, cols })?;
        if entries.len() != expected {
            return Err(Error::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let len = rows
            .checked_mul(cols)
            .ok_or(Error::DimensionsTooLarge { rows, cols })?;
        Self::new(rows, cols, vec![Complex64::ZERO; len])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim, dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        Ok(m)
    }

    /// Builds from real entries in row-major order.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        )
    }

    /// Diagonal matrix with the given real diagonal.
    pub fn diag_real(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = Self::zeros(d, d)?;
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            m.entries[i * d + i] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Rank-one outer product `u v†` of two vectors.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        let entries = u
            .iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b.conj()))
            .collect();
        Self::new(u.len(), v.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut entries = vec![Complex64::ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Self::new(self.rows, other.cols, entries)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<Complex64>()
            })
            .collect())
    }

    pub fn trace(&self) -> Result<Complex64> {
        let d = self.require_square()?;
        Ok((0..d).map(|i| self.get(i, i)).sum())
    }

    /// Real part of the trace; the imaginary part is zero for Hermitian input.
    pub fn trace_re(&self) -> Result<f64> {
        Ok(self.trace()?.re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `m - m†`; zero exactly for Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> Result<f64> {
        let d = self.require_square()?;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|c| c.im == 0.0)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

// JSON schema used repo-wide: {"rows": n, "cols": m, "entries": [[re, im], ...]},
// row-major. Deserialization goes through the validating constructor.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(f64, f64)>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|c| (c.re, c.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        ComplexMatrix::new(
            repr.rows,
            repr.cols,
            repr.entries
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Tolerance policy inherited by every verifier in the crate.
///
/// `psd_slack` is the relative eigenvalue floor for PSD decisions,
/// `equality_band` the half-width used to classify boundary (tight) cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub psd_slack: f64,
    pub equality_band: f64,
}

impl Tolerance {
    pub const DEFAULT_PSD_SLACK: f64 = 1e-9;
    pub const DEFAULT_EQUALITY_BAND: f64 = 1e-7;

    pub fn new(psd_slack: f64, equality_band: f64) -> Result<Self> {
        if psd_slack.is_nan() || psd_slack < 0.0 || equality_band.is_nan() || equality_band < 0.0 {
            return Err(Error::NegativeTolerance);
        }
        Ok(Self {
            psd_slack,
            equality_band,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            psd_slack: Self::DEFAULT_PSD_SLACK,
            equality_band: Self::DEFAULT_EQUALITY_BAND,
        }
    }
}

/// Outcome of a semidefinite-order comparison.
///
/// `holds` is true exactly when `min_gap_eigenvalue >= -tolerance_used`,
/// with `tolerance_used = psd_slack * scale` and `scale = max(1, ‖gap‖_op)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub holds: bool,
    pub min_gap_eigenvalue: f64,
    pub scale: f64,
    pub tolerance_used: f64,
}

impl LoewnerVerdict {
    /// Boundary classification: the gap closes to zero within the band.
    pub fn is_tight(&self, tol: &Tolerance) -> bool {
        self.min_gap_eigenvalue.abs() <= tol.equality_band * self.scale
    }
}

/// `(m + m†)/2`. The output is exactly Hermitian: entry `(i, j)` is computed
/// once and mirrored as its conjugate.
pub fn hermitize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = m.require_square()?;
    let mut out = ComplexMatrix::zeros(d, d)?;
    for i in 0..d {
        let diag = m.get(i, i);
        out.set(i, i, Complex64::new(diag.re, 0.0));
        for j in (i + 1)..d {
            let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            out.set(i, j, v);
            out.set(j, i, v.conj());
        }
    }
    Ok(out)
}

fn check_hermitian_band(m: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let dev = m.hermiticity_deviation()?;
    let allowed = tol.equality_band * m.frobenius_norm().max(1.0);
    if dev > allowed {
        return Err(Error::NotHermitian {
            deviation: dev,
            allowed,
        });
    }
    Ok(())
}

/// PSD test with a scale-relative eigenvalue floor.
///
/// The input must be Hermitian within the band (larger deviations signal a
/// caller bug and are rejected); it is then hermitized before the eigensolve.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<LoewnerVerdict> {
    check_hermitian_band(m, tol)?;
    let h = hermitize(m)?;
    let (lambda_min, lambda_max) = hermitian_extremes(&h);
    let scale = 1f64.max(lambda_min.abs()).max(lambda_max.abs());
    let tolerance_used = tol.psd_slack * scale;
    Ok(LoewnerVerdict {
        holds: lambda_min >= -tolerance_used,
        min_gap_eigenvalue: lambda_min,
        scale,
        tolerance_used,
    })
}

/// Loewner comparison `a ⪯ b`, decided as `is_psd(b - a)`.
pub fn loewner_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<LoewnerVerdict> {
    a.require_square()?;
    a.require_same_shape(b)?;
    check_hermitian_band(a, tol)?;
    check_hermitian_band(b, tol)?;
    is_psd(&b.sub(a)?, tol)
}

/// Sum of singular values. Hermitian input takes the eigenvalue route;
/// otherwise singular values come from a real SVD of the block embedding
/// (which carries each singular value of `m` twice).
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let _ = m.require_square()?;
    let dev = m.hermiticity_deviation()?;
    if dev <= 1e-12 * m.frobenius_norm().max(1.0) {
        let h = hermitize(m)?;
        Ok(hermitian_abs_eigenvalue_sum(&h))
    } else if m.is_real() {
        Ok(to_real_dmatrix(m).singular_values().iter().sum())
    } else {
        Ok(embed_real(m).singular_values().iter().sum::<f64>() / 2.0)
    }
}

/// The n-by-n all-ones matrix; rank one, eigenvalues `{n, 0, ..., 0}`.
pub fn all_ones(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let len = n
        .checked_mul(n)
        .ok_or(Error::DimensionsTooLarge { rows: n, cols: n })?;
    ComplexMatrix::new(n, n, vec![Complex64::ONE; len])
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver backend.
//
// Real symmetric input is decomposed directly. A complex Hermitian matrix
// H = A + iB is lifted to the real symmetric [[A, -B], [B, A]], whose
// spectrum is that of H with every eigenvalue doubled; min/max and
// absolute-value sums need no eigenvalue pairing, and any real eigenvector
// (x; y) maps back to the complex eigenvector x + iy.
// ---------------------------------------------------------------------------

fn to_real_dmatrix(m: &ComplexMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| m.get(i, j).re)
}

fn embed_real(m: &ComplexMatrix) -> DMatrix<f64> {
    let d = m.rows;
    DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, ii) = (i / d, i % d);
        let (bj, jj) = (j / d, j % d);
        let c = m.get(ii, jj);
        match (bi, bj) {
            (0, 0) | (1, 1) => c.re,
            (0, 1) => -c.im,
            _ => c.im,
        }
    })
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    // total_cmp: entries near the f64 limit can overflow inside the
    // decomposition, and a NaN must not panic the sort.
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending. The caller must pass an
/// exactly Hermitian matrix (use [`hermitize`] first).
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    if h.is_real() {
        sorted_eigenvalues(to_real_dmatrix(h))
    } else {
        sorted_eigenvalues(embed_real(h))
            .into_iter()
            .step_by(2)
            .collect()
    }
}

/// `(lambda_min, lambda_max)` of a Hermitian matrix.
pub fn hermitian_extremes(h: &ComplexMatrix) -> (f64, f64) {
    let ev = if h.is_real() {
        sorted_eigenvalues(to_real_dmatrix(h))
    } else {
        sorted_eigenvalues(embed_real(h))
    };
    (ev[0], ev[ev.len() - 1])
}

fn hermitian_abs_eigenvalue_sum(h: &ComplexMatrix) -> f64 {
    if h.is_real() {
        sorted_eigenvalues(to_real_dmatrix(h))
            .iter()
            .map(|l| l.abs())
            .sum()
    } else {
        sorted_eigenvalues(embed_real(h))
            .iter()
            .map(|l| l.abs())
            .sum::<f64>()
            / 2.0
    }
}

/// Unit eigenvector for the largest eigenvalue of a Hermitian matrix.
pub fn hermitian_top_eigenvector(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let d = h.require_square()?;
    if h.is_real() {
        let eig = to_real_dmatrix(h).symmetric_eigen();
        let top = arg_max(&eig.eigenvalues);
        Ok(eig
            .eigenvectors
            .column(top)
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect())
    } else {
        let eig = embed_real(h).symmetric_eigen();
        let top = arg_max(&eig.eigenvalues);
        let col = eig.eigenvectors.column(top);
        let v: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(col[i], col[d + i]))
            .collect();
        Ok(normalized(&v))
    }
}

fn arg_max(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let n = vector_norm(v);
    v.iter().map(|c| c / n).collect()
}
