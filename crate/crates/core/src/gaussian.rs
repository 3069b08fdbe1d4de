//! Correlation matrices of bipartite Gaussian states: physicality and NPT
//! tests, partial transposition, the Wigner-picture dual, mode reduction and
//! homodyne conditioning.
//!
//! Conventions: `ħ = 1`, the vacuum has `γ = I`, modes are ordered with all of
//! A's modes first, and each mode contributes an interleaved `(q, p)` pair.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, min_hermitian_eigenvalue, spd_condition, symmetric_eigh, symmetrize, to_complex,
};
use crate::symplectic::{form, pt_form, symplectic_eigenvalues, SymplecticMatrix};

/// Default tolerance for boolean verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Condition number above which `γ` is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative asymmetry accepted (and removed) on construction.
const SYMMETRY_TOL: f64 = 1e-9;
/// Measured-mode variance below which homodyne conditioning is refused.
const MIN_MEASURED_VARIANCE: f64 = 1e-12;

/// Symmetric positive definite `2(n_a+n_b)`-dimensional correlation matrix
/// together with its A/B mode partition.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
    n_a: usize,
    n_b: usize,
}

impl CorrelationMatrix {
    pub fn new(entries: DMatrix<f64>, n_a: usize, n_b: usize) -> Result<Self> {
        let (r, c) = entries.shape();
        if n_a + n_b == 0 {
            return Err(Error::InvalidModeCount(0));
        }
        if r != c || r != 2 * (n_a + n_b) {
            return Err(Error::InvalidShape {
                rows: r,
                cols: c,
                reason: "dimension must be 2(n_a + n_b)",
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema("matrix has non-finite entries".into()));
        }
        let asym = max_abs(&(&entries - entries.transpose()));
        if asym > SYMMETRY_TOL * max_abs(&entries).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let entries = symmetrize(&entries);
        if entries.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { entries, n_a, n_b })
    }

    /// Wraps a matrix produced by a congruence of an already validated one.
    pub(crate) fn derived(entries: DMatrix<f64>, n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(symmetrize(&entries), n_a, n_b)
    }

    /// The `n_a + n_b` mode vacuum.
    pub fn vacuum(n_a: usize, n_b: usize) -> Result<Self> {
        let dim = 2 * (n_a + n_b);
        Self::new(DMatrix::identity(dim, dim), n_a, n_b)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn modes(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.entries)
    }

    /// `Sᵀ γ S` with the same partition.
    pub fn transform(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.modes() != self.modes() {
            return Err(Error::InvalidShape {
                rows: s.matrix().nrows(),
                cols: s.matrix().ncols(),
                reason: "symplectic matrix does not match the state",
            });
        }
        Self::derived(s.congruence(&self.entries), self.n_a, self.n_b)
    }

    /// Exchange the roles of A and B.
    pub fn swap_sides(&self) -> Self {
        let dim = self.dim();
        let split = 2 * self.n_a;
        let perm: Vec<usize> = (split..dim).chain(0..split).collect();
        let entries = DMatrix::from_fn(dim, dim, |r, c| self.entries[(perm[r], perm[c])]);
        Self {
            entries,
            n_a: self.n_b,
            n_b: self.n_a,
        }
    }

    /// Appends a vacuum mode as the last B-side mode.
    pub fn with_vacuum_ancilla(&self) -> Self {
        let dim = self.dim();
        let mut entries = DMatrix::identity(dim + 2, dim + 2);
        entries.view_mut((0, 0), (dim, dim)).copy_from(&self.entries);
        Self {
            entries,
            n_a: self.n_a,
            n_b: self.n_b + 1,
        }
    }

    /// Scale-aware rounding floor used when comparing sign-type criteria.
    pub(crate) fn noise_floor(&self) -> f64 {
        64.0 * f64::EPSILON * self.dim() as f64 * (1.0 + max_abs(&self.entries))
    }
}

/// A Gaussian state: correlation matrix plus displacement.
///
/// The displacement plays no role in any entanglement criterion and is carried
/// only for I/O.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub gamma: CorrelationMatrix,
    pub d: DVector<f64>,
}

impl GaussianState {
    pub fn new(gamma: CorrelationMatrix, d: Option<DVector<f64>>) -> Result<Self> {
        let dim = gamma.dim();
        let d = d.unwrap_or_else(|| DVector::zeros(dim));
        if d.len() != dim {
            return Err(Error::Schema(format!(
                "displacement has length {}, expected {dim}",
                d.len()
            )));
        }
        Ok(Self { gamma, d })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhysicalityVerdict {
    pub physical: bool,
    pub min_symplectic_eigenvalue: f64,
    /// Smallest eigenvalue of `γ - Jᵀγ⁻¹J`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NptVerdict {
    pub npt: bool,
    /// Most negative eigenvalue of `γ - iJ̃`, clipped at zero.
    pub margin: f64,
    pub min_pt_symplectic_eigenvalue: f64,
}

fn check_condition(gamma: &CorrelationMatrix) -> Result<()> {
    let cond = spd_condition(gamma.entries())?;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    Ok(())
}

fn inverse(gamma: &CorrelationMatrix) -> Result<DMatrix<f64>> {
    gamma
        .entries()
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)
}

/// Decides whether `γ ≥ Jᵀγ⁻¹J`, evaluating both the matrix inequality and
/// the symplectic spectrum and insisting that they agree.
pub fn validate_physical(gamma: &CorrelationMatrix, tol: f64) -> Result<PhysicalityVerdict> {
    check_condition(gamma)?;
    let j = form(gamma.modes());
    let inv = inverse(gamma)?;
    let gap = gamma.entries() - j.transpose() * inv * &j;
    let (values, _) = symmetric_eigh(&symmetrize(&gap));
    let margin = values[0];
    let nu = gamma.symplectic_eigenvalues()?;
    let min_nu = nu[0];
    let physical = min_nu >= 1.0 - tol;

    let noise = gamma.noise_floor() * (1.0 + max_abs(&gap));
    if (min_nu > 1.0 + tol && margin < -noise) || (min_nu < 1.0 - tol && margin > noise) {
        return Err(Error::Inconsistent(format!(
            "physicality criteria disagree: min symplectic eigenvalue {min_nu}, margin {margin:e}"
        )));
    }
    Ok(PhysicalityVerdict {
        physical,
        min_symplectic_eigenvalue: min_nu,
        margin,
    })
}

/// Flips the sign of every B-side momentum row and column.
pub fn partial_transpose(gamma: &CorrelationMatrix) -> CorrelationMatrix {
    let dim = gamma.dim();
    let sign = |k: usize| {
        if k >= 2 * gamma.n_a && k % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let entries = DMatrix::from_fn(dim, dim, |r, c| gamma.entries[(r, c)] * sign(r) * sign(c));
    CorrelationMatrix {
        entries,
        n_a: gamma.n_a,
        n_b: gamma.n_b,
    }
}

/// `γ - iJ̃` as a Hermitian matrix.
pub(crate) fn npt_operator(gamma: &CorrelationMatrix) -> DMatrix<Complex64> {
    let jt = pt_form(gamma.n_a, gamma.n_b);
    let mut h = to_complex(gamma.entries());
    for (x, j) in h.iter_mut().zip(jt.iter()) {
        *x -= Complex64::new(0.0, *j);
    }
    h
}

/// Decides whether the partial transpose of a physical state is unphysical.
///
/// The verdict is taken from the partially transposed symplectic spectrum; the
/// Hermitian margin of `γ - iJ̃` and the inverse form `γ - J̃ᵀγ⁻¹J̃` must agree
/// in sign outside rounding noise.
pub fn is_npt(gamma: &CorrelationMatrix, tol: f64) -> Result<NptVerdict> {
    let phys = validate_physical(gamma, tol)?;
    if !phys.physical {
        return Err(Error::Unphysical(phys.min_symplectic_eigenvalue));
    }
    let raw = min_hermitian_eigenvalue(&npt_operator(gamma));
    let pt = partial_transpose(gamma);
    let min_nu = pt.symplectic_eigenvalues()?[0];
    let npt = min_nu < 1.0 - tol;

    let jt = pt_form(gamma.n_a, gamma.n_b);
    let inv_gap = gamma.entries() - jt.transpose() * inverse(gamma)? * &jt;
    let (inv_values, _) = symmetric_eigh(&symmetrize(&inv_gap));
    let noise = gamma.noise_floor() * (1.0 + max_abs(&inv_gap));
    let disagree = |m: f64| (min_nu > 1.0 + tol && m < -noise) || (min_nu < 1.0 - tol && m > noise);
    if disagree(raw) || disagree(inv_values[0]) {
        return Err(Error::Inconsistent(format!(
            "NPT criteria disagree: min PT symplectic eigenvalue {min_nu}, margin {raw:e}, inverse-form margin {:e}",
            inv_values[0]
        )));
    }
    Ok(NptVerdict {
        npt,
        margin: raw.min(0.0),
        min_pt_symplectic_eigenvalue: min_nu,
    })
}

/// The Wigner-picture correlation matrix `Jᵀγ⁻¹J`.
pub fn wigner_cm(gamma: &CorrelationMatrix) -> Result<CorrelationMatrix> {
    check_condition(gamma)?;
    let j = form(gamma.modes());
    let w = j.transpose() * inverse(gamma)? * &j;
    CorrelationMatrix::derived(w, gamma.n_a, gamma.n_b)
}

/// Principal submatrix on the kept modes. Indices are 0-based within each side.
pub fn reduce_to_modes(
    gamma: &CorrelationMatrix,
    keep_a: &[usize],
    keep_b: &[usize],
) -> Result<CorrelationMatrix> {
    if keep_a.is_empty() && keep_b.is_empty() {
        return Err(Error::Precondition("nothing left to keep".into()));
    }
    let mut modes = Vec::with_capacity(keep_a.len() + keep_b.len());
    for &k in keep_a {
        if k >= gamma.n_a {
            return Err(Error::ModeIndex {
                index: k,
                modes: gamma.n_a,
            });
        }
        modes.push(k);
    }
    for &k in keep_b {
        if k >= gamma.n_b {
            return Err(Error::ModeIndex {
                index: k,
                modes: gamma.n_b,
            });
        }
        modes.push(gamma.n_a + k);
    }
    let idx: Vec<usize> = modes.iter().flat_map(|m| [2 * m, 2 * m + 1]).collect();
    let entries = gamma.entries.select_rows(&idx).select_columns(&idx);
    CorrelationMatrix::new(entries, keep_a.len(), keep_b.len())
}

/// Conditional correlation matrix of the other modes after an ideal homodyne
/// measurement of `q` on `mode` (global 0-based index).
///
/// Gaussian conditioning gives `Γ - σ (πγ_mπ)^+ σᵀ` with `π = diag(1, 0)`; the
/// result does not depend on the outcome, whose displacement is dropped.
pub fn condition_on_x_measurement(
    gamma: &CorrelationMatrix,
    mode: usize,
) -> Result<CorrelationMatrix> {
    if mode >= gamma.modes() {
        return Err(Error::ModeIndex {
            index: mode,
            modes: gamma.modes(),
        });
    }
    if gamma.modes() == 1 {
        return Err(Error::Precondition("cannot measure the only mode".into()));
    }
    let q = 2 * mode;
    let var = gamma.entries[(q, q)];
    if var < MIN_MEASURED_VARIANCE {
        return Err(Error::Degenerate(format!(
            "measured quadrature variance {var:e}"
        )));
    }
    let kept: Vec<usize> = (0..gamma.dim()).filter(|&k| k / 2 != mode).collect();
    let block = gamma.entries.select_rows(&kept).select_columns(&kept);
    let sigma = gamma.entries.select_rows(&kept).column(q).into_owned();
    let cond = block - &sigma * sigma.transpose() / var;
    let (n_a, n_b) = if mode < gamma.n_a {
        (gamma.n_a - 1, gamma.n_b)
    } else {
        (gamma.n_a, gamma.n_b - 1)
    };
    CorrelationMatrix::derived(cond, n_a, n_b)
}

/// Beam splitter with transmissivity `cos²θ` between global modes `i` and `j`
/// of an `n`-mode system.
pub fn beam_splitter(n: usize, i: usize, j: usize, theta: f64) -> Result<SymplecticMatrix> {
    if i >= n || j >= n || i == j {
        return Err(Error::ModeIndex {
            index: i.max(j),
            modes: n,
        });
    }
    let (s, c) = theta.sin_cos();
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for k in 0..2 {
        let (a, b) = (2 * i + k, 2 * j + k);
        m[(a, a)] = c;
        m[(b, b)] = c;
        m[(a, b)] = s;
        m[(b, a)] = -s;
    }
    Ok(SymplecticMatrix::new_unchecked(m))
}

/// Sends `mode` (global index) through a pure-loss channel of transmissivity
/// `eta`, modelled as a beam splitter with a discarded vacuum ancilla.
pub fn lossy_channel(gamma: &CorrelationMatrix, mode: usize, eta: f64) -> Result<CorrelationMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Precondition(format!(
            "transmissivity {eta} outside [0, 1]"
        )));
    }
    let ext = gamma.with_vacuum_ancilla();
    let n = ext.modes();
    let bs = beam_splitter(n, mode, n - 1, eta.sqrt().acos())?;
    let mixed = ext.transform(&bs)?;
    let keep_a: Vec<usize> = (0..gamma.n_a).collect();
    let keep_b: Vec<usize> = (0..gamma.n_b).collect();
    reduce_to_modes(&mixed, &keep_a, &keep_b)
}
