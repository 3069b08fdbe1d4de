//! Symplectic forms, symplectic matrices, symplectic eigenvalues and
//! symplectic basis extension.
//!
//! Phase-space vectors are ordered `(q_1, p_1, q_2, p_2, ...)` and the form is
//! `J = ⊕ [[0, -1], [1, 0]]`. A real matrix `S` is symplectic when
//! `Sᵀ J S = J`; it acts on correlation matrices by congruence, `γ ↦ Sᵀ γ S`.
//!
//! Basis convention: a symplectic basis is stored as the columns `f_1..f_2n`
//! of a matrix `F` with `Fᵀ J F = J`. In 1-based indexing columns `(2k-1, 2k)`
//! form the k-th canonical pair, so `f_{2k-1}ᵀ J f_{2k} = -1`,
//! `f_{2k}ᵀ J f_{2k-1} = 1`, and every other pairing vanishes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, hermitian_eigh, max_abs, spd_sqrt};

/// Default absolute entrywise tolerance for symplectic identities.
pub const TOL_SYMP: f64 = 1e-9;

/// Residual norm below which a Gram–Schmidt candidate is rejected.
const CANDIDATE_FLOOR: f64 = 1e-8;

/// The standard symplectic form on `n` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// The skew product `uᵀ J v`.
    pub fn skew(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        skew(u, v)
    }
}

pub fn make_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::InvalidModeCount(n));
    }
    Ok(SymplecticForm {
        n,
        matrix: form(n),
    })
}

/// `J` on `n` modes; `n = 0` yields the empty matrix.
pub(crate) fn form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    j
}

/// `J` with the blocks of the last `n_b` modes negated (the partially
/// transposed form).
pub(crate) fn pt_form(n_a: usize, n_b: usize) -> DMatrix<f64> {
    let mut j = form(n_a + n_b);
    for k in n_a..n_a + n_b {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// `uᵀ J v` without materializing `J`.
pub fn skew(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for k in 0..u.len() / 2 {
        acc += -u[2 * k] * v[2 * k + 1] + u[2 * k + 1] * v[2 * k];
    }
    acc
}

fn check_even_square(m: &DMatrix<f64>) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::InvalidShape {
            rows: r,
            cols: c,
            reason: "matrix must be square",
        });
    }
    if r == 0 || r % 2 == 1 {
        return Err(Error::InvalidShape {
            rows: r,
            cols: c,
            reason: "dimension must be even and positive",
        });
    }
    Ok(r / 2)
}

/// `max |Sᵀ J S - J|` over entries.
pub fn symplectic_defect(s: &DMatrix<f64>) -> Result<f64> {
    let n = check_even_square(s)?;
    let j = form(n);
    Ok(max_abs(&(s.transpose() * &j * s - &j)))
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(s)? <= tol)
}

/// A real matrix preserving the symplectic form.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = check_even_square(&entries)?;
        let defect = symplectic_defect(&entries)?;
        if defect > tol {
            return Err(Error::Precondition(format!(
                "matrix is not symplectic (defect {defect:e})"
            )));
        }
        Ok(Self { n, entries })
    }

    pub(crate) fn new_unchecked(entries: DMatrix<f64>) -> Self {
        let n = entries.nrows() / 2;
        Self { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// `S⁻¹ = Jᵀ Sᵀ J`, exact for symplectic `S`.
    pub fn inverse(&self) -> Self {
        let j = form(self.n);
        Self::new_unchecked(j.transpose() * self.entries.transpose() * j)
    }

    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.entries.transpose())
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Self {
        Self::new_unchecked(&self.entries * &other.entries)
    }

    /// Local transformation `S_A ⊕ S_B`.
    pub fn direct_sum(&self, other: &SymplecticMatrix) -> Self {
        Self::new_unchecked(block_diag(&self.entries, &other.entries))
    }

    /// `Sᵀ γ S`.
    pub fn congruence(&self, gamma: &DMatrix<f64>) -> DMatrix<f64> {
        self.entries.transpose() * gamma * &self.entries
    }

    pub fn defect(&self) -> f64 {
        max_abs(&(self.entries.transpose() * form(self.n) * &self.entries - form(self.n)))
    }
}

/// Symplectic eigenvalues of a symmetric positive definite `2n × 2n` matrix,
/// ascending.
///
/// Computed as the positive half of the spectrum of the Hermitian matrix
/// `i γ^{1/2} Jᵀ γ^{1/2}`, which is similar to `i Jᵀ γ`.
pub fn symplectic_eigenvalues(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_even_square(gamma)?;
    let root = spd_sqrt(gamma)?;
    let k = &root * form(n).transpose() * &root;
    let h = k.map(|x| Complex64::new(0.0, x));
    let (values, _) = hermitian_eigh(&h);
    Ok(values.iter().skip(n).copied().collect())
}

/// A full symplectic basis stored column-wise (see the module docs for the
/// pairing convention).
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticBasis {
    vectors: DMatrix<f64>,
}

impl SymplecticBasis {
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    /// Largest violation of the pairing relations, `max |Fᵀ J F - J|`.
    pub fn pairing_defect(&self) -> f64 {
        let n = self.vectors.nrows() / 2;
        let j = form(n);
        max_abs(&(self.vectors.transpose() * &j * &self.vectors - j))
    }

    /// The matrix mapping `e_k ↦ f_k`.
    pub fn into_symplectic(self) -> SymplecticMatrix {
        SymplecticMatrix::new_unchecked(self.vectors)
    }
}

/// Remove the components of `v` along already fixed pairs `(a, b)` so that the
/// residual is skew-orthogonal to both.
fn skew_project(v: &mut DVector<f64>, pairs: &[(DVector<f64>, DVector<f64>)]) {
    // two sweeps keep the residual skew-orthogonal to rounding
    for _ in 0..2 {
        for (a, b) in pairs {
            let alpha = skew(b, v);
            let beta = skew(a, v);
            v.axpy(-alpha, a, 1.0);
            v.axpy(beta, b, 1.0);
        }
    }
}

/// Extends a canonical pair `(f1, f2)` with `f1ᵀ J f2 = -1` to a full
/// symplectic basis by symplectic Gram–Schmidt over the standard basis.
///
/// Each new pair takes the next standard basis vector with a usable residual
/// as its first member and the skew-projected `J a` as its partner, which has
/// skew product `-|a|²` with `a` and so never degenerates.
pub fn extend_to_symplectic_basis(
    f1: &DVector<f64>,
    f2: &DVector<f64>,
    tol: f64,
) -> Result<SymplecticBasis> {
    let dim = f1.len();
    if dim == 0 || dim % 2 == 1 || f2.len() != dim {
        return Err(Error::InvalidShape {
            rows: dim,
            cols: f2.len(),
            reason: "basis vectors must share an even length",
        });
    }
    let n = dim / 2;
    let pairing = skew(f1, f2);
    if (pairing + 1.0).abs() > tol {
        return Err(Error::Precondition(format!(
            "f1ᵀJf2 must equal -1, got {pairing}"
        )));
    }
    let j = form(n);
    let mut pairs = vec![(f1.clone(), f2.clone())];
    let mut next = 0;
    while pairs.len() < n {
        let mut found = None;
        while next < dim {
            let mut a = DVector::zeros(dim);
            a[next] = 1.0;
            next += 1;
            skew_project(&mut a, &pairs);
            let norm = a.norm();
            if norm >= CANDIDATE_FLOOR {
                found = Some(a / norm);
                break;
            }
        }
        let a = found.ok_or_else(|| {
            Error::Degenerate("standard basis exhausted during symplectic extension".into())
        })?;
        let mut b = &j * &a;
        skew_project(&mut b, &pairs);
        let w = skew(&a, &b);
        if w.abs() < CANDIDATE_FLOOR {
            return Err(Error::Degenerate(format!(
                "partner candidate has vanishing skew product {w:e}"
            )));
        }
        b /= -w;
        pairs.push((a, b));
    }
    let mut vectors = DMatrix::zeros(dim, dim);
    for (k, (a, b)) in pairs.iter().enumerate() {
        vectors.set_column(2 * k, a);
        vectors.set_column(2 * k + 1, b);
    }
    let basis = SymplecticBasis { vectors };
    let defect = basis.pairing_defect();
    if defect > tol {
        return Err(Error::Degenerate(format!(
            "extended basis violates pairing relations by {defect:e}"
        )));
    }
    Ok(basis)
}

/// Mixes a master seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `exp(J H)` for a random symmetric `H` drawn from `rng`.
pub(crate) fn random_symplectic_with(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let dim = 2 * n;
    // keeps ‖JH‖ around one, so the condition number stays below ~10
    let bound = 0.6 / (dim as f64).sqrt();
    let mut h = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let x: f64 = rng.gen_range(-bound..bound);
            h[(r, c)] = x;
            h[(c, r)] = x;
        }
    }
    (form(n) * h).exp()
}

/// Deterministic random symplectic matrix on `n` modes.
pub fn random_symplectic(n: usize, seed: u64) -> Result<SymplecticMatrix> {
    if n == 0 {
        return Err(Error::InvalidModeCount(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SymplecticMatrix::new_unchecked(random_symplectic_with(
        n, &mut rng,
    )))
}

/// Deterministic random local transformation `S_A ⊕ S_B`; either side may be
/// empty.
pub fn random_local_symplectic(n_a: usize, n_b: usize, seed: u64) -> Result<SymplecticMatrix> {
    if n_a + n_b == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    let side = |n: usize, stream: u64| {
        if n == 0 {
            SymplecticMatrix::identity(0)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, stream));
            SymplecticMatrix::new_unchecked(random_symplectic_with(n, &mut rng))
        }
    };
    Ok(side(n_a, 1).direct_sum(&side(n_b, 2)))
}
