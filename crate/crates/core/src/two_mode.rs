//! Analysis specific to 1×1 states: standard form and its four parameters,
//! the physicality and inseparability inequalities, Wigner-picture
//! parameters, and the reduction-criterion value against a two-mode squeezed
//! probe.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{validate_physical, CorrelationMatrix, DEFAULT_TOL};
use crate::linalg::spd_inv_sqrt;
use crate::symplectic::SymplecticMatrix;

/// Relative tolerance for the determinant identities that tie the four
/// parameters back to the invariants of `γ`.
const DETERMINANT_CONSISTENCY: f64 = 1e-7;

/// The four local invariants `(n_a, n_b, k_x, k_p)` of a 1×1 state, with
/// `k_x ≥ |k_p|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StdFormParams {
    pub n_a: f64,
    pub n_b: f64,
    pub k_x: f64,
    pub k_p: f64,
}

impl StdFormParams {
    pub fn new(n_a: f64, n_b: f64, k_x: f64, k_p: f64) -> Self {
        Self { n_a, n_b, k_x, k_p }
    }

    /// `n_a n_b - k_x²`
    pub fn d_x(&self) -> f64 {
        self.n_a * self.n_b - self.k_x * self.k_x
    }

    /// `n_a n_b - k_p²`
    pub fn d_p(&self) -> f64 {
        self.n_a * self.n_b - self.k_p * self.k_p
    }

    /// The standard-form matrix with blocks `n_a I`, `n_b I`, `diag(k_x, k_p)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let Self { n_a, n_b, k_x, k_p } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                n_a, 0.0, k_x, 0.0, //
                0.0, n_a, 0.0, k_p, //
                k_x, 0.0, n_b, 0.0, //
                0.0, k_p, 0.0, n_b,
            ],
        )
    }

    pub fn max_abs_diff(&self, other: &StdFormParams) -> f64 {
        [
            self.n_a - other.n_a,
            self.n_b - other.n_b,
            self.k_x - other.k_x,
            self.k_p - other.k_p,
        ]
        .iter()
        .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Parameters `(N_a, N_b, K_x, K_p)` of the Wigner-picture correlation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WignerParams {
    #[serde(rename = "N_a")]
    pub n_a: f64,
    #[serde(rename = "N_b")]
    pub n_b: f64,
    #[serde(rename = "K_x")]
    pub k_x: f64,
    #[serde(rename = "K_p")]
    pub k_p: f64,
    #[serde(rename = "D_x")]
    pub d_x: f64,
    #[serde(rename = "D_p")]
    pub d_p: f64,
}

impl From<StdFormParams> for WignerParams {
    fn from(p: StdFormParams) -> Self {
        Self {
            n_a: p.n_a,
            n_b: p.n_b,
            k_x: p.k_x,
            k_p: p.k_p,
            d_x: p.d_x(),
            d_p: p.d_p(),
        }
    }
}

impl WignerParams {
    pub fn as_std(&self) -> StdFormParams {
        StdFormParams::new(self.n_a, self.n_b, self.k_x, self.k_p)
    }

    /// `N_a² + N_b² - 2K_xK_p - (D_xD_p + 1)`; positive exactly for
    /// inseparable states.
    pub fn inseparability_residual(&self) -> f64 {
        inseparability_residual(&self.as_std())
    }
}

/// A local symplectic pair together with the standard form it produces.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    pub gamma_std: CorrelationMatrix,
    pub params: StdFormParams,
}

fn require_1x1(gamma: &CorrelationMatrix) -> Result<()> {
    if gamma.n_a() != 1 || gamma.n_b() != 1 {
        return Err(Error::InvalidShape {
            rows: gamma.dim(),
            cols: gamma.dim(),
            reason: "operation needs a 1×1 mode partition",
        });
    }
    Ok(())
}

fn block(m: &DMatrix<f64>, r: usize, c: usize) -> DMatrix<f64> {
    m.view((r, c), (2, 2)).into_owned()
}

fn to_m2(m: &DMatrix<f64>) -> Matrix2<f64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn from_m2(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// `C = U diag(d1, d2) Vᵀ` with `U, V ∈ SO(2)`, `d1 ≥ |d2|`.
fn signed_svd(c: &Matrix2<f64>) -> (Matrix2<f64>, f64, f64, Matrix2<f64>) {
    let svd = c.svd(true, true);
    let mut u = svd.u.expect("requested U");
    let mut v = svd.v_t.expect("requested Vᵀ").transpose();
    let (mut d1, mut d2) = (svd.singular_values[0], svd.singular_values[1]);
    if d1 < d2 {
        std::mem::swap(&mut d1, &mut d2);
        u.swap_columns(0, 1);
        v.swap_columns(0, 1);
    }
    if u.determinant() < 0.0 {
        u.set_column(1, &(-u.column(1)));
        d2 = -d2;
    }
    if v.determinant() < 0.0 {
        v.set_column(1, &(-v.column(1)));
        d2 = -d2;
    }
    (u, d1, d2, v)
}

/// Standard-form reduction without a physicality check, usable on
/// Wigner-picture matrices.
pub(crate) fn standard_form_unchecked(gamma: &CorrelationMatrix) -> Result<StandardForm> {
    require_1x1(gamma)?;
    let g = gamma.entries();
    let a = block(g, 0, 0);
    let b = block(g, 2, 2);
    let n_a = a.determinant().sqrt();
    let n_b = b.determinant().sqrt();
    // unimodular symmetric congruences taking A ↦ n_a I and B ↦ n_b I
    let m_a = spd_inv_sqrt(&a)? * n_a.sqrt();
    let m_b = spd_inv_sqrt(&b)? * n_b.sqrt();
    let c = to_m2(&(m_a.transpose() * block(g, 0, 2) * &m_b));
    let (u, k_x, k_p, v) = signed_svd(&c);
    let s_a = SymplecticMatrix::new_unchecked(m_a * from_m2(&u));
    let s_b = SymplecticMatrix::new_unchecked(m_b * from_m2(&v));
    let s = s_a.direct_sum(&s_b);
    let gamma_std = CorrelationMatrix::derived(s.congruence(g), 1, 1)?;
    let params = StdFormParams { n_a, n_b, k_x, k_p };

    let det_c = block(g, 0, 2).determinant();
    let det_g = g.determinant();
    let scale = 1.0 + (n_a * n_b).powi(2);
    if (k_x * k_p - det_c).abs() > DETERMINANT_CONSISTENCY * scale
        || (params.d_x() * params.d_p() - det_g).abs() > DETERMINANT_CONSISTENCY * scale
    {
        return Err(Error::Inconsistent(format!(
            "standard-form parameters {params:?} do not reproduce det C = {det_c}, det γ = {det_g}"
        )));
    }
    Ok(StandardForm {
        s_a,
        s_b,
        gamma_std,
        params,
    })
}

/// Local symplectic maps bringing a physical 1×1 state to standard form.
///
/// Each side is first normalized by the unimodular congruence
/// `√n · A^{-1/2}`, then the correlation block is diagonalized by a pair of
/// planar rotations (a signed 2×2 SVD), which also orders `k_x ≥ |k_p|`.
pub fn standard_form_transform(gamma: &CorrelationMatrix) -> Result<StandardForm> {
    require_1x1(gamma)?;
    let phys = validate_physical(gamma, DEFAULT_TOL)?;
    if !phys.physical {
        return Err(Error::Unphysical(phys.min_symplectic_eigenvalue));
    }
    standard_form_unchecked(gamma)
}

/// The four standard-form parameters of a physical 1×1 state.
///
/// `k_x` and `|k_p|` are taken from the singular values of the normalized
/// correlation block, which stays accurate when `k_x² = k_p²`; the results are
/// checked against `k_x k_p = det C` and `(n_a n_b - k_x²)(n_a n_b - k_p²) = det γ`.
pub fn standard_form_params(gamma: &CorrelationMatrix) -> Result<StdFormParams> {
    Ok(standard_form_transform(gamma)?.params)
}

/// The parameters solved directly from `det A`, `det B`, `det C`, `det γ`.
///
/// `(k_x², k_p²)` are the roots of `t² - σt + (det C)² = 0`. Near a double
/// root (`|k_p| = k_x`, e.g. any two-mode squeezed vacuum) the discriminant
/// cancels and accuracy degrades to about the square root of machine
/// precision; prefer [`standard_form_params`].
pub fn params_from_determinants(gamma: &CorrelationMatrix) -> Result<StdFormParams> {
    require_1x1(gamma)?;
    let g = gamma.entries();
    let n_a = block(g, 0, 0).determinant().sqrt();
    let n_b = block(g, 2, 2).determinant().sqrt();
    let det_c = block(g, 0, 2).determinant();
    let nn = n_a * n_b;
    let sigma = (nn * nn + det_c * det_c - g.determinant()) / nn;
    let mut disc = sigma * sigma - 4.0 * det_c * det_c;
    if disc < 0.0 {
        if disc < -1e-8 * (1.0 + sigma * sigma) {
            return Err(Error::Inconsistent(format!(
                "determinants admit no real parameters (discriminant {disc:e})"
            )));
        }
        disc = 0.0;
    }
    let kx2 = 0.5 * (sigma + disc.sqrt());
    let kp2 = (0.5 * (sigma - disc.sqrt())).max(0.0);
    let k_p = if det_c == 0.0 {
        0.0
    } else {
        det_c.signum() * kp2.sqrt()
    };
    Ok(StdFormParams {
        n_a,
        n_b,
        k_x: kx2.sqrt(),
        k_p,
    })
}

/// Correlation matrix of a state already in standard form.
pub fn standard_form_cm(p: &StdFormParams) -> Result<CorrelationMatrix> {
    CorrelationMatrix::new(p.matrix(), 1, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalCheck {
    pub physical: bool,
    /// `(n_an_b - k_x²)(n_an_b - k_p²) + 1 - (n_a² + n_b² + 2k_xk_p)`
    pub residual_det: f64,
    /// `n_an_b - k_x² - 1`
    pub residual_x: f64,
}

pub fn check_physical(p: &StdFormParams, tol: f64) -> PhysicalCheck {
    let residual_det = p.d_x() * p.d_p() + 1.0 - (p.n_a * p.n_a + p.n_b * p.n_b + 2.0 * p.k_x * p.k_p);
    let residual_x = p.d_x() - 1.0;
    PhysicalCheck {
        physical: residual_det >= -tol && residual_x >= -tol,
        residual_det,
        residual_x,
    }
}

fn inseparability_residual(p: &StdFormParams) -> f64 {
    p.n_a * p.n_a + p.n_b * p.n_b - 2.0 * p.k_x * p.k_p - (p.d_x() * p.d_p() + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InseparabilityCheck {
    pub inseparable: bool,
    /// `n_a² + n_b² - 2k_xk_p - [(n_an_b - k_x²)(n_an_b - k_p²) + 1]`
    pub residual: f64,
}

pub fn check_inseparable(p: &StdFormParams, tol: f64) -> Result<InseparabilityCheck> {
    let phys = check_physical(p, tol);
    if !phys.physical {
        return Err(Error::Precondition(format!(
            "parameters {p:?} are unphysical"
        )));
    }
    let residual = inseparability_residual(p);
    Ok(InseparabilityCheck {
        inseparable: residual > tol,
        residual,
    })
}

pub fn is_symmetric(p: &StdFormParams, tol: f64) -> bool {
    (p.n_a - p.n_b).abs() <= tol
}

/// Inseparability of a symmetric state: `|n² - k_xk_p - 1| < n(k_x - k_p)`.
/// The residual is `n(k_x - k_p) - |n² - k_xk_p - 1|`.
pub fn check_symmetric_inseparable(n: f64, k_x: f64, k_p: f64, tol: f64) -> InseparabilityCheck {
    let residual = n * (k_x - k_p) - (n * n - k_x * k_p - 1.0).abs();
    InseparabilityCheck {
        inseparable: residual > tol,
        residual,
    }
}

/// Two-mode squeezed vacuum with squeezing `r`, in standard form.
pub fn tmss_cm(r: f64) -> Result<CorrelationMatrix> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!("squeezing {r} must be finite and ≥ 0")));
    }
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    standard_form_cm(&StdFormParams::new(c, c, s, -s))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RcWitnessResult {
    /// Squeezing of the probe state.
    pub r: f64,
    /// `2 det(γ_A,ρ + γ_A,ψ)^{-1/2} - 4 det(γ_ρ + γ_ψ)^{-1/2}`
    pub value: f64,
    /// `(n - k_x)(n + k_p) - 1`, the large-`r` decision quantity for
    /// symmetric states (`n` is the mean of `n_a` and `n_b`).
    pub asymptotic_value: f64,
}

impl RcWitnessResult {
    /// A negative value certifies distillability.
    pub fn certifies(&self) -> bool {
        self.value < 0.0
    }
}

/// Reduction-criterion expectation `⟨ψ| tr_B ρ ⊗ 1 - ρ |ψ⟩` for a zero-mean
/// 1×1 state against the two-mode squeezed vacuum `ψ` with squeezing `r`,
/// using the Gaussian overlap `tr(ρ₁ρ₂) = 2ⁿ / √det(γ₁ + γ₂)`.
pub fn rc_value(gamma: &CorrelationMatrix, r: f64) -> Result<RcWitnessResult> {
    let params = standard_form_params(gamma)?;
    let probe = tmss_cm(r)?;
    let g = gamma.entries();
    let reduced = block(g, 0, 0) + block(probe.entries(), 0, 0);
    let joint = g + probe.entries();
    let value = 2.0 / reduced.determinant().sqrt() - 4.0 / joint.determinant().sqrt();
    let n = 0.5 * (params.n_a + params.n_b);
    Ok(RcWitnessResult {
        r,
        value,
        asymptotic_value: (n - params.k_x) * (n + params.k_p) - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::wigner_cm;
    use crate::linalg::max_abs;
    use crate::symplectic::random_local_symplectic;
    use approx::assert_relative_eq;

    #[test]
    fn tmss_parameters() {
        let p = standard_form_params(&tmss_cm(0.5).unwrap()).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        assert!(p.max_abs_diff(&StdFormParams::new(c, c, s, -s)) < 1e-14);
        assert_relative_eq!(c, 1.543_080_634_815_243_7, epsilon = 1e-15);
        assert_relative_eq!(s, 1.175_201_193_643_801_4, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_parameters() {
        let p = standard_form_params(&tmss_cm(0.0).unwrap()).unwrap();
        assert!(p.max_abs_diff(&StdFormParams::new(1.0, 1.0, 0.0, 0.0)) < 1e-15);
        let c = check_physical(&p, 1e-12);
        assert!(c.physical);
        assert_eq!((c.residual_det, c.residual_x), (0.0, 0.0));
        let i = check_inseparable(&p, 1e-12).unwrap();
        assert!(!i.inseparable);
        assert_eq!(i.residual, 0.0);
    }

    #[test]
    fn unphysical_parameters() {
        let p = StdFormParams::new(1.0, 1.0, 0.5, 0.5);
        let c = check_physical(&p, 1e-12);
        assert!(!c.physical);
        assert_relative_eq!(c.residual_x, -0.25, epsilon = 1e-15);
        assert!(check_inseparable(&p, 1e-12).is_err());
    }

    #[test]
    fn uncorrelated_parameters_are_separable() {
        for (a, b) in [(1.0, 1.0), (2.0, 1.5), (3.0, 7.0)] {
            let p = StdFormParams::new(a, b, 0.0, 0.0);
            assert!(!check_inseparable(&p, 1e-12).unwrap().inseparable);
        }
    }

    #[test]
    fn tmss_inequalities() {
        let p = standard_form_params(&tmss_cm(0.5).unwrap()).unwrap();
        let c = check_physical(&p, 1e-9);
        assert!(c.physical);
        assert!(c.residual_det.abs() < 1e-12);
        assert!(c.residual_x.abs() < 1e-12);
        let i = check_inseparable(&p, 1e-9).unwrap();
        assert!(i.inseparable);
        assert_relative_eq!(i.residual, 2.0 * 2f64.cosh() - 2.0, epsilon = 1e-12);
        let sym = check_symmetric_inseparable(p.n_a, p.k_x, p.k_p, 1e-9);
        assert!(sym.inseparable);
        // residual 2 sinh(1) cosh(1) - 2 sinh²(1)
        let (c1, s1) = (1f64.cosh(), 1f64.sinh());
        assert_relative_eq!(sym.residual, 2.0 * s1 * c1 - 2.0 * s1 * s1, epsilon = 1e-12);
        assert!(!check_symmetric_inseparable(1.0, 0.0, 0.0, 1e-12).inseparable);
    }

    #[test]
    fn symmetry_test() {
        assert!(is_symmetric(&standard_form_params(&tmss_cm(0.3).unwrap()).unwrap(), 1e-12));
        assert!(!is_symmetric(&StdFormParams::new(2.0, 1.5, 1.0, -1.0), 1e-8));
    }

    #[test]
    fn tmss_values() {
        let g = tmss_cm(0.5).unwrap();
        assert_relative_eq!(g.entries()[(0, 0)], 1.543_08, epsilon = 1e-5);
        assert_relative_eq!(g.entries()[(0, 2)], 1.175_20, epsilon = 1e-5);
        assert_relative_eq!(g.entries()[(1, 3)], -1.175_20, epsilon = 1e-5);
        assert_eq!(tmss_cm(0.0).unwrap().entries(), &DMatrix::identity(4, 4));
        assert!(tmss_cm(-1.0).is_err());
        for r in [0.1, 0.7, 1.5] {
            let v = validate_physical(&tmss_cm(r).unwrap(), 1e-9).unwrap();
            assert!(v.margin.abs() < 1e-9);
            assert_relative_eq!(v.min_symplectic_eigenvalue, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn already_standard_input_is_fixed() {
        let p = StdFormParams::new(2.0, 1.7, 1.2, -0.8);
        let g = standard_form_cm(&p).unwrap();
        let f = standard_form_transform(&g).unwrap();
        assert!(f.params.max_abs_diff(&p) < 1e-13);
        assert!(max_abs(&(f.gamma_std.entries() - g.entries())) < 1e-13);
        for s in [&f.s_a, &f.s_b] {
            let m = s.matrix();
            assert!(m[(0, 1)].abs() < 1e-13 && m[(1, 0)].abs() < 1e-13);
            assert_relative_eq!(m[(0, 0)].abs(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn phase_rotated_tmss_is_recovered() {
        let rot = |phi: f64| {
            let (s, c) = phi.sin_cos();
            SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), 1e-12).unwrap()
        };
        let s = rot(0.4).direct_sum(&rot(-1.3));
        let g = tmss_cm(0.6).unwrap().transform(&s).unwrap();
        let f = standard_form_transform(&g).unwrap();
        let (c, sh) = (1.2f64.cosh(), 1.2f64.sinh());
        assert!(f.params.max_abs_diff(&StdFormParams::new(c, c, sh, -sh)) < 1e-12);
        assert!(max_abs(&(f.gamma_std.entries() - tmss_cm(0.6).unwrap().entries())) < 1e-12);
    }

    #[test]
    fn conjugated_standard_form_round_trips() {
        let p = StdFormParams::new(2.5, 1.8, 1.1, -0.6);
        assert!(check_physical(&p, 0.0).physical);
        for seed in 0..50 {
            let s = random_local_symplectic(1, 1, seed).unwrap();
            let g = standard_form_cm(&p).unwrap().transform(&s).unwrap();
            let f = standard_form_transform(&g).unwrap();
            assert!(f.params.max_abs_diff(&p) < 1e-10, "seed {seed}");
            assert!(max_abs(&(f.gamma_std.entries() - p.matrix())) < 1e-10);
            assert!(f.s_a.defect() < 1e-10 && f.s_b.defect() < 1e-10);
            let back = g.transform(&f.s_a.direct_sum(&f.s_b)).unwrap();
            assert!(max_abs(&(back.entries() - f.gamma_std.entries())) < 1e-12);
        }
    }

    #[test]
    fn determinant_route_agrees_off_the_double_root() {
        let p = StdFormParams::new(2.5, 1.8, 1.1, -0.6);
        let s = random_local_symplectic(1, 1, 9).unwrap();
        let g = standard_form_cm(&p).unwrap().transform(&s).unwrap();
        let q = params_from_determinants(&g).unwrap();
        assert!(q.max_abs_diff(&p) < 1e-9);
        let zero_c = StdFormParams::new(2.0, 3.0, 0.0, 0.0);
        let q = params_from_determinants(&standard_form_cm(&zero_c).unwrap()).unwrap();
        assert!(q.max_abs_diff(&zero_c) < 1e-12);
    }

    #[test]
    fn wigner_parameters_reverse_the_second_inequality() {
        let g = standard_form_cm(&StdFormParams::new(2.5, 1.8, 1.1, -0.6)).unwrap();
        let w = standard_form_unchecked(&wigner_cm(&g).unwrap()).unwrap().params;
        let c = check_physical(&w, 1e-12);
        assert!(c.residual_det >= -1e-12);
        assert!(c.residual_x <= 1e-12);
    }

    #[test]
    fn rc_of_probe_against_itself() {
        // overlap of a pure state with itself is one; the reduced overlap is
        // the purity 1/cosh 2r of the thermal marginal
        for r in [0.2, 1.0, 2.5] {
            let rc = rc_value(&tmss_cm(r).unwrap(), r).unwrap();
            assert_relative_eq!(rc.value, 1.0 / (2.0 * r).cosh() - 1.0, epsilon = 1e-10);
        }
        assert!(rc_value(&crate::gaussian::CorrelationMatrix::vacuum(1, 2).unwrap(), 1.0).is_err());
    }
}
