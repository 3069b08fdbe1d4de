//! Local protocol that turns an NPT state of N×M modes into a symmetric 1×1
//! NPT state: a witness vector for the partial-transpose violation,
//! concentration of that violation onto one mode per side, symmetrization by
//! an ancilla, a beam splitter and homodyne detection, and finally the
//! reduction-criterion certificate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result, Stage};
use crate::gaussian::{
    beam_splitter, condition_on_x_measurement, is_npt, npt_operator, reduce_to_modes,
    validate_physical, wigner_cm, CorrelationMatrix, NptVerdict, DEFAULT_TOL,
};
use crate::linalg::{hermitian_eigh, max_abs, rows};
use crate::symplectic::{
    derive_seed, extend_to_symplectic_basis, skew, SymplecticMatrix, TOL_SYMP,
};
use crate::two_mode::{
    rc_value, standard_form_cm, standard_form_params, standard_form_transform,
    standard_form_unchecked, RcWitnessResult, StandardForm, StdFormParams, WignerParams,
};

/// Retries of the witness perturbation schedule.
pub const MAX_WITNESS_RETRIES: u32 = 32;
/// Perturbation size relative to `|z|`.
const PERTURBATION: f64 = 1e-4;
/// Per-side skew products must exceed this multiple of `|z|²`.
const SKEW_FLOOR: f64 = 1e-8;
/// Largest component of the concentrated witness outside the kept modes.
pub const MAX_LEAKAGE: f64 = 1e-6;
/// Relative tolerance for the post-measurement symmetry and scaling checks.
const SYMMETRIZATION_TOL: f64 = 1e-8;

/// A vector violating `γ ≥ iJ̃`, i.e. `z†(γ - iJ̃)z < 0`.
#[derive(Clone, Debug)]
pub struct NptWitness {
    pub z: DVector<Complex64>,
    pub n_a: usize,
    pub n_b: usize,
    /// `z†(γ - iJ̃)z` for unit `z`.
    pub margin: f64,
    /// Depth of the most negative eigenvalue of `γ - iJ̃`.
    pub epsilon: f64,
    pub skew_a: f64,
    pub skew_b: f64,
    /// Index in the perturbation schedule that produced `z` (0 = none).
    pub perturbation: u32,
}

fn complex_pairs(z: &DVector<Complex64>) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

impl NptWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "z": complex_pairs(&self.z),
            "margin": self.margin,
            "epsilon": self.epsilon,
            "skew_a": self.skew_a,
            "skew_b": self.skew_b,
            "perturbation": self.perturbation,
        })
    }

    fn side(&self, a_side: bool) -> (DVector<f64>, DVector<f64>) {
        let (start, len) = if a_side {
            (0, 2 * self.n_a)
        } else {
            (2 * self.n_a, 2 * self.n_b)
        };
        let part = self.z.rows(start, len);
        (part.map(|c| c.re), part.map(|c| c.im))
    }
}

fn quadratic_form(h: &DMatrix<Complex64>, z: &DVector<Complex64>) -> f64 {
    (z.adjoint() * h * z)[(0, 0)].re
}

fn side_skews(z: &DVector<Complex64>, n_a: usize) -> (f64, f64) {
    let split = 2 * n_a;
    let re = z.map(|c| c.re);
    let im = z.map(|c| c.im);
    let a = skew(&re.rows(0, split).into_owned(), &im.rows(0, split).into_owned());
    let len = z.len() - split;
    let b = skew(
        &re.rows(split, len).into_owned(),
        &im.rows(split, len).into_owned(),
    );
    (a, b)
}

fn unit_perturbation(dim: usize, seed: u64, index: u32) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
    let u = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = u.norm();
    u / Complex64::new(norm, 0.0)
}

/// Witness from the most negative eigenvector of `γ - iJ̃`.
pub fn find_npt_witness(gamma: &CorrelationMatrix, tol: f64) -> Result<NptWitness> {
    find_npt_witness_seeded(gamma, tol, 0, 0)
}

/// Like [`find_npt_witness`], with control over the perturbation schedule.
///
/// A global phase leaves both skew products unchanged, so a vanishing skew
/// product is repaired by `z ← z + δu` with `δ = 10⁻⁴|z|` and `u` drawn from a
/// schedule seeded by `(seed, k)`. With `attempt = 0` the raw eigenvector is
/// tried first; with `attempt = k > 0` the schedule starts at entry `k`.
pub fn find_npt_witness_seeded(
    gamma: &CorrelationMatrix,
    tol: f64,
    seed: u64,
    attempt: u32,
) -> Result<NptWitness> {
    if gamma.n_a() == 0 || gamma.n_b() == 0 {
        return Err(Error::Precondition("witness needs modes on both sides".into()));
    }
    let verdict = is_npt(gamma, tol)?;
    if !verdict.npt {
        return Err(Error::Precondition("state is PPT".into()));
    }
    let h = npt_operator(gamma);
    let (values, vectors) = hermitian_eigh(&h);
    let epsilon = -values[0];
    let z0 = vectors.column(0).into_owned();
    let n_a = gamma.n_a();

    let accept = |z: DVector<Complex64>, k: u32| -> Option<NptWitness> {
        let norm = z.norm();
        let z = z / Complex64::new(norm, 0.0);
        let margin = quadratic_form(&h, &z);
        let (skew_a, skew_b) = side_skews(&z, n_a);
        (margin < -0.5 * epsilon && skew_a.abs() > SKEW_FLOOR && skew_b.abs() > SKEW_FLOOR).then(
            || NptWitness {
                z,
                n_a,
                n_b: gamma.n_b(),
                margin,
                epsilon,
                skew_a,
                skew_b,
                perturbation: k,
            },
        )
    };

    if attempt == 0 {
        if let Some(w) = accept(z0.clone(), 0) {
            return Ok(w);
        }
    }
    let first = attempt.max(1);
    for k in first..first + MAX_WITNESS_RETRIES {
        let u = unit_perturbation(z0.len(), seed, k);
        let z = &z0 + u * Complex64::new(PERTURBATION, 0.0);
        if let Some(w) = accept(z, k) {
            return Ok(w);
        }
    }
    let (skew_a, skew_b) = side_skews(&z0, n_a);
    Err(Error::Degenerate(format!(
        "no witness with non-vanishing skew products after {MAX_WITNESS_RETRIES} perturbations \
         (epsilon {epsilon:e}, raw skews {skew_a:e}, {skew_b:e})"
    )))
}

/// Output of the concentration step.
#[derive(Clone, Debug)]
pub struct Concentration {
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    pub gamma_hat: CorrelationMatrix,
    pub gamma_red: CorrelationMatrix,
    /// `(S_A⁻¹ ⊕ S_B⁻¹) z`
    pub z_hat: DVector<Complex64>,
    /// Largest `|ẑ_k|/|ẑ|` outside the first mode of each side.
    pub leakage: f64,
    /// `ẑ†(γ̂ - iJ̃)ẑ`
    pub form_full: f64,
    /// The same form on the reduced 1×1 state and the four kept components.
    pub form_reduced: f64,
    pub npt: NptVerdict,
}

impl Concentration {
    pub fn to_json(&self) -> Value {
        json!({
            "s_a": rows(self.s_a.matrix()),
            "s_b": rows(self.s_b.matrix()),
            "gamma_1x1": rows(self.gamma_red.entries()),
            "z_hat": complex_pairs(&self.z_hat),
            "leakage": self.leakage,
            "form_full": self.form_full,
            "form_reduced": self.form_reduced,
            "npt": self.npt,
        })
    }
}

/// Symplectic matrix whose first two columns are `λ z_r` and
/// `-z_i/(λ z_rᵀJz_i)`. The balancing factor `λ = √(|f₂|/|f₁|)` is a local
/// single-mode squeeze that keeps the span and improves conditioning.
fn side_transform(re: &DVector<f64>, im: &DVector<f64>, tol: f64) -> Result<SymplecticMatrix> {
    let w = skew(re, im);
    let f1 = re.clone();
    let f2 = im * (-1.0 / w);
    let lambda = (f2.norm() / f1.norm()).sqrt();
    let f1 = f1 * lambda;
    let f2 = f2 / lambda;
    let scale = 1.0 + f1.norm() * f2.norm();
    Ok(extend_to_symplectic_basis(&f1, &f2, tol * scale)?.into_symplectic())
}

/// Maps the witness onto the first mode of each side and discards the rest.
pub fn concentrate(gamma: &CorrelationMatrix, w: &NptWitness, tol: f64) -> Result<Concentration> {
    if w.n_a != gamma.n_a() || w.n_b != gamma.n_b() {
        return Err(Error::Precondition("witness does not match the state".into()));
    }
    if w.margin >= 0.0 {
        return Err(Error::Precondition("witness margin is not negative".into()));
    }
    let (re_a, im_a) = w.side(true);
    let (re_b, im_b) = w.side(false);
    let s_a = side_transform(&re_a, &im_a, TOL_SYMP)?;
    let s_b = side_transform(&re_b, &im_b, TOL_SYMP)?;
    let s = s_a.direct_sum(&s_b);
    let gamma_hat = gamma.transform(&s)?;

    let inv = s.inverse().into_matrix();
    let z_hat = DVector::from_iterator(
        w.z.len(),
        (&inv * w.z.map(|c| c.re))
            .iter()
            .zip((&inv * w.z.map(|c| c.im)).iter())
            .map(|(r, i)| Complex64::new(*r, *i)),
    );
    let split = 2 * gamma.n_a();
    let kept = [0, 1, split, split + 1];
    let norm = z_hat.norm();
    let leakage = z_hat
        .iter()
        .enumerate()
        .filter(|(k, _)| !kept.contains(k))
        .fold(0.0_f64, |acc, (_, c)| acc.max(c.norm() / norm));

    let form_full = quadratic_form(&npt_operator(&gamma_hat), &z_hat);
    let gamma_red = reduce_to_modes(&gamma_hat, &[0], &[0])?;
    let z_red = DVector::from_iterator(4, kept.iter().map(|&k| z_hat[k]));
    let form_reduced = quadratic_form(&npt_operator(&gamma_red), &z_red);

    if leakage > MAX_LEAKAGE {
        return Err(Error::Concentration(format!(
            "witness leaks {leakage:e} outside the kept modes"
        )));
    }
    let npt = is_npt(&gamma_red, tol)?;
    if !npt.npt {
        return Err(Error::Concentration(format!(
            "reduced state is PPT (form {form_reduced:e}, min PT symplectic eigenvalue {})",
            npt.min_pt_symplectic_eigenvalue
        )));
    }
    Ok(Concentration {
        s_a,
        s_b,
        gamma_hat,
        gamma_red,
        z_hat,
        leakage,
        form_full,
        form_reduced,
        npt,
    })
}

/// Wigner correlation matrix after coupling the hotter side `b` (the one with
/// the smaller Wigner `N`) to a vacuum ancilla by a beam splitter of angle
/// `θ` and measuring the ancilla's `x` quadrature, from the closed-form
/// blocks. `w` is a Wigner standard form with `N_b < N_a`.
pub fn closed_form_blocks(w: &StdFormParams, theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let nu = s2 * w.n_b + c2;
    let a_x = (c2 * w.n_a + s2 * w.d_x()) / nu;
    let a_p = (c2 * w.n_a + s2 * w.n_a * w.n_b) / nu;
    let b_x = w.n_b / nu;
    let b_p = c2 * w.n_b + s2;
    let k_x = c * w.k_x / nu;
    let k_p = c * w.k_p;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a_x, 0.0, k_x, 0.0, //
            0.0, a_p, 0.0, k_p, //
            k_x, 0.0, b_x, 0.0, //
            0.0, k_p, 0.0, b_p,
        ],
    )
}

/// The same transformation as [`closed_form_blocks`], carried out on the
/// state: vacuum ancilla, beam splitter on `(b, ancilla)`, homodyne
/// conditioning on the ancilla's `x` quadrature.
pub fn measurement_blocks(w: &StdFormParams, theta: f64) -> Result<DMatrix<f64>> {
    let state = wigner_cm(&standard_form_cm(w)?)?;
    let ext = state.with_vacuum_ancilla();
    let mixed = ext.transform(&beam_splitter(3, 1, 2, theta)?)?;
    let cond = condition_on_x_measurement(&mixed, 2)?;
    Ok(wigner_cm(&cond)?.into_entries())
}

/// `tan²θ = (N_a² - N_b²)/(N_b - D_x N_a)` for a Wigner standard form with
/// `N_b < N_a`.
pub fn symmetrizing_angle(w: &StdFormParams) -> Result<f64> {
    let tan2 = (w.n_a * w.n_a - w.n_b * w.n_b) / (w.n_b - w.d_x() * w.n_a);
    if !(tan2 > 0.0 && tan2.is_finite()) {
        return Err(Error::Inconsistent(format!(
            "symmetrizing angle has tan²θ = {tan2} for Wigner parameters {w:?}"
        )));
    }
    Ok(tan2.sqrt().atan())
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizationReport {
    pub theta: f64,
    /// True when A was the hotter side and the ancilla was coupled to A.
    pub swapped_sides: bool,
    #[serde(serialize_with = "crate::linalg::serialize_rows")]
    pub gamma_out: DMatrix<f64>,
    pub wigner_in: WignerParams,
    pub wigner_out: WignerParams,
    /// Wigner-picture inseparability residuals before and after.
    pub insep_residual_in: f64,
    pub insep_residual_out: f64,
    /// `(N_b tan²θ + 1)⁻¹`
    pub scale_factor: f64,
    pub params_out: StdFormParams,
}

impl SymmetrizationReport {
    pub fn gamma_out(&self) -> Result<CorrelationMatrix> {
        CorrelationMatrix::new(self.gamma_out.clone(), 1, 1)
    }
}

/// Turns a 1×1 NPT state into a symmetric one by cooling the hotter side.
pub fn symmetrize(gamma: &CorrelationMatrix, tol: f64) -> Result<SymmetrizationReport> {
    if gamma.n_a() != 1 || gamma.n_b() != 1 {
        return Err(Error::InvalidShape {
            rows: gamma.dim(),
            cols: gamma.dim(),
            reason: "symmetrization needs a 1×1 state",
        });
    }
    if !is_npt(gamma, tol)?.npt {
        return Err(Error::Precondition("state is PPT".into()));
    }
    let wig = standard_form_unchecked(&wigner_cm(gamma)?)?;
    let p = wig.params;
    let wigner_in = WignerParams::from(p);
    let residual_in = wigner_in.inseparability_residual();

    let (theta, swapped, scale, out_w) = if (p.n_a - p.n_b).abs() <= 1e-12 * p.n_a.max(1.0) {
        (0.0, false, 1.0, wig.gamma_std.into_entries())
    } else {
        let swapped = p.n_a < p.n_b;
        let frame = if swapped {
            StdFormParams::new(p.n_b, p.n_a, p.k_x, p.k_p)
        } else {
            p
        };
        let theta = symmetrizing_angle(&frame)?;
        let scale = 1.0 / (frame.n_b * theta.tan().powi(2) + 1.0);
        let blocks = CorrelationMatrix::new(closed_form_blocks(&frame, theta), 1, 1)?;
        let blocks = if swapped { blocks.swap_sides() } else { blocks };
        (theta, swapped, scale, blocks.into_entries())
    };
    let out_w = CorrelationMatrix::new(out_w, 1, 1)?;
    let wigner_out = WignerParams::from(standard_form_unchecked(&out_w)?.params);
    let residual_out = wigner_out.inseparability_residual();
    let expected = residual_in * scale;
    if (residual_out - expected).abs() > SYMMETRIZATION_TOL * expected.abs().max(1e-300) {
        return Err(Error::Inconsistent(format!(
            "inseparability residual {residual_out:e} is not {scale} × {residual_in:e}"
        )));
    }
    let gamma_out = wigner_cm(&out_w)?;
    let params_out = standard_form_params(&gamma_out)?;
    if (params_out.n_a - params_out.n_b).abs() > SYMMETRIZATION_TOL * params_out.n_a.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "output is not symmetric: {params_out:?}"
        )));
    }
    if !is_npt(&gamma_out, tol)?.npt {
        return Err(Error::Inconsistent("symmetrization lost the NPT property".into()));
    }
    Ok(SymmetrizationReport {
        theta,
        swapped_sides: swapped,
        gamma_out: gamma_out.into_entries(),
        wigner_in,
        wigner_out,
        insep_residual_in: residual_in,
        insep_residual_out: residual_out,
        scale_factor: scale,
        params_out,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Distillable,
    NotDistillable,
    /// NPT, but too close to the PPT boundary to act on.
    InconclusiveBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub tol: f64,
    /// States with `1 - ν̃_min` below this are reported as inconclusive.
    pub boundary: f64,
    /// Largest probe squeezing in the sweep `r = 1, 2, …, r_max`.
    pub r_max: u32,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            boundary: 1e-7,
            r_max: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub input_partition: (usize, usize),
    pub npt: NptVerdict,
    pub witness: Option<NptWitness>,
    pub concentration: Option<Concentration>,
    pub standard_form: Option<StandardForm>,
    pub symmetrization: Option<SymmetrizationReport>,
    pub final_params: Option<StdFormParams>,
    pub rc_sweep: Vec<RcWitnessResult>,
    /// First sweep entry with a negative value, else the last one.
    pub rc: Option<RcWitnessResult>,
    pub verdict: Verdict,
}

impl PipelineReport {
    pub fn s_a(&self) -> Option<&SymplecticMatrix> {
        self.concentration.as_ref().map(|c| &c.s_a)
    }

    pub fn s_b(&self) -> Option<&SymplecticMatrix> {
        self.concentration.as_ref().map(|c| &c.s_b)
    }

    pub fn gamma_1x1(&self) -> Option<&CorrelationMatrix> {
        self.concentration.as_ref().map(|c| &c.gamma_red)
    }

    pub fn to_json(&self) -> Value {
        let standard_form = self.standard_form.as_ref().map(|f| {
            json!({
                "s_a": rows(f.s_a.matrix()),
                "s_b": rows(f.s_b.matrix()),
                "gamma_std": rows(f.gamma_std.entries()),
                "params": f.params,
            })
        });
        json!({
            "input_partition": [self.input_partition.0, self.input_partition.1],
            "verdict": self.verdict,
            "stages": {
                Stage::NptCheck.name(): self.npt,
                Stage::Witness.name(): self.witness.as_ref().map(NptWitness::to_json),
                Stage::Concentrate.name(): self.concentration.as_ref().map(Concentration::to_json),
                Stage::StandardForm.name(): standard_form,
                Stage::Symmetrize.name(): self.symmetrization,
                Stage::RcWitness.name(): if self.rc.is_some() {
                    json!({ "sweep": self.rc_sweep, "certificate": self.rc })
                } else {
                    Value::Null
                },
            },
            "final_params": self.final_params,
        })
    }
}

/// Witness search plus concentration, re-seeding the witness perturbation
/// when the concentrated state fails its checks.
pub fn concentrate_with_retries(
    gamma: &CorrelationMatrix,
    tol: f64,
    seed: u64,
) -> Result<(NptWitness, Concentration)> {
    let mut attempt = 0;
    loop {
        let w = find_npt_witness_seeded(gamma, tol, seed, attempt).map_err(|e| e.at(Stage::Witness))?;
        match concentrate(gamma, &w, tol) {
            Ok(c) => return Ok((w, c)),
            Err(Error::Concentration(_)) if attempt < MAX_WITNESS_RETRIES => {
                attempt = w.perturbation + 1;
            }
            Err(e) => return Err(e.at(Stage::Concentrate)),
        }
    }
}

/// Decides distillability and, for NPT states, builds every stage of the
/// local protocol down to a symmetric 1×1 state with a reduction-criterion
/// certificate.
pub fn distill_pipeline(gamma: &CorrelationMatrix, opts: &PipelineOptions) -> Result<PipelineReport> {
    let phys = validate_physical(gamma, opts.tol)?;
    if !phys.physical {
        return Err(Error::Unphysical(phys.min_symplectic_eigenvalue));
    }
    let npt = is_npt(gamma, opts.tol).map_err(|e| e.at(Stage::NptCheck))?;
    let mut report = PipelineReport {
        input_partition: (gamma.n_a(), gamma.n_b()),
        npt: npt.clone(),
        witness: None,
        concentration: None,
        standard_form: None,
        symmetrization: None,
        final_params: None,
        rc_sweep: Vec::new(),
        rc: None,
        verdict: Verdict::NotDistillable,
    };
    if !npt.npt {
        return Ok(report);
    }
    if 1.0 - npt.min_pt_symplectic_eigenvalue < opts.boundary {
        report.verdict = Verdict::InconclusiveBoundary;
        return Ok(report);
    }

    let (witness, conc) = concentrate_with_retries(gamma, opts.tol, opts.seed)?;
    let std = standard_form_transform(&conc.gamma_red).map_err(|e| e.at(Stage::StandardForm))?;
    let sym = symmetrize(&std.gamma_std, opts.tol).map_err(|e| e.at(Stage::Symmetrize))?;
    let final_form = sym
        .gamma_out()
        .and_then(|g| standard_form_transform(&g))
        .map_err(|e| e.at(Stage::RcWitness))?;

    let sweep = (1..=opts.r_max)
        .map(|r| rc_value(&final_form.gamma_std, r as f64))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at(Stage::RcWitness))?;
    let rc = sweep.iter().find(|x| x.certifies()).or(sweep.last()).copied();
    let limit = (0.5 * (final_form.params.n_a + final_form.params.n_b) - final_form.params.k_x)
        * (0.5 * (final_form.params.n_a + final_form.params.n_b) + final_form.params.k_p)
        - 1.0;
    if limit >= 0.0 {
        return Err(Error::Inconsistent(format!(
            "symmetric NPT state violates (n - k_x)(n + k_p) < 1: {limit:e}"
        ))
        .at(Stage::RcWitness));
    }

    report.witness = Some(witness);
    report.concentration = Some(conc);
    report.standard_form = Some(std);
    report.final_params = Some(final_form.params);
    report.symmetrization = Some(sym);
    report.rc_sweep = sweep;
    report.rc = rc;
    report.verdict = Verdict::Distillable;
    Ok(report)
}

/// Largest entrywise gap between the closed-form and measured
/// post-measurement Wigner matrices.
pub fn closed_form_oracle_gap(w: &StdFormParams, theta: f64) -> Result<f64> {
    Ok(max_abs(&(closed_form_blocks(w, theta) - measurement_blocks(w, theta)?)))
}
