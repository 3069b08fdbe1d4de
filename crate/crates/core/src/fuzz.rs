//! Seeded invariant campaign over random states.
//!
//! Trial `i` draws its partition, kind and state from `derive_seed(seed, i)`,
//! so results do not depend on execution order or thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::gaussian::{
    condition_on_x_measurement, is_npt, partial_transpose, reduce_to_modes, validate_physical,
    wigner_cm, CorrelationMatrix, DEFAULT_TOL,
};
use crate::linalg::{max_abs, rows};
use crate::protocol::{
    closed_form_blocks, distill_pipeline, measurement_blocks, symmetrize, PipelineOptions, Verdict,
};
use crate::random::{random_state, StateKind};
use crate::symplectic::{derive_seed, random_local_symplectic, random_symplectic};
use crate::two_mode::{
    check_inseparable, check_physical, rc_value, standard_form_params, standard_form_transform,
    StdFormParams,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_modes_a: usize,
    pub max_modes_b: usize,
    /// Fraction of trials drawn from the entangled generator; a further tenth
    /// of all trials are boundary states, the rest thermal.
    pub npt_fraction_target: f64,
    /// Overrides for the tolerances listed in [`Tolerances`].
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1000,
            max_modes_a: 4,
            max_modes_b: 4,
            npt_fraction_target: 0.5,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Resolved tolerances; keys in [`FuzzConfig::tolerances`] use the field
/// names.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub boundary: f64,
    pub involution: f64,
    pub invariance: f64,
    pub oracle: f64,
    pub symmetry: f64,
    pub scaling: f64,
}

impl Tolerances {
    pub fn from_map(map: &BTreeMap<String, f64>) -> Self {
        let get = |k: &str, d: f64| map.get(k).copied().unwrap_or(d);
        Self {
            tol: get("tol", DEFAULT_TOL),
            boundary: get("boundary", 1e-7),
            involution: get("involution", 1e-10),
            invariance: get("invariance", 1e-8),
            oracle: get("oracle", 1e-10),
            symmetry: get("symmetry", 1e-8),
            scaling: get("scaling", 1e-8),
        }
    }
}

/// Invariants checked on every trial, in report order.
pub const INVARIANTS: &[&str] = &[
    "verdict_equivalence",
    "physicality_criteria_agree",
    "partial_transpose_involution",
    "wigner_involution",
    "symplectic_spectrum_invariance",
    "npt_local_invariance",
    "reduction_physical",
    "homodyne_physical",
    "one_by_one_equivalence",
    "inseparable_k_product_negative",
    "wigner_duality",
    "symmetrization_oracle",
    "rc_soundness",
];

#[derive(Clone, Debug, PartialEq)]
enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

fn fail(msg: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Fail(msg.into()))
}

fn pass_if(ok: bool, msg: impl FnOnce() -> String) -> Result<Outcome> {
    Ok(if ok { Outcome::Pass } else { Outcome::Fail(msg()) })
}

/// A trial's state and the seed needed to rebuild it.
#[derive(Clone, Debug)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub kind: StateKind,
    pub gamma: CorrelationMatrix,
}

pub fn trial(config: &FuzzConfig, index: usize) -> Result<Trial> {
    let seed = derive_seed(config.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_a = rng.gen_range(1..=config.max_modes_a.max(1));
    let n_b = rng.gen_range(1..=config.max_modes_b.max(1));
    let u: f64 = rng.gen();
    let kind = if u < 0.1 {
        StateKind::Boundary
    } else if u < 0.1 + 0.9 * config.npt_fraction_target {
        StateKind::Entangled
    } else {
        StateKind::Thermal
    };
    let gamma = random_state(n_a, n_b, seed, kind)?;
    Ok(Trial {
        index,
        seed,
        kind,
        gamma,
    })
}

fn pt_gap(gamma: &CorrelationMatrix) -> Result<f64> {
    Ok(partial_transpose(gamma).symplectic_eigenvalues()?[0] - 1.0)
}

fn check(name: &str, t: &Trial, tol: &Tolerances) -> Result<Outcome> {
    let g = &t.gamma;
    let near_boundary = |gamma: &CorrelationMatrix| -> Result<bool> {
        Ok(pt_gap(gamma)?.abs() < tol.boundary)
    };
    match name {
        "verdict_equivalence" => {
            if near_boundary(g)? {
                return Ok(Outcome::Skip);
            }
            let opts = PipelineOptions {
                tol: tol.tol,
                boundary: tol.boundary,
                seed: t.seed,
                ..PipelineOptions::default()
            };
            let report = distill_pipeline(g, &opts)?;
            let npt = pt_gap(g)? < -tol.tol;
            pass_if((report.verdict == Verdict::Distillable) == npt, || {
                format!("verdict {:?} but PT gap {}", report.verdict, pt_gap(g).unwrap_or(f64::NAN))
            })
        }
        "physicality_criteria_agree" => {
            let v = validate_physical(g, tol.tol)?;
            pass_if(v.physical && v.margin >= -tol.tol, || format!("{v:?}"))
        }
        "partial_transpose_involution" => {
            let twice = partial_transpose(&partial_transpose(g));
            pass_if(&twice == g, || "partial transpose is not an involution".into())
        }
        "wigner_involution" => {
            let twice = wigner_cm(&wigner_cm(g)?)?;
            let gap = max_abs(&(twice.entries() - g.entries()));
            pass_if(gap <= tol.involution, || format!("deviation {gap:e}"))
        }
        "symplectic_spectrum_invariance" => {
            let s = random_symplectic(g.modes(), derive_seed(t.seed, 1))?;
            let a = g.symplectic_eigenvalues()?;
            let b = g.transform(&s)?.symplectic_eigenvalues()?;
            let gap = a
                .iter()
                .zip(&b)
                .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs() / x));
            pass_if(gap <= tol.invariance, || format!("relative deviation {gap:e}"))
        }
        "npt_local_invariance" => {
            if near_boundary(g)? {
                return Ok(Outcome::Skip);
            }
            let s = random_local_symplectic(g.n_a(), g.n_b(), derive_seed(t.seed, 2))?;
            let before = is_npt(g, tol.tol)?.npt;
            let after = is_npt(&g.transform(&s)?, tol.tol)?.npt;
            pass_if(before == after, || format!("npt {before} became {after}"))
        }
        "reduction_physical" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            pass_if(validate_physical(&red, tol.tol)?.physical, || "reduced state unphysical".into())
        }
        "homodyne_physical" => {
            let out = condition_on_x_measurement(g, g.modes() - 1)?;
            pass_if(validate_physical(&out, tol.tol)?.physical, || "conditional state unphysical".into())
        }
        "one_by_one_equivalence" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            if near_boundary(&red)? {
                return Ok(Outcome::Skip);
            }
            let p = standard_form_params(&red)?;
            let insep = check_inseparable(&p, tol.tol)?.inseparable;
            let npt = is_npt(&red, tol.tol)?.npt;
            pass_if(insep == npt, || format!("inseparable {insep}, npt {npt}, params {p:?}"))
        }
        "inseparable_k_product_negative" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            let p = standard_form_params(&red)?;
            if !check_inseparable(&p, tol.tol)?.inseparable {
                return Ok(Outcome::Skip);
            }
            pass_if(p.k_x * p.k_p < 0.0, || format!("k_x k_p = {}", p.k_x * p.k_p))
        }
        "wigner_duality" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            let w = crate::two_mode::standard_form_unchecked(&wigner_cm(&red)?)?.params;
            let c = check_physical(&w, tol.tol);
            pass_if(c.residual_det >= -tol.tol && c.residual_x <= tol.tol, || format!("{c:?}"))
        }
        "symmetrization_oracle" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            if near_boundary(&red)? || !is_npt(&red, tol.tol)?.npt {
                return Ok(Outcome::Skip);
            }
            let std = standard_form_transform(&red)?;
            let rep = symmetrize(&std.gamma_std, tol.tol)?;
            if rep.theta == 0.0 {
                return Ok(Outcome::Skip);
            }
            let w = &rep.wigner_in;
            let frame = if rep.swapped_sides {
                StdFormParams::new(w.n_b, w.n_a, w.k_x, w.k_p)
            } else {
                w.as_std()
            };
            let gap = max_abs(&(closed_form_blocks(&frame, rep.theta) - measurement_blocks(&frame, rep.theta)?));
            let asym = (rep.params_out.n_a - rep.params_out.n_b).abs();
            let scaled = rep.insep_residual_in * rep.scale_factor;
            let scaling = (rep.insep_residual_out - scaled).abs() / scaled.abs();
            pass_if(
                gap <= tol.oracle && asym <= tol.symmetry && scaling <= tol.scaling,
                || format!("oracle gap {gap:e}, asymmetry {asym:e}, scaling error {scaling:e}"),
            )
        }
        "rc_soundness" => {
            let red = reduce_to_modes(g, &[0], &[0])?;
            let std = standard_form_transform(&red)?;
            let certified = (1..=8)
                .map(|r| rc_value(&std.gamma_std, r as f64))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .any(|x| x.certifies());
            if !certified {
                return Ok(Outcome::Skip);
            }
            pass_if(is_npt(&red, tol.tol)?.npt, || "reduction criterion holds for a PPT state".into())
        }
        other => fail(format!("unknown invariant {other}")),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantCount {
    pub checked: usize,
    pub passed: usize,
    pub skipped: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub trial: usize,
    pub seed: u64,
    pub kind: String,
    pub detail: String,
    pub n_a: usize,
    pub n_b: usize,
    pub gamma: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub tolerances: Tolerances,
    pub trials: usize,
    pub kinds: BTreeMap<String, usize>,
    pub invariants: BTreeMap<String, InvariantCount>,
    pub total_violations: usize,
    /// The first violations in trial order, with reproduction data.
    pub violations: Vec<Violation>,
}

impl FuzzSummary {
    pub fn ok(&self) -> bool {
        self.total_violations == 0
    }

    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Violations kept in the summary.
const MAX_REPORTED: usize = 25;

struct TrialResult {
    kind: Option<StateKind>,
    outcomes: Vec<(&'static str, Outcome)>,
    trial: Option<Trial>,
    seed: u64,
}

fn run_trial(config: &FuzzConfig, tol: &Tolerances, index: usize) -> TrialResult {
    match trial(config, index) {
        Ok(t) => {
            let outcomes = INVARIANTS
                .iter()
                .map(|&name| {
                    let o = check(name, &t, tol).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
                    (name, o)
                })
                .collect();
            TrialResult {
                kind: Some(t.kind),
                seed: t.seed,
                outcomes,
                trial: Some(t),
            }
        }
        Err(e) => TrialResult {
            kind: None,
            seed: derive_seed(config.seed, index as u64),
            outcomes: vec![("generation", Outcome::Fail(e.to_string()))],
            trial: None,
        },
    }
}

#[cfg(feature = "parallel")]
fn run_all(config: &FuzzConfig, tol: &Tolerances) -> Vec<TrialResult> {
    use rayon::prelude::*;
    (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, tol, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(config: &FuzzConfig, tol: &Tolerances) -> Vec<TrialResult> {
    (0..config.trials).map(|i| run_trial(config, tol, i)).collect()
}

/// Runs every registered invariant over the configured trial stream.
pub fn run_campaign(config: &FuzzConfig) -> FuzzSummary {
    let tol = Tolerances::from_map(&config.tolerances);
    let results = run_all(config, &tol);
    let mut invariants: BTreeMap<String, InvariantCount> = INVARIANTS
        .iter()
        .map(|n| (n.to_string(), InvariantCount::default()))
        .collect();
    let mut kinds = BTreeMap::new();
    let mut violations = Vec::new();
    let mut total = 0;
    for (index, r) in results.into_iter().enumerate() {
        if let Some(k) = r.kind {
            *kinds.entry(k.name().to_string()).or_insert(0) += 1;
        }
        for (name, outcome) in r.outcomes {
            let count = invariants.entry(name.to_string()).or_default();
            match outcome {
                Outcome::Pass => {
                    count.checked += 1;
                    count.passed += 1;
                }
                Outcome::Skip => count.skipped += 1,
                Outcome::Fail(detail) => {
                    count.checked += 1;
                    count.violations += 1;
                    total += 1;
                    if violations.len() < MAX_REPORTED {
                        let (n_a, n_b, gamma, kind) = match &r.trial {
                            Some(t) => (t.gamma.n_a(), t.gamma.n_b(), rows(t.gamma.entries()), t.kind.name()),
                            None => (0, 0, Vec::new(), "none"),
                        };
                        violations.push(Violation {
                            invariant: name.to_string(),
                            trial: index,
                            seed: r.seed,
                            kind: kind.to_string(),
                            detail,
                            n_a,
                            n_b,
                            gamma,
                        });
                    }
                }
            }
        }
    }
    FuzzSummary {
        config: config.clone(),
        tolerances: tol,
        trials: config.trials,
        kinds,
        invariants,
        total_violations: total,
        violations,
    }
}
