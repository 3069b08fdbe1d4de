//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use gdistill::fuzz::{run_campaign, trial, FuzzConfig};
use gdistill::gaussian::lossy_channel;
use gdistill::protocol::{closed_form_oracle_gap, concentrate_with_retries};
use gdistill::random::{random_state, random_symmetric_params, StateKind};
use gdistill::symplectic::{derive_seed, random_local_symplectic};
use gdistill::two_mode::standard_form_cm;
use gdistill::{
    check_inseparable, check_physical, distill_pipeline, is_npt, partial_transpose, random_symplectic,
    rc_value, standard_form_params, standard_form_transform, symmetrize, tmss_cm, wigner_cm,
    CorrelationMatrix, PipelineOptions, StdFormParams, Verdict, DEFAULT_TOL,
};

const BOUNDARY: f64 = 1e-7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn pt_gap(g: &CorrelationMatrix) -> f64 {
    partial_transpose(g).symplectic_eigenvalues().unwrap()[0] - 1.0
}

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn verdict_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = FuzzConfig::default();
    let (mut checked, mut skipped, mut wrong, mut errors) = (0, 0, 0, 0);
    let mut npt_count = 0;
    for i in 0..1000 {
        let t = trial(&cfg, i).expect("state generation");
        let gap = pt_gap(&t.gamma);
        if gap.abs() < BOUNDARY {
            skipped += 1;
            continue;
        }
        checked += 1;
        let npt = gap < -1e-9;
        npt_count += npt as usize;
        let opts = PipelineOptions { seed: t.seed, ..PipelineOptions::default() };
        match distill_pipeline(&t.gamma, &opts) {
            Ok(r) if (r.verdict == Verdict::Distillable) == npt => {}
            Ok(_) => wrong += 1,
            Err(_) => errors += 1,
        }
    }
    let elapsed = start.elapsed();
    outcome(
        wrong == 0 && errors == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{checked} checked ({npt_count} NPT), {skipped} in boundary band, {wrong} disagreements, \
             {errors} errors, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn one_by_one_equivalence() -> Outcome {
    let cfg = FuzzConfig { max_modes_a: 1, max_modes_b: 1, ..FuzzConfig::default() };
    let (mut checked, mut skipped, mut wrong) = (0, 0, 0);
    for i in 0..1000 {
        let g = trial(&cfg, i).unwrap().gamma;
        if pt_gap(&g).abs() < BOUNDARY {
            skipped += 1;
            continue;
        }
        checked += 1;
        let p = standard_form_params(&g).unwrap();
        let insep = check_inseparable(&p, DEFAULT_TOL).map(|c| c.inseparable);
        let npt = is_npt(&g, DEFAULT_TOL).unwrap().npt;
        if insep.ok() != Some(npt) {
            wrong += 1;
        }
    }
    outcome(wrong == 0, format!("{checked} checked, {skipped} in boundary band, {wrong} disagreements"))
}

fn tmss_analytics() -> Outcome {
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for r in [0.25, 0.5, 1.0] {
        let p = standard_form_params(&tmss_cm(r).unwrap()).unwrap();
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        worst.0 = worst.0.max(p.max_abs_diff(&StdFormParams::new(c, c, s, -s)));
        worst.1 = worst.1.max(check_physical(&p, 0.0).residual_det.abs());
        let insep = check_inseparable(&p, DEFAULT_TOL).unwrap().residual;
        worst.2 = worst.2.max((insep - (2.0 * (4.0 * r).cosh() - 2.0)).abs());
    }
    outcome(
        worst.0 <= 1e-12 && worst.1 <= 1e-10 && worst.2 <= 1e-9,
        format!(
            "params dev {:.2e} (≤1e-12), physicality residual {:.2e} (≤1e-10), inseparability dev {:.2e} (≤1e-9)",
            worst.0, worst.1, worst.2
        ),
    )
}

/// Asymmetric NPT 1×1 states: scrambled noisy entangled states and lossy
/// two-mode squeezed states, alternating.
fn asymmetric_npt_1x1(count: usize) -> Vec<CorrelationMatrix> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        seed += 1;
        let g = if seed.is_multiple_of(2) {
            random_state(1, 1, seed, StateKind::Entangled).unwrap()
        } else {
            let u = (derive_seed(seed, 9) >> 11) as f64 / (1u64 << 53) as f64;
            let v = (derive_seed(seed, 10) >> 11) as f64 / (1u64 << 53) as f64;
            let lossy = lossy_channel(&tmss_cm(0.1 + 1.1 * u).unwrap(), 1, 0.1 + 0.85 * v).unwrap();
            lossy.transform(&random_local_symplectic(1, 1, seed).unwrap()).unwrap()
        };
        let p = standard_form_params(&g).unwrap();
        if pt_gap(&g) < -BOUNDARY && (p.n_a - p.n_b).abs() > 1e-6 {
            out.push(g);
        }
    }
    out
}

fn symmetrization_oracle() -> Outcome {
    let (mut gap, mut asym, mut scaling) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut failures, mut ppt_out) = (0, 0);
    let states = asymmetric_npt_1x1(500);
    for g in &states {
        let std = standard_form_transform(g).unwrap();
        let rep = match symmetrize(&std.gamma_std, DEFAULT_TOL) {
            Ok(r) => r,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let w = rep.wigner_in;
        let frame = if rep.swapped_sides {
            StdFormParams::new(w.n_b, w.n_a, w.k_x, w.k_p)
        } else {
            w.as_std()
        };
        gap = gap.max(closed_form_oracle_gap(&frame, rep.theta).unwrap());
        asym = asym.max((rep.params_out.n_a - rep.params_out.n_b).abs());
        let expected = rep.insep_residual_in * rep.scale_factor;
        scaling = scaling.max((rep.insep_residual_out - expected).abs() / expected.abs());
        if !is_npt(&rep.gamma_out().unwrap(), DEFAULT_TOL).unwrap().npt {
            ppt_out += 1;
        }
    }
    outcome(
        failures == 0 && ppt_out == 0 && gap <= 1e-10 && asym <= 1e-8 && scaling <= 1e-8,
        format!(
            "{} states: oracle gap {gap:.2e} (≤1e-10), |n_a-n_b| {asym:.2e} (≤1e-8), scaling rel err \
             {scaling:.2e} (≤1e-8), {ppt_out} PPT outputs, {failures} failures",
            states.len()
        ),
    )
}

fn concentration_suite() -> Outcome {
    let (mut done, mut failures, mut retried, mut worst_leak) = (0, 0, 0, 0.0_f64);
    let mut seed = 0u64;
    while done < 500 {
        seed += 1;
        let mut rng_bits = derive_seed(seed, 77);
        let n_a = 1 + (rng_bits % 4) as usize;
        rng_bits /= 4;
        let n_b = 1 + (rng_bits % 4) as usize;
        let g = random_state(n_a, n_b, seed, StateKind::Entangled).unwrap();
        if pt_gap(&g) >= -BOUNDARY {
            continue;
        }
        done += 1;
        match concentrate_with_retries(&g, DEFAULT_TOL, seed) {
            Ok((w, c)) => {
                retried += (w.perturbation > 0) as usize;
                worst_leak = worst_leak.max(c.leakage);
                if c.leakage > 1e-6 || !is_npt(&c.gamma_red, DEFAULT_TOL).unwrap().npt {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0,
        format!("500 states: worst leakage {worst_leak:.2e} (≤1e-6), {retried} needed perturbation, {failures} hard failures"),
    )
}

fn rc_limit() -> Outcome {
    let (mut done, mut wrong, mut below) = (0, 0, 0);
    let mut seed = 0u64;
    while done < 200 {
        seed += 1;
        let p = random_symmetric_params(seed);
        let x = (p.n_a - p.k_x) * (p.n_a + p.k_p) - 1.0;
        if x.abs() < 1e-3 {
            continue;
        }
        done += 1;
        below += (x < 0.0) as usize;
        let value = rc_value(&standard_form_cm(&p).unwrap(), 8.0).unwrap().value;
        if (value < 0.0) != (x < 0.0) {
            wrong += 1;
        }
    }
    outcome(wrong == 0, format!("200 states ({below} with (n-k_x)(n+k_p) < 1), {wrong} sign mismatches at r = 8"))
}

fn structural_invariants() -> Outcome {
    let cfg = FuzzConfig::default();
    let (mut spec_dev, mut wig_dev, mut pt_bad) = (0.0_f64, 0.0_f64, 0);
    for i in 0..500 {
        let t = trial(&cfg, i).unwrap();
        let g = &t.gamma;
        let s = random_symplectic(g.modes(), derive_seed(t.seed, 3)).unwrap();
        let a = g.symplectic_eigenvalues().unwrap();
        let b = g.transform(&s).unwrap().symplectic_eigenvalues().unwrap();
        for (x, y) in a.iter().zip(&b) {
            spec_dev = spec_dev.max((x - y).abs() / x);
        }
        if partial_transpose(&partial_transpose(g)) != *g {
            pt_bad += 1;
        }
        let twice = wigner_cm(&wigner_cm(g).unwrap()).unwrap();
        wig_dev = wig_dev.max(max_abs(&(twice.entries() - g.entries())));
    }
    let start = Instant::now();
    let summary = run_campaign(&FuzzConfig::default());
    let elapsed = start.elapsed();
    outcome(
        spec_dev <= 1e-8 && pt_bad == 0 && wig_dev <= 1e-10 && summary.ok() && elapsed < Duration::from_secs(60),
        format!(
            "spectrum dev {spec_dev:.2e} (≤1e-8), PT involution misses {pt_bad}, Wigner involution dev \
             {wig_dev:.2e} (≤1e-10); default fuzz: {} violations in {:.1}s (<60s)",
            summary.total_violations,
            elapsed.as_secs_f64()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 verdict equivalence", verdict_equivalence),
        ("2 1x1 equivalence", one_by_one_equivalence),
        ("3 TMSS analytics", tmss_analytics),
        ("4 symmetrization oracle", symmetrization_oracle),
        ("5 concentration suite", concentration_suite),
        ("6 reduction-criterion limit", rc_limit),
        ("7 structural invariants", structural_invariants),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        failed += !o.pass as usize;
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
