//! `gdistill` command-line front end.
//!
//! Exit codes: 0 success (or DISTILLABLE), 1 input/usage error, 2 unphysical
//! state, 3 NOT_DISTILLABLE / PPT input / fuzz violations, 4 inconclusive
//! boundary, 5 stage failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use gdistill::fuzz::{run_campaign, FuzzConfig};
use gdistill::io::StateFile;
use gdistill::protocol::concentrate_with_retries;
use gdistill::random::{random_state, StateKind};
use gdistill::{
    distill_pipeline, is_npt, rows, standard_form_transform, symmetrize, validate_physical,
    CorrelationMatrix, Error, PipelineOptions, Stage, Verdict,
};
use serde_json::{json, Value};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_UNPHYSICAL: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;
const EXIT_BOUNDARY: u8 = 4;
const EXIT_STAGE: u8 = 5;

#[derive(Parser)]
#[command(name = "gdistill", version, about = "Distillability of bipartite Gaussian states")]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Numerical tolerance for physicality and NPT decisions.
    #[arg(long, global = true, env = "GDISTILL_TOL", default_value_t = gdistill::DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check physicality and the partial-transpose criterion.
    Validate { path: PathBuf },
    /// Run the full distillation pipeline.
    Pipeline {
        path: PathBuf,
        /// Largest probe squeezing in the reduction-criterion sweep.
        #[arg(long, default_value_t = 8)]
        r_max: u32,
        /// Seed for witness perturbation retries.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a random physical state file.
    Random {
        #[arg(long, default_value_t = 1)]
        modes_a: usize,
        #[arg(long, default_value_t = 1)]
        modes_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "thermal", value_parser = parse_kind)]
        kind: StateKind,
    },
    /// Run the invariant campaign; exits 3 on any violation.
    Fuzz {
        /// JSON config; missing fields take their defaults.
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Bring a 1×1 state to standard form.
    StandardForm {
        path: PathBuf,
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Symmetrize a 1×1 NPT state.
    Symmetrize {
        path: PathBuf,
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Concentrate an N×M NPT state onto one mode per side.
    Concentrate {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<StateKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command: exit code, stderr message and, with `--json`, a JSON
/// error document.
struct Failure {
    code: u8,
    message: String,
    stage: Option<&'static str>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), stage: None }
    }

    fn input(e: Error) -> Self {
        Self::new(EXIT_INPUT, e.to_string())
    }

    fn stage(e: Error) -> Self {
        match e {
            Error::Unphysical(nu) => {
                Self::new(EXIT_UNPHYSICAL, format!("state is unphysical (min symplectic eigenvalue {nu})"))
            }
            other => Self {
                code: EXIT_STAGE,
                stage: other.stage().map(|s| s.name()),
                message: other.to_string(),
            },
        }
    }
}

type CmdResult = Result<(u8, Value, String), Failure>;

fn load(path: &Path) -> Result<CorrelationMatrix, Failure> {
    StateFile::read(path)
        .map(|f| f.gamma().clone())
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_physical(path: &Path, tol: f64) -> Result<CorrelationMatrix, Failure> {
    let g = load(path)?;
    let v = validate_physical(&g, tol).map_err(Failure::stage)?;
    if !v.physical {
        return Err(Failure::stage(Error::Unphysical(v.min_symplectic_eigenvalue)));
    }
    Ok(g)
}

fn load_npt(path: &Path, tol: f64) -> Result<CorrelationMatrix, Failure> {
    let g = load_physical(path, tol)?;
    if !is_npt(&g, tol).map_err(Failure::stage)?.npt {
        return Err(Failure::new(EXIT_NEGATIVE, "state is PPT"));
    }
    Ok(g)
}

fn write_state(path: Option<&PathBuf>, gamma: &CorrelationMatrix, producer: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = StateFile::new(gamma.clone()).with_metadata("produced_by", producer).to_json_string();
        std::fs::write(p, text + "\n").map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn validate(path: &Path, tol: f64) -> CmdResult {
    let g = load(path)?;
    let phys = validate_physical(&g, tol).map_err(Failure::input)?;
    let mut doc = json!({
        "n_a": g.n_a(),
        "n_b": g.n_b(),
        "physical": phys.physical,
        "min_symplectic_eigenvalue": phys.min_symplectic_eigenvalue,
        "physicality_margin": phys.margin,
    });
    let code = if phys.physical {
        let npt = is_npt(&g, tol).map_err(Failure::input)?;
        doc["npt"] = json!(npt.npt);
        doc["npt_margin"] = json!(npt.margin);
        doc["min_pt_symplectic_eigenvalue"] = json!(npt.min_pt_symplectic_eigenvalue);
        EXIT_OK
    } else {
        EXIT_UNPHYSICAL
    };
    let text = serde_json::to_string_pretty(&doc).expect("verdict JSON") + "\n";
    Ok((code, doc, text))
}

fn pipeline(path: &Path, tol: f64, r_max: u32, seed: u64) -> CmdResult {
    let g = load(path)?;
    let opts = PipelineOptions { tol, r_max, seed, ..PipelineOptions::default() };
    let report = distill_pipeline(&g, &opts).map_err(Failure::stage)?;
    let code = match report.verdict {
        Verdict::Distillable => EXIT_OK,
        Verdict::NotDistillable => EXIT_NEGATIVE,
        Verdict::InconclusiveBoundary => EXIT_BOUNDARY,
    };
    let doc = report.to_json();
    let mut text = format!(
        "verdict: {}\npartition: {}x{}\nmin partial-transpose symplectic eigenvalue: {:.6e}\n",
        doc["verdict"].as_str().unwrap_or_default(),
        g.n_a(),
        g.n_b(),
        report.npt.min_pt_symplectic_eigenvalue
    );
    if let Some(w) = &report.witness {
        let _ = writeln!(text, "witness margin: {:.6e} (perturbation {})", w.margin, w.perturbation);
    }
    if let Some(s) = &report.symmetrization {
        let _ = writeln!(text, "symmetrization angle: {:.6} (sides swapped: {})", s.theta, s.swapped_sides);
    }
    if let Some(p) = &report.final_params {
        let _ = writeln!(
            text,
            "final parameters: n_a={:.9} n_b={:.9} k_x={:.9} k_p={:.9}",
            p.n_a, p.n_b, p.k_x, p.k_p
        );
    }
    if let Some(rc) = &report.rc {
        let _ = writeln!(text, "reduction criterion at r={}: {:.6e}", rc.r, rc.value);
    }
    Ok((code, doc, text))
}

fn random(n_a: usize, n_b: usize, seed: u64, kind: StateKind) -> CmdResult {
    let g = random_state(n_a, n_b, seed, kind).map_err(Failure::input)?;
    let file = StateFile::new(g)
        .with_metadata("generator", "random")
        .with_metadata("kind", kind)
        .with_metadata("seed", seed);
    let text = file.to_json_string();
    let doc = serde_json::from_str(&text).expect("state file JSON");
    Ok((EXIT_OK, doc, text + "\n"))
}

fn fuzz(config: Option<&Path>, trials: Option<usize>, seed: Option<u64>) -> CmdResult {
    let mut cfg = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            serde_json::from_str::<FuzzConfig>(&text)
                .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", p.display())))?
        }
        None => FuzzConfig::default(),
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if cfg.trials == 0 || cfg.max_modes_a == 0 || cfg.max_modes_b == 0 || !(0.0..=1.0).contains(&cfg.npt_fraction_target) {
        return Err(Failure::new(
            EXIT_INPUT,
            "config needs trials, max_modes_a, max_modes_b ≥ 1 and npt_fraction_target in [0, 1]",
        ));
    }
    let start = Instant::now();
    let summary = run_campaign(&cfg);
    eprintln!("fuzz: {} trials in {:.2}s", cfg.trials, start.elapsed().as_secs_f64());
    let doc = summary.to_json();
    let text = serde_json::to_string_pretty(&doc).expect("summary JSON") + "\n";
    Ok((if summary.ok() { EXIT_OK } else { EXIT_NEGATIVE }, doc, text))
}

fn standard_form(path: &Path, tol: f64, out: Option<&PathBuf>) -> CmdResult {
    let g = load_physical(path, tol)?;
    let sf = standard_form_transform(&g).map_err(|e| Failure::stage(e.at(Stage::StandardForm)))?;
    write_state(out, &sf.gamma_std, "standard-form")?;
    let p = sf.params;
    let doc = json!({
        "params": p,
        "s_a": rows(sf.s_a.matrix()),
        "s_b": rows(sf.s_b.matrix()),
        "gamma_std": rows(sf.gamma_std.entries()),
    });
    let text = format!("n_a={:.12} n_b={:.12} k_x={:.12} k_p={:.12}\n", p.n_a, p.n_b, p.k_x, p.k_p);
    Ok((EXIT_OK, doc, text))
}

fn symmetrize_cmd(path: &Path, tol: f64, out: Option<&PathBuf>) -> CmdResult {
    let g = load_npt(path, tol)?;
    let rep = symmetrize(&g, tol).map_err(|e| Failure::stage(e.at(Stage::Symmetrize)))?;
    let gamma_out = rep.gamma_out().map_err(Failure::stage)?;
    write_state(out, &gamma_out, "symmetrize")?;
    let p = rep.params_out;
    let text = format!(
        "theta: {:.12}\nsides swapped: {}\nscale factor: {:.12}\noutput: n={:.12} k_x={:.12} k_p={:.12}\n",
        rep.theta, rep.swapped_sides, rep.scale_factor, p.n_a, p.k_x, p.k_p
    );
    Ok((EXIT_OK, json!(rep), text))
}

fn concentrate_cmd(path: &Path, tol: f64, seed: u64, out: Option<&PathBuf>) -> CmdResult {
    let g = load_npt(path, tol)?;
    let (w, c) = concentrate_with_retries(&g, tol, seed).map_err(Failure::stage)?;
    write_state(out, &c.gamma_red, "concentrate")?;
    let text = format!(
        "witness margin: {:.6e} (perturbation {})\nleakage: {:.3e}\nreduced state NPT: {}\n",
        w.margin, w.perturbation, c.leakage, c.npt.npt
    );
    Ok((EXIT_OK, json!({ "witness": w.to_json(), "concentration": c.to_json() }), text))
}

fn run(cli: &Cli) -> CmdResult {
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::new(EXIT_INPUT, format!("tolerance {tol} must be positive")));
    }
    match &cli.command {
        Command::Validate { path } => validate(path, tol),
        Command::Pipeline { path, r_max, seed } => pipeline(path, tol, *r_max, *seed),
        Command::Random { modes_a, modes_b, seed, kind } => random(*modes_a, *modes_b, *seed, *kind),
        Command::Fuzz { config, trials, seed } => fuzz(config.as_deref(), *trials, *seed),
        Command::StandardForm { path, state_out } => standard_form(path, tol, state_out.as_ref()),
        Command::Symmetrize { path, state_out } => symmetrize_cmd(path, tol, state_out.as_ref()),
        Command::Concentrate { path, seed, state_out } => concentrate_cmd(path, tol, *seed, state_out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok((code, doc, text)) => {
            if cli.json {
                println!("{doc}");
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(f) => {
            match f.stage {
                Some(s) => eprintln!("error in stage {s}: {}", f.message),
                None => eprintln!("error: {}", f.message),
            }
            if cli.json {
                println!("{}", json!({ "error": f.message, "stage": f.stage, "exit_code": f.code }));
            }
            ExitCode::from(f.code)
        }
    }
}
