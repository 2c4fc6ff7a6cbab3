//! `acbs` command line. Exit status: 0 success, 1 failed check or runtime
//! error, 2 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use acbs_core::bootstrap::BootstrapConfig;
use acbs_core::projection::DEFAULT_DK_CONSTANT;
use acbs_core::rho::c_rho_estimate;
use acbs_core::symmetry::AzClass;
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::examples::{gen_example, pair_from_json, pair_to_json, GenParams};
use crate::json::{matrix_to_json, report_to_json, specs_from_json};
use crate::pipeline::{declared_defect, run_bootstrap, Mode};
use crate::suites::run_suite;

/// Upper bounds the quadrature is checked against.
pub const C1_CAP: f64 = 8.314;
pub const CRHO_CAP: f64 = 11.758;

#[derive(Parser, Debug)]
#[command(name = "acbs", about = "Symmetric commuting approximants of almost commuting matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a named example pair.
    Gen {
        #[arg(long)]
        example: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Site dimension (tensor_avg) or block size (rot, dihedral).
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a randomized invariant suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle approximant followed by the bootstrap on a pair file.
    Bootstrap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mode: String,
        #[arg(long, conflicts_with = "specs")]
        class: Option<String>,
        #[arg(long)]
        specs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quadrature of the localization constants.
    Crho {
        #[arg(long, default_value_t = 200_000)]
        points: usize,
    },
}

fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let s = serde_json::to_string_pretty(v)?;
    std::fs::write(path, s + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Bootstrap configuration, honouring `ACBS_DK_CONSTANT`.
pub fn config_from_env() -> Result<BootstrapConfig> {
    let mut cfg = BootstrapConfig::default();
    cfg.dk_constant = match std::env::var("ACBS_DK_CONSTANT") {
        Ok(s) => {
            let c: f64 = s.trim().parse().with_context(|| format!("ACBS_DK_CONSTANT={s:?} is not a number"))?;
            if !(c > 0.0) || !c.is_finite() {
                bail!("ACBS_DK_CONSTANT must be positive");
            }
            c
        }
        Err(_) => DEFAULT_DK_CONSTANT,
    };
    Ok(cfg)
}

fn parse_class(s: &str) -> Result<AzClass> {
    AzClass::parse(s).ok_or_else(|| anyhow!("unknown class {s:?}"))
}

/// Returns `Ok(true)` when every check passed.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Gen { example, n, class, delta, seed, d, out } => {
            let class = class.as_deref().map(parse_class).transpose()?;
            let pair = gen_example(&example, &GenParams { n, class, delta, seed, d })?;
            write_json(&out, &pair_to_json(&pair))?;
            let defect = declared_defect(&pair, &pair.first, &pair.second);
            println!("{}", json!({ "example": example, "out": out.display().to_string(), "declared_defect": defect }));
            Ok(defect <= 1e-10)
        }
        Command::Verify { suite, trials, seed, tol, out } => {
            let rep = run_suite(&suite, trials, seed, tol)?;
            let v = serde_json::to_value(&rep)?;
            match out {
                Some(p) => write_json(&p, &v)?,
                None => println!("{}", serde_json::to_string_pretty(&v)?),
            }
            Ok(rep.pass)
        }
        Command::Bootstrap { input, mode, class, specs, out } => {
            let mode = Mode::parse(&mode).ok_or_else(|| anyhow!("mode must be sa or unitary"))?;
            let mut pair = pair_from_json(&read_json(&input)?)?;
            if let Some(c) = class {
                let c = parse_class(&c)?;
                match pair.class {
                    Some(pc) if pc == c => {}
                    Some(pc) => bail!("pair file holds class {}, not {}", pc.name(), c.name()),
                    None => bail!("pair file carries no class operators"),
                }
            }
            if let Some(p) = specs {
                let v = read_json(&p)?;
                pair.first_specs = specs_from_json(v.get("first_specs"))?;
                pair.second_specs = specs_from_json(v.get("second_specs"))?;
            }
            let cfg = config_from_env()?;
            let res = run_bootstrap(&pair, mode, &cfg)?;
            let mut v = report_to_json(&res.report);
            v["dk_constant"] = json!(cfg.dk_constant);
            v["crho"] = json!(cfg.crho);
            v["declared_defect"] = json!(declared_defect(&pair, &res.first, &res.b));
            v["outputs"] = json!({ "first": matrix_to_json(&res.first), "second": matrix_to_json(&res.b) });
            write_json(&out, &v)?;
            println!("{}", json!({ "mode": res.report.mode, "epsilon": res.report.epsilon, "pass": res.report.all_pass() }));
            Ok(res.report.all_pass())
        }
        Command::Crho { points } => {
            let t = Instant::now();
            let c = c_rho_estimate(points)?;
            let secs = t.elapsed().as_secs_f64();
            let within = c.c1 < C1_CAP && c.crho < CRHO_CAP;
            println!(
                "{}",
                json!({ "C1": c.c1, "Crho": c.crho, "points": c.points, "C1_cap": C1_CAP, "Crho_cap": CRHO_CAP, "within_caps": within, "seconds": secs })
            );
            Ok(within)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
