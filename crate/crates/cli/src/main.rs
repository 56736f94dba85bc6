//! Command-line front end.
//!
//! Maps are given as text specs:
//!
//! ```text
//! spec    := atom | "prod(" spec ("," spec)+ ")" | "compose(" spec ("," spec)+ ")"
//! atom    := "id" | "S" | "moebius:" [c ","] c | "blaschke:" c ("," c)* [";" c]
//!          | "singular:" angle "@" mass ("," angle "@" mass)* | "balpha:" c
//! c       := complex literal such as 0.5, -0.2i, 0.3+0.4i, i
//! ```
//!
//! `falsify` also accepts the random family names `moebius`, `blaschke`,
//! `blaschke/<k>`, `singular`, `balpha` and `product`.
//!
//! Arc sets are `full`, `empty` or space-separated `start:end` pairs in radians.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use schwarz_lab::angular::{angular_derivative, DEFAULT_DEPTH};
use schwarz_lab::bounds::{
    inner_bound_rhs, lower_bound_slack, omega, q_ratio, reverse_bound_rhs, schwarz_pick_slack, simple_bound_rhs,
    BoundConfig,
};
use schwarz_lab::geometry::{ArcSet, BoundaryPoint, CircleGrid, DiskPoint, DEFAULT_GRID_N};
use schwarz_lab::verify::{falsify, run_suite, ArcChoice, FalsifyOptions, SuiteConfig};
use schwarz_lab::zoo::{parse_spec, HoloMap};
use schwarz_lab::LabError;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "schwarz-lab",
    version,
    about = "Schwarz–Pick bounds for holomorphic self-maps of the disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quad {
    Default,
    Sweep,
}

#[derive(Subcommand)]
enum Command {
    /// Print Q, |φ'| and the bounds at one point.
    Eval {
        spec: String,
        /// Point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// The set E.
        #[arg(long, default_value = "full")]
        arcs: String,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the property suite described by a config file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// JSON output, unless the config names one.
        #[arg(long, default_value = "suite_report.json")]
        json: PathBuf,
        /// CSV output, unless the config names one.
        #[arg(long, default_value = "suite_report.csv")]
        csv: PathBuf,
    },
    /// Random search for the smallest slack of the reverse bound.
    Falsify {
        spec: String,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `random` or a fixed set.
        #[arg(long, default_value = "random")]
        arcs: String,
        #[arg(long, default_value_t = 0.99)]
        r_max: f64,
        #[arg(long, value_enum, default_value_t = Quad::Sweep)]
        quad: Quad,
    },
    /// Polar grid of Q, |φ'| and the reverse bound as CSV.
    Sweep {
        spec: String,
        /// Grid size as `nr,ntheta`.
        #[arg(long)]
        polar: String,
        /// Output file, `-` for stdout.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "full")]
        arcs: String,
        #[arg(long, default_value_t = 0.95)]
        r_max: f64,
        #[arg(long, value_enum, default_value_t = Quad::Sweep)]
        quad: Quad,
    },
    /// Radial probe for an angular derivative.
    Angular {
        spec: String,
        /// Boundary angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        zeta: f64,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn bounds(n: usize, quad: Quad) -> Result<BoundConfig> {
    let grid = CircleGrid::new(n)?;
    Ok(match quad {
        Quad::Default => BoundConfig::new(grid),
        Quad::Sweep => BoundConfig::sweep(grid),
    })
}

fn fixed_arcs(text: &str) -> Result<ArcSet> {
    match text.parse::<ArcChoice>()? {
        ArcChoice::Fixed(e) => Ok(e),
        ArcChoice::Random => bail!("a fixed arc set is required here"),
    }
}

fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, T)> {
    let (a, b) = text
        .split_once(',')
        .with_context(|| format!("{what} must be two comma-separated values"))?;
    match (a.trim().parse(), b.trim().parse()) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => bail!("bad {what} `{text}`"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval { spec, z, arcs, n, json } => eval(&spec, &z, &arcs, n, json),
        Command::Verify { config, json, csv } => verify(&config, json, csv),
        Command::Falsify {
            spec,
            budget,
            seed,
            arcs,
            r_max,
            quad,
        } => {
            let opts = FalsifyOptions {
                arcs: arcs.parse()?,
                r_max,
                bounds: bounds(DEFAULT_GRID_N, quad)?,
            };
            let rec = falsify(&spec, budget, seed, &opts)?;
            println!("{}", serde_json::to_string_pretty(&rec)?);
            Ok(if rec.violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Sweep {
            spec,
            polar,
            out,
            arcs,
            r_max,
            quad,
        } => {
            let (nr, ntheta) = parse_pair::<usize>(&polar, "--polar")?;
            let phi = parse_spec(&spec)?;
            let csv = sweep(
                &phi,
                nr,
                ntheta,
                &fixed_arcs(&arcs)?,
                r_max,
                &bounds(DEFAULT_GRID_N, quad)?,
            )?;
            if out.as_os_str() == "-" {
                print!("{csv}");
            } else {
                std::fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Angular {
            spec,
            zeta,
            depth,
            json,
        } => {
            let phi = parse_spec(&spec)?;
            let rep = angular_derivative(&phi, BoundaryPoint::from_angle(zeta), depth)?;
            if json {
                println!("{}", rep.to_json());
            } else {
                println!("{}", schwarz_lab::angular::AngularReport::CSV_HEADER);
                println!("{}", rep.to_csv_row());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn eval(spec: &str, z: &str, arcs: &str, n: usize, as_json: bool) -> Result<ExitCode> {
    let phi = parse_spec(spec)?;
    let (re, im) = parse_pair::<f64>(z, "--z")?;
    let z = DiskPoint::from_re_im(re, im)?;
    let e = fixed_arcs(arcs)?;
    let cfg = bounds(n, Quad::Default)?;
    let w = phi.eval(z.value());
    let main = reverse_bound_rhs(&phi, &e, z, &cfg)?;
    let simple = match simple_bound_rhs(&phi, &e, z, &cfg) {
        Ok(v) => Some(v),
        Err(LabError::UnboundedOnE { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let inner = if phi.is_inner() {
        Some(inner_bound_rhs(&phi, z, &cfg)?.value)
    } else {
        None
    };
    let out = json!({
        "map": phi.to_spec(),
        "z": [re, im],
        "phi": [w.re, w.im],
        "q": q_ratio(&phi, z),
        "abs_deriv": phi.deriv(z.value()).norm(),
        "schwarz_pick_slack": schwarz_pick_slack(&phi, z),
        "lower_bound_slack": lower_bound_slack(&phi, z),
        "omega_e": omega(z, &e),
        "rhs_main": main.value,
        "rhs_main_error": main.error,
        "rhs_simple": simple,
        "inner_bound": inner,
    });
    if as_json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (k, v) in out.as_object().expect("object") {
            println!(
                "{k:<20} {}",
                if v.is_null() {
                    "unbounded".to_string()
                } else {
                    v.to_string()
                }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(config: &PathBuf, json: PathBuf, csv: PathBuf) -> Result<ExitCode> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg: SuiteConfig = text.parse()?;
    cfg.json.get_or_insert(json);
    cfg.csv.get_or_insert(csv);
    let report = run_suite(&cfg)?;
    report.write_outputs(&cfg)?;
    let s = &report.summary;
    println!(
        "records {}  passed {}  failed {}  errors {}  runtime {:.2}s",
        s.records, s.passed, s.failed, s.errors, s.runtime_s
    );
    for c in &s.checks {
        println!(
            "  {:<18} {:>7} records  {:>4} failed  min slack {:e}",
            c.check.name(),
            c.records,
            c.failed,
            c.min_slack
        );
    }
    println!("  max chain violation {:e}", s.max_chain_violation);
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// CSV with columns `r,theta,q,abs_deriv,rhs_main`.
fn sweep(phi: &HoloMap, nr: usize, ntheta: usize, e: &ArcSet, r_max: f64, cfg: &BoundConfig) -> Result<String> {
    if nr == 0 || ntheta == 0 {
        bail!("--polar needs positive counts");
    }
    let mut out = String::from("r,theta,q,abs_deriv,rhs_main\n");
    for i in 0..nr {
        let r = r_max * (i + 1) as f64 / nr as f64;
        for j in 0..ntheta {
            let theta = TAU * j as f64 / ntheta as f64;
            let z = DiskPoint::new(Complex64::from_polar(r, theta))?;
            let rhs = reverse_bound_rhs(phi, e, z, cfg).map_or(f64::NAN, |v| v.value);
            writeln!(
                out,
                "{r:e},{theta:e},{:e},{:e},{rhs:e}",
                q_ratio(phi, z),
                phi.deriv(z.value()).norm()
            )?;
        }
    }
    Ok(out)
}
