use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use duffing_atlas::integrator::{integrate, IntegrationOptions, Method};
use duffing_atlas::render::{render_disc, RenderSpec, Seeds};
use duffing_atlas::report::{portrait_report, sweep, SweepParam, TrajectoryReport};
use duffing_atlas::verify::{run_suite, Suite};
use duffing_atlas::{Error, Parameters, PlaneState};

// a closed pipe (e.g. `| head`) is not an error worth a panic
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_INTEGRATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "duffing-atlas",
    version,
    about = "Qualitative dynamics of x' = y, y' = -alpha y - epsilon x^m - sigma x"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: f64,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long)]
    m: u32,
}

impl ParamArgs {
    fn build(self) -> Result<Parameters, Error> {
        Parameters::new(self.alpha, self.epsilon, self.sigma, self.m)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Theorem-level classification: portrait panel and equilibrium census.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        json: bool,
    },
    /// Integrate one orbit in the plane.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Fixed-step symplectic method (alpha = 0 only); the step is --max-step.
        #[arg(long)]
        leapfrog: bool,
        #[arg(long, default_value_t = 0.5)]
        max_step: f64,
        /// Write samples as CSV (t,x,y) instead of JSON on stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render the portrait on the disc as SVG.
    Portrait {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
        /// `auto` or a list like `1,0;-2,0.5`.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        seeds: String,
        #[arg(long, default_value_t = 240)]
        radius: u32,
        #[arg(long)]
        no_circle: bool,
        #[arg(long, default_value_t = 1.5)]
        arrows: f64,
        #[arg(long, default_value_t = 30.0)]
        orbit_time: f64,
    },
    /// Run acceptance criteria.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        /// Only the default grid is available.
        #[arg(long, default_value = "default", value_parser = ["default"])]
        grid: String,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Panel labels along a line in one coefficient.
    Sweep {
        #[arg(long, value_parser = ["alpha", "epsilon", "sigma"])]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Invalid(String),
    Verification(String),
    Integration(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IntegrationFailure { .. } => Failure::Integration(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn parse_seeds(text: &str) -> Result<Seeds, Failure> {
    if text == "auto" {
        return Ok(Seeds::Auto);
    }
    let mut out = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, y) = item
            .split_once(',')
            .ok_or_else(|| Failure::Invalid(format!("seed {item:?} is not x,y")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Invalid(format!("seed {item:?} is not numeric")))
        };
        out.push(PlaneState::new(parse(x)?, parse(y)?));
    }
    Ok(Seeds::List(out))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { params, json } => {
            let p = params.build()?;
            let report = portrait_report(&p)?;
            if json {
                out!(
                    "{}",
                    serde_json::to_string_pretty(&report).context("serializing report")?
                );
            } else {
                let label = match (report.panel, report.boundary) {
                    (Some(c), _) => format!("{}({c})", report.figure),
                    (None, b) => format!("{} [{:?}]", report.figure, b),
                };
                out!("panel: {label}");
                out!("conditions: {}", report.conditions);
                if let Some(note) = &report.note {
                    out!("note: {note}");
                }
                for e in &report.census.finite {
                    out!("finite {} at x = {}: {:?}", e.label, e.location.x, e.kind);
                }
                for e in &report.census.infinite {
                    out!("infinite {} u = {}: {:?}", e.chart, e.u, e.kind);
                }
                if let Some(c) = &report.census.cycles {
                    out!("cycles: {:?}", c.kind);
                }
                out!("global center: {}", report.global_center);
                for d in &report.census.diagnostics {
                    out!("inconsistency: {d}");
                }
            }
        }
        Command::Simulate {
            params,
            x0,
            y0,
            tmax,
            tol,
            leapfrog,
            max_step,
            csv,
        } => {
            let p = params.build()?;
            let opts = IntegrationOptions {
                method: if leapfrog {
                    Method::SymplecticLeapfrog
                } else {
                    Method::AdaptiveRK
                },
                max_step,
                ..IntegrationOptions::default()
                    .with_tolerance(tol)
                    .with_max_time(tmax)
            };
            let traj = integrate(&p, PlaneState::new(x0, y0), &opts)?;
            match csv {
                Some(path) => {
                    fs::write(&path, traj.to_csv())
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("{} samples, {:?}", traj.samples.len(), traj.termination);
                }
                None => {
                    let report = TrajectoryReport::new(&p, traj);
                    out!(
                        "{}",
                        serde_json::to_string(&report).context("serializing trajectory")?
                    );
                }
            }
        }
        Command::Portrait {
            params,
            out,
            seeds,
            radius,
            no_circle,
            arrows,
            orbit_time,
        } => {
            let p = params.build()?;
            let spec = RenderSpec {
                disc_radius_px: radius,
                orbit_seeds: parse_seeds(&seeds)?,
                draw_infinite_circle: !no_circle,
                arrow_density: arrows,
                orbit_time,
            };
            let svg = render_disc(&p, &spec)?;
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Verify {
            suite,
            grid: _,
            workers,
            json,
        } => {
            let suite: Suite = suite.parse()?;
            let results = run_suite(suite, workers)?;
            if json {
                out!(
                    "{}",
                    serde_json::to_string_pretty(&results).context("serializing results")?
                );
            } else {
                for r in &results {
                    out!("{r}");
                }
            }
            let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
            if !failed.is_empty() {
                return Err(Failure::Verification(format!("criteria {failed:?} failed")));
            }
        }
        Command::Sweep {
            param,
            from,
            to,
            steps,
            alpha,
            epsilon,
            sigma,
            m,
            json,
        } => {
            let param: SweepParam = param.parse()?;
            // the swept coefficient is replaced point by point; keep the base valid
            let base_eps = if param == SweepParam::Epsilon && epsilon == 0.0 {
                1.0
            } else {
                epsilon
            };
            let base = Parameters::new(alpha, base_eps, sigma, m)?;
            let report = sweep(&base, param, from, to, steps)?;
            if json {
                out!(
                    "{}",
                    serde_json::to_string_pretty(&report).context("serializing sweep")?
                );
            } else {
                for b in &report.boundaries {
                    out!(
                        "{} -> {} between {} and {}",
                        b.from,
                        b.to,
                        b.between.0,
                        b.between.1
                    );
                }
                if report.boundaries.is_empty() {
                    out!("{} throughout", report.points[0].label);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Integration(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INTEGRATION)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {:#}", anyhow!(e));
            ExitCode::FAILURE
        }
    }
}
