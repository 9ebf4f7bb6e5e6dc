use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conftree::bench::{self, ExperimentConfig};
use conftree::local_error::QuadratureSettings;
use conftree::{Error, Result};

/// Greedy conforming tree approximation on newest-vertex-bisection meshes.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the greedy algorithms and write traces, convergence tables and meshes.
    Run(Common),
    /// Check the near-best inequality against exhaustively computed best errors.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Multiply the algorithm errors by this factor before checking.
        #[arg(long, default_value_t = 1.0)]
        scale_errors: f64,
    },
    /// Fit the log-log slope of a `cards,err_sqrt` table.
    Slope {
        csv: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        to: f64,
    },
    /// Write the mesh and patch history after a given iteration.
    DumpMesh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        iteration: usize,
    },
    /// Check the degree-17 triangle rule and a closed-form local error.
    ValidateQuadrature {
        #[arg(long, default_value = "adaptive")]
        quadrature: String,
    },
}

#[derive(Args)]
#[group(id = "stopping", multiple = false)]
struct Stopping {
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    max_leaves: Option<usize>,
    #[arg(long)]
    err_below: Option<f64>,
    /// `indicator_zero`: run until every marking indicator vanishes.
    #[arg(long)]
    stop: Option<String>,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    /// alg1, alg2 or both.
    #[arg(long)]
    alg: Option<String>,
    #[command(flatten)]
    stopping: Stopping,
    #[arg(long)]
    cap: Option<usize>,
    /// plain or adaptive.
    #[arg(long)]
    quadrature: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    near_factor: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    oracle_depth: Option<usize>,
    #[arg(long)]
    state_cap: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let s = &self.stopping;
        let pairs = [
            ("target", self.target.clone()),
            ("alg", self.alg.clone()),
            ("iters", s.iters.map(|v| v.to_string())),
            ("max_leaves", s.max_leaves.map(|v| v.to_string())),
            ("err_below", s.err_below.map(|v| v.to_string())),
            ("stop", s.stop.clone()),
            ("cap", self.cap.map(|v| v.to_string())),
            ("quadrature", self.quadrature.clone()),
            ("tol", self.tol.map(|v| v.to_string())),
            ("max_depth", self.max_depth.map(|v| v.to_string())),
            ("near_factor", self.near_factor.map(|v| v.to_string())),
            ("stride", self.stride.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("oracle_depth", self.oracle_depth.map(|v| v.to_string())),
            ("state_cap", self.state_cap.map(|v| v.to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                c.set(key, &v)?;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Run(common) => {
            let config = common.config()?;
            let mut code = 0;
            for out in bench::cmd_run(&config)? {
                let last = out.trace.last().expect("final row");
                println!(
                    "{}: {} iterations, {} leaves, err = {:e}{}",
                    out.algorithm,
                    last.n,
                    last.leaves,
                    last.err,
                    if out.partial { " (partial: iteration cap)" } else { "" }
                );
                for f in &out.files {
                    println!("  wrote {}", f.display());
                }
                if out.partial {
                    code = 2;
                }
            }
            Ok(code)
        }
        Command::Certify { common, scale_errors } => {
            let config = common.config()?;
            let out = bench::cmd_certify(&config, scale_errors)?;
            if let Some(t) = out.truncated {
                println!("{} (partial report)", Error::from(t));
            }
            for (alg, report) in &out.reports {
                println!("{alg}: {}", report.summary());
                for r in report.rows.iter().filter(|r| !r.pass) {
                    println!("  FAIL N={} err={:e} bound={:e} (n={})", r.big_n, r.err, r.bound, r.best_n);
                }
            }
            for f in &out.files {
                println!("  wrote {}", f.display());
            }
            Ok(out.exit_code())
        }
        Command::Slope { csv, from, to } => {
            println!("{}", bench::cmd_slope(&csv, from, to)?);
            Ok(0)
        }
        Command::DumpMesh { common, iteration } => {
            let config = common.config()?;
            let (dump, files) = bench::cmd_dump_mesh(&config, iteration)?;
            println!("{} cells, {} vertices", dump.cells.len(), dump.vertices.len());
            for f in &files {
                println!("  wrote {}", f.display());
            }
            Ok(0)
        }
        Command::ValidateQuadrature { quadrature } => {
            let settings = match quadrature.as_str() {
                "plain" => QuadratureSettings::plain(),
                "adaptive" => QuadratureSettings::default(),
                other => return Err(Error::Config(format!("quadrature must be plain or adaptive, got `{other}`"))),
            };
            let r = bench::cmd_validate_quadrature(&settings);
            println!(
                "degree {} rule, {} points: max relative monomial error {:e} at x^{} y^{}, weight sum {}, min weight {:e}",
                r.rule.degree,
                r.points,
                r.rule.max_relative_error,
                r.rule.worst_monomial.0,
                r.rule.worst_monomial.1,
                r.rule.weight_sum,
                r.rule.min_weight
            );
            println!("x^2 on the reference triangle: {} (relative error {:e})", r.x_squared, r.x_squared_relative_error);
            println!("{}", if r.passed() { "pass" } else { "FAIL" });
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    // exit code 2 is reserved for resource caps
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let capped = matches!(e, Error::IterationCap { .. } | Error::StateCap { .. } | Error::SearchCap { .. });
            ExitCode::from(if capped { 2 } else { 1 })
        }
    }
}
