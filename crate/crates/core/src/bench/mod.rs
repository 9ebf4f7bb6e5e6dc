//! The experiment harness behind the `conftree` binary: runs, oracle
//! certification, slope fits, mesh dumps and quadrature validation.

mod config;
mod slope;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{AlgorithmChoice, ExperimentConfig};
pub use slope::{fit_loglog_slope, read_convergence_csv, MIN_SLOPE_POINTS};

use crate::indicators::{write_convergence_csv, Algorithm, Greedy, RunTrace, StoppingRule};
use crate::local_error::{
    local_error_h1, target_by_name, validate_rule, H1Error, QuadratureRule, QuadratureSettings, RuleValidation, Target,
    XSquared,
};
use crate::nvb::dump::{patches_text, MeshDump};
use crate::nvb::{build_domain_mesh, NvbBackend};
use crate::oracle::{certify_near_best, enumerate_levels, CertificationReport, SigmaTable, Truncation};
use crate::tree::{GeometryBackend, RefinementTree};
use crate::{Error, Result};

pub type Functional = H1Error<Box<dyn Target>>;

/// Backend on the target's domain and its error functional.
pub fn setup(config: &ExperimentConfig) -> Result<(NvbBackend, Functional)> {
    config.validate()?;
    let target = target_by_name(&config.target)?;
    let backend = NvbBackend::new(&build_domain_mesh(target.domain()))?;
    Ok((backend, H1Error::new(target, config.quadrature)))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

/// One algorithm's run and the files written for it.
#[derive(Debug)]
pub struct RunOutput {
    pub algorithm: Algorithm,
    pub trace: RunTrace,
    /// The iteration cap was hit; the outputs describe a partial run.
    pub partial: bool,
    pub files: Vec<PathBuf>,
}

/// Runs the configured algorithms and writes, per algorithm,
/// `<target>_<alg>_trace.csv`, `<target>_<alg>_convergence.csv`,
/// `<target>_<alg>_mesh.txt`, `<target>_<alg>_patches.txt` and
/// `<target>_<alg>_status.txt` (`complete`, or `partial` if the iteration cap
/// was hit).
pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<RunOutput>> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let mut outputs = Vec::new();
    for algorithm in config.algorithm.algorithms() {
        let (mut backend, functional) = setup(config)?;
        let mut run = Greedy::new(&mut backend, &functional, algorithm)?;
        let (trace, partial) = match run.run_with_cap(config.stopping, config.iteration_cap) {
            Ok(trace) => (trace, false),
            Err(Error::IterationCap { trace, .. }) => (*trace, true),
            Err(e) => return Err(e),
        };
        let tree = run.into_tree();
        let stem = config.output_dir.join(format!("{}_{algorithm}", config.target));
        let name = |suffix: &str| PathBuf::from(format!("{}_{suffix}", stem.display()));
        let files = vec![
            name("trace.csv"),
            name("convergence.csv"),
            name("mesh.txt"),
            name("patches.txt"),
            name("status.txt"),
        ];
        write(&files[0], trace.to_csv().as_bytes())?;
        let mut conv = Vec::new();
        write_convergence_csv(&trace.checkpoints(config.stride), &mut conv)?;
        write(&files[1], &conv)?;
        write(&files[2], MeshDump::from_tree(&backend, &tree).to_text().as_bytes())?;
        write(&files[3], patches_text(&tree).as_bytes())?;
        let status = if partial { "partial: iteration cap reached\n" } else { "complete\n" };
        write(&files[4], status.as_bytes())?;
        outputs.push(RunOutput { algorithm, trace, partial, files });
    }
    Ok(outputs)
}

#[derive(Debug)]
pub struct CertifyOutput {
    pub reports: Vec<(Algorithm, CertificationReport)>,
    pub table: SigmaTable,
    /// The enumeration stopped at the state cap; the reports cover the
    /// completed levels only.
    pub truncated: Option<Truncation>,
    pub files: Vec<PathBuf>,
}

impl CertifyOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.passed())
    }

    /// `0` pass, `1` failed inequality, `2` enumeration cap.
    pub fn exit_code(&self) -> u8 {
        if !self.passed() {
            1
        } else if self.truncated.is_some() {
            2
        } else {
            0
        }
    }
}

/// Enumerates conforming trees up to `oracle_depth`, runs the configured
/// algorithms for as many iterations and checks the near-best inequality at
/// every iteration. `error_scale` multiplies the algorithm errors before
/// the check (a negative control when greater than one).
pub fn cmd_certify(config: &ExperimentConfig, error_scale: f64) -> Result<CertifyOutput> {
    let (mut backend, functional) = setup(config)?;
    fs::create_dir_all(&config.output_dir)?;
    let initial = RefinementTree::initial(&backend);
    let enumeration = enumerate_levels(&mut backend, &initial, config.oracle_depth, config.state_cap)?;
    let table = SigmaTable::from_enumeration(&backend, &functional, &enumeration)?;
    let depth = table.coverage().unwrap_or(0);
    let patch_size = backend.max_patch_size();

    let sigma_path = config.output_dir.join(format!("{}_sigma.csv", config.target));
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write(&sigma_path, &buf)?;
    let mut files = vec![sigma_path];

    let mut reports = Vec::new();
    for algorithm in config.algorithm.algorithms() {
        let mut run = Greedy::new(&mut backend, &functional, algorithm)?;
        let mut trace = run.run(StoppingRule::MaxIterations(depth))?;
        if error_scale != 1.0 {
            trace = trace.with_scaled_errors(error_scale);
        }
        let report = certify_near_best(&trace, &table, patch_size);
        let path = config.output_dir.join(format!("{}_{algorithm}_certify.csv", config.target));
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        write(&path, &buf)?;
        files.push(path);
        reports.push((algorithm, report));
    }
    Ok(CertifyOutput { reports, table, truncated: enumeration.truncated, files })
}

/// Slope of `log err` against `log cards` from a convergence CSV, over
/// checkpoints with `lo ≤ cards ≤ hi`.
pub fn cmd_slope(csv: &Path, lo: f64, hi: f64) -> Result<f64> {
    let points = read_convergence_csv(&fs::read_to_string(csv)?)?;
    fit_loglog_slope(&points, lo, hi)
}

/// Replays the first configured algorithm up to `iteration` and writes the
/// mesh of `T_iteration` and its patch history.
pub fn cmd_dump_mesh(config: &ExperimentConfig, iteration: usize) -> Result<(MeshDump, Vec<PathBuf>)> {
    let (mut backend, functional) = setup(config)?;
    fs::create_dir_all(&config.output_dir)?;
    let algorithm = config.algorithm.algorithms()[0];
    let mut run = Greedy::new(&mut backend, &functional, algorithm)?;
    let trace = run.run_with_cap(StoppingRule::MaxIterations(iteration), iteration)?;
    if trace.last().map(|r| r.n) != Some(iteration) {
        return Err(Error::UnknownIteration(iteration));
    }
    let tree = run.into_tree();
    let dump = MeshDump::from_tree(&backend, &tree);
    let stem = format!("{}_{algorithm}_{iteration}", config.target);
    let mesh = config.output_dir.join(format!("{stem}_mesh.txt"));
    let patches = config.output_dir.join(format!("{stem}_patches.txt"));
    write(&mesh, dump.to_text().as_bytes())?;
    write(&patches, patches_text(&tree).as_bytes())?;
    Ok((dump, vec![mesh, patches]))
}

#[derive(Clone, Debug)]
pub struct QuadratureReport {
    pub rule: RuleValidation,
    pub points: usize,
    /// Local error of `x²` on the reference triangle, exactly `1/9`.
    pub x_squared: f64,
    pub x_squared_relative_error: f64,
}

impl QuadratureReport {
    pub fn passed(&self) -> bool {
        self.rule.passed() && self.x_squared_relative_error <= 1e-12
    }
}

pub fn cmd_validate_quadrature(settings: &QuadratureSettings) -> QuadratureReport {
    let rule = QuadratureRule::degree17();
    let x_squared = local_error_h1(&XSquared, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], settings).value;
    QuadratureReport {
        rule: validate_rule(rule, 17),
        points: rule.len(),
        x_squared,
        x_squared_relative_error: ((x_squared - 1.0 / 9.0) * 9.0).abs(),
    }
}
