use std::path::{Path, PathBuf};

use precursor_core::cv::GaussianState;
use precursor_core::dv::dv_initial_system;
use precursor_core::precursors::{analyze, simulate_cv_pair, simulate_dv_pair, AnalysisOptions};
use precursor_core::BoundReport;
use serde::Serialize;

use crate::config::{ModelBlock, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "PRECURSORS_THREADS";

/// Simulates both trajectories and evaluates every quantity the scenario
/// asks for, on the current rayon pool.
pub fn simulate(cfg: &ScenarioConfig) -> Result<BoundReport> {
    let opts = AnalysisOptions {
        metric: cfg.metric.into(),
        levels: cfg.hierarchy_levels.clone(),
        revival_eps: cfg.revival_eps,
        info: cfg.has_info_decomposition(),
    };
    let report = match cfg.block() {
        ModelBlock::Dv(d) => {
            let traj = simulate_dv_pair(
                &cfg.dv_params(),
                &dv_initial_system(d.alpha1)?,
                &dv_initial_system(d.alpha2)?,
                cfg.erase_correlations,
            )?;
            analyze(&traj, &opts)?
        }
        ModelBlock::Cv(c) => {
            let traj = simulate_cv_pair(
                &cfg.cv_params(),
                &GaussianState::thermal_squeezed(c.nbar1, c.r1)?,
                &GaussianState::thermal_squeezed(c.nbar2, c.r2)?,
                cfg.erase_correlations,
            )?;
            analyze(&traj, &opts)?
        }
    };
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    /// Worker threads; `None` leaves the choice to rayon.
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RunInfo {
    pub version: &'static str,
    pub threads: usize,
    pub bound_mode: &'static str,
    pub revival_count: usize,
    pub files: Vec<String>,
}

/// Everything a run wrote, as echoed in `manifest.toml`.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub scenario: ScenarioConfig,
    pub run: RunInfo,
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Manifest> {
    run_config(ScenarioConfig::from_path(path)?, opts)
}

pub fn run_config(mut cfg: ScenarioConfig, opts: &RunOptions) -> Result<Manifest> {
    if let Some(dir) = &opts.output_dir {
        cfg.output_dir = dir.clone();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    let report = pool.install(|| simulate(&cfg))?;
    let files = output::write_all(&cfg.output_dir, &report)?;
    let manifest = Manifest {
        run: RunInfo {
            version: env!("CARGO_PKG_VERSION"),
            threads: pool.current_num_threads(),
            bound_mode: report.mode.label(),
            revival_count: report.revivals.count(),
            files,
        },
        scenario: cfg,
    };
    output::write_manifest(&manifest.scenario.output_dir, &manifest)?;
    Ok(manifest)
}
