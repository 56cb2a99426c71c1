use std::time::Instant;

use elasticity_core::fem::{compute_errors, Discretization, ElementPair, ManufacturedProblem, MaterialParameters};
use elasticity_core::solver::{condition_estimate, pcg_solve, PcgOptions, PreconditionerFactors};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, BenchResultT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub pair: String,
    pub level: u32,
    pub nu: f64,
    pub lambda: f64,
    pub iterations: Option<usize>,
    pub condition: Option<f64>,
    pub l2_error: Option<f64>,
    pub h1_error: Option<f64>,
    /// Assembly and factorization time shared by every cell of the level, seconds.
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub residual_history: Vec<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
}

impl BenchResult {
    pub fn cell(&self, pair: ElementPair, level: u32, nu: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.pair == pair.slug() && c.level == level && c.nu == nu)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.failure.is_some())
    }
}

fn failed_cell(pair: ElementPair, level: u32, nu: f64, lambda: f64, setup: f64, msg: String) -> CellResult {
    CellResult {
        pair: pair.slug().into(),
        level,
        nu,
        lambda,
        iterations: None,
        condition: None,
        l2_error: None,
        h1_error: None,
        setup_seconds: setup,
        solve_seconds: 0.0,
        residual_history: Vec::new(),
        failure: Some(msg),
    }
}

/// Solves the manufactured problem for every (pair, level, nu) of the config.
/// Failures are recorded in the cell and the run continues.
pub fn run_table_experiment(config: &ExperimentConfig) -> BenchResultT<BenchResult> {
    config.validate()?;
    let problem = ManufacturedProblem;
    let opts = PcgOptions::with_tol(config.tolerance);
    let mut cells = Vec::new();
    for &pair in &config.pairs {
        for &level in &config.levels {
            let start = Instant::now();
            let setup = Discretization::<f64>::new(level, pair, &problem)
                .and_then(|d| PreconditionerFactors::new(&d.reduced).map(|f| (d, f)));
            let setup_seconds = start.elapsed().as_secs_f64();
            for &nu in &config.nu_values {
                let lambda = MaterialParameters::from_poisson_ratio(nu)
                    .map_err(|e| BenchError::Config(e.to_string()))?
                    .lambda;
                let (disc, factors) = match &setup {
                    Ok(s) => s,
                    Err(e) => {
                        cells.push(failed_cell(pair, level, nu, lambda, setup_seconds, e.to_string()));
                        continue;
                    }
                };
                let start = Instant::now();
                let run = || -> elasticity_core::Result<CellResult> {
                    let m = factors.with_lambda(lambda)?;
                    let op = disc.reduced.operator(lambda)?;
                    let rhs = disc.reduced.rhs(lambda)?;
                    let (x, report) = pcg_solve(&op, &rhs, &m, &opts)?;
                    let kappa = condition_estimate(&op, &m, &rhs, &report)?;
                    let err = compute_errors(&disc.velocity, &disc.reduced.expand(&x), &problem)?;
                    Ok(CellResult {
                        pair: pair.slug().into(),
                        level,
                        nu,
                        lambda,
                        iterations: Some(report.iterations),
                        condition: Some(kappa),
                        l2_error: Some(err.l2),
                        h1_error: Some(err.h1_seminorm),
                        setup_seconds,
                        solve_seconds: 0.0,
                        residual_history: report.residual_history,
                        failure: None,
                    })
                };
                let mut cell = run().unwrap_or_else(|e| failed_cell(pair, level, nu, lambda, setup_seconds, e.to_string()));
                cell.solve_seconds = start.elapsed().as_secs_f64();
                cells.push(cell);
            }
        }
    }
    Ok(BenchResult {
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        cells,
    })
}
