//! Property suites behind the `verify` and `fourier-check` subcommands.

use elasticity_core::fem::{Discretization, ElementPair, HomogeneousProblem, ManufacturedProblem, ReducedSystem};
use elasticity_core::fourier::{fourier_sweep, FourierMode, SweepSummary};
use elasticity_core::solver::{
    condition_estimate, dense_preconditioned_spectrum, measure_inf_sup, pcg_solve, verify_norm_equivalence,
    PcgOptions, PreconditionerFactors, StokesProjector, DENSE_LIMIT,
};
use elasticity_core::sparse::{factor_spd, Factorization, LinearOperator};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{BenchError, BenchResultT};

type CoreResult<T> = elasticity_core::Result<T>;

/// Residual thresholds of the Fourier sweep.
pub const FOURIER_ABS_TOL: f64 = 1e-12;
pub const FOURIER_SCALED_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct VerificationSummary {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s += &format!("[{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s += &format!("{} checks, {} failed (seed {})\n", self.checks.len(), failed, self.seed);
        s
    }

    pub fn into_result(self) -> BenchResultT<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let names: Vec<_> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            Err(BenchError::Verification(names.join(", ")))
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_mode<const D: usize>(rng: &mut ChaCha8Rng) -> FourierMode<f64, D> {
    loop {
        let xi: [f64; D] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
        if xi.iter().map(|x| x * x).sum::<f64>() >= 0.25 {
            let fhat = std::array::from_fn(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            return FourierMode { xi, fhat };
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FourierCheck {
    pub modes: usize,
    pub d2: SweepSummaryRow,
    pub d3: SweepSummaryRow,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepSummaryRow {
    pub convex_combination_abs: f64,
    pub convex_combination_scaled: f64,
    pub inverse_idempotent_scaled: f64,
    pub elasticity_scaled: f64,
    pub stokes_scaled: f64,
}

impl From<SweepSummary<f64>> for SweepSummaryRow {
    fn from(s: SweepSummary<f64>) -> Self {
        Self {
            convex_combination_abs: s.convex_combination_abs,
            convex_combination_scaled: s.convex_combination,
            inverse_idempotent_scaled: s.inverse_idempotent,
            elasticity_scaled: s.elasticity,
            stokes_scaled: s.stokes,
        }
    }
}

impl SweepSummaryRow {
    pub fn max_scaled(&self) -> f64 {
        self.convex_combination_scaled
            .max(self.inverse_idempotent_scaled)
            .max(self.elasticity_scaled)
            .max(self.stokes_scaled)
    }

    pub fn passed(&self) -> bool {
        self.convex_combination_abs <= FOURIER_ABS_TOL && self.max_scaled() <= FOURIER_SCALED_TOL
    }
}

impl FourierCheck {
    pub fn passed(&self) -> bool {
        self.d2.passed() && self.d3.passed()
    }
}

/// `modes` random modes per dimension with `lambda` log-uniform in `[0, 1e8]`
/// and `t` in `[-0.99, 1e6]`.
pub fn fourier_check(seed: u64, modes: usize) -> BenchResultT<FourierCheck> {
    fn cases<const D: usize>(rng: &mut ChaCha8Rng, modes: usize) -> Vec<(FourierMode<f64, D>, f64, f64)> {
        (0..modes)
            .map(|k| {
                let mode = random_mode::<D>(rng);
                let lambda = if k == 0 { 0.0 } else { 10f64.powf(rng.gen_range(-3.0..8.0)) };
                let t = if rng.gen_bool(0.5) {
                    rng.gen_range(-0.99..10.0)
                } else {
                    10f64.powf(rng.gen_range(1.0..6.0))
                };
                (mode, lambda, t)
            })
            .collect()
    }
    let mut r = rng(seed);
    let err = |e: elasticity_core::Error| BenchError::Verification(e.to_string());
    let d2 = fourier_sweep(cases::<2>(&mut r, modes)).map_err(err)?;
    let d3 = fourier_sweep(cases::<3>(&mut r, modes)).map_err(err)?;
    Ok(FourierCheck {
        modes,
        d2: d2.into(),
        d3: d3.into(),
    })
}

fn homogeneous(pair: ElementPair, level: u32) -> CoreResult<ReducedSystem<f64>> {
    Ok(Discretization::<f64>::new(level, pair, &HomogeneousProblem)?.reduced)
}

fn a_norm(sys: &ReducedSystem<f64>, v: &[f64]) -> f64 {
    let av = sys.a.mul_vec(v);
    v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectionCheck {
    /// `max ||P(Pv) - Pv||_A / ||v||_A`
    pub idempotency: f64,
    /// `max ||Pi_h div Pv|| / ||v||_A`
    pub divergence: f64,
}

pub fn projection_check(pair: ElementPair, level: u32, samples: usize, seed: u64) -> CoreResult<ProjectionCheck> {
    let sys = homogeneous(pair, level)?;
    let proj = StokesProjector::new(&sys.a, &sys.b)?;
    let mq = factor_spd(&sys.mq)?;
    let mut r = rng(seed);
    let mut out = ProjectionCheck {
        idempotency: 0.0,
        divergence: 0.0,
    };
    for _ in 0..samples {
        let v = random_vector(&mut r, sys.dim());
        let nv = a_norm(&sys, &v);
        let pv = proj.project(&sys.a, &v);
        let ppv = proj.project(&sys.a, &pv);
        let d: Vec<f64> = ppv.iter().zip(&pv).map(|(a, b)| a - b).collect();
        out.idempotency = out.idempotency.max(a_norm(&sys, &d) / nv);
        let bpv = sys.b.mul_vec(&pv);
        let div: f64 = bpv.iter().zip(&mq.solve(&bpv)).map(|(a, b)| a * b).sum();
        out.divergence = out.divergence.max(div.max(0.0).sqrt() / nv);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormCheck {
    pub beta_h: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl NormCheck {
    pub fn within_bounds(&self, slack: f64) -> bool {
        self.min_ratio >= self.beta_h - slack && self.max_ratio <= 2f64.sqrt() + slack
    }
}

/// Ratio `||Pi_h div v|| / ||eps(v - P v)||` over random `v`, against the measured `beta_h`.
pub fn norm_equivalence_check(pair: ElementPair, level: u32, samples: usize, seed: u64) -> CoreResult<NormCheck> {
    let sys = homogeneous(pair, level)?;
    let beta_h = measure_inf_sup(&sys.a, &sys.b, &sys.mq, DENSE_LIMIT)?.beta_h;
    let proj = StokesProjector::new(&sys.a, &sys.b)?;
    let mq = factor_spd(&sys.mq)?;
    let mut r = rng(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let v = random_vector(&mut r, sys.dim());
        let ratio = verify_norm_equivalence(&sys, &proj, &mq, &v).ratio();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(NormCheck {
        beta_h,
        min_ratio: lo,
        max_ratio: hi,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveCheck {
    pub iterations: usize,
    pub condition: f64,
}

/// PCG on the manufactured problem at a given `lambda`, with the reported condition estimate.
pub fn solve_at_lambda(disc: &Discretization<f64>, factors: &PreconditionerFactors<f64>, lambda: f64) -> CoreResult<SolveCheck> {
    let m = factors.with_lambda(lambda)?;
    let op = disc.reduced.operator(lambda)?;
    let rhs = disc.reduced.rhs(lambda)?;
    let (_, report) = pcg_solve(&op, &rhs, &m, &PcgOptions::default())?;
    Ok(SolveCheck {
        iterations: report.iterations,
        condition: condition_estimate(&op, &m, &rhs, &report)?,
    })
}

/// Condition estimates at each `lambda` on one level.
pub fn lambda_sweep(pair: ElementPair, level: u32, lambdas: &[f64]) -> CoreResult<Vec<SolveCheck>> {
    let disc = Discretization::<f64>::new(level, pair, &ManufacturedProblem)?;
    let factors = PreconditionerFactors::new(&disc.reduced)?;
    lambdas.iter().map(|&l| solve_at_lambda(&disc, &factors, l)).collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DenseCheck {
    pub estimate: f64,
    pub dense: f64,
}

impl DenseCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.estimate - self.dense).abs() / self.dense
    }
}

/// Reported condition estimate against the full dense spectrum of `M A`.
pub fn dense_cross_check(pair: ElementPair, level: u32, lambda: f64) -> CoreResult<DenseCheck> {
    let disc = Discretization::<f64>::new(level, pair, &ManufacturedProblem)?;
    let factors = PreconditionerFactors::new(&disc.reduced)?;
    let estimate = solve_at_lambda(&disc, &factors, lambda)?.condition;
    let m = factors.with_lambda(lambda)?;
    let op = disc.reduced.operator(lambda)?;
    let spec = dense_preconditioned_spectrum(&op, &m, DENSE_LIMIT)?;
    Ok(DenseCheck {
        estimate,
        dense: spec[spec.len() - 1] / spec[0],
    })
}

/// `A + lambda B^T MQ^-1 B`, the operator with the exact L2 projection in place of
/// the diagonal pressure mass.
struct ExactProjectionOperator<'a> {
    sys: &'a ReducedSystem<f64>,
    mq: Factorization<f64>,
    lambda: f64,
}

impl LinearOperator<f64> for ExactProjectionOperator<'_> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let w = self.mq.solve(&self.sys.b.mul_vec(x));
        let bt = self.sys.b.mul_transpose_vec(&w);
        self.sys.a.mul_vec_into(x, y);
        for (yi, b) in y.iter_mut().zip(bt) {
            *yi += self.lambda * b;
        }
    }
}

/// Condition estimate of `M A` when `A` uses the exact L2 pressure projection.
/// Diagnostic only: the tables use the diagonal mass.
pub fn exact_projection_condition(pair: ElementPair, level: u32, lambda: f64) -> CoreResult<f64> {
    let disc = Discretization::<f64>::new(level, pair, &ManufacturedProblem)?;
    let factors = PreconditionerFactors::new(&disc.reduced)?;
    let m = factors.with_lambda(lambda)?;
    let op = ExactProjectionOperator {
        sys: &disc.reduced,
        mq: factor_spd(&disc.reduced.mq)?,
        lambda,
    };
    let rhs = disc.reduced.rhs(lambda)?;
    let (_, report) = pcg_solve(&op, &rhs, &m, &PcgOptions::default())?;
    condition_estimate(&op, &m, &rhs, &report)
}

/// Runs every property suite; failures are collected, not raised.
pub fn run_verification_suite(seed: u64) -> VerificationSummary {
    let mut s = VerificationSummary {
        seed,
        checks: Vec::new(),
    };
    match fourier_check(seed, 1000) {
        Ok(f) => s.push(
            "fourier sweep",
            f.passed(),
            format!(
                "{} modes per dimension, convex residual {:.2e} (abs), max scaled residual {:.2e}",
                f.modes,
                f.d2.convex_combination_abs.max(f.d3.convex_combination_abs),
                f.d2.max_scaled().max(f.d3.max_scaled())
            ),
        ),
        Err(e) => s.push("fourier sweep", false, e.to_string()),
    }
    for pair in ElementPair::ALL {
        for level in [2, 3, 4] {
            match projection_check(pair, level, 20, seed) {
                Ok(p) => s.push(
                    format!("projection {pair} L={level}"),
                    p.idempotency <= 1e-10 && p.divergence <= 1e-10,
                    format!("idempotency {:.2e}, divergence {:.2e}", p.idempotency, p.divergence),
                ),
                Err(e) => s.push(format!("projection {pair} L={level}"), false, e.to_string()),
            }
        }
        for level in [2, 3] {
            match norm_equivalence_check(pair, level, 50, seed) {
                Ok(n) => s.push(
                    format!("norm equivalence {pair} L={level}"),
                    n.within_bounds(1e-8) && n.beta_h > 0.0,
                    format!("beta_h {:.4}, ratio in [{:.4}, {:.4}]", n.beta_h, n.min_ratio, n.max_ratio),
                ),
                Err(e) => s.push(format!("norm equivalence {pair} L={level}"), false, e.to_string()),
            }
        }
        match dense_cross_check(pair, 2, 2499.5) {
            Ok(d) => s.push(
                format!("dense spectrum {pair} L=2"),
                d.relative_gap() <= 0.05,
                format!("estimate {:.4}, dense {:.4}, gap {:.2}%", d.estimate, d.dense, 100.0 * d.relative_gap()),
            ),
            Err(e) => s.push(format!("dense spectrum {pair} L=2"), false, e.to_string()),
        }
        match lambda_sweep(pair, 2, &[0.0]) {
            Ok(r) => s.push(
                format!("lambda = 0 limit {pair}"),
                r[0].iterations == 1 && (r[0].condition - 1.0).abs() <= 1e-6,
                format!("{} iteration(s), condition {:.8}", r[0].iterations, r[0].condition),
            ),
            Err(e) => s.push(format!("lambda = 0 limit {pair}"), false, e.to_string()),
        }
    }
    s
}
