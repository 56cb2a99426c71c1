//! Release criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::Instant;

use elasticity_bench::reference::{reference_condition, reference_iterations, NU_VALUES};
use elasticity_bench::verify::{
    dense_cross_check, exact_projection_condition, fourier_check, lambda_sweep, norm_equivalence_check, projection_check,
};
use elasticity_bench::{run_table_experiment, BenchResult, ExperimentConfig};
use elasticity_core::fem::{ElementPair, MaterialParameters};

const LEVELS: [u32; 4] = [2, 3, 4, 5];

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn table(pair: ElementPair) -> (BenchResult, f64) {
    let config = ExperimentConfig {
        pairs: vec![pair],
        levels: LEVELS.to_vec(),
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let result = run_table_experiment(&config).expect("valid configuration");
    (result, start.elapsed().as_secs_f64())
}

/// Largest |measured - reference| iteration gap over the given levels.
fn iteration_gap(result: &BenchResult, pair: ElementPair, levels: &[u32]) -> (usize, String) {
    let mut worst = (0, String::new());
    for &l in levels {
        for nu in NU_VALUES {
            let got = result.cell(pair, l, nu).and_then(|c| c.iterations);
            let want = reference_iterations(pair, l, nu).unwrap();
            let gap = got.map_or(usize::MAX, |g| g.abs_diff(want));
            if gap >= worst.0 {
                worst = (gap, format!("L={l} nu={nu}: {got:?} vs {want}"));
            }
        }
    }
    worst
}

/// Largest relative condition-number deviation over the given levels.
fn condition_gap(result: &BenchResult, pair: ElementPair, levels: &[u32]) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for &l in levels {
        for nu in NU_VALUES {
            let got = result.cell(pair, l, nu).and_then(|c| c.condition);
            let want = reference_condition(pair, l, nu).unwrap();
            let gap = got.map_or(f64::INFINITY, |g| (g - want).abs() / want);
            if gap >= worst.0 {
                worst = (gap, format!("L={l} nu={nu}: {:.3} vs {want}", got.unwrap_or(f64::NAN)));
            }
        }
    }
    worst
}

fn criterion_1(p2p0: &BenchResult, seconds: f64) -> Outcome {
    let (gap, at) = iteration_gap(p2p0, ElementPair::P2P0, &LEVELS);
    outcome(
        gap <= 2 && seconds < 120.0,
        format!("max iteration gap {gap} (<= 2, worst {at}); runtime {seconds:.1} s (< 120 s)"),
    )
}

fn criterion_2(p2p0: &BenchResult) -> Outcome {
    let (gap, at) = condition_gap(p2p0, ElementPair::P2P0, &[2, 3, 4]);
    let mut dense_worst = 0.0f64;
    let mut dense_ok = true;
    for level in [2, 3] {
        for nu in NU_VALUES {
            let lambda = MaterialParameters::from_poisson_ratio(nu).unwrap().lambda;
            match dense_cross_check(ElementPair::P2P0, level, lambda) {
                Ok(d) => dense_worst = dense_worst.max(d.relative_gap()),
                Err(_) => dense_ok = false,
            }
        }
    }
    outcome(
        gap <= 0.20 && dense_ok && dense_worst <= 0.05,
        format!(
            "max condition deviation {:.1}% (<= 20%, worst {at}); dense vs estimate {:.2}% (<= 5%)",
            100.0 * gap,
            100.0 * dense_worst
        ),
    )
}

fn criterion_3(p2p1: &BenchResult) -> Outcome {
    let pair = ElementPair::P2P1;
    let (it_gap, it_at) = iteration_gap(p2p1, pair, &LEVELS);
    let (c_gap, c_at) = condition_gap(p2p1, pair, &LEVELS);
    let plateau: Vec<f64> = [3, 4, 5]
        .iter()
        .map(|&l| p2p1.cell(pair, l, 0.4999).and_then(|c| c.condition).unwrap_or(f64::NAN))
        .collect();
    let (lo, hi) = plateau.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
    let spread = (hi - lo) / lo;
    outcome(
        it_gap <= 3 && c_gap <= 0.25 && spread < 0.10,
        format!(
            "max iteration gap {it_gap} (<= 3, worst {it_at}); max condition deviation {:.1}% (<= 25%, worst {c_at}); \
             nu=0.4999 plateau L=3..5 {plateau:.3?}, spread {:.1}% (< 10%)",
            100.0 * c_gap,
            100.0 * spread
        ),
    )
}

fn criterion_4() -> Outcome {
    let lambdas = [1.0, 1e2, 1e4, 1e6];
    let mut ok = true;
    let mut detail = Vec::new();
    for pair in ElementPair::ALL {
        match lambda_sweep(pair, 3, &lambdas) {
            Ok(r) => {
                let k: Vec<f64> = r.iter().map(|s| s.condition).collect();
                let change = (k[3] - k[2]).abs() / k[2];
                ok &= change < 0.20;
                detail.push(format!("{pair} {k:.3?} (1e4 -> 1e6 change {:.2}%)", 100.0 * change));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{pair}: {e}"));
            }
        }
    }
    outcome(ok, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for pair in ElementPair::ALL {
        match lambda_sweep(pair, 3, &[0.0]) {
            Ok(r) => {
                ok &= r[0].iterations == 1 && (r[0].condition - 1.0).abs() <= 1e-6;
                detail.push(format!("{pair} lambda=0: {} it, condition {:.9}", r[0].iterations, r[0].condition));
            }
            Err(e) => {
                ok = false;
                detail.push(e.to_string());
            }
        }
    }
    match fourier_check(2024, 1000) {
        Ok(f) => {
            let convex = f.d2.convex_combination_abs.max(f.d3.convex_combination_abs);
            let inverse = f.d2.inverse_idempotent_scaled.max(f.d3.inverse_idempotent_scaled);
            ok &= convex <= 1e-12 && inverse <= 1e-12;
            detail.push(format!(
                "Fourier convex-combination residual {convex:.2e} (<= 1e-12), inverse-idempotent {inverse:.2e} (<= 1e-12, relative to 1+|t|)"
            ));
        }
        Err(e) => {
            ok = false;
            detail.push(e.to_string());
        }
    }
    outcome(ok, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let (mut idem, mut div, mut ok) = (0.0f64, 0.0f64, true);
    for pair in ElementPair::ALL {
        for level in [2, 3, 4] {
            match projection_check(pair, level, 20, 7 + level as u64) {
                Ok(p) => {
                    idem = idem.max(p.idempotency);
                    div = div.max(p.divergence);
                }
                Err(_) => ok = false,
            }
        }
    }
    outcome(
        ok && idem <= 1e-10 && div <= 1e-10,
        format!("idempotency {idem:.2e}, divergence {div:.2e} (both <= 1e-10, A-norm relative)"),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for pair in ElementPair::ALL {
        for level in [2, 3] {
            match norm_equivalence_check(pair, level, 50, 11 + level as u64) {
                Ok(n) => {
                    ok &= n.within_bounds(1e-8);
                    detail.push(format!(
                        "{pair} L={level}: [{:.4}, {:.4}] within [{:.4}, 1.4142]",
                        n.min_ratio, n.max_ratio, n.beta_h
                    ));
                }
                Err(e) => {
                    ok = false;
                    detail.push(e.to_string());
                }
            }
        }
    }
    outcome(ok, detail.join("; "))
}

fn criterion_8(results: &[(ElementPair, &BenchResult)]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for &(pair, r) in results {
        let h1 = |l: u32, nu: f64| r.cell(pair, l, nu).and_then(|c| c.h1_error).unwrap_or(f64::NAN);
        let ratio = h1(4, 0.4999) / h1(4, 0.25);
        let monotone = NU_VALUES
            .iter()
            .all(|&nu| LEVELS.windows(2).all(|w| h1(w[1], nu) < h1(w[0], nu)));
        ok &= ratio <= 2.0 && monotone;
        detail.push(format!("{pair}: H1(L=4) ratio 0.4999/0.25 = {ratio:.4} (<= 2), monotone in L: {monotone}"));
    }
    outcome(ok, detail.join("; "))
}

fn main() {
    let (p2p0, t0) = table(ElementPair::P2P0);
    let (p2p1, _) = table(ElementPair::P2P1);
    let criteria: Vec<Criterion> = vec![
        ("P2xP0 iterations vs reference", Box::new(|| criterion_1(&p2p0, t0))),
        ("P2xP0 condition numbers vs reference", Box::new(|| criterion_2(&p2p0))),
        ("P2xP1 iterations and condition numbers (diagonal mass)", Box::new(|| criterion_3(&p2p1))),
        ("lambda robustness at L=3", Box::new(criterion_4)),
        ("exact limits", Box::new(criterion_5)),
        ("projection properties", Box::new(criterion_6)),
        ("norm equivalence", Box::new(criterion_7)),
        (
            "locking-free errors",
            Box::new(|| criterion_8(&[(ElementPair::P2P0, &p2p0), (ElementPair::P2P1, &p2p1)])),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.passed);
        println!("criterion {} [{}] {name}: {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let exact: Vec<String> = [3, 4, 5]
        .iter()
        .map(|&l| match exact_projection_condition(ElementPair::P2P1, l, 2499.5) {
            Ok(k) => format!("L={l}: {k:.3}"),
            Err(e) => format!("L={l}: {e}"),
        })
        .collect();
    println!(
        "diagnostic (not a criterion): P2xP1 nu=0.4999 condition with exact L2 pressure projection {}",
        exact.join(", ")
    );
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
