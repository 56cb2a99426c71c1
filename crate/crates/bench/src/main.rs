use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elasticity_bench::config::DEFAULT_LEVEL_GUARD;
use elasticity_bench::verify::fourier_check;
use elasticity_bench::{
    emit_report, parse_levels, parse_nu_values, parse_pairs, run_table_experiment, run_verification_suite,
    BenchError, ExperimentConfig, ReportFormat,
};
use elasticity_core::fem::{build_space, ElementKind};
use elasticity_core::mesh::build_uniform_mesh;

#[derive(Parser)]
#[command(name = "elasticity-bench", version, about = "Preconditioned elasticity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iteration and condition-number tables for the manufactured problem.
    Bench(BenchArgs),
    /// Random sweep of the per-mode Fourier identities.
    FourierCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        modes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection, norm-equivalence, inf-sup and spectral property suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh and degree-of-freedom counts per level.
    MeshInfo {
        #[arg(long, default_value = "1..5")]
        levels: String,
        #[arg(long, default_value_t = DEFAULT_LEVEL_GUARD)]
        max_level_guard: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// p2p0, p2p1 or all
    #[arg(long, default_value = "all")]
    pair: String,
    /// Range `2..5` or list `2,3,4`
    #[arg(long, default_value = "2..5")]
    levels: String,
    #[arg(long, default_value = "0.25,0.4,0.49,0.499,0.4999")]
    nu: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// md, csv or json
    #[arg(long, default_value = "md")]
    format: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest level allowed without an explicit override
    #[arg(long, default_value_t = DEFAULT_LEVEL_GUARD)]
    max_level_guard: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), BenchError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), BenchError> {
    let config = ExperimentConfig {
        pairs: parse_pairs(&args.pair)?,
        levels: parse_levels(&args.levels)?,
        nu_values: parse_nu_values(&args.nu)?,
        tolerance: args.tol,
        report_format: args.format.parse::<ReportFormat>()?,
        seed: args.seed,
        max_level_guard: args.max_level_guard,
    };
    let result = run_table_experiment(&config)?;
    write_output(args.out.as_ref(), &emit_report(&result, config.report_format)?)?;
    let failed: Vec<String> = result
        .failures()
        .map(|c| format!("{} L={} nu={}: {}", c.pair, c.level, c.nu, c.failure.as_deref().unwrap_or("")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(BenchError::Solver(failed.join("; ")))
    }
}

fn mesh_info(levels: &str, guard: u32, out: Option<&PathBuf>) -> Result<(), BenchError> {
    let levels = parse_levels(levels)?;
    let mut text = String::from("level  h          vertices  cells  edges  velocity_dofs  free_velocity  p0_dofs  p1_dofs\n");
    for l in levels {
        if l > guard {
            return Err(BenchError::Config(format!("level {l} above --max-level-guard {guard}")));
        }
        let mesh = std::sync::Arc::new(build_uniform_mesh::<f64>(l).map_err(|e| BenchError::Config(e.to_string()))?);
        let space = |k| build_space(mesh.clone(), k).map_err(|e| BenchError::Solver(e.to_string()));
        let v = space(ElementKind::P2Vector)?;
        text += &format!(
            "{:<6} {:<10} {:<9} {:<6} {:<6} {:<14} {:<14} {:<8} {}\n",
            l,
            mesh.h(),
            mesh.num_vertices(),
            mesh.num_cells(),
            mesh.num_edges(),
            v.dof_count(),
            v.free_dofs().len(),
            space(ElementKind::P0)?.dof_count(),
            space(ElementKind::P1)?.dof_count(),
        );
    }
    write_output(out, &text)
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Bench(args) => bench(args),
        Command::FourierCheck { seed, modes, out } => {
            let f = fourier_check(seed, modes)?;
            let mut text = String::new();
            for (d, row) in [(2, f.d2), (3, f.d3)] {
                text += &format!(
                    "d={d}: modes {}, convex combination {:.3e} (abs) {:.3e} (scaled), inverse idempotent {:.3e}, elasticity {:.3e}, stokes {:.3e}\n",
                    f.modes,
                    row.convex_combination_abs,
                    row.convex_combination_scaled,
                    row.inverse_idempotent_scaled,
                    row.elasticity_scaled,
                    row.stokes_scaled
                );
            }
            text += if f.passed() { "PASS\n" } else { "FAIL\n" };
            write_output(out.as_ref(), &text)?;
            if f.passed() {
                Ok(())
            } else {
                Err(BenchError::Verification("Fourier residuals above tolerance".into()))
            }
        }
        Command::Verify { seed, out } => {
            let summary = run_verification_suite(seed);
            write_output(out.as_ref(), &summary.render())?;
            summary.into_result().map(|_| ())
        }
        Command::MeshInfo {
            levels,
            max_level_guard,
            out,
        } => mesh_info(&levels, max_level_guard, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
