use std::fmt::Write;

use elasticity_core::fem::ElementPair;

use crate::config::ReportFormat;
use crate::error::BenchResultT;
use crate::experiment::{BenchResult, CellResult};

type CellText = fn(&CellResult) -> Option<String>;

/// Renders a result. Markdown and csv omit wall times so that reruns are byte-identical.
pub fn emit_report(result: &BenchResult, format: ReportFormat) -> BenchResultT<String> {
    Ok(match format {
        ReportFormat::Markdown => markdown(result),
        ReportFormat::Csv => csv(result),
        ReportFormat::Json => serde_json::to_string_pretty(result)? + "\n",
    })
}

fn markdown(result: &BenchResult) -> String {
    let cfg = &result.config;
    let mut out = String::new();
    for &pair in &cfg.pairs {
        let tables: [(&str, CellText); 2] = [
            ("Number of iterations", |c| c.iterations.map(|i| i.to_string())),
            ("Condition number of M A", |c| c.condition.map(|k| format!("{k:.2}"))),
        ];
        for (title, cell_text) in tables {
            let _ = writeln!(out, "### {title} for {}\n", pair_label(pair));
            out.push_str("| h=2^-L |");
            for nu in &cfg.nu_values {
                let _ = write!(out, " ν = {nu} |");
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(cfg.nu_values.len()));
            out.push('\n');
            for &level in &cfg.levels {
                let _ = write!(out, "| L={level} |");
                for &nu in &cfg.nu_values {
                    let text = result
                        .cell(pair, level, nu)
                        .and_then(cell_text)
                        .unwrap_or_else(|| "failed".into());
                    let _ = write!(out, " {text} |");
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    out
}

fn pair_label(pair: ElementPair) -> &'static str {
    match pair {
        ElementPair::P2P0 => "P2×P0",
        ElementPair::P2P1 => "P2×P1",
    }
}

fn csv(result: &BenchResult) -> String {
    let mut out = String::from("pair,level,nu,lambda,iterations,condition,l2_error,h1_error,status\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
    for c in &result.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.pair,
            c.level,
            c.nu,
            c.lambda,
            c.iterations.map(|i| i.to_string()).unwrap_or_default(),
            opt(c.condition),
            opt(c.l2_error),
            opt(c.h1_error),
            if c.failure.is_some() { "failed" } else { "ok" },
        );
    }
    out
}
