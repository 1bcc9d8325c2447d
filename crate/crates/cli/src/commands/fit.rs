//! `pathdim fit`: power-law fit over a two-column (scale, length) CSV.

use std::path::PathBuf;

use anyhow::Context;
use pathdim_core::hausdorff::{fit_with_window, WindowPolicy};

#[derive(clap::Args)]
pub struct Args {
    /// CSV with scale and length columns (header optional).
    #[arg(long)]
    input: PathBuf,

    /// all | auto
    #[arg(long, default_value = "all")]
    policy: String,

    #[arg(long, default_value_t = 0)]
    scale_col: usize,

    #[arg(long, default_value_t = 1)]
    length_col: usize,
}

pub fn run(args: &Args) -> anyhow::Result<()> {
    let policy = match args.policy.as_str() {
        "all" => WindowPolicy::All,
        "auto" => WindowPolicy::Auto,
        other => anyhow::bail!("unknown policy {other:?} (all or auto)"),
    };
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mut points = Vec::new();
    for line in text.lines() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() <= args.scale_col.max(args.length_col) {
            continue;
        }
        let s = fields[args.scale_col].trim().parse::<f64>();
        let l = fields[args.length_col].trim().parse::<f64>();
        if let (Ok(s), Ok(l)) = (s, l) {
            points.push((s, l));
        }
        // non-numeric rows (e.g. the header) are skipped
    }
    let report = fit_with_window(&points, policy)?;
    println!("{}", report.summary_line());
    Ok(())
}
