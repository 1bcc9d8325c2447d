//! `pathdim exp1`: dense (h, alpha) scans of the flux propagator against the
//! semi-classical one.

use pathdim_core::exp1::{eval_point, ScanGrid, ScanRow};
use pathdim_core::propagator::PhysParams;
use rayon::prelude::*;

use crate::config::linspace;
use crate::csvout::{sci, CsvWriter};
use crate::manifest::RunContext;

#[derive(clap::Args)]
pub struct Args {
    /// Bundled scans: `fig9`/`fig10` (dimensionless bench set, raw values)
    /// or `fig13` (electron-scale set, normalized by the common prefactor).
    #[arg(long)]
    preset: Option<String>,

    /// Alpha range as MIN MAX (density from --alpha-steps).
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    alpha: Option<Vec<f64>>,

    /// Offset range as MIN MAX (density from --h-steps).
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    h: Option<Vec<f64>>,

    #[arg(long, default_value_t = 61)]
    alpha_steps: usize,

    #[arg(long, default_value_t = 41)]
    h_steps: usize,

    #[arg(long = "m-max", default_value_t = 50)]
    m_max: u32,

    /// Divide both propagators by mu / (2 pi i hbar T).
    #[arg(long)]
    normalize: bool,

    #[arg(long = "L")]
    length_l: Option<f64>,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

pub fn run(args: &Args, mut ctx: RunContext) -> anyhow::Result<()> {
    let grid = resolve_grid(args)?;
    grid.validate()?;

    ctx.echo("preset", args.preset.as_deref().unwrap_or("-"));
    ctx.echo("h_min", grid.h_values.first().unwrap());
    ctx.echo("h_max", grid.h_values.last().unwrap());
    ctx.echo("h_steps", grid.h_values.len());
    ctx.echo("alpha_min", grid.alpha_values.first().unwrap());
    ctx.echo("alpha_max", grid.alpha_values.last().unwrap());
    ctx.echo("alpha_steps", grid.alpha_values.len());
    ctx.echo("m_max", grid.m_max);
    ctx.echo("normalize", grid.normalize);
    ctx.echo("L", grid.length_l);
    ctx.echo("T", grid.params.time_t);
    ctx.echo("mu", grid.params.mass_mu);
    ctx.echo("seed", args.seed);

    // grid points are independent; order is fixed by the (h, alpha) index
    let points: Vec<(f64, f64)> = grid
        .h_values
        .iter()
        .flat_map(|&h| grid.alpha_values.iter().map(move |&a| (h, a)))
        .collect();
    let rows: Result<Vec<ScanRow>, _> =
        points.par_iter().map(|&(h, a)| eval_point(&grid, h, a)).collect();
    let rows = rows?;

    let path = ctx.path_for("exp1_scan.csv");
    let mut csv = CsvWriter::create(
        &path,
        &[
            "h",
            "alpha",
            "re_ab",
            "im_ab",
            "re_semi",
            "im_semi",
            "abs_re_diff",
            "abs_im_diff",
            "quantum_region",
        ],
    )?;
    for r in &rows {
        csv.row(&[
            sci(r.h),
            sci(r.alpha),
            sci(r.re_ab),
            sci(r.im_ab),
            sci(r.re_semi),
            sci(r.im_semi),
            sci(r.abs_re_diff),
            sci(r.abs_im_diff),
            if r.quantum_region { "1" } else { "0" }.to_string(),
        ])?;
    }
    csv.finish()?;
    ctx.finish()
}

fn resolve_grid(args: &Args) -> anyhow::Result<ScanGrid> {
    let base = match args.preset.as_deref() {
        Some("fig9") | Some("fig10") => ScanGrid {
            h_values: linspace(0.0, 10.0, 41),
            alpha_values: linspace(0.0, 3.0, 61),
            params: PhysParams::bench(),
            length_l: 2.0,
            m_max: 50,
            normalize: false,
        },
        Some("fig13") => ScanGrid {
            h_values: linspace(5.0e9, 5.0e11, 41),
            alpha_values: linspace(0.0, 3.0, 61),
            params: PhysParams::electron_fm(),
            length_l: 2.0e13,
            m_max: 50,
            normalize: true,
        },
        Some(other) => anyhow::bail!("unknown exp1 preset {other:?} (try fig9, fig10 or fig13)"),
        None => ScanGrid {
            h_values: linspace(0.0, 10.0, args.h_steps),
            alpha_values: linspace(0.0, 3.0, args.alpha_steps),
            params: PhysParams::bench(),
            length_l: 2.0,
            m_max: args.m_max,
            normalize: args.normalize,
        },
    };

    let mut grid = base;
    if let Some(r) = &args.alpha {
        grid.alpha_values = linspace(r[0], r[1], args.alpha_steps);
    }
    if let Some(r) = &args.h {
        grid.h_values = linspace(r[0], r[1], args.h_steps);
    }
    if let Some(l) = args.length_l {
        grid.length_l = l;
    }
    Ok(grid)
}
