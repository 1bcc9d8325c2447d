//! `pathdim propagator`: partial-wave convergence tables for the free
//! propagator against its closed chord form.

use anyhow::Context;
use pathdim_core::propagator::{
    free_exact, free_partial_wave, to_polar, ExperimentGeometry, PhysParams,
};

use crate::config::linspace;
use crate::csvout::{sci, CsvWriter};
use crate::manifest::RunContext;

#[derive(clap::Args)]
pub struct Args {
    /// Bundled parameter set: `fig8` scans h in [0,10] and m_max in [5,15]
    /// at the dimensionless bench parameters.
    #[arg(long)]
    preset: Option<String>,

    /// Source-detector separation.
    #[arg(long = "L")]
    length_l: Option<f64>,

    /// Total flight time.
    #[arg(long = "T")]
    time_t: Option<f64>,

    /// Particle mass.
    #[arg(long)]
    mu: Option<f64>,

    #[arg(long)]
    hbar: Option<f64>,

    /// Solenoid offset for a single-point evaluation.
    #[arg(long = "h")]
    dist_h: Option<f64>,

    /// Partial-wave cutoff for a single-point evaluation.
    #[arg(long = "m-max")]
    m_max: Option<u32>,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

pub fn run(args: &Args, mut ctx: RunContext) -> anyhow::Result<()> {
    let mut params = PhysParams::bench();
    if let Some(v) = args.mu {
        params.mass_mu = v;
    }
    if let Some(v) = args.hbar {
        params.hbar = v;
    }
    if let Some(v) = args.time_t {
        params.time_t = v;
    }
    let length_l = args.length_l.unwrap_or(2.0);

    let (h_values, m_values) = match args.preset.as_deref() {
        Some("fig8") => (linspace(0.0, 10.0, 21), (5..=15).collect::<Vec<u32>>()),
        Some(other) => anyhow::bail!("unknown propagator preset {other:?} (try fig8)"),
        None => {
            let (Some(h), Some(m)) = (args.dist_h, args.m_max) else {
                eprintln!("error: provide either --preset fig8 or both --h and --m-max");
                std::process::exit(2);
            };
            (vec![h], vec![m])
        }
    };

    params.validate().context("physical parameters")?;
    ctx.echo("preset", args.preset.as_deref().unwrap_or("-"));
    ctx.echo("L", length_l);
    ctx.echo("T", params.time_t);
    ctx.echo("mu", params.mass_mu);
    ctx.echo("hbar", params.hbar);
    ctx.echo("seed", args.seed);

    let path = ctx.path_for("propagator.csv");
    let mut csv = CsvWriter::create(&path, &["h", "m_max", "re", "im", "re_exact", "im_exact"])?;
    for &h in &h_values {
        let pp = to_polar(&ExperimentGeometry { length_l, dist_h: h });
        let exact = free_exact(&params, &pp);
        for &m in &m_values {
            let pw = free_partial_wave(&params, &pp, m)?;
            csv.row(&[
                sci(h),
                m.to_string(),
                sci(pw.re),
                sci(pw.im),
                sci(exact.re),
                sci(exact.im),
            ])?;
        }
    }
    csv.finish()?;
    ctx.finish()
}
