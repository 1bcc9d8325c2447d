//! `pathdim pimc`: lattice Monte Carlo dimension estimate per potential.

use std::path::PathBuf;

use pathdim_core::pimc::{estimate_dh, DhConfig, PotentialSpec};
use pathdim_core::propagator::PhysParams;
use pathdim_core::specfun::hausdorff_from_exponent;

use crate::config::FlatConfig;
use crate::csvout::{sci, CsvWriter};
use crate::manifest::RunContext;
use crate::runner::RayonRunner;

#[derive(clap::Args)]
pub struct Args {
    /// free | harmonic | coulomb | velocity
    #[arg(long)]
    potential: Option<String>,

    /// `desk`: five slice widths spanning a factor 16, two chains each.
    #[arg(long)]
    preset: Option<String>,

    /// Flat config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Velocity-interaction exponent.
    #[arg(long = "alpha-v")]
    alpha_v: Option<f64>,

    #[arg(long)]
    u0: Option<f64>,

    #[arg(long)]
    omega: Option<f64>,

    #[arg(long)]
    kappa: Option<f64>,

    #[arg(long = "eps-reg")]
    eps_reg: Option<f64>,
}

pub fn run(args: &Args, mut ctx: RunContext) -> anyhow::Result<()> {
    let flat = match &args.config {
        Some(path) => FlatConfig::load(path)?,
        None => FlatConfig::default(),
    };
    if let Some(p) = &args.preset {
        if p != "desk" {
            anyhow::bail!("unknown pimc preset {p:?} (try desk)");
        }
    }

    let Some(kind) = args.potential.clone().or_else(|| flat.get("potential").map(String::from))
    else {
        eprintln!("error: --potential (or a config `potential` key) is required");
        std::process::exit(2);
    };

    let delta_values = flat.f64_list_or("delta_list", &[1.0, 0.5, 0.25, 0.125, 0.0625])?;
    let n_coarse = flat.usize_or("n", 16)?;
    let delta_max = delta_values.iter().cloned().fold(f64::MIN, f64::max);
    let time_t = flat.f64_or("time_T", n_coarse as f64 * delta_max)?;
    let seed = args.seed.unwrap_or(flat.u64_or("seed", 1)?);

    let pot = match kind.as_str() {
        "free" => PotentialSpec::Free,
        // default omega keeps omega * delta << 1 over the desk slice widths,
        // inside the scaling window of the length power law
        "harmonic" => PotentialSpec::Harmonic {
            omega: args.omega.unwrap_or(flat.f64_or("omega", 0.1)?),
        },
        "coulomb" => PotentialSpec::Coulomb {
            kappa: args.kappa.unwrap_or(flat.f64_or("kappa", 1.0)?),
            eps_reg: args
                .eps_reg
                .unwrap_or(flat.f64_or("eps_reg", delta_values.iter().cloned().fold(f64::MAX, f64::min).sqrt())?),
        },
        "velocity" => PotentialSpec::Velocity {
            u0: args.u0.unwrap_or(flat.f64_or("u0", 1.0)?),
            alpha_v: args.alpha_v.unwrap_or(flat.f64_or("alpha_v", 3.0)?),
        },
        other => anyhow::bail!("unknown potential {other:?}"),
    };

    let params = PhysParams { time_t, ..PhysParams::bench() };
    let cfg = DhConfig {
        delta_values,
        dim: flat.usize_or("dim", 1)?,
        sweeps: flat.usize_or("sweeps", 6000)?,
        therm_sweeps: flat.usize_or("therm_sweeps", 1500)?,
        measure_every: flat.usize_or("measure_every", 3)?,
        n_chains: flat.usize_or("n_chains", 2)?,
        seed,
    };

    ctx.echo("potential", &kind);
    ctx.echo("time_T", time_t);
    ctx.echo("dim", cfg.dim);
    ctx.echo("sweeps", cfg.sweeps);
    ctx.echo("therm_sweeps", cfg.therm_sweeps);
    ctx.echo("measure_every", cfg.measure_every);
    ctx.echo("n_chains", cfg.n_chains);
    ctx.echo("seed", seed);
    ctx.echo(
        "delta_list",
        cfg.delta_values.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
    );

    let out = estimate_dh(&pot, &params, &cfg, &RayonRunner)?;

    let path = ctx.path_for("pimc_scan.csv");
    let mut csv = CsvWriter::create(
        &path,
        &["delta", "mean_abs_dx", "mean_L", "stderr_L", "ratio_eq13"],
    )?;
    for r in &out.rows {
        csv.row(&[
            sci(r.delta),
            sci(r.mean_abs_dx),
            sci(r.mean_l),
            sci(r.stderr_l),
            sci(r.ratio_eq13),
        ])?;
    }
    csv.finish()?;

    let d_h = hausdorff_from_exponent(out.fit.exponent);
    let summary = format!(
        "L0={} exponent={}\u{b1}{} dH={}\u{b1}{} potential={kind}",
        sci(out.fit.amplitude),
        sci(out.fit.exponent),
        sci(out.fit.stderr_exponent),
        sci(d_h),
        sci(out.d_h_stderr),
    );
    let summary_path = ctx.path_for("pimc_summary.txt");
    std::fs::write(&summary_path, format!("{summary}\n"))?;
    println!("{summary}");

    ctx.finish()
}
