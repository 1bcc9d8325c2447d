//! `pathdim exp2`: the full reconstruction and dimension pipeline, driven by
//! a flat config file.

use std::path::PathBuf;

use anyhow::Context;
use pathdim_core::exp2::{hausdorff_pipeline, AmplitudeMode, PipelineConfig, ReconstructOptions};
use pathdim_core::hausdorff::WindowPolicy;
use pathdim_core::propagator::PhysParams;

use crate::config::FlatConfig;
use crate::csvout::{quoted, sci, CsvWriter};
use crate::manifest::RunContext;

#[derive(clap::Args)]
pub struct Args {
    /// Flat `key = value` pipeline configuration.
    #[arg(long)]
    config: PathBuf,

    /// Force the planted synthetic mode regardless of the config's `mode`.
    #[arg(long)]
    synthetic: bool,

    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: &Args, mut ctx: RunContext) -> anyhow::Result<()> {
    let flat = FlatConfig::load(&args.config)?;
    let cfg = pipeline_config(&flat, args)?;

    for (k, v) in flat.entries() {
        ctx.echo(k, v);
    }
    ctx.echo("resolved_seed", cfg.seed);
    ctx.echo("resolved_mode", mode_name(&cfg.mode));

    let out = hausdorff_pipeline(&cfg)?;

    let scale_path = ctx.path_for("exp2_scale.csv");
    let mut csv = CsvWriter::create(
        &scale_path,
        &["dx", "re_L", "im_L", "abs_L", "n_classes", "residual"],
    )?;
    for r in &out.rows {
        csv.row(&[
            sci(r.dx),
            sci(r.re_l),
            sci(r.im_l),
            sci(r.abs_l),
            r.n_classes.to_string(),
            sci(r.residual),
        ])?;
    }
    csv.finish()?;

    let class_path = ctx.path_for("exp2_classes.csv");
    let mut csv = CsvWriter::create(
        &class_path,
        &["dx", "winding", "re_k", "im_k", "re_true", "im_true"],
    )?;
    for (si, row) in out.rows.iter().enumerate() {
        for (h, w) in out.classes.iter().enumerate() {
            let winding: Vec<String> = w.0.iter().map(|n| n.to_string()).collect();
            csv.row(&[
                sci(row.dx),
                quoted(&winding.join(",")),
                sci(out.recon[si].k_free[h].re),
                sci(out.recon[si].k_free[h].im),
                sci(out.truth[si].k_free[h].re),
                sci(out.truth[si].k_free[h].im),
            ])?;
        }
    }
    csv.finish()?;

    let summary = out.report.summary_line();
    let summary_path = ctx.path_for("exp2_summary.txt");
    std::fs::write(&summary_path, format!("{summary}\n"))?;
    println!("{summary}");

    ctx.finish()
}

fn mode_name(mode: &AmplitudeMode) -> &'static str {
    match mode {
        AmplitudeMode::Decay { .. } => "decay",
        AmplitudeMode::Planted { .. } => "planted",
        AmplitudeMode::SingleSolenoid { .. } => "single-solenoid",
    }
}

fn pipeline_config(flat: &FlatConfig, args: &Args) -> anyhow::Result<PipelineConfig> {
    let mut params = PhysParams::bench();
    params.mass_mu = flat.f64_or("mu", params.mass_mu)?;
    params.hbar = flat.f64_or("hbar", params.hbar)?;
    params.light_c = flat.f64_or("light_c", params.light_c)?;
    params.charge_q = flat.f64_or("charge_q", params.charge_q)?;
    params.time_t = flat.f64_or("time_T", params.time_t)?;

    let mode_key = if args.synthetic { "planted" } else { flat.str_or("mode", "planted") };
    let mode = match mode_key {
        "planted" => AmplitudeMode::Planted {
            exponent: flat.f64_or("planted_exponent", 1.0)?,
            amplitude: flat.f64_or("planted_amplitude", 40.0)?,
        },
        "decay" => AmplitudeMode::Decay { ratio: flat.f64_or("decay_ratio", 0.35)? },
        "single-solenoid" => AmplitudeMode::SingleSolenoid {
            lambda_cut: flat.f64_or("lambda_cut", 60.0)?,
        },
        other => anyhow::bail!("unknown mode {other:?} (planted, decay or single-solenoid)"),
    };

    let policy = match flat.str_or("window_policy", "all") {
        "all" => WindowPolicy::All,
        "auto" => WindowPolicy::Auto,
        other => anyhow::bail!("unknown window_policy {other:?}"),
    };

    let defaults = PipelineConfig::defaults(mode, 1);
    let n_flux_sets = match flat.get("n_flux_sets") {
        None => None,
        Some(v) => Some(v.parse::<usize>().context("config key n_flux_sets")?),
    };
    Ok(PipelineConfig {
        dx_values: flat.f64_list_or("dx_list", &defaults.dx_values)?,
        n_cutoff: flat.u32_or("n_cutoff", 1)?,
        array_nx: flat.usize_or("array_nx", 1)?,
        array_ny: flat.usize_or("array_ny", 2)?,
        nf_factor: flat.usize_or("nf_factor", 4)?,
        n_flux_sets,
        n_angles: flat.usize_or("n_angles", 1)?,
        seed: args.seed.unwrap_or(flat.u64_or("seed", 1)?),
        params,
        length_l: flat.f64_or("length_l", 4.0)?,
        mode,
        noise_sigma: flat.f64_or("noise_sigma", 0.0)?,
        opts: ReconstructOptions {
            tol: flat.f64_or("solver_tol", 1e-8)?,
            max_iters: flat.usize_or("solver_max_iters", 300)?,
            multistarts: flat.usize_or("solver_multistarts", 16)?,
        },
        window_policy: policy,
        fit_real_part: flat.bool_or("fit_real_part", false)?,
    })
}
