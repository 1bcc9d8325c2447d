//! `pathdim decode`: exact winding-number decoding from a total flux.

use std::str::FromStr;

use anyhow::{bail, Context};
use pathdim_core::windings::{decode_total_flux, FluxAssignment, WindingsError};
use pathdim_core::BigRational;

#[derive(clap::Args)]
pub struct Args {
    /// Comma-separated exact rationals, one per solenoid (e.g. 97/99,101/111).
    #[arg(long, required = true)]
    fluxes: String,

    /// Total flux to decode, as an exact rational.
    #[arg(long, required = true)]
    total: String,

    /// Winding cutoff the assignment is certified for.
    #[arg(long, required = true)]
    cutoff: u32,
}

pub fn run(args: &Args) -> anyhow::Result<()> {
    let fluxes: Vec<BigRational> = args
        .fluxes
        .split(',')
        .map(|tok| {
            BigRational::from_str(tok.trim()).map_err(|e| anyhow::anyhow!("bad flux {tok:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    let total = BigRational::from_str(args.total.trim())
        .map_err(|e| anyhow::anyhow!("bad total {:?}: {e}", args.total))?;
    let fa = FluxAssignment::new(fluxes, args.cutoff).context("flux assignment")?;

    match decode_total_flux(&total, &fa) {
        Ok(w) => {
            let parts: Vec<String> = w.0.iter().map(|n| n.to_string()).collect();
            println!("{}", parts.join(","));
            Ok(())
        }
        Err(WindingsError::NotUnique(a, b)) => {
            bail!(
                "NOT_UNIQUE: windings {} and {} both reproduce the total flux",
                join(&a.0),
                join(&b.0)
            );
        }
        Err(WindingsError::NoSolution) => {
            bail!("NO_SOLUTION: no winding vector within the search box matches");
        }
        Err(e) => Err(e.into()),
    }
}

fn join(v: &[i32]) -> String {
    v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}
