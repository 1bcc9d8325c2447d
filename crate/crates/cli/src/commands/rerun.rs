//! `pathdim rerun`: replay the command recorded in a run manifest, writing
//! into a fresh output directory.

use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::manifest;

#[derive(clap::Args)]
pub struct Args {
    /// A run_manifest.txt produced by an earlier invocation.
    #[arg(long)]
    manifest: PathBuf,
}

pub fn run(args: &Args, out: &Path) -> anyhow::Result<()> {
    let stored = manifest::command_args_from(&args.manifest)?;
    if stored.first().map(|s| s.as_str()) == Some("rerun") {
        anyhow::bail!("refusing to replay a rerun manifest");
    }
    let exe = std::env::current_exe().context("locating the running binary")?;
    let status = std::process::Command::new(exe)
        .args(&stored)
        .arg("--out")
        .arg(out)
        .status()
        .context("spawning the replay")?;
    if !status.success() {
        std::process::exit(status.code().unwrap_or(3));
    }
    Ok(())
}
