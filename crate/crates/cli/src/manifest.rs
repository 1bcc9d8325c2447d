//! Run manifests: a flat text record of the command, resolved configuration,
//! seeds and produced files, written atomically next to the outputs.
//! `pathdim rerun --manifest <file>` replays the recorded command.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;

pub const MANIFEST_NAME: &str = "run_manifest.txt";

pub struct RunContext {
    out_dir: PathBuf,
    command_args: Vec<String>,
    start_unix: u64,
    config_echo: Vec<(String, String)>,
    outputs: Vec<String>,
}

impl RunContext {
    /// `argv` is the raw argument vector after the binary name; the global
    /// --out/--jobs flags are stripped so a replay can substitute its own.
    pub fn new(out_dir: &Path, argv: &[String]) -> anyhow::Result<Self> {
        let mut command_args = Vec::new();
        let mut skip = false;
        for arg in argv {
            if skip {
                skip = false;
                continue;
            }
            if arg == "--out" || arg == "--jobs" {
                skip = true;
                continue;
            }
            if let Some(rest) = arg.strip_prefix("--out=") {
                let _ = rest;
                continue;
            }
            if arg.starts_with("--jobs=") {
                continue;
            }
            command_args.push(arg.clone());
        }
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            command_args,
            start_unix: unix_now(),
            config_echo: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn echo(&mut self, key: &str, value: impl std::fmt::Display) {
        self.config_echo.push((key.to_string(), value.to_string()));
    }

    /// Register an output file (already written) and return its full path.
    pub fn path_for(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    /// Write the manifest atomically and close out the run.
    pub fn finish(self) -> anyhow::Result<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        let mut text = String::new();
        text.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
        text.push_str(&format!("command_args = {}\n", self.command_args.join("\t")));
        text.push_str(&format!("start_unix = {}\n", self.start_unix));
        text.push_str(&format!("end_unix = {}\n", unix_now()));
        for (k, v) in &self.config_echo {
            text.push_str(&format!("cfg.{k} = {v}\n"));
        }
        for name in &self.outputs {
            text.push_str(&format!("output = {name}\n"));
        }
        let final_path = self.out_dir.join(MANIFEST_NAME);
        let tmp_path = self.out_dir.join(format!("{MANIFEST_NAME}.tmp"));
        std::fs::write(&tmp_path, text)?;
        std::fs::rename(&tmp_path, &final_path)
            .with_context(|| format!("writing {}", final_path.display()))?;
        Ok(())
    }
}

/// The replayable argument vector stored in a manifest.
pub fn command_args_from(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading manifest {}", path.display()))?;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("command_args = ") {
            return Ok(rest.split('\t').map(|s| s.to_string()).collect());
        }
    }
    anyhow::bail!("manifest {} has no command_args line", path.display());
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
