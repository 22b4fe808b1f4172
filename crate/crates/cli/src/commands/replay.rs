use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;

use crate::args::{CalibrateArgs, CoverageArgs, NoiseArgs, OutputArgs, ReplayArgs, StatsArgs, SweepArgs};
use crate::commands;
use crate::manifest::RunManifest;

fn params<T: DeserializeOwned>(m: &RunManifest) -> Result<T> {
    serde_json::from_value(m.params.clone()).with_context(|| format!("manifest parameters do not fit '{}'", m.subcommand))
}

pub fn run(args: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    if manifest.tool != env!("CARGO_PKG_NAME") {
        bail!("manifest was written by '{}', not this tool", manifest.tool);
    }
    if manifest.version != env!("CARGO_PKG_VERSION") {
        log::warn!("manifest version {} differs from {}", manifest.version, env!("CARGO_PKG_VERSION"));
    }
    let out = match &args.out {
        Some(o) => o.clone(),
        None => args.manifest.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let output = OutputArgs { out, sequential: args.sequential };
    log::info!("replaying '{}' into {}", manifest.subcommand, output.out.display());
    match manifest.subcommand.as_str() {
        "sweep" => commands::sweep::run(&SweepArgs { output, ..params(&manifest)? }),
        "coverage" => commands::coverage::run(&CoverageArgs { output, ..params(&manifest)? }),
        "calibrate" => commands::calibrate::run(&CalibrateArgs { output, ..params(&manifest)? }),
        "noise" => commands::noise::run(&NoiseArgs { output, ..params(&manifest)? }),
        "stats" => commands::stats::run(&StatsArgs { output, ..params(&manifest)? }),
        other => bail!("unknown subcommand '{other}' in manifest"),
    }
}
