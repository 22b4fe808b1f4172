use actnoise::mcar::{calibrate, CalibrationOptions};
use actnoise::noise::NoiseConfig;
use anyhow::Result;

use crate::args::CalibrateArgs;
use crate::io::{self, finite};
use crate::manifest::RunManifest;
use crate::UsageError;

pub fn run(args: &CalibrateArgs) -> Result<()> {
    if args.sigma.is_empty() {
        return Err(UsageError("--sigma needs at least one value".into()).into());
    }
    let opts = CalibrationOptions { reset_noise_each_episode: args.reset_noise_each_episode, ..Default::default() };
    let mut manifest = RunManifest::new("calibrate", Some(args.seed), args)?;
    manifest.resolve("protocol", opts)?;

    let mut rows = Vec::new();
    let mut detail = Vec::new();
    for &sigma in &args.sigma {
        let cfg = NoiseConfig::new(args.noise.kind(), sigma, 1).with_theta(args.theta).with_dt(args.dt);
        log::info!("calibrate: {} sigma={sigma}, {} episodes", args.noise.label(), args.episodes);
        let c = calibrate(&cfg, args.episodes, args.seed, &opts, args.output.execution())?;
        rows.push(vec![
            args.noise.label().to_string(),
            io::num(sigma),
            c.episodes.to_string(),
            finite(c.mean_return, "mean return")?,
            finite(c.sd_episode, "sd")?,
            finite(c.goal_rate, "goal rate")?,
        ]);
        detail.push(vec![
            args.noise.label().to_string(),
            io::num(sigma),
            c.episodes.to_string(),
            c.blocks.to_string(),
            io::opt_num(Some(c.sd_block)),
            finite(c.se_mean, "standard error")?,
        ]);
    }
    let out = &args.output.out;
    io::ensure_dir(out)?;
    manifest.outputs.push(io::write_csv(
        out,
        "calibrate.csv",
        &["noise_type", "sigma", "episodes", "mean_return", "sd_episode", "goal_rate"],
        &rows,
    )?);
    manifest.outputs.push(io::write_csv(
        out,
        "calibrate_detail.csv",
        &["noise_type", "sigma", "episodes", "blocks", "sd_block", "se_mean"],
        &detail,
    )?);
    manifest.write(out)
}
