use actnoise::noise::{noise_only_actions, ActionSpace, NoiseConfig};
use actnoise::schedule::ScheduleSpec;
use anyhow::Result;

use crate::args::NoiseArgs;
use crate::io::{self, finite};
use crate::manifest::RunManifest;
use crate::UsageError;

pub fn run(args: &NoiseArgs) -> Result<()> {
    if args.d == 0 {
        return Err(UsageError("--d must be at least 1".into()).into());
    }
    let cfg = NoiseConfig::new(args.noise.kind(), args.sigma, args.d).with_theta(args.theta).with_dt(args.dt);
    let schedule = ScheduleSpec::with_steepness(args.scheduler.into(), args.horizon, args.steepness)?;
    let steps = noise_only_actions(&cfg, &schedule, &ActionSpace::symmetric(args.d), args.horizon + 1, args.seed)?;

    let mut header = vec!["t".to_string(), "beta".to_string()];
    header.extend((0..args.d).map(|i| format!("eps_{i}")));
    header.extend((0..args.d).map(|i| format!("action_{i}")));
    let rows = steps
        .iter()
        .map(|s| {
            let mut r = vec![s.t.to_string(), finite(s.beta, "beta")?];
            for &e in s.eps.iter().chain(&s.action) {
                r.push(finite(e, "noise")?);
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;

    let out = &args.output.out;
    io::ensure_dir(out)?;
    let mut manifest = RunManifest::new("noise", Some(args.seed), args)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    manifest.outputs.push(io::write_csv(out, "noise.csv", &header, &rows)?);
    manifest.write(out)
}
