use actnoise::coverage::{default_nnr_k, DEFAULT_KNN_K};
use actnoise::synth::{default_scales, run_sweep, Family, MeasureSettings, SynthSpec};
use anyhow::Result;

use crate::args::SweepArgs;
use crate::io::{self, finite};
use crate::manifest::RunManifest;
use crate::UsageError;

pub fn run(args: &SweepArgs) -> Result<()> {
    let family = Family::from(args.family);
    let spec = SynthSpec {
        family,
        d: args.d,
        n: args.n,
        scales: args.scales.clone().unwrap_or_else(|| default_scales(15)),
        reps: args.reps,
        seed: args.seed,
    };
    spec.validate()?;
    if args.c == 0 {
        return Err(UsageError("--c must be at least 1".into()).into());
    }
    let settings = MeasureSettings { bin_min_points: args.c, knn_k: args.k.get(), nnr_k: args.k.get(), ..Default::default() };

    let mut manifest = RunManifest::new("sweep", Some(args.seed), args)?;
    manifest.resolve("scales", &spec.scales)?;
    manifest.resolve("knn_k", settings.knn_k.unwrap_or(DEFAULT_KNN_K))?;
    manifest.resolve("nnr_k", settings.nnr_k.unwrap_or_else(|| default_nnr_k(2 * args.n)))?;
    manifest.resolve("uniform_samples", args.n)?;

    log::info!("sweep: {} scales x {} reps", spec.scales.len(), spec.reps);
    let result = run_sweep(&spec, &settings, args.output.execution())?;

    let raw = result
        .raw
        .iter()
        .map(|r| {
            Ok(vec![
                family.name().to_string(),
                io::num(r.scale),
                r.rep.to_string(),
                r.measure.name().to_string(),
                finite(r.value, r.measure.name())?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = result
        .summary
        .iter()
        .map(|s| {
            Ok(vec![
                family.name().to_string(),
                io::num(s.scale),
                s.measure.name().to_string(),
                finite(s.mean, "mean")?,
                finite(s.min, "min")?,
                finite(s.max, "max")?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let out = &args.output.out;
    io::ensure_dir(out)?;
    manifest.outputs.push(io::write_csv(out, "sweep_raw.csv", &["family", "scale", "rep", "measure", "value"], &raw)?);
    manifest.outputs.push(io::write_csv(
        out,
        "sweep_summary.csv",
        &["family", "scale", "measure", "mean", "min", "max"],
        &summary,
    )?);
    manifest.write(out)
}
