use std::fs;

use actnoise::coverage::{
    bin_divisions, infer_bounds, normalize, x_bbm, x_bin, x_nn, x_urel, StateSpaceBounds, UrelParams,
};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::args::CoverageArgs;
use crate::io::{self, finite};
use crate::manifest::RunManifest;
use crate::UsageError;

#[derive(Debug, Serialize, Deserialize)]
struct BoundsFile {
    low: Vec<f64>,
    high: Vec<f64>,
}

pub fn run(args: &CoverageArgs) -> Result<()> {
    if args.c == 0 {
        return Err(UsageError("--c must be at least 1".into()).into());
    }
    let states = io::read_states(&args.input)?;
    let out = &args.output.out;
    io::ensure_dir(out)?;
    let mut manifest = RunManifest::new("coverage", Some(args.seed), args)?;

    let bounds = match &args.bounds {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let b: BoundsFile =
                serde_json::from_str(&text).with_context(|| format!("{}: expected {{\"low\": [..], \"high\": [..]}}", path.display()))?;
            StateSpaceBounds::new(b.low, b.high)?
        }
        None => {
            let b = infer_bounds(&states)?;
            log::info!("coverage: bounds inferred from {} states", states.len());
            let file = BoundsFile { low: b.low.clone(), high: b.high.clone() };
            manifest.outputs.push(io::write_json(out, "inferred_bounds.json", &file)?);
            b
        }
    };
    let norm = normalize(&states, &bounds)?;
    if norm.clamped > 0 {
        log::warn!("coverage: {} coordinates outside the bounds were clamped", norm.clamped);
    }
    let data = &norm.data;
    let (n, d) = (data.len(), data.dim());
    let clamped = norm.clamped.to_string();

    let mut rows = vec![
        vec![
            "x_bin".into(),
            finite(x_bin(data, args.c)?, "x_bin")?,
            format!("c={};divisions={}", args.c, bin_divisions(n, args.c, d)),
            clamped.clone(),
        ],
        vec!["x_bbm".into(), finite(x_bbm(data), "x_bbm")?, String::new(), clamped.clone()],
        vec!["x_nn".into(), finite(x_nn(data)?, "x_nn")?, String::new(), clamped.clone()],
    ];
    for est in args.estimator.estimators() {
        let params = UrelParams { estimator: est, k: args.k.get(), uniform_samples: None, seed: args.seed };
        let k = params.resolved_k(n);
        manifest.resolve(&format!("{}_k", est.name()), k)?;
        let v = x_urel(data, &params, args.output.execution())?;
        rows.push(vec![
            format!("x_urel_{}", est.name()),
            finite(v, "x_urel")?,
            format!("k={k};uniform_samples={n}"),
            clamped.clone(),
        ]);
    }
    manifest.resolve("n", n)?;
    manifest.resolve("d", d)?;
    manifest.outputs.push(io::write_csv(out, "coverage.csv", &["measure", "value", "parameters", "clamped"], &rows)?);
    manifest.write(out)
}
