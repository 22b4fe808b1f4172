//! Two-sample and multi-group tests, effect sizes and correlation.

use serde::Serialize;

use super::dist::{f_sf, t_two_tailed_p, StudentizedRange};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub label: String,
    pub values: Vec<f64>,
}

impl Group {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Group { label: label.into(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample variance (`n - 1`).
    pub fn variance(&self) -> f64 {
        variance(&self.values)
    }

    fn check(&self, min_len: usize) -> Result<()> {
        if self.values.len() < min_len {
            return Err(Error::Input(format!(
                "group '{}' needs at least {min_len} values, has {}",
                self.label,
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("group '{}' has non-finite values", self.label)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatResult {
    pub statistic: f64,
    pub df1: f64,
    pub df2: Option<f64>,
    pub p_value: f64,
    pub effect_size: Option<f64>,
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn check_labels(groups: &[Group]) -> Result<()> {
    for (i, g) in groups.iter().enumerate() {
        if groups[..i].iter().any(|h| h.label == g.label) {
            return Err(Error::Input(format!("duplicate group label '{}'", g.label)));
        }
    }
    Ok(())
}

/// Welch-Satterthwaite degrees of freedom and standard error of the mean difference.
fn welch_parts(a: &Group, b: &Group) -> (f64, f64) {
    let va = a.variance() / a.len() as f64;
    let vb = b.variance() / b.len() as f64;
    let se = (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));
    (se, df)
}

/// Welch's unequal-variance t-test, two-tailed. The effect size is Cohen's d.
pub fn welch_t(a: &Group, b: &Group) -> Result<StatResult> {
    a.check(2)?;
    b.check(2)?;
    let (se, df) = welch_parts(a, b);
    if se == 0.0 {
        return Err(Error::Degenerate("both groups have zero variance".into()));
    }
    let t = (a.mean() - b.mean()) / se;
    Ok(StatResult { statistic: t, df1: df, df2: None, p_value: t_two_tailed_p(t, df)?, effect_size: cohen_d(a, b).ok() })
}

/// Difference of means over the pooled standard deviation.
pub fn cohen_d(a: &Group, b: &Group) -> Result<f64> {
    a.check(1)?;
    b.check(1)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    if na + nb <= 2.0 {
        return Err(Error::Input("cohen_d needs more than two values in total".into()));
    }
    let ss = |g: &Group| if g.len() > 1 { (g.len() as f64 - 1.0) * g.variance() } else { 0.0 };
    let s = ((ss(a) + ss(b)) / (na + nb - 2.0)).sqrt();
    if s == 0.0 {
        return Err(Error::Degenerate("pooled standard deviation is zero".into()));
    }
    Ok((a.mean() - b.mean()) / s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectMagnitude {
    pub fn name(self) -> &'static str {
        match self {
            EffectMagnitude::Negligible => "negligible",
            EffectMagnitude::Small => "small",
            EffectMagnitude::Medium => "medium",
            EffectMagnitude::Large => "large",
        }
    }
}

fn classify(v: f64, small: f64, medium: f64, large: f64) -> EffectMagnitude {
    match v {
        v if v >= large => EffectMagnitude::Large,
        v if v >= medium => EffectMagnitude::Medium,
        v if v >= small => EffectMagnitude::Small,
        _ => EffectMagnitude::Negligible,
    }
}

/// 0.2 / 0.5 / 0.8 on `|d|`.
pub fn cohen_d_magnitude(d: f64) -> EffectMagnitude {
    classify(d.abs(), 0.2, 0.5, 0.8)
}

/// 0.01 / 0.06 / 0.14.
pub fn eta_squared_magnitude(eta2: f64) -> EffectMagnitude {
    classify(eta2, 0.01, 0.06, 0.14)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseResult {
    pub group_a: String,
    pub group_b: String,
    pub mean_diff: f64,
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    /// Both groups of the pair have zero variance; statistic, df and p are NaN.
    pub degenerate: bool,
}

/// Games-Howell pairwise comparisons over all groups.
pub fn games_howell(groups: &[Group]) -> Result<Vec<PairwiseResult>> {
    if groups.len() < 2 {
        return Err(Error::Input("games_howell needs at least two groups".into()));
    }
    check_labels(groups)?;
    for g in groups {
        g.check(2)?;
    }
    let k = groups.len();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let (a, b) = (&groups[i], &groups[j]);
            let diff = a.mean() - b.mean();
            let (se, df) = welch_parts(a, b);
            let base = PairwiseResult {
                group_a: a.label.clone(),
                group_b: b.label.clone(),
                mean_diff: diff,
                statistic: f64::NAN,
                df: f64::NAN,
                p_value: f64::NAN,
                degenerate: true,
            };
            if se == 0.0 {
                log::warn!("games_howell: pair ({}, {}) has zero variance", a.label, b.label);
                out.push(base);
                continue;
            }
            let t = diff / se;
            let p = StudentizedRange::new(k, df)?.sf(t.abs() * std::f64::consts::SQRT_2).clamp(0.0, 1.0);
            out.push(PairwiseResult { statistic: t, df, p_value: p, degenerate: false, ..base });
        }
    }
    Ok(out)
}

/// Brown-Forsythe variant of Levene's test (deviations from group medians).
pub fn levene_bf(groups: &[Group]) -> Result<StatResult> {
    if groups.len() < 2 {
        return Err(Error::Input("levene needs at least two groups".into()));
    }
    check_labels(groups)?;
    for g in groups {
        g.check(2)?;
    }
    let z: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let med = median(&g.values);
            g.values.iter().map(|y| (y - med).abs()).collect()
        })
        .collect();
    let p = groups.len() as f64;
    let n_total: usize = z.iter().map(Vec::len).sum();
    let big_n = n_total as f64;
    let group_means: Vec<f64> = z.iter().map(|zj| mean(zj)).collect();
    let grand = z.iter().flatten().sum::<f64>() / big_n;
    let between: f64 = z.iter().zip(&group_means).map(|(zj, m)| zj.len() as f64 * (m - grand).powi(2)).sum();
    let within: f64 = z.iter().zip(&group_means).map(|(zj, m)| zj.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sum();
    let (df1, df2) = (p - 1.0, big_n - p);
    if df2 <= 0.0 {
        return Err(Error::Input("levene needs more observations than groups".into()));
    }
    let f = if between == 0.0 {
        0.0
    } else if within == 0.0 {
        return Err(Error::Degenerate("absolute deviations are constant within every group".into()));
    } else {
        df2 / df1 * between / within
    };
    Ok(StatResult { statistic: f, df1, df2: Some(df2), p_value: f_sf(f, df1, df2)?, effect_size: None })
}

/// Average ranks, ties sharing the mean of their positions (1-based).
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Input("pearson needs two equally long series of at least 2 values".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation undefined for a constant series".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Input("spearman needs two equally long series of at least 3 values".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Input("spearman inputs must be finite".into()));
    }
    pearson(&mid_ranks(x), &mid_ranks(y))
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation(xs: &[f64]) -> Result<f64> {
    if xs.len() < 3 {
        return Err(Error::Input("autocorrelation needs at least 3 values".into()));
    }
    let m = mean(xs);
    let denom: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("constant series".into()));
    }
    let num: f64 = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    Ok(num / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardized {
    /// Within-group z-score per input value; `None` for members of flagged groups.
    pub z: Vec<Option<f64>>,
    /// Groups with fewer than two values or zero standard deviation.
    pub flagged: Vec<String>,
}

/// Converts each value into a z-score within its group (sample sd).
pub fn standardize_groups(values: &[f64], keys: &[String]) -> Result<Standardized> {
    if values.len() != keys.len() {
        return Err(Error::Input("one group key per value is required".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("values must be finite".into()));
    }
    let mut order: Vec<&String> = Vec::new();
    for k in keys {
        if !order.contains(&k) {
            order.push(k);
        }
    }
    let mut z = vec![None; values.len()];
    let mut flagged = Vec::new();
    for key in order {
        let members: Vec<usize> = (0..values.len()).filter(|&i| &keys[i] == key).collect();
        let vals: Vec<f64> = members.iter().map(|&i| values[i]).collect();
        let sd = if vals.len() >= 2 { variance(&vals).sqrt() } else { 0.0 };
        if sd == 0.0 {
            log::warn!("standardize: group '{key}' has zero spread and is excluded");
            flagged.push(key.clone());
            continue;
        }
        let m = mean(&vals);
        for &i in &members {
            z[i] = Some((values[i] - m) / sd);
        }
    }
    Ok(Standardized { z, flagged })
}

/// Mean over the per-segment measurements of one run: the area under its learning curve.
pub fn aggregate_curve(segment_values: &[f64]) -> Result<f64> {
    if segment_values.is_empty() {
        return Err(Error::Input("cannot aggregate an empty curve".into()));
    }
    Ok(mean(segment_values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn g(label: &str, v: &[f64]) -> Group {
        Group::new(label, v.to_vec())
    }

    #[test]
    fn welch_examples() {
        let a = g("a", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = g("b", &[2.0, 3.0, 4.0, 5.0, 6.0]);
        let r = welch_t(&a, &b).unwrap();
        assert_relative_eq!(r.statistic, -1.0, epsilon = 1e-12);
        assert_relative_eq!(r.df1, 8.0, epsilon = 1e-12);
        assert!((r.p_value - 0.3466).abs() < 5e-4);
        let s = welch_t(&b, &a).unwrap();
        assert_eq!(s.statistic, -r.statistic);
        assert_eq!(s.p_value, r.p_value);

        let same = welch_t(&a, &a.clone()).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.p_value, 1.0);

        assert!(matches!(welch_t(&g("x", &[1.0, 1.0]), &g("y", &[2.0, 2.0])), Err(Error::Degenerate(_))));
        assert!(welch_t(&g("x", &[1.0]), &b).is_err());
    }

    #[test]
    fn cohen_examples() {
        let a = g("a", &[0.0, 2.0]);
        let b = g("b", &[-1.0, 1.0]);
        // Means 1 and 0, both sd sqrt(2); pooled sd sqrt(2).
        assert_relative_eq!(cohen_d(&a, &b).unwrap(), 1.0 / 2f64.sqrt());
        let a = g("a", &[0.0, 2.0, 1.0 - 2f64.sqrt() / 2.0, 1.0 + 2f64.sqrt() / 2.0]);
        let v = a.variance();
        let a = g("a", &a.values.iter().map(|x| 1.0 + (x - 1.0) / v.sqrt()).collect::<Vec<_>>());
        let b = g("b", &a.values.iter().map(|x| x - 1.0).collect::<Vec<_>>());
        assert_relative_eq!(cohen_d(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(cohen_d(&a, &a.clone()).unwrap(), 0.0);
        assert!(matches!(cohen_d(&g("x", &[3.0, 3.0]), &g("y", &[3.0])), Err(Error::Degenerate(_))));
        assert_eq!(cohen_d_magnitude(-0.55), EffectMagnitude::Medium);
        assert_eq!(cohen_d_magnitude(0.1), EffectMagnitude::Negligible);
        assert_eq!(eta_squared_magnitude(0.8), EffectMagnitude::Large);
        assert_eq!(eta_squared_magnitude(0.07), EffectMagnitude::Medium);
    }

    #[test]
    fn levene_hand_case() {
        let r = levene_bf(&[g("a", &[1.0, 2.0, 3.0]), g("b", &[4.0, 5.0, 6.0])]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!((r.df1, r.df2), (1.0, Some(4.0)));
    }

    #[test]
    fn levene_detects_spread() {
        use crate::rng;
        use rand_distr::{Distribution, StandardNormal};
        let mut r = rng::seeded(12);
        let narrow: Vec<f64> = (0..50).map(|_| StandardNormal.sample(&mut r)).collect();
        let wide: Vec<f64> = (0..50).map(|_| 10.0 * Distribution::<f64>::sample(&StandardNormal, &mut r)).collect();
        let res = levene_bf(&[g("n", &narrow), g("w", &wide)]).unwrap();
        assert!(res.p_value < 0.01);
    }

    #[test]
    fn levene_matches_reference_value() {
        // Brown-Forsythe on these groups: F = 0.367 (df 2, 12), checked against a hand evaluation.
        let groups = [
            g("a", &[4.0, 6.0, 8.0, 5.0, 7.0]),
            g("b", &[1.0, 9.0, 5.0, 3.0, 6.0]),
            g("c", &[5.0, 5.5, 6.0, 4.0, 7.5]),
        ];
        let r = levene_bf(&groups).unwrap();
        // medians 6, 5, 5.5 -> z: {2,0,2,1,1}, {4,4,0,2,1}, {0.5,0,0.5,1.5,2}
        // zbar: 1.2, 2.2, 0.9; grand 1.4333
        let between = 5.0 * ((1.2f64 - 4.3 / 3.0).powi(2) + (2.2f64 - 4.3 / 3.0).powi(2) + (0.9f64 - 4.3 / 3.0).powi(2));
        let within = [2.0f64, 0.0, 2.0, 1.0, 1.0].iter().map(|z| (z - 1.2).powi(2)).sum::<f64>()
            + [4.0f64, 4.0, 0.0, 2.0, 1.0].iter().map(|z| (z - 2.2).powi(2)).sum::<f64>()
            + [0.5f64, 0.0, 0.5, 1.5, 2.0].iter().map(|z| (z - 0.9).powi(2)).sum::<f64>();
        assert_relative_eq!(r.statistic, 12.0 / 2.0 * between / within, epsilon = 1e-12);
    }

    #[test]
    fn games_howell_examples() {
        let a = g("a", &[1.0, 2.0, 3.0, 4.0]);
        let r = games_howell(&[a.clone(), g("b", &a.values)]).unwrap();
        assert_eq!(r[0].statistic, 0.0);
        assert_eq!(r[0].p_value, 1.0);

        let a = g("a", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = g("b", &[2.0, 3.5, 4.0, 5.0, 6.5]);
        let gh = games_howell(&[a.clone(), b.clone()]).unwrap();
        let w = welch_t(&a, &b).unwrap();
        assert_eq!(gh[0].statistic.signum(), w.statistic.signum());
        assert_relative_eq!(gh[0].statistic.abs(), w.statistic.abs(), epsilon = 1e-12);
        // For two groups the studentized range reduces to |t| exactly.
        assert!((gh[0].p_value - w.p_value).abs() < 1e-6);
    }

    #[test]
    fn games_howell_shifted_group() {
        use crate::rng;
        use rand_distr::{Distribution, StandardNormal};
        let mut r = rng::seeded(5);
        let mut draw = |shift: f64| (0..30).map(|_| shift + Distribution::<f64>::sample(&StandardNormal, &mut r)).collect::<Vec<_>>();
        let base = draw(0.0);
        let groups = [g("a", &base), g("b", &base.iter().map(|x| x + 0.001).collect::<Vec<_>>()), g("c", &draw(10.0))];
        let res = games_howell(&groups).unwrap();
        for pr in &res {
            if pr.group_b == "c" {
                assert!(pr.p_value < 0.001);
            } else {
                assert!(pr.p_value > 0.9);
            }
        }
        let deg = games_howell(&[g("x", &[1.0, 1.0]), g("y", &[2.0, 2.0]), g("z", &[1.0, 3.0])]).unwrap();
        assert!(deg[0].degenerate && deg[0].p_value.is_nan());
        assert!(!deg[1].degenerate);
        assert!(games_howell(&[g("x", &[1.0, 2.0]), g("x", &[2.0, 3.0])]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x: Vec<f64> = (1..=20).map(f64::from).collect();
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_relative_eq!(spearman(&x, &sq).unwrap(), 1.0);
        assert_relative_eq!(spearman(&x, &neg).unwrap(), -1.0);
        assert!(matches!(spearman(&x, &[1.0; 20]), Err(Error::Degenerate(_))));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert_eq!(mid_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn spearman_independent() {
        use crate::rng;
        use rand::Rng as _;
        let mut r = rng::seeded(3);
        let x: Vec<f64> = (0..10_000).map(|_| r.random()).collect();
        let y: Vec<f64> = (0..10_000).map(|_| r.random()).collect();
        assert!(spearman(&x, &y).unwrap().abs() < 0.03);
    }

    #[test]
    fn standardize_examples() {
        let keys: Vec<String> = ["a", "a", "b", "b", "b", "c"].iter().map(|s| s.to_string()).collect();
        let res = standardize_groups(&[2.0, 4.0, 1.0, 1.0, 1.0, 5.0], &keys).unwrap();
        assert_relative_eq!(res.z[0].unwrap(), -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(res.z[1].unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert!(res.z[2..].iter().all(Option::is_none));
        assert_eq!(res.flagged, vec!["b".to_string(), "c".to_string()]);
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_curve(&[3.0; 100]).unwrap(), 3.0);
        let ramp: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        assert_relative_eq!(aggregate_curve(&ramp).unwrap(), 0.5, epsilon = 1e-12);
        let mut rev = ramp.clone();
        rev.reverse();
        assert_relative_eq!(aggregate_curve(&rev).unwrap(), aggregate_curve(&ramp).unwrap(), epsilon = 1e-12);
        assert!(aggregate_curve(&[]).is_err());
    }

    proptest! {
        #[test]
        fn cohen_invariant_to_common_affine(xs in prop::collection::vec(-10.0f64..10.0, 3..20),
                                            ys in prop::collection::vec(-10.0f64..10.0, 3..20),
                                            scale in 0.01f64..100.0, shift in -100.0f64..100.0) {
            let (a, b) = (g("a", &xs), g("b", &ys));
            if let Ok(d) = cohen_d(&a, &b) {
                let t = |v: &[f64]| v.iter().map(|x| scale * x + shift).collect::<Vec<_>>();
                let d2 = cohen_d(&g("a", &t(&xs)), &g("b", &t(&ys))).unwrap();
                prop_assert!((d - d2).abs() < 1e-8 * d.abs().max(1.0));
            }
        }

        #[test]
        fn standardized_groups_are_unit(xs in prop::collection::vec(-50.0f64..50.0, 4..40),
                                        scale in 0.1f64..10.0, shift in -10.0f64..10.0) {
            let keys: Vec<String> = (0..xs.len()).map(|i| format!("g{}", i % 2)).collect();
            let res = standardize_groups(&xs, &keys).unwrap();
            let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
            let res2 = standardize_groups(&moved, &keys).unwrap();
            for grp in ["g0", "g1"] {
                let z: Vec<f64> = (0..xs.len()).filter(|&i| keys[i] == grp).filter_map(|i| res.z[i]).collect();
                if z.len() >= 2 {
                    prop_assert!(mean(&z).abs() < 1e-12);
                    prop_assert!((variance(&z).sqrt() - 1.0).abs() < 1e-12);
                }
            }
            for (a, b) in res.z.iter().zip(&res2.z) {
                if let (Some(a), Some(b)) = (a, b) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn tests_ignore_group_order(xs in prop::collection::vec(-5.0f64..5.0, 3..12),
                                    ys in prop::collection::vec(-5.0f64..5.0, 3..12),
                                    zs in prop::collection::vec(-5.0f64..5.0, 3..12)) {
            let fwd = [g("a", &xs), g("b", &ys), g("c", &zs)];
            let rev = [g("c", &zs), g("b", &ys), g("a", &xs)];
            if let (Ok(l1), Ok(l2)) = (levene_bf(&fwd), levene_bf(&rev)) {
                prop_assert!((l1.statistic - l2.statistic).abs() < 1e-9 * l1.statistic.max(1.0));
                prop_assert!((0.0..=1.0).contains(&l1.p_value));
            }
            let mut perm = xs.clone();
            perm.reverse();
            if let (Ok(l1), Ok(l2)) = (levene_bf(&fwd), levene_bf(&[g("a", &perm), g("b", &ys), g("c", &zs)])) {
                prop_assert!((l1.statistic - l2.statistic).abs() < 1e-9 * l1.statistic.max(1.0));
            }
        }
    }
}
