//! Reference distributions for the tests: Student t and F via the regularised
//! incomplete beta (statrs), and the studentized range by quadrature.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Two-tailed p-value of a Student t statistic.
pub fn t_two_tailed_p(t: f64, df: f64) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Parameter(format!("t distribution: {e}")))?;
    Ok((2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

/// Upper-tail probability of an F statistic.
pub fn f_sf(f: f64, df1: f64, df2: f64) -> Result<f64> {
    let dist = FisherSnedecor::new(df1, df2).map_err(|e| Error::Parameter(format!("F distribution: {e}")))?;
    if f <= 0.0 {
        return Ok(1.0);
    }
    Ok(dist.sf(f).clamp(0.0, 1.0))
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
        })
        .sum()
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = (a + b) / 2.0;
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f((a + b) / 2.0));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Studentized range distribution for `k` groups.
#[derive(Debug, Clone)]
pub struct StudentizedRange {
    k: usize,
    df: f64,
    rule: Vec<(f64, f64)>,
}

impl StudentizedRange {
    pub fn new(k: usize, df: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("studentized range needs k >= 2, got {k}")));
        }
        if df.is_nan() || df <= 0.0 {
            return Err(Error::Parameter(format!("degrees of freedom must be > 0, got {df}")));
        }
        Ok(StudentizedRange { k, df, rule: gauss_legendre(16) })
    }

    /// CDF of the range of `k` standard normals.
    fn normal_range_cdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let k = self.k as f64;
        let integrand = |z: f64| {
            let inner = (std_normal_cdf(z) - std_normal_cdf(z - w)).max(0.0);
            std_normal_pdf(z) * inner.powi(self.k as i32 - 1)
        };
        (k * gl_integrate(integrand, -8.5, 8.5, 17, &self.rule)).clamp(0.0, 1.0)
    }

    /// `ln` density of `s = sqrt(chi2_df / df)`.
    fn ln_scale_density(&self, s: f64) -> f64 {
        let nu = self.df;
        (nu / 2.0) * nu.ln() - ln_gamma(nu / 2.0) - (nu / 2.0 - 1.0) * 2f64.ln() + (nu - 1.0) * s.ln()
            - nu * s * s / 2.0
    }

    pub fn cdf(&self, q: f64) -> f64 {
        if q.is_nan() || q <= 0.0 {
            return 0.0;
        }
        if q.is_infinite() {
            return 1.0;
        }
        if self.df >= 1e5 {
            return self.normal_range_cdf(q);
        }
        let spread = 15.0 / (2.0 * self.df).sqrt();
        let (lo, hi) = ((1.0 - spread).max(0.0), 1.0 + spread);
        let integrand = |s: f64| {
            if s <= 0.0 {
                0.0
            } else {
                self.ln_scale_density(s).exp() * self.normal_range_cdf(q * s)
            }
        };
        let panels = 16;
        let h = (hi - lo) / panels as f64;
        let total: f64 = (0..panels)
            .map(|p| adaptive_simpson(&integrand, lo + p as f64 * h, lo + (p + 1) as f64 * h, 1e-10))
            .sum();
        total.clamp(0.0, 1.0)
    }

    pub fn sf(&self, q: f64) -> f64 {
        1.0 - self.cdf(q)
    }
}

/// CDF of the studentized range for `k` groups and `df` degrees of freedom.
pub fn ptukey(q: f64, k: usize, df: f64) -> Result<f64> {
    Ok(StudentizedRange::new(k, df)?.cdf(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_reference_p() {
        assert!((t_two_tailed_p(-1.0, 8.0).unwrap() - 0.346_593_507).abs() < 1e-8);
        assert_eq!(t_two_tailed_p(0.0, 5.0).unwrap(), 1.0);
    }

    #[test]
    fn gl_rule_integrates_polynomials() {
        let rule = gauss_legendre(16);
        let v = gl_integrate(|x| x.powi(6), 0.0, 2.0, 1, &rule);
        assert!((v - 128.0 / 7.0).abs() < 1e-10);
    }

    #[test]
    fn two_group_range_is_scaled_abs_normal() {
        // k = 2, infinite df: the range is |Z1 - Z2| ~ sqrt(2) |Z|.
        let sr = StudentizedRange::new(2, 1e9).unwrap();
        for &q in &[0.5, 1.0, 2.77, 4.0] {
            let expect = 2.0 * std_normal_cdf(q / std::f64::consts::SQRT_2) - 1.0;
            assert!((sr.cdf(q) - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn two_group_finite_df_matches_t() {
        // k = 2: q / sqrt(2) is |t| with df degrees of freedom.
        for &df in &[3.0, 7.5, 30.0] {
            let sr = StudentizedRange::new(2, df).unwrap();
            for &q in &[0.5, 2.0, 4.5] {
                let expect = 1.0 - t_two_tailed_p(q / std::f64::consts::SQRT_2, df).unwrap();
                assert!((sr.cdf(q) - expect).abs() < 1e-6, "df {df} q {q}: {} vs {expect}", sr.cdf(q));
            }
        }
    }

    #[test]
    fn cdf_shape() {
        let sr = StudentizedRange::new(4, 12.0).unwrap();
        assert_eq!(sr.cdf(0.0), 0.0);
        let mut prev = 0.0;
        for i in 1..60 {
            let v = sr.cdf(i as f64 * 0.2);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert!(prev > 0.999);
    }
}
