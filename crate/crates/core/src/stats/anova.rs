//! Balanced N-way ANOVA with eta-squared effect sizes.

use serde::Serialize;

use super::dist::f_sf;
use crate::error::{Error, Result};

const MAX_FACTORS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub name: String,
    pub levels: Vec<String>,
}

/// Observations indexed by one level per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialTable {
    factors: Vec<Factor>,
    cells: Vec<usize>,
    values: Vec<f64>,
}

impl FactorialTable {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(Error::Design(format!("between 1 and {MAX_FACTORS} factors are supported")));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.levels.len() < 2 {
                return Err(Error::Design(format!("factor '{}' needs at least two levels", f.name)));
            }
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Design(format!("duplicate factor '{}'", f.name)));
            }
            for (j, l) in f.levels.iter().enumerate() {
                if f.levels[..j].contains(l) {
                    return Err(Error::Design(format!("duplicate level '{l}' in factor '{}'", f.name)));
                }
            }
        }
        Ok(FactorialTable { factors, cells: Vec::new(), values: Vec::new() })
    }

    /// Builds a table from string level labels, ordering levels by first appearance.
    pub fn from_labels(names: &[String], rows: &[(Vec<String>, f64)]) -> Result<Self> {
        let mut levels: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for (labels, _) in rows {
            if labels.len() != names.len() {
                return Err(Error::Input(format!("expected {} factor labels per row", names.len())));
            }
            for (lv, l) in levels.iter_mut().zip(labels) {
                if !lv.contains(l) {
                    lv.push(l.clone());
                }
            }
        }
        let factors = names.iter().zip(levels).map(|(n, levels)| Factor { name: n.clone(), levels }).collect();
        let mut table = FactorialTable::new(factors)?;
        for (labels, v) in rows {
            let idx: Vec<usize> = labels
                .iter()
                .zip(&table.factors)
                .map(|(l, f)| f.levels.iter().position(|x| x == l).expect("level collected above"))
                .collect();
            table.push(&idx, *v)?;
        }
        Ok(table)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn push(&mut self, levels: &[usize], value: f64) -> Result<()> {
        if levels.len() != self.factors.len() {
            return Err(Error::Input(format!("expected {} level indices", self.factors.len())));
        }
        if !value.is_finite() {
            return Err(Error::Input("observations must be finite".into()));
        }
        let mut cell = 0;
        for (&l, f) in levels.iter().zip(&self.factors) {
            if l >= f.levels.len() {
                return Err(Error::Input(format!("level index {l} out of range for factor '{}'", f.name)));
            }
            cell = cell * f.levels.len() + l;
        }
        self.cells.push(cell);
        self.values.push(value);
        Ok(())
    }

    fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.levels.len()).collect()
    }

    /// Replicates per cell; errors unless every cell has the same positive count.
    pub fn replicates(&self) -> Result<usize> {
        let n_cells: usize = self.sizes().iter().product();
        let mut counts = vec![0usize; n_cells];
        for &c in &self.cells {
            counts[c] += 1;
        }
        let r = counts[0];
        if r == 0 || counts.iter().any(|&c| c != r) {
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            return Err(Error::Design(format!("unbalanced design: cell counts range from {lo} to {hi}")));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTerm {
    /// Factor names joined by ':'.
    pub name: String,
    pub factors: Vec<String>,
    pub df: f64,
    pub sum_sq: f64,
    pub f: Option<f64>,
    pub p_value: Option<f64>,
    pub eta_sq: f64,
    pub partial_eta_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anova {
    /// Main effects first, then interactions by increasing order.
    pub terms: Vec<AnovaTerm>,
    pub residual_df: f64,
    pub residual_sum_sq: f64,
    pub total_sum_sq: f64,
}

impl Anova {
    pub fn term(&self, name: &str) -> Option<&AnovaTerm> {
        self.terms.iter().find(|t| t.name == name)
    }
}

pub fn eta_squared(ss_effect: f64, ss_total: f64) -> f64 {
    if ss_total > 0.0 {
        ss_effect / ss_total
    } else {
        0.0
    }
}

pub fn partial_eta_squared(ss_effect: f64, ss_residual: f64) -> f64 {
    let denom = ss_effect + ss_residual;
    if denom > 0.0 {
        ss_effect / denom
    } else {
        0.0
    }
}

/// Mixed-radix index of `cell` projected onto the factors in `mask`.
fn project(mut cell: usize, sizes: &[usize], mask: usize) -> usize {
    let mut digits = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        digits[i] = cell % sizes[i];
        cell /= sizes[i];
    }
    let mut out = 0;
    for i in 0..sizes.len() {
        if mask & (1 << i) != 0 {
            out = out * sizes[i] + digits[i];
        }
    }
    out
}

fn marginal_len(sizes: &[usize], mask: usize) -> usize {
    (0..sizes.len()).filter(|i| mask & (1 << i) != 0).map(|i| sizes[i]).product()
}

/// Full-factorial ANOVA on a balanced table.
pub fn anova_eta2(table: &FactorialTable) -> Result<Anova> {
    let r = table.replicates()?;
    let sizes = table.sizes();
    let nf = sizes.len();
    let n_cells: usize = sizes.iter().product();
    let n = table.len() as f64;

    let mut cell_mean = vec![0.0; n_cells];
    for (&c, &v) in table.cells.iter().zip(&table.values) {
        cell_mean[c] += v;
    }
    for m in &mut cell_mean {
        *m /= r as f64;
    }

    // Marginal means for every subset of factors, indexed by bitmask.
    let n_masks = 1usize << nf;
    let mut marginal: Vec<Vec<f64>> = Vec::with_capacity(n_masks);
    for mask in 0..n_masks {
        let len = marginal_len(&sizes, mask);
        let mut m = vec![0.0; len];
        for (c, &cm) in cell_mean.iter().enumerate() {
            m[project(c, &sizes, mask)] += cm;
        }
        let per = (n_cells / len) as f64;
        m.iter_mut().for_each(|x| *x /= per);
        marginal.push(m);
    }

    let grand = marginal[0][0];
    let total_ss: f64 = table.values.iter().map(|v| (v - grand).powi(2)).sum();
    let residual_ss: f64 = table.cells.iter().zip(&table.values).map(|(&c, v)| (v - cell_mean[c]).powi(2)).sum();
    let residual_df = n - n_cells as f64;

    let mut masks: Vec<usize> = (1..n_masks).collect();
    masks.sort_by_key(|&m| (m.count_ones(), (0..nf).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>()));

    let mut terms = Vec::with_capacity(masks.len());
    for mask in masks {
        let len = marginal_len(&sizes, mask);
        let mut effect = vec![0.0; len];
        // Inclusion-exclusion over sub-masks.
        let mut sub = mask;
        loop {
            let sign = if (mask.count_ones() - sub.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            for (c, e) in effect.iter_mut().enumerate() {
                let cell = expand(c, &sizes, mask);
                *e += sign * marginal[sub][project(cell, &sizes, sub)];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        let ss = (n / len as f64) * effect.iter().map(|e| e * e).sum::<f64>();
        let df: f64 = (0..nf).filter(|i| mask & (1 << i) != 0).map(|i| (sizes[i] - 1) as f64).product();
        let (f, p) = if residual_df > 0.0 && residual_ss > 0.0 {
            let f = (ss / df) / (residual_ss / residual_df);
            (Some(f), Some(f_sf(f, df, residual_df)?))
        } else {
            (None, None)
        };
        let names: Vec<String> =
            (0..nf).filter(|i| mask & (1 << i) != 0).map(|i| table.factors[i].name.clone()).collect();
        terms.push(AnovaTerm {
            name: names.join(":"),
            factors: names,
            df,
            sum_sq: ss,
            f,
            p_value: p,
            eta_sq: eta_squared(ss, total_ss),
            partial_eta_sq: partial_eta_squared(ss, residual_ss),
        });
    }
    Ok(Anova { terms, residual_df, residual_sum_sq: residual_ss, total_sum_sq: total_ss })
}

/// A full cell index whose digits on `mask` come from marginal index `c` and are zero elsewhere.
fn expand(mut c: usize, sizes: &[usize], mask: usize) -> usize {
    let mut digits = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        if mask & (1 << i) != 0 {
            digits[i] = c % sizes[i];
            c /= sizes[i];
        }
    }
    digits.iter().zip(sizes).fold(0, |acc, (d, s)| acc * s + d)
}
