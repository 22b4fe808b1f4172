//! Fixtures shared by the CLI integration tests and the acceptance run.
#![allow(dead_code)]

use actnoise::rng;
use rand_distr::{Distribution, StandardNormal};

/// Sums of squares of the two-factor worked example: factor y, factor x,
/// their interaction, and the residual.
pub const D1_SS: [f64; 4] = [4167.583, 91.118, 81.172, 871.798];
pub const D1_TOTAL: f64 = 5211.672;

/// A balanced 10 x 10 design with `reps` replicates whose ANOVA sums of
/// squares equal [`D1_SS`]. Rows are `(y_level, x_level, value)`.
pub fn d1_table(reps: usize, seed: u64) -> Vec<(usize, usize, f64)> {
    let levels = 10;
    let mut r = rng::seeded(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut r) };

    let center = |v: &mut Vec<f64>| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= m);
    };
    let rescale = |v: &mut [f64], weight: f64, target: f64| {
        let ss = weight * v.iter().map(|x| x * x).sum::<f64>();
        let f = (target / ss).sqrt();
        v.iter_mut().for_each(|x| *x *= f);
    };

    let mut a: Vec<f64> = (0..levels).map(|_| normal()).collect();
    center(&mut a);
    rescale(&mut a, (levels * reps) as f64, D1_SS[0]);
    let mut b: Vec<f64> = (0..levels).map(|_| normal()).collect();
    center(&mut b);
    rescale(&mut b, (levels * reps) as f64, D1_SS[1]);

    let mut c: Vec<f64> = (0..levels * levels).map(|_| normal()).collect();
    for i in 0..levels {
        let m = (0..levels).map(|j| c[i * levels + j]).sum::<f64>() / levels as f64;
        (0..levels).for_each(|j| c[i * levels + j] -= m);
    }
    for j in 0..levels {
        let m = (0..levels).map(|i| c[i * levels + j]).sum::<f64>() / levels as f64;
        (0..levels).for_each(|i| c[i * levels + j] -= m);
    }
    rescale(&mut c, reps as f64, D1_SS[2]);

    let mut e: Vec<f64> = (0..levels * levels * reps).map(|_| normal()).collect();
    for cell in e.chunks_mut(reps) {
        let m = cell.iter().sum::<f64>() / reps as f64;
        cell.iter_mut().for_each(|x| *x -= m);
    }
    rescale(&mut e, 1.0, D1_SS[3]);

    let mut rows = Vec::with_capacity(e.len());
    for i in 0..levels {
        for j in 0..levels {
            for k in 0..reps {
                let v = 50.0 + a[i] + b[j] + c[i * levels + j] + e[(i * levels + j) * reps + k];
                rows.push((i, j, v));
            }
        }
    }
    rows
}

pub fn d1_csv(reps: usize, seed: u64) -> String {
    let mut s = String::from("y,x,value\n");
    for (i, j, v) in d1_table(reps, seed) {
        s.push_str(&format!("y{i},x{j},{v:?}\n"));
    }
    s
}
