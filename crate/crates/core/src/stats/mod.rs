//! Hypothesis tests, effect sizes and aggregation helpers.

mod anova;
mod dist;
mod hypothesis;

pub use anova::{anova_eta2, eta_squared, partial_eta_squared, Anova, AnovaTerm, Factor, FactorialTable};
pub use dist::{f_sf, ptukey, t_two_tailed_p, StudentizedRange};
pub use hypothesis::{
    aggregate_curve, cohen_d, cohen_d_magnitude, eta_squared_magnitude, games_howell, lag1_autocorrelation, levene_bf,
    mid_ranks, pearson, spearman, standardize_groups, welch_t, EffectMagnitude, Group, PairwiseResult, StatResult, Standardized,
};
