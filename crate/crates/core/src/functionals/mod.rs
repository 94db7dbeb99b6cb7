//! Besov, Korevaar-Schoen and variation functionals.

mod balls;
mod heat;
mod metric;
mod report;

pub use balls::{ball_integrals, BallIntegrals, PairBudget};
pub use heat::{
    distinct_values, heat_besov_norm, heat_besov_norms, heat_pair_integrals, layers, local_mean_q, var_star,
    var_stars, LAYER_CAKE_MAX,
};
pub use metric::{
    besov_n, besov_n_series, ks_seminorm, ks_series, local_mean_m, local_mean_m_grid, osc, variation, variations,
};
pub use report::{fmt_num, FunctionalReport};
