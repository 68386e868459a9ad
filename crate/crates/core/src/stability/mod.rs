//! Rate constants from the stability results and empirical decay statistics.

mod counting;
mod rates;
pub mod roots;
mod statistics;

pub use counting::{counting_check, CountingReport};
pub use rates::{
    c_tilde_unbounded, epsilon_window, gamma_star_unbounded, solve_c_tilde_bounded,
    solve_gamma0_exact, window_midpoint, ExactRateCertificate, RateCertificate, Regime,
};
pub use statistics::{
    decay_statistics, mean_square_statistic, DecayStatistics, TAIL_FRACTION, VANISHING_FLOOR,
};
