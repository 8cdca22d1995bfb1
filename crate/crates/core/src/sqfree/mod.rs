//! Squarefree numbers in arithmetic progressions: Mobius sieves, the error
//! term computed two ways, the smooth cutoff and its Fourier transform, and
//! Poisson summation of the smoothed count.

mod cutoff;
mod mobius;
mod poisson;
mod progression;
mod sweep;

pub use cutoff::{cutoff_eval, cutoff_hat, decay_constant, smooth_step, DECAY_GRID, HAT_TOLERANCE};
pub use mobius::{
    fold_segments, mobius_segment, mobius_sieve, mobius_trial, mu_square_decomposition_check,
    mu_square_decomposition_failures, mu_square_sides, small_primes, squarefree_class_counts,
    MobiusTable, SEGMENT_LEN, SIEVE_LIMIT, TABLE_BUDGET,
};
pub use poisson::{s_v_direct, s_v_poisson, PoissonResult, DIRECT_BUDGET};
pub use progression::{
    count_ap, delta_ap, delta_ap_floor, error_term, error_term_decomp, error_terms_all,
    error_terms_direct, hooley_bound, rational_to_f64, ErrorRecord, Rational,
};
pub use sweep::{exponent_sweep, SweepConfig, SweepRecord, HEADLINE_THETA};
