//! Bilinear sums `sum_m sum_n alpha_m K(m n^j)`, the complete sums
//! `Sigma_j(K, b, h)` that control them, and the diagonal quadruples where
//! those complete sums do not cancel.

mod diagonal;
mod scan;
mod sigma;
mod sum;

pub use diagonal::{
    all_quadruples, block_range, diagonal_set, diagonal_set_with, DiagonalSet, Quadruple,
};
pub use scan::{
    diagonal_control, nondiagonal_scan, nondiagonal_scan_with, ScanMode, ScanPlan, ScanReport,
    ScanRow,
};
pub use sigma::{fourth_moment_split, sigma_j, SigmaEngine, FOURTH_MOMENT_LIMIT, SIGMA_LIMIT};
pub use sum::{
    bilinear_sum, hypothesis_flags, theorem_bound, AlphaSpec, BilinearConfig, BilinearResult,
    HypothesisFlags, ShiftParams, BILINEAR_LIMIT,
};
