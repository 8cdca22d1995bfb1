//! Complete exponential sums `S(m, n; q)`, the normalized kernels built from
//! them, and hyper-Kloosterman sums.

mod dft;
mod kernels;
mod roots;

pub use dft::{dft_plus, dft_plus_direct, dft_plus_fast, FAST_PATH_THRESHOLD};
pub use kernels::{
    kernel_eval, kloosterman_k, s_row, s_sum, ComplexVal, ExpSumContext, KernelSpec, KernelTable,
    KernelVariant, KL3_LIMIT, ROW_LIMIT,
};
pub use roots::roots_of_unity;
