//! Poisson and heat kernels on `(0, 1)` and on the half-line, and numeric checks of
//! their size and regularity estimates.

mod estimates;
mod halfline;
mod series;

pub use estimates::{
    check_sharp_estimates, EstimateChecker, EstimateKind, EstimateReport, GridSpec, Witness, ALL_ESTIMATES, GAUSS_C,
};
pub use halfline::{
    dz_heat_kernel_halfline, half_order_heat, half_order_poisson, heat_kernel_halfline, poisson_kernel_halfline,
};
pub(crate) use halfline::{dz_heat_unchecked, heat_unchecked};
pub use series::{
    delta_l_poisson_kernel, dx_poisson_kernel_l, heat_kernel_l, heat_kernel_tilde, poisson_kernel_l,
    poisson_kernel_lsq, tail_sum, terms_for, Decay, KernelEval, SeriesKernels, SERIES_TOLERANCE, SPACING_SLACK,
    TERM_CAP,
};
