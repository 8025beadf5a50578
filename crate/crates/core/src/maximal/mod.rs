//! Semigroups applied to functions, maximal operators and the auxiliary kernels
//! used to compare the interval and half-line problems.

mod commutator;
mod cutoff;
mod duhamel;
mod engine;
mod local;
mod comparison;
mod timegrid;
mod uchiyama;

pub use engine::{
    apply_poisson, maximal_function, maximal_step, maximal_step_multi, required_modes, resolvable_modes,
    split_maximal, step_output_grid, KernelKind, MaximalResult, ALL_KINDS, DECAY_CUTOFF, NODES_PER_MODE,
};
pub use timegrid::{TimeGrid, DEFAULT_RATIO, DEFAULT_T_MAX, DEFAULT_T_MIN, SPLIT};
pub use cutoff::CutoffRho;
pub use duhamel::{duhamel_residuals, residual_kernel_bound, s_rule, DuhamelConfig, DuhamelResult, ResidualKernelBound, S_SPLITS};
pub use uchiyama::{
    check_uchiyama_conditions, reparametrized_time, uchiyama_kernel, UchiyamaFamily, UchiyamaGrid, UchiyamaReport,
};
pub use comparison::{compare_semigroups, ComparisonConfig, ComparisonEngine, ComparisonReport, S_START};
pub use commutator::{commutator_kernel, commutator_row_integral, commutator_terms, CommutatorTerm, RowIntegral};
pub use local::{local_tail_ratio, probe_inputs, restricted_sup_ratio, LocalRatio};
