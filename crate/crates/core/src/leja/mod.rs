//! Greedy Leja sequences, equal-weight quadrature and its error bounds.

pub mod bounds;
pub mod estimate;
pub mod sequence;
pub mod witness;

pub use bounds::{
    bound_quadest, discrepancy_bound, energy_bound, energy_distance, potential_discrepancy,
    quadest_bound, step_minima_range, summability_bound, BoundCheck, BoundReplay,
};
pub use estimate::{
    equal_weight_estimate, monte_carlo_estimate, monte_carlo_prefix_means, summability_estimate,
    summability_weights, EstimateReport,
};
pub use sequence::{leja_sequence, read_sequence_points, LejaSequence, StartPolicy};
pub use witness::{minres, witness_l1, Witness, DEFAULT_WITNESS_TOL};
