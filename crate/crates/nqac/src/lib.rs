//! Mean-field analysis of nested quantum annealing correction for infinite-range p-spin models.

pub mod error;
pub mod free_energy;
pub mod gap;
pub mod metastability;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod phase;
pub mod saddle;

pub use error::{Error, Result};
pub use free_energy::{
    entropy_term, free_energy, free_energy_gradient, free_energy_hybrid, free_energy_sample,
    free_energy_with_degeneracy, log_2cosh,
};
pub use gap::{
    gap_exponent_fit, instanton_overlap, instanton_overlap_at_transition, spinwave_closed_form,
    spinwave_spectrum, GapEstimate, SpinWaveSpectrum,
};
pub use metastability::{
    af_metastable_branch, af_metastable_exists, af_occupancy, fm_ceiling, fm_level_free_energy,
    fm_log_degeneracy, fm_metastable_exists, fm_mixed_solution, fm_occupancy, trace_region,
    MetastabilityRegion, MetastableSide, OccupancySpectrum, RegionAxis, StateFamily,
};
pub use oracle::{
    classical_spectrum, decode, diagonal, encode, quantum_gap, EncodedInstance, HamiltonianForm,
    SpectrumResult, Subspace,
};
pub use params::{
    af_three_sector_fractions, ln_binomial, scale_params, Coupling, DegeneracyTerm,
    FreeEnergySample, ModelParams, ScalingConvention, Sector, SectorConfig,
};
pub use phase::{
    barrier_metrics, classify_transition, critical_line_p2, degenerate_minima, gamma_c2,
    hybrid_critical_line, lambda_critical, lambda_critical_end, locate_gamma_c1,
    taylor_coefficients, Barrier, CriticalAxis, CriticalPoint, TaylorCoefficients, TaylorMethod,
    TransitionOrder, TransitionReport,
};
pub use saddle::{
    global_minimum, solve_sectored, solve_sectored_from, solve_symmetric, SaddleSolution,
    SectoredSolve, SolverSettings, Stability,
};
