//! Simulator for parametric down-conversion interference experiments.
//!
//! Optical fields at the bench ports are sums of coherent terms and
//! stochastic vacuum phasors: every unoccupied mode carries a uniform random
//! phase per trial, and down-conversion couples the pump to the conjugated
//! vacuum of the opposite channel. Terms riding the same vacuum mode
//! interfere; terms on distinct modes average to an incoherent background.
//! That single rule reproduces induced coherence, its erasure by a
//! background crystal, vacuum overwriting by a seed laser, and the
//! visibility/distinguishability trade-off D² + V² ≤ 1 in both the lateral
//! and the higher-order-mode arrangements.
//!
//! Modules:
//! * [`modes`] — Hermite-Gaussian mode numerics (overlaps, far fields,
//!   uncertainty products),
//! * [`vacuum`] — vacuum-mode registry and per-trial phase realizations,
//! * [`field`] — field expressions, emission, splitters and ensemble rates,
//! * [`bench`] — wired element graphs and the scan driver,
//! * [`spatial`] — the reduced spatial biphoton model,
//! * [`analysis`] — visibility, distinguishability and duality reports,
//! * [`scenario`] — the five built-in experiments.

pub mod analysis;
pub mod bench;
pub mod field;
pub mod modes;
pub mod scenario;
pub mod spatial;
pub mod vacuum;

pub use analysis::{
    distinguishability, distinguishability_counts, duality_report, visibility, AnalysisError,
    DualityReport, Visibility, VisibilityMethod,
};
pub use bench::{
    build_bench, Bench, BenchDescription, BenchError, CrystalType, ElementSpec, FringeScan, Input,
    Overrides, ParamName, Polarization, PortRef, ScanBinding, ScanMode,
};
pub use field::{
    apply_phase, combine_beam_splitter, ensemble_coincidence, ensemble_rate,
    monte_carlo_coincidence, monte_carlo_rate, spdc_emit, spdc_emit_into, CrystalConfig,
    FieldError, FieldExpression, FieldTerm, MonteCarloEstimate, PhaseCarrier, SeedBeam,
};
pub use modes::{
    far_field, hermite, overlap, uncertainty_product, GridAxis, HermiteGaussMode, ModeError,
    TransverseProfile, UncertaintyProduct,
};
pub use scenario::{
    nearest_key, stimulated_visibility, NamedReport, NamedScan, ParamDefault, ParamSpec,
    ParamValue, ResultBundle, RunMode, Scenario, ScenarioError, ScenarioKind, VdTable,
};
pub use spatial::{
    calibrate_correlation_width, conditional_signal_amplitude, cone_mode_coherence,
    slit_far_field, vd_at_idler_position, BiphotonAmplitude, SlitGeometry, SpatialError,
};
pub use vacuum::{PhaseRealization, RegistryError, SealedRegistry, VacuumModeId, VacuumRegistry};
