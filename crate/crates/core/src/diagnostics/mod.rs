//! Diagnostics of dissipative solutions: energy, entropy production, weak
//! residuals, singularity detection and the cone condition around
//! singular points.

pub mod cone;
pub mod energy;
pub mod entropy;
pub mod singularities;
pub mod weak;

pub use cone::{backward_cone_meets, verify_cone_condition, ConeReport};
pub use energy::{check_dissipation, check_energy_series, dissipation_tolerance, energy, DissipationReport, EnergyBreakdown};
pub use entropy::{entropy_residual, summarize_entropy, EntropyResidual, EntropySummary};
pub use singularities::{
    detect_singularities, verify_slopes, CharacteristicMap, DetectorConfig, FittedSegment, SingularPoint,
    SingularityKind, SlopeReport, Thresholds,
};
pub use weak::{seeded_test_bank, weak_residual, TestFunction, WeakResidual};
