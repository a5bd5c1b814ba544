//! Simulation and analysis of the two-source, three-node entanglement-swapping
//! network: density-matrix model of the bilocality parameter 𝓑₁₃ and the
//! conditional CHSH value, closed forms, count-table statistics and a
//! space-like separation audit.

pub mod error;
pub mod linalg;
pub mod network;
pub mod observables;
pub mod spacetime;
pub mod states;
pub mod statistics;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, PureState};
pub use network::{
    b13, b13_closed_form, b13_from_table, chsh_closed_form, chsh_from_model, chsh_from_table,
    correlator, correlator_from_table, joint_probability, BilocalResult, ChshResult, Criterion,
    NetworkConfig, NetworkModel, OutcomeKey, ProbabilityTable, TestMode,
};
pub use observables::{BsmNoise, BsmOutcome, MeasurementSetting, SettingPair};
pub use spacetime::{audit, load_geometry, CausalityReport, Geometry, SeparationCondition};
pub use states::{BellKind, DensityMatrix, SourceNoise};
pub use statistics::{CountsTable, EstimateWithError};

/// Data files shipped with the crate.
pub mod bundled {
    use crate::error::Result;
    use crate::network::ProbabilityTable;
    use crate::spacetime::{load_geometry, Geometry};

    /// Measured `P₁₃(a, b, c | x, z)` table with its printed one-sigma errors.
    pub const MEASURED_P13_JSON: &str = include_str!("../../../data/measured_p13.json");
    /// Beeline distances, delays and elapse times of the separation audit.
    pub const SITE_GEOMETRY_JSON: &str = include_str!("../../../data/site_geometry.json");

    pub fn measured_p13() -> Result<ProbabilityTable> {
        ProbabilityTable::from_json(MEASURED_P13_JSON)
    }

    pub fn site_geometry() -> Result<Geometry> {
        load_geometry(SITE_GEOMETRY_JSON)
    }
}
