pub mod beamformer;
pub mod error;
pub mod experiment;
pub mod hermitian;
pub mod linalg;
pub mod oracle;
pub mod scenario;
pub mod socp;

pub use beamformer::{BeamformerResult, FactorQ, IterationRecord, IterationTrace, RobustParams};
pub use error::{Error, Result};
pub use experiment::{Algorithm, ExperimentConfig, ResultRow};
pub use hermitian::{CMat, HermitianMatrix, RealEmbedding};
pub use oracle::OracleReport;
pub use scenario::{AngularDensity, ArrayGeometry, DensityKind, ScenarioConfig};
pub use socp::{ConeBlock, ConeSpec, ConicProblem, ConicSolution, SolveStatus};

/// Beamforming weight vector; length N complex.
pub type BeamWeights = Vec<num_complex::Complex64>;
