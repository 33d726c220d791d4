//! Monte Carlo simulation of `μ`-random walks on any [`PointedAction`]
//! backend.
//!
//! [`PointedAction`]: crate::space::PointedAction

mod engine;
mod measure;
mod probes;

pub use engine::{
    chunk_rng, map_chunks, sample_endpoint, sample_path, simulate, Chunk, Observables,
    SampleRecord, WalkRun, DEFAULT_CHUNK_SIZE,
};
pub use measure::{uniform_generators, FiniteMeasure, MASS_TOLERANCE};
pub use probes::{
    chop_identity_check, gromov_deviation_probe, walking_away_probe, GromovMode, ProbeCell,
    ProbeReport, ESTIMABLE_MIN_HITS,
};
