//! Hub detection on attributed graphs by learning a polynomial graph filter
//! that separates smooth activity from sparse high-frequency hub activity.

pub mod baselines;
pub mod cli;
pub mod community;
pub mod error;
pub mod eval;
pub mod grafhub;
pub mod graph;
pub mod io;
pub mod rng;
pub mod scoring;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use grafhub::{fit, GrafhubConfig, GrafhubProblem, GrafhubResult};
pub use graph::{normalized_laplacian, Graph};
pub use scoring::{build_report, HubReport, HubScores, Selection};
pub use spectral::{FilterCoefficients, SignalMatrix, SpectralDecomposition};
pub use synth::{generate, GraphModel, SynthConfig, SynthInstance};
