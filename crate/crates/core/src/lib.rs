//! Collision-model open quantum dynamics for qubits and Gaussian modes, with
//! the distinguishability-revival bounds built from system–environment
//! correlations and environmental state changes.
//!
//! The numerical core is generic over the scalar type ([`Real`], i.e. `f32`
//! or `f64`); the aliases at the crate root fix it to `f64`, which is what
//! every tolerance in the test suite assumes.
//!
//! Modules:
//! - [`linalg`]: dense complex/real matrices, Hermitian eigensolvers,
//!   tensor products and partial traces.
//! - [`metrics`]: trace distance, Uhlmann fidelity, Bures distance, and the
//!   closed-form Gaussian fidelity.
//! - [`dv`] / [`cv`]: the qubit and Gaussian collision models.
//! - [`precursors`]: trajectory pairs and the two sides of the bound.
//! - [`fock`]: Fock-space truncation oracle for Gaussian claims.

pub mod cv;
pub mod density;
pub mod dv;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod precursors;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// How many ancillae a chain retains after each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Window {
    /// At most this many ancillae (≥ 2); the oldest is traced out first.
    Fixed(usize),
    /// Never discard an ancilla.
    Full,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Window::Fixed(w) if w < 2 => Err(Error::InvalidParameter(format!("window ≥ 2 required, got {w}"))),
            _ => Ok(()),
        }
    }

    /// Whether a chain holding `ancillas` must drop one before appending.
    pub fn is_full(&self, ancillas: usize) -> bool {
        match *self {
            Window::Fixed(w) => ancillas >= w,
            Window::Full => false,
        }
    }

    /// Largest number of ancillae retained over a run of `steps` collisions.
    pub fn capacity(&self, steps: usize) -> usize {
        match *self {
            Window::Fixed(w) => w,
            Window::Full => steps + 1,
        }
    }
}

pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type RealMatrix = linalg::RMatrix<f64>;
pub type HermitianEig = linalg::HermitianEig<f64>;
pub type DensityMatrix = density::DensityMatrix<f64>;
pub type GaussianState = cv::GaussianState<f64>;
pub type DVParams = dv::DVParams<f64>;
pub type CVParams = cv::CVParams<f64>;
pub type DVChainState = dv::DVChainState<f64>;
pub type CVChainState = cv::CVChainState<f64>;
pub type DVTrajectory = precursors::TrajectoryPair<density::DensityMatrix<f64>>;
pub type CVTrajectory = precursors::TrajectoryPair<cv::GaussianState<f64>>;
pub type BoundReport = precursors::BoundReport<f64>;

pub type ComplexMatrix32 = linalg::CMatrix<f32>;
pub type DensityMatrix32 = density::DensityMatrix<f32>;
pub type GaussianState32 = cv::GaussianState<f32>;
