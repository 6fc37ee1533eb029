//! Workbench for hardware-efficient variational quantum circuits.
//!
//! The crate builds two circuit families (`C1`: alternating rotation and
//! entangler blocks, `C2`: the same plus a closing rotation block) over any
//! rotation sequence, CNOT topology and depth, and measures them:
//!
//! - [`metrics`]: expressibility (histogram KL divergence of sampled state
//!   fidelities against the Haar ensemble) and entangling capability (mean
//!   Meyer-Wallach measure).
//! - [`learn`]: parameter-shift gradients, Adam, a QGAN for discrete
//!   distributions and a variational classifier on downsampled MNIST.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below are what the CLI and most callers use.

pub mod ansatz;
pub mod cli;
pub mod data;
pub mod error;
pub mod learn;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod statevec;

pub use ansatz::{AnsatzSpec, Family, ParameterVector, RotationSequence, Topology};
pub use error::{Error, Result};
pub use metrics::{Metric, MetricEstimate, SamplingConfig};
pub use scalar::Scalar;
pub use statevec::{Axis, QubitIndex, StateVector};

pub type StateVectorF64 = statevec::StateVector<f64>;
pub type StateVectorF32 = statevec::StateVector<f32>;
pub type ParameterVectorF64 = ansatz::ParameterVector<f64>;
pub type ParameterVectorF32 = ansatz::ParameterVector<f32>;
pub type JacobianF64 = learn::Jacobian<f64>;
pub type AdamStateF64 = learn::AdamState<f64>;
pub type DiscriminatorF64 = learn::Discriminator<f64>;
pub type PreparedSampleF64 = data::PreparedSample<f64>;
