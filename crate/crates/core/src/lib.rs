//! Dense high-order tensor algebra and recovery algorithms.
//!
//! The crate is organized around a column-major [`DenseTensor`] and provides:
//!
//! - [`tensor`]: permutation, generalized unfolding/folding, mode products and
//!   circulant mode-wise gradients;
//! - [`fctn`]: fully-connected tensor-network contraction and the unfolding
//!   rank bound implied by the bond sizes;
//! - [`sketch`]: random sketching matrix families (Gaussian, uniform,
//!   Khatri-Rao, Kronecker-SRFT);
//! - [`rcompress`]: fixed-rank and fixed-accuracy randomized Tucker
//!   compression plus a deterministic STHOSVD baseline;
//! - [`prox`]: nonconvex scalar proximal operators and generalized
//!   singular-value thresholding (exact and randomized);
//! - [`regularizer`]: the gradient-domain spectral regularizer evaluated over
//!   balanced unfoldings;
//! - [`degrade`]: observation synthesis (masks, impulsive/Gaussian noise,
//!   dithered uniform quantization);
//! - [`solvers`]: ADMM solvers for completion, robust completion, and their
//!   quantized counterparts;
//! - [`metrics`]: PSNR/SSIM/RSE quality metrics.
//!
//! All randomized components are deterministic for a fixed seed.

pub mod degrade;
pub mod fctn;
pub mod fft;
mod linalg;
pub mod metrics;
pub mod par;
pub mod prox;
pub mod rcompress;
pub mod regularizer;
pub mod rng;
pub mod sketch;
pub mod solvers;
pub mod tensor;

pub use degrade::Observation;
pub use fctn::FctnFactors;
pub use metrics::MetricReport;
pub use prox::Penalty;
pub use rcompress::{FixedAccuracyConfig, FixedRankConfig, TuckerApprox};
pub use regularizer::GntctvSpec;
pub use sketch::{SketchFamily, SketchSpec};
pub use solvers::{NoiseStructure, SolverConfig, SolverReport, SvdBackend};
pub use tensor::{DenseTensor, Permutation, TensorError};
