//! Strong data processing inequalities for general discrete channels, and
//! their consequences for noisy threshold networks and fault-tolerant memory.
//!
//! - [`info`]: distributions, channels, entropy, mutual information
//! - [`sdpi`]: the Bhattacharyya-coefficient contraction bound and its
//!   specializations to independent and correlated layer noise
//! - [`quadratic`]: Hessians, generalized Rayleigh quotient and the
//!   quadratic-form identity used to check the bound
//! - [`oracle`]: seeded random search for the actual contraction ratio
//! - [`network`]: noisy threshold networks, exact and sampled `I(X; Y_out)`
//! - [`reliability`]: information decay and minimum-size bounds
//! - [`memory`]: overhead and relaxation-time bounds, repetition-code simulator
//! - [`figures`]: tables behind the comparison plots
//! - [`verify`]: randomized and grid checks of the bounds

pub mod error;
pub mod figures;
pub mod format;
pub mod info;
pub mod memory;
pub mod network;
pub mod oracle;
pub mod quadratic;
pub mod reliability;
pub mod rng;
pub mod sdpi;
pub mod verify;

pub use error::{Error, Result};
pub use info::{Channel, Distribution, JointDistribution, LogBase};
