//! Multiscale transforms based on even-reversible subdivision (MTER) on
//! periodic signals.
//!
//! A subdivision mask `α` refines coarse data, the even-inverse
//! `γ = 1/α_ev` decimates fine data, and the details left over vanish on
//! even indices exactly when `γ` is that inverse.

pub mod acceptance;
pub mod analysis;
pub mod config;
pub mod error;
pub mod inverse;
pub mod io;
pub mod laurent;
pub mod masks;
pub mod transform;

pub use error::{MterError, Result};
pub use inverse::{DecayCertificate, Kernel, KernelSource};
pub use laurent::{circular_convolve, subdivide, Mask, NormKind, PeriodicSignal, RationalMask};
pub use masks::{MaskFamily, PseudoSplineParams};

pub use transform::{DecimationMode, Pyramid};
