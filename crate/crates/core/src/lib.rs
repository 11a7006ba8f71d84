//! Solitary waves of the general Degasperis–Procesi family
//!
//! ```text
//! (u − α²ε² u_xx)_t + (c0 u + c1 u² − (c2 − c3)(ε u_x)²)_x + ε² (γ u − (c3/2) u²)_xxx = 0
//! ```
//!
//! with traveling-wave classification, profile construction, closed-form
//! peakons, a method-of-lines simulator and collision diagnostics.

pub mod diagnostics;
pub mod error;
pub mod numerics;
pub mod params;
pub mod pdesim;
pub mod peakon;
pub mod twave;

pub use error::{Error, Result};
pub use params::{classify_wave, Classification, Regime, StructuralParams};
