//! PID tuning for second-order plants.
//!
//! Gains are synthesized by dominant pole placement, mapped to an equivalent
//! LQR problem through inverse Riccati reconstruction, and refined by moving
//! the controller zeros along the fractional-order "M-curve". The two-stage
//! procedure in [`tuner`] ties these together and compares control cost and
//! effort against the single-stage design.

pub mod error;
pub mod fractional_map;
pub mod lqr_inverse;
pub mod numerics;
pub mod pole_placement;
pub mod simulate;
pub mod tuner;

pub use error::{Error, Result, Warning};
pub use fractional_map::{FractionalOrder, WZeros, WedgeClass};
pub use lqr_inverse::{RiccatiPackage, StateSpace3, Weights};
pub use numerics::{Cubic, RootTriple, Sym3};
pub use pole_placement::{ClosedLoopTarget, PidGains, Plant, PoleReport};
pub use simulate::{ResponseMetrics, ScenarioSpec, Trace};
pub use tuner::{MCurvePoint, TuneOptions, TuningReport};

pub use num_complex::Complex64;
