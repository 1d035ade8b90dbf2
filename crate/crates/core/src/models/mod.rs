//! Built-in systems. Each model implements both [`ConstrainedSystem`]
//! (full coordinates, used by GNI and the Runge–Kutta reference) and
//! [`ReducedSystem`] (shape/group split, used by RDP) where that makes sense.
//!
//! [`ConstrainedSystem`]: crate::mech::ConstrainedSystem
//! [`ReducedSystem`]: crate::rdp::ReducedSystem

mod particle;
pub mod sleigh;
pub mod snakeboard;

pub use particle::PlanarParticle;
pub use sleigh::{make_sleigh, Sleigh, SleighParams};
pub use snakeboard::{make_snakeboard, Snakeboard, SnakeboardParams};

use crate::error::{Error, Result};

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")))
    }
}
