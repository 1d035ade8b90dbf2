use nalgebra::{DMatrix, DVector};

use super::require_positive;
use crate::error::Result;
use crate::mech::{ConstrainedSystem, MassMatrix};

/// Point mass in the plane under gravity `m g y`, constrained to `ẏ = 0`.
/// Translation in `x` is a horizontal symmetry.
#[derive(Debug, Clone)]
pub struct PlanarParticle {
    mass: MassMatrix,
    m: f64,
    gravity: f64,
}

impl PlanarParticle {
    pub fn new(m: f64, gravity: f64) -> Result<Self> {
        require_positive("mass", m)?;
        Ok(Self {
            mass: MassMatrix::new(DMatrix::identity(2, 2) * m)?,
            m,
            gravity,
        })
    }
}

impl ConstrainedSystem for PlanarParticle {
    fn dim(&self) -> usize {
        2
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn mass(&self) -> &MassMatrix {
        &self.mass
    }

    fn potential(&self, q: &DVector<f64>) -> f64 {
        self.m * self.gravity * q[1]
    }

    fn potential_gradient(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![0.0, self.m * self.gravity])
    }

    fn constraints(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, 2, &[0.0, 1.0])
    }

    fn constraints_directional(&self, _q: &DVector<f64>, _w: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(1, 2)
    }

    fn coordinate_names(&self) -> Vec<String> {
        vec!["x".into(), "y".into()]
    }
}
