//! The snakeboard: a board with a rotor (angle ψ) and coupled steerable
//! wheel axles (angle φ) at distance `l` from its center.
//!
//! Coordinates are `q = (ψ, φ, θ, x, y)` with shape `r = (ψ, φ)` and group
//! element `g = (θ, x, y)`. The constraint one-forms degenerate at `φ = 0`
//! and `φ = ±π/2`; the generic projector reports a singular constraint there.

use nalgebra::{DMatrix, DVector};

use super::require_positive;
use crate::error::{Error, Result};
use crate::mech::{ConstrainedSystem, MassMatrix};
use crate::rdp::ReducedSystem;
use crate::se2::AlgebraVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnakeboardParams {
    pub mass: f64,
    /// Distance from the board center to each wheel axle.
    pub half_length: f64,
    /// Board inertia.
    pub inertia: f64,
    /// Wheel-axle inertia.
    pub rotor_inertia: f64,
}

impl Default for SnakeboardParams {
    fn default() -> Self {
        Self {
            mass: 6.0,
            half_length: 1.0,
            inertia: 4.0,
            rotor_inertia: 1.0,
        }
    }
}

impl SnakeboardParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("snakeboard mass m", self.mass)?;
        require_positive("snakeboard half-length l", self.half_length)?;
        require_positive("snakeboard inertia I", self.inertia)?;
        require_positive("snakeboard inertia J", self.rotor_inertia)?;
        if !(self.ml2() > self.inertia) {
            return Err(Error::InvalidParameter(format!(
                "snakeboard needs m l^2 > I, got m l^2 = {} and I = {}",
                self.ml2(),
                self.inertia
            )));
        }
        Ok(())
    }

    pub fn ml2(&self) -> f64 {
        self.mass * self.half_length * self.half_length
    }
}

#[derive(Debug, Clone)]
pub struct Snakeboard {
    params: SnakeboardParams,
    mass: MassMatrix,
}

pub fn make_snakeboard(params: SnakeboardParams) -> Result<Snakeboard> {
    Snakeboard::new(params)
}

impl Snakeboard {
    pub fn new(params: SnakeboardParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            mass: MassMatrix::new(closed_form::mass_matrix(&params))?,
        })
    }

    pub fn params(&self) -> SnakeboardParams {
        self.params
    }
}

impl ConstrainedSystem for Snakeboard {
    fn dim(&self) -> usize {
        5
    }

    fn num_constraints(&self) -> usize {
        2
    }

    fn num_controls(&self) -> usize {
        2
    }

    fn mass(&self) -> &MassMatrix {
        &self.mass
    }

    fn constraints(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (a, b, c) = closed_form::coefficients(&self.params, q[2], q[1]);
        DMatrix::from_row_slice(2, 5, &[0.0, 0.0, a, -c, 0.0, 0.0, 0.0, b, 0.0, -c])
    }

    fn constraints_directional(&self, q: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        let l = self.params.half_length;
        let (phi, theta) = (q[1], q[2]);
        let (st, ct) = theta.sin_cos();
        let cp = phi.cos();
        let (s2p, c2p) = (2.0 * phi).sin_cos();
        let (wphi, wth) = (w[1], w[2]);
        let da = 2.0 * l * st * cp * cp * wth + 2.0 * l * ct * s2p * wphi;
        let db = -2.0 * l * ct * cp * cp * wth + 2.0 * l * st * s2p * wphi;
        let dc = 2.0 * c2p * wphi;
        DMatrix::from_row_slice(2, 5, &[0.0, 0.0, da, -dc, 0.0, 0.0, 0.0, db, 0.0, -dc])
    }

    fn control_basis(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(5, 2);
        b[(0, 0)] = 1.0;
        b[(1, 1)] = 1.0;
        b
    }

    fn angle_mask(&self) -> Vec<bool> {
        vec![true, true, true, false, false]
    }

    fn coordinate_names(&self) -> Vec<String> {
        ["psi", "phi", "theta", "x", "y"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }
}

impl ReducedSystem for Snakeboard {
    fn shape_dim(&self) -> usize {
        2
    }

    fn sym_dim(&self) -> usize {
        1
    }

    fn reduced_metric(&self, _r: &DVector<f64>) -> DMatrix<f64> {
        self.mass.matrix().clone()
    }

    fn connection(&self, r: &DVector<f64>) -> DMatrix<f64> {
        closed_form::connection(&self.params, r[1])
    }

    fn symmetry_basis(&self, r: &DVector<f64>) -> DMatrix<f64> {
        let e = closed_form::e1(&self.params, r[1]);
        DMatrix::from_column_slice(3, 1, &[e.w, e.x, e.y])
    }

    fn shape_force(&self, _r: &DVector<f64>, control: &DVector<f64>) -> DVector<f64> {
        if control.len() == 2 {
            control.clone()
        } else {
            DVector::zeros(2)
        }
    }

    fn locked_velocity(&self, r: &DVector<f64>, p: &DVector<f64>) -> AlgebraVector {
        closed_form::locked_velocity(&self.params, r[1], p[0])
    }
}

/// Which shape velocity the printed stage momentum pairs with `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingReading {
    /// `ml²ξ¹ + I u^ψ`, consistent with the mass matrix.
    Psi,
    /// `ml²ξ¹ + I u^φ`, the literal printed superscript.
    Phi,
}

/// Hand-derived snakeboard formulas used as oracles.
pub mod closed_form {
    use super::*;

    pub fn mass_matrix(params: &SnakeboardParams) -> DMatrix<f64> {
        let (i, j, m) = (params.inertia, params.rotor_inertia, params.mass);
        #[rustfmt::skip]
        let entries = [
            i,   0.0,     i,             0.0, 0.0,
            0.0, 2.0 * j, 0.0,           0.0, 0.0,
            i,   0.0,     params.ml2(),  0.0, 0.0,
            0.0, 0.0,     0.0,           m,   0.0,
            0.0, 0.0,     0.0,           0.0, m,
        ];
        DMatrix::from_row_slice(5, 5, &entries)
    }

    /// `(a, b, c) = (-2l cosθ cos²φ, -2l sinθ cos²φ, sin 2φ)`.
    pub fn coefficients(params: &SnakeboardParams, theta: f64, phi: f64) -> (f64, f64, f64) {
        let l = params.half_length;
        let cp2 = phi.cos().powi(2);
        let (st, ct) = theta.sin_cos();
        (-2.0 * l * ct * cp2, -2.0 * l * st * cp2, (2.0 * phi).sin())
    }

    /// Spanning vectors of the constraint distribution: `∂ψ`, `∂φ` and
    /// `c∂θ + a∂x + b∂y`.
    pub fn distribution_basis(params: &SnakeboardParams, q: &[f64]) -> [[f64; 5]; 3] {
        let (a, b, c) = coefficients(params, q[2], q[1]);
        [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, c, a, b],
        ]
    }

    /// The projector `𝒬(q)` in the printed closed form. The entries are
    /// evaluated with the coefficients divided by `2 cos φ`, which is the
    /// scaling under which the denominator is `ml² - I sin²φ`; the matrix
    /// is invariant under rescaling of the constraints otherwise.
    pub fn projector(params: &SnakeboardParams, q: &[f64]) -> Result<DMatrix<f64>> {
        let (m, i, l) = (params.mass, params.inertia, params.half_length);
        let ml2 = params.ml2();
        let (phi, theta) = (q[1], q[2]);
        let denom = ml2 - i * phi.sin().powi(2);
        if denom.abs() < 1e-9 * ml2 {
            return Err(Error::NearSingularDenominator { value: denom });
        }
        let a = -l * theta.cos() * phi.cos();
        let b = -l * theta.sin() * phi.cos();
        let c = phi.sin();
        let ip = ml2 - i;
        #[rustfmt::skip]
        let entries = [
            0.0, 0.0, -m * (a * a + b * b), m * a * c,              m * b * c,
            0.0, 0.0, 0.0,                  0.0,                    0.0,
            0.0, 0.0, m * (a * a + b * b),  -m * a * c,             -m * b * c,
            0.0, 0.0, -ip * a * c,          m * b * b + ip * c * c, -m * a * b,
            0.0, 0.0, -ip * b * c,          -m * a * b,             m * a * a + ip * c * c,
        ];
        Ok(DMatrix::from_row_slice(5, 5, &entries) / denom)
    }

    /// `e₁(r) = 2l cos²φ (tanφ / l, -1, 0)`.
    pub fn e1(params: &SnakeboardParams, phi: f64) -> AlgebraVector {
        let l = params.half_length;
        let cp = phi.cos();
        AlgebraVector::new((2.0 * phi).sin(), -2.0 * l * cp * cp, 0.0)
    }

    pub fn connection(params: &SnakeboardParams, phi: f64) -> DMatrix<f64> {
        let (m, l, i) = (params.mass, params.half_length, params.inertia);
        DMatrix::from_row_slice(
            3,
            2,
            &[
                i / (m * l * l) * phi.sin().powi(2),
                0.0,
                -i / (2.0 * m * l) * (2.0 * phi).sin(),
                0.0,
                0.0,
                0.0,
            ],
        )
    }

    /// `Ω = p₁ / (4ml² cos²φ) e₁(r)`.
    pub fn locked_velocity(params: &SnakeboardParams, phi: f64, p1: f64) -> AlgebraVector {
        e1(params, phi) * (p1 / (4.0 * params.ml2() * phi.cos().powi(2)))
    }

    /// Printed stage momentum `(ml²ξ¹ + I u, mξ², 0)` under either reading
    /// of the shape velocity `u`.
    pub fn stage_momentum(
        params: &SnakeboardParams,
        xi: AlgebraVector,
        u: &[f64; 2],
        reading: CouplingReading,
    ) -> [f64; 3] {
        let coupled = match reading {
            CouplingReading::Psi => u[0],
            CouplingReading::Phi => u[1],
        };
        [params.ml2() * xi.w + params.inertia * coupled, params.mass * xi.x, 0.0]
    }

    /// `∂_uℓ = (I(u^ψ + ξ¹), 2J u^φ)`.
    pub fn d_u_ell(params: &SnakeboardParams, xi: AlgebraVector, u: &[f64; 2]) -> [f64; 2] {
        [params.inertia * (u[0] + xi.w), 2.0 * params.rotor_inertia * u[1]]
    }

    /// Body velocity `ξ = Ω - A(r) u`.
    pub fn body_velocity(params: &SnakeboardParams, phi: f64, u: &[f64; 2], p1: f64) -> AlgebraVector {
        let a = connection(params, phi);
        let om = locked_velocity(params, phi, p1);
        AlgebraVector::new(om.w - a[(0, 0)] * u[0], om.x - a[(1, 0)] * u[0], om.y)
    }

    /// The simplified RDP equations for `τ = exp`, first-order `dτ⁻¹` and
    /// `α = 0`, solved in closed form. Takes the previous stage
    /// `(r_{k-1}, u_{k-1}, p₁)` and returns `(u_k, (p₁)_k)`.
    pub fn rdp_step(
        params: &SnakeboardParams,
        h: f64,
        r_prev: &[f64; 2],
        u_prev: &[f64; 2],
        p1_prev: f64,
        force: &[f64; 2],
    ) -> ([f64; 2], f64) {
        let (i, ml2) = (params.inertia, params.ml2());
        let xi = body_velocity(params, r_prev[1], u_prev, p1_prev);
        let mu = stage_momentum(params, xi, u_prev, CouplingReading::Psi);
        let du = d_u_ell(params, xi, u_prev);
        let phi = r_prev[1] + h * u_prev[1];
        let e = e1(params, phi);
        let p1 = mu[0] * e.w + mu[1] * e.x + mu[2] * e.y;
        let pi = [du[0] + h * force[0], du[1] + h * force[1]];
        let s2 = phi.sin().powi(2);
        let u_psi = (pi[0] / i - p1 * phi.tan() / (2.0 * ml2)) / (1.0 - i * s2 / ml2);
        let u_phi = pi[1] / (2.0 * params.rotor_inertia);
        ([u_psi, u_phi], p1)
    }
}
