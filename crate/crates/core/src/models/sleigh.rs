//! The Chaplygin sleigh: a planar rigid body on a skate mounted a distance
//! `a` behind its center of mass along the body axis.
//!
//! Configuration `q = (θ, x, y)` is both the full coordinate vector and the
//! SE(2) group element; the shape space is a point.

use nalgebra::{DMatrix, DVector, Matrix3};

use super::require_positive;
use crate::error::{Error, Result};
use crate::mech::{ConstrainedSystem, MassMatrix, PhaseState};
use crate::rdp::ReducedSystem;
use crate::se2::AlgebraVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleighParams {
    /// Rotational inertia about the center of mass.
    pub inertia: f64,
    pub mass: f64,
    /// Skate offset from the center of mass.
    pub offset: f64,
}

impl Default for SleighParams {
    fn default() -> Self {
        Self {
            inertia: 1.0,
            mass: 1.0,
            offset: 1.0,
        }
    }
}

impl SleighParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("sleigh inertia I", self.inertia)?;
        require_positive("sleigh mass m", self.mass)?;
        if !(self.offset >= 0.0) || !self.offset.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sleigh offset a must be non-negative, got {}",
                self.offset
            )));
        }
        Ok(())
    }

    /// `I + a² m`, the inertia about the skate contact.
    pub fn effective_inertia(&self) -> f64 {
        self.inertia + self.offset * self.offset * self.mass
    }
}

#[derive(Debug, Clone)]
pub struct Sleigh {
    params: SleighParams,
    mass: MassMatrix,
    /// Multiplies the constraint one-form; the dynamics must not depend on it.
    constraint_scale: f64,
}

pub fn make_sleigh(params: SleighParams) -> Result<Sleigh> {
    Sleigh::new(params)
}

impl Sleigh {
    pub fn new(params: SleighParams) -> Result<Self> {
        params.validate()?;
        let mass = MassMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            params.inertia,
            params.mass,
            params.mass,
        ])))?;
        Ok(Self {
            params,
            mass,
            constraint_scale: 1.0,
        })
    }

    /// Same sleigh with the constraint one-form multiplied by `scale`.
    pub fn with_constraint_scale(mut self, scale: f64) -> Self {
        self.constraint_scale = scale;
        self
    }

    pub fn params(&self) -> SleighParams {
        self.params
    }

    /// Admissible state at pose `q` with angular rate `omega` and forward
    /// speed `forward` (sideways speed `a ω` is forced by the skate).
    pub fn state_from_body_velocity(&self, q: &[f64; 3], omega: f64, forward: f64) -> PhaseState {
        let xi = AlgebraVector::new(omega, forward, self.params.offset * omega);
        let (s, c) = q[0].sin_cos();
        PhaseState::new(
            DVector::from_column_slice(q),
            DVector::from_vec(vec![xi.w, c * xi.x - s * xi.y, s * xi.x + c * xi.y]),
        )
    }

    /// Body velocity `g⁻¹ġ` for reduced momenta `(p₁, p₂)`.
    pub fn body_velocity(&self, p: &[f64; 2]) -> AlgebraVector {
        let ip = self.params.effective_inertia();
        AlgebraVector::new(p[0] / ip, p[1] / self.params.mass, self.params.offset * p[0] / ip)
    }

    /// Reduced momenta `(p₁, p₂) = ((I + a²m) ω, m v)` of a full-coordinate
    /// velocity.
    pub fn reduced_momentum(&self, q: &DVector<f64>, v: &DVector<f64>) -> [f64; 2] {
        let (s, c) = q[0].sin_cos();
        let forward = c * v[1] + s * v[2];
        [self.params.effective_inertia() * v[0], self.params.mass * forward]
    }

    pub fn reduced_energy(&self, p: &[f64; 2]) -> f64 {
        p[0] * p[0] / (2.0 * self.params.effective_inertia()) + p[1] * p[1] / (2.0 * self.params.mass)
    }

    /// Position of the skate contact.
    pub fn skate_coordinates(&self, q: &[f64]) -> (f64, f64) {
        skate_coordinates(&self.params, q)
    }
}

/// `(x - a cos θ, y - a sin θ)`.
pub fn skate_coordinates(params: &SleighParams, q: &[f64]) -> (f64, f64) {
    let (s, c) = q[0].sin_cos();
    (q[1] - params.offset * c, q[2] - params.offset * s)
}

impl ConstrainedSystem for Sleigh {
    fn dim(&self) -> usize {
        3
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn mass(&self) -> &MassMatrix {
        &self.mass
    }

    fn constraints(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (s, c) = q[0].sin_cos();
        DMatrix::from_row_slice(1, 3, &[self.params.offset, s, -c]) * self.constraint_scale
    }

    fn constraints_directional(&self, q: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        let (s, c) = q[0].sin_cos();
        DMatrix::from_row_slice(1, 3, &[0.0, c * w[0], s * w[0]]) * self.constraint_scale
    }

    fn angle_mask(&self) -> Vec<bool> {
        vec![true, false, false]
    }

    fn coordinate_names(&self) -> Vec<String> {
        vec!["theta".into(), "x".into(), "y".into()]
    }
}

impl ReducedSystem for Sleigh {
    fn shape_dim(&self) -> usize {
        0
    }

    fn sym_dim(&self) -> usize {
        2
    }

    fn reduced_metric(&self, _r: &DVector<f64>) -> DMatrix<f64> {
        self.mass.matrix().clone()
    }

    fn connection(&self, _r: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(3, 0)
    }

    fn symmetry_basis(&self, _r: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_column_slice(3, 2, &[1.0, 0.0, self.params.offset, 0.0, 1.0, 0.0])
    }
}

/// Hand-derived sleigh formulas, coded independently of the generic
/// integrators so they can serve as oracles.
pub mod closed_form {
    use super::*;

    /// Projector onto the constraint normal at orientation `theta`.
    pub fn projector(params: &SleighParams, theta: f64) -> Matrix3<f64> {
        let (i, m, a) = (params.inertia, params.mass, params.offset);
        let (s, c) = theta.sin_cos();
        Matrix3::new(
            a * a * m,
            a * m * s,
            -a * m * c,
            a * i * s,
            i * s * s,
            -i * s * c,
            -a * i * c,
            -i * s * c,
            i * c * c,
        ) / params.effective_inertia()
    }

    /// Explicit GNI half-step velocity update at orientation `theta` with no
    /// applied forces.
    pub fn gni_velocity_update(params: &SleighParams, theta: f64, v: &[f64; 3]) -> [f64; 3] {
        let (i, m, a) = (params.inertia, params.mass, params.offset);
        let ip = params.effective_inertia();
        let (s, c) = theta.sin_cos();
        [
            (1.0 - 2.0 * a * a * m / ip) * v[0] + a * m / ip * (-2.0 * s * v[1] + 2.0 * c * v[2]),
            -2.0 * a * i / ip * s * v[0] + (1.0 - 2.0 * i / ip * s * s) * v[1] + 2.0 * i / ip * s * c * v[2],
            2.0 * a * i / ip * c * v[0] + 2.0 * i / ip * s * c * v[1] + (1.0 - 2.0 * i / ip * c * c) * v[2],
        ]
    }

    /// Continuous reduced momentum rates.
    pub fn momentum_rates(params: &SleighParams, p: &[f64; 2]) -> [f64; 2] {
        let ip = params.effective_inertia();
        let a = params.offset;
        [-a / ip * p[0] * p[1], params.mass * a / (ip * ip) * p[0] * p[0]]
    }

    /// Residual of the implicit midpoint-type momentum update
    /// `p_k - p_{k-1} = (h/2) (ṗ(p_k) + ṗ(p_{k-1}))`.
    pub fn momentum_update_residual(params: &SleighParams, h: f64, prev: &[f64; 2], next: &[f64; 2]) -> [f64; 2] {
        let ip = params.effective_inertia();
        let (m, a) = (params.mass, params.offset);
        [
            next[0] - prev[0] + h * a / (2.0 * ip) * (next[0] * next[1] + prev[0] * prev[1]),
            next[1] - prev[1] - h * m * a / (2.0 * ip * ip) * (next[0] * next[0] + prev[0] * prev[0]),
        ]
    }

    /// Solves the momentum update by eliminating `p₂` and finding the real
    /// root of the resulting cubic in `p₁`.
    pub fn momentum_update(params: &SleighParams, h: f64, prev: &[f64; 2]) -> [f64; 2] {
        let ip = params.effective_inertia();
        let (m, a) = (params.mass, params.offset);
        let c1 = h * a / (2.0 * ip);
        let c2 = h * m * a / (2.0 * ip * ip);
        let (p1, p2) = (prev[0], prev[1]);
        // c1 c2 x³ + (1 + c1 p2 + c1 c2 p1²) x - p1 (1 - c1 p2) = 0
        let k3 = c1 * c2;
        let k1 = 1.0 + c1 * p2 + c1 * c2 * p1 * p1;
        let k0 = -p1 * (1.0 - c1 * p2);
        let cubic = |x: f64| (k3 * x * x + k1) * x + k0;
        let slope = |x: f64| 3.0 * k3 * x * x + k1;
        let mut x = p1;
        for _ in 0..100 {
            let dx = cubic(x) / slope(x);
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        [x, p2 + c2 * (x * x + p1 * p1)]
    }

    /// Body velocity used in the group reconstruction `g_{k+1} = g_k exp(h ξ_k)`.
    pub fn reconstruction_velocity(params: &SleighParams, p: &[f64; 2]) -> [f64; 3] {
        let ip = params.effective_inertia();
        [p[0] / ip, p[1] / params.mass, params.offset * p[0] / ip]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::projectors;

    #[test]
    fn parameters_are_validated() {
        assert!(Sleigh::new(SleighParams {
            inertia: 0.0,
            ..Default::default()
        })
        .is_err());
        assert!(Sleigh::new(SleighParams {
            mass: -1.0,
            ..Default::default()
        })
        .is_err());
        assert!(Sleigh::new(SleighParams {
            offset: -0.1,
            ..Default::default()
        })
        .is_err());
        assert!(Sleigh::new(SleighParams {
            offset: 0.0,
            ..Default::default()
        })
        .is_ok());
    }

    #[test]
    fn mass_and_basis() {
        let params = SleighParams {
            inertia: 2.0,
            mass: 3.0,
            offset: 0.5,
        };
        let s = Sleigh::new(params).unwrap();
        assert_eq!(
            s.mass().matrix(),
            &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 3.0]))
        );
        let e = s.symmetry_basis(&DVector::zeros(0));
        assert_eq!(e.column(0).as_slice(), &[1.0, 0.0, 0.5]);
        assert_eq!(e.column(1).as_slice(), &[0.0, 1.0, 0.0]);
        let xi = s.body_velocity(&[1.0, 2.0]);
        let ip = 2.0 + 0.25 * 3.0;
        assert_eq!(xi, AlgebraVector::new(1.0 / ip, 2.0 / 3.0, 0.5 / ip));
    }

    #[test]
    fn projector_at_zero_angle() {
        let params = SleighParams {
            inertia: 2.0,
            mass: 3.0,
            offset: 0.5,
        };
        let s = Sleigh::new(params).unwrap();
        let q = projectors(&s, &DVector::zeros(3)).unwrap().q;
        let ip = 2.0 + 0.25 * 3.0;
        let expected = DMatrix::from_row_slice(3, 3, &[0.75, 0.0, -1.5, 0.0, 0.0, 0.0, -1.0, 0.0, 2.0]) / ip;
        assert!((q - expected).amax() < 1e-15);
    }

    #[test]
    fn gni_update_examples() {
        let p = SleighParams::default();
        let v = closed_form::gni_velocity_update(&p, 0.0, &[1.0, 0.0, 0.0]);
        assert_eq!(v, [0.0, 0.0, 1.0]);
        let v = closed_form::gni_velocity_update(&p, 0.0, &[0.0, 1.0, 0.0]);
        assert_eq!(v, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn momentum_rates_example() {
        let r = closed_form::momentum_rates(&SleighParams::default(), &[2.0, 1.0]);
        assert_eq!(r, [-1.0, 1.0]);
    }

    #[test]
    fn cubic_momentum_update_solves_residual() {
        let p = SleighParams::default();
        let next = closed_form::momentum_update(&p, 0.1, &[2.0, 1.0]);
        let res = closed_form::momentum_update_residual(&p, 0.1, &[2.0, 1.0], &next);
        assert!(res[0].abs() < 1e-15 && res[1].abs() < 1e-15);
        assert!((next[0] - 1.8980).abs() < 5e-5 && (next[1] - 1.0950).abs() < 5e-5);
        assert_eq!(closed_form::momentum_update(&p, 0.3, &[0.0, 1.0]), [0.0, 1.0]);
    }

    #[test]
    fn skate_coordinates_examples() {
        let p = SleighParams::default();
        assert_eq!(
            skate_coordinates(&SleighParams { offset: 0.0, ..p }, &[0.7, 2.0, 3.0]),
            (2.0, 3.0)
        );
        assert_eq!(skate_coordinates(&p, &[0.0, 2.0, 3.0]), (1.0, 3.0));
        let (xs, ys) = skate_coordinates(&p, &[std::f64::consts::FRAC_PI_2, 0.0, 0.0]);
        assert!(xs.abs() < 1e-16 && (ys + 1.0).abs() < 1e-16);
    }

    #[test]
    fn body_velocity_state_is_admissible() {
        let s = Sleigh::new(SleighParams::default()).unwrap();
        let st = s.state_from_body_velocity(&[0.8, 1.0, -2.0], 0.7, 1.3);
        assert!((s.constraints(&st.q) * &st.v).amax() < 1e-15);
        let p = s.reduced_momentum(&st.q, &st.v);
        assert!((p[0] - 2.0 * 0.7).abs() < 1e-15 && (p[1] - 1.3).abs() < 1e-15);
    }
}
