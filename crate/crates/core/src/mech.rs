//! Constrained mechanical systems with Lagrangian `½ q̇ᵀ M q̇ - V(q)` and
//! linear velocity constraints `μ(q) q̇ = 0`.
//!
//! The kinetic metric `M` is constant. Configuration-dependent inertia is not
//! supported by any of the integrators in this crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative determinant threshold (`det G / Π G_ii`) below which the
/// constraint Gram matrix `G = μ M⁻¹ μᵀ` is treated as singular.
pub const SINGULAR_RELATIVE_DET: f64 = 1e-12;

/// Admissibility threshold for velocities handed to the continuous dynamics.
pub const CONSTRAINT_WARN_TOL: f64 = 1e-8;

const DIRECTIONAL_FD_STEP: f64 = 1e-6;

/// Symmetric positive-definite mass matrix together with its inverse.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl MassMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("mass matrix must be square".into()));
        }
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym > 1e-12 * matrix.abs().max().max(1.0) {
            return Err(Error::InvalidParameter("mass matrix is not symmetric".into()));
        }
        let chol = matrix
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("mass matrix is not positive definite".into()))?;
        let inverse = chol.inverse();
        Ok(Self { matrix, inverse })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }
}

/// A mechanical system subject to nonholonomic constraints.
pub trait ConstrainedSystem {
    /// Configuration dimension `n`.
    fn dim(&self) -> usize;

    /// Number of constraint one-forms `m`.
    fn num_constraints(&self) -> usize;

    /// Number of control channels `c`.
    fn num_controls(&self) -> usize {
        0
    }

    fn mass(&self) -> &MassMatrix;

    fn potential(&self, _q: &DVector<f64>) -> f64 {
        0.0
    }

    fn potential_gradient(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(self.dim())
    }

    /// `m × n` matrix whose rows are the constraint one-forms at `q`.
    fn constraints(&self, q: &DVector<f64>) -> DMatrix<f64>;

    /// Derivative of `μ(q)` along `w`. The default uses relative central
    /// differences; built-in models override it analytically.
    fn constraints_directional(&self, q: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        let wn = w.amax();
        if wn == 0.0 {
            return DMatrix::zeros(self.num_constraints(), self.dim());
        }
        let eps = DIRECTIONAL_FD_STEP * q.amax().max(1.0) / wn;
        let plus = self.constraints(&(q + w * eps));
        let minus = self.constraints(&(q - w * eps));
        (plus - minus) / (2.0 * eps)
    }

    /// `n × c` matrix mapping control inputs to generalized forces.
    fn control_basis(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(self.dim(), self.num_controls())
    }

    /// Which coordinates are angles. Metadata only.
    fn angle_mask(&self) -> Vec<bool> {
        vec![false; self.dim()]
    }

    fn coordinate_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("q{i}")).collect()
    }
}

/// Generalized force `f(q, u) = B(q) u - V_q(q)`.
pub fn generalized_force<S: ConstrainedSystem + ?Sized>(sys: &S, q: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    let grad = sys.potential_gradient(q);
    if sys.num_controls() == 0 {
        return -grad;
    }
    sys.control_basis(q) * u - grad
}

/// Cholesky factor of `G = μ M⁻¹ μᵀ` with the rank check applied.
fn constraint_gram(mu: &DMatrix<f64>, minv: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let g = mu * minv * mu.transpose();
    let diag: f64 = g.diagonal().iter().product();
    let det = g.determinant();
    if !(diag > 0.0) || !(det.abs() >= SINGULAR_RELATIVE_DET * diag) {
        return Err(Error::SingularConstraint { det });
    }
    g.cholesky().ok_or(Error::SingularConstraint { det })
}

/// Complementary projectors: `Q = M⁻¹μᵀ(μM⁻¹μᵀ)⁻¹μ` onto the constraint
/// normal directions and `P = I - Q` onto the admissible velocities.
#[derive(Debug, Clone)]
pub struct Projectors {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

pub fn projectors<S: ConstrainedSystem + ?Sized>(sys: &S, q: &DVector<f64>) -> Result<Projectors> {
    let n = sys.dim();
    if sys.num_constraints() == 0 {
        return Ok(Projectors {
            p: DMatrix::identity(n, n),
            q: DMatrix::zeros(n, n),
        });
    }
    let mu = sys.constraints(q);
    let minv = sys.mass().inverse();
    let chol = constraint_gram(&mu, minv)?;
    let qm = minv * mu.transpose() * chol.solve(&mu);
    let pm = DMatrix::identity(n, n) - &qm;
    Ok(Projectors { p: pm, q: qm })
}

/// Constrained acceleration and multipliers of the Lagrange–d'Alembert
/// equations `M a = f + μᵀλ`, with `λ` chosen so that `d/dt (μ(q) v) = 0`.
pub fn continuous_accel<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    v: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let f = generalized_force(sys, q, u);
    let minv = sys.mass().inverse();
    if sys.num_constraints() == 0 {
        return Ok((minv * f, DVector::zeros(0)));
    }
    let mu = sys.constraints(q);
    let chol = constraint_gram(&mu, minv)?;
    let dmu = sys.constraints_directional(q, v);
    let rhs = &mu * (minv * &f) + dmu * v;
    let lambda = -chol.solve(&rhs);
    let a = minv * (f + mu.transpose() * &lambda);
    Ok((a, lambda))
}

/// Total energy `½ vᵀMv + V(q)` and constraint residual `μ(q) v`.
pub fn energy_and_constraints<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> (f64, DVector<f64>) {
    let kinetic = 0.5 * v.dot(&(sys.mass().matrix() * v));
    let residual = if sys.num_constraints() == 0 {
        DVector::zeros(0)
    } else {
        sys.constraints(q) * v
    };
    (kinetic + sys.potential(q), residual)
}

/// Configuration and velocity of a continuous trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: DVector<f64>,
    pub v: DVector<f64>,
}

impl PhaseState {
    pub fn new(q: DVector<f64>, v: DVector<f64>) -> Self {
        Self { q, v }
    }

    pub fn from_momentum<S: ConstrainedSystem + ?Sized>(sys: &S, q: DVector<f64>, p: &DVector<f64>) -> Self {
        let v = sys.mass().inverse() * p;
        Self { q, v }
    }

    pub fn momentum<S: ConstrainedSystem + ?Sized>(&self, sys: &S) -> DVector<f64> {
        sys.mass().matrix() * &self.v
    }
}

/// Infinity norm of `μ(q) M⁻¹ p`, the constraint residual of a momentum.
pub fn momentum_residual<S: ConstrainedSystem + ?Sized>(sys: &S, q: &DVector<f64>, p: &DVector<f64>) -> f64 {
    if sys.num_constraints() == 0 {
        return 0.0;
    }
    (sys.constraints(q) * (sys.mass().inverse() * p)).amax()
}

pub(crate) fn check_dims<S: ConstrainedSystem + ?Sized>(sys: &S, q: &DVector<f64>, p: &DVector<f64>) -> Result<()> {
    if q.len() != sys.dim() || p.len() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected state vectors of length {}, got {} and {}",
            sys.dim(),
            q.len(),
            p.len()
        )));
    }
    Ok(())
}
