//! Reduced d'Alembert–Pontryagin integrator on trivial bundles `M × SE(2)`.
//!
//! Stage `k` covers `[t_k, t_{k+1}]` and carries the shape velocity `u_k`,
//! the nonholonomic momentum `p_k` and the body velocity
//! `ξ_k = Ω(r, p_k) - A(r) u_k` evaluated at `r = r_{k+α}`. Full coordinates
//! of a reduced system are ordered `(r, θ, x, y)`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Partial, Result};
use crate::mech::PhaseState;
use crate::newton::{self, fd_jacobian, NewtonOptions, NewtonReport};
use crate::se2::{
    check_dtau, dtau_inv_matrix, dtau_inv_transpose_jacobian, AlgebraVector, DtauInverse, GroupElement, Retraction,
};

/// A Lagrangian system on `M × SE(2)` with a kinetic reduced Lagrangian
/// `ℓ(r, u, ξ) = ½ (u, ξ)ᵀ 𝕄(r) (u, ξ)`.
pub trait ReducedSystem {
    fn shape_dim(&self) -> usize;

    /// Dimension of the constrained symmetry algebra.
    fn sym_dim(&self) -> usize;

    /// Metric on `(u, ξ)`, of size `(shape_dim + 3)²`.
    fn reduced_metric(&self, r: &DVector<f64>) -> DMatrix<f64>;

    /// Local form of the nonholonomic connection, 3 × shape_dim.
    fn connection(&self, r: &DVector<f64>) -> DMatrix<f64>;

    /// Body-frame basis `e_b(r)` of the constrained symmetry directions, 3 × sym_dim.
    fn symmetry_basis(&self, r: &DVector<f64>) -> DMatrix<f64>;

    /// Shape-space covector produced by the control inputs.
    fn shape_force(&self, _r: &DVector<f64>, _control: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(self.shape_dim())
    }

    fn ell(&self, r: &DVector<f64>, u: &DVector<f64>, xi: AlgebraVector) -> f64 {
        let z = stack(u, xi);
        0.5 * z.dot(&(self.reduced_metric(r) * &z))
    }

    fn d_u_ell(&self, r: &DVector<f64>, u: &DVector<f64>, xi: AlgebraVector) -> DVector<f64> {
        let s = self.shape_dim();
        (self.reduced_metric(r) * stack(u, xi)).rows(0, s).into_owned()
    }

    fn d_xi_ell(&self, r: &DVector<f64>, u: &DVector<f64>, xi: AlgebraVector) -> Vector3<f64> {
        let s = self.shape_dim();
        let g = self.reduced_metric(r) * stack(u, xi);
        Vector3::new(g[s], g[s + 1], g[s + 2])
    }

    /// `Ω ∈ span e_b(r)` with `⟨𝕄_ξξ Ω, e_b⟩ = p_b`. Linear in `p`.
    fn locked_velocity(&self, r: &DVector<f64>, p: &DVector<f64>) -> AlgebraVector {
        let s = self.shape_dim();
        let m = self.reduced_metric(r);
        let mxx = m.view((s, s), (3, 3));
        let e = self.symmetry_basis(r);
        let gram = e.transpose() * mxx * &e;
        let coeffs = gram
            .lu()
            .solve(p)
            .unwrap_or_else(|| DVector::from_element(p.len(), f64::NAN));
        let om = e * coeffs;
        AlgebraVector::new(om[0], om[1], om[2])
    }
}

fn stack(u: &DVector<f64>, xi: AlgebraVector) -> DVector<f64> {
    let s = u.len();
    let mut z = DVector::zeros(s + 3);
    z.rows_mut(0, s).copy_from(u);
    z[s] = xi.w;
    z[s + 1] = xi.x;
    z[s + 2] = xi.y;
    z
}

fn to_dvec(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// `ξ = Ω - A(r) u` and `p_b = ⟨∂_ξℓ, e_b(r)⟩`.
pub fn xi_and_momentum<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    u: &DVector<f64>,
    omega: AlgebraVector,
) -> (AlgebraVector, DVector<f64>) {
    let au = rsys.connection(r) * u;
    let xi = omega - AlgebraVector::new(au[0], au[1], au[2]);
    let p = rsys.symmetry_basis(r).transpose() * to_dvec(&rsys.d_xi_ell(r, u, xi));
    (xi, p)
}

/// Jacobian strategy for the stage solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianMode {
    /// Analytic when `α = 0`, finite differences otherwise.
    #[default]
    Auto,
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdpConfig {
    pub alpha: f64,
    pub tau: Retraction,
    pub dtau: DtauInverse,
    pub jacobian: JacobianMode,
    pub newton: NewtonOptions,
}

impl Default for RdpConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            tau: Retraction::Exp,
            dtau: DtauInverse::Series(1),
            jacobian: JacobianMode::Auto,
            newton: NewtonOptions::default(),
        }
    }
}

pub const FD_JACOBIAN_STEP: f64 = 1e-7;

impl RdpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.jacobian == JacobianMode::Analytic && self.alpha != 0.0 {
            return Err(Error::InvalidParameter(
                "the analytic stage Jacobian requires alpha = 0".into(),
            ));
        }
        check_dtau(self.tau, self.dtau)
    }

    fn analytic(&self) -> bool {
        match self.jacobian {
            JacobianMode::Auto => self.alpha == 0.0,
            JacobianMode::Analytic => true,
            JacobianMode::FiniteDifference => false,
        }
    }
}

/// Solved stage variables plus the Lagrangian partials they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpStage {
    /// Shape at the start node `r_k`.
    pub r: DVector<f64>,
    pub u: DVector<f64>,
    pub p: DVector<f64>,
    pub xi: AlgebraVector,
    pub d_u_ell: DVector<f64>,
    pub d_xi_ell: Vector3<f64>,
}

/// Builds stage `k` from its start shape and unknowns `(u, p)`.
pub fn eval_stage<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    u: &DVector<f64>,
    p: &DVector<f64>,
    h: f64,
    alpha: f64,
) -> RdpStage {
    let ra = r + u * (alpha * h);
    let omega = rsys.locked_velocity(&ra, p);
    let au = rsys.connection(&ra) * u;
    let xi = omega - AlgebraVector::new(au[0], au[1], au[2]);
    RdpStage {
        r: r.clone(),
        u: u.clone(),
        p: p.clone(),
        xi,
        d_u_ell: rsys.d_u_ell(&ra, u, xi),
        d_xi_ell: rsys.d_xi_ell(&ra, u, xi),
    }
}

/// `(dτ⁻¹_{±hξ})ᵀ ∂_ξℓ` for the forward (`+`) or backward (`-`) side.
fn side_covector(stage: &RdpStage, h: f64, sign: f64, cfg: &RdpConfig) -> Result<Vector3<f64>> {
    let d = dtau_inv_matrix(cfg.tau, cfg.dtau, stage.xi * (sign * h))?;
    Ok(d.transpose() * stage.d_xi_ell)
}

/// Applies `[[Id, Aᵀ], [0, Eᵀ]]` at node shape `r` to `(∂_uℓ, ζ)`.
fn node_map<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    d_u_ell: &DVector<f64>,
    zeta: &Vector3<f64>,
) -> DVector<f64> {
    let s = rsys.shape_dim();
    let c = rsys.sym_dim();
    let z = to_dvec(zeta);
    let mut out = DVector::zeros(s + c);
    out.rows_mut(0, s)
        .copy_from(&(d_u_ell + rsys.connection(r).transpose() * &z));
    out.rows_mut(s, c).copy_from(&(rsys.symmetry_basis(r).transpose() * z));
    out
}

/// Reduced discrete dynamics residual between consecutive stages. The
/// stage `cur` starts at the node where the balance is taken.
pub fn rdp_residual<R: ReducedSystem + ?Sized>(
    rsys: &R,
    prev: &RdpStage,
    cur: &RdpStage,
    f_k: &DVector<f64>,
    h: f64,
    cfg: &RdpConfig,
) -> Result<DVector<f64>> {
    let s = rsys.shape_dim();
    let fwd = node_map(rsys, &cur.r, &cur.d_u_ell, &side_covector(cur, h, 1.0, cfg)?);
    let bwd = node_map(rsys, &cur.r, &prev.d_u_ell, &side_covector(prev, h, -1.0, cfg)?);
    let mut res = fwd - bwd;
    let mut top = res.rows_mut(0, s);
    top -= f_k * h;
    Ok(res)
}

/// Derivative of `(u, p) ↦ node_map(forward side)` at `α = 0`.
fn forward_jacobian<R: ReducedSystem + ?Sized>(
    rsys: &R,
    stage: &RdpStage,
    h: f64,
    cfg: &RdpConfig,
) -> Result<DMatrix<f64>> {
    let s = rsys.shape_dim();
    let c = rsys.sym_dim();
    let r = &stage.r;
    let m = rsys.reduced_metric(r);
    let a = rsys.connection(r);
    let e = rsys.symmetry_basis(r);
    let mut lock = DMatrix::zeros(3, c);
    for j in 0..c {
        let mut unit = DVector::zeros(c);
        unit[j] = 1.0;
        lock.set_column(j, &rsys.locked_velocity(r, &unit).to_vector());
    }
    // dξ/d(u, p) = [-A, L]
    let mut dxi = DMatrix::zeros(3, s + c);
    dxi.columns_mut(0, s).copy_from(&(-&a));
    dxi.columns_mut(s, c).copy_from(&lock);
    // d(u, ξ)/d(u, p)
    let mut dz = DMatrix::zeros(s + 3, s + c);
    dz.view_mut((0, 0), (s, s)).fill_with_identity();
    dz.rows_mut(s, 3).copy_from(&dxi);
    let dgrad = &m * dz;
    let dmu_u = dgrad.rows(0, s);
    let dmu_xi = dgrad.rows(s, 3);

    let v = stage.xi * h;
    let d = dtau_inv_matrix(cfg.tau, cfg.dtau, v)?;
    let jt = dtau_inv_transpose_jacobian(cfg.tau, cfg.dtau, v, &stage.d_xi_ell)?;
    let d_t = DMatrix::from_column_slice(3, 3, d.transpose().as_slice());
    let jt = DMatrix::from_column_slice(3, 3, jt.as_slice());
    let dzeta = d_t * dmu_xi + jt * dxi * h;

    let mut jac = DMatrix::zeros(s + c, s + c);
    jac.rows_mut(0, s).copy_from(&(dmu_u + a.transpose() * &dzeta));
    jac.rows_mut(s, c).copy_from(&(e.transpose() * dzeta));
    Ok(jac)
}

/// Finds the stage starting at `r` whose forward-side node momenta equal
/// `target`.
fn solve_forward<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    target: &DVector<f64>,
    guess: (&DVector<f64>, &DVector<f64>),
    h: f64,
    cfg: &RdpConfig,
) -> Result<(RdpStage, NewtonReport)> {
    let s = rsys.shape_dim();
    let c = rsys.sym_dim();
    let split = |x: &DVector<f64>| (x.rows(0, s).into_owned(), x.rows(s, c).into_owned());
    let stage_at = |x: &DVector<f64>| {
        let (u, p) = split(x);
        eval_stage(rsys, r, &u, &p, h, cfg.alpha)
    };
    let residual = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let st = stage_at(x);
        Ok(node_map(rsys, r, &st.d_u_ell, &side_covector(&st, h, 1.0, cfg)?) - target)
    };
    let mut x0 = DVector::zeros(s + c);
    x0.rows_mut(0, s).copy_from(guess.0);
    x0.rows_mut(s, c).copy_from(guess.1);
    let scale = newton::inf_norm(target);
    let report = if cfg.analytic() {
        let jac = |x: &DVector<f64>, _: &DVector<f64>, _: &mut _| forward_jacobian(rsys, &stage_at(x), h, cfg);
        newton::solve(x0, residual, jac, &cfg.newton, scale)?
    } else {
        let jac = |x: &DVector<f64>, r0: &DVector<f64>, f: &mut _| fd_jacobian(f, x, r0, FD_JACOBIAN_STEP);
        newton::solve(x0, residual, jac, &cfg.newton, scale)?
    };
    Ok((stage_at(&report.x), report))
}

/// Solves the reduced discrete dynamics for the stage following `prev`,
/// using `prev` as the initial guess.
pub fn rdp_step<R: ReducedSystem + ?Sized>(
    rsys: &R,
    prev: &RdpStage,
    f_k: &DVector<f64>,
    h: f64,
    cfg: &RdpConfig,
) -> Result<(RdpStage, NewtonReport)> {
    let s = rsys.shape_dim();
    let r = &prev.r + &prev.u * h;
    let mut target = node_map(rsys, &r, &prev.d_u_ell, &side_covector(prev, h, -1.0, cfg)?);
    let mut top = target.rows_mut(0, s);
    top += f_k * h;
    solve_forward(rsys, &r, &target, (&prev.u, &prev.p), h, cfg)
}

/// `g_{k+1} = g_k τ(h ξ_k)`, `r_{k+1} = r_k + h u_k`.
pub fn reconstruct(g: GroupElement, stage: &RdpStage, h: f64, tau: Retraction) -> (GroupElement, DVector<f64>) {
    (g.compose(tau.apply(stage.xi * h)), &stage.r + &stage.u * h)
}

/// Continuous shape momentum `∂_uℓ + Aᵀ∂_ξℓ` at `(r, u, p)`.
pub fn continuous_shape_momentum<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    u: &DVector<f64>,
    p: &DVector<f64>,
) -> DVector<f64> {
    let omega = rsys.locked_velocity(r, p);
    let (xi, _) = xi_and_momentum(rsys, r, u, omega);
    rsys.d_u_ell(r, u, xi) + rsys.connection(r).transpose() * to_dvec(&rsys.d_xi_ell(r, u, xi))
}

/// Inverts [`continuous_shape_momentum`] for `u` (the map is affine in `u`)
/// and returns `(u, ξ)`.
pub fn node_velocity<R: ReducedSystem + ?Sized>(
    rsys: &R,
    r: &DVector<f64>,
    pi: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<(DVector<f64>, AlgebraVector)> {
    let s = rsys.shape_dim();
    let zero = DVector::zeros(s);
    let offset = continuous_shape_momentum(rsys, r, &zero, p);
    let mut k = DMatrix::zeros(s, s);
    for j in 0..s {
        let mut unit = DVector::zeros(s);
        unit[j] = 1.0;
        k.set_column(j, &(continuous_shape_momentum(rsys, r, &unit, p) - &offset));
    }
    let u = if s == 0 {
        zero
    } else {
        k.lu()
            .solve(&(pi - offset))
            .ok_or(Error::NearSingularDenominator { value: 0.0 })?
    };
    let (xi, _) = xi_and_momentum(rsys, r, &u, rsys.locked_velocity(r, p));
    Ok((u, xi))
}

/// Initial data on the reduced space.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpInitial {
    pub r: DVector<f64>,
    pub g: GroupElement,
    pub u: DVector<f64>,
    pub p: DVector<f64>,
}

impl RdpInitial {
    pub fn check_dims<R: ReducedSystem + ?Sized>(&self, rsys: &R) -> Result<()> {
        let (s, c) = (rsys.shape_dim(), rsys.sym_dim());
        if self.r.len() != s || self.u.len() != s || self.p.len() != c {
            return Err(Error::DimensionMismatch(format!(
                "reduced initial data needs r, u of length {s} and p of length {c}, got {}, {}, {}",
                self.r.len(),
                self.u.len(),
                self.p.len()
            )));
        }
        Ok(())
    }
}

/// First stage from the discrete Legendre transform at `t = 0`: the
/// forward-side node momenta equal the continuous ones, shifted by the
/// half-step force impulse.
pub fn rdp_init<R: ReducedSystem + ?Sized>(
    rsys: &R,
    init: &RdpInitial,
    f0: &DVector<f64>,
    h: f64,
    cfg: &RdpConfig,
) -> Result<(RdpStage, NewtonReport)> {
    init.check_dims(rsys)?;
    let s = rsys.shape_dim();
    let c = rsys.sym_dim();
    let mut target = DVector::zeros(s + c);
    target
        .rows_mut(0, s)
        .copy_from(&(continuous_shape_momentum(rsys, &init.r, &init.u, &init.p) + f0 * (0.5 * h)));
    target.rows_mut(s, c).copy_from(&init.p);
    solve_forward(rsys, &init.r, &target, (&init.u, &init.p), h, cfg)
}

/// Node quantities at `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpNode {
    pub k: usize,
    pub t: f64,
    pub r: DVector<f64>,
    pub g: GroupElement,
    pub u: DVector<f64>,
    pub xi: AlgebraVector,
    /// Shape momentum `∂_uℓ + Aᵀ∂_ξℓ`.
    pub pi: DVector<f64>,
    /// Nonholonomic momentum.
    pub p: DVector<f64>,
}

impl RdpNode {
    /// Full coordinates `(r, θ, x, y)` and velocities.
    pub fn full_state(&self) -> PhaseState {
        to_full_state(&self.r, self.g, &self.u, self.xi)
    }
}

/// Node momenta at the end of `stage` (shape `r`), from its backward side.
pub fn node_momentum<R: ReducedSystem + ?Sized>(
    rsys: &R,
    stage: &RdpStage,
    r: &DVector<f64>,
    f: &DVector<f64>,
    h: f64,
    cfg: &RdpConfig,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let s = rsys.shape_dim();
    let c = rsys.sym_dim();
    let m = node_map(rsys, r, &stage.d_u_ell, &side_covector(stage, h, -1.0, cfg)?);
    let pi = m.rows(0, s).into_owned() + f * (0.5 * h);
    Ok((pi, m.rows(s, c).into_owned()))
}

pub fn to_full_state(r: &DVector<f64>, g: GroupElement, u: &DVector<f64>, xi: AlgebraVector) -> PhaseState {
    let s = r.len();
    let mut q = DVector::zeros(s + 3);
    let mut v = DVector::zeros(s + 3);
    q.rows_mut(0, s).copy_from(r);
    v.rows_mut(0, s).copy_from(u);
    q[s] = g.theta;
    q[s + 1] = g.x;
    q[s + 2] = g.y;
    let (sn, cs) = g.theta.sin_cos();
    v[s] = xi.w;
    v[s + 1] = cs * xi.x - sn * xi.y;
    v[s + 2] = sn * xi.x + cs * xi.y;
    PhaseState::new(q, v)
}

/// Splits a full state into `(r, g, u, ξ)`.
pub fn split_full_state(
    shape_dim: usize,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> (DVector<f64>, GroupElement, DVector<f64>, AlgebraVector) {
    let s = shape_dim;
    let g = GroupElement::new(q[s], q[s + 1], q[s + 2]);
    let (sn, cs) = g.theta.sin_cos();
    let xi = AlgebraVector::new(v[s], cs * v[s + 1] + sn * v[s + 2], -sn * v[s + 1] + cs * v[s + 2]);
    (q.rows(0, s).into_owned(), g, v.rows(0, s).into_owned(), xi)
}

/// Reduced initial data of a full state.
pub fn reduced_initial<R: ReducedSystem + ?Sized>(rsys: &R, state: &PhaseState) -> Result<RdpInitial> {
    let s = rsys.shape_dim();
    if state.q.len() != s + 3 || state.v.len() != s + 3 {
        return Err(Error::DimensionMismatch(format!(
            "full state must have length {}, got {}",
            s + 3,
            state.q.len()
        )));
    }
    let (r, g, u, xi) = split_full_state(s, &state.q, &state.v);
    let p = rsys.symmetry_basis(&r).transpose() * to_dvec(&rsys.d_xi_ell(&r, &u, xi));
    Ok(RdpInitial { r, g, u, p })
}

#[derive(Debug, Clone)]
pub struct RdpTrajectory {
    pub nodes: Vec<RdpNode>,
    pub stages: Vec<RdpStage>,
    /// Newton iterations per stage solve (index 0 is the initialization).
    pub iterations: Vec<usize>,
}

pub fn rdp_trajectory<R: ReducedSystem + ?Sized>(
    rsys: &R,
    init: &RdpInitial,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    cfg: &RdpConfig,
) -> Result<RdpTrajectory> {
    rdp_trajectory_partial(rsys, init, controls, h, steps, cfg)?.into_result()
}

/// Like [`rdp_trajectory`] but keeps the nodes computed before a failing
/// stage solve.
pub fn rdp_trajectory_partial<R: ReducedSystem + ?Sized>(
    rsys: &R,
    init: &RdpInitial,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    cfg: &RdpConfig,
) -> Result<Partial<RdpTrajectory>> {
    cfg.validate()?;
    init.check_dims(rsys)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
    }
    let force = |k: usize, r: &DVector<f64>| rsys.shape_force(r, &controls(k as f64 * h));
    let pi0 = continuous_shape_momentum(rsys, &init.r, &init.u, &init.p);
    let (u0, xi0) = node_velocity(rsys, &init.r, &pi0, &init.p)?;
    let mut traj = RdpTrajectory {
        nodes: vec![RdpNode {
            k: 0,
            t: 0.0,
            r: init.r.clone(),
            g: init.g,
            u: u0,
            xi: xi0,
            pi: pi0,
            p: init.p.clone(),
        }],
        stages: Vec::with_capacity(steps),
        iterations: Vec::with_capacity(steps),
    };
    let mut run = || -> Result<()> {
        for k in 0..steps {
            let node = &traj.nodes[k];
            let f = force(k, &node.r);
            let (stage, report) = if k == 0 {
                rdp_init(rsys, init, &f, h, cfg)
            } else {
                rdp_step(rsys, &traj.stages[k - 1], &f, h, cfg)
            }
            .map_err(|e| e.at_step(k))?;
            let (g, r) = reconstruct(node.g, &stage, h, cfg.tau);
            let f_next = force(k + 1, &r);
            let (pi, p) = node_momentum(rsys, &stage, &r, &f_next, h, cfg).map_err(|e| e.at_step(k + 1))?;
            let (u, xi) = node_velocity(rsys, &r, &pi, &p).map_err(|e| e.at_step(k + 1))?;
            traj.iterations.push(report.iterations);
            traj.stages.push(stage);
            traj.nodes.push(RdpNode {
                k: k + 1,
                t: (k + 1) as f64 * h,
                r,
                g,
                u,
                xi,
                pi,
                p,
            });
        }
        Ok(())
    };
    let error = run().err();
    Ok(Partial { value: traj, error })
}
