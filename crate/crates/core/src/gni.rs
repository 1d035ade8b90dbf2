//! Geometric nonholonomic integrator in projected half-step form, with the
//! equivalent multiplier (RATTLE) form as an independent implementation.

use nalgebra::DVector;

use crate::error::{Error, Partial, Result};
use crate::mech::{
    check_dims, generalized_force, momentum_residual, projectors, ConstrainedSystem, CONSTRAINT_WARN_TOL,
};

/// Initial states whose constraint residual exceeds this are rejected.
pub const ADMISSIBLE_TOL: f64 = 1e-6;

/// Tolerance for disagreement between the two node-momentum formulas,
/// relative to the momentum magnitude.
pub const NODE_CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GniState {
    pub k: usize,
    pub q: DVector<f64>,
    /// `p_{k-1/2}`.
    pub p_half: DVector<f64>,
    pub p_node: Option<DVector<f64>>,
}

fn check_admissible<S: ConstrainedSystem + ?Sized>(sys: &S, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
    check_dims(sys, q, p)?;
    let residual = momentum_residual(sys, q, p);
    if !(residual <= ADMISSIBLE_TOL) {
        return Err(Error::InadmissibleInitialState { residual });
    }
    Ok(residual)
}

/// `p_{1/2} = p₀ + (h/2) 𝒫(q₀)ᵀ f(q₀, u₀)`.
pub fn gni_init<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q0: &DVector<f64>,
    p0: &DVector<f64>,
    u0: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>> {
    check_admissible(sys, q0, p0)?;
    let pr = projectors(sys, q0)?;
    let f = generalized_force(sys, q0, u0);
    Ok(p0 + pr.p.transpose() * f * (0.5 * h))
}

/// `(q_k, p_{k-1/2}) ↦ (q_{k+1}, p_{k+1/2})`.
pub fn gni_step<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    p_half: &DVector<f64>,
    u: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let pr = projectors(sys, q)?;
    let f = generalized_force(sys, q, u);
    let p_next = p_half - pr.q.transpose() * p_half * 2.0 + pr.p.transpose() * f * h;
    let q_next = q + sys.mass().inverse() * &p_next * h;
    Ok((q_next, p_next))
}

/// Node momentum from the half steps on either side. Both one-sided
/// formulas are evaluated; their mean is returned.
pub fn gni_node_momentum<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    p_half_before: &DVector<f64>,
    p_half_after: &DVector<f64>,
    u: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>> {
    let pt = projectors(sys, q)?.p.transpose();
    let impulse = &pt * generalized_force(sys, q, u) * (0.5 * h);
    let from_before = &pt * p_half_before + &impulse;
    let from_after = &pt * p_half_after - &impulse;
    let discrepancy = (&from_before - &from_after).amax();
    let scale = from_before.amax().max(1.0);
    if !(discrepancy <= NODE_CONSISTENCY_TOL * scale) {
        return Err(Error::InconsistentStates { discrepancy });
    }
    Ok((from_before + from_after) * 0.5)
}

/// Final node momentum from the last half step only.
pub fn gni_final_momentum<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    p_half_before: &DVector<f64>,
    u: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>> {
    let pt = projectors(sys, q)?.p.transpose();
    Ok(&pt * p_half_before + &pt * generalized_force(sys, q, u) * (0.5 * h))
}

#[derive(Debug, Clone)]
pub struct GniTrajectory {
    /// `q_0 … q_N`.
    pub q: Vec<DVector<f64>>,
    /// Node momenta `p_0 … p_N`.
    pub p: Vec<DVector<f64>>,
    /// `p_{1/2} … p_{N-1/2}`.
    pub p_half: Vec<DVector<f64>>,
    pub warnings: Vec<String>,
}

pub fn gni_trajectory<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q0: &DVector<f64>,
    p0: &DVector<f64>,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
) -> Result<GniTrajectory> {
    gni_trajectory_partial(sys, q0, p0, controls, h, steps)?.into_result()
}

/// Like [`gni_trajectory`] but keeps the nodes computed before a failing
/// step. Invalid input is still an outer error.
pub fn gni_trajectory_partial<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q0: &DVector<f64>,
    p0: &DVector<f64>,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
) -> Result<Partial<GniTrajectory>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
    }
    let residual = check_admissible(sys, q0, p0)?;
    let mut traj = GniTrajectory {
        q: vec![q0.clone()],
        p: vec![p0.clone()],
        p_half: Vec::with_capacity(steps),
        warnings: Vec::new(),
    };
    if residual > CONSTRAINT_WARN_TOL {
        traj.warnings
            .push(format!("initial momentum violates the constraints by {residual:e}"));
    }
    if steps == 0 {
        return Ok(Partial::complete(traj));
    }
    let u = |k: usize| controls(k as f64 * h);
    let p_half = gni_init(sys, q0, p0, &u(0), h)?;
    traj.q.push(q0 + sys.mass().inverse() * &p_half * h);
    traj.p_half.push(p_half);
    let mut run = || -> Result<()> {
        for k in 1..steps {
            let (q_next, p_next) =
                gni_step(sys, &traj.q[k], &traj.p_half[k - 1], &u(k), h).map_err(|e| e.at_step(k))?;
            let node =
                gni_node_momentum(sys, &traj.q[k], &traj.p_half[k - 1], &p_next, &u(k), h).map_err(|e| e.at_step(k))?;
            traj.p.push(node);
            traj.q.push(q_next);
            traj.p_half.push(p_next);
        }
        let last = gni_final_momentum(sys, &traj.q[steps], &traj.p_half[steps - 1], &u(steps), h)
            .map_err(|e| e.at_step(steps))?;
        traj.p.push(last);
        Ok(())
    };
    let error = run().err();
    Ok(Partial { value: traj, error })
}

impl GniTrajectory {
    /// Integrator state at node `k`, available for `1 ≤ k ≤ N`.
    pub fn state(&self, k: usize) -> Option<GniState> {
        if k == 0 || k > self.p_half.len() {
            return None;
        }
        Some(GniState {
            k,
            q: self.q[k].clone(),
            p_half: self.p_half[k - 1].clone(),
            p_node: self.p.get(k).cloned(),
        })
    }
}

/// Node state of the multiplier form.
#[derive(Debug, Clone, PartialEq)]
pub struct RattleState {
    pub q: DVector<f64>,
    pub p: DVector<f64>,
    pub lambda: DVector<f64>,
}

/// Multiplier `λ₀ = -(μM⁻¹μᵀ)⁻¹ μM⁻¹ f₀` that makes the first RATTLE half
/// step coincide with the projected initialization.
pub fn initial_multiplier<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    let m = sys.num_constraints();
    if m == 0 {
        return Ok(DVector::zeros(0));
    }
    projectors(sys, q)?;
    let mu = sys.constraints(q);
    let minv = sys.mass().inverse();
    let gram = &mu * minv * mu.transpose();
    let f = generalized_force(sys, q, u);
    gram.cholesky()
        .map(|c| -c.solve(&(&mu * (minv * f))))
        .ok_or(Error::SingularConstraint { det: 0.0 })
}

/// One RATTLE step `(q_k, p_k, λ_k) ↦ (q_{k+1}, p_{k+1}, λ_{k+1})`.
pub fn rattle_step<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    state: &RattleState,
    u: &DVector<f64>,
    u_next: &DVector<f64>,
    h: f64,
) -> Result<RattleState> {
    let minv = sys.mass().inverse();
    let mut p_half = &state.p + generalized_force(sys, &state.q, u) * (0.5 * h);
    if sys.num_constraints() > 0 {
        p_half += sys.constraints(&state.q).transpose() * &state.lambda * (0.5 * h);
    }
    let q_next = &state.q + minv * &p_half * h;
    let p_free = p_half + generalized_force(sys, &q_next, u_next) * (0.5 * h);
    if sys.num_constraints() == 0 {
        return Ok(RattleState {
            q: q_next,
            p: p_free,
            lambda: DVector::zeros(0),
        });
    }
    // μ(q_{k+1}) M⁻¹ (p_free + (h/2) μᵀλ) = 0
    projectors(sys, &q_next)?;
    let mu = sys.constraints(&q_next);
    let gram = &mu * minv * mu.transpose();
    let chol = gram.cholesky().ok_or(Error::SingularConstraint { det: 0.0 })?;
    let lambda = -chol.solve(&(&mu * (minv * &p_free))) * (2.0 / h);
    let p_next = p_free + mu.transpose() * &lambda * (0.5 * h);
    Ok(RattleState {
        q: q_next,
        p: p_next,
        lambda,
    })
}

pub fn rattle_trajectory<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q0: &DVector<f64>,
    p0: &DVector<f64>,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
) -> Result<Vec<RattleState>> {
    rattle_trajectory_partial(sys, q0, p0, controls, h, steps)?.into_result()
}

pub fn rattle_trajectory_partial<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q0: &DVector<f64>,
    p0: &DVector<f64>,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
) -> Result<Partial<Vec<RattleState>>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
    }
    check_admissible(sys, q0, p0)?;
    let u = |k: usize| controls(k as f64 * h);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(RattleState {
        q: q0.clone(),
        p: p0.clone(),
        lambda: initial_multiplier(sys, q0, &u(0))?,
    });
    for k in 0..steps {
        match rattle_step(sys, &out[k], &u(k), &u(k + 1), h) {
            Ok(next) => out.push(next),
            Err(e) => {
                return Ok(Partial {
                    value: out,
                    error: Some(e.at_step(k + 1)),
                })
            }
        }
    }
    Ok(Partial::complete(out))
}

/// Fraction of sign changes between successive increments of a momentum
/// sequence, pooled over components with non-negligible increments. Values
/// near 1 indicate a period-two oscillation.
pub fn oscillation_index(momenta: &[DVector<f64>]) -> f64 {
    if momenta.len() < 3 {
        return 0.0;
    }
    let n = momenta[0].len();
    let (mut flips, mut total) = (0usize, 0usize);
    for j in 0..n {
        let scale = momenta.iter().map(|p| p[j].abs()).fold(0.0, f64::max).max(1e-300);
        for w in momenta.windows(3) {
            let d1 = w[1][j] - w[0][j];
            let d2 = w[2][j] - w[1][j];
            if d1.abs() <= 1e-12 * scale || d2.abs() <= 1e-12 * scale {
                continue;
            }
            total += 1;
            if d1 * d2 < 0.0 {
                flips += 1;
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        flips as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::{MassMatrix, PhaseState};
    use crate::models::sleigh::closed_form;
    use crate::models::{PlanarParticle, Sleigh, SleighParams};
    use nalgebra::DMatrix;

    struct Free(MassMatrix);

    impl ConstrainedSystem for Free {
        fn dim(&self) -> usize {
            2
        }
        fn num_constraints(&self) -> usize {
            0
        }
        fn mass(&self) -> &MassMatrix {
            &self.0
        }
        fn potential_gradient(&self, _q: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![-1.0, 0.0])
        }
        fn constraints(&self, _q: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::zeros(0, 2)
        }
    }

    fn free() -> Free {
        Free(MassMatrix::new(DMatrix::identity(2, 2)).unwrap())
    }

    fn none(_t: f64) -> DVector<f64> {
        DVector::zeros(0)
    }

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn init_with_force_on_free_particle() {
        let p = gni_init(&free(), &v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &none(0.0), 0.1).unwrap();
        assert!((p - v(&[0.05, 0.0])).amax() < 1e-16);
    }

    #[test]
    fn init_rejects_inadmissible_state() {
        let sys = Sleigh::new(SleighParams::default()).unwrap();
        let err = gni_init(&sys, &v(&[0.0, 0.0, 0.0]), &v(&[0.0, 0.0, 0.1]), &none(0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::InadmissibleInitialState { .. }));
    }

    #[test]
    fn sleigh_step_matches_printed_update() {
        let params = SleighParams::default();
        let sys = Sleigh::new(params).unwrap();
        for (vin, vout) in [([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]), ([0.0, 1.0, 0.0], [0.0, 1.0, 0.0])] {
            let q = v(&[0.0, 0.0, 0.0]);
            let p = sys.mass().matrix() * v(&vin);
            let (q1, p1) = gni_step(&sys, &q, &p, &none(0.0), 0.1).unwrap();
            let v1 = sys.mass().inverse() * p1;
            assert!((&v1 - v(&vout)).amax() < 1e-15);
            assert!((q1 - v(&vout) * 0.1).amax() < 1e-15);
            let printed = closed_form::gni_velocity_update(&params, 0.0, &vin);
            assert!((v1 - v(&printed)).amax() < 1e-15);
        }
    }

    #[test]
    fn node_momentum_for_example_step() {
        let sys = Sleigh::new(SleighParams::default()).unwrap();
        let q = v(&[0.0, 0.0, 0.0]);
        let before = v(&[1.0, 0.0, 0.0]);
        let (_, after) = gni_step(&sys, &q, &before, &none(0.0), 0.1).unwrap();
        let node = gni_node_momentum(&sys, &q, &before, &after, &none(0.0), 0.1).unwrap();
        let pt = projectors(&sys, &q).unwrap().p.transpose();
        assert!((&node - pt * v(&[0.5, 0.0, 0.5])).amax() < 1e-15);
        assert!(momentum_residual(&sys, &q, &node) < 1e-15);
    }

    #[test]
    fn corrupted_half_steps_are_detected() {
        let sys = Sleigh::new(SleighParams::default()).unwrap();
        let q = v(&[0.0, 0.0, 0.0]);
        let err = gni_node_momentum(&sys, &q, &v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]), &none(0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::InconsistentStates { .. }));
    }

    #[test]
    fn free_particle_is_leapfrog() {
        let sys = Free(MassMatrix::new(DMatrix::identity(2, 2) * 2.0).unwrap());
        struct NoForce<'a>(&'a Free);
        impl ConstrainedSystem for NoForce<'_> {
            fn dim(&self) -> usize {
                2
            }
            fn num_constraints(&self) -> usize {
                0
            }
            fn mass(&self) -> &MassMatrix {
                self.0.mass()
            }
            fn constraints(&self, _q: &DVector<f64>) -> DMatrix<f64> {
                DMatrix::zeros(0, 2)
            }
        }
        let traj = gni_trajectory(&NoForce(&sys), &v(&[0.0, 1.0]), &v(&[2.0, 0.0]), &none, 0.25, 1).unwrap();
        assert!((&traj.q[1] - v(&[0.25, 1.0])).amax() < 1e-16);
        assert_eq!(traj.p[1], v(&[2.0, 0.0]));
    }

    #[test]
    fn sleigh_straight_gliding() {
        let sys = Sleigh::new(SleighParams::default()).unwrap();
        let s0 = sys.state_from_body_velocity(&[0.0, 0.0, 0.0], 0.0, 1.0);
        let p0 = s0.momentum(&sys);
        let traj = gni_trajectory(&sys, &s0.q, &p0, &none, 0.1, 20).unwrap();
        for p in &traj.p {
            assert!((p - &p0).amax() < 1e-15);
        }
        assert!((traj.q[20][1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn rattle_matches_projected_form() {
        let sys = Sleigh::new(SleighParams::default()).unwrap();
        let s0: PhaseState = sys.state_from_body_velocity(&[0.3, 0.0, 0.0], 1.0, 0.5);
        let p0 = s0.momentum(&sys);
        let gni = gni_trajectory(&sys, &s0.q, &p0, &none, 0.05, 200).unwrap();
        let rattle = rattle_trajectory(&sys, &s0.q, &p0, &none, 0.05, 200).unwrap();
        for k in 0..=200 {
            assert!((&gni.q[k] - &rattle[k].q).amax() < 1e-12);
            assert!((&gni.p[k] - &rattle[k].p).amax() < 1e-12);
        }
    }

    #[test]
    fn particle_conserves_horizontal_momentum() {
        let sys = PlanarParticle::new(1.5, 9.81).unwrap();
        let traj = gni_trajectory(&sys, &v(&[0.0, 2.0]), &v(&[0.3, 0.0]), &none, 0.01, 1000).unwrap();
        for p in &traj.p {
            assert_eq!(p[0], 0.3);
            assert!(p[1].abs() < 1e-15);
        }
        let lambda = initial_multiplier(&sys, &v(&[0.0, 2.0]), &none(0.0)).unwrap()[0];
        assert!((lambda - 1.5 * 9.81).abs() < 1e-14);
    }

    #[test]
    fn oscillation_index_detects_period_two() {
        let alt: Vec<_> = (0..10).map(|k| v(&[if k % 2 == 0 { 1.0 } else { -1.0 }])).collect();
        assert_eq!(oscillation_index(&alt), 1.0);
        let smooth: Vec<_> = (0..10).map(|k| v(&[k as f64])).collect();
        assert_eq!(oscillation_index(&smooth), 0.0);
    }
}
