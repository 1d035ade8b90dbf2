//! Explicit Runge–Kutta integration of the continuous constrained dynamics.
//! RK2 is the comparison baseline; RK4 at a fine step serves as the oracle.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Partial, Result};
use crate::mech::{continuous_accel, ConstrainedSystem, PhaseState, CONSTRAINT_WARN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkScheme {
    /// Explicit midpoint rule.
    Rk2,
    /// Classical fourth-order scheme.
    Rk4,
}

impl fmt::Display for RkScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RkScheme::Rk2 => "rk2",
            RkScheme::Rk4 => "rk4",
        })
    }
}

impl FromStr for RkScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rk2" => Ok(RkScheme::Rk2),
            "rk4" => Ok(RkScheme::Rk4),
            other => Err(format!("unknown Runge-Kutta scheme '{other}'")),
        }
    }
}

fn rate<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    q: &DVector<f64>,
    v: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let (a, _) = continuous_accel(sys, q, v, u)?;
    Ok((v.clone(), a))
}

/// One step of the first-order system `q̇ = v, v̇ = a(q, v, u(t))`.
/// Controls are sampled at the stage times.
pub fn reference_step<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    state: &PhaseState,
    t: f64,
    h: f64,
    controls: &dyn Fn(f64) -> DVector<f64>,
    scheme: RkScheme,
) -> Result<PhaseState> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step size must be positive, got {h}")));
    }
    let (q, v) = (&state.q, &state.v);
    match scheme {
        RkScheme::Rk2 => {
            let (dq1, dv1) = rate(sys, q, v, &controls(t))?;
            let qm = q + &dq1 * (0.5 * h);
            let vm = v + &dv1 * (0.5 * h);
            let (dq2, dv2) = rate(sys, &qm, &vm, &controls(t + 0.5 * h))?;
            Ok(PhaseState::new(q + dq2 * h, v + dv2 * h))
        }
        RkScheme::Rk4 => {
            let uh = controls(t + 0.5 * h);
            let (dq1, dv1) = rate(sys, q, v, &controls(t))?;
            let (dq2, dv2) = rate(sys, &(q + &dq1 * (0.5 * h)), &(v + &dv1 * (0.5 * h)), &uh)?;
            let (dq3, dv3) = rate(sys, &(q + &dq2 * (0.5 * h)), &(v + &dv2 * (0.5 * h)), &uh)?;
            let (dq4, dv4) = rate(sys, &(q + &dq3 * h), &(v + &dv3 * h), &controls(t + h))?;
            let w = h / 6.0;
            Ok(PhaseState::new(
                q + (dq1 + dq2 * 2.0 + dq3 * 2.0 + dq4) * w,
                v + (dv1 + dv2 * 2.0 + dv3 * 2.0 + dv4) * w,
            ))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceTrajectory {
    /// States at `t_k = k h`, `k = 0..=N`.
    pub states: Vec<PhaseState>,
    pub warnings: Vec<String>,
}

pub fn reference_trajectory<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    initial: PhaseState,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    scheme: RkScheme,
) -> Result<ReferenceTrajectory> {
    reference_trajectory_partial(sys, initial, controls, h, steps, scheme).into_result()
}

/// States up to the first failing step.
pub fn reference_trajectory_partial<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    initial: PhaseState,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    scheme: RkScheme,
) -> Partial<ReferenceTrajectory> {
    let mut warnings = Vec::new();
    if sys.num_constraints() > 0 {
        let r = (sys.constraints(&initial.q) * &initial.v).amax();
        if r > CONSTRAINT_WARN_TOL {
            warnings.push(format!("initial velocity violates the constraints by {r:e}"));
        }
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial);
    for k in 0..steps {
        match reference_step(sys, &states[k], k as f64 * h, h, controls, scheme) {
            Ok(next) => states.push(next),
            Err(e) => {
                return Partial {
                    value: ReferenceTrajectory { states, warnings },
                    error: Some(e.at_step(k + 1)),
                }
            }
        }
    }
    Partial::complete(ReferenceTrajectory { states, warnings })
}

/// States at every `stride`-th step of a fine run, i.e. at the nodes of a
/// grid with step `stride · h`.
pub fn reference_sampled<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    initial: PhaseState,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    stride: usize,
    scheme: RkScheme,
) -> Result<Vec<PhaseState>> {
    let stride = stride.max(1);
    let mut out = Vec::with_capacity(steps / stride + 1);
    let mut state = initial;
    out.push(state.clone());
    for k in 0..steps {
        state = reference_step(sys, &state, k as f64 * h, h, controls, scheme).map_err(|e| e.at_step(k + 1))?;
        if (k + 1) % stride == 0 {
            out.push(state.clone());
        }
    }
    Ok(out)
}

/// Final state only, without storing the path.
pub fn reference_final_state<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    initial: PhaseState,
    controls: &dyn Fn(f64) -> DVector<f64>,
    h: f64,
    steps: usize,
    scheme: RkScheme,
) -> Result<PhaseState> {
    let mut state = initial;
    for k in 0..steps {
        state = reference_step(sys, &state, k as f64 * h, h, controls, scheme).map_err(|e| e.at_step(k + 1))?;
    }
    Ok(state)
}
