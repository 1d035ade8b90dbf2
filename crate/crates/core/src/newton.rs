//! Damped Newton iteration for the small implicit systems arising in the
//! RDP step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual infinity norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings tried before accepting a non-decreasing step.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Forward-difference Jacobian with relative step `rel_step`.
pub fn fd_jacobian<F>(residual: &mut F, x: &DVector<f64>, r0: &DVector<f64>, rel_step: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut jac = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.clone();
    for j in 0..x.len() {
        let step = rel_step * x[j].abs().max(1.0);
        xp[j] = x[j] + step;
        // recompute the actual increment to cancel representation error
        let dx = xp[j] - x[j];
        let rp = residual(&xp)?;
        jac.set_column(j, &((rp - r0) / dx));
        xp[j] = x[j];
    }
    Ok(jac)
}

/// Solves `residual(x) = 0` from `x0`. `tolerance` is scaled by `scale`
/// (typically the magnitude of the terms that cancel in the residual), so
/// that round-off in large momenta does not stall convergence.
pub fn solve<F, J>(
    x0: DVector<f64>,
    mut residual: F,
    mut jacobian: J,
    opts: &NewtonOptions,
    scale: f64,
) -> Result<NewtonReport>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
    J: FnMut(&DVector<f64>, &DVector<f64>, &mut F) -> Result<DMatrix<f64>>,
{
    let tol = opts.tolerance * scale.max(1.0);
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut norm = inf_norm(&r);
    let mut iterations = 0;
    while !(norm <= tol) {
        if iterations == opts.max_iterations || !norm.is_finite() {
            return Err(Error::NewtonDivergence {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let jac = jacobian(&x, &r, &mut residual)?;
        let dx = jac.lu().solve(&(-&r)).ok_or(Error::NewtonDivergence {
            iterations,
            residual: norm,
        })?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &dx * t;
            let rt = residual(&trial)?;
            let nt = inf_norm(&rt);
            if nt < norm || nt <= tol {
                accepted = Some((trial, rt, nt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xn, rn, nn)) => {
                x = xn;
                r = rn;
                norm = nn;
            }
            // no decrease along the Newton direction: round-off floor
            None => {
                return Err(Error::NewtonDivergence {
                    iterations,
                    residual: norm,
                })
            }
        }
    }
    Ok(NewtonReport {
        x,
        iterations,
        residual: norm,
    })
}

pub(crate) fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter()
        .fold(0.0, |m, x| if x.abs() > m || x.is_nan() { x.abs() } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F>(x: &DVector<f64>, r: &DVector<f64>, f: &mut F) -> Result<DMatrix<f64>>
    where
        F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
    {
        fd_jacobian(f, x, r, 1e-7)
    }

    #[test]
    fn linear_system_converges_in_one_iteration() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, -1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 4.0]);
        let res = |x: &DVector<f64>| Ok(&a * x - &b);
        let jac = |_: &DVector<f64>, _: &DVector<f64>, _: &mut _| Ok(a.clone());
        let rep = solve(DVector::zeros(2), res, jac, &NewtonOptions::default(), 1.0).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.residual <= 1e-12);
    }

    #[test]
    fn cubic_root_with_fd_jacobian() {
        let res = |x: &DVector<f64>| Ok(DVector::from_vec(vec![x[0] * x[0] * x[0] - 2.0]));
        let rep = solve(DVector::from_vec(vec![1.0]), res, fd, &NewtonOptions::default(), 1.0).unwrap();
        assert!((rep.x[0] - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn damping_handles_overshoot() {
        // atan has a tiny basin for undamped Newton
        let res = |x: &DVector<f64>| Ok(DVector::from_vec(vec![x[0].atan()]));
        let jac =
            |x: &DVector<f64>, _: &DVector<f64>, _: &mut _| Ok(DMatrix::from_element(1, 1, 1.0 / (1.0 + x[0] * x[0])));
        let rep = solve(DVector::from_vec(vec![3.0]), res, jac, &NewtonOptions::default(), 1.0).unwrap();
        assert!(rep.x[0].abs() < 1e-12);
    }

    #[test]
    fn reports_divergence() {
        let res = |x: &DVector<f64>| Ok(DVector::from_vec(vec![x[0] * x[0] + 1.0]));
        let err = solve(DVector::from_vec(vec![0.5]), res, fd, &NewtonOptions::default(), 1.0).unwrap_err();
        assert!(matches!(err, Error::NewtonDivergence { .. }));
    }
}
