//! Planar rigid motions: the group SE(2), its algebra se(2), and the
//! retraction maps used to step group-valued configurations.
//!
//! Algebra elements are stored in coordinates `(w, x, y)` with respect to the
//! basis whose hat images are
//!
//! ```text
//!        [ 0 -w  x ]
//! v̂  =   [ w  0  y ]
//!        [ 0  0  0 ]
//! ```
//!
//! and group elements as `(theta, x, y)` for the homogeneous matrix
//! `[[cos θ, -sin θ, x], [sin θ, cos θ, y], [0, 0, 1]]`. Angles are kept
//! unwrapped: composition adds them without reduction modulo 2π.
//!
//! All tangent maps are *right-trivialized*: `dτ_v δ = (Dτ(v)·δ) τ(v)⁻¹`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// 3×3 matrix acting on algebra coordinates (`[ad_v]`, `[dτ⁻¹_v]`, ...).
pub type TangentMatrix = Matrix3<f64>;

/// Bernoulli numbers `B_0..B_3` driving the `dexp⁻¹` series.
pub const BERNOULLI: [f64; 4] = [1.0, -0.5, 1.0 / 6.0, 0.0];

const SMALL_ANGLE: f64 = 1e-4;
const ALGEBRA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraVector {
    /// Angular component.
    pub w: f64,
    pub x: f64,
    pub y: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector { w: 0.0, x: 0.0, y: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64) -> Self {
        Self { w, x, y }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.w, self.x, self.y)
    }

    pub fn norm(self) -> f64 {
        self.to_vector().norm()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    pub fn hat(self) -> Matrix3<f64> {
        Matrix3::new(
            0.0, -self.w, self.x, //
            self.w, 0.0, self.y, //
            0.0, 0.0, 0.0,
        )
    }

    /// Inverse of [`hat`](Self::hat). Rejects matrices that are not in se(2).
    pub fn unhat(m: &Matrix3<f64>) -> Result<Self> {
        let off = [
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
            m[(0, 1)] + m[(1, 0)],
        ];
        let magnitude = off.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()));
        if magnitude > ALGEBRA_TOL || !magnitude.is_finite() {
            return Err(Error::MalformedAlgebra { magnitude });
        }
        Ok(Self::new(m[(1, 0)], m[(0, 2)], m[(1, 2)]))
    }

    /// Matrix of `ad_v = [v, ·]` in algebra coordinates.
    pub fn ad_matrix(self) -> TangentMatrix {
        ad_matrix(self)
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(self, other: AlgebraVector) -> AlgebraVector {
        AlgebraVector::from_vector(&(ad_matrix(self) * other.to_vector()))
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.w + o.w, self.x + o.x, self.y + o.y)
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.w - o.w, self.x - o.x, self.y - o.y)
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        AlgebraVector::new(-self.w, -self.x, -self.y)
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> AlgebraVector {
        AlgebraVector::new(self.w * s, self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupElement {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        theta: 0.0,
        x: 0.0,
        y: 0.0,
    };

    pub const fn new(theta: f64, x: f64, y: f64) -> Self {
        Self { theta, x, y }
    }

    pub const fn rotation(theta: f64) -> Self {
        Self::new(theta, 0.0, 0.0)
    }

    pub const fn translation(x: f64, y: f64) -> Self {
        Self::new(0.0, x, y)
    }

    pub fn to_matrix(self) -> Matrix3<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix3::new(
            c, -s, self.x, //
            s, c, self.y, //
            0.0, 0.0, 1.0,
        )
    }

    /// Reads a homogeneous matrix; the angle comes back in `(-π, π]`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(1, 0)].atan2(m[(0, 0)]), m[(0, 2)], m[(1, 2)])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta, self.x, self.y]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    fn rotate(theta: f64, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        (c * x - s * y, s * x + c * y)
    }

    /// Group product `self · other`.
    pub fn compose(self, other: GroupElement) -> GroupElement {
        let (rx, ry) = Self::rotate(self.theta, other.x, other.y);
        GroupElement::new(self.theta + other.theta, self.x + rx, self.y + ry)
    }

    pub fn inverse(self) -> GroupElement {
        let (rx, ry) = Self::rotate(-self.theta, self.x, self.y);
        GroupElement::new(-self.theta, -rx, -ry)
    }

    /// `Ad_g v = (g v̂ g⁻¹)^∨`.
    pub fn adjoint(self, v: AlgebraVector) -> AlgebraVector {
        let (rx, ry) = Self::rotate(self.theta, v.x, v.y);
        AlgebraVector::new(v.w, rx + v.w * self.y, ry - v.w * self.x)
    }

    pub fn adjoint_matrix(self) -> TangentMatrix {
        let (s, c) = self.theta.sin_cos();
        Matrix3::new(
            1.0, 0.0, 0.0, //
            self.y, c, -s, //
            -self.x, s, c,
        )
    }

    /// Euclidean size of the coordinates with the angle reduced to `(-π, π]`.
    pub fn coordinate_norm(self) -> f64 {
        let t = wrap_angle(self.theta);
        (t * t + self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

pub fn ad_matrix(v: AlgebraVector) -> TangentMatrix {
    Matrix3::new(
        0.0, 0.0, 0.0, //
        v.y, 0.0, -v.w, //
        -v.x, v.w, 0.0,
    )
}

/// `sin(w)/w` and `(1 - cos w)/w`, with Taylor branches near zero.
fn sinc_pair(w: f64) -> (f64, f64) {
    if w.abs() < SMALL_ANGLE {
        let w2 = w * w;
        let s = 1.0 - w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0));
        let c = w / 2.0 * (1.0 - w2 / 12.0 * (1.0 - w2 / 30.0 * (1.0 - w2 / 56.0)));
        (s, c)
    } else {
        let half = (0.5 * w).sin();
        (w.sin() / w, 2.0 * half * half / w)
    }
}

pub fn exp_se2(v: AlgebraVector) -> GroupElement {
    let (s, c) = sinc_pair(v.w);
    GroupElement::new(v.w, v.x * s - v.y * c, v.x * c + v.y * s)
}

/// Cayley map `(I - v̂/2)⁻¹ (I + v̂/2)` in closed form.
pub fn cay_se2(v: AlgebraVector) -> GroupElement {
    let d = 4.0 + v.w * v.w;
    GroupElement::new(
        2.0 * (v.w / 2.0).atan(),
        (4.0 * v.x - 2.0 * v.w * v.y) / d,
        (4.0 * v.y + 2.0 * v.w * v.x) / d,
    )
}

/// Canonical coordinates of the second kind, factors in basis order.
pub fn ccsk_se2(v: AlgebraVector) -> GroupElement {
    exp_se2(AlgebraVector::new(v.w, 0.0, 0.0))
        .compose(exp_se2(AlgebraVector::new(0.0, v.x, 0.0)))
        .compose(exp_se2(AlgebraVector::new(0.0, 0.0, v.y)))
}

/// `Σ_{j≤order} B_j/j! [ad_v]^j`.
pub fn dexp_inv_matrix(v: AlgebraVector, order: u32) -> Result<TangentMatrix> {
    if !(1..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(format!(
            "dexp^-1 series order {order} (supported: 1, 2, 3)"
        )));
    }
    let ad = ad_matrix(v);
    let mut out = TangentMatrix::identity();
    let mut power = TangentMatrix::identity();
    let mut factorial = 1.0;
    for j in 1..=order as usize {
        power *= ad;
        factorial *= j as f64;
        out += power * (BERNOULLI[j] / factorial);
    }
    Ok(out)
}

/// `Σ_{j≤order} 1/(j+1)! [ad_v]^j`, the truncated forward tangent of exp.
pub fn dexp_matrix(v: AlgebraVector, order: u32) -> TangentMatrix {
    let ad = ad_matrix(v);
    let mut out = TangentMatrix::identity();
    let mut power = TangentMatrix::identity();
    let mut factorial = 1.0;
    for j in 1..=order as usize {
        power *= ad;
        factorial *= (j + 1) as f64;
        out += power / factorial;
    }
    out
}

/// Exact `[dcay⁻¹_v] = I - ½[ad_v] + ¼[v¹·v, 0, 0]`.
pub fn dcay_inv_matrix(v: AlgebraVector) -> TangentMatrix {
    let mut m = TangentMatrix::identity() - ad_matrix(v) * 0.5;
    let col = v.to_vector() * (0.25 * v.w);
    m[(0, 0)] += col[0];
    m[(1, 0)] += col[1];
    m[(2, 0)] += col[2];
    m
}

/// Right-trivialized tangent of [`ccsk_se2`]. Only the angular coordinate
/// enters: the columns are `e₁`, `Ad_{exp(v¹e₁)} e₂` and `Ad_{exp(v¹e₁)} e₃`.
pub fn dccsk_matrix(v: AlgebraVector) -> TangentMatrix {
    let (s, c) = v.w.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, c, -s, //
        0.0, s, c,
    )
}

pub fn dccsk_inv_matrix(v: AlgebraVector) -> TangentMatrix {
    dccsk_matrix(v).transpose()
}

/// Choice of retraction `τ: se(2) → SE(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retraction {
    #[default]
    Exp,
    Cay,
    Ccsk,
}

impl Retraction {
    pub fn apply(self, v: AlgebraVector) -> GroupElement {
        match self {
            Retraction::Exp => exp_se2(v),
            Retraction::Cay => cay_se2(v),
            Retraction::Ccsk => ccsk_se2(v),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Retraction::Exp => "exp",
            Retraction::Cay => "cay",
            Retraction::Ccsk => "ccsk",
        }
    }
}

impl fmt::Display for Retraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Retraction {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exp" => Ok(Retraction::Exp),
            "cay" => Ok(Retraction::Cay),
            "ccsk" => Ok(Retraction::Ccsk),
            other => Err(format!("unknown retraction '{other}' (expected exp, cay or ccsk)")),
        }
    }
}

/// How `dτ⁻¹` is evaluated.
///
/// `Series(1)` is the shared first-order truncation `I - ½ad`, consistent
/// with both `exp` and `cay`. Orders 2 and 3 extend the Bernoulli series and
/// only apply to `exp`. `Exact` is available for `cay` and `ccsk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtauInverse {
    Series(u32),
    Exact,
}

impl Default for DtauInverse {
    fn default() -> Self {
        DtauInverse::Series(1)
    }
}

impl fmt::Display for DtauInverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtauInverse::Series(n) => write!(f, "{n}"),
            DtauInverse::Exact => f.write_str("exact"),
        }
    }
}

impl FromStr for DtauInverse {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(DtauInverse::Exact),
            n => n
                .parse::<u32>()
                .map(DtauInverse::Series)
                .map_err(|_| format!("invalid dtau order '{n}' (expected 1, 2, 3 or exact)")),
        }
    }
}

/// Checks that `approx` is a consistent tangent approximation for `tau`.
pub fn check_dtau(tau: Retraction, approx: DtauInverse) -> Result<()> {
    match (tau, approx) {
        (Retraction::Exp, DtauInverse::Series(1..=3)) => Ok(()),
        (Retraction::Cay, DtauInverse::Series(1)) => Ok(()),
        (Retraction::Cay | Retraction::Ccsk, DtauInverse::Exact) => Ok(()),
        (tau, approx) => Err(Error::UnsupportedOrder(format!(
            "dtau^-1 '{approx}' is not available for tau = {tau}"
        ))),
    }
}

pub fn dtau_inv_matrix(tau: Retraction, approx: DtauInverse, v: AlgebraVector) -> Result<TangentMatrix> {
    check_dtau(tau, approx)?;
    match (tau, approx) {
        (_, DtauInverse::Series(n)) => dexp_inv_matrix(v, n),
        (Retraction::Cay, DtauInverse::Exact) => Ok(dcay_inv_matrix(v)),
        (_, DtauInverse::Exact) => Ok(dccsk_inv_matrix(v)),
    }
}

/// Derivative with respect to `v` of the covector map `v ↦ [dτ⁻¹_v]ᵀ mu`.
/// Column `i` holds the partial derivative along the `i`-th coordinate.
pub fn dtau_inv_transpose_jacobian(
    tau: Retraction,
    approx: DtauInverse,
    v: AlgebraVector,
    mu: &Vector3<f64>,
) -> Result<Matrix3<f64>> {
    check_dtau(tau, approx)?;
    let basis = [
        AlgebraVector::new(1.0, 0.0, 0.0),
        AlgebraVector::new(0.0, 1.0, 0.0),
        AlgebraVector::new(0.0, 0.0, 1.0),
    ];
    let mut jac = Matrix3::zeros();
    match (tau, approx) {
        (Retraction::Ccsk, _) => {
            let (s, c) = v.w.sin_cos();
            jac[(1, 0)] = -s * mu[1] - c * mu[2];
            jac[(2, 0)] = c * mu[1] - s * mu[2];
        }
        (_, DtauInverse::Series(n)) => {
            let ad = ad_matrix(v);
            for (i, e) in basis.iter().enumerate() {
                let ad_e = ad_matrix(*e);
                let mut col = -(ad_e.transpose() * mu) * 0.5;
                if n >= 2 {
                    col += (ad_e * ad + ad * ad_e).transpose() * mu / 12.0;
                }
                jac.set_column(i, &col);
            }
        }
        (_, DtauInverse::Exact) => {
            for (i, e) in basis.iter().enumerate() {
                let ad_e = ad_matrix(*e);
                jac.set_column(i, &(-(ad_e.transpose() * mu) * 0.5));
            }
            let vmu = v.to_vector().dot(mu);
            jac[(0, 0)] += 0.25 * (vmu + v.w * mu[0]);
            jac[(0, 1)] += 0.25 * v.w * mu[1];
            jac[(0, 2)] += 0.25 * v.w * mu[2];
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn close3(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    fn group_close(a: GroupElement, b: GroupElement, tol: f64) -> bool {
        close3(&a.to_matrix(), &b.to_matrix(), tol)
    }

    #[test]
    fn hat_matches_layout() {
        assert_eq!(AlgebraVector::ZERO.hat(), Matrix3::zeros());
        let m = AlgebraVector::new(1.0, 2.0, 3.0).hat();
        assert_eq!(m, Matrix3::new(0.0, -1.0, 2.0, 1.0, 0.0, 3.0, 0.0, 0.0, 0.0));
        assert_eq!(AlgebraVector::unhat(&m).unwrap(), AlgebraVector::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn unhat_rejects_non_algebra() {
        let mut m = AlgebraVector::new(1.0, 2.0, 3.0).hat();
        m[(2, 2)] = 1e-6;
        assert!(matches!(AlgebraVector::unhat(&m), Err(Error::MalformedAlgebra { .. })));
        let mut m = AlgebraVector::new(1.0, 2.0, 3.0).hat();
        m[(0, 1)] = 0.5;
        assert!(AlgebraVector::unhat(&m).is_err());
        let mut m = AlgebraVector::new(1.0, 2.0, 3.0).hat();
        m[(2, 0)] = 5e-10;
        assert!(AlgebraVector::unhat(&m).is_ok());
    }

    #[test]
    fn compose_by_hand() {
        let g = GroupElement::new(0.3, -1.0, 2.0);
        assert_eq!(GroupElement::IDENTITY.compose(g), g);
        assert!(group_close(g.compose(g.inverse()), GroupElement::IDENTITY, 1e-15));
        let r = GroupElement::new(FRAC_PI_2, 1.0, 0.0).compose(GroupElement::new(0.0, 1.0, 0.0));
        assert_relative_eq!(r.theta, FRAC_PI_2);
        assert_relative_eq!(r.x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = GroupElement::new(2.1, 0.4, -3.0);
        let b = GroupElement::new(-0.7, 1.5, 0.25);
        assert!(close3(
            &a.compose(b).to_matrix(),
            &(a.to_matrix() * b.to_matrix()),
            1e-12
        ));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_se2(AlgebraVector::ZERO), GroupElement::IDENTITY);
        assert_eq!(
            exp_se2(AlgebraVector::new(0.0, 1.0, 2.0)),
            GroupElement::new(0.0, 1.0, 2.0)
        );
        let g = exp_se2(AlgebraVector::new(FRAC_PI_2, 1.0, 0.0));
        assert_relative_eq!(g.theta, FRAC_PI_2);
        assert_relative_eq!(g.x, 2.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(g.y, 2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn exp_continuous_across_zero_angle() {
        let base = exp_se2(AlgebraVector::new(0.0, 0.7, -1.3));
        for eps in [1e-6, 1e-8, 5e-5, 1.5e-4] {
            let g = exp_se2(AlgebraVector::new(eps, 0.7, -1.3));
            let d = ((g.x - base.x).powi(2) + (g.y - base.y).powi(2)).sqrt();
            assert!(d <= 2.0 * eps, "eps {eps}: {d}");
        }
        // Taylor and closed-form branches agree at the switch point.
        let w = SMALL_ANGLE * (1.0 - 1e-12);
        let (s, c) = sinc_pair(w);
        assert_relative_eq!(s, w.sin() / w, max_relative = 1e-15);
        assert_relative_eq!(c, 2.0 * (0.5 * w).sin().powi(2) / w, max_relative = 1e-15);
    }

    #[test]
    fn cay_examples() {
        assert_eq!(cay_se2(AlgebraVector::ZERO), GroupElement::IDENTITY);
        let g = cay_se2(AlgebraVector::new(2.0, 0.0, 0.0));
        assert!(close3(
            &g.to_matrix(),
            &Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0),
            1e-15
        ));
        assert_eq!(
            cay_se2(AlgebraVector::new(0.0, 0.3, -4.0)),
            GroupElement::new(0.0, 0.3, -4.0)
        );
    }

    #[test]
    fn cay_matches_definition() {
        for v in [
            AlgebraVector::new(0.4, -1.0, 2.0),
            AlgebraVector::new(-3.0, 0.5, 0.1),
            AlgebraVector::new(7.0, 2.0, -2.0),
        ] {
            let half = v.hat() * 0.5;
            let i = Matrix3::identity();
            let def = (i - half).try_inverse().unwrap() * (i + half);
            assert!(close3(&cay_se2(v).to_matrix(), &def, 1e-14));
        }
    }

    #[test]
    fn ccsk_examples() {
        assert_eq!(ccsk_se2(AlgebraVector::ZERO), GroupElement::IDENTITY);
        let v = AlgebraVector::new(0.0, 0.6, -0.2);
        assert_eq!(ccsk_se2(v), exp_se2(v));
        let g = ccsk_se2(AlgebraVector::new(FRAC_PI_2, 1.0, 0.0));
        assert!(group_close(g, GroupElement::new(FRAC_PI_2, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn ad_and_adjoint() {
        let ad = ad_matrix(AlgebraVector::new(2.0, 0.0, 0.0));
        assert_eq!(ad, Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 2.0, 0.0));
        let v = AlgebraVector::new(0.3, -1.2, 0.8);
        assert_eq!(GroupElement::IDENTITY.adjoint(v), v);
        let g = GroupElement::new(1.1, 2.0, -0.5);
        let conj = g.to_matrix() * v.hat() * g.inverse().to_matrix();
        let expected = AlgebraVector::unhat(&conj).unwrap();
        let got = g.adjoint(v);
        assert!((got.to_vector() - expected.to_vector()).norm() < 1e-14);
        assert!((g.adjoint_matrix() * v.to_vector() - expected.to_vector()).norm() < 1e-14);
    }

    #[test]
    fn ad_is_matrix_commutator() {
        let a = AlgebraVector::new(0.7, -0.2, 1.4);
        let b = AlgebraVector::new(-1.1, 0.5, 0.3);
        let comm = a.hat() * b.hat() - b.hat() * a.hat();
        let expected = AlgebraVector::unhat(&comm).unwrap();
        assert!((a.bracket(b).to_vector() - expected.to_vector()).norm() < 1e-15);
    }

    #[test]
    fn dexp_inv_series() {
        assert_eq!(BERNOULLI, [1.0, -0.5, 1.0 / 6.0, 0.0]);
        for order in 1..=3 {
            assert_eq!(
                dexp_inv_matrix(AlgebraVector::ZERO, order).unwrap(),
                Matrix3::identity()
            );
        }
        let v = AlgebraVector::new(2.0, 0.0, 0.0);
        let ad = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 2.0, 0.0);
        let expected = Matrix3::identity() - ad * 0.5 + ad * ad / 12.0;
        assert!(close3(&dexp_inv_matrix(v, 2).unwrap(), &expected, 1e-15));
        assert_eq!(dexp_inv_matrix(v, 3).unwrap(), dexp_inv_matrix(v, 2).unwrap());
        assert!(matches!(dexp_inv_matrix(v, 0), Err(Error::UnsupportedOrder(_))));
        assert!(dexp_inv_matrix(v, 4).is_err());
    }

    #[test]
    fn dcay_inv_examples() {
        assert_eq!(dcay_inv_matrix(AlgebraVector::ZERO), Matrix3::identity());
        let m = dcay_inv_matrix(AlgebraVector::new(2.0, 0.0, 0.0));
        assert_eq!(m, Matrix3::new(2.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, -1.0, 1.0));
        let v = AlgebraVector::new(0.0, 1.0, 0.0);
        assert_eq!(dcay_inv_matrix(v), Matrix3::identity() - ad_matrix(v) * 0.5);
    }

    #[test]
    fn dtau_combinations() {
        use DtauInverse::*;
        use Retraction::*;
        for (tau, approx, ok) in [
            (Exp, Series(1), true),
            (Exp, Series(2), true),
            (Exp, Series(3), true),
            (Exp, Exact, false),
            (Cay, Series(1), true),
            (Cay, Series(2), false),
            (Cay, Exact, true),
            (Ccsk, Series(1), false),
            (Ccsk, Exact, true),
            (Exp, Series(4), false),
        ] {
            assert_eq!(check_dtau(tau, approx).is_ok(), ok, "{tau} {approx}");
        }
    }

    /// Central differences of the retraction itself, right-trivialized.
    fn numeric_dtau(tau: Retraction, v: AlgebraVector) -> Matrix3<f64> {
        let eps = 1e-6;
        let inv = tau.apply(v).to_matrix().try_inverse().unwrap();
        let mut out = Matrix3::zeros();
        for i in 0..3 {
            let mut d = Vector3::zeros();
            d[i] = eps;
            let dv = AlgebraVector::from_vector(&d);
            let diff = (tau.apply(v + dv).to_matrix() - tau.apply(v - dv).to_matrix()) / (2.0 * eps);
            let col = AlgebraVector::unhat(&(diff * inv)).unwrap();
            out.set_column(i, &col.to_vector());
        }
        out
    }

    #[test]
    fn exact_tangents_match_retraction_derivatives() {
        let v = AlgebraVector::new(0.8, -0.4, 1.1);
        let dcay = numeric_dtau(Retraction::Cay, v);
        assert!(close3(&(dcay_inv_matrix(v) * dcay), &Matrix3::identity(), 1e-8));
        let dccsk = numeric_dtau(Retraction::Ccsk, v);
        assert!(close3(&dccsk, &dccsk_matrix(v), 1e-8));
        let dexp = numeric_dtau(Retraction::Exp, v);
        // 30 terms of the forward series converge to the exact tangent here.
        assert!(close3(&dexp, &dexp_matrix(v, 30), 1e-8));
    }

    #[test]
    fn dtau_transpose_jacobian_matches_differences() {
        use DtauInverse::*;
        let v = AlgebraVector::new(0.6, 0.3, -0.9);
        let mu = Vector3::new(1.3, -0.4, 0.7);
        for (tau, approx) in [
            (Retraction::Exp, Series(1)),
            (Retraction::Exp, Series(2)),
            (Retraction::Cay, Series(1)),
            (Retraction::Cay, Exact),
            (Retraction::Ccsk, Exact),
        ] {
            let jac = dtau_inv_transpose_jacobian(tau, approx, v, &mu).unwrap();
            let eps = 1e-6;
            for i in 0..3 {
                let mut d = Vector3::zeros();
                d[i] = eps;
                let dv = AlgebraVector::from_vector(&d);
                let f = |w: AlgebraVector| dtau_inv_matrix(tau, approx, w).unwrap().transpose() * mu;
                let fd = (f(v + dv) - f(v - dv)) / (2.0 * eps);
                assert!((fd - jac.column(i)).norm() < 1e-8, "{tau} {approx} col {i}");
            }
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(0.5), 0.5);
        assert_relative_eq!(wrap_angle(2.0 * PI + 0.5), 0.5, epsilon = 1e-12);
    }
}
