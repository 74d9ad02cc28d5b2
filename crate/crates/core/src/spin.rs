//! Spin-½ kinematics: direction bases, spin components, Born weights and the
//! two-spin singlet.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    c, inner, projector_onto, tensor_ops, tensor_states, Operator, Projector, StateVector,
};

/// A direction in 3-space given by polar angle `theta ∈ [0, π]` and azimuth
/// `phi ∈ [0, 2π)`, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let ok = theta.is_finite()
            && phi.is_finite()
            && (0.0..=PI).contains(&theta)
            && (0.0..2.0 * PI).contains(&phi);
        if !ok {
            return Err(Error::InvalidDirection { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    /// Accepts any finite angles and folds them into the canonical ranges.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidDirection { theta, phi });
        }
        let st = theta.sin();
        let v = [st * phi.cos(), st * phi.sin(), theta.cos()];
        Self::from_vector(v)
    }

    /// Direction of a non-zero 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidDirection {
                theta: f64::NAN,
                phi: f64::NAN,
            });
        }
        let theta = (v[2] / n).clamp(-1.0, 1.0).acos();
        let mut phi = v[1].atan2(v[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub const fn x() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub const fn y() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        }
    }

    pub const fn z() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// Looks up `x`, `y`, `z`, `-x`, `-y`, `-z`.
    pub fn named(name: &str) -> Option<Self> {
        let d = match name {
            "x" => Self::x(),
            "y" => Self::y(),
            "z" => Self::z(),
            "-x" => Self {
                theta: FRAC_PI_2,
                phi: PI,
            },
            "-y" => Self {
                theta: FRAC_PI_2,
                phi: 3.0 * FRAC_PI_2,
            },
            "-z" => Self {
                theta: PI,
                phi: 0.0,
            },
            _ => return None,
        };
        Some(d)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let st = self.theta.sin();
        [st * self.phi.cos(), st * self.phi.sin(), self.theta.cos()]
    }

    /// The antipodal direction.
    pub fn opposite(&self) -> Self {
        let v = self.unit_vector();
        Self::from_vector([-v[0], -v[1], -v[2]]).expect("unit vector")
    }

    /// Angle between the two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let (a, b) = (self.unit_vector(), other.unit_vector());
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }

    /// Same point on the sphere, within `tol` in Euclidean distance.
    pub fn approx_eq(&self, other: &Direction, tol: f64) -> bool {
        let (a, b) = (self.unit_vector(), other.unit_vector());
        let d2: f64 = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum();
        d2.sqrt() <= tol
    }

    /// Short name for the six axis directions, `w(theta,phi)` otherwise.
    pub fn label(&self) -> String {
        for name in ["x", "y", "z", "-x", "-y", "-z"] {
            if Self::named(name) == Some(*self) {
                return name.to_string();
            }
        }
        format!("w({},{})", self.theta, self.phi)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Outcome sign of a spin component measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// Subsystem tag in a two-spin system; `A` is the slow Kronecker factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn symbol(self) -> char {
        match self {
            Subsystem::A => 'A',
            Subsystem::B => 'B',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinBasis {
    pub plus: StateVector,
    pub minus: StateVector,
    pub direction: Direction,
}

impl SpinBasis {
    pub fn ket(&self, sign: Sign) -> &StateVector {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

/// `|w+> = (cos θ/2, e^{iφ} sin θ/2)`, `|w-> = (-e^{-iφ} sin θ/2, cos θ/2)` in
/// the z basis.
pub fn basis_for(w: Direction) -> SpinBasis {
    let (s, co) = (w.theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, w.phi);
    let plus = StateVector::new(vec![c(co, 0.0), e * s]).expect("dim 2");
    let minus = StateVector::new(vec![-e.conj() * s, c(co, 0.0)]).expect("dim 2");
    SpinBasis {
        plus,
        minus,
        direction: w,
    }
}

pub fn spin_ket(w: Direction, sign: Sign) -> StateVector {
    basis_for(w).ket(sign).clone()
}

/// `[w±]` with label `<direction><sign>`.
pub fn spin_projector(w: Direction, sign: Sign) -> Projector {
    let label = format!("{}{}", w.label(), sign.symbol());
    projector_onto(&spin_ket(w, sign), label).expect("unit ket")
}

/// `S_w = ½ (w·σ)`.
pub fn spin_operator(w: Direction) -> Operator {
    let [nx, ny, nz] = w.unit_vector();
    Operator::from_rows(
        2,
        &[
            c(0.5 * nz, 0.0),
            c(0.5 * nx, -0.5 * ny),
            c(0.5 * nx, 0.5 * ny),
            c(-0.5 * nz, 0.0),
        ],
    )
    .expect("2x2")
}

/// `|<w^sign|state>|²` for a normalized spin-½ state.
pub fn born_probability(state: &StateVector, w: Direction, sign: Sign) -> Result<f64> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.dim(),
        });
    }
    state.require_normalized()?;
    Ok(inner(&spin_ket(w, sign), state)?.norm_sqr())
}

/// The singlet `(|z+>|z-> − |z->|z+>)/√2`, amplitudes `(0, 1/√2, −1/√2, 0)`.
pub fn singlet() -> StateVector {
    StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("dim 4")
}

/// The singlet built from the `w` basis instead of `z`; equal to [`singlet`]
/// up to a global phase for every `w`.
pub fn singlet_along(w: Direction) -> StateVector {
    let b = basis_for(w);
    let up_down = tensor_states(&b.plus, &b.minus);
    let down_up = tensor_states(&b.minus, &b.plus);
    up_down
        .sub(&down_up)
        .expect("dim 4")
        .scale(c(FRAC_1_SQRT_2, 0.0))
}

/// Embeds a single-spin operator into the two-spin space on subsystem `s`.
pub fn on_subsystem(op: &Operator, s: Subsystem) -> Operator {
    let id = Operator::identity(op.dim());
    match s {
        Subsystem::A => tensor_ops(op, &id),
        Subsystem::B => tensor_ops(&id, op),
    }
}

/// `[w±]` on one subsystem of a two-spin system.
pub fn subsystem_projector(w: Direction, sign: Sign, s: Subsystem) -> Projector {
    let p = spin_projector(w, sign);
    let label = format!("{}{}{}", w.label(), s.symbol(), sign.symbol());
    let op = on_subsystem(p.op(), s);
    Projector::new(op, label).expect("embedded projector")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{EPS_NORM, EPS_OP};

    #[test]
    fn basis_for_axes() {
        let z = basis_for(Direction::z());
        assert_eq!(z.plus, StateVector::from_real(&[1.0, 0.0]).unwrap());

        let x = basis_for(Direction::x());
        let s = FRAC_1_SQRT_2;
        assert!(x
            .plus
            .same_ray(&StateVector::from_real(&[s, s]).unwrap(), 1e-15)
            .unwrap());
        // |z+> = (|x+> + |x->)/√2 up to phase: coefficients of equal modulus
        let zp = &z.plus;
        let a = inner(&x.plus, zp).unwrap();
        let b = inner(&x.minus, zp).unwrap();
        assert!((a.norm() - s).abs() < EPS_NORM && (b.norm() - s).abs() < EPS_NORM);

        // y: coefficients (1/√2, −1/√2) up to a global phase
        let y = basis_for(Direction::y());
        let a = inner(&y.plus, zp).unwrap();
        let b = inner(&y.minus, zp).unwrap();
        assert!((a.norm() - s).abs() < EPS_NORM && (b.norm() - s).abs() < EPS_NORM);
        let rebuilt = y.plus.scale(a).add(&y.minus.scale(b)).unwrap();
        assert!(rebuilt.max_abs_diff(zp).unwrap() < EPS_NORM);
    }

    #[test]
    fn theta_pi_uses_explicit_formula() {
        let b = basis_for(Direction::named("-z").unwrap());
        assert!(b
            .plus
            .same_ray(&StateVector::from_real(&[0.0, 1.0]).unwrap(), 1e-15)
            .unwrap());
        assert!((b.plus.norm() - 1.0).abs() < EPS_NORM);
    }

    #[test]
    fn spin_operator_examples() {
        let sz = spin_operator(Direction::z());
        let diag =
            Operator::from_rows(2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]).unwrap();
        assert!(sz.max_abs_diff(&diag).unwrap() < EPS_OP);
        let zp = spin_ket(Direction::z(), Sign::Plus);
        // hand product: S_x (1,0) = (0, ½), so <z+|S_x|z+> = 0
        let sx = spin_operator(Direction::x());
        assert!(sx.expectation(&zp).unwrap().norm() < EPS_OP);
        assert_eq!(sx.hermitian_eigenvalues().unwrap().len(), 2);
    }

    #[test]
    fn spin_operator_eigenstates() {
        let w = Direction::new(1.1, 4.0).unwrap();
        let s = spin_operator(w);
        for sign in Sign::BOTH {
            let k = spin_ket(w, sign);
            let out = s.apply(&k).unwrap();
            let expected = k.scale(c(0.5 * sign.value(), 0.0));
            assert!(out.max_abs_diff(&expected).unwrap() < EPS_OP);
        }
        assert!(s.trace().norm() < EPS_OP);
        let ev = s.hermitian_eigenvalues().unwrap();
        assert!((ev[0] + 0.5).abs() < EPS_OP && (ev[1] - 0.5).abs() < EPS_OP);
    }

    #[test]
    fn born_examples() {
        let zp = spin_ket(Direction::z(), Sign::Plus);
        assert!((born_probability(&zp, Direction::z(), Sign::Plus).unwrap() - 1.0).abs() < 1e-12);
        assert!((born_probability(&zp, Direction::x(), Sign::Plus).unwrap() - 0.5).abs() < 1e-12);
        let theta = 0.9;
        let w = Direction::new(theta, 2.0).unwrap();
        let p = born_probability(&zp, w, Sign::Plus).unwrap();
        assert!((p - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
        assert!(matches!(
            born_probability(&singlet(), Direction::z(), Sign::Plus),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn singlet_examples() {
        let s = singlet();
        assert_eq!(s.amplitudes()[1], c(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitudes()[2], c(-FRAC_1_SQRT_2, 0.0));
        assert!(singlet_along(Direction::x()).same_ray(&s, 1e-12).unwrap());

        // (S_A + S_B)² |singlet> = 0
        let mut total_sq = Operator::zeros(4);
        for w in [Direction::x(), Direction::y(), Direction::z()] {
            let sw = spin_operator(w);
            let tot = on_subsystem(&sw, Subsystem::A)
                .add(&on_subsystem(&sw, Subsystem::B))
                .unwrap();
            total_sq = total_sq.add(&tot.mul(&tot).unwrap()).unwrap();
        }
        assert!(total_sq.apply(&s).unwrap().norm() < EPS_OP);
    }

    #[test]
    fn direction_validation_and_labels() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(0.5, 2.0 * PI).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        assert_eq!(Direction::x().label(), "x");
        assert_eq!(Direction::named("-z").unwrap().label(), "-z");
        assert_eq!(Direction::new(0.5, 1.0).unwrap().label(), "w(0.5,1)");
        let w = Direction::wrapped(-0.5, 7.0).unwrap();
        assert!(w.theta() >= 0.0 && w.phi() < 2.0 * PI);
        assert!(Direction::z()
            .opposite()
            .approx_eq(&Direction::named("-z").unwrap(), 1e-15));
        assert!((Direction::x().angle_to(&Direction::y()) - FRAC_PI_2).abs() < 1e-15);
    }
}
