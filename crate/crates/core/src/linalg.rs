//! Dense complex kernel: state vectors, square operators, certified projectors
//! and unitary propagators for Hilbert spaces of a few dimensions.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Operator identities (idempotence, self-adjointness, unitarity).
pub const EPS_OP: f64 = 1e-10;
/// State norms.
pub const EPS_NORM: f64 = 1e-12;
/// History overlaps and probability sums.
pub const EPS_CONS: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A ket in a finite-dimensional Hilbert space. Not necessarily normalized:
/// chain kets carry history weights in their norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            amps: DVector::from_vec(amplitudes),
        })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// The `index`-th computational basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: DVector::zeros(dim),
        }
    }

    pub(crate) fn from_dvector(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(c(1.0 / n, 0.0)))
    }

    /// Checks the unit-norm requirement for initial conditions.
    pub fn require_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            amps: &self.amps * factor,
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            amps: &self.amps + &other.amps,
        })
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            amps: &self.amps - &other.amps,
        })
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `|<u|v>| = 1` test for normalized states; global phase is ignored.
    pub fn same_ray(&self, other: &StateVector, tol: f64) -> Result<bool> {
        let ov = inner(self, other)?.norm();
        Ok((ov - self.norm() * other.norm()).abs() <= tol)
    }
}

/// Square complex matrix acting on a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<Complex64>,
}

impl Operator {
    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            m: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub(crate) fn from_matrix(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub(crate) fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Complex64> {
        self.m.transpose().as_slice().to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            m: &self.m * factor,
        }
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), v.dim())?;
        Ok(StateVector::from_dvector(&self.m * v.as_dvector()))
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &StateVector) -> Result<Complex64> {
        inner(v, &self.apply(v)?)
    }

    /// Max-norm `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(max_abs(&(&self.m - &other.m)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        max_abs(&(&self.m - self.m.adjoint())) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        max_abs(&(self.m.adjoint() * &self.m - DMatrix::identity(n, n))) <= tol
    }

    /// Eigenvalues of a self-adjoint operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_self_adjoint(EPS_OP) {
            return Err(Error::NotSelfAdjoint {
                deviation: max_abs(&(&self.m - self.m.adjoint())),
            });
        }
        let eig = hermitize(&self.m).symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|col| {
                    let z = self.m[(r, col)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Symmetrizes away roundoff so the eigensolver sees an exactly Hermitian matrix.
fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// An operator certified idempotent and self-adjoint within [`EPS_OP`],
/// carrying a short label such as `x1+`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    op: Operator,
    label: String,
}

impl Projector {
    /// Certifies `op` as a projector.
    pub fn new(op: Operator, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let herm = op.max_abs_diff(&op.adjoint())?;
        let idem = op.mul(&op)?.max_abs_diff(&op)?;
        let deviation = herm.max(idem);
        if deviation > EPS_OP {
            return Err(Error::NotProjector { label, deviation });
        }
        Ok(Self { op, label })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim),
            label: "1".to_string(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            op: Operator::zeros(dim),
            label: "0".to_string(),
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.op.trace().re.round() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.op
            .max_abs_diff(&Operator::identity(self.dim()))
            .map(|d| d <= EPS_OP)
            .unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        self.op.max_abs() <= EPS_OP
    }

    /// The orthogonal complement `I - P`.
    pub fn complement(&self, label: impl Into<String>) -> Self {
        let op = Operator::identity(self.dim())
            .sub(&self.op)
            .expect("same dimension");
        Self {
            op,
            label: label.into(),
        }
    }
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.as_dvector().dotc(v.as_dvector()))
}

/// Kronecker product of two kets; the first factor varies slowest.
pub fn tensor_states(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector::from_dvector(a.as_dvector().kronecker(b.as_dvector()))
}

/// Kronecker product of two operators; the first factor varies slowest.
pub fn tensor_ops(a: &Operator, b: &Operator) -> Operator {
    Operator::from_matrix(a.matrix().kronecker(b.matrix()))
}

/// Kronecker product of two projectors, itself a projector.
pub fn tensor_projectors(a: &Projector, b: &Projector, label: impl Into<String>) -> Projector {
    Projector {
        op: tensor_ops(a.op(), b.op()),
        label: label.into(),
    }
}

/// Rank-1 projector `|v><v| / <v|v>`.
pub fn projector_onto(v: &StateVector, label: impl Into<String>) -> Result<Projector> {
    let u = v.normalized()?;
    let d = u.as_dvector();
    let m = d * d.adjoint();
    Ok(Projector {
        op: Operator::from_matrix(m),
        label: label.into(),
    })
}

/// `exp(-i h duration)` for self-adjoint `h` (ħ = 1), via eigendecomposition.
pub fn unitary_exp(h: &Operator, duration: f64) -> Result<Operator> {
    let deviation = h.max_abs_diff(&h.adjoint())?;
    if deviation > EPS_OP {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    if duration == 0.0 || h.max_abs() == 0.0 {
        return Ok(Operator::identity(h.dim()));
    }
    let eig = hermitize(h.matrix()).symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| {
        let angle = -e * duration;
        c(angle.cos(), angle.sin())
    }));
    let v = &eig.eigenvectors;
    Ok(Operator::from_matrix(v * phases * v.adjoint()))
}

/// `‖PQ − QP‖max ≤ tol`.
pub fn commutes(p: &Operator, q: &Operator, tol: f64) -> Result<bool> {
    Ok(commutator_norm(p, q)? <= tol)
}

pub fn commutator_norm(p: &Operator, q: &Operator) -> Result<f64> {
    p.mul(q)?.max_abs_diff(&q.mul(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp() -> StateVector {
        StateVector::from_real(&[1.0, 0.0]).unwrap()
    }
    fn zm() -> StateVector {
        StateVector::from_real(&[0.0, 1.0]).unwrap()
    }
    fn xp() -> StateVector {
        let s = 0.5f64.sqrt();
        StateVector::from_real(&[s, s]).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert!((inner(&xp(), &xp()).unwrap() - c(1.0, 0.0)).norm() < EPS_NORM);
        assert!(inner(&zp(), &zm()).unwrap().norm() < EPS_NORM);
        let v = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!((inner(&v, &v).unwrap() - c(1.0, 0.0)).norm() < EPS_NORM);
        // conjugate-linear in the first slot
        let iv = v.scale(c(0.0, 1.0));
        let z = inner(&iv, &zp()).unwrap();
        let w = inner(&v, &zp()).unwrap();
        assert!((z - c(0.0, -1.0) * w).norm() < 1e-15);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = StateVector::basis(2, 0);
        let b = StateVector::basis(4, 0);
        assert!(matches!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        let i4 = tensor_ops(&Operator::identity(2), &Operator::identity(2));
        assert_eq!(i4, Operator::identity(4));
        let v = tensor_states(&zp(), &zm());
        assert_eq!(v, StateVector::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap());
        let za = tensor_ops(
            projector_onto(&zp(), "z+").unwrap().op(),
            &Operator::identity(2),
        );
        let xb = tensor_ops(
            &Operator::identity(2),
            projector_onto(&xp(), "x+").unwrap().op(),
        );
        assert!(commutes(&za, &xb, EPS_OP).unwrap());
    }

    #[test]
    fn projector_examples() {
        let pz = projector_onto(&zp(), "z+").unwrap();
        let diag =
            Operator::from_rows(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(pz.op().max_abs_diff(&diag).unwrap() < EPS_OP);

        // unnormalized input is normalized internally
        let px = projector_onto(&StateVector::from_real(&[3.0, 3.0]).unwrap(), "x+").unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert!((px.op().entry(r, col) - c(0.5, 0.0)).norm() < EPS_OP);
            }
        }
        assert!((px.op().trace() - c(1.0, 0.0)).norm() < EPS_OP);
        assert_eq!(px.rank(), 1);

        let u = StateVector::new(vec![c(0.3, -0.2), c(1.1, 0.4)]).unwrap();
        let expected = xp().scale(inner(&xp(), &u).unwrap());
        assert!(px.op().apply(&u).unwrap().max_abs_diff(&expected).unwrap() < EPS_OP);
    }

    #[test]
    fn projector_rejects_zero_vector_and_non_projectors() {
        assert!(matches!(
            projector_onto(&StateVector::zeros(2), "0"),
            Err(Error::ZeroVector)
        ));
        let not_idem = Operator::identity(2).scale(c(2.0, 0.0));
        assert!(matches!(
            Projector::new(not_idem, "2"),
            Err(Error::NotProjector { .. })
        ));
    }

    #[test]
    fn unitary_exp_zero_generator_is_identity() {
        let u = unitary_exp(&Operator::zeros(3), 17.0).unwrap();
        assert_eq!(u, Operator::identity(3));
    }

    #[test]
    fn unitary_exp_rotates_z_up_to_z_down() {
        // closed form: exp(-i θ S_y) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]
        let sy =
            Operator::from_rows(2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]).unwrap();
        let omega = 2.0;
        let u = unitary_exp(&sy.scale(c(omega, 0.0)), std::f64::consts::PI / omega).unwrap();
        let out = u.apply(&zp()).unwrap();
        assert!(out.same_ray(&zm(), 1e-12).unwrap());
        let theta = 0.77;
        let u = unitary_exp(&sy, theta).unwrap();
        let (s, co) = (theta / 2.0).sin_cos();
        let closed =
            Operator::from_rows(2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]).unwrap();
        assert!(u.max_abs_diff(&closed).unwrap() < 1e-13);
    }

    #[test]
    fn unitary_exp_rejects_non_hermitian() {
        let h =
            Operator::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            unitary_exp(&h, 1.0),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn commutes_examples() {
        let pz = projector_onto(&zp(), "z+").unwrap();
        let pzm = projector_onto(&zm(), "z-").unwrap();
        let s = 0.5f64.sqrt();
        let yp = StateVector::new(vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let px = projector_onto(&xp(), "x+").unwrap();
        let py = projector_onto(&yp, "y+").unwrap();
        assert!(commutes(pz.op(), pzm.op(), EPS_OP).unwrap());
        assert!(!commutes(px.op(), py.op(), EPS_OP).unwrap());
        assert!(commutes(px.op(), &Operator::identity(2), EPS_OP).unwrap());
        assert!(commutes(px.op(), &Operator::identity(4), EPS_OP).is_err());
    }
}
