//! Four-dimensional state and operator algebra for the two-ion system.
//!
//! Two orderings are used throughout:
//!
//! * product basis `[|00>, |01>, |10>, |11>]`, where the first digit is ion 1;
//! * collective basis `[|g>, |s>, |a>, |e>]` with `|g> = |00>`, `|e> = |11>`,
//!   `|s> = (|01> + |10>)/sqrt2` and `|a> = (|01> - |10>)/sqrt2`.
//!
//! Consequently `(|s> + |a>)/sqrt2 = |01>` and `(|s> - |a>)/sqrt2 = |10>`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Amplitudes = Vector4<C64>;
pub type Matrix = Matrix4<C64>;

/// Slack allowed above unit norm for states coming out of an integrator.
pub const NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `[|00>, |01>, |10>, |11>]`
    Product,
    /// `[|g>, |s>, |a>, |e>]`
    Collective,
}

/// Collective levels, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    S = 1,
    A = 2,
    E = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::G, Level::S, Level::A, Level::E];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Amplitudes,
    basis: Basis,
}

impl StateVector {
    /// Builds a state, rejecting non-finite amplitudes and squared norms
    /// outside `(0, 1 + NORM_SLACK]`.
    pub fn new(amplitudes: Amplitudes, basis: Basis) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm_sqr = amplitudes.norm_squared();
        if norm_sqr <= 0.0 || norm_sqr > 1.0 + NORM_SLACK {
            return Err(Error::BadNorm(norm_sqr));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Builds a state without the norm check. Used for intermediate results
    /// such as projections, which may legitimately vanish.
    pub fn unchecked(amplitudes: Amplitudes, basis: Basis) -> Self {
        Self { amplitudes, basis }
    }

    pub fn from_array(amplitudes: [C64; 4], basis: Basis) -> Result<Self> {
        Self::new(Amplitudes::from(amplitudes), basis)
    }

    pub fn basis_state(basis: Basis, index: usize) -> Self {
        assert!(index < 4, "basis index {index} out of range");
        let mut amplitudes = Amplitudes::zeros();
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes, basis }
    }

    pub fn level(level: Level) -> Self {
        Self::basis_state(Basis::Collective, level.index())
    }

    /// `(|s> + |a>)/sqrt2`, i.e. `|01>`, written in the collective basis.
    pub fn s_plus_a() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked(
            Amplitudes::new(C64::default(), h, h, C64::default()),
            Basis::Collective,
        )
    }

    /// `(|s> - |a>)/sqrt2`, i.e. `|10>`, written in the collective basis.
    pub fn s_minus_a() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked(
            Amplitudes::new(C64::default(), h, -h, C64::default()),
            Basis::Collective,
        )
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        expect_basis(self.basis, other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::unchecked(self.amplitudes * factor, self.basis)
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_distance(&self, other: &StateVector) -> Result<f64> {
        expect_basis(self.basis, other.basis)?;
        Ok((self.amplitudes - other.amplitudes)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    pub fn to_collective(&self) -> Result<StateVector> {
        to_collective(self)
    }

    pub fn to_product(&self) -> Result<StateVector> {
        to_product(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: Matrix,
    basis: Basis,
}

impl Operator {
    pub fn new(matrix: Matrix, basis: Basis) -> Self {
        Self { matrix, basis }
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new(Matrix::zeros(), basis)
    }

    pub fn identity(basis: Basis) -> Self {
        Self::new(Matrix::identity(), basis)
    }

    pub fn diagonal(entries: [C64; 4], basis: Basis) -> Self {
        Self::new(Matrix::from_diagonal(&Vector4::from(entries)), basis)
    }

    /// `|psi><psi|`
    pub fn projector(state: &StateVector) -> Self {
        let v = state.amplitudes();
        Self::new(v * v.adjoint(), state.basis())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.adjoint(), self.basis)
    }

    /// `max |(H - H^dagger)_ij|`
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        expect_basis(self.basis, rhs.basis)?;
        Ok(Self::new(self.matrix * rhs.matrix, self.basis))
    }

    pub fn column(&self, index: usize) -> StateVector {
        StateVector::unchecked(self.matrix.column(index).into_owned(), self.basis)
    }

    pub fn max_distance(&self, other: &Operator) -> Result<f64> {
        expect_basis(self.basis, other.basis)?;
        Ok(max_abs(&(self.matrix - other.matrix)))
    }

    /// Re-expresses the operator in the requested basis.
    pub fn in_basis(&self, basis: Basis) -> Operator {
        let u = basis_transform();
        let matrix = match (self.basis, basis) {
            (Basis::Product, Basis::Collective) => u * self.matrix * u.adjoint(),
            (Basis::Collective, Basis::Product) => u.adjoint() * self.matrix * u,
            _ => self.matrix,
        };
        Operator::new(matrix, basis)
    }
}

impl Mul<&StateVector> for &Operator {
    type Output = Result<StateVector>;

    fn mul(self, rhs: &StateVector) -> Result<StateVector> {
        apply(self, rhs)
    }
}

pub(crate) fn expect_basis(expected: Basis, found: Basis) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::BasisMismatch { expected, found })
    }
}

pub(crate) fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unitary taking product-basis amplitudes to collective-basis amplitudes.
///
/// Rows are the collective states expressed in the product basis, so the
/// middle block is a 2x2 Hadamard.
pub fn basis_transform() -> Matrix {
    let one = C64::new(1.0, 0.0);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::default();
    Matrix::new(
        one, z, z, z, //
        z, h, h, z, //
        z, h, -h, z, //
        z, z, z, one,
    )
}

pub fn to_collective(s: &StateVector) -> Result<StateVector> {
    expect_basis(Basis::Product, s.basis())?;
    Ok(StateVector::unchecked(
        basis_transform() * s.amplitudes(),
        Basis::Collective,
    ))
}

pub fn to_product(s: &StateVector) -> Result<StateVector> {
    expect_basis(Basis::Collective, s.basis())?;
    Ok(StateVector::unchecked(
        basis_transform().adjoint() * s.amplitudes(),
        Basis::Product,
    ))
}

/// Plain matrix-vector product; the result is not renormalized.
pub fn apply(op: &Operator, s: &StateVector) -> Result<StateVector> {
    expect_basis(op.basis(), s.basis())?;
    Ok(StateVector::unchecked(
        op.matrix() * s.amplitudes(),
        s.basis(),
    ))
}

/// Squared moduli of the four amplitudes, in basis order.
pub fn populations(s: &StateVector) -> [f64; 4] {
    let a = s.amplitudes();
    [
        a[0].norm_sqr(),
        a[1].norm_sqr(),
        a[2].norm_sqr(),
        a[3].norm_sqr(),
    ]
}
