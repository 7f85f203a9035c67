//! Fixed-basis complex matrix algebra for two qubits.
//!
//! Every operator is a 4×4 complex matrix over the product basis
//!
//! | index | state        |
//! |-------|--------------|
//! | 0     | \|e⟩₁\|e⟩₂   |
//! | 1     | \|g⟩₁\|e⟩₂   |
//! | 2     | \|e⟩₁\|g⟩₂   |
//! | 3     | \|g⟩₁\|g⟩₂   |
//!
//! so site 1 is the fastest-varying factor: the full operator for a local
//! term is `B ⊗ A` with `A` acting on site 1 and `B` on site 2, each written
//! in the single-qubit basis `(|e⟩, |g⟩)`.
//!
//! Superoperators act on density matrices flattened by **column stacking**:
//! `vec(X)[4·c + r] = X[r, c]`, which gives `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.
//! Switching to row stacking would transpose the Kronecker factors of every
//! superoperator matrix; the physics is unchanged.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A 4×4 complex operator in the fixed two-qubit basis.
pub type Operator = Matrix4<C64>;

/// A two-qubit state vector in the fixed basis.
pub type StateVector = Vector4<C64>;

/// A 16×16 complex matrix acting on column-stacked operators.
pub type Superoperator = SMatrix<C64, 16, 16>;

/// A column-stacked operator.
pub type Vectorized = SVector<C64, 16>;

/// Default tolerance for algebraic identities on 4×4 problems.
pub const ALGEBRA_TOL: f64 = 1e-12;

pub const EE: usize = 0;
pub const GE: usize = 1;
pub const EG: usize = 2;
pub const GG: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Basis vector for one of [`EE`], [`GE`], [`EG`], [`GG`].
pub fn basis_state(index: usize) -> StateVector {
    let mut v = StateVector::zeros();
    v[index] = r(1.0);
    v
}

/// Single-qubit Pauli matrix in the `(|e⟩, |g⟩)` basis, with σᶻ|e⟩ = +|e⟩.
fn pauli_1q(axis: Axis) -> Matrix2<C64> {
    let (o, l, i) = (r(0.0), r(1.0), c(0.0, 1.0));
    match axis {
        Axis::X => Matrix2::new(o, l, l, o),
        Axis::Y => Matrix2::new(o, -i, i, o),
        Axis::Z => Matrix2::new(l, o, o, -l),
    }
}

/// |g⟩⟨e| in the `(|e⟩, |g⟩)` basis.
fn lowering_1q() -> Matrix2<C64> {
    Matrix2::new(r(0.0), r(0.0), r(1.0), r(0.0))
}

fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Operator {
    Operator::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn embed(local: &Matrix2<C64>, site: Site) -> Operator {
    let id = Matrix2::identity();
    match site {
        Site::One => kron2(&id, local),
        Site::Two => kron2(local, &id),
    }
}

/// Pauli operator on `site`, identity on the other qubit.
pub fn pauli(axis: Axis, site: Site) -> Operator {
    embed(&pauli_1q(axis), site)
}

/// Atomic lowering operator |g⟩⟨e| on `site`.
///
/// Its matrix has ones at (1,0) and (3,2) for site 1 and at (2,0) and (3,1)
/// for site 2 (0-based). With σʸ = [[0, −i], [i, 0]] in the `(|e⟩, |g⟩)`
/// basis this equals `(σˣ − iσʸ)/2`.
pub fn lowering(site: Site) -> Operator {
    embed(&lowering_1q(), site)
}

/// `c± = (σ₁ ± σ₂)/√2`.
pub fn collective_lowering(sign: Sign) -> Operator {
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    (lowering(Site::One) + lowering(Site::Two) * r(s)) * r(std::f64::consts::FRAC_1_SQRT_2)
}

/// Kronecker product of two 4×4 operators.
pub fn kron(a: &Operator, b: &Operator) -> Superoperator {
    Superoperator::from_fn(|i, j| a[(i / 4, j / 4)] * b[(i % 4, j % 4)])
}

pub fn vectorize(m: &Operator) -> Vectorized {
    Vectorized::from_fn(|k, _| m[(k % 4, k / 4)])
}

pub fn unvectorize(v: &Vectorized) -> Operator {
    Operator::from_fn(|row, col| v[4 * col + row])
}

/// Unvectorize from an arbitrary slice, checking its length.
pub fn unvectorize_slice(v: &[C64]) -> Result<Operator> {
    if v.len() != 16 {
        return Err(Error::Contract(format!(
            "unvectorize expects 16 entries, got {}",
            v.len()
        )));
    }
    Ok(Operator::from_fn(|row, col| v[4 * col + row]))
}

/// Apply a superoperator to an operator.
pub fn apply(s: &Superoperator, x: &Operator) -> Operator {
    unvectorize(&(s * vectorize(x)))
}

/// `X ↦ A·X`.
pub fn left_multiplication(a: &Operator) -> Superoperator {
    kron(&Operator::identity(), a)
}

/// `X ↦ X·B`.
pub fn right_multiplication(b: &Operator) -> Superoperator {
    kron(&b.transpose(), &Operator::identity())
}

/// `X ↦ −i[H, X]`.
pub fn hamiltonian_generator(h: &Operator) -> Superoperator {
    (left_multiplication(h) - right_multiplication(h)) * c(0.0, -1.0)
}

/// `X ↦ aXa† − a†aX/2 − Xa†a/2`.
pub fn dissipator(a: &Operator) -> Superoperator {
    let ada = a.adjoint() * a;
    kron(&a.conjugate(), a) - (left_multiplication(&ada) + right_multiplication(&ada)) * r(0.5)
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// Direct evaluation of `aXa† − {a†a, X}/2`, without vectorization.
pub fn dissipate(a: &Operator, x: &Operator) -> Operator {
    let ad = a.adjoint();
    let ada = ad * a;
    a * x * ad - (ada * x + x * ada) * r(0.5)
}

/// Largest entrywise modulus.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &Operator) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &Operator, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

/// Matrix exponential (Padé approximant). Does not go through an
/// eigendecomposition, so it can check spectral propagation.
pub fn expm(a: &Operator) -> Operator {
    a.exp()
}
