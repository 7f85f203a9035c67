//! Wootters concurrence.

use nalgebra::SymmetricEigen;

use crate::algebra::{pauli, r, Axis, Operator, Site, StateVector, EE, EG, GE, GG};
use crate::error::{Error, Result};
use crate::master_equation::DensityMatrix;

/// Eigenvalue moduli below this are treated as exact zeros before the square root.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;
/// Largest imaginary part tolerated in the spectrum of ρρ̃.
pub const IMAGINARY_LIMIT: f64 = 1e-6;
/// Iteration cap for the Schur decomposition of `ρρ̃`.
pub const SCHUR_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalue moduli, descending. Ties need no
    /// special ordering since only the sum of the lower three enters.
    pub xi: [f64; 4],
}

impl ConcurrenceResult {
    fn from_moduli(mut moduli: [f64; 4]) -> Self {
        for m in &mut moduli {
            if *m < EIGENVALUE_CLAMP {
                *m = 0.0;
            }
        }
        let mut xi = moduli.map(f64::sqrt);
        xi.sort_by(|a, b| b.total_cmp(a));
        let value = (xi[0] - xi[1] - xi[2] - xi[3]).max(0.0);
        Self { value, xi }
    }
}

fn sigma_yy() -> Operator {
    pauli(Axis::Y, Site::One) * pauli(Axis::Y, Site::Two)
}

/// `ρ̃ = (σʸ ⊗ σʸ) ρ* (σʸ ⊗ σʸ)` with entrywise conjugation in the fixed basis.
pub fn spin_flip(rho: &DensityMatrix) -> Operator {
    flip(rho.matrix())
}

fn flip(m: &Operator) -> Operator {
    let yy = sigma_yy();
    yy * m.conjugate() * yy
}

/// Concurrence from the spectrum of the non-Hermitian product `ρρ̃`.
///
/// Complex Schur iteration can stall when `ρρ̃` is a multiple of the identity
/// up to rounding (the maximally mixed state, for one). In that case the
/// spectrum is taken from the isospectral Hermitian form instead, see
/// [`concurrence_hermitian`].
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let product = rho.matrix() * spin_flip(rho);
    let Some(spectrum) = product
        .try_schur(f64::EPSILON, SCHUR_ITERATIONS)
        .and_then(|schur| schur.eigenvalues())
    else {
        return concurrence_hermitian(rho);
    };
    let bad = spectrum
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite() || z.im.abs() >= IMAGINARY_LIMIT);
    if bad {
        return Err(Error::NumericDegeneracy {
            spectrum: spectrum.iter().map(|z| (z.re, z.im)).collect(),
        });
    }
    Ok(ConcurrenceResult::from_moduli(std::array::from_fn(|k| {
        spectrum[k].norm()
    })))
}

fn hermitian_sqrt(m: &Operator) -> Operator {
    let eig = SymmetricEigen::new((m + m.adjoint()) * r(0.5));
    let roots = eig.eigenvalues.map(|x| r(x.max(0.0).sqrt()));
    eig.eigenvectors * Operator::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Concurrence from the Hermitian matrix `√ρ ρ̃ √ρ`, which is isospectral
/// with `ρρ̃`.
pub fn concurrence_hermitian(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let root = hermitian_sqrt(rho.matrix());
    let sandwich = root * spin_flip(rho) * root;
    let eig = SymmetricEigen::new((sandwich + sandwich.adjoint()) * r(0.5));
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericDegeneracy {
            spectrum: eig.eigenvalues.iter().map(|&x| (x, 0.0)).collect(),
        });
    }
    Ok(ConcurrenceResult::from_moduli(std::array::from_fn(|k| {
        eig.eigenvalues[k].max(0.0)
    })))
}

/// `2|a_ee·a_gg − a_ge·a_eg|` for a normalized pure state.
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!("state norm is {n}, expected 1")));
    }
    Ok(2.0 * (psi[EE] * psi[GG] - psi[GE] * psi[EG]).norm())
}
