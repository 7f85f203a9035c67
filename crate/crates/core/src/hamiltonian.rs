//! Ising-coupled, locally driven atom pair: Hamiltonians, closed-form
//! eigensystem and the coherent evolution of |g⟩₁|g⟩₂.
//!
//! `H_tot = 2J σ₁ᶻσ₂ᶻ + α(σ₁ʸ + σ₂ʸ)` with all rates in units of the decay
//! rate γ = 1. Closed evolution is parametrized by the scaled time `τ = J·t`;
//! master-equation time is in units of 1/γ and is never converted implicitly.

use nalgebra::SymmetricEigen;

use crate::algebra::{
    basis_state, c, hermiticity_defect, pauli, r, Axis, Operator, Site, StateVector, EE, EG, GE, GG,
};
use crate::error::{Error, Result};

/// Decay rate. Every other rate is measured in this unit.
pub const GAMMA: f64 = 1.0;

/// Scaled model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Local driving strength.
    pub alpha: f64,
    /// Ising coupling constant.
    pub j: f64,
    /// Feedback strength (units of √γ).
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, j: f64) -> Self {
        Self {
            alpha,
            j,
            lambda: 0.0,
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    /// Drive-to-coupling ratio η = α/J.
    pub fn eta(&self) -> Result<f64> {
        if self.j == 0.0 {
            return Err(Error::Domain("η = α/J is undefined for J = 0".into()));
        }
        Ok(self.alpha / self.j)
    }

    /// η, rejecting the η = 0 point where the closed forms are singular.
    fn nonzero_eta(&self) -> Result<f64> {
        let eta = self.eta()?;
        if eta == 0.0 {
            return Err(Error::Domain(
                "closed forms are singular at η = 0 (α = 0); use numeric_eigensystem".into(),
            ));
        }
        Ok(eta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [f64; 4],
    pub eigenvectors: [StateVector; 4],
}

impl EigenSystem {
    /// Largest `‖H|ψᵢ⟩ − Eᵢ|ψᵢ⟩‖` over the four pairs.
    pub fn max_residual(&self, h: &Operator) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&e, v)| (h * v - v * r(e)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (k, b) in self.eigenvectors.iter().enumerate() {
                let target = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - r(target)).norm());
            }
        }
        worst
    }
}

/// Amplitudes `C₁…C₄` of |g⟩₁|g⟩₂ in the eigenbasis of [`analytic_eigensystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialExpansion {
    pub coefficients: [f64; 4],
}

impl InitialExpansion {
    pub fn norm_squared(&self) -> f64 {
        self.coefficients.iter().map(|x| x * x).sum()
    }
}

/// `2J σ₁ᶻ σ₂ᶻ`.
pub fn build_h_int(p: &ModelParams) -> Operator {
    pauli(Axis::Z, Site::One) * pauli(Axis::Z, Site::Two) * r(2.0 * p.j)
}

/// `α(σ₁ʸ + σ₂ʸ)`.
pub fn build_h_drive(p: &ModelParams) -> Operator {
    (pauli(Axis::Y, Site::One) + pauli(Axis::Y, Site::Two)) * r(p.alpha)
}

pub fn build_h_tot(p: &ModelParams) -> Operator {
    build_h_drive(p) + build_h_int(p)
}

/// The closed-form spectrum `(−2√(α²+J²), −2J, 2J, 2√(α²+J²))` with its
/// eigenvectors.
///
/// The listing assumes J > 0. For J < 0 the vectors keep their form with
/// η < 0 and the outer pair of energies swaps, `E₁ = +2√(α²+J²)`; the phases
/// of [`evolve_closed`] are unchanged in terms of τ.
///
/// Phases follow the closed forms exactly: |ψ₁⟩ and |ψ₄⟩ carry a factor `i`
/// on their `|eg⟩ + |ge⟩` component.
pub fn analytic_eigensystem(p: &ModelParams) -> Result<EigenSystem> {
    let eta = p.nonzero_eta()?;
    let root = (1.0 + eta * eta).sqrt();
    let big = 1.0 + eta * eta;
    let norm1 = 2.0 * (big + root).sqrt();
    let norm4 = 2.0 * (big - root).sqrt();

    let gg_minus_ee = basis_state(GG) - basis_state(EE);
    let eg_plus_ge = basis_state(EG) + basis_state(GE);
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let psi1 = gg_minus_ee * r(eta / norm1) + eg_plus_ge * c(0.0, (1.0 + root) / norm1);
    let psi2 = (basis_state(EG) - basis_state(GE)) * r(h);
    let psi3 = (basis_state(GG) + basis_state(EE)) * r(h);
    let psi4 = gg_minus_ee * r(eta / norm4) + eg_plus_ge * c(0.0, (1.0 - root) / norm4);

    let outer = 2.0 * p.j.signum() * (p.alpha * p.alpha + p.j * p.j).sqrt();
    Ok(EigenSystem {
        eigenvalues: [-outer, -2.0 * p.j, 2.0 * p.j, outer],
        eigenvectors: [psi1, psi2, psi3, psi4],
    })
}

/// Dense Hermitian eigendecomposition, eigenvalues ascending.
pub fn numeric_eigensystem(h: &Operator) -> Result<EigenSystem> {
    let defect = hermiticity_defect(h);
    if defect > 1e-12 {
        return Err(Error::Contract(format!(
            "numeric_eigensystem needs a Hermitian input (defect {defect:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(*h);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = std::array::from_fn(|k| eig.eigenvalues[order[k]]);
    let eigenvectors = std::array::from_fn(|k| eig.eigenvectors.column(order[k]).into_owned());
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Expansion of |g⟩₁|g⟩₂ over [`analytic_eigensystem`]; `C₂ = 0`, `C₃ = 1/√2`.
pub fn initial_expansion(p: &ModelParams) -> Result<InitialExpansion> {
    let eta = p.nonzero_eta()?;
    let big = 1.0 + eta * eta;
    let root = big.sqrt();
    let denom = 2.0 * eta * root;
    let c1 = -(1.0 - root) * (big + root).sqrt() / denom;
    let c4 = (1.0 + root) * (big - root).sqrt() / denom;
    Ok(InitialExpansion {
        coefficients: [c1, 0.0, std::f64::consts::FRAC_1_SQRT_2, c4],
    })
}

/// |Ψ(τ)⟩ = Σᵢ Cᵢ e^{−iEᵢt} |ψᵢ⟩ with `t = τ/J`.
///
/// All four terms are kept. Since `C₂ = 0` this is the three-term sum with
/// phases `e^{+2iτ√(1+η²)}`, `e^{−2iτ}`, `e^{−2iτ√(1+η²)}` on |ψ₁⟩, |ψ₃⟩, |ψ₄⟩.
pub fn evolve_closed(p: &ModelParams, tau: f64) -> Result<StateVector> {
    let eig = analytic_eigensystem(p)?;
    let expansion = initial_expansion(p)?;
    let t = tau / p.j;
    let mut psi = StateVector::zeros();
    for ((&e, v), &amp) in eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .zip(&expansion.coefficients)
    {
        psi += v * (c(0.0, -e * t).exp() * amp);
    }
    Ok(psi)
}

/// The entanglement marker `𝒪 = σ₁ˣ − σ₂ˣ`.
pub fn marker_observable() -> Operator {
    pauli(Axis::X, Site::One) - pauli(Axis::X, Site::Two)
}

/// `2 − η²/(1+η²)·[1 − cos(4τ√(1+η²))]`.
pub fn marker_variance(p: &ModelParams, tau: f64) -> Result<f64> {
    let eta = p.nonzero_eta()?;
    let big = 1.0 + eta * eta;
    Ok(2.0 - eta * eta / big * (1.0 - (4.0 * tau * big.sqrt()).cos()))
}

/// `⟨Ψ|A²|Ψ⟩ − ⟨Ψ|A|Ψ⟩²` for Hermitian `A`.
pub fn variance(a: &Operator, psi: &StateVector) -> f64 {
    let a_psi = a * psi;
    let mean = psi.dotc(&a_psi).re;
    a_psi.norm_squared() - mean * mean
}

/// Marker variance evaluated directly on [`evolve_closed`].
pub fn marker_variance_numeric(p: &ModelParams, tau: f64) -> Result<f64> {
    let psi = evolve_closed(p, tau)?;
    Ok(variance(&marker_observable(), &psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{expm, max_abs};

    fn diag_of(m: &Operator) -> [f64; 4] {
        std::array::from_fn(|k| m[(k, k)].re)
    }

    #[test]
    fn h_int_values() {
        assert_eq!(build_h_int(&ModelParams::new(0.3, 0.0)), Operator::zeros());
        let h = build_h_int(&ModelParams::new(0.0, 1.0));
        assert_eq!(diag_of(&h), [2.0, -2.0, -2.0, 2.0]);
        assert!(max_abs(&(h - Operator::from_diagonal(&h.diagonal()))) == 0.0);
        for site in [Site::One, Site::Two] {
            let z = pauli(Axis::Z, site);
            assert!(max_abs(&(h * z - z * h)) < 1e-14);
        }
    }

    #[test]
    fn h_drive_is_traceless_hermitian_and_site_symmetric() {
        assert_eq!(
            build_h_drive(&ModelParams::new(0.0, 1.0)),
            Operator::zeros()
        );
        let swap = Operator::from_fn(|i, j| {
            let swapped = [EE, EG, GE, GG][j];
            if i == swapped {
                r(1.0)
            } else {
                r(0.0)
            }
        });
        for alpha in [-1.5, 0.2, 3.0] {
            let h = build_h_drive(&ModelParams::new(alpha, 1.0));
            assert!(h.trace().norm() < 1e-15);
            assert!(hermiticity_defect(&h) == 0.0);
            assert!(max_abs(&(swap * h * swap - h)) < 1e-15);
        }
    }

    #[test]
    fn h_tot_reduces_to_ising_without_drive() {
        let h = build_h_tot(&ModelParams::new(0.0, 1.0));
        assert_eq!(diag_of(&h), [2.0, -2.0, -2.0, 2.0]);
    }

    #[test]
    fn spectrum_at_unit_parameters() {
        let eig = numeric_eigensystem(&build_h_tot(&ModelParams::new(1.0, 1.0))).unwrap();
        let s = 2.0 * 2f64.sqrt();
        for (got, want) in eig.eigenvalues.iter().zip([-s, -2.0, 2.0, s]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_symmetric_on_grid() {
        for alpha in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            for j in [-1.0, 0.0, 0.4, 2.5] {
                let eig = numeric_eigensystem(&build_h_tot(&ModelParams::new(alpha, j))).unwrap();
                let e = eig.eigenvalues;
                assert!((e[0] + e[3]).abs() < 1e-12 && (e[1] + e[2]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_eigensystem_fixed_vectors() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (alpha, j) in [(0.4, 1.0), (2.0, 0.3)] {
            let eig = analytic_eigensystem(&ModelParams::new(alpha, j)).unwrap();
            let psi2 = eig.eigenvectors[1];
            assert_eq!(psi2[EG], r(h));
            assert_eq!(psi2[GE], r(-h));
            let psi3 = eig.eigenvectors[2];
            assert_eq!(psi3[GG], r(h));
            assert_eq!(psi3[EE], r(h));
            assert_eq!(eig.eigenvalues[2], 2.0 * j);
        }
    }

    #[test]
    fn analytic_eigenpairs_residual_and_orthonormality() {
        for (alpha, j) in [(1.3, 0.7), (0.2, 4.0), (-0.5, 1.0), (1.0, -2.0)] {
            let p = ModelParams::new(alpha, j);
            let h = build_h_tot(&p);
            let eig = analytic_eigensystem(&p).unwrap();
            let scale = h.norm();
            assert!(eig.max_residual(&h) < 1e-12 * scale, "({alpha}, {j})");
            assert!(eig.orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_refuse_eta_zero() {
        for p in [ModelParams::new(0.0, 1.0), ModelParams::new(1.0, 0.0)] {
            assert!(matches!(analytic_eigensystem(&p), Err(Error::Domain(_))));
            assert!(matches!(initial_expansion(&p), Err(Error::Domain(_))));
            assert!(matches!(evolve_closed(&p, 0.5), Err(Error::Domain(_))));
            assert!(matches!(marker_variance(&p, 0.5), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn numeric_eigensystem_simple_inputs() {
        let eig = numeric_eigensystem(&Operator::identity()).unwrap();
        assert!(eig.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-15));
        let eig = numeric_eigensystem(&pauli(Axis::Z, Site::One)).unwrap();
        assert_eq!(eig.eigenvalues, [-1.0, -1.0, 1.0, 1.0]);

        let mut bad = Operator::zeros();
        bad[(0, 1)] = r(1.0);
        assert!(matches!(numeric_eigensystem(&bad), Err(Error::Contract(_))));
    }

    #[test]
    fn initial_expansion_reconstructs_ground_state() {
        let p = ModelParams::new(2.5, 1.0);
        let e = initial_expansion(&p).unwrap();
        assert_eq!(e.coefficients[1], 0.0);
        assert_eq!(e.coefficients[2], std::f64::consts::FRAC_1_SQRT_2);
        assert!((e.norm_squared() - 1.0).abs() < 1e-12);

        let p = ModelParams::new(0.8, 1.0);
        let e = initial_expansion(&p).unwrap();
        let eig = analytic_eigensystem(&p).unwrap();
        let rebuilt: StateVector = eig
            .eigenvectors
            .iter()
            .zip(e.coefficients)
            .map(|(v, k)| v * r(k))
            .sum();
        assert!(max_abs(&(rebuilt - basis_state(GG))) < 1e-12);
    }

    #[test]
    fn closed_evolution_matches_matrix_exponential() {
        let p = ModelParams::new(1.0, 1.0);
        assert!(max_abs(&(evolve_closed(&p, 0.0).unwrap() - basis_state(GG))) < 1e-15);
        for tau in [0.1, 1.0, 10.0] {
            assert!((evolve_closed(&p, tau).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        let tau = 2.3;
        let u = expm(&(build_h_tot(&p) * c(0.0, -tau / p.j)));
        let oracle = u * basis_state(GG);
        assert!(max_abs(&(evolve_closed(&p, tau).unwrap() - oracle)) < 1e-10);
    }

    #[test]
    fn marker_variance_values() {
        let p = ModelParams::new(2.0, 1.0);
        assert_eq!(marker_variance(&p, 0.0).unwrap(), 2.0);
        let a = marker_variance(&p, 0.37).unwrap();
        let n = marker_variance_numeric(&p, 0.37).unwrap();
        assert!((a - n).abs() < 1e-10);
    }

    #[test]
    fn marker_variance_minimum_location() {
        // Minimum of the closed form from a fine scan, compared with its extremum.
        let p = ModelParams::new(0.6, 1.0);
        let eta: f64 = 0.6;
        let big = 1.0 + eta * eta;
        let tau_star = std::f64::consts::PI / (4.0 * big.sqrt());
        let expected = 2.0 - 2.0 * eta * eta / big;
        let scan_min = (0..=20_000)
            .map(|k| marker_variance_numeric(&p, 2.0 * tau_star * k as f64 / 20_000.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((scan_min - expected).abs() < 1e-6);
        assert!((marker_variance(&p, tau_star).unwrap() - expected).abs() < 1e-12);
    }
}
