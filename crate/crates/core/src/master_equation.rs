//! Liouvillians with and without homodyne-mediated feedback, steady-state
//! solving, the closed-form no-feedback steady state and RK4 propagation.
//!
//! Generators act on column-stacked density matrices (see [`crate::algebra`]).
//! γ = 1 throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{
    c, collective_lowering, commutator, dissipate, dissipator, hamiltonian_generator,
    hermiticity_defect, lowering, max_abs, pauli, r, unvectorize, vectorize, Axis, Operator, Sign,
    Site, StateVector, Superoperator, Vectorized, C64,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h_tot, ModelParams};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-8;
/// Second-smallest singular value of a generator below which the stationary
/// state is considered non-unique.
/// Iteration cap for the SVD used in the degeneracy check.
pub const MAX_ITERATIONS: usize = 10_000;
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;
pub const STEADY_STATE_RESIDUAL_TOL: f64 = 1e-10;
/// Trace drift that aborts a propagation.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// A Hermitian, unit-trace, positive semidefinite 4×4 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(m: Operator) -> Result<Self> {
        let herm = hermiticity_defect(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::Contract(format!(
                "density matrix is not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - r(1.0)).norm() > TRACE_TOL {
            return Err(Error::Contract(format!("density matrix trace is {tr}")));
        }
        let rho = Self(m);
        let min = rho.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::Contract(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized state.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Contract(format!("state norm is {n}, expected 1")));
        }
        Self::new(psi * psi.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Operator::identity() * r(0.25))
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_inner(self) -> Operator {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (self.0 + self.0.adjoint()) * r(0.5);
        SymmetricEigen::new(hermitian)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Generator of `ρ̇ = −i[H_tot, ρ] + D[σ₁]ρ + D[σ₂]ρ`.
pub fn liouvillian_nofb(p: &ModelParams) -> Superoperator {
    hamiltonian_generator(&build_h_tot(p))
        + dissipator(&lowering(Site::One))
        + dissipator(&lowering(Site::Two))
}

/// The same generator written with the collective jumps `c±`.
pub fn liouvillian_nofb_collective(p: &ModelParams) -> Superoperator {
    hamiltonian_generator(&build_h_tot(p))
        + dissipator(&collective_lowering(Sign::Plus))
        + dissipator(&collective_lowering(Sign::Minus))
}

/// `F = (λ/√2)(σ₁ʸ − σ₂ʸ)`.
pub fn feedback_operator(p: &ModelParams) -> Operator {
    (pauli(Axis::Y, Site::One) - pauli(Axis::Y, Site::Two))
        * r(p.lambda * std::f64::consts::FRAC_1_SQRT_2)
}

/// Generator of the feedback master equation
///
/// `ρ̇ = −i[H_tot, ρ] + D[c₊]ρ + D[c₋ − iF]ρ − (i/2)[c₋†F + Fc₋, ρ]`.
pub fn liouvillian_fb(p: &ModelParams) -> Superoperator {
    let f = feedback_operator(p);
    let cp = collective_lowering(Sign::Plus);
    let cm = collective_lowering(Sign::Minus);
    let correction = (cm.adjoint() * f + f * cm) * r(0.5);
    hamiltonian_generator(&build_h_tot(p))
        + dissipator(&cp)
        + dissipator(&(cm - f * c(0.0, 1.0)))
        + hamiltonian_generator(&correction)
}

/// Right-hand side of the no-feedback master equation, evaluated with
/// operator products instead of a superoperator.
pub fn nofb_rhs(p: &ModelParams, rho: &Operator) -> Operator {
    let h = build_h_tot(p);
    commutator(&h, rho) * c(0.0, -1.0)
        + dissipate(&lowering(Site::One), rho)
        + dissipate(&lowering(Site::Two), rho)
}

/// Right-hand side of the feedback master equation in its expanded form
///
/// `−i[H, ρ] + D[c₊]ρ + D[c₋]ρ + D[F]ρ − i[F, c₋ρ + ρc₋†]`,
///
/// evaluated with operator products. Algebraically identical to
/// [`liouvillian_fb`] but shares none of its assembly.
pub fn feedback_rhs_expanded(p: &ModelParams, rho: &Operator) -> Operator {
    let h = build_h_tot(p);
    let f = feedback_operator(p);
    let cp = collective_lowering(Sign::Plus);
    let cm = collective_lowering(Sign::Minus);
    let kick = cm * rho + rho * cm.adjoint();
    commutator(&h, rho) * c(0.0, -1.0)
        + dissipate(&cp, rho)
        + dissipate(&cm, rho)
        + dissipate(&f, rho)
        + commutator(&f, &kick) * c(0.0, -1.0)
}

/// Largest entry of `vec(I)ᵀ·L`; zero for a trace-preserving generator.
pub fn trace_defect(l: &Superoperator) -> f64 {
    (0..16)
        .map(|col| {
            [0, 5, 10, 15]
                .iter()
                .map(|&row| l[(row, col)])
                .sum::<C64>()
                .norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSolution {
    pub rho: DensityMatrix,
    /// `‖L·vec(ρ)‖`.
    pub residual: f64,
    /// The two smallest singular values of the generator, ascending.
    pub smallest_singular_values: [f64; 2],
}

/// Stationary state of a trace-preserving generator.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    steady_state_solution(l).map(|s| s.rho)
}

/// Solves `L·vec(ρ) = 0` together with `tr ρ = 1` as a 17×16 least-squares
/// problem (Householder QR), after checking that the null space of `L` is one-dimensional.
pub fn steady_state_solution(l: &Superoperator) -> Result<SteadyStateSolution> {
    let scale = max_abs(l).max(1.0);
    let defect = trace_defect(l);
    if defect > 1e-10 * scale {
        return Err(Error::Contract(format!(
            "generator is not trace preserving (defect {defect:.3e})"
        )));
    }

    let svd = l
        .try_svd(false, false, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::NumericDegeneracy { spectrum: vec![] })?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let (smallest, second) = (sv[0], sv[1]);
    if second < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSteadyState {
            smallest,
            second,
            threshold: DEGENERACY_THRESHOLD,
        });
    }

    let system = DMatrix::<C64>::from_fn(17, 16, |row, col| {
        if row < 16 {
            l[(row, col)]
        } else if col % 5 == 0 {
            r(1.0)
        } else {
            r(0.0)
        }
    });
    let mut rhs = DVector::<C64>::zeros(17);
    rhs[16] = r(1.0);
    // Householder QR least squares: x = R⁻¹·Q†·b.
    let qr = system.qr();
    let qtb = qr.q().adjoint() * rhs;
    let solution = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Contract("least-squares system is rank deficient".into()))?;
    let v = Vectorized::from_iterator(solution.iter().copied());

    let residual = (l * v).norm();
    if residual > STEADY_STATE_RESIDUAL_TOL * scale {
        return Err(Error::SteadyStateResidual {
            residual,
            tolerance: STEADY_STATE_RESIDUAL_TOL * scale,
        });
    }

    let m = unvectorize(&v);
    let m = (m + m.adjoint()) * r(0.5);
    let m = m / m.trace();
    Ok(SteadyStateSolution {
        rho: DensityMatrix::new(m)?,
        residual,
        smallest_singular_values: [smallest, second],
    })
}

/// Real coefficients of the closed-form no-feedback steady state,
///
/// ```text
///        ⎛ A        B₁+iB₂   C₁+iC₂   D₁+iD₂ ⎞
///  ρ  =  ⎜ B₁−iB₂   E        F₁+iF₂   G₁+iG₂ ⎟
///        ⎜ C₁−iC₂   F₁−iF₂   H        I₁+iI₂ ⎟
///        ⎝ D₁−iD₂   G₁−iG₂   I₁−iI₂   L      ⎠
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateCoefficients {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub e: f64,
    pub f1: f64,
    pub f2: f64,
    pub g1: f64,
    pub g2: f64,
    pub h: f64,
    pub i1: f64,
    pub i2: f64,
    pub l: f64,
    pub xi: f64,
}

impl SteadyStateCoefficients {
    /// Coefficients written in terms of the drive `α` and the coefficient
    /// `κ` of σ₁ᶻσ₂ᶻ in the Hamiltonian, with `Ξ = 64α⁴ + 16α² + 1 + 16κ²`.
    pub fn from_ising_coefficient(alpha: f64, kappa: f64) -> Self {
        let a2 = alpha * alpha;
        let a4 = a2 * a2;
        let xi = 64.0 * a4 + 16.0 * a2 + 1.0 + 16.0 * kappa * kappa;
        let g1 = -2.0 * alpha * (4.0 * a2 + 1.0) / xi;
        let g2 = -8.0 * alpha * kappa / xi;
        Self {
            a: 16.0 * a4 / xi,
            b1: -8.0 * a2 * alpha / xi,
            b2: 0.0,
            c1: -8.0 * a2 * alpha / xi,
            c2: 0.0,
            d1: 4.0 * a2 / xi,
            d2: 16.0 * a2 * kappa / xi,
            e: (16.0 * a4 + 4.0 * a2) / xi,
            f1: 4.0 * a2 / xi,
            f2: 0.0,
            g1,
            g2,
            h: (16.0 * a4 + 4.0 * a2) / xi,
            i1: g1,
            i2: g2,
            l: (16.0 * a4 + 8.0 * a2 + 1.0 + 16.0 * kappa * kappa) / xi,
            xi,
        }
    }

    /// Coefficients for `H_tot = 2Jσ₁ᶻσ₂ᶻ + α(σ₁ʸ + σ₂ʸ)`, i.e. `κ = 2J`.
    pub fn for_params(p: &ModelParams) -> Self {
        Self::from_ising_coefficient(p.alpha, 2.0 * p.j)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.e + self.h + self.l
    }

    /// Hermitian matrix built from the coefficients. The lower triangle is
    /// the conjugate of the upper one, so entry (3,1) is `G₁ − iG₂`.
    pub fn to_matrix(&self) -> Operator {
        let upper = [
            [
                r(self.a),
                c(self.b1, self.b2),
                c(self.c1, self.c2),
                c(self.d1, self.d2),
            ],
            [r(0.0), r(self.e), c(self.f1, self.f2), c(self.g1, self.g2)],
            [r(0.0), r(0.0), r(self.h), c(self.i1, self.i2)],
            [r(0.0), r(0.0), r(0.0), r(self.l)],
        ];
        Operator::from_fn(|i, j| {
            if i <= j {
                upper[i][j]
            } else {
                upper[j][i].conj()
            }
        })
    }
}

/// Closed-form stationary state of the no-feedback master equation.
pub fn analytic_steady_state(p: &ModelParams) -> Result<DensityMatrix> {
    DensityMatrix::new(SteadyStateCoefficients::for_params(p).to_matrix())
}

/// Fixed-step RK4 integration of `vec(ρ̇) = L·vec(ρ)` from `t = 0` to
/// `t_final` (units of 1/γ).
///
/// The step is shrunk to `t_final / ⌈t_final/dt⌉` so the run lands exactly on
/// `t_final`. A safe choice is `dt ≤ 0.05 / max(1, 4α², 4J², 2λ²)`.
pub fn propagate(
    rho0: &DensityMatrix,
    l: &Superoperator,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    let (rho, _) = propagate_with(rho0, l, t_final, dt, |_, _| {})?;
    DensityMatrix::new(rho)
}

/// Like [`propagate`] but calls `observer(t, ρ(t))` at `t = 0` and after every
/// step, and returns the raw final matrix with the largest trace drift seen.
pub fn propagate_with(
    rho0: &DensityMatrix,
    l: &Superoperator,
    t_final: f64,
    dt: f64,
    mut observer: impl FnMut(f64, &Operator),
) -> Result<(Operator, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Contract(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::Contract(format!(
            "t_final must be nonnegative, got {t_final}"
        )));
    }
    observer(0.0, rho0.matrix());
    if t_final == 0.0 {
        return Ok((*rho0.matrix(), 0.0));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let half = r(0.5 * h);
    let full = r(h);
    let sixth = r(h / 6.0);

    let mut v = vectorize(rho0.matrix());
    let mut max_drift: f64 = 0.0;
    for k in 1..=steps {
        let k1 = l * v;
        let k2 = l * (v + k1 * half);
        let k3 = l * (v + k2 * half);
        let k4 = l * (v + k3 * full);
        v += (k1 + k2 * r(2.0) + k3 * r(2.0) + k4) * sixth;

        let rho = unvectorize(&v);
        let t = k as f64 * h;
        let drift = (rho.trace() - rho0.matrix().trace()).norm();
        max_drift = max_drift.max(drift);
        if !(drift <= TRACE_DRIFT_LIMIT) {
            return Err(Error::StepSize {
                drift,
                time: t,
                dt,
                tolerance: TRACE_DRIFT_LIMIT,
            });
        }
        observer(t, &rho);
    }
    Ok((unvectorize(&v), max_drift))
}
