//! Oracle suite: every check compares two independent routes to the same
//! quantity and reports the measured deviation against a fixed threshold.
//!
//! The generators under test are injectable through [`Generators`], so a
//! deliberately broken assembly can be run through the same suite.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{
    apply, basis_state, c, expm, hermiticity_defect, max_abs, r, Operator, StateVector,
    Superoperator, GG,
};
use crate::entanglement::{concurrence, concurrence_hermitian, concurrence_pure};
use crate::hamiltonian::{
    analytic_eigensystem, build_h_tot, evolve_closed, initial_expansion, marker_variance,
    marker_variance_numeric, numeric_eigensystem, ModelParams,
};
use crate::master_equation::{
    analytic_steady_state, feedback_rhs_expanded, liouvillian_fb, liouvillian_nofb,
    liouvillian_nofb_collective, nofb_rhs, propagate_with, steady_state, DensityMatrix,
};

pub type GeneratorFn = fn(&ModelParams) -> Superoperator;

/// The Liouvillian builders exercised by the suite.
#[derive(Clone, Copy)]
pub struct Generators {
    pub no_feedback: GeneratorFn,
    pub feedback: GeneratorFn,
}

impl Default for Generators {
    fn default() -> Self {
        Self {
            no_feedback: liouvillian_nofb,
            feedback: liouvillian_fb,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub threshold: f64,
    /// Failure raised by the computation itself rather than by the threshold.
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.deviation < self.threshold
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

type Measured = Result<f64, String>;

const EIGEN_GRID: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 4.0];
const STEADY_GRID: [(f64, f64); 12] = [
    (0.0, 0.5),
    (0.0, 2.0),
    (0.25, 0.25),
    (0.25, 1.0),
    (0.5, 4.0),
    (0.5, 0.25),
    (1.0, 1.0),
    (1.0, 4.0),
    (2.0, 0.25),
    (2.0, 1.0),
    (4.0, 0.5),
    (0.1, 3.0),
];
const FEEDBACK_POINTS: [(f64, f64, f64); 4] = [
    (1.0, 1.0, 0.5),
    (0.5, 0.2, -0.7),
    (2.0, 0.8, 1.3),
    (0.3, 3.0, 2.2),
];

fn random_hermitian(rng: &mut StdRng) -> Operator {
    let g = Operator::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    g + g.adjoint()
}

fn random_pure(rng: &mut StdRng) -> StateVector {
    let v =
        StateVector::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    v / r(v.norm())
}

fn worst(values: impl IntoIterator<Item = Measured>) -> Measured {
    values
        .into_iter()
        .try_fold(0.0, |acc: f64, v| v.map(|x| acc.max(x)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn eigen_points() -> impl Iterator<Item = ModelParams> {
    EIGEN_GRID
        .iter()
        .flat_map(|&a| EIGEN_GRID.iter().map(move |&j| ModelParams::new(a, j)))
}

fn projector(v: &StateVector) -> Operator {
    v * v.adjoint()
}

fn eigen_residuals() -> Measured {
    worst(eigen_points().map(|p| {
        let eig = analytic_eigensystem(&p).map_err(err)?;
        Ok(eig.max_residual(&build_h_tot(&p)))
    }))
}

fn numeric_spectrum() -> Measured {
    worst(eigen_points().map(|p| {
        let eig = numeric_eigensystem(&build_h_tot(&p)).map_err(err)?;
        let outer = 2.0 * (p.alpha * p.alpha + p.j * p.j).sqrt();
        let mut expected = [-outer, -2.0 * p.j, 2.0 * p.j, outer];
        expected.sort_by(f64::total_cmp);
        Ok(eig
            .eigenvalues
            .iter()
            .zip(expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }))
}

fn eigenspace_projectors() -> Measured {
    worst(eigen_points().map(|p| {
        let h = build_h_tot(&p);
        let analytic = analytic_eigensystem(&p).map_err(err)?;
        let numeric = numeric_eigensystem(&h).map_err(err)?;
        let mut dev: f64 = 0.0;
        for (e, v) in analytic.eigenvalues.iter().zip(&analytic.eigenvectors) {
            let numeric_proj: Operator = numeric
                .eigenvalues
                .iter()
                .zip(&numeric.eigenvectors)
                .filter(|(ne, _)| (*ne - e).abs() < 1e-8)
                .map(|(_, nv)| projector(nv))
                .sum();
            // Projecting the analytic vector onto the numeric eigenspace must return it.
            dev = dev.max((numeric_proj * v - v).norm());
        }
        Ok(dev)
    }))
}

fn initial_expansion_reconstruction() -> Measured {
    worst(eigen_points().map(|p| {
        let eig = analytic_eigensystem(&p).map_err(err)?;
        let exp = initial_expansion(&p).map_err(err)?;
        let rebuilt: StateVector = eig
            .eigenvectors
            .iter()
            .zip(exp.coefficients)
            .map(|(v, k)| v * r(k))
            .sum();
        Ok(max_abs(&(rebuilt - basis_state(GG))))
    }))
}

fn closed_evolution_vs_exponential() -> Measured {
    let cases = [
        (1.0, 1.0, 2.3),
        (2.0, 1.0, 0.37),
        (0.5, 2.0, 5.0),
        (1.3, 0.7, 1.1),
    ];
    worst(cases.iter().map(|&(a, j, tau)| {
        let p = ModelParams::new(a, j);
        let spectral = evolve_closed(&p, tau).map_err(err)?;
        let oracle = expm(&(build_h_tot(&p) * c(0.0, -tau / j))) * basis_state(GG);
        Ok(max_abs(&(spectral - oracle)))
    }))
}

fn marker_variance_agreement() -> Measured {
    let params = [(1.0, 1.0), (2.0, 1.0), (0.5, 2.0)];
    worst(params.iter().flat_map(|&(a, j)| {
        let p = ModelParams::new(a, j);
        (0..200).map(move |k| {
            let tau = 0.025 * k as f64;
            let exact = marker_variance(&p, tau).map_err(err)?;
            let numeric = marker_variance_numeric(&p, tau).map_err(err)?;
            Ok((exact - numeric).abs())
        })
    }))
}

fn decomposition_identity(g: &Generators) -> Measured {
    let params = [(1.0, 2.0), (0.3, 0.1), (2.5, 1.5)];
    worst(params.iter().map(|&(a, j)| {
        let p = ModelParams::new(a, j);
        Ok(max_abs(
            &((g.no_feedback)(&p) - liouvillian_nofb_collective(&p)),
        ))
    }))
}

fn zero_feedback_reduction(g: &Generators) -> Measured {
    let params = [(1.0, 1.0), (0.25, 4.0), (2.0, 0.2)];
    worst(params.iter().map(|&(a, j)| {
        let p = ModelParams::new(a, j);
        Ok(max_abs(&((g.feedback)(&p) - (g.no_feedback)(&p))))
    }))
}

fn all_generators(g: &Generators) -> Vec<Superoperator> {
    let mut out = vec![];
    for &(a, j, lambda) in &FEEDBACK_POINTS {
        let p = ModelParams::new(a, j).with_lambda(lambda);
        out.push((g.no_feedback)(&p));
        out.push((g.feedback)(&p));
    }
    out
}

fn trace_preservation(g: &Generators) -> Measured {
    let mut rng = StdRng::seed_from_u64(11);
    let gens = all_generators(g);
    worst((0..100).map(|_| {
        let x = random_hermitian(&mut rng);
        Ok(gens
            .iter()
            .map(|l| apply(l, &x).trace().norm())
            .fold(0.0, f64::max))
    }))
}

fn hermiticity_preservation(g: &Generators) -> Measured {
    let mut rng = StdRng::seed_from_u64(12);
    let gens = all_generators(g);
    worst((0..100).map(|_| {
        let x = random_hermitian(&mut rng);
        Ok(gens
            .iter()
            .map(|l| hermiticity_defect(&apply(l, &x)))
            .fold(0.0, f64::max))
    }))
}

fn no_feedback_action(g: &Generators) -> Measured {
    let mut rng = StdRng::seed_from_u64(13);
    worst(STEADY_GRID.iter().map(|&(a, j)| {
        let p = ModelParams::new(a, j);
        let x = random_hermitian(&mut rng);
        Ok(max_abs(
            &(apply(&(g.no_feedback)(&p), &x) - nofb_rhs(&p, &x)),
        ))
    }))
}

fn feedback_action(g: &Generators) -> Measured {
    let mut rng = StdRng::seed_from_u64(14);
    worst(FEEDBACK_POINTS.iter().flat_map(|&(a, j, lambda)| {
        let p = ModelParams::new(a, j).with_lambda(lambda);
        let l = (g.feedback)(&p);
        (0..10)
            .map(|_| {
                let x = random_hermitian(&mut rng);
                Ok(max_abs(&(apply(&l, &x) - feedback_rhs_expanded(&p, &x))))
            })
            .collect::<Vec<_>>()
    }))
}

fn analytic_vs_numeric_steady_state(g: &Generators) -> Measured {
    worst(STEADY_GRID.iter().map(|&(a, j)| {
        let p = ModelParams::new(a, j);
        let numeric = steady_state(&(g.no_feedback)(&p)).map_err(err)?;
        let exact = analytic_steady_state(&p).map_err(err)?;
        Ok(max_abs(&(numeric.matrix() - exact.matrix())))
    }))
}

fn ground_state_at_zero_drive(g: &Generators) -> Measured {
    let ground = basis_state(GG) * basis_state(GG).adjoint();
    worst([0.5, 2.0].iter().map(|&j| {
        let rho = steady_state(&(g.no_feedback)(&ModelParams::new(0.0, j))).map_err(err)?;
        Ok(max_abs(&(rho.matrix() - ground)))
    }))
}

fn feedback_steady_state_stationarity(g: &Generators) -> Measured {
    worst(FEEDBACK_POINTS.iter().map(|&(a, j, lambda)| {
        let p = ModelParams::new(a, j).with_lambda(lambda);
        let rho = steady_state(&(g.feedback)(&p)).map_err(err)?;
        Ok(max_abs(&feedback_rhs_expanded(&p, rho.matrix())))
    }))
}

fn feedback_steady_state_positivity(g: &Generators) -> Measured {
    worst(FEEDBACK_POINTS.iter().map(|&(a, j, lambda)| {
        let p = ModelParams::new(a, j).with_lambda(lambda);
        let rho = steady_state(&(g.feedback)(&p)).map_err(err)?;
        Ok((-rho.min_eigenvalue()).max(0.0))
    }))
}

fn concurrence_pure_vs_mixed() -> Measured {
    let mut rng = StdRng::seed_from_u64(15);
    worst((0..1000).map(|_| {
        let psi = random_pure(&mut rng);
        let rho = DensityMatrix::from_pure(&psi).map_err(err)?;
        let full = concurrence(&rho).map_err(err)?.value;
        Ok((full - concurrence_pure(&psi).map_err(err)?).abs())
    }))
}

fn concurrence_routes_on_feedback_states(g: &Generators) -> Measured {
    worst(FEEDBACK_POINTS.iter().map(|&(a, j, lambda)| {
        let p = ModelParams::new(a, j).with_lambda(lambda);
        let rho = steady_state(&(g.feedback)(&p)).map_err(err)?;
        let direct = concurrence(&rho).map_err(err)?.value;
        let hermitian = concurrence_hermitian(&rho).map_err(err)?.value;
        Ok((direct - hermitian).abs())
    }))
}

fn propagation_convergence(g: &Generators) -> Measured {
    let p = ModelParams::new(1.0, 1.0);
    let l = (g.no_feedback)(&p);
    let rho0 = DensityMatrix::from_pure(&basis_state(GG)).map_err(err)?;
    let (rho, _) = propagate_with(&rho0, &l, 50.0, 0.01, |_, _| {}).map_err(err)?;
    let target = steady_state(&l).map_err(err)?;
    Ok((rho - target.matrix()).norm())
}

/// Runs the suite on the library's own generators.
pub fn run_validation() -> ValidationReport {
    run_validation_with(&Generators::default())
}

pub fn run_validation_with(g: &Generators) -> ValidationReport {
    let plan: Vec<(&'static str, f64, Measured)> = vec![
        ("analytic eigenpair residuals", 1e-12, eigen_residuals()),
        ("numeric spectrum vs closed form", 1e-12, numeric_spectrum()),
        (
            "analytic vs numeric eigenspaces",
            1e-10,
            eigenspace_projectors(),
        ),
        (
            "ground-state expansion",
            1e-12,
            initial_expansion_reconstruction(),
        ),
        (
            "closed evolution vs matrix exponential",
            1e-10,
            closed_evolution_vs_exponential(),
        ),
        (
            "marker variance closed form vs expectation",
            1e-10,
            marker_variance_agreement(),
        ),
        (
            "site vs collective decay decomposition",
            1e-13,
            decomposition_identity(g),
        ),
        (
            "feedback generator at zero strength",
            1e-13,
            zero_feedback_reduction(g),
        ),
        ("trace preservation", 1e-12, trace_preservation(g)),
        (
            "hermiticity preservation",
            1e-12,
            hermiticity_preservation(g),
        ),
        (
            "no-feedback generator vs operator form",
            1e-12,
            no_feedback_action(g),
        ),
        (
            "feedback generator vs expanded operator form",
            1e-12,
            feedback_action(g),
        ),
        (
            "numeric vs closed-form steady state",
            1e-10,
            analytic_vs_numeric_steady_state(g),
        ),
        (
            "zero-drive steady state is ground state",
            1e-12,
            ground_state_at_zero_drive(g),
        ),
        (
            "feedback steady state stationarity",
            1e-10,
            feedback_steady_state_stationarity(g),
        ),
        (
            "feedback steady state positivity",
            1e-8,
            feedback_steady_state_positivity(g),
        ),
        (
            "concurrence pure vs density-matrix route",
            1e-10,
            concurrence_pure_vs_mixed(),
        ),
        (
            "concurrence direct vs hermitian route",
            1e-9,
            concurrence_routes_on_feedback_states(g),
        ),
        (
            "RK4 relaxation to steady state",
            1e-6,
            propagation_convergence(g),
        ),
    ];
    ValidationReport {
        checks: plan
            .into_iter()
            .map(|(name, threshold, measured)| match measured {
                Ok(deviation) => Check {
                    name,
                    deviation,
                    threshold,
                    error: None,
                },
                Err(e) => Check {
                    name,
                    deviation: f64::NAN,
                    threshold,
                    error: Some(e),
                },
            })
            .collect(),
    }
}
