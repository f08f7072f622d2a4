//! Fixed-point solver for the extension equation ∂̄Ω = −∂(φ⌟Ω).
//!
//! Given a harmonic (p, q)-form Ω₀ and an integrable valence-1 field φ with
//! pointwise operator sup norm below 1, the affine iteration
//!
//! ```text
//! Ω_{k+1} = Ω₀ − T(φ⌟Ω_k),      T = ∂̄* ∘ G ∘ ∂
//! ```
//!
//! contracts geometrically (T is a norm-1 partial isometry, so the update map
//! contracts at least as fast as sup‖φ‖). The fixed point satisfies the
//! extension equation up to the reported residual, and e^{i_φ}Ω — the form
//! expressed in the deformed coordinates — is d-closed up to the reported
//! residual. Certificates are recomputed from scratch on the returned
//! solution; nothing is inferred from the iteration itself.

use num_complex::Complex64;
use serde::Serialize;

use crate::beltrami::{contract, exp_contraction, integrability_residual, BeltramiField};
use crate::error::{Error, Result};
use crate::form::FormField;
use crate::grid::same_grid;
use crate::hodge::{dolbeault, DolbeaultKind, HodgePackage};

/// Default relative update tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration budget.
pub const DEFAULT_MAX_ITER: usize = 400;

/// Convergence and certificate data for one solve. All residuals are
/// relative (normalized by the norm of the solution or of the input data, as
/// noted per field).
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    /// Number of update steps performed (the step that met the tolerance
    /// counts).
    pub iterations: usize,
    /// ‖Ω_{k+1} − Ω_k‖ / ‖Ω₀‖ per step.
    pub residual_history: Vec<f64>,
    /// ‖∂̄Ω + ∂(φ⌟Ω)‖ / ‖Ω‖ on the returned solution.
    pub extension_residual: f64,
    /// ‖d(e^{i_φ}Ω)‖ / ‖e^{i_φ}Ω‖ — closedness in deformed coordinates.
    pub dclosed_residual: f64,
    /// Largest observed ratio of consecutive update norms (0 when fewer than
    /// two meaningful steps were taken).
    pub contraction_ratio: f64,
    /// Whether the update tolerance was met within the budget.
    pub converged: bool,
    /// ‖∂Ω‖ / ‖Ω‖ — the solution is observed to stay ∂-closed as well.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_residual: Option<f64>,
    /// ‖H(Ω) − Ω₀‖ / ‖Ω₀‖ — the harmonic part is pinned to the seed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic_projection_gap: Option<f64>,
    /// sup |∂̄f − μ∂f| / sup |∂f| for the quasi-conformal map solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_residual: Option<f64>,
    /// Closedness gap of the reconstructed one-form in the map solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_split_gap: Option<f64>,
}

impl SolveReport {
    pub(crate) fn from_history(history: Vec<f64>, converged: bool) -> Self {
        let contraction_ratio = contraction_ratio(&history);
        SolveReport {
            iterations: history.len(),
            residual_history: history,
            extension_residual: 0.0,
            dclosed_residual: 0.0,
            contraction_ratio,
            converged,
            partial_residual: None,
            harmonic_projection_gap: None,
            map_residual: None,
            type_split_gap: None,
        }
    }
}

/// Largest ratio of consecutive update norms, skipping pairs already at the
/// rounding floor where the quotient is pure noise.
pub(crate) fn contraction_ratio(history: &[f64]) -> f64 {
    const FLOOR: f64 = 1e-14;
    history
        .windows(2)
        .filter(|w| w[0] >= FLOOR && w[1] >= FLOOR)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

fn check_preconditions(omega0: &FormField, phi: &BeltramiField) -> Result<f64> {
    same_grid(omega0.grid(), phi.grid(), "extension solve")?;
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "the extension equation takes a valence-1 deformation field".into(),
        ));
    }
    let base_norm = omega0.l2_norm();
    if base_norm == 0.0 {
        return Err(Error::Precondition("the seed form is identically zero".into()));
    }
    let hodge = HodgePackage::new(omega0.grid());
    let harmonic_gap = omega0.sub(&hodge.harmonic_projection(omega0)).l2_norm() / base_norm;
    if harmonic_gap > 1e-12 {
        return Err(Error::Precondition(format!(
            "the seed form must be harmonic: relative non-harmonic part {harmonic_gap:.3e}"
        )));
    }
    let integrability = integrability_residual(phi)? / (1.0 + phi.l2_norm());
    if integrability > 1e-8 {
        return Err(Error::Precondition(format!(
            "deformation field is not integrable: relative residual {integrability:.3e}"
        )));
    }
    let sup = phi.sup_norm();
    if sup >= 1.0 {
        return Err(Error::NotContractive { sup });
    }
    Ok(base_norm)
}

fn run_iteration(
    omega0: &FormField,
    initial: &FormField,
    phi: &BeltramiField,
    hodge: &HodgePackage,
    base_norm: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(FormField, Vec<f64>)> {
    let mut omega = initial.clone();
    let mut history = Vec::new();
    loop {
        let next = omega0.sub(&hodge.t_operator(&contract(phi, &omega)?));
        let update = next.sub(&omega).l2_norm() / base_norm;
        history.push(update);
        omega = next;
        if update <= tol {
            return Ok((omega, history));
        }
        if history.len() >= max_iter {
            return Err(Error::NonConvergence {
                iterations: history.len(),
                last_update: update,
                tol,
            });
        }
    }
}

/// Solves ∂̄Ω = −∂(φ⌟Ω) for a harmonic seed Ω₀ of any bidegree with p ≥ 1.
///
/// Returns the fixed point and a [`SolveReport`] whose certificates are
/// recomputed on the returned solution. Fails without returning a partial
/// solution when the tolerance is not met within `max_iter` steps, when φ is
/// not integrable, or when sup‖φ‖ ≥ 1.
pub fn solve_pq_extension(
    omega0: &FormField,
    phi: &BeltramiField,
    tol: f64,
    max_iter: usize,
) -> Result<(FormField, SolveReport)> {
    let base_norm = check_preconditions(omega0, phi)?;
    let hodge = HodgePackage::new(omega0.grid());
    let (omega, history) = run_iteration(omega0, omega0, phi, &hodge, base_norm, tol, max_iter)?;

    let mut report = SolveReport::from_history(history, true);
    let solution_norm = omega.l2_norm();
    let dbar = dolbeault(&omega, DolbeaultKind::AntiHolomorphic);
    let d_contract = dolbeault(&contract(phi, &omega)?, DolbeaultKind::Holomorphic);
    report.extension_residual = dbar.add(&d_contract).l2_norm() / solution_norm;
    let rho = exp_contraction(phi, &omega);
    let rho_norm = rho.l2_norm();
    report.dclosed_residual = if rho_norm > 0.0 {
        rho.d().l2_norm() / rho_norm
    } else {
        0.0
    };
    report.partial_residual =
        Some(dolbeault(&omega, DolbeaultKind::Holomorphic).l2_norm() / solution_norm);
    report.harmonic_projection_gap =
        Some(hodge.harmonic_projection(&omega).sub(omega0).l2_norm() / base_norm);
    Ok((omega, report))
}

/// [`solve_pq_extension`] specialized to (n, 0) seeds — extending a
/// holomorphic volume form across the deformation. The bidegree is checked;
/// the solve path is identical.
pub fn solve_extension(
    omega0: &FormField,
    phi: &BeltramiField,
    tol: f64,
    max_iter: usize,
) -> Result<(FormField, SolveReport)> {
    let n = omega0.grid().complex_dim();
    if omega0.bidegree() != (n, 0) {
        return Err(Error::Incompatible(format!(
            "volume-form extension expects bidegree ({n}, 0), got {:?}",
            omega0.bidegree()
        )));
    }
    solve_pq_extension(omega0, phi, tol, max_iter)
}

/// First-order (in t) approximation Ω₀ − t·T(η⌟Ω₀) to the solution for
/// φ = t·η; the solver's output differs from this by O(t²).
pub fn first_order_extension(
    omega0: &FormField,
    eta: &BeltramiField,
    t: f64,
) -> Result<FormField> {
    same_grid(omega0.grid(), eta.grid(), "first-order extension")?;
    let hodge = HodgePackage::new(omega0.grid());
    let correction = hodge.t_operator(&contract(eta, omega0)?);
    Ok(omega0.add_scaled(&correction, Complex64::new(-t, 0.0)))
}

/// Largest pairwise distance between fixed points reached from perturbed
/// initial iterates — the affine contraction has a unique fixed point, so
/// this gap certifies solver determinism at the tolerance scale.
pub fn uniqueness_gap(
    omega0: &FormField,
    phi: &BeltramiField,
    tol: f64,
    max_iter: usize,
    initial_scales: &[f64],
) -> Result<f64> {
    let base_norm = check_preconditions(omega0, phi)?;
    let hodge = HodgePackage::new(omega0.grid());
    let mut solutions = Vec::new();
    let (reference, _) = run_iteration(omega0, omega0, phi, &hodge, base_norm, tol, max_iter)?;
    solutions.push(reference);
    for &scale in initial_scales {
        let start = omega0.scale(Complex64::new(1.0 + scale, 0.0));
        let (sol, _) = run_iteration(omega0, &start, phi, &hodge, base_norm, tol, max_iter)?;
        solutions.push(sol);
    }
    let mut gap = 0.0f64;
    for a in 0..solutions.len() {
        for b in a + 1..solutions.len() {
            gap = gap.max(solutions[a].sub(&solutions[b]).l2_norm() / base_norm);
        }
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{TorusMap, DEFAULT_JACOBIAN_FLOOR};
    use crate::grid::TorusGrid;
    use crate::scalar::ScalarField;

    fn volume(grid: &std::sync::Arc<TorusGrid>) -> FormField {
        FormField::holomorphic_volume(grid)
    }

    #[test]
    fn zero_deformation_returns_seed_in_one_step() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let omega0 = volume(&grid);
        let phi = BeltramiField::zeros(&grid, 1);
        let (omega, report) = solve_extension(&omega0, &phi, DEFAULT_TOL, 10).unwrap();
        assert_eq!(report.iterations, 1);
        assert!(report.converged);
        assert_eq!(omega.sub(&omega0).l2_norm(), 0.0);
        assert_eq!(report.extension_residual, 0.0);
    }

    #[test]
    fn shear_deformation_matches_the_closed_form_solution() {
        // For the shear w¹ = z¹ + v(z₂,z̄₂) the field is φ = v_z̄₂ dz̄²⊗∂₁ and
        // the extension of dz¹ is exactly dz¹ + v_z₂ dz² (so that
        // e^{i_φ}Ω = dz¹ + dv = dw¹ is exact). Both v-derivatives are
        // band-limited, so the solver must reproduce this to rounding.
        let grid = TorusGrid::new(2, 16).unwrap();
        let v = ScalarField::from_modes(
            &grid,
            &[
                (vec![0, 0, 1, 0], Complex64::new(0.35, 0.0)),
                (vec![0, 0, -1, 1], Complex64::new(0.0, 0.2)),
            ],
        )
        .unwrap();
        let map = TorusMap::shear(&grid, v.clone()).unwrap();
        let phi = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        let mut omega0 = FormField::zeros(&grid, 1, 0);
        omega0.set_component(0b01, 0, ScalarField::constant(&grid, Complex64::new(1.0, 0.0)));
        let (omega, report) = solve_pq_extension(&omega0, &phi, DEFAULT_TOL, 50).unwrap();
        assert!(report.converged);
        assert!(report.extension_residual < 1e-12, "{}", report.extension_residual);
        assert!(report.dclosed_residual < 1e-12, "{}", report.dclosed_residual);
        assert!(report.partial_residual.unwrap() < 1e-12);
        assert!(report.harmonic_projection_gap.unwrap() < 1e-13);

        let mut expected = omega0.clone();
        expected.set_component(0b10, 0, v.complex_derivative(1, crate::scalar::DerivativeKind::Z));
        let gap = omega.sub(&expected).l2_norm() / omega0.l2_norm();
        assert!(gap < 1e-10, "closed-form gap {gap}");
        assert!(omega.sub(&omega0).l2_norm() > 1e-2, "correction must be nontrivial");
    }

    #[test]
    fn shear_extension_of_the_volume_form_is_exact_and_trivial() {
        // The same shear leaves dz¹∧dz² untouched: the only contraction lands
        // in the occupied dz² slot, so T(φ⌟Ω) = 0 and e^{i_φ}Ω = dw¹∧dw² is
        // closed with zero correction.
        let grid = TorusGrid::new(2, 16).unwrap();
        let v = ScalarField::from_modes(&grid, &[(vec![0, 0, 1, -1], Complex64::new(0.3, 0.1))])
            .unwrap();
        let map = TorusMap::shear(&grid, v).unwrap();
        let phi = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        let omega0 = volume(&grid);
        let (omega, report) = solve_extension(&omega0, &phi, DEFAULT_TOL, 50).unwrap();
        assert_eq!(report.iterations, 1);
        assert!(omega.sub(&omega0).l2_norm() < 1e-13);
        assert!(report.dclosed_residual < 1e-12, "{}", report.dclosed_residual);
    }

    #[test]
    fn expanding_fields_are_rejected() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let phi = BeltramiField::constant_matrix(&grid, &[Complex64::new(1.2, 0.0)]).unwrap();
        match solve_extension(&volume(&grid), &phi, DEFAULT_TOL, 10) {
            Err(Error::NotContractive { sup }) => assert!((sup - 1.2).abs() < 1e-12),
            other => panic!("expected NotContractive, got {other:?}"),
        }
    }

    #[test]
    fn non_harmonic_seed_is_rejected() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let comp =
            ScalarField::from_modes(&grid, &[(vec![1, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let omega0 = FormField::from_components(&grid, 1, 0, vec![comp]).unwrap();
        let phi = BeltramiField::zeros(&grid, 1);
        assert!(matches!(
            solve_extension(&omega0, &phi, DEFAULT_TOL, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn non_integrable_field_is_rejected() {
        // φ^1_2̄ depending on z̄₁ has ∂̄φ ≠ 0 while [φ,φ] = 0.
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut phi = BeltramiField::zeros(&grid, 1);
        phi.set_component(
            0,
            0b10,
            ScalarField::from_modes(&grid, &[(vec![1, 1, 0, 0], Complex64::new(0.3, 0.0))])
                .unwrap(),
        );
        assert!(integrability_residual(&phi).unwrap() > 1e-3);
        assert!(matches!(
            solve_extension(&volume(&grid), &phi, DEFAULT_TOL, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn budget_exhaustion_withholds_the_solution() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let map = TorusMap::one_dim_exponential(&grid, 2.0 * 0.6 / 1.6).unwrap();
        let mu = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        match solve_extension(&volume(&grid), &mu, 1e-12, 3) {
            Err(Error::NonConvergence {
                iterations,
                last_update,
                tol,
            }) => {
                assert_eq!(iterations, 3);
                assert!(last_update > tol);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn iteration_count_tracks_the_contraction_factor() {
        // sup‖φ‖ = 0.3 ⇒ about log(tol)/log(0.3) ≈ 20 steps.
        let grid = TorusGrid::new(1, 64).unwrap();
        let map = TorusMap::one_dim_exponential(&grid, 2.0 * 0.3 / 1.3).unwrap();
        let mu = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        let (_, report) = solve_extension(&volume(&grid), &mu, 1e-10, 100).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 25, "iterations {}", report.iterations);
        assert!(
            report.contraction_ratio <= 0.3 + 0.05,
            "ratio {}",
            report.contraction_ratio
        );
    }

    #[test]
    fn uniqueness_gap_is_at_tolerance_scale() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let map = TorusMap::one_dim_exponential(&grid, 0.5).unwrap();
        let mu = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        let gap = uniqueness_gap(&volume(&grid), &mu, 1e-11, 200, &[0.5, -0.25, 2.0]).unwrap();
        assert!(gap < 1e-10, "gap {gap}");
    }

    #[test]
    fn pq_solve_handles_higher_antiholomorphic_degree() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let v = ScalarField::from_modes(&grid, &[(vec![0, 0, 1, -1], Complex64::new(0.3, 0.1))])
            .unwrap();
        let map = TorusMap::shear(&grid, v).unwrap();
        let phi = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
        // Harmonic (2,1) seed: constant coefficient on dz¹∧dz²∧dz̄¹.
        let mut omega0 = FormField::zeros(&grid, 2, 1);
        omega0.set_component(0b11, 0b01, ScalarField::constant(&grid, Complex64::new(1.0, 0.0)));
        let (omega, report) = solve_pq_extension(&omega0, &phi, DEFAULT_TOL, 50).unwrap();
        assert!(report.converged);
        assert!(report.extension_residual < 1e-11, "{}", report.extension_residual);
        assert_eq!(omega.bidegree(), (2, 1));
    }
}
