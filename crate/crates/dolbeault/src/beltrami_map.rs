//! Quasi-conformal maps on the one-dimensional torus: given a Beltrami
//! coefficient μ with sup |μ| < 1, produce a quasi-periodic map f solving
//! ∂̄f = μ∂f.
//!
//! Pipeline:
//!
//! 1. Solve the extension equation for the seed h₀·dz: the fixed point
//!    σ = h·dz makes ω = e^{i_μ}σ = h·dz + μh·dz̄ a closed one-form.
//! 2. Integrate ω: split off the period (linear) parts A = mean(h),
//!    B = mean(μh) and recover the periodic potential g spectrally from
//!    ∂g = h − A. Content in the handful of Nyquist-degenerate slots cannot
//!    be integrated and is surfaced in the reconstruction residual.
//! 3. Normalize to f = z + (B/A)z̄ + periodic with f(0) = 0, fixing the
//!    affine gauge freedom of the equation.
//!
//! All certificates — the pointwise equation residual sup|∂̄f − μ∂f|/sup|∂f|
//! and the closedness gap of ω — are recomputed on the returned map.

use num_complex::Complex64;

use crate::beltrami::BeltramiField;
use crate::error::{Error, Result};
use crate::extension::{solve_pq_extension, SolveReport};
use crate::form::FormField;
use crate::grid::same_grid;
use crate::scalar::{DerivativeKind, ScalarField};

/// f = linear_z·z + linear_zbar·z̄ + periodic, with the periodic part sampled
/// on the grid and vanishing at the origin.
#[derive(Clone, Debug)]
pub struct QuasiPeriodicMap {
    pub linear_z: Complex64,
    pub linear_zbar: Complex64,
    pub periodic: ScalarField,
}

impl QuasiPeriodicMap {
    /// Raw grid samples of f. The linear parts make this non-periodic data,
    /// intended for pointwise comparison and export — never for spectral
    /// differentiation.
    pub fn samples(&self) -> ScalarField {
        let grid = self.periodic.grid().clone();
        let (a, b) = (self.linear_z, self.linear_zbar);
        let linear = ScalarField::from_fn(&grid, |x| {
            let z = Complex64::new(x[0], x[1]);
            a * z + b * z.conj()
        });
        linear.add(&self.periodic)
    }

    /// ∂f and ∂̄f as periodic fields (the linear parts differentiate to
    /// constants).
    pub fn derivatives(&self) -> (ScalarField, ScalarField) {
        let grid = self.periodic.grid();
        let dz = ScalarField::constant(grid, self.linear_z)
            .add(&self.periodic.complex_derivative(0, DerivativeKind::Z));
        let dzbar = ScalarField::constant(grid, self.linear_zbar)
            .add(&self.periodic.complex_derivative(0, DerivativeKind::ZBar));
        (dz, dzbar)
    }

    /// sup |∂̄f − μ∂f| / sup |∂f|.
    pub fn equation_residual(&self, mu: &ScalarField) -> f64 {
        let (dz, dzbar) = self.derivatives();
        let defect = dzbar.sub(&mu.mul(&dz));
        defect.sup_norm() / dz.sup_norm()
    }

    /// min_x |∂f|² − |∂̄f|² — positive iff f is an orientation-preserving
    /// local homeomorphism on the grid samples.
    pub fn orientation_margin(&self) -> f64 {
        let (dz, dzbar) = self.derivatives();
        let dz = dz.to_physical();
        let dzbar = dzbar.to_physical();
        let mut min = f64::INFINITY;
        for (a, b) in dz.data().iter().zip(dzbar.data().iter()) {
            min = min.min(a.norm_sqr() - b.norm_sqr());
        }
        min
    }
}

/// Result of integrating a closed one-form u·dz + v·dz̄.
pub struct Integration {
    /// Period coefficient A (the dz part).
    pub linear_z: Complex64,
    /// Period coefficient B (the dz̄ part).
    pub linear_zbar: Complex64,
    /// Zero-mean periodic potential g with ∂g ≈ u − A, ∂̄g ≈ v − B.
    pub periodic: ScalarField,
    /// ‖∂g − (u−A)‖ and ‖∂̄g − (v−B)‖ combined, relative to ‖u‖ + ‖v‖;
    /// nonzero exactly when the data had closedness error or content in the
    /// Nyquist-degenerate slots.
    pub reconstruction_residual: f64,
}

/// Extracts the scalar coefficient from a valence-1 field on n = 1.
fn mu_scalar(mu: &BeltramiField) -> Result<&ScalarField> {
    if mu.grid().complex_dim() != 1 || mu.valence() != 1 {
        return Err(Error::Incompatible(
            "the map solver works on one-dimensional valence-1 coefficients".into(),
        ));
    }
    Ok(mu.component(0, 0b1))
}

/// Solves for the derivative coefficient h with ω = h·dz + μh·dz̄ closed,
/// seeded by the constant h₀. Thin wrapper over the extension solver.
pub fn solve_one_form(
    mu: &BeltramiField,
    h0: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<(ScalarField, SolveReport)> {
    let grid = mu.grid().clone();
    mu_scalar(mu)?;
    let mut omega0 = FormField::zeros(&grid, 1, 0);
    omega0.set_component(0b1, 0, ScalarField::constant(&grid, h0));
    let (sigma, report) = solve_pq_extension(&omega0, mu, tol, max_iter)?;
    Ok((sigma.component(0b1, 0).clone(), report))
}

/// Integrates a closed one-form u·dz + v·dz̄ into period parts and a periodic
/// potential. Fails when the closedness defect ‖∂v − ∂̄u‖ exceeds 1e−8
/// relative to ‖u‖ + ‖v‖.
pub fn integrate_closed_one_form(u: &ScalarField, v: &ScalarField) -> Result<Integration> {
    same_grid(u.grid(), v.grid(), "one-form integration")?;
    let grid = u.grid().clone();
    if grid.complex_dim() != 1 {
        return Err(Error::Incompatible(
            "one-form integration is a one-dimensional operation".into(),
        ));
    }
    let scale = u.l2_norm() + v.l2_norm();
    if scale == 0.0 {
        return Ok(Integration {
            linear_z: Complex64::new(0.0, 0.0),
            linear_zbar: Complex64::new(0.0, 0.0),
            periodic: ScalarField::zeros(&grid),
            reconstruction_residual: 0.0,
        });
    }
    let closedness = v
        .complex_derivative(0, DerivativeKind::Z)
        .sub(&u.complex_derivative(0, DerivativeKind::ZBar))
        .l2_norm()
        / scale;
    if closedness > 1e-8 {
        return Err(Error::Precondition(format!(
            "one-form is not closed: relative defect {closedness:.3e}"
        )));
    }

    let linear_z = u.mean();
    let linear_zbar = v.mean();
    // ĝ_k = û_k / m_z(k) on every slot where the effective ∂_z multiplier is
    // invertible; the remaining slots (true zero mode and Nyquist corners)
    // carry no integrable content and stay zero.
    let u_spec = u.to_spectral();
    let n_axes = grid.axes();
    let g_spec = {
        let mut idx = vec![0usize; n_axes];
        let mut data = u_spec.data().clone();
        let flat = data.as_slice_mut().expect("standard layout");
        for (pos, value) in flat.iter_mut().enumerate() {
            grid.decode_flat(pos, &mut idx);
            let kx = grid.effective_frequency(idx[0]) as f64;
            let ky = grid.effective_frequency(idx[1]) as f64;
            let m = Complex64::new(0.5 * ky, 0.5 * kx);
            *value = if m.norm_sqr() > 0.0 {
                *value / m
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        data
    };
    let periodic = ScalarField::from_samples_spectral(&grid, g_spec)?;
    let resid_z = periodic
        .complex_derivative(0, DerivativeKind::Z)
        .add(&ScalarField::constant(&grid, linear_z))
        .sub(u)
        .l2_norm();
    let resid_zbar = periodic
        .complex_derivative(0, DerivativeKind::ZBar)
        .add(&ScalarField::constant(&grid, linear_zbar))
        .sub(v)
        .l2_norm();
    Ok(Integration {
        linear_z,
        linear_zbar,
        periodic: periodic.to_physical(),
        reconstruction_residual: (resid_z.powi(2) + resid_zbar.powi(2)).sqrt() / scale,
    })
}

/// Solves ∂̄f = μ∂f on the one-dimensional torus, normalized to
/// f = z + b·z̄ + periodic with f(0) = 0.
pub fn solve_beltrami_map(
    mu: &BeltramiField,
    tol: f64,
    max_iter: usize,
) -> Result<(QuasiPeriodicMap, SolveReport)> {
    let mu_s = mu_scalar(mu)?.clone();
    let (h, mut report) = solve_one_form(mu, Complex64::new(1.0, 0.0), tol, max_iter)?;
    let u = h.to_physical();
    let v = mu_s.to_physical().mul(&u);

    report.type_split_gap = Some(
        v.complex_derivative(0, DerivativeKind::Z)
            .sub(&u.complex_derivative(0, DerivativeKind::ZBar))
            .l2_norm()
            / (u.l2_norm() + v.l2_norm()),
    );

    let integration = integrate_closed_one_form(&u, &v)?;
    let a = integration.linear_z;
    if a.norm() < 1e-8 {
        return Err(Error::Precondition(format!(
            "degenerate normalization: the dz period coefficient is {:.3e}",
            a.norm()
        )));
    }
    let lambda = Complex64::new(1.0, 0.0) / a;
    let scaled = integration.periodic.scale(lambda);
    let origin = scaled.to_physical().sample_at_origin();
    let periodic = scaled.map(|w| w - origin).to_physical();
    let map = QuasiPeriodicMap {
        linear_z: Complex64::new(1.0, 0.0),
        linear_zbar: lambda * integration.linear_zbar,
        periodic,
    };
    report.map_residual = Some(map.equation_residual(&mu_s));
    Ok((map, report))
}
