//! Shared helpers for the integration suites: mode-list field construction
//! (so one continuum function can be sampled at several resolutions),
//! fourth-order finite-difference stencils, and deformation builders with
//! calibrated sup norms.
#![allow(dead_code)]

use std::sync::Arc;

use dolbeault::deformation::DEFAULT_JACOBIAN_FLOOR;
use dolbeault::scalar::ScalarField;
use dolbeault::{BeltramiField, DerivativeKind, FormField, TorusGrid, TorusMap};
use ndarray::ArrayD;
use num_complex::Complex64;
use rand::Rng;

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Deterministic list of Fourier modes with every slot frequency in
/// [−band, band] and coefficients drawn uniformly from the complex unit
/// square. The list is grid-independent: sample it on two grids to get two
/// discretizations of the same smooth function.
pub fn random_mode_list(
    axes: usize,
    band: i64,
    rng: &mut impl Rng,
) -> Vec<(Vec<i64>, Complex64)> {
    let width = (2 * band + 1) as usize;
    let total = width.pow(axes as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut key = vec![0i64; axes];
        for slot in (0..axes).rev() {
            key[slot] = (rem % width) as i64 - band;
            rem /= width;
        }
        let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out.push((key, coeff));
    }
    out
}

/// Samples a mode list on a grid.
pub fn field_from_modes(
    grid: &Arc<TorusGrid>,
    modes: &[(Vec<i64>, Complex64)],
) -> ScalarField {
    ScalarField::from_modes(grid, modes).unwrap()
}

/// Physical samples shifted by `k` grid steps along one real axis
/// (out[idx] = in[idx + k], wrapped).
pub fn shifted_samples(f: &ScalarField, axis: usize, k: i64) -> ArrayD<Complex64> {
    let phys = f.to_physical();
    let data = phys.data();
    let len = data.shape()[axis] as i64;
    ArrayD::from_shape_fn(data.raw_dim(), |idx| {
        let mut src = idx.clone();
        src[axis] = (idx[axis] as i64 + k).rem_euclid(len) as usize;
        data[src]
    })
}

/// Fourth-order centered difference along a real axis:
/// (−f₊₂ + 8f₊₁ − 8f₋₁ + f₋₂) / (12h).
pub fn fd_real_derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = f.grid().clone();
    let h = TAU / grid.size() as f64;
    let p2 = shifted_samples(f, axis, 2);
    let p1 = shifted_samples(f, axis, 1);
    let m1 = shifted_samples(f, axis, -1);
    let m2 = shifted_samples(f, axis, -2);
    let mut out = p1;
    out.zip_mut_with(&p2, |a, b| *a = 8.0 * *a - *b);
    out.zip_mut_with(&m1, |a, b| *a = *a - 8.0 * *b);
    out.zip_mut_with(&m2, |a, b| *a = (*a + *b) / (12.0 * h));
    ScalarField::from_samples(&grid, out).unwrap()
}

/// Finite-difference ∂/∂z^a = ½(∂x − i∂y) or ∂/∂z̄^a = ½(∂x + i∂y) built
/// from two real-axis stencils.
pub fn fd_complex_derivative(f: &ScalarField, a: usize, kind: DerivativeKind) -> ScalarField {
    let dx = fd_real_derivative(f, 2 * a);
    let dy = fd_real_derivative(f, 2 * a + 1);
    let s = match kind {
        DerivativeKind::Z => -1.0,
        DerivativeKind::ZBar => 1.0,
    };
    dx.add_scaled(&dy, Complex64::new(0.0, s))
        .scale(Complex64::new(0.5, 0.0))
}

/// Relative L² distance ‖a − b‖ / ‖b‖.
pub fn rel_gap(a: &FormField, b: &FormField) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}

/// Relative L² distance for scalars.
pub fn rel_gap_scalar(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}

/// n = 2 shear map w¹ = z¹ + v(z², z̄²), w² = z², rescaled so the induced
/// deformation field has sup norm exactly `target_sup`. The induced field
/// has the single entry φ¹_2̄ = ∂v/∂z̄², is integrable to rounding, and its
/// largest singular value equals its only entry — so the sup calibration is
/// exact.
pub fn shear_with_sup(
    grid: &Arc<TorusGrid>,
    band: i64,
    target_sup: f64,
    rng: &mut impl Rng,
) -> (TorusMap, BeltramiField) {
    let modes: Vec<(Vec<i64>, Complex64)> = random_mode_list(2, band, rng)
        .into_iter()
        .map(|(k, c)| (vec![0, 0, k[0], k[1]], c))
        .collect();
    let v = field_from_modes(grid, &modes);
    let map = TorusMap::shear(grid, v.clone()).unwrap();
    let sup = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap().sup_norm();
    let map = TorusMap::shear(grid, v.scale(Complex64::new(target_sup / sup, 0.0))).unwrap();
    let phi = map.beltrami(DEFAULT_JACOBIAN_FLOOR).unwrap();
    (map, phi)
}

/// Generic perturbation map with band-limited trig-polynomial components,
/// each scaled so the sup of its complex derivatives equals `eps` — this
/// keeps the Jacobian uniformly within O(eps) of the identity, so the
/// induced deformation field has sup norm ≈ eps and is integrable by
/// construction (up to aliasing of the Jacobian inversion).
pub fn generic_map(
    grid: &Arc<TorusGrid>,
    band: i64,
    eps: f64,
    rng: &mut impl Rng,
) -> TorusMap {
    let pert = (0..grid.complex_dim())
        .map(|_| {
            let raw = field_from_modes(grid, &random_mode_list(grid.axes(), band, rng));
            let mut d_sup: f64 = 0.0;
            for a in 0..grid.complex_dim() {
                for kind in [DerivativeKind::Z, DerivativeKind::ZBar] {
                    d_sup = d_sup.max(raw.complex_derivative(a, kind).sup_norm());
                }
            }
            raw.scale(Complex64::new(eps / d_sup, 0.0))
        })
        .collect();
    TorusMap::new(grid, pert).unwrap()
}

/// Valence-1 field on n = 1 wrapping a single scalar coefficient.
pub fn coefficient_field(grid: &Arc<TorusGrid>, f: ScalarField) -> BeltramiField {
    let mut mu = BeltramiField::zeros(grid, 1);
    mu.set_component(0, 0b1, f);
    mu
}

/// Exact complex-equality check: every component pair differs by exactly
/// zero (±0.0 counted equal). Used for "same code path" reduction claims.
pub fn exactly_equal(a: &FormField, b: &FormField) -> bool {
    if a.bidegree() != b.bidegree() {
        return false;
    }
    a.components().all(|(im, jm, ca)| {
        let cb = b.component(im, jm);
        ca.to_physical()
            .data()
            .iter()
            .zip(cb.to_physical().data().iter())
            .all(|(x, y)| x.re - y.re == 0.0 && x.im - y.im == 0.0)
    })
}
