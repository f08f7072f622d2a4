//! Deformations of the torus presented by explicit self-maps
//! w^a = z^a + π^a(x) with periodic trigonometric-polynomial perturbations π.
//!
//! The Jacobian splits into holomorphic and antiholomorphic blocks
//! a^i_j = δ_ij + ∂π^i/∂z^j and b^i_j = ∂π^i/∂z̄^j; when a is invertible the
//! map induces the valence-1 field φ = a⁻¹b, which is integrable up to the
//! truncation committed by sampling the rational matrix a⁻¹b on the grid
//! (for band-limited π the blocks a, b themselves are exact).
//!
//! [`TorusMap::claim_identity_residual`] measures the scalar identity
//! ∂̄_j log det a − φ^i_ȷ̄ ∂_i log det a = ∂_i φ^i_ȷ̄ (summed over i, one
//! residual per j̄), evaluated branch-free through Jacobi's formula
//! ∂ log det a = tr(a⁻¹ ∂a).

use std::sync::Arc;

use num_complex::Complex64;

use crate::beltrami::BeltramiField;
use crate::error::{Error, Result};
use crate::grid::{same_grid, TorusGrid};
use crate::scalar::{DerivativeKind, Kahan, ScalarField};

/// Floor on min_x |det a(x)| below which a map is treated as degenerate.
pub const DEFAULT_JACOBIAN_FLOOR: f64 = 1e-3;

/// A self-map of the torus, identity plus periodic perturbations.
#[derive(Clone)]
pub struct TorusMap {
    grid: Arc<TorusGrid>,
    pert: Vec<ScalarField>,
}

/// The two Jacobian blocks of a [`TorusMap`], row-major n×n fields.
pub struct Jacobian {
    /// a^i_j = δ_ij + ∂π^i/∂z^j.
    pub holomorphic: Vec<ScalarField>,
    /// b^i_j = ∂π^i/∂z̄^j.
    pub antiholomorphic: Vec<ScalarField>,
}

impl TorusMap {
    /// The identity map.
    pub fn identity(grid: &Arc<TorusGrid>) -> Self {
        let n = grid.complex_dim();
        TorusMap {
            grid: grid.clone(),
            pert: (0..n).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    /// w^a = z^a + pert^a. One perturbation field per complex coordinate.
    pub fn new(grid: &Arc<TorusGrid>, pert: Vec<ScalarField>) -> Result<Self> {
        if pert.len() != grid.complex_dim() {
            return Err(Error::Incompatible(format!(
                "a map on n = {} needs {} perturbation fields, got {}",
                grid.complex_dim(),
                grid.complex_dim(),
                pert.len()
            )));
        }
        for p in &pert {
            same_grid(grid, p.grid(), "map perturbation")?;
        }
        Ok(TorusMap {
            grid: grid.clone(),
            pert: pert.iter().map(|p| p.to_physical()).collect(),
        })
    }

    /// n = 2 shear w¹ = z¹ + v, w² = z²; with v depending only on the second
    /// coordinate the induced field is exactly integrable and nilpotent.
    pub fn shear(grid: &Arc<TorusGrid>, v: ScalarField) -> Result<Self> {
        if grid.complex_dim() != 2 {
            return Err(Error::Incompatible("shear maps need n = 2".into()));
        }
        let zero = ScalarField::zeros(grid);
        TorusMap::new(grid, vec![v, zero])
    }

    /// n = 1 family w = z + β e^{ix} whose Beltrami coefficient has the
    /// closed-form sup norm (β/2)/(1 − β/2); β = 2s/(1+s) hits sup = s.
    pub fn one_dim_exponential(grid: &Arc<TorusGrid>, beta: f64) -> Result<Self> {
        if grid.complex_dim() != 1 {
            return Err(Error::Incompatible(
                "the exponential family is a one-dimensional construction".into(),
            ));
        }
        let pert =
            ScalarField::from_modes(grid, &[(vec![1, 0], Complex64::new(beta, 0.0))])?;
        TorusMap::new(grid, vec![pert])
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// Raw grid samples of the component w^a = z^a + π^a. The linear part
    /// makes this non-periodic data: it is meant for pointwise comparison of
    /// quasi-periodic maps, never for spectral differentiation.
    pub fn component_samples(&self, a: usize) -> ScalarField {
        let linear = ScalarField::from_fn(&self.grid, |x| Complex64::new(x[2 * a], x[2 * a + 1]));
        linear.add(&self.pert[a])
    }

    /// Both Jacobian blocks, differentiated spectrally (exact for
    /// band-limited perturbations).
    pub fn jacobian(&self) -> Jacobian {
        let n = self.grid.complex_dim();
        let mut holo = Vec::with_capacity(n * n);
        let mut anti = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut da = self.pert[i].complex_derivative(j, DerivativeKind::Z).to_physical();
                if i == j {
                    da = da.add(&ScalarField::constant(&self.grid, Complex64::new(1.0, 0.0)));
                }
                holo.push(da);
                anti.push(self.pert[i].complex_derivative(j, DerivativeKind::ZBar).to_physical());
            }
        }
        Jacobian {
            holomorphic: holo,
            antiholomorphic: anti,
        }
    }

    /// min_x |det a(x)| — the orientation/invertibility margin of the
    /// holomorphic Jacobian block.
    pub fn jacobian_margin(&self) -> f64 {
        let jac = self.jacobian();
        let det = det_field(&self.grid, &jac.holomorphic);
        let mut min = f64::INFINITY;
        for v in det.data().iter() {
            min = min.min(v.norm());
        }
        min
    }

    /// The induced Beltrami field φ = a⁻¹b. Fails when min |det a| drops
    /// below `jacobian_floor`.
    pub fn beltrami(&self, jacobian_floor: f64) -> Result<BeltramiField> {
        let jac = self.jacobian();
        let inv = invert_matrix_field(&self.grid, &jac.holomorphic, jacobian_floor)?;
        let n = self.grid.complex_dim();
        let mut phi = BeltramiField::zeros(&self.grid, 1);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ScalarField::zeros(&self.grid);
                for k in 0..n {
                    acc = acc.add(&inv[i * n + k].mul(&jac.antiholomorphic[k * n + j]));
                }
                phi.set_component(i, 1 << j, acc);
            }
        }
        Ok(phi)
    }

    /// L² residual of ∂̄_j log det a − φ^i_ȷ̄ ∂_i log det a = ∂_i φ^i_ȷ̄,
    /// aggregated over j. The log-derivatives are evaluated as traces
    /// tr(a⁻¹ ∂a), so no branch of the logarithm is ever chosen.
    pub fn claim_identity_residual(&self, jacobian_floor: f64) -> Result<f64> {
        let n = self.grid.complex_dim();
        let jac = self.jacobian();
        let inv = invert_matrix_field(&self.grid, &jac.holomorphic, jacobian_floor)?;
        let phi = self.beltrami(jacobian_floor)?;

        // Log-derivative scalars: dlog_z[i] = tr(a⁻¹ ∂_{z_i} a),
        // dlog_zbar[j] = tr(a⁻¹ ∂_{z̄_j} a).
        let trace_of = |kind: DerivativeKind, axis: usize| -> ScalarField {
            let mut acc = ScalarField::zeros(&self.grid);
            for r in 0..n {
                for c in 0..n {
                    let da = jac.holomorphic[r * n + c].complex_derivative(axis, kind);
                    acc = acc.add(&inv[c * n + r].mul(&da));
                }
            }
            acc
        };

        let dlog_z: Vec<ScalarField> = (0..n).map(|i| trace_of(DerivativeKind::Z, i)).collect();
        let mut total = Kahan::default();
        for j in 0..n {
            let dlog_zbar_j = trace_of(DerivativeKind::ZBar, j);
            let mut lhs = dlog_zbar_j;
            let mut rhs = ScalarField::zeros(&self.grid);
            for i in 0..n {
                let phi_ij = phi.component(i, 1 << j);
                lhs = lhs.sub(&phi_ij.mul(&dlog_z[i]));
                rhs = rhs.add(&phi_ij.complex_derivative(i, DerivativeKind::Z));
            }
            let r = lhs.sub(&rhs).l2_norm();
            total.add(r * r);
        }
        Ok(total.value().sqrt())
    }
}

impl std::fmt::Debug for TorusMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusMap").field("grid", &self.grid).finish()
    }
}

/// det of a row-major n×n matrix of fields, pointwise.
pub(crate) fn det_field(grid: &Arc<TorusGrid>, m: &[ScalarField]) -> ScalarField {
    let n = grid.complex_dim();
    match n {
        1 => m[0].clone(),
        2 => m[0].mul(&m[3]).sub(&m[1].mul(&m[2])),
        _ => unreachable!("grids are restricted to n ≤ 2"),
    }
}

/// Pointwise inverse of a row-major matrix field; errors when the
/// determinant magnitude dips below `floor` anywhere.
fn invert_matrix_field(
    grid: &Arc<TorusGrid>,
    m: &[ScalarField],
    floor: f64,
) -> Result<Vec<ScalarField>> {
    let n = grid.complex_dim();
    let det = det_field(grid, m);
    let mut min = f64::INFINITY;
    for v in det.data().iter() {
        min = min.min(v.norm());
    }
    if min < floor {
        return Err(Error::Precondition(format!(
            "holomorphic Jacobian block is near-singular: min |det| = {min:.3e} < {floor:.3e}"
        )));
    }
    let inv_det = det.map(|v| 1.0 / v);
    Ok(match n {
        1 => vec![inv_det],
        2 => vec![
            m[3].mul(&inv_det),
            m[1].mul(&inv_det).scale(Complex64::new(-1.0, 0.0)),
            m[2].mul(&inv_det).scale(Complex64::new(-1.0, 0.0)),
            m[0].mul(&inv_det),
        ],
        _ => unreachable!(),
    })
}

/// min_x |det(I − P(x) conj(P(x)))| for a valence-1 field with pointwise
/// matrix P — positive exactly when no pointwise eigenvalue of φφ̄ equals 1,
/// the condition for the deformed structure to stay at finite distance.
pub fn finite_distance_margin(phi: &BeltramiField) -> f64 {
    assert_eq!(phi.valence(), 1, "margin is defined for valence-1 fields");
    let grid = phi.grid().clone();
    let n = grid.complex_dim();
    let physical: Vec<ScalarField> = match n {
        1 => vec![phi.component(0, 0b1).to_physical()],
        2 => vec![
            phi.component(0, 0b01).to_physical(),
            phi.component(0, 0b10).to_physical(),
            phi.component(1, 0b01).to_physical(),
            phi.component(1, 0b10).to_physical(),
        ],
        _ => unreachable!(),
    };
    let slices: Vec<&[Complex64]> = physical
        .iter()
        .map(|f| f.data().as_slice().expect("standard layout"))
        .collect();
    let len = slices[0].len();
    let mut min = f64::INFINITY;
    for idx in 0..len {
        let d = match n {
            1 => {
                let p = slices[0][idx];
                Complex64::new(1.0 - p.norm_sqr(), 0.0)
            }
            2 => {
                let p00 = slices[0][idx];
                let p01 = slices[1][idx];
                let p10 = slices[2][idx];
                let p11 = slices[3][idx];
                // M = P·conj(P), then det(I − M).
                let m00 = p00 * p00.conj() + p01 * p10.conj();
                let m01 = p00 * p01.conj() + p01 * p11.conj();
                let m10 = p10 * p00.conj() + p11 * p10.conj();
                let m11 = p10 * p01.conj() + p11 * p11.conj();
                (Complex64::new(1.0, 0.0) - m00) * (Complex64::new(1.0, 0.0) - m11) - m01 * m10
            }
            _ => unreachable!(),
        };
        min = min.min(d.norm());
    }
    min
}
