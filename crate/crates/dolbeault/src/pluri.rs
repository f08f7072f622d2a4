//! Weighted canonical sections σ = f·dZ^{⊗m} on Kähler patches, the twisted
//! derivative ∇′, the metric divergence of deformation fields, and the
//! holomorphy defect Ψ that measures whether a section stays holomorphic
//! across a deformation.
//!
//! A weight-m section is stored as an (n,0) [`FormField`] whose `Weight` is
//! `CanonicalPower(m−1)`: one dZ factor lives in the form part, the other
//! m−1 in the weight tag. With that bookkeeping:
//!
//! * ∇′σ = ∂σ − (m−1)(∂ log det g)∧σ, acting on weight-(m−1) forms of any
//!   bidegree;
//! * div φ = (∂_i φ^i_ȷ̄ + φ^i_ȷ̄ ∂_i log det g) dz̄^j;
//! * Ψ = ∂̄σ + ∇′(φ⌟σ) − (m−1)(div φ)∧σ.
//!
//! The metric terms cancel identically, so Ψ also has the patch-independent
//! local expression (−1)^n (∂̄_j f − φ^i_ȷ̄ ∂_i f − m f ∂_i φ^i_ȷ̄) dz̄^j∧dZ —
//! [`holomorphy_defect`] and [`holomorphy_defect_local`] must agree on every
//! patch, flat or curved, and the tests pin that down.
//!
//! For integrable φ the defect obeys the transport identity
//! ∂̄W = −(∇′(φ⌟Ψ) − (m−1)(div φ)∧Ψ) with W = ∇′(φ⌟σ) − (m−1)(div φ)∧σ,
//! measured by [`defect_transport_residual`] (non-vacuous only at n = 2,
//! where (n,2)-forms exist).

use std::sync::Arc;

use num_complex::Complex64;

use crate::beltrami::{contract, integrability_residual, BeltramiField};
use crate::error::{Error, Result};
use crate::form::{FormField, Weight};
use crate::grid::{same_grid, TorusGrid};
use crate::hodge::{dolbeault, DolbeaultKind};
use crate::scalar::{DerivativeKind, ScalarField};

/// A Kähler metric g = δ + ∂∂̄ψ on the torus, with the derived quantities
/// the weighted calculus needs.
#[derive(Clone)]
pub struct KahlerPatch {
    grid: Arc<TorusGrid>,
    /// g_{iȷ̄}, row-major n×n.
    metric: Vec<ScalarField>,
    /// det g (real and positive on a valid patch).
    det: ScalarField,
    /// ∂_{z_i} log det g, one field per i.
    dlog: Vec<ScalarField>,
    /// min over the grid of the smallest eigenvalue of g.
    margin: f64,
}

impl std::fmt::Debug for KahlerPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KahlerPatch")
            .field("grid", &self.grid)
            .field("margin", &self.margin)
            .finish()
    }
}

impl KahlerPatch {
    /// The flat patch: g = δ.
    pub fn flat(grid: &Arc<TorusGrid>) -> Self {
        let n = grid.complex_dim();
        let mut metric = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { 1.0 } else { 0.0 };
                metric.push(ScalarField::constant(grid, Complex64::new(v, 0.0)));
            }
        }
        KahlerPatch {
            grid: grid.clone(),
            metric,
            det: ScalarField::constant(grid, Complex64::new(1.0, 0.0)),
            dlog: (0..n).map(|_| ScalarField::zeros(grid)).collect(),
            margin: 1.0,
        }
    }

    /// Builds g = δ + ∂∂̄ψ from a real potential. Fails when ψ has an
    /// imaginary part or when g stops being positive definite somewhere.
    pub fn from_potential(grid: &Arc<TorusGrid>, psi: &ScalarField) -> Result<Self> {
        same_grid(grid, psi.grid(), "metric potential")?;
        let scale = psi.sup_norm().max(1.0);
        if psi.max_imag() > 1e-12 * scale {
            return Err(Error::Precondition(
                "the metric potential must be real-valued".into(),
            ));
        }
        let n = grid.complex_dim();
        let mut metric = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut entry = psi
                    .complex_derivative(i, DerivativeKind::Z)
                    .complex_derivative(j, DerivativeKind::ZBar)
                    .to_physical();
                if i == j {
                    entry = entry.add(&ScalarField::constant(grid, Complex64::new(1.0, 0.0)));
                }
                metric.push(entry);
            }
        }

        let margin = hermitian_min_eigenvalue(grid, &metric);
        if margin <= 0.0 {
            return Err(Error::MetricNotPositive { margin });
        }
        let det = match n {
            1 => metric[0].clone(),
            2 => metric[0].mul(&metric[3]).sub(&metric[1].mul(&metric[2])),
            _ => unreachable!("grids are restricted to n ≤ 2"),
        };
        let inv_det = det.to_physical().map(|v| 1.0 / v);
        let dlog = (0..n)
            .map(|i| {
                det.complex_derivative(i, DerivativeKind::Z)
                    .to_physical()
                    .mul(&inv_det)
            })
            .collect();
        Ok(KahlerPatch {
            grid: grid.clone(),
            metric,
            det: det.to_physical(),
            dlog,
            margin,
        })
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// Positivity margin: the smallest metric eigenvalue over the grid.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// det g as a grid field.
    pub fn determinant(&self) -> &ScalarField {
        &self.det
    }

    /// g_{iȷ̄}.
    pub fn metric_entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.metric[i * self.grid.complex_dim() + j]
    }

    /// ∂_{z_i} log det g.
    pub fn dlog_det(&self, i: usize) -> &ScalarField {
        &self.dlog[i]
    }
}

/// min over the grid of the smallest eigenvalue of a Hermitian matrix field.
fn hermitian_min_eigenvalue(grid: &TorusGrid, m: &[ScalarField]) -> f64 {
    let n = grid.complex_dim();
    match n {
        1 => {
            let mut min = f64::INFINITY;
            for v in m[0].to_physical().data().iter() {
                min = min.min(v.re);
            }
            min
        }
        2 => {
            let phys: Vec<ScalarField> = m.iter().map(|f| f.to_physical()).collect();
            let s: Vec<&[Complex64]> = phys
                .iter()
                .map(|f| f.data().as_slice().expect("standard layout"))
                .collect();
            let mut min = f64::INFINITY;
            for idx in 0..s[0].len() {
                let tr = s[0][idx].re + s[3][idx].re;
                let diff = s[0][idx].re - s[3][idx].re;
                let disc = (diff * diff + 4.0 * s[1][idx].norm_sqr()).sqrt();
                min = min.min(0.5 * (tr - disc));
            }
            min
        }
        _ => unreachable!(),
    }
}

/// σ = f·dZ^{⊗m} as an (n,0) form of weight CanonicalPower(m−1).
pub fn canonical_section(grid: &Arc<TorusGrid>, f: ScalarField, m: usize) -> Result<FormField> {
    if m == 0 {
        return Err(Error::Incompatible("the canonical power m must be ≥ 1".into()));
    }
    let n = grid.complex_dim();
    let full = (1u32 << n) - 1;
    let mut sigma = FormField::zeros(grid, n, 0).with_weight(Weight::CanonicalPower(m - 1));
    sigma.set_component(full, 0, f);
    Ok(sigma)
}

/// Metric divergence div φ = (∂_i φ^i_ȷ̄ + φ^i_ȷ̄ ∂_i log det g) dz̄^j.
pub fn div_beltrami(patch: &KahlerPatch, phi: &BeltramiField) -> Result<FormField> {
    same_grid(patch.grid(), phi.grid(), "divergence")?;
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "the divergence takes a valence-1 field".into(),
        ));
    }
    let grid = patch.grid().clone();
    let n = grid.complex_dim();
    let mut out = FormField::zeros(&grid, 0, 1);
    for j in 0..n {
        let mut acc = ScalarField::zeros(&grid);
        for i in 0..n {
            let phi_ij = phi.component(i, 1 << j);
            acc = acc.add(&phi_ij.complex_derivative(i, DerivativeKind::Z));
            acc = acc.add(&phi_ij.mul(patch.dlog_det(i)));
        }
        out.set_component(0, 1 << j, acc);
    }
    Ok(out)
}

/// Twisted holomorphic derivative ∇′σ = ∂σ − (m−1)(∂ log det g)∧σ on
/// weight-(m−1) forms. The weight tag is enforced.
pub fn nabla_prime(patch: &KahlerPatch, sigma: &FormField, m: usize) -> Result<FormField> {
    same_grid(patch.grid(), sigma.grid(), "twisted derivative")?;
    if m == 0 {
        return Err(Error::Incompatible("the canonical power m must be ≥ 1".into()));
    }
    if sigma.weight() != Weight::CanonicalPower(m - 1) {
        return Err(Error::WeightMismatch(format!(
            "∇′ at power m = {m} needs weight tag {}, found {:?}",
            m - 1,
            sigma.weight()
        )));
    }
    let grid = patch.grid().clone();
    let n = grid.complex_dim();
    let mut out = dolbeault(sigma, DolbeaultKind::Holomorphic);
    if m > 1 {
        // (∂ log det g)∧σ, assembled as a plain (1,0)-form wedge.
        let mut dlog_form = FormField::zeros(&grid, 1, 0);
        for i in 0..n {
            dlog_form.set_component(1 << i, 0, patch.dlog_det(i).clone());
        }
        let wedge = dlog_form.wedge(sigma)?;
        out = out.add_scaled(&wedge, Complex64::new(-((m - 1) as f64), 0.0));
    }
    Ok(out)
}

/// The holomorphy defect Ψ = ∂̄σ + ∇′(φ⌟σ) − (m−1)(div φ)∧σ of a weight-m
/// canonical section under the deformation φ.
pub fn holomorphy_defect(
    patch: &KahlerPatch,
    sigma: &FormField,
    phi: &BeltramiField,
    m: usize,
) -> Result<FormField> {
    let contracted = contract(phi, sigma)?;
    let mut psi = dolbeault(sigma, DolbeaultKind::AntiHolomorphic)
        .add(&nabla_prime(patch, &contracted, m)?);
    if m > 1 {
        let div = div_beltrami(patch, phi)?;
        let correction = div.wedge(sigma)?;
        psi = psi.add_scaled(&correction, Complex64::new(-((m - 1) as f64), 0.0));
    }
    Ok(psi)
}

/// The patch-independent local expression of the same defect:
/// (−1)^n (∂̄_j f − φ^i_ȷ̄ ∂_i f − m f ∂_i φ^i_ȷ̄) dz̄^j∧dZ^{⊗m}.
pub fn holomorphy_defect_local(
    sigma: &FormField,
    phi: &BeltramiField,
    m: usize,
) -> Result<FormField> {
    same_grid(sigma.grid(), phi.grid(), "local defect")?;
    if m == 0 {
        return Err(Error::Incompatible("the canonical power m must be ≥ 1".into()));
    }
    let grid = sigma.grid().clone();
    let n = grid.complex_dim();
    let full = (1u32 << n) - 1;
    if sigma.bidegree() != (n, 0) || sigma.weight() != Weight::CanonicalPower(m - 1) {
        return Err(Error::Incompatible(format!(
            "local defect expects a weight-{m} canonical section, got bidegree {:?} weight {:?}",
            sigma.bidegree(),
            sigma.weight()
        )));
    }
    let f = sigma.component(full, 0);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mf = Complex64::new(m as f64, 0.0);
    let mut out =
        FormField::zeros(&grid, n, 1).with_weight(Weight::CanonicalPower(m - 1));
    for j in 0..n {
        let mut coeff = f.complex_derivative(j, DerivativeKind::ZBar);
        for i in 0..n {
            let phi_ij = phi.component(i, 1 << j);
            coeff = coeff.sub(&phi_ij.mul(&f.complex_derivative(i, DerivativeKind::Z)));
            coeff = coeff.sub(
                &f.mul(&phi_ij.complex_derivative(i, DerivativeKind::Z)).scale(mf),
            );
        }
        out.set_component(full, 1 << j, coeff.scale(Complex64::new(sign, 0.0)));
    }
    Ok(out)
}

/// Transport identity residual for the defect: with
/// W = ∇′(φ⌟σ) − (m−1)(div φ)∧σ and Ψ the full defect,
/// ‖∂̄W + ∇′(φ⌟Ψ) − (m−1)(div φ)∧Ψ‖ / (‖σ‖ + 1). Requires n = 2 (the
/// identity lands in (n,2)-forms) and an integrable φ.
pub fn defect_transport_residual(
    patch: &KahlerPatch,
    sigma: &FormField,
    phi: &BeltramiField,
    m: usize,
) -> Result<f64> {
    let grid = patch.grid().clone();
    if grid.complex_dim() != 2 {
        return Err(Error::Incompatible(
            "the transport identity is vacuous below two complex dimensions".into(),
        ));
    }
    let integrability = integrability_residual(phi)? / (1.0 + phi.l2_norm());
    if integrability > 1e-8 {
        return Err(Error::Precondition(format!(
            "deformation field is not integrable: relative residual {integrability:.3e}"
        )));
    }
    let div = div_beltrami(patch, phi)?;
    let correction = |target: &FormField| -> Result<FormField> {
        let mut w = nabla_prime(patch, &contract(phi, target)?, m)?;
        if m > 1 {
            w = w.add_scaled(&div.wedge(target)?, Complex64::new(-((m - 1) as f64), 0.0));
        }
        Ok(w)
    };
    let w = correction(sigma)?;
    let psi = dolbeault(sigma, DolbeaultKind::AntiHolomorphic).add(&w);
    let lhs = dolbeault(&w, DolbeaultKind::AntiHolomorphic);
    let rhs = correction(&psi)?;
    Ok(lhs.add(&rhs).l2_norm() / (sigma.l2_norm() + 1.0))
}

/// The family φ^i_ȷ̄ = C^i_j / det g, divergence-free on the patch for any
/// constant matrix C (the metric term cancels the derivative of 1/det g).
pub fn divergence_free_family(
    patch: &KahlerPatch,
    constants: &[Complex64],
) -> Result<BeltramiField> {
    let grid = patch.grid().clone();
    let n = grid.complex_dim();
    if constants.len() != n * n {
        return Err(Error::Incompatible(format!(
            "the family needs {} matrix entries, got {}",
            n * n,
            constants.len()
        )));
    }
    let inv_det = patch.determinant().map(|v| 1.0 / v);
    let mut phi = BeltramiField::zeros(&grid, 1);
    for i in 0..n {
        for j in 0..n {
            phi.set_component(i, 1 << j, inv_det.scale(constants[i * n + j]));
        }
    }
    Ok(phi)
}
