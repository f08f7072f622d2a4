//! Vector-valued (0,k)-forms φ = Σ φ^i_J̄ dz̄^J ⊗ ∂_i and their calculus:
//! contraction i_φ, exponential e^{i_φ}, Lie bracket, Lie derivative, and the
//! residuals of the generalized Cartan identities.
//!
//! Conventions (all verified by the unit and property tests):
//!
//! * contraction of a decomposable φ = η ⊗ Y is i_φσ = η ∧ (ι_Y σ), which in
//!   components reads
//!   i_φ(dz^I∧dz̄^L) = Σ_{i∈I} ε(i,I) (−1)^{k(p−1)} μ(J,L) · φ^i_J ·
//!   dz^{I∖i}∧dz̄^{J∪L}, with ε the slot sign, μ the merge sign;
//! * i_φ i_ψ = (−1)^{(k+1)(k′+1)} i_ψ i_φ — valence-1 contractions commute;
//! * Lie derivative L_φ = (−1)^k d∘i_φ + i_φ∘d with (1,0)/(0,1) parts
//!   obtained by splitting d = ∂ + ∂̄ (each part lands in a single bidegree);
//! * bracket \[φ,ψ\] = Σ_{i,j} (φ^i ∧ ∂_i ψ^j − (−1)^{kk′} ψ^i ∧ ∂_i φ^j) ⊗ ∂_j;
//! * Cartan: i_{\[φ,ψ\]} = L_φ∘i_ψ − i_ψ∘L_φ for valence-1 φ, ψ;
//! * conjugation: e^{−i_φ}∘d∘e^{i_φ} = d − L_φ − i_{½\[φ,φ\]}, which for
//!   integrable φ (∂̄φ = ½\[φ,φ\]) collapses to d + ∂ i_φ − i_φ ∂;
//! * commutator lemma: ∂̄∘i_φ − i_φ∘∂̄ = i_{∂̄φ}.
//!
//! The metric pairing ⟨∂_i, ∂_j⟩ = ½δ_ij gives ‖φ‖² = ½·2^k Σ_{i,J} ‖φ^i_J‖².
//! The sup norm of a valence-1 field is the largest singular value of the
//! pointwise matrix (φ^i_ȷ̄(x)), maximized over grid points.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::form::FormField;
use crate::graded::GradedForm;
use crate::grid::{same_grid, TorusGrid};
use crate::hodge::{dolbeault, DolbeaultKind};
use crate::multi_index::{binomial, bits, masks, merge_sign, rank, slot_sign};
use crate::scalar::{DerivativeKind, Kahan, ScalarField};

/// A T^{1,0}-valued (0,k)-form with components φ^i_J (i = vector index,
/// J = strictly increasing dz̄ multi-index), stored i-major, J-minor.
#[derive(Clone)]
pub struct BeltramiField {
    grid: Arc<TorusGrid>,
    valence: usize,
    comps: Vec<ScalarField>,
}

impl BeltramiField {
    /// The zero field of the given valence k.
    pub fn zeros(grid: &Arc<TorusGrid>, valence: usize) -> Self {
        let n = grid.complex_dim();
        let count = n * binomial(n, valence);
        BeltramiField {
            grid: grid.clone(),
            valence,
            comps: (0..count).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    /// A constant valence-1 field from the row-major n×n matrix
    /// entries\[i·n + j\] = φ^i_ȷ̄.
    pub fn constant_matrix(grid: &Arc<TorusGrid>, entries: &[Complex64]) -> Result<Self> {
        let n = grid.complex_dim();
        if entries.len() != n * n {
            return Err(Error::Incompatible(format!(
                "constant Beltrami matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let mut f = BeltramiField::zeros(grid, 1);
        for i in 0..n {
            for j in 0..n {
                f.set_component(i, 1 << j, ScalarField::constant(grid, entries[i * n + j]));
            }
        }
        Ok(f)
    }

    /// Builds from components in canonical order (i-major, ascending J).
    pub fn from_components(
        grid: &Arc<TorusGrid>,
        valence: usize,
        comps: Vec<ScalarField>,
    ) -> Result<Self> {
        let n = grid.complex_dim();
        let expected = n * binomial(n, valence);
        if comps.len() != expected {
            return Err(Error::Incompatible(format!(
                "valence-{valence} field on n = {n} needs {expected} components, got {}",
                comps.len()
            )));
        }
        for c in &comps {
            same_grid(grid, c.grid(), "Beltrami component")?;
        }
        Ok(BeltramiField {
            grid: grid.clone(),
            valence,
            comps,
        })
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    fn index_of(&self, i: usize, j_mask: u32) -> usize {
        let n = self.grid.complex_dim();
        i * binomial(n, self.valence) + rank(n, j_mask)
    }

    /// Coefficient φ^i_J.
    pub fn component(&self, i: usize, j_mask: u32) -> &ScalarField {
        &self.comps[self.index_of(i, j_mask)]
    }

    /// Overwrites φ^i_J.
    pub fn set_component(&mut self, i: usize, j_mask: u32, field: ScalarField) {
        let idx = self.index_of(i, j_mask);
        self.comps[idx] = field;
    }

    /// Iterates (i, J-mask, coefficient).
    pub fn components(&self) -> impl Iterator<Item = (usize, u32, &ScalarField)> {
        let n = self.grid.complex_dim();
        let j_masks = masks(n, self.valence);
        let mut keys = Vec::with_capacity(self.comps.len());
        for i in 0..n {
            for &jm in &j_masks {
                keys.push((i, jm));
            }
        }
        keys.into_iter().zip(&self.comps).map(|((i, jm), c)| (i, jm, c))
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        same_grid(&self.grid, &other.grid, what)?;
        if self.valence != other.valence {
            return Err(Error::Incompatible(format!(
                "{what}: valences differ ({} vs {})",
                self.valence, other.valence
            )));
        }
        Ok(())
    }

    /// self + other.
    pub fn add(&self, other: &Self) -> Self {
        self.check_same_shape(other, "Beltrami add").expect("add");
        self.zip(other, |a, b| a.add(b))
    }

    /// self − other.
    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_shape(other, "Beltrami sub").expect("sub");
        self.zip(other, |a, b| a.sub(b))
    }

    /// c·self.
    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub(crate) fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        BeltramiField {
            grid: self.grid.clone(),
            valence: self.valence,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        BeltramiField {
            grid: self.grid.clone(),
            valence: self.valence,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// L² norm: ‖φ‖² = ½·2^k Σ_{i,J} ‖φ^i_J‖².
    pub fn l2_norm(&self) -> f64 {
        let w = 0.5 * 2f64.powi(self.valence as i32);
        let mut acc = Kahan::default();
        for c in &self.comps {
            let nrm = c.l2_norm();
            acc.add(nrm * nrm);
        }
        (acc.value() * w).sqrt()
    }

    /// Pointwise largest singular value of (φ^i_ȷ̄(x)), maximized over the
    /// grid. Defined for valence-1 fields only.
    pub fn sup_norm(&self) -> f64 {
        assert_eq!(self.valence, 1, "sup_norm is defined for valence-1 fields");
        let n = self.grid.complex_dim();
        let physical: Vec<ScalarField> = self.comps.iter().map(|c| c.to_physical()).collect();
        let slices: Vec<&[Complex64]> = physical
            .iter()
            .map(|c| c.data().as_slice().expect("standard layout"))
            .collect();
        let len = slices[0].len();
        let mut max = 0.0f64;
        match n {
            1 => {
                for idx in 0..len {
                    max = max.max(slices[0][idx].norm());
                }
            }
            2 => {
                // comps order: (i=0, ȷ̄=0), (0,1), (1,0), (1,1).
                for idx in 0..len {
                    let m00 = slices[0][idx];
                    let m01 = slices[1][idx];
                    let m10 = slices[2][idx];
                    let m11 = slices[3][idx];
                    // Eigenvalues of the 2×2 Hermitian matrix M†M.
                    let t = m00.norm_sqr() + m01.norm_sqr() + m10.norm_sqr() + m11.norm_sqr();
                    let det = (m00 * m11 - m01 * m10).norm_sqr();
                    let disc = (t * t - 4.0 * det).max(0.0).sqrt();
                    max = max.max(0.5 * (t + disc));
                }
                return max.sqrt();
            }
            _ => unreachable!("grids are restricted to n ≤ 2"),
        }
        max
    }
}

impl std::fmt::Debug for BeltramiField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BeltramiField")
            .field("grid", &self.grid)
            .field("valence", &self.valence)
            .finish()
    }
}

// ----- contraction ------------------------------------------------------------

/// Contraction i_φσ : (p,q) → (p−1, q+k). Requires p ≥ 1.
pub fn contract(phi: &BeltramiField, sigma: &FormField) -> Result<FormField> {
    same_grid(phi.grid(), sigma.grid(), "contract")?;
    let (p, _) = sigma.bidegree();
    if p == 0 {
        return Err(Error::Incompatible(
            "cannot contract a (0, q)-form against a vector-valued form".into(),
        ));
    }
    Ok(contract_unchecked(phi, sigma))
}

/// Contraction for internal graded use: callers guarantee p ≥ 1.
pub(crate) fn contract_unchecked(phi: &BeltramiField, sigma: &FormField) -> FormField {
    let grid = sigma.grid().clone();
    let k = phi.valence();
    let (p, q) = sigma.bidegree();
    let mut out = FormField::zeros(&grid, p - 1, q + k).with_weight(sigma.weight());
    if out.component_count() == 0 || sigma.component_count() == 0 {
        return out;
    }
    // (−1)^{k(p−1)}: the k dz̄ factors of φ cross the remaining p−1 dz's.
    let cross = if (k * (p - 1)) % 2 == 0 { 1.0 } else { -1.0 };
    for (im, lm, c_sigma) in sigma.components() {
        for i in bits(im) {
            let pos_sign = slot_sign(i, im);
            for (_, jm, c_phi) in phi.components().filter(|(vi, _, _)| *vi == i) {
                let Some(mu) = merge_sign(jm, lm) else { continue };
                let sign = pos_sign * cross * mu;
                let term = c_phi.mul(c_sigma);
                let target_i = im & !(1u32 << i);
                let target_j = jm | lm;
                let updated = out
                    .component(target_i, target_j)
                    .add_scaled(&term, Complex64::new(sign, 0.0));
                out.set_component(target_i, target_j, updated);
            }
        }
    }
    out
}

/// Exponential e^{i_φ}σ = Σ_j i_φ^j σ / j! — a mixed-degree form; the series
/// terminates at j = p since each contraction lowers p by one.
pub fn exp_contraction(phi: &BeltramiField, sigma: &FormField) -> GradedForm {
    GradedForm::from_form(sigma.clone()).exp_contract(phi)
}

// ----- derived operators ---------------------------------------------------------

/// ∂̄φ — componentwise Dolbeault derivative of the (0,k) legs, valence k+1.
pub fn dbar_beltrami(phi: &BeltramiField) -> BeltramiField {
    let grid = phi.grid().clone();
    let n = grid.complex_dim();
    let mut out = BeltramiField::zeros(&grid, phi.valence() + 1);
    if out.comps.is_empty() {
        return out;
    }
    for (i, jm, c) in phi.components() {
        for b in 0..n {
            if jm & (1 << b) != 0 {
                continue;
            }
            let sign = slot_sign(b, jm);
            let d = c.complex_derivative(b, DerivativeKind::ZBar);
            let updated = out
                .component(i, jm | (1 << b))
                .add_scaled(&d, Complex64::new(sign, 0.0));
            out.set_component(i, jm | (1 << b), updated);
        }
    }
    out
}

/// Lie bracket \[φ,ψ\] = Σ(φ^i ∧ ∂_iψ^j − (−1)^{kk′} ψ^i ∧ ∂_iφ^j) ⊗ ∂_j,
/// valence k + k′.
pub fn lie_bracket(phi: &BeltramiField, psi: &BeltramiField) -> Result<BeltramiField> {
    same_grid(phi.grid(), psi.grid(), "lie_bracket")?;
    let grid = phi.grid().clone();
    let n = grid.complex_dim();
    let (k, kp) = (phi.valence(), psi.valence());
    let swap_sign = if (k * kp) % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = BeltramiField::zeros(&grid, k + kp);
    if out.comps.is_empty() {
        return Ok(out);
    }
    for j in 0..n {
        for i in 0..n {
            for (_, j1, c_phi) in phi.components().filter(|(vi, _, _)| *vi == i) {
                for (_, j2, c_dpsi_src) in psi.components().filter(|(vj, _, _)| *vj == j) {
                    let Some(mu) = merge_sign(j1, j2) else { continue };
                    let term = c_phi.mul(&c_dpsi_src.complex_derivative(i, DerivativeKind::Z));
                    let updated = out
                        .component(j, j1 | j2)
                        .add_scaled(&term, Complex64::new(mu, 0.0));
                    out.set_component(j, j1 | j2, updated);
                }
            }
            for (_, j1, c_psi) in psi.components().filter(|(vi, _, _)| *vi == i) {
                for (_, j2, c_dphi_src) in phi.components().filter(|(vj, _, _)| *vj == j) {
                    let Some(mu) = merge_sign(j1, j2) else { continue };
                    let term = c_psi.mul(&c_dphi_src.complex_derivative(i, DerivativeKind::Z));
                    let updated = out
                        .component(j, j1 | j2)
                        .add_scaled(&term, Complex64::new(-swap_sign * mu, 0.0));
                    out.set_component(j, j1 | j2, updated);
                }
            }
        }
    }
    Ok(out)
}

/// ‖∂̄φ − ½\[φ,φ\]‖ for a valence-1 field — zero iff φ is (discretely)
/// integrable. Identically zero at n = 1 where the valence-2 space is empty.
pub fn integrability_residual(phi: &BeltramiField) -> Result<f64> {
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "integrability is defined for valence-1 fields".into(),
        ));
    }
    let db = dbar_beltrami(phi);
    let br = lie_bracket(phi, phi)?;
    Ok(db.sub(&br.scale(Complex64::new(0.5, 0.0))).l2_norm())
}

/// The two single-bidegree pieces (L^{1,0}_φσ, L^{0,1}_φσ) of the Lie
/// derivative L_φ = (−1)^k d∘i_φ + i_φ∘d. When a piece is structurally zero
/// (p = 0) the zero form is returned in a clamped bidegree.
pub fn lie_derivative_parts(
    phi: &BeltramiField,
    sigma: &FormField,
) -> Result<(FormField, FormField)> {
    same_grid(phi.grid(), sigma.grid(), "lie_derivative")?;
    let k = phi.valence();
    let (p, q) = sigma.bidegree();
    let sign = Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    let d_sigma = dolbeault(sigma, DolbeaultKind::Holomorphic);
    let db_sigma = dolbeault(sigma, DolbeaultKind::AntiHolomorphic);
    let grid = sigma.grid();
    if p == 0 {
        // i_φσ = 0 and i_φ∂̄σ = 0; only i_φ∂σ survives.
        let l10 = contract_unchecked(phi, &d_sigma);
        let l01 = FormField::zeros(grid, 0, q + k + 1);
        return Ok((l10, l01));
    }
    let i_sigma = contract_unchecked(phi, sigma);
    let l10 = dolbeault(&i_sigma, DolbeaultKind::Holomorphic)
        .scale(sign)
        .add(&contract_unchecked(phi, &d_sigma));
    let l01 = dolbeault(&i_sigma, DolbeaultKind::AntiHolomorphic)
        .scale(sign)
        .add(&contract_unchecked(phi, &db_sigma));
    Ok((l10, l01))
}

/// Full Lie derivative as a graded form.
pub fn lie_derivative(phi: &BeltramiField, sigma: &FormField) -> Result<GradedForm> {
    let (l10, l01) = lie_derivative_parts(phi, sigma)?;
    let mut out = GradedForm::zero(sigma.grid());
    out.add_form(l10);
    out.add_form(l01);
    Ok(out)
}

fn lie_derivative_graded(phi: &BeltramiField, graded: &GradedForm) -> Result<GradedForm> {
    let mut out = GradedForm::zero(graded.grid());
    for block in graded.blocks() {
        let (l10, l01) = lie_derivative_parts(phi, block)?;
        out.add_form(l10);
        out.add_form(l01);
    }
    Ok(out)
}

// ----- identity residuals ----------------------------------------------------------

/// ‖i_{\[φ,ψ\]}σ − (L_φ(i_ψσ) − i_ψ(L_φσ))‖ — the generalized Cartan formula,
/// stated for valence-1 φ, ψ.
pub fn cartan_residual(
    phi: &BeltramiField,
    psi: &BeltramiField,
    sigma: &FormField,
) -> Result<f64> {
    if phi.valence() != 1 || psi.valence() != 1 {
        return Err(Error::Incompatible(
            "the Cartan formula residual is implemented for valence-1 fields".into(),
        ));
    }
    same_grid(phi.grid(), sigma.grid(), "cartan_residual")?;
    let bracket = lie_bracket(phi, psi)?;
    let lhs = GradedForm::from_form(sigma.clone()).contract(&bracket);
    let i_psi_sigma = GradedForm::from_form(sigma.clone()).contract(psi);
    let term1 = lie_derivative_graded(phi, &i_psi_sigma)?;
    let term2 = lie_derivative(phi, sigma)?.contract(psi);
    let rhs = term1.sub(&term2);
    Ok(lhs.sub(&rhs).l2_norm())
}

/// ‖\[φ,φ\]⌟σ − (2φ⌟∂(φ⌟σ) − ∂(φ⌟φ⌟σ) − φ⌟φ⌟∂σ)‖ — the specialization of the
/// Cartan formula used to expand e^{−i_φ} d e^{i_φ}.
pub fn cartan_specialization_residual(phi: &BeltramiField, sigma: &FormField) -> Result<f64> {
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "the specialization residual needs a valence-1 field".into(),
        ));
    }
    same_grid(phi.grid(), sigma.grid(), "cartan_specialization")?;
    let g = GradedForm::from_form(sigma.clone());
    let bracket = lie_bracket(phi, phi)?;
    let lhs = g.contract(&bracket);
    let t1 = g
        .contract(phi)
        .d_holomorphic()
        .contract(phi)
        .scale(Complex64::new(2.0, 0.0));
    let t2 = g.contract(phi).contract(phi).d_holomorphic();
    let t3 = g.d_holomorphic().contract(phi).contract(phi);
    let rhs = t1.sub(&t2).sub(&t3);
    Ok(lhs.sub(&rhs).l2_norm())
}

/// ‖e^{−i_φ} d e^{i_φ}σ − (dσ − L_φσ − i_{½\[φ,φ\]}σ)‖ — the conjugation
/// identity for arbitrary (not necessarily integrable) valence-1 φ.
pub fn conjugation_residual(phi: &BeltramiField, sigma: &FormField) -> Result<f64> {
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "the conjugation residual needs a valence-1 field".into(),
        ));
    }
    same_grid(phi.grid(), sigma.grid(), "conjugation_residual")?;
    let minus_phi = phi.scale(Complex64::new(-1.0, 0.0));
    let lhs = GradedForm::from_form(sigma.clone())
        .exp_contract(phi)
        .d()
        .exp_contract(&minus_phi);
    let bracket = lie_bracket(phi, phi)?;
    let half_bracket = bracket.scale(Complex64::new(0.5, 0.0));
    let rhs = GradedForm::from_form(sigma.clone())
        .d()
        .sub(&lie_derivative(phi, sigma)?)
        .sub(&GradedForm::from_form(sigma.clone()).contract(&half_bracket));
    Ok(lhs.sub(&rhs).l2_norm())
}

/// ‖e^{−i_φ} d e^{i_φ}σ − (dσ + ∂(i_φσ) − i_φ(∂σ))‖ — the collapsed
/// conjugation identity, valid when φ is integrable.
pub fn conjugation_residual_integrable(phi: &BeltramiField, sigma: &FormField) -> Result<f64> {
    if phi.valence() != 1 {
        return Err(Error::Incompatible(
            "the integrable conjugation residual needs a valence-1 field".into(),
        ));
    }
    same_grid(phi.grid(), sigma.grid(), "conjugation_residual_integrable")?;
    let minus_phi = phi.scale(Complex64::new(-1.0, 0.0));
    let lhs = GradedForm::from_form(sigma.clone())
        .exp_contract(phi)
        .d()
        .exp_contract(&minus_phi);
    let g = GradedForm::from_form(sigma.clone());
    let rhs = g
        .d()
        .add(&g.contract(phi).d_holomorphic())
        .sub(&g.d_holomorphic().contract(phi));
    Ok(lhs.sub(&rhs).l2_norm())
}

/// ‖(∂̄∘i_φ − i_φ∘∂̄)σ − i_{∂̄φ}σ‖ — the commutator lemma behind the
/// integrable collapse.
pub fn dbar_commutator_residual(phi: &BeltramiField, sigma: &FormField) -> Result<f64> {
    same_grid(phi.grid(), sigma.grid(), "dbar_commutator")?;
    if sigma.bidegree().0 == 0 {
        return Err(Error::Incompatible(
            "the commutator lemma needs p ≥ 1 to be non-vacuous".into(),
        ));
    }
    let lhs = dolbeault(&contract_unchecked(phi, sigma), DolbeaultKind::AntiHolomorphic)
        .sub(&contract_unchecked(
            phi,
            &dolbeault(sigma, DolbeaultKind::AntiHolomorphic),
        ));
    let rhs = contract_unchecked(&dbar_beltrami(phi), sigma);
    Ok(lhs.sub(&rhs).l2_norm())
}
