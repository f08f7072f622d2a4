//! Differential (p,q)-forms on the torus.
//!
//! A [`FormField`] stores one [`ScalarField`] coefficient per strictly
//! increasing pair of multi-indices (I, J):
//!
//! ```text
//! σ = Σ_{|I|=p, |J|=q} σ_{I,J} · dz^I ∧ dz̄^J,
//! ```
//!
//! with components ordered by ascending I-mask, then ascending J-mask. The
//! flat metric ⟨dz^a, dz^b⟩ = 2δ_ab makes the basis forms orthogonal with
//! |dz^I ∧ dz̄^J|² = 2^{p+q}, so
//!
//! ```text
//! |σ(x)|²  = 2^{p+q} Σ_{I,J} |σ_{I,J}(x)|²,
//! ‖σ‖²_{L²} = ∫ |σ|² = (2π)²ⁿ · mean |σ|².
//! ```
//!
//! Degrees with p > n or q > n simply have zero components (C(n,p) = 0), so
//! expressions that overflow the top degree vanish structurally instead of
//! erroring — convenient for exponential contraction chains.
//!
//! A field optionally carries a weight tag marking it as valued in the
//! (m−1)-st power of the canonical bundle (a *pluricanonical twist*); the
//! torus has a global holomorphic frame (dz¹∧…∧dzⁿ)^{⊗(m−1)}, so weighted
//! components are plain scalar fields and the tag only gates which operators
//! accept the form.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{same_grid, TorusGrid};
use crate::multi_index::{binomial, masks, merge_sign, rank};
use crate::scalar::{Kahan, ScalarField};

/// Bundle twist carried by a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// An ordinary differential form.
    Plain,
    /// Valued in K_X^{⊗power} (power = m−1 for m-canonical sections).
    CanonicalPower(usize),
}

/// A (p,q)-form field with scalar coefficients per increasing (I, J).
#[derive(Clone)]
pub struct FormField {
    grid: Arc<TorusGrid>,
    p: usize,
    q: usize,
    weight: Weight,
    comps: Vec<ScalarField>,
}

impl FormField {
    /// The zero (p,q)-form.
    pub fn zeros(grid: &Arc<TorusGrid>, p: usize, q: usize) -> Self {
        let n = grid.complex_dim();
        let count = binomial(n, p) * binomial(n, q);
        FormField {
            grid: grid.clone(),
            p,
            q,
            weight: Weight::Plain,
            comps: (0..count).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    /// Builds a form from components in canonical order
    /// (ascending I-mask major, ascending J-mask minor).
    pub fn from_components(
        grid: &Arc<TorusGrid>,
        p: usize,
        q: usize,
        comps: Vec<ScalarField>,
    ) -> Result<Self> {
        let n = grid.complex_dim();
        let expected = binomial(n, p) * binomial(n, q);
        if comps.len() != expected {
            return Err(Error::Incompatible(format!(
                "(p,q) = ({p},{q}) on n = {n} needs {expected} components, got {}",
                comps.len()
            )));
        }
        for c in &comps {
            same_grid(grid, c.grid(), "form component")?;
        }
        Ok(FormField {
            grid: grid.clone(),
            p,
            q,
            weight: Weight::Plain,
            comps,
        })
    }

    /// The holomorphic volume form dZ = dz¹ ∧ … ∧ dzⁿ (an (n,0)-form with
    /// constant coefficient 1).
    pub fn holomorphic_volume(grid: &Arc<TorusGrid>) -> Self {
        let n = grid.complex_dim();
        let mut f = FormField::zeros(grid, n, 0);
        f.comps[0] = ScalarField::constant(grid, Complex64::new(1.0, 0.0));
        f
    }

    /// Returns the same field tagged with a bundle weight.
    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    // ----- accessors ---------------------------------------------------------

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// (p, q).
    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    /// Number of stored components, C(n,p)·C(n,q).
    pub fn component_count(&self) -> usize {
        self.comps.len()
    }

    fn component_index(&self, i_mask: u32, j_mask: u32) -> usize {
        let n = self.grid.complex_dim();
        rank(n, i_mask) * binomial(n, self.q) + rank(n, j_mask)
    }

    /// Coefficient of dz^I ∧ dz̄^J.
    pub fn component(&self, i_mask: u32, j_mask: u32) -> &ScalarField {
        &self.comps[self.component_index(i_mask, j_mask)]
    }

    /// Overwrites the coefficient of dz^I ∧ dz̄^J.
    pub fn set_component(&mut self, i_mask: u32, j_mask: u32, field: ScalarField) {
        let idx = self.component_index(i_mask, j_mask);
        self.comps[idx] = field;
    }

    /// Iterates (I-mask, J-mask, coefficient) in canonical order.
    pub fn components(&self) -> impl Iterator<Item = (u32, u32, &ScalarField)> {
        let n = self.grid.complex_dim();
        let i_masks = masks(n, self.p);
        let j_masks = masks(n, self.q);
        let mut pairs = Vec::with_capacity(self.comps.len());
        for &im in &i_masks {
            for &jm in &j_masks {
                pairs.push((im, jm));
            }
        }
        pairs.into_iter().zip(&self.comps).map(|((im, jm), c)| (im, jm, c))
    }

    // ----- linear algebra ----------------------------------------------------

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        same_grid(&self.grid, &other.grid, what)?;
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Incompatible(format!(
                "{what}: bidegrees differ ({:?} vs {:?})",
                (self.p, self.q),
                (other.p, other.q)
            )));
        }
        if self.weight != other.weight {
            return Err(Error::WeightMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.weight, other.weight
            )));
        }
        Ok(())
    }

    /// self + other.
    pub fn add(&self, other: &Self) -> Self {
        self.check_same_shape(other, "form add").expect("form add");
        self.zip(other, |a, b| a.add(b))
    }

    /// self − other.
    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_shape(other, "form sub").expect("form sub");
        self.zip(other, |a, b| a.sub(b))
    }

    /// self + c·other.
    pub fn add_scaled(&self, other: &Self, c: Complex64) -> Self {
        self.check_same_shape(other, "form add_scaled")
            .expect("form add_scaled");
        self.zip(other, |a, b| a.add_scaled(b, c))
    }

    /// c·self.
    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|f| f.scale(c))
    }

    /// Componentwise map preserving the shape.
    pub(crate) fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        FormField {
            grid: self.grid.clone(),
            p: self.p,
            q: self.q,
            weight: self.weight,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        FormField {
            grid: self.grid.clone(),
            p: self.p,
            q: self.q,
            weight: self.weight,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    // ----- products ------------------------------------------------------------

    /// Wedge product. The bidegrees add; overflowing degrees yield the zero
    /// form with empty component storage. At most one operand may carry a
    /// bundle weight; the product inherits it.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid, "wedge")?;
        let weight = match (self.weight, other.weight) {
            (Weight::Plain, w) | (w, Weight::Plain) => w,
            (a, b) => {
                return Err(Error::WeightMismatch(format!(
                    "cannot wedge two weighted forms ({a:?} ∧ {b:?})"
                )))
            }
        };
        let mut out = FormField::zeros(&self.grid, self.p + other.p, self.q + other.q);
        out.weight = weight;
        if out.comps.is_empty() {
            return Ok(out);
        }
        // Sign of moving dz^{I₂} (p₂ factors) past dz̄^{J₁} (q₁ factors).
        let cross = if (self.q * other.p) % 2 == 0 { 1.0 } else { -1.0 };
        for (i1, j1, c1) in self.components() {
            for (i2, j2, c2) in other.components() {
                let (Some(si), Some(sj)) = (merge_sign(i1, i2), merge_sign(j1, j2)) else {
                    continue;
                };
                let sign = cross * si * sj;
                let idx = out.component_index(i1 | i2, j1 | j2);
                let term = c1.mul(c2);
                out.comps[idx] = out.comps[idx].add_scaled(&term, Complex64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    // ----- norms -----------------------------------------------------------------

    /// Metric weight 2^{p+q} of each component.
    fn component_weight(&self) -> f64 {
        2f64.powi((self.p + self.q) as i32)
    }

    /// L² inner product ⟨σ, τ⟩ (linear in `self`).
    pub fn l2_inner(&self, other: &Self) -> Complex64 {
        self.check_same_shape(other, "form inner").expect("form inner");
        let w = self.component_weight();
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (a, b) in self.comps.iter().zip(&other.comps) {
            let v = a.l2_inner(b);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value() * w, im.value() * w)
    }

    /// L² norm with the 2^{p+q} component weight.
    pub fn l2_norm(&self) -> f64 {
        let w = self.component_weight();
        let mut acc = Kahan::default();
        for c in &self.comps {
            let nrm = c.l2_norm();
            acc.add(nrm * nrm);
        }
        (acc.value() * w).sqrt()
    }

    /// Pointwise-metric sup norm: max over x of 2^{(p+q)/2}·(Σ|σ_{I,J}(x)|²)^{1/2}.
    pub fn sup_norm(&self) -> f64 {
        if self.comps.is_empty() {
            return 0.0;
        }
        let physical: Vec<ScalarField> = self.comps.iter().map(|c| c.to_physical()).collect();
        let slices: Vec<&[Complex64]> = physical
            .iter()
            .map(|c| c.data().as_slice().expect("standard layout"))
            .collect();
        let len = slices[0].len();
        let mut max = 0.0f64;
        for idx in 0..len {
            let mut s = 0.0;
            for sl in &slices {
                s += sl[idx].norm_sqr();
            }
            max = max.max(s);
        }
        (max * self.component_weight()).sqrt()
    }

    /// (L² norm, sup norm).
    pub fn norms(&self) -> (f64, f64) {
        (self.l2_norm(), self.sup_norm())
    }
}

impl std::fmt::Debug for FormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormField")
            .field("grid", &self.grid)
            .field("bidegree", &(self.p, self.q))
            .field("weight", &self.weight)
            .finish()
    }
}
