//! Mixed-degree forms: finite sums Σ σ^{(p,q)} of fields of distinct
//! bidegrees, stored as a sparse block map. These arise from exponentials of
//! contraction operators and from the full exterior derivative d = ∂ + ∂̄,
//! both of which move material between bidegrees.
//!
//! Structurally-zero blocks (degrees outside 0 ≤ p, q ≤ n) are dropped on
//! insertion, so the series e^{i_φ} terminates on its own.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::beltrami::{contract_unchecked, BeltramiField};
use crate::form::FormField;
use crate::grid::TorusGrid;
use crate::hodge::{dolbeault, DolbeaultKind};
use crate::scalar::Kahan;

/// A form of mixed bidegree, keyed by (p, q).
#[derive(Clone)]
pub struct GradedForm {
    grid: Arc<TorusGrid>,
    blocks: BTreeMap<(usize, usize), FormField>,
}

impl GradedForm {
    /// The zero graded form (no blocks).
    pub fn zero(grid: &Arc<TorusGrid>) -> Self {
        GradedForm {
            grid: grid.clone(),
            blocks: BTreeMap::new(),
        }
    }

    /// A graded form with the single block `form`.
    pub fn from_form(form: FormField) -> Self {
        let mut g = GradedForm::zero(form.grid());
        g.add_form(form);
        g
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// The block of bidegree (p, q), if present.
    pub fn block(&self, p: usize, q: usize) -> Option<&FormField> {
        self.blocks.get(&(p, q))
    }

    /// Iterates blocks in bidegree order.
    pub fn blocks(&self) -> impl Iterator<Item = &FormField> {
        self.blocks.values()
    }

    /// Number of stored blocks.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Adds a single-bidegree form into the matching block. Structurally
    /// empty forms (no components) are ignored.
    pub fn add_form(&mut self, form: FormField) {
        if form.component_count() == 0 {
            return;
        }
        let key = form.bidegree();
        match self.blocks.remove(&key) {
            Some(existing) => {
                self.blocks.insert(key, existing.add(&form));
            }
            None => {
                self.blocks.insert(key, form);
            }
        }
    }

    /// Blockwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for b in other.blocks() {
            out.add_form(b.clone());
        }
        out
    }

    /// Blockwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Blockwise scaling.
    pub fn scale(&self, c: Complex64) -> Self {
        GradedForm {
            grid: self.grid.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|(k, v)| (*k, v.scale(c)))
                .collect(),
        }
    }

    /// Full exterior derivative d = ∂ + ∂̄, applied blockwise.
    pub fn d(&self) -> Self {
        let mut out = GradedForm::zero(&self.grid);
        for b in self.blocks() {
            out.add_form(dolbeault(b, DolbeaultKind::Holomorphic));
            out.add_form(dolbeault(b, DolbeaultKind::AntiHolomorphic));
        }
        out
    }

    /// Holomorphic part ∂ alone, applied blockwise.
    pub fn d_holomorphic(&self) -> Self {
        let mut out = GradedForm::zero(&self.grid);
        for b in self.blocks() {
            out.add_form(dolbeault(b, DolbeaultKind::Holomorphic));
        }
        out
    }

    /// Contraction i_φ applied blockwise; blocks with p = 0 are annihilated.
    pub fn contract(&self, phi: &BeltramiField) -> Self {
        let mut out = GradedForm::zero(&self.grid);
        for b in self.blocks() {
            if b.bidegree().0 == 0 {
                continue;
            }
            out.add_form(contract_unchecked(phi, b));
        }
        out
    }

    /// e^{i_φ} = Σ_j i_φ^j / j!, truncating automatically once a power of the
    /// contraction empties every block.
    pub fn exp_contract(&self, phi: &BeltramiField) -> Self {
        let mut out = self.clone();
        let mut term = self.clone();
        let mut j = 1usize;
        loop {
            term = term.contract(phi).scale(Complex64::new(1.0 / j as f64, 0.0));
            if term.blocks.is_empty() {
                return out;
            }
            out = out.add(&term);
            j += 1;
        }
    }

    /// √(Σ ‖block‖²).
    pub fn l2_norm(&self) -> f64 {
        let mut acc = Kahan::default();
        for b in self.blocks() {
            let n = b.l2_norm();
            acc.add(n * n);
        }
        acc.value().sqrt()
    }
}

impl std::fmt::Debug for GradedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let keys: Vec<_> = self.blocks.keys().collect();
        f.debug_struct("GradedForm")
            .field("grid", &self.grid)
            .field("bidegrees", &keys)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exp_on_volume_form_matches_product_formula_for_constant_diagonal() {
        // For diagonal constant φ = Σ_a c_a dz̄^a⊗∂_a acting on dz¹∧dz²,
        // e^{i_φ}(dz¹∧dz²) = (dz¹ − c₁dz̄¹)∧(dz² − c₂dz̄²) up to the ordering
        // signs absorbed in the wedge; compare block norms against the
        // explicit wedge product.
        let grid = TorusGrid::new(2, 8).unwrap();
        let c1 = Complex64::new(0.3, -0.1);
        let c2 = Complex64::new(-0.2, 0.4);
        let mut phi = BeltramiField::zeros(&grid, 1);
        phi.set_component(0, 0b01, ScalarField::constant(&grid, c1));
        phi.set_component(1, 0b10, ScalarField::constant(&grid, c2));
        let omega = FormField::holomorphic_volume(&grid);
        let e = GradedForm::from_form(omega).exp_contract(&phi);

        // e^{i_φ}dz^a = dz^a + c_a dz̄^a for diagonal φ, so the product is
        // (dz¹ + c₁dz̄¹)∧(dz² + c₂dz̄²): (2,0) block = dz¹∧dz²;
        // (1,1) = c₂ dz¹∧dz̄² + c₁ dz̄¹∧dz² = c₂ dz¹∧dz̄² − c₁ dz²∧dz̄¹;
        // (0,2) = c₁c₂ dz̄¹∧dz̄².
        let b20 = e.block(2, 0).unwrap();
        assert_abs_diff_eq!(b20.component(0b11, 0).mean().re, 1.0, epsilon = 1e-13);

        let b11 = e.block(1, 1).unwrap();
        let coeff_i2 = b11.component(0b01, 0b10).mean();
        let coeff_i1 = b11.component(0b10, 0b01).mean();
        assert_abs_diff_eq!((coeff_i2 - c2).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!((coeff_i1 - (-c1)).norm(), 0.0, epsilon = 1e-13);

        // (0,2): i_φ²/2 applied twice; product formula says c₁c₂ dz̄¹∧dz̄².
        let b02 = e.block(0, 2).unwrap();
        let coeff = b02.component(0, 0b11).mean();
        assert_abs_diff_eq!((coeff - c1 * c2).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn d_splits_into_dolbeault_pieces() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let f = ScalarField::from_modes(&grid, &[(vec![1, 2], Complex64::new(0.5, 0.3))]).unwrap();
        let sigma = FormField::from_components(&grid, 0, 0, vec![f]).unwrap();
        let g = GradedForm::from_form(sigma.clone()).d();
        assert_eq!(g.block_count(), 2);
        let holo = dolbeault(&sigma, DolbeaultKind::Holomorphic);
        assert_abs_diff_eq!(
            g.block(1, 0).unwrap().sub(&holo).l2_norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn structurally_zero_blocks_are_dropped() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let omega = FormField::holomorphic_volume(&grid); // (1,0) on n = 1
        let g = GradedForm::from_form(dolbeault(&omega, DolbeaultKind::Holomorphic));
        assert_eq!(g.block_count(), 0);
        assert_eq!(g.l2_norm(), 0.0);
    }
}
