//! Complex scalar fields with dual physical/spectral representation.
//!
//! A [`ScalarField`] stores one complex value per grid point, either as
//! samples f(x_j) (*physical*) or as Fourier coefficients f̂_k of
//! f(x) = Σ_k f̂_k e^{i k·x} (*spectral*), with a representation tag. All
//! algebraic operations accept either representation and return their
//! result in the representation of the left operand (products are always
//! computed pointwise in physical space; derivatives are always computed as
//! multipliers in spectral space).
//!
//! Complex derivatives follow the Wirtinger convention
//!
//! ```text
//! ∂/∂z_a  = ½(∂/∂x_a − i ∂/∂y_a)   ↦  multiplier ½(i·k_{x_a} + k_{y_a}),
//! ∂/∂z̄_a = ½(∂/∂x_a + i ∂/∂y_a)   ↦  multiplier ½(i·k_{x_a} − k_{y_a}),
//! ```
//!
//! evaluated on *effective* frequencies (Nyquist slot ↦ 0, see [`crate::grid`]),
//! so e.g. ∂/∂z e^{i x₁} = (i/2) e^{i x₁} exactly on the grid.
//!
//! Inner products use the normalized quadrature ⟨f, g⟩ = (2π)²ⁿ · mean(f · ḡ),
//! i.e. exactly ∫ f ḡ for band-limited integrands; the spectral-side formula
//! (2π)²ⁿ Σ_k f̂_k ĝ̄_k agrees to roundoff (Parseval). Reductions use
//! compensated (Kahan) summation and are sequential, so norms are
//! byte-reproducible regardless of the execution policy.

use std::sync::Arc;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{same_grid, TorusGrid};

/// Which representation a field's array currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Samples f(x_j) at the grid points.
    Physical,
    /// Fourier coefficients f̂_k, FFT slot order.
    Spectral,
}

/// Direction for [`ScalarField::transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformDirection {
    /// Physical → spectral (divides by N²ⁿ).
    Forward,
    /// Spectral → physical.
    Inverse,
}

/// The two first-order Wirtinger derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    /// ∂/∂z_a (holomorphic direction).
    Z,
    /// ∂/∂z̄_a (antiholomorphic direction).
    ZBar,
}

/// A complex scalar field on a [`TorusGrid`].
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<TorusGrid>,
    repr: Representation,
    data: ArrayD<Complex64>,
}

/// Compensated (Kahan–Neumaier) accumulator used by every reduction.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl ScalarField {
    // ----- constructors ---------------------------------------------------

    /// The zero field (physical representation).
    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            repr: Representation::Physical,
            data: ArrayD::zeros(IxDyn(&grid.shape())),
        }
    }

    /// A constant field (physical representation).
    pub fn constant(grid: &Arc<TorusGrid>, value: Complex64) -> Self {
        ScalarField {
            grid: grid.clone(),
            repr: Representation::Physical,
            data: ArrayD::from_elem(IxDyn(&grid.shape()), value),
        }
    }

    /// Wraps an array of samples. The shape must match the grid.
    pub fn from_samples(grid: &Arc<TorusGrid>, data: ArrayD<Complex64>) -> Result<Self> {
        if data.shape() != grid.shape().as_slice() {
            return Err(Error::Incompatible(format!(
                "sample array shape {:?} does not match grid shape {:?}",
                data.shape(),
                grid.shape()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            repr: Representation::Physical,
            data,
        })
    }

    /// Wraps an array of Fourier coefficients (spectral representation,
    /// centered layout). The shape must match the grid.
    pub fn from_samples_spectral(grid: &Arc<TorusGrid>, data: ArrayD<Complex64>) -> Result<Self> {
        let mut f = ScalarField::from_samples(grid, data)?;
        f.repr = Representation::Spectral;
        Ok(f)
    }

    /// Samples a function of the grid coordinates (physical representation).
    pub fn from_fn<F>(grid: &Arc<TorusGrid>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let mut data = ArrayD::zeros(IxDyn(&grid.shape()));
        let g = grid.as_ref();
        let axes = g.axes();
        exec::map_indexed(data.as_slice_mut().expect("standard layout"), |flat, v| {
            let mut idx = [0usize; 4];
            let mut x = [0.0f64; 4];
            g.decode_flat(flat, &mut idx[..axes]);
            g.point(&idx[..axes], &mut x[..axes]);
            *v = f(&x[..axes]);
        });
        ScalarField {
            grid: grid.clone(),
            repr: Representation::Physical,
            data,
        }
    }

    /// Builds the exact trigonometric polynomial Σ c e^{i k·x} from a list of
    /// `(k, c)` modes, returned in physical representation.
    ///
    /// Every |k_axis| must stay strictly below the Nyquist frequency N/2; a
    /// mode outside that band is rejected with [`Error::BandExceeded`].
    /// Repeated frequencies accumulate.
    pub fn from_modes(grid: &Arc<TorusGrid>, modes: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let axes = grid.axes();
        let size = grid.size() as i64;
        let mut spectral = ArrayD::<Complex64>::zeros(IxDyn(&grid.shape()));
        for (k, c) in modes {
            if k.len() != axes {
                return Err(Error::Incompatible(format!(
                    "mode index {:?} has {} entries, grid has {} axes",
                    k,
                    k.len(),
                    axes
                )));
            }
            let mut slot = Vec::with_capacity(axes);
            for &ka in k {
                if ka.abs() > grid.max_band() {
                    return Err(Error::BandExceeded(format!(
                        "mode {:?} exceeds the representable band |k| ≤ {}",
                        k,
                        grid.max_band()
                    )));
                }
                slot.push(if ka >= 0 { ka } else { ka + size } as usize);
            }
            spectral[IxDyn(&slot)] += *c;
        }
        let mut field = ScalarField {
            grid: grid.clone(),
            repr: Representation::Spectral,
            data: spectral,
        };
        field = field.transform(TransformDirection::Inverse);
        Ok(field)
    }

    // ----- accessors ------------------------------------------------------

    /// The grid this field lives on.
    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    /// Current representation tag.
    pub fn representation(&self) -> Representation {
        self.repr
    }

    /// Raw array (interpretation depends on [`Self::representation`]).
    pub fn data(&self) -> &ArrayD<Complex64> {
        &self.data
    }

    /// Value stored at a multi-index (physical: sample; spectral: coefficient
    /// at that FFT slot).
    pub fn value_at(&self, index: &[usize]) -> Complex64 {
        self.data[IxDyn(index)]
    }

    /// Sample at the grid origin x = 0 (converts if spectral).
    pub fn sample_at_origin(&self) -> Complex64 {
        match self.repr {
            Representation::Physical => self.data[IxDyn(&vec![0; self.grid.axes()])],
            Representation::Spectral => self.to_physical().sample_at_origin(),
        }
    }

    // ----- representation changes ------------------------------------------

    /// Applies the DFT in the given direction and flips the representation
    /// tag. If the field already holds the target representation the call is
    /// a no-op (the operation is total: there is no error path).
    pub fn transform(&self, direction: TransformDirection) -> Self {
        let target = match direction {
            TransformDirection::Forward => Representation::Spectral,
            TransformDirection::Inverse => Representation::Physical,
        };
        if self.repr == target {
            return self.clone();
        }
        let mut data = self.data.clone();
        self.grid
            .transform_in_place(&mut data, direction == TransformDirection::Inverse);
        ScalarField {
            grid: self.grid.clone(),
            repr: target,
            data,
        }
    }

    /// The field in physical representation (clone if already physical).
    pub fn to_physical(&self) -> Self {
        self.transform(TransformDirection::Inverse)
    }

    /// The field in spectral representation (clone if already spectral).
    pub fn to_spectral(&self) -> Self {
        self.transform(TransformDirection::Forward)
    }

    // ----- derivatives and multipliers --------------------------------------

    /// Spectral derivative ∂/∂z_a or ∂/∂z̄_a along complex axis `axis`
    /// (0-based). Output representation matches the input.
    pub fn complex_derivative(&self, axis: usize, kind: DerivativeKind) -> Self {
        assert!(
            axis < self.grid.complex_dim(),
            "complex axis {axis} out of range (n = {})",
            self.grid.complex_dim()
        );
        let xa = 2 * axis;
        let ya = 2 * axis + 1;
        self.effective_multiplier(move |k| {
            let (kx, ky) = (k[xa] as f64, k[ya] as f64);
            match kind {
                DerivativeKind::Z => Complex64::new(0.5 * ky, 0.5 * kx),
                DerivativeKind::ZBar => Complex64::new(-0.5 * ky, 0.5 * kx),
            }
        })
    }

    /// Multiplies the spectrum by `m(k)` with `k` the *centered* frequency
    /// vector (Nyquist slot ↦ −N/2). Output representation matches the input.
    ///
    /// Derivative operators do **not** route through this method: they use
    /// effective frequencies (Nyquist ↦ 0) as documented in [`crate::grid`].
    pub fn multiplier_apply<F>(&self, m: F) -> Self
    where
        F: Fn(&[i64]) -> Complex64 + Sync,
    {
        self.multiplier_impl(m, false)
    }

    /// Like [`Self::multiplier_apply`] but with effective frequencies.
    pub(crate) fn effective_multiplier<F>(&self, m: F) -> Self
    where
        F: Fn(&[i64]) -> Complex64 + Sync,
    {
        self.multiplier_impl(m, true)
    }

    /// Multiplies the spectrum slot-by-slot by a precomputed real table in
    /// flat row-major order. Output representation matches the input.
    pub(crate) fn spectral_table_multiplier(&self, table: &[f64]) -> Self {
        let mut work = self.to_spectral();
        exec::zip2(
            work.data.as_slice_mut().expect("standard layout"),
            table,
            |v, t| *v *= *t,
        );
        match self.repr {
            Representation::Spectral => work,
            Representation::Physical => work.transform(TransformDirection::Inverse),
        }
    }

    fn multiplier_impl<F>(&self, m: F, effective: bool) -> Self
    where
        F: Fn(&[i64]) -> Complex64 + Sync,
    {
        let mut work = self.to_spectral();
        let g = self.grid.as_ref();
        let axes = g.axes();
        exec::map_indexed(
            work.data.as_slice_mut().expect("standard layout"),
            |flat, v| {
                let mut idx = [0usize; 4];
                let mut k = [0i64; 4];
                g.decode_flat(flat, &mut idx[..axes]);
                for (a, &slot) in idx[..axes].iter().enumerate() {
                    k[a] = if effective {
                        g.effective_frequency(slot)
                    } else {
                        g.centered_frequency(slot)
                    };
                }
                *v *= m(&k[..axes]);
            },
        );
        match self.repr {
            Representation::Spectral => work,
            Representation::Physical => work.transform(TransformDirection::Inverse),
        }
    }

    // ----- pointwise algebra -------------------------------------------------

    fn binary(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Self {
        same_grid(&self.grid, &other.grid, "scalar binary op").expect("grid mismatch");
        let a = self.to_physical();
        let b = other.to_physical();
        let mut data = a.data;
        exec::zip2(
            data.as_slice_mut().expect("standard layout"),
            b.data.as_slice().expect("standard layout"),
            |x, y| *x = f(*x, *y),
        );
        ScalarField {
            grid: self.grid.clone(),
            repr: Representation::Physical,
            data,
        }
    }

    /// Pointwise sum (physical result).
    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a + b)
    }

    /// Pointwise difference (physical result).
    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a - b)
    }

    /// Pointwise product (physical result).
    pub fn mul(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a * b)
    }

    /// Pointwise map over samples (physical result).
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Self {
        let mut work = self.to_physical();
        exec::map_inplace(work.data.as_slice_mut().expect("standard layout"), |v| {
            *v = f(*v)
        });
        work
    }

    /// Scales by a complex constant (representation preserved: scaling
    /// commutes with the DFT).
    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        exec::map_inplace(out.data.as_slice_mut().expect("standard layout"), |v| {
            *v *= c
        });
        out
    }

    /// Complex conjugate of the samples (physical result).
    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// self + c·other (physical result).
    pub fn add_scaled(&self, other: &Self, c: Complex64) -> Self {
        self.binary(other, move |a, b| a + c * b)
    }

    // ----- reductions ---------------------------------------------------------

    /// L² inner product ⟨f, g⟩ = (2π)²ⁿ · mean(f ḡ), linear in `self`.
    /// Computed in whichever representation `self` holds (Parseval guarantees
    /// agreement to roundoff); `other` is converted as needed.
    pub fn l2_inner(&self, other: &Self) -> Complex64 {
        same_grid(&self.grid, &other.grid, "inner product").expect("grid mismatch");
        let rhs;
        let other_ref = if other.repr == self.repr {
            other
        } else {
            rhs = other.transform(match self.repr {
                Representation::Physical => TransformDirection::Inverse,
                Representation::Spectral => TransformDirection::Forward,
            });
            &rhs
        };
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (a, b) in self.data.iter().zip(other_ref.data.iter()) {
            let v = a * b.conj();
            re.add(v.re);
            im.add(v.im);
        }
        let scale = match self.repr {
            Representation::Physical => self.grid.volume() / self.grid.point_count() as f64,
            Representation::Spectral => self.grid.volume(),
        };
        Complex64::new(re.value() * scale, im.value() * scale)
    }

    /// L² norm (2π-normalized quadrature).
    pub fn l2_norm(&self) -> f64 {
        let mut acc = Kahan::default();
        for v in self.data.iter() {
            acc.add(v.norm_sqr());
        }
        let scale = match self.repr {
            Representation::Physical => self.grid.volume() / self.grid.point_count() as f64,
            Representation::Spectral => self.grid.volume(),
        };
        (acc.value() * scale).sqrt()
    }

    /// Largest sample magnitude (converts to physical first if needed).
    pub fn sup_norm(&self) -> f64 {
        match self.repr {
            Representation::Physical => self
                .data
                .iter()
                .fold(0.0f64, |m, v| m.max(v.norm())),
            Representation::Spectral => self.to_physical().sup_norm(),
        }
    }

    /// Mean value over the torus (the k = 0 Fourier coefficient).
    pub fn mean(&self) -> Complex64 {
        match self.repr {
            Representation::Spectral => self.data[IxDyn(&vec![0; self.grid.axes()])],
            Representation::Physical => {
                let mut re = Kahan::default();
                let mut im = Kahan::default();
                for v in self.data.iter() {
                    re.add(v.re);
                    im.add(v.im);
                }
                let inv = 1.0 / self.grid.point_count() as f64;
                Complex64::new(re.value() * inv, im.value() * inv)
            }
        }
    }

    /// Largest |Im f| over the grid — a reality check for metric potentials.
    pub fn max_imag(&self) -> f64 {
        self.to_physical()
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.im.abs()))
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("repr", &self.repr)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_field(grid: &Arc<TorusGrid>) -> ScalarField {
        // A fixed band-limited field with several modes and no symmetries.
        let axes = grid.axes();
        let pad = |k: Vec<i64>| {
            let mut v = k;
            v.resize(axes, 0);
            v
        };
        ScalarField::from_modes(
            grid,
            &[
                (pad(vec![0, 0]), c(0.7, -0.2)),
                (pad(vec![1, 0]), c(0.5, 0.1)),
                (pad(vec![-2, 1]), c(-0.3, 0.4)),
                (pad(vec![3, -2]), c(0.05, -0.15)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact_to_roundoff() {
        for (n, size) in [(1usize, 64usize), (2, 16)] {
            let grid = TorusGrid::new(n, size).unwrap();
            let f = test_field(&grid);
            let back = f
                .transform(TransformDirection::Forward)
                .transform(TransformDirection::Inverse);
            let err = f.sub(&back).sup_norm();
            assert!(err <= 1e-13, "round-trip error {err} at n={n}, N={size}");
        }
    }

    #[test]
    fn transform_is_a_noop_on_matching_representation() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let f = test_field(&grid);
        let same = f.transform(TransformDirection::Inverse);
        assert_eq!(same.representation(), Representation::Physical);
        assert_eq!(f.sub(&same).sup_norm(), 0.0);
    }

    #[test]
    fn zero_slot_is_the_mean() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let f = test_field(&grid);
        let spectral = f.to_spectral();
        let zero = spectral.value_at(&[0, 0]);
        let mean = f.mean();
        assert_abs_diff_eq!(zero.re, mean.re, epsilon = 1e-14);
        assert_abs_diff_eq!(zero.im, mean.im, epsilon = 1e-14);
        assert_abs_diff_eq!(mean.re, 0.7, epsilon = 1e-13);
        assert_abs_diff_eq!(mean.im, -0.2, epsilon = 1e-13);
    }

    #[test]
    fn wirtinger_derivatives_on_single_modes() {
        let grid = TorusGrid::new(1, 16).unwrap();
        // f = e^{i x}: ∂f/∂z = (i/2) f and ∂f/∂z̄ = (i/2) f.
        let f = ScalarField::from_modes(&grid, &[(vec![1, 0], c(1.0, 0.0))]).unwrap();
        let dz = f.complex_derivative(0, DerivativeKind::Z);
        let dzb = f.complex_derivative(0, DerivativeKind::ZBar);
        let expect = f.scale(c(0.0, 0.5));
        assert!(dz.sub(&expect).sup_norm() < 1e-14);
        assert!(dzb.sub(&expect).sup_norm() < 1e-14);

        // g = e^{i(x+y)} (mode kx=1, ky=1): ∂g/∂z = ½(i+1) g, ∂g/∂z̄ = ½(i−1) g.
        let g = ScalarField::from_modes(&grid, &[(vec![1, 1], c(1.0, 0.0))]).unwrap();
        let gz = g.complex_derivative(0, DerivativeKind::Z);
        let gzb = g.complex_derivative(0, DerivativeKind::ZBar);
        assert!(gz.sub(&g.scale(c(0.5, 0.5))).sup_norm() < 1e-14);
        assert!(gzb.sub(&g.scale(c(-0.5, 0.5))).sup_norm() < 1e-14);
    }

    #[test]
    fn holomorphic_mode_is_dzbar_closed() {
        // e^{iz} is not periodic, but the mode (kx, ky) = (1, -1) is the
        // grid-periodic stand-in for a z̄-independent wave: ∂/∂z̄ multiplier
        // ½(i·1 − (−1)) = ½(1+i) ≠ 0 — instead verify on (1, 1) vs (1, -1)
        // that the two kinds differ exactly as the multipliers say.
        let grid = TorusGrid::new(1, 16).unwrap();
        let h = ScalarField::from_modes(&grid, &[(vec![1, -1], c(1.0, 0.0))]).unwrap();
        let hz = h.complex_derivative(0, DerivativeKind::Z);
        let hzb = h.complex_derivative(0, DerivativeKind::ZBar);
        assert!(hz.sub(&h.scale(c(-0.5, 0.5))).sup_norm() < 1e-14);
        assert!(hzb.sub(&h.scale(c(0.5, 0.5))).sup_norm() < 1e-14);
    }

    #[test]
    fn derivatives_commute_exactly() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let f = test_field(&grid);
        let ab = f
            .complex_derivative(0, DerivativeKind::Z)
            .complex_derivative(1, DerivativeKind::ZBar);
        let ba = f
            .complex_derivative(1, DerivativeKind::ZBar)
            .complex_derivative(0, DerivativeKind::Z);
        // Identical multiplier products in either order: bitwise equality.
        assert_eq!(ab.sub(&ba).sup_norm(), 0.0);
    }

    #[test]
    fn parseval_holds_to_1e12() {
        for (n, size) in [(1usize, 64usize), (2, 16)] {
            let grid = TorusGrid::new(n, size).unwrap();
            let f = test_field(&grid);
            let phys = f.l2_norm();
            let spec = f.to_spectral().l2_norm();
            assert!(
                (phys - spec).abs() <= 1e-12 * phys.max(1.0),
                "Parseval gap {} at n={n}",
                (phys - spec).abs()
            );
        }
    }

    #[test]
    fn quadrature_of_single_mode_norm() {
        // ‖e^{i x}‖² = (2π)² at n = 1 (volume of the torus), so the norm is 2π.
        let grid = TorusGrid::new(1, 16).unwrap();
        let f = ScalarField::from_modes(&grid, &[(vec![1, 0], c(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(f.l2_norm(), std::f64::consts::TAU, epsilon = 1e-12);
    }

    #[test]
    fn green_multiplier_inverts_half_laplacian_off_means() {
        // Composition oracle: M_G with G(k) = 2/|k|² (zero at k = 0), then
        // M_L with L(k) = |k|²/2, acts as identity minus mean.
        let grid = TorusGrid::new(1, 32).unwrap();
        let f = test_field(&grid);
        let green = f.multiplier_apply(|k| {
            let k2: i64 = k.iter().map(|&x| x * x).sum();
            if k2 == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(2.0 / k2 as f64, 0.0)
            }
        });
        let back = green.multiplier_apply(|k| {
            let k2: i64 = k.iter().map(|&x| x * x).sum();
            Complex64::new(k2 as f64 / 2.0, 0.0)
        });
        let mean = f.mean();
        let expected = f.sub(&ScalarField::constant(&grid, mean));
        assert!(back.sub(&expected).sup_norm() <= 1e-12);
    }

    #[test]
    fn multiplier_linearity() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let f = test_field(&grid);
        let g = ScalarField::from_modes(&grid, &[(vec![2, 3], c(0.2, 0.9))]).unwrap();
        let m = |k: &[i64]| Complex64::new(k[0] as f64, (k[1] * k[1]) as f64 * 0.1);
        let lhs = f.add_scaled(&g, c(2.0, -1.0)).multiplier_apply(m);
        let rhs = f
            .multiplier_apply(m)
            .add_scaled(&g.multiplier_apply(m), c(2.0, -1.0));
        assert!(lhs.sub(&rhs).sup_norm() <= 1e-12);
    }

    #[test]
    fn rejects_modes_at_or_beyond_nyquist() {
        let grid = TorusGrid::new(1, 16).unwrap();
        assert!(ScalarField::from_modes(&grid, &[(vec![8, 0], c(1.0, 0.0))]).is_err());
        assert!(ScalarField::from_modes(&grid, &[(vec![-8, 0], c(1.0, 0.0))]).is_err());
        assert!(ScalarField::from_modes(&grid, &[(vec![7, -7], c(1.0, 0.0))]).is_ok());
    }
}
