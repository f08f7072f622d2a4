//! Uniform grids on the real torus underlying ℂⁿ/(2πℤ)²ⁿ.
//!
//! A [`TorusGrid`] discretizes [0, 2π)²ⁿ with the same even number of points
//! N on every real axis. Real axes are ordered (x₁, y₁, x₂, y₂, …) so that
//! complex axis `a` owns real axes `2a` (its real part) and `2a + 1` (its
//! imaginary part), i.e. z_a = x_a + i·y_a.
//!
//! Discrete Fourier data is stored in FFT slot order; slot j on an axis
//! carries the centered integer frequency
//!
//! ```text
//! k(j) = j        for j < N/2,
//! k(j) = j − N    otherwise,
//! ```
//!
//! so the Nyquist slot j = N/2 carries k = −N/2. First-order spectral
//! derivatives use the *effective* frequency, identical to `k(j)` except that
//! the Nyquist slot is treated as frequency zero; this keeps every derivative
//! multiplier an odd function of frequency, which is what makes the discrete
//! ∂ and ∂̄ exactly skew-adjoint (and their L²-adjoint formulas exact rather
//! than approximate). Band-limited data never populates the Nyquist slot, so
//! the two conventions agree on it.

use std::f64::consts::TAU;
use std::sync::Arc;

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::exec;

/// Uniform N²ⁿ grid on [0, 2π)²ⁿ with cached FFT plans and frequency tables.
pub struct TorusGrid {
    n: usize,
    size: usize,
    freq: Vec<i64>,
    freq_eff: Vec<i64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("size", &self.size)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.size == other.size
    }
}
impl Eq for TorusGrid {}

impl TorusGrid {
    /// Builds a grid for complex dimension `n` ∈ {1, 2} with `size` points on
    /// each real axis. `size` must be a power of two and at least 8.
    pub fn new(n: usize, size: usize) -> Result<Arc<Self>> {
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "complex dimension must be 1 or 2, got {n}"
            )));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "axis size must be a power of two ≥ 8, got {size}"
            )));
        }
        let half = size / 2;
        let freq: Vec<i64> = (0..size)
            .map(|j| if j < half { j as i64 } else { j as i64 - size as i64 })
            .collect();
        let freq_eff: Vec<i64> = (0..size)
            .map(|j| if j == half { 0 } else { freq[j] })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(TorusGrid {
            n,
            size,
            freq,
            freq_eff,
            fft_forward: planner.plan_fft_forward(size),
            fft_inverse: planner.plan_fft_inverse(size),
        }))
    }

    /// Complex dimension n.
    pub fn complex_dim(&self) -> usize {
        self.n
    }

    /// Number of real axes, 2n.
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Points per real axis.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Total number of grid points, N²ⁿ.
    pub fn point_count(&self) -> usize {
        self.size.pow(self.axes() as u32)
    }

    /// Array shape `[N; 2n]`.
    pub fn shape(&self) -> Vec<usize> {
        vec![self.size; self.axes()]
    }

    /// Volume of the torus, (2π)²ⁿ.
    pub fn volume(&self) -> f64 {
        TAU.powi(self.axes() as i32)
    }

    /// Coordinate of slot `j` on any axis: 2πj/N.
    pub fn coordinate(&self, slot: usize) -> f64 {
        TAU * slot as f64 / self.size as f64
    }

    /// Centered integer frequency of FFT slot `j` (Nyquist slot ↦ −N/2).
    pub fn centered_frequency(&self, slot: usize) -> i64 {
        self.freq[slot]
    }

    /// Frequency used by first-order derivative multipliers (Nyquist ↦ 0).
    pub fn effective_frequency(&self, slot: usize) -> i64 {
        self.freq_eff[slot]
    }

    /// Largest |k| representable without hitting the Nyquist slot.
    pub fn max_band(&self) -> i64 {
        self.size as i64 / 2 - 1
    }

    /// Fills `out` with the coordinates of the grid point at `index`.
    pub fn point(&self, index: &[usize], out: &mut [f64]) {
        for (o, &j) in out.iter_mut().zip(index) {
            *o = self.coordinate(j);
        }
    }

    /// Decodes a flat row-major offset into per-axis slots.
    pub fn decode_flat(&self, flat: usize, out: &mut [usize]) {
        let bits = self.size.trailing_zeros() as usize;
        let mask = self.size - 1;
        let axes = self.axes();
        for (a, o) in out.iter_mut().enumerate().take(axes) {
            let shift = bits * (axes - 1 - a);
            *o = (flat >> shift) & mask;
        }
    }

    /// In-place DFT over every axis.
    ///
    /// Forward transforms divide by N²ⁿ so that the spectral array holds the
    /// coefficients of f(x) = Σ_k f̂_k e^{i k·x}; the inverse transform is the
    /// unnormalized adjoint sum, making the round trip exact to roundoff.
    pub(crate) fn transform_in_place(&self, data: &mut ArrayD<Complex64>, inverse: bool) {
        let fft = if inverse {
            &self.fft_inverse
        } else {
            &self.fft_forward
        };
        for axis in 0..self.axes() {
            exec::for_each_lane(data, Axis(axis), |lane| {
                let mut buffer: Vec<Complex64> = lane.iter().copied().collect();
                fft.process(&mut buffer);
                for (dst, src) in lane.iter_mut().zip(buffer.iter()) {
                    *dst = *src;
                }
            });
        }
        if !inverse {
            let scale = 1.0 / self.point_count() as f64;
            let slice = data.as_slice_mut().expect("standard layout");
            exec::map_inplace(slice, |v| *v *= scale);
        }
    }
}

/// Checks that two fields live on the same grid (same n and N).
pub(crate) fn same_grid(a: &Arc<TorusGrid>, b: &Arc<TorusGrid>, what: &str) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::Incompatible(format!(
            "{what}: grids differ ({:?} vs {:?})",
            a, b
        )))
    }
}
