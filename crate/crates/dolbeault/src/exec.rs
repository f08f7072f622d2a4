//! Execution-policy shims: each helper runs its elementwise/lane kernel
//! either data-parallel (rayon, default feature `parallel`) or sequentially
//! (`--no-default-features`).
//!
//! Only *independent* work goes through these helpers. Every reduction in the
//! crate (norms, inner products, sup-norms, means) is written as a plain
//! sequential fold so that results are byte-identical under both execution
//! policies.
//!
//! All arrays in this crate are freshly allocated in standard (row-major)
//! layout and never sliced, so flat-slice access is always available; the
//! grid knows how to decode a flat offset into a multi-index.

use ndarray::{ArrayD, ArrayViewMut1, Axis};
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every element.
pub(crate) fn map_inplace<T: Send>(data: &mut [T], f: impl Fn(&mut T) + Sync) {
    #[cfg(feature = "parallel")]
    data.par_iter_mut().for_each(|v| f(v));
    #[cfg(not(feature = "parallel"))]
    data.iter_mut().for_each(|v| f(v));
}

/// Applies `f(flat_offset, element)` to every element.
pub(crate) fn map_indexed<T: Send>(data: &mut [T], f: impl Fn(usize, &mut T) + Sync) {
    #[cfg(feature = "parallel")]
    data.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    #[cfg(not(feature = "parallel"))]
    data.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

/// Applies `f(a_i, b_i)` over two equal-length slices, mutating the first.
pub(crate) fn zip2<T: Send, U: Sync>(a: &mut [T], b: &[U], f: impl Fn(&mut T, &U) + Sync) {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| f(x, y));
    #[cfg(not(feature = "parallel"))]
    a.iter_mut().zip(b.iter()).for_each(|(x, y)| f(x, y));
}

/// Applies `f` to every 1-D lane of `data` along `axis` (FFT passes).
///
/// Parallelism is over the hyperplanes of a *different* axis (ndarray exposes
/// rayon iterators for `axis_iter_mut` but not for `lanes_mut`); each task
/// then walks its own lanes sequentially. With ≥ 8 points per axis this
/// yields at least 8 independent tasks.
pub(crate) fn for_each_lane(
    data: &mut ArrayD<Complex64>,
    axis: Axis,
    f: impl Fn(&mut ArrayViewMut1<Complex64>) + Sync + Send,
) {
    let ndim = data.ndim();
    debug_assert!(ndim >= 2, "grids always have at least two real axes");
    let split = if axis.index() == 0 {
        Axis(ndim - 1)
    } else {
        Axis(0)
    };
    let lane_axis = if axis.index() > split.index() {
        Axis(axis.index() - 1)
    } else {
        axis
    };
    let planes = data.axis_iter_mut(split);
    #[cfg(feature = "parallel")]
    planes.into_par_iter().for_each(|mut plane| {
        for mut lane in plane.lanes_mut(lane_axis) {
            f(&mut lane);
        }
    });
    #[cfg(not(feature = "parallel"))]
    planes.into_iter().for_each(|mut plane| {
        for mut lane in plane.lanes_mut(lane_axis) {
            f(&mut lane);
        }
    });
}
