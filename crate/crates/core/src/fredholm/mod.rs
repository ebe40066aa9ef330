//! Nyström evaluation of Fredholm determinants: the Laplace-transform
//! determinant of the partition function, and the step and smoothed
//! determinants of the rescaled kernel.

mod contour;
mod kernel;
mod laplace;

use num_complex::Complex64;

pub use contour::{ContourSpec, NystromGrid};
pub use kernel::{
    ansatz_gap, gap_csv, log_w_hat, marchenko_pastur, mp_check, rescaled_kernel, rescaled_kernel_matrix, smoothed_det,
    smoothed_det_ygrid, step_det, step_det_contour, DetOptions, GapRow, KernelContours, MpRow, GAP_CSV_HEADER,
};
pub use laplace::{inverse_gamma_laplace, laplace_contours, laplace_det, log_w};

/// A determinant with its self-reported accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    pub value: Complex64,
    /// `log det`; `Re` is `ln|det|`.
    pub log_value: Complex64,
    /// `|Im value|`, reported for determinants expected to be real.
    pub imag_residual: f64,
    /// `|value(m) − value(2m)|`; NaN when refinement was skipped.
    pub refine_delta: f64,
    pub dims: usize,
}

pub(crate) fn det_result(ln: Complex64, fine: Option<Complex64>, dims: usize) -> DetResult {
    let value = ln.exp();
    DetResult {
        value,
        log_value: ln,
        imag_residual: value.im.abs(),
        refine_delta: fine.map_or(f64::NAN, |f| (f.exp() - value).norm()),
        dims,
    }
}
