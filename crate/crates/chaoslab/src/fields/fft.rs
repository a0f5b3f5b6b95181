//! In-place forward FFTs on square 1d/2d arrays (row-major).

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Clone)]
pub(crate) struct GridFft {
    dim: usize,
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFft").field("dim", &self.dim).field("n", &self.n).finish()
    }
}

impl GridFft {
    pub(crate) fn new(dim: usize, n: usize) -> Self {
        assert!(dim == 1 || dim == 2, "only d = 1, 2 grids are supported");
        let fft = FftPlanner::new().plan_fft_forward(n);
        GridFft { dim, n, fft }
    }

    pub(crate) fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub(crate) fn process(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.n;
        let fs = self.fft.get_inplace_scratch_len();
        let need = if self.dim == 2 { n * n + fs } else { fs };
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        if self.dim == 1 {
            self.fft.process_with_scratch(data, &mut scratch[..fs]);
            return;
        }
        let (tbuf, inner) = scratch.split_at_mut(n * n);
        let inner = &mut inner[..fs];
        // Rows, transpose, rows again, transpose back.
        self.fft.process_with_scratch(data, inner);
        transpose(data, tbuf, n);
        self.fft.process_with_scratch(tbuf, inner);
        transpose(tbuf, data, n);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Index of `-k` (mod n per axis) for a flat index.
pub(crate) fn negate_index(k: usize, n: usize, dim: usize) -> usize {
    let neg = |a: usize| if a == 0 { 0 } else { n - a };
    match dim {
        1 => neg(k),
        _ => neg(k / n) * n + neg(k % n),
    }
}
