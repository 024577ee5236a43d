//! Sine and cosine sums on the integer lattice 0..=n1, evaluated with one
//! complex FFT of length 2·n1 each.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone)]
pub(crate) struct Trig {
    n1: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Trig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trig").field("n1", &self.n1).finish()
    }
}

/// Scratch space for [`Trig`]; one per thread.
#[derive(Debug, Clone)]
pub(crate) struct TrigBuffers {
    pub(crate) data: Vec<Complex64>,
    pub(crate) scratch: Vec<Complex64>,
}

impl Trig {
    pub(crate) fn new(n1: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * n1);
        Trig { n1, fft }
    }

    pub(crate) fn buffers(&self) -> TrigBuffers {
        TrigBuffers { data: vec![ZERO; 2 * self.n1], scratch: vec![ZERO; self.fft.get_inplace_scratch_len()] }
    }

    /// `y_k = Σ_{j=1}^{N} x_j sin(π j k / n1)` for k = 1..=N.
    pub(crate) fn dst1(&self, x: &[Complex64], y: &mut [Complex64], b: &mut TrigBuffers) {
        let n1 = self.n1;
        let z = &mut b.data;
        z[0] = ZERO;
        z[n1] = ZERO;
        for j in 1..n1 {
            z[j] = x[j - 1];
            z[2 * n1 - j] = -x[j - 1];
        }
        self.fft.process_with_scratch(z, &mut b.scratch);
        let half_i = Complex64::new(0.0, 0.5);
        for k in 1..n1 {
            y[k - 1] = half_i * z[k];
        }
    }

    /// `y_q = Σ_{k=1}^{N} d_k cos(π k q / n1)` for q = 0..=n1.
    pub(crate) fn cos_eval(&self, d: &[Complex64], y: &mut [Complex64], b: &mut TrigBuffers) {
        let n1 = self.n1;
        let z = &mut b.data;
        z[0] = ZERO;
        z[n1] = ZERO;
        for k in 1..n1 {
            z[k] = d[k - 1];
            z[2 * n1 - k] = d[k - 1];
        }
        self.fft.process_with_scratch(z, &mut b.scratch);
        for q in 0..=n1 {
            y[q] = 0.5 * z[q];
        }
    }

    /// Transpose of [`Trig::cos_eval`]: `y_k = Σ_{q=0}^{n1} u_q cos(π k q / n1)`.
    pub(crate) fn cos_eval_t(&self, u: &[Complex64], y: &mut [Complex64], b: &mut TrigBuffers) {
        let n1 = self.n1;
        let z = &mut b.data;
        z[0] = u[0];
        z[n1] = u[n1];
        for q in 1..n1 {
            z[q] = u[q];
            z[2 * n1 - q] = u[q];
        }
        self.fft.process_with_scratch(z, &mut b.scratch);
        for k in 1..n1 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            y[k - 1] = 0.5 * (z[k] + u[0] + sign * u[n1]);
        }
    }
}
