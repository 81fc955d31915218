use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Linear autoconvolution `C_j = Σ_{i+k=j} E_i E_k` of an `N`-sample field
/// through a zero-padded transform of length `next_pow2(2N)`.
#[derive(Clone)]
pub struct Autoconvolver {
    n: usize,
    padded: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Autoconvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Autoconvolver")
            .field("n", &self.n)
            .field("padded", &self.padded)
            .finish()
    }
}

impl Autoconvolver {
    pub fn new(n: usize) -> Self {
        let padded = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            n,
            padded,
            forward: planner.plan_fft_forward(padded),
            inverse: planner.plan_fft_inverse(padded),
        }
    }

    pub fn padded_len(&self) -> usize {
        self.padded
    }

    /// Returns the `2N − 1` linear-convolution samples.
    pub fn autoconvolve(&self, field: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(field.len(), self.n, "field length does not match plan");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded];
        buf[..self.n].copy_from_slice(field);
        self.forward.process(&mut buf);
        for v in buf.iter_mut() {
            *v = *v * *v;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.padded as f64;
        buf.truncate(2 * self.n - 1);
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }
}

/// Circular convolution of real data with a fixed kernel whose origin is bin 0.
#[derive(Clone)]
pub struct CircularConvolver {
    len: usize,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    identity: bool,
}

impl std::fmt::Debug for CircularConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircularConvolver")
            .field("len", &self.len)
            .field("identity", &self.identity)
            .finish()
    }
}

impl CircularConvolver {
    pub fn new(kernel: &[f64]) -> Self {
        let len = kernel.len();
        let identity = kernel[0] == 1.0 && kernel[1..].iter().all(|&w| w == 0.0);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel_hat: Vec<Complex64> =
            kernel.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        forward.process(&mut kernel_hat);
        Self {
            len,
            kernel_hat,
            forward,
            inverse,
            identity,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn convolve(&self, data: &[f64]) -> Vec<f64> {
        assert_eq!(data.len(), self.len, "data length does not match kernel");
        if self.identity {
            return data.to_vec();
        }
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.iter().map(|v| v.re * scale).collect()
    }
}
