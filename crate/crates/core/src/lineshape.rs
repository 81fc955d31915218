//! Unit-area line shapes used for the pump spectrum and the detector response.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineshapeKind {
    Gaussian,
    Lorentzian,
}

impl LineshapeKind {
    /// Probability density at `x` for a line of full width at half maximum `fwhm > 0`.
    pub fn density(self, fwhm: f64, x: f64) -> f64 {
        match self {
            LineshapeKind::Gaussian => {
                let sigma = fwhm / (2.0 * (2.0 * LN_2).sqrt());
                (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
            }
            LineshapeKind::Lorentzian => {
                let hw = fwhm / 2.0;
                hw / (PI * (x * x + hw * hw))
            }
        }
    }

    /// Peak value of the density.
    pub fn peak(self, fwhm: f64) -> f64 {
        self.density(fwhm, 0.0)
    }

    /// One draw from the line; zero width gives exactly zero.
    pub fn draw<R: Rng + ?Sized>(self, fwhm: f64, rng: &mut R) -> f64 {
        if fwhm == 0.0 {
            return 0.0;
        }
        match self {
            LineshapeKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                z * fwhm / (2.0 * (2.0 * LN_2).sqrt())
            }
            LineshapeKind::Lorentzian => {
                let u: f64 = rng.random();
                fwhm / 2.0 * (PI * (u - 0.5)).tan()
            }
        }
    }

    /// Weights of a circular kernel on `len` bins of width `spacing`, centered
    /// on bin 0 and summing to one. Zero width gives a unit impulse.
    pub fn periodic_weights(self, fwhm: f64, len: usize, spacing: f64) -> Vec<f64> {
        let mut w = vec![0.0; len];
        if fwhm == 0.0 || len == 1 {
            w[0] = 1.0;
            return w;
        }
        for (j, v) in w.iter_mut().enumerate() {
            let d = j.min(len - j) as f64 * spacing;
            *v = self.density(fwhm, d);
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }
}
