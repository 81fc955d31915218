use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwhmFit {
    pub fwhm: f64,
    pub peak_x: f64,
    pub peak_y: f64,
}

/// FWHM of a single-peaked series by linear interpolation of the half-maximum
/// crossings on either side of the maximum.
pub fn fit_fwhm(x: &[f64], y: &[f64]) -> Result<FwhmFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::FitFailed(format!(
            "need at least 3 matching samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(ymax > 0.0) {
        return Err(Error::FitFailed("series has no positive maximum".into()));
    }
    let half = ymax / 2.0;
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let left = (0..imax)
        .rev()
        .find(|&i| y[i] < half)
        .map(|i| cross(i, i + 1));
    let right = (imax + 1..y.len())
        .find(|&i| y[i] < half)
        .map(|i| cross(i - 1, i));
    match (left, right) {
        (Some(l), Some(r)) => Ok(FwhmFit {
            fwhm: (r - l).abs(),
            peak_x: x[imax],
            peak_y: ymax,
        }),
        _ => Err(Error::FitFailed(
            "no half-maximum crossing on both sides".into(),
        )),
    }
}

/// Intensity FWHM (fs) of the transform-limited pulse with spectral intensity
/// `photons` on `grid`, from a direct time-domain sum.
pub fn tl_pulse_duration(grid: &SpectralGrid, photons: &[f64]) -> Result<f64> {
    grid.check_len(photons.len(), "photons")?;
    let modes: Vec<(f64, f64)> = photons
        .iter()
        .enumerate()
        .filter(|(_, n)| **n > 0.0)
        .map(|(i, n)| (grid.offset(i), n.sqrt()))
        .collect();
    let (lo, hi) = modes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| {
            (a.min(*x), b.max(*x))
        });
    if modes.is_empty() || hi <= lo {
        return Err(Error::FitFailed(
            "spectrum has fewer than two populated modes".into(),
        ));
    }
    let intensity = |t: f64| {
        modes
            .iter()
            .map(|(x, a)| Complex64::cis(-x * t) * *a)
            .sum::<Complex64>()
            .norm_sqr()
    };
    let peak = intensity(0.0);
    let half = peak / 2.0;
    let step = 0.01 * std::f64::consts::TAU / (hi - lo);
    let edge = |dir: f64| -> Result<f64> {
        let mut t = 0.0;
        for _ in 0..100_000 {
            let next = t + dir * step;
            if intensity(next) < half {
                let (mut a, mut b) = (t, next);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if intensity(m) < half {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            t = next;
        }
        Err(Error::FitFailed(
            "pulse intensity never falls to half maximum".into(),
        ))
    };
    Ok(edge(1.0)? - edge(-1.0)?)
}
