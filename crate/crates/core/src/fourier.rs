//! Mean-zero 2π-periodic profiles stored as truncated Fourier series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Number of harmonics kept when a profile is built from samples.
pub const DEFAULT_HARMONICS: usize = 64;

/// `h(φ) = Σ_{j≥1} cos[j-1]·cos(jφ) + sin[j-1]·sin(jφ)`; the mean term is absent by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    /// Set when the series is exactly `A cos φ` (no truncation error).
    #[serde(default)]
    pub pure_cosine: bool,
}

impl FourierSeries {
    pub fn zero() -> Self {
        Self { cos: Vec::new(), sin: Vec::new(), pure_cosine: false }
    }

    pub fn cosine(amplitude: f64) -> Self {
        Self { cos: vec![amplitude], sin: vec![0.0], pure_cosine: true }
    }

    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.iter().chain(&sin).any(|v| !v.is_finite()) {
            return domain("Fourier coefficients must be finite");
        }
        let n = cos.len().max(sin.len());
        let mut c = cos;
        let mut s = sin;
        c.resize(n, 0.0);
        s.resize(n, 0.0);
        Ok(Self { cos: c, sin: s, pure_cosine: false })
    }

    /// Fits a profile to `samples` taken at `φ_i = 2πi/N`, discarding the mean.
    ///
    /// Errors if the sample mean is not zero to `mean_tol` relative to the sample scale.
    pub fn from_samples(samples: &[f64], harmonics: usize, mean_tol: f64) -> Result<Self> {
        let n = samples.len();
        if n < 2 * harmonics + 1 {
            return domain(format!("{n} samples cannot resolve {harmonics} harmonics"));
        }
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mean = samples.iter().sum::<f64>() / n as f64;
        if mean.abs() > mean_tol * scale {
            return domain(format!("forcing profile has nonzero mean {mean:e}"));
        }
        let mut cos = vec![0.0; harmonics];
        let mut sin = vec![0.0; harmonics];
        for (i, &v) in samples.iter().enumerate() {
            let phi = 2.0 * PI * i as f64 / n as f64;
            for j in 0..harmonics {
                let (s, c) = ((j + 1) as f64 * phi).sin_cos();
                cos[j] += v * c;
                sin[j] += v * s;
            }
        }
        let w = 2.0 / n as f64;
        cos.iter_mut().for_each(|v| *v *= w);
        sin.iter_mut().for_each(|v| *v *= w);
        Self::new(cos, sin)
    }

    pub fn harmonics(&self) -> usize {
        self.cos.len()
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&v| v == 0.0)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (&a, &b))| {
                if a == 0.0 && b == 0.0 {
                    return 0.0;
                }
                let (s, c) = ((i + 1) as f64 * phi).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|v| v * factor).collect(),
            sin: self.sin.iter().map(|v| v * factor).collect(),
            pure_cosine: self.pure_cosine,
        }
    }

    /// Maximum and minimum over `[0, 2π)`: dense sampling plus golden-section refinement.
    pub fn extrema(&self) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        extrema_of(|phi| self.eval(phi))
    }
}

const EXTREMA_SAMPLES: usize = 4096;

/// Extrema of a smooth 2π-periodic function; see [`FourierSeries::extrema`].
pub fn extrema_of<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let h = 2.0 * PI / EXTREMA_SAMPLES as f64;
    let vals: Vec<f64> = (0..EXTREMA_SAMPLES).map(|i| f(i as f64 * h)).collect();
    let (mut imax, mut imin) = (0, 0);
    for (i, &v) in vals.iter().enumerate() {
        if v > vals[imax] {
            imax = i;
        }
        if v < vals[imin] {
            imin = i;
        }
    }
    let c = imax as f64 * h;
    let hmax = -golden_min(|x| -f(x), c - h, c + h).max(-vals[imax]);
    let c = imin as f64 * h;
    let hmin = golden_min(&f, c - h, c + h).min(vals[imin]);
    (hmax, hmin)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_extrema() {
        let h = FourierSeries::cosine(2.5);
        let (mx, mn) = h.extrema();
        assert!((mx - 2.5).abs() < 1e-14 && (mn + 2.5).abs() < 1e-14);
    }

    #[test]
    fn sampled_round_trip() {
        let h = FourierSeries::new(vec![0.3, 0.0, -0.1], vec![0.2, 0.05, 0.0]).unwrap();
        let samples: Vec<f64> = (0..64).map(|i| h.eval(2.0 * PI * i as f64 / 64.0)).collect();
        let g = FourierSeries::from_samples(&samples, 5, 1e-12).unwrap();
        for j in 0..3 {
            assert!((g.cos[j] - h.cos[j]).abs() < 1e-14);
            assert!((g.sin[j] - h.sin[j]).abs() < 1e-14);
        }
        assert!(g.cos[3].abs() < 1e-14);
    }

    #[test]
    fn rejects_offset_samples() {
        let s = vec![1.0; 32];
        assert!(FourierSeries::from_samples(&s, 4, 1e-10).is_err());
    }
}
