//! Digital Butterworth band-pass design.
//!
//! Analog prototype poles → low-pass to band-pass transform → bilinear
//! transform with pre-warped band edges, all in zero/pole/gain form, then
//! expanded to a single transfer function `b(z)/a(z)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPassFilter {
    /// Feed-forward coefficients, highest power of z⁻¹ last.
    pub b: Vec<f64>,
    /// Feedback coefficients, `a[0] == 1`.
    pub a: Vec<f64>,
    /// Order of the low-pass prototype; the band-pass has twice as many poles.
    pub order: usize,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub rate_hz: f64,
    #[serde(skip)]
    poles: Vec<Complex64>,
}

impl BandPassFilter {
    /// Butterworth band-pass of prototype order `order` with -3 dB edges at
    /// `low_hz` and `high_hz`.
    pub fn design(order: usize, low_hz: f64, high_hz: f64, rate_hz: f64) -> Result<Self> {
        let nyquist = rate_hz / 2.0;
        if order == 0 {
            return Err(Error::FilterDesign("order must be at least 1".into()));
        }
        if !(0.0 < low_hz && low_hz < high_hz && high_hz < nyquist) {
            return Err(Error::FilterDesign(format!(
                "band edges must satisfy 0 < {low_hz} < {high_hz} < {nyquist} (Nyquist)"
            )));
        }

        // Pre-warp so the digital edges land exactly on low_hz / high_hz.
        let warp = |f: f64| 2.0 * rate_hz * (PI * f / rate_hz).tan();
        let (wl, wh) = (warp(low_hz), warp(high_hz));
        let bw = wh - wl;
        let w0 = (wl * wh).sqrt();

        let n = order as i32;
        let prototype: Vec<Complex64> = (0..order as i32)
            .map(|k| {
                let m = (-n + 1 + 2 * k) as f64;
                -(Complex64::i() * PI * m / (2.0 * n as f64)).exp()
            })
            .collect();

        // Low-pass → band-pass: each pole splits into a conjugate-ish pair,
        // and `order` zeros appear at s = 0 (the rest are at infinity).
        let mut s_poles = Vec::with_capacity(2 * order);
        for p in &prototype {
            let p_lp = p * bw / 2.0;
            let disc = (p_lp * p_lp - w0 * w0).sqrt();
            s_poles.push(p_lp + disc);
            s_poles.push(p_lp - disc);
        }
        let s_gain = bw.powi(n);

        // Bilinear transform.
        let fs2 = Complex64::new(2.0 * rate_hz, 0.0);
        let z_poles: Vec<Complex64> = s_poles.iter().map(|p| (fs2 + p) / (fs2 - p)).collect();
        let mut z_zeros = vec![Complex64::new(1.0, 0.0); order];
        z_zeros.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), order));
        let zero_term: Complex64 = std::iter::repeat_n(fs2, order).product();
        let pole_term: Complex64 = s_poles.iter().map(|p| fs2 - p).product();
        let gain = s_gain * (zero_term / pole_term).re;

        let b = poly(&z_zeros).into_iter().map(|c| gain * c.re).collect();
        let a = poly(&z_poles).into_iter().map(|c| c.re).collect();
        Ok(Self {
            b,
            a,
            order,
            band_low_hz: low_hz,
            band_high_hz: high_hz,
            rate_hz,
            poles: z_poles,
        })
    }

    /// Poles in the z-plane, as produced by the design.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn is_stable(&self) -> bool {
        !self.poles.is_empty() && self.poles.iter().all(|p| p.norm() < 1.0)
    }

    /// Complex response at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz / self.rate_hz;
        let eval = |c: &[f64]| -> Complex64 {
            c.iter()
                .enumerate()
                .map(|(k, &v)| v * Complex64::from_polar(1.0, -w * k as f64))
                .sum()
        };
        eval(&self.b) / eval(&self.a)
    }

    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        self.response(freq_hz).norm()
    }

    /// Causal direct-form II transposed filtering from a zero state.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let order = self.a.len() - 1;
        let mut state = vec![0.0; order];
        let mut out = Vec::with_capacity(input.len());
        for &x in input {
            let y = self.b[0] * x + state[0];
            for i in 0..order {
                let next = if i + 1 < order { state[i + 1] } else { 0.0 };
                state[i] = self.b[i + 1] * x + next - self.a[i + 1] * y;
            }
            out.push(y);
        }
        out
    }
}

/// Monic polynomial with the given roots, highest power first.
fn poly(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c
}
