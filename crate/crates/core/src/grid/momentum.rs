use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::RadialGrid;
use crate::error::{Error, Result};

const RESEED: usize = 64;

/// Ψ(k) = (2π)^{-1/2} ∫ e^{−ikR} Ψ(R) dR on a symmetric k grid.
#[derive(Debug, Clone)]
pub struct MomentumAmplitude {
    pub k: Vec<f64>,
    pub amp: Vec<Complex64>,
    pub dk: f64,
}

impl MomentumAmplitude {
    pub fn abs(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm()).collect()
    }

    /// Σ |Ψ(k)|² Δk.
    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dk
    }

    /// Index of the grid point closest to `k`.
    pub fn index_of(&self, k: f64) -> usize {
        let i = ((k - self.k[0]) / self.dk).round();
        (i.max(0.0) as usize).min(self.k.len() - 1)
    }
}

/// Σ_k c_k sin(kθ) with a rotation recurrence reseeded every few terms.
fn sine_sum(c: &[Complex64], theta: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, theta);
    let mut z = step;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ck) in c.iter().enumerate() {
        if i % RESEED == 0 {
            z = Complex64::from_polar(1.0, (i + 1) as f64 * theta);
        }
        acc += ck * z.im;
        z *= step;
    }
    acc
}

impl RadialGrid {
    /// Spacing and count of the uniform auxiliary grid (2× oversampled).
    fn aux_layout(&self) -> (f64, usize) {
        let h_target = 0.5 * PI / self.k_max;
        let m = (self.box_length() / h_target).ceil() as usize;
        (self.box_length() / m as f64, m)
    }

    /// Band-limited interpolant ψ(R) of a DVR vector at arbitrary radii.
    pub fn interpolate(&self, v: &[Complex64], radii: &[f64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: v.len() });
        }
        let mut c = vec![Complex64::new(0.0, 0.0); self.n];
        self.sine_coefficients(v, &mut c, &mut self.workspace());
        let scale = PI / (self.n + 1) as f64;
        Ok(radii
            .par_iter()
            .map(|&r| if r <= self.r_min || r >= self.r_max { Complex64::new(0.0, 0.0) } else { sine_sum(&c, scale * self.x_of_r(r)) })
            .collect())
    }

    pub fn to_momentum(&self, v: &[Complex64]) -> Result<MomentumAmplitude> {
        let (h, m_aux) = self.aux_layout();
        let radii: Vec<f64> = (0..=m_aux).map(|a| self.r_min + a as f64 * h).collect();
        let psi = self.interpolate(v, &radii)?;
        let m = 2 * m_aux + 1;
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        z[..=m_aux].copy_from_slice(&psi);
        FftPlanner::new().plan_fft_forward(m).process(&mut z);

        let half = (m - 1) / 2;
        let dk = 2.0 * PI / (m as f64 * h);
        let pre = h / (2.0 * PI).sqrt();
        let mut k = Vec::with_capacity(m);
        let mut amp = Vec::with_capacity(m);
        for i in 0..m {
            let idx = i as i64 - half as i64;
            let kk = idx as f64 * dk;
            k.push(kk);
            amp.push(pre * z[idx.rem_euclid(m as i64) as usize] * Complex64::from_polar(1.0, -kk * self.r_min));
        }
        Ok(MomentumAmplitude { k, amp, dk })
    }

    /// Evaluates (2π)^{-1/2} Σ Ψ(k) e^{ikR} Δk at the nodes and returns DVR amplitudes.
    pub fn from_momentum(&self, mom: &MomentumAmplitude) -> Vec<Complex64> {
        let pre = mom.dk / (2.0 * PI).sqrt();
        let k0 = mom.k[0];
        let psi: Vec<Complex64> = self
            .nodes
            .par_iter()
            .map(|&r| {
                let step = Complex64::from_polar(1.0, mom.dk * r);
                let mut z = Complex64::from_polar(1.0, k0 * r);
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in mom.amp.iter().enumerate() {
                    if i % RESEED == 0 {
                        z = Complex64::from_polar(1.0, mom.k[i] * r);
                    }
                    acc += a * z;
                    z *= step;
                }
                pre * acc
            })
            .collect();
        self.to_dvr(&psi)
    }
}
