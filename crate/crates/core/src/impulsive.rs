//! Frozen-nuclei evolution: every radius is an independent two-level system
//! driven at the flat-top coupling.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Channel, MomentumAmplitude, RadialGrid, TwoChannelState};
use crate::observables::{moving_rms, parabolic_vertex};
use crate::potentials::CoupledSystem;
use crate::units::momentum_for_energy;

/// Smoothing width used to locate maxima of the initial wavefunction.
pub const SMOOTHING_WIDTH: f64 = 2.0;
/// The expansion in W/Δ is trusted when Δ ≥ this multiple of W.
pub const VALIDITY_RATIO: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KPeak {
    pub r0: f64,
    /// Ingoing momentum, negative.
    pub k_in: f64,
    /// Reflected partner, +|k|.
    pub k_out: f64,
    /// √(4μΔ(R₀)), dropping the W²/2Δ shift.
    pub k_leading: f64,
    /// 2Δ + W²/2Δ, hartree.
    pub e_2delta: f64,
    pub amplitude_factor: f64,
    /// Δ(R₀) ≥ 3W.
    pub valid: bool,
}

#[derive(Debug, Clone)]
pub struct ImpulsivePrediction {
    /// a.u.
    pub t: f64,
    pub grid: Arc<RadialGrid>,
    /// DVR amplitudes of Ψ_g^IA.
    pub psi_g: Vec<Complex64>,
    /// DVR amplitudes of Ψ_e^IA.
    pub psi_e: Vec<Complex64>,
    /// |Ψ_e^IA(R)|² at the nodes.
    pub psi_e_density: Vec<f64>,
    pub k_peaks: Vec<KPeak>,
}

impl ImpulsivePrediction {
    pub fn state(&self) -> TwoChannelState {
        TwoChannelState::new(self.grid.clone(), self.t, self.psi_g.clone(), self.psi_e.clone()).expect("lengths fixed at construction")
    }
}

struct Local {
    /// Signed (V_e − V_g)/2.
    delta: f64,
    omega: f64,
}

fn local(sys: &CoupledSystem, r: f64, w: f64) -> Local {
    let delta = sys.half_difference(r);
    Local { delta, omega: w.hypot(delta) }
}

fn flat_top_coupling(sys: &CoupledSystem) -> f64 {
    sys.coupling * sys.envelope.peak()
}

fn check_len(grid: &RadialGrid, psi: &[Complex64]) -> Result<()> {
    if psi.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: psi.len() });
    }
    Ok(())
}

/// Ground and excited amplitudes of the local rotation at radius `r`.
fn rotation(l: &Local, w: f64, t: f64) -> (Complex64, Complex64) {
    if l.omega == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let (s, c) = (l.omega * t).sin_cos();
    let phase = Complex64::from_polar(1.0, -l.delta * t);
    let g = phase * Complex64::new(c, l.delta / l.omega * s);
    let e = phase * Complex64::new(0.0, -w / l.omega * s);
    (g, e)
}

/// Ψ^IA at time `t` (a.u.) from a stationary ground state `psi` (DVR) of energy `e_g` (hartree).
pub fn evolve_impulsive(sys: &CoupledSystem, grid: &Arc<RadialGrid>, psi: &[Complex64], e_g: f64, t: f64) -> Result<ImpulsivePrediction> {
    check_len(grid, psi)?;
    let w = flat_top_coupling(sys);
    let global = Complex64::from_polar(1.0, -e_g * t);
    let mut psi_g = Vec::with_capacity(psi.len());
    let mut psi_e = Vec::with_capacity(psi.len());
    for (&r, &a) in grid.nodes().iter().zip(psi) {
        let (g, e) = rotation(&local(sys, r, w), w, t);
        psi_g.push(global * g * a);
        psi_e.push(global * e * a);
    }
    let psi_e_density = psi_e.iter().zip(grid.weights()).map(|(a, wt)| a.norm_sqr() / wt).collect();
    let k_peaks = predict_k_peaks(sys, grid, psi)?;
    Ok(ImpulsivePrediction { t, grid: grid.clone(), psi_g, psi_e, psi_e_density, k_peaks })
}

/// W²/(W² + Δ²)·sin²(Ωt), the excited fraction at one radius.
pub fn excited_fraction(sys: &CoupledSystem, r: f64, t: f64) -> f64 {
    let w = flat_top_coupling(sys);
    let l = local(sys, r, w);
    if l.omega == 0.0 {
        return 0.0;
    }
    (w / l.omega).powi(2) * (l.omega * t).sin().powi(2)
}

/// Large and small terms of Ψ_g^IA for Δ ≫ W, as DVR vectors.
pub fn first_order_terms(sys: &CoupledSystem, grid: &RadialGrid, psi: &[Complex64], e_g: f64, t: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_len(grid, psi)?;
    let w = flat_top_coupling(sys);
    let global = Complex64::from_polar(1.0, -e_g * t);
    let mut one = Vec::with_capacity(psi.len());
    let mut two = Vec::with_capacity(psi.len());
    for (&r, &a) in grid.nodes().iter().zip(psi) {
        let l = local(sys, r, w);
        let d = l.delta.abs();
        if d == 0.0 {
            return Err(Error::Singularity("first-order terms at the crossing"));
        }
        let s = l.delta.signum();
        let shift = w * w / (2.0 * d);
        one.push(global * a * 0.5 * (1.0 + d / l.omega) * Complex64::from_polar(1.0, s * shift * t));
        two.push(global * a * (w * w / (4.0 * l.omega * d)) * Complex64::from_polar(1.0, -s * (2.0 * d + shift) * t));
    }
    Ok((one, two))
}

/// W²/(4ħΩΔ) for a local detuning Δ and coupling W.
pub fn amplitude_factor(delta: f64, w: f64) -> f64 {
    let d = delta.abs();
    w * w / (4.0 * w.hypot(d) * d)
}

/// (k, k_leading) for a local detuning Δ (hartree).
pub fn k_for_detuning(delta: f64, w: f64, mass: f64) -> (f64, f64) {
    let d = delta.abs();
    let e = 2.0 * d + w * w / (2.0 * d);
    (momentum_for_energy(e, mass), momentum_for_energy(2.0 * d, mass))
}

/// Maxima of the 2 a₀ RMS envelope, dropping a last lobe that ends on the box wall.
pub fn envelope_maxima(grid: &RadialGrid, psi: &[Complex64]) -> Result<Vec<f64>> {
    check_len(grid, psi)?;
    let wf = grid.from_dvr(psi);
    let env = moving_rms(grid, &wf, SMOOTHING_WIDTH);
    let r = grid.nodes();
    let top = env.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(Vec::new());
    }
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for j in 1..env.len() - 1 {
        if env[j] > env[j - 1] && env[j] >= env[j + 1] && env[j] > 1e-3 * top {
            match maxima.last_mut() {
                Some(last) if r[j] - last.0 < SMOOTHING_WIDTH => {
                    if env[j] > last.1 {
                        *last = (parabolic_vertex(r, &env, j), env[j]);
                    }
                }
                _ => maxima.push((parabolic_vertex(r, &env, j), env[j])),
            }
        }
    }
    if let Some(&(r_last, e_last)) = maxima.last() {
        // a lobe cut by the wall stays high for most of the way out
        let beyond: Vec<usize> = (0..r.len()).filter(|&j| r[j] > r_last).collect();
        let high = beyond.iter().take_while(|&&j| env[j] >= 0.5 * e_last).last().map_or(r_last, |&j| r[j]);
        if high - r_last >= 0.5 * (grid.r_max() - r_last) {
            maxima.pop();
        }
    }
    Ok(maxima.into_iter().map(|m| m.0).collect())
}

pub fn predict_k_peaks(sys: &CoupledSystem, grid: &RadialGrid, psi: &[Complex64]) -> Result<Vec<KPeak>> {
    let w = flat_top_coupling(sys);
    Ok(envelope_maxima(grid, psi)?
        .into_iter()
        .filter_map(|r0| {
            let d = sys.half_difference(r0).abs();
            if d == 0.0 || w == 0.0 {
                return None;
            }
            let (k, k_leading) = k_for_detuning(d, w, sys.mass);
            Some(KPeak {
                r0,
                k_in: -k,
                k_out: k,
                k_leading,
                e_2delta: 2.0 * d + w * w / (2.0 * d),
                amplitude_factor: amplitude_factor(d, w),
                valid: d >= VALIDITY_RATIO * w,
            })
        })
        .collect())
}

/// Momentum amplitude of Ψ_g^IA.
pub fn momentum_of_ia(pred: &ImpulsivePrediction) -> Result<MomentumAmplitude> {
    pred.grid.to_momentum(&pred.psi_g)
}

pub fn excited_population(pred: &ImpulsivePrediction) -> f64 {
    pred.state().channel_norm(Channel::Excited)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::potentials::{reference_system, PulseEnvelope};
    use crate::units::{cm_to_hartree, hartree_to_cm, ps_to_au, MU_CS2};

    fn system(w_cm: f64) -> CoupledSystem {
        let (mut sys, _) = reference_system(PulseEnvelope::constant(ps_to_au(10.0), 1.0).unwrap(), (8.0, 760.0)).unwrap();
        sys.coupling = cm_to_hartree(w_cm);
        sys
    }

    fn packet(grid: &RadialGrid) -> Vec<Complex64> {
        let psi: Vec<Complex64> = grid.nodes().iter().map(|&r| Complex64::new((-(r - 40.0).powi(2) / 60.0).exp(), 0.0)).collect();
        grid.to_dvr(&psi)
    }

    #[test]
    fn decoupled_and_initial_limits() {
        let grid = Arc::new(RadialGrid::uniform(400, 10.0, 90.0, MU_CS2).unwrap());
        let psi = packet(&grid);
        let e_g = cm_to_hartree(-140.0);
        let t = ps_to_au(3.0);
        let p = evolve_impulsive(&system(0.0), &grid, &psi, e_g, t).unwrap();
        let phase = Complex64::from_polar(1.0, -e_g * t);
        for (a, b) in p.psi_g.iter().zip(&psi) {
            assert!((a - phase * b).norm() < 1e-12);
        }
        assert!(p.psi_e_density.iter().all(|&d| d == 0.0));
        assert!(p.k_peaks.is_empty());

        let p = evolve_impulsive(&system(13.17), &grid, &psi, e_g, 0.0).unwrap();
        assert_eq!(p.psi_g, psi);
    }

    #[test]
    fn amplitude_factor_small_at_70_cm() {
        let w = cm_to_hartree(13.17);
        assert!((amplitude_factor(cm_to_hartree(70.0), w) - 0.0087).abs() < 0.02 * 0.0087);
        let (_, k) = k_for_detuning(cm_to_hartree(134.8 / 2.0), w, MU_CS2);
        assert!((k - 12.2).abs() < 0.05, "{k}");
        let (_, k) = k_for_detuning(cm_to_hartree(49.0), w, MU_CS2);
        assert!((k - 10.4).abs() < 0.05, "{k}");
        let (full, lead) = k_for_detuning(cm_to_hartree(67.4), w, MU_CS2);
        assert!(full > lead);
    }

    #[test]
    fn resonance_transfers_everything() {
        let sys = system(13.17);
        let c = sys.crossing().unwrap();
        let w = flat_top_coupling(&sys);
        let t_half = PI / (2.0 * w);
        assert_relative_eq!(excited_fraction(&sys, c.r_c, t_half), 1.0, max_relative = 1e-9);
        assert!(excited_fraction(&sys, 80.0, t_half) < 0.1);
    }

    #[test]
    fn expansion_error_scales_as_fourth_power() {
        let grid = Arc::new(RadialGrid::uniform(400, 40.0, 120.0, MU_CS2).unwrap());
        let psi = grid.to_dvr(&vec![Complex64::new(1.0, 0.0); grid.len()]);
        let sys = system(13.17);
        let w = flat_top_coupling(&sys);
        for t_ps in [0.05, 0.3, 1.0] {
            let t = ps_to_au(t_ps);
            let p = evolve_impulsive(&sys, &grid, &psi, 0.0, t).unwrap();
            let (one, two) = first_order_terms(&sys, &grid, &psi, 0.0, t).unwrap();
            for (i, &r) in grid.nodes().iter().enumerate() {
                let d = sys.half_difference(r).abs();
                if d < VALIDITY_RATIO * w {
                    continue;
                }
                let err = (p.psi_g[i] - one[i] - two[i]).norm();
                let bound = (w / d).powi(4) * (1.0 + d * t) * psi[i].norm();
                assert!(err <= bound, "R={r} t={t_ps} err={err} bound={bound}");
            }
        }
    }

    #[test]
    fn maxima_of_a_box_state_skip_the_wall_lobe() {
        let grid = RadialGrid::uniform(800, 1.0, 101.0, MU_CS2).unwrap();
        let psi: Vec<Complex64> = grid.nodes().iter().map(|&r| Complex64::new((4.0 * PI * (r - 1.0) / 100.0).sin(), 0.0)).collect();
        let m = envelope_maxima(&grid, &grid.to_dvr(&psi)).unwrap();
        assert_eq!(m.len(), 3, "{m:?}");
        for (got, want) in m.iter().zip([13.5, 38.5, 63.5]) {
            assert!((got - want).abs() < 0.2, "{m:?}");
        }
    }

    #[test]
    fn peaks_carry_both_signs_and_validity() {
        let grid = Arc::new(RadialGrid::uniform(1200, 8.0, 140.0, MU_CS2).unwrap());
        let psi: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&r| Complex64::new((-(r - 31.0).powi(2) / 4.0).exp() + (-(r - 89.0).powi(2) / 4.0).exp(), 0.0))
            .collect();
        let sys = system(13.17);
        let peaks = predict_k_peaks(&sys, &grid, &grid.to_dvr(&psi)).unwrap();
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!(!peaks[0].valid && peaks[1].valid);
        for p in &peaks {
            assert_eq!(p.k_in, -p.k_out);
            assert!(p.k_out > 0.0 && p.amplitude_factor > 0.0 && p.amplitude_factor < 1.0);
        }
        assert!((hartree_to_cm(2.0 * sys.half_difference(89.0)) - 134.8).abs() < 3.0);
    }

    #[test]
    fn decoupled_momentum_band_is_empty() {
        let grid = Arc::new(RadialGrid::uniform(600, 10.0, 130.0, MU_CS2).unwrap());
        let psi = packet(&grid);
        let p = evolve_impulsive(&system(0.0), &grid, &psi, 0.0, ps_to_au(50.0)).unwrap();
        let mom = momentum_of_ia(&p).unwrap();
        let a = mom.abs();
        let top = a.iter().cloned().fold(0.0, f64::max);
        let high = (0..a.len()).filter(|&i| mom.k[i].abs() > 3.0).map(|i| a[i]).fold(0.0, f64::max);
        assert!(high < 1e-8 * top, "{high}");
    }

    proptest! {
        #[test]
        fn local_rotation_is_unitary(w_cm in 0.0f64..50.0, r in 9.0f64..700.0, t_ps in 0.0f64..400.0) {
            let sys = system(w_cm);
            let w = flat_top_coupling(&sys);
            let (g, e) = rotation(&local(&sys, r, w), w, ps_to_au(t_ps));
            prop_assert!((g.norm_sqr() + e.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((e.norm_sqr() - excited_fraction(&sys, r, ps_to_au(t_ps))).abs() < 1e-12);
        }
    }
}
