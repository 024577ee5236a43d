//! Quantities extracted from states: populations, projections, momentum
//! lines, holes, and the thermal molecule-count estimate.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Channel, MomentumAmplitude, RadialGrid, TwoChannelState};
use crate::potentials::CoupledSystem;
use crate::spectrum::LevelSet;
use crate::units::{hartree_to_cm, kinetic_energy, thermal_energy, BOHR_M};

/// (P_g, P_e).
pub fn channel_population(state: &TwoChannelState) -> (f64, f64) {
    (state.channel_norm(Channel::Ground), state.channel_norm(Channel::Excited))
}

/// |⟨χ_v|ψ_channel⟩|² for every level in the set.
pub fn level_projections(state: &TwoChannelState, channel: Channel, levels: &LevelSet) -> Result<BTreeMap<usize, f64>> {
    if !state.grid().same_as(&levels.grid) {
        return Err(Error::GridMismatch);
    }
    let amp = state.amplitudes(channel);
    Ok(levels
        .levels
        .iter()
        .map(|l| {
            let s: Complex64 = l.vector.iter().zip(amp).map(|(c, a)| a * c).sum();
            (l.v, s.norm_sqr())
        })
        .collect())
}

/// sqrt of the mean of |ψ|² over a window of `width` bohr centred on each node.
pub fn moving_rms(grid: &RadialGrid, psi: &[Complex64], width: f64) -> Vec<f64> {
    let r = grid.nodes();
    let w = grid.weights();
    let n = r.len();
    let mut num = vec![0.0; n + 1];
    let mut den = vec![0.0; n + 1];
    for i in 0..n {
        num[i + 1] = num[i] + w[i] * psi[i].norm_sqr();
        den[i + 1] = den[i] + w[i];
    }
    let half = 0.5 * width;
    (0..n)
        .map(|j| {
            let lo = r.partition_point(|&x| x < r[j] - half);
            let hi = r.partition_point(|&x| x <= r[j] + half);
            ((num[hi] - num[lo]) / (den[hi] - den[lo])).sqrt()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentumPeak {
    /// a.u.
    pub k: f64,
    /// ħ²k²/2μ in cm⁻¹.
    pub kinetic_energy: f64,
    /// Full width at half maximum, a.u.
    pub width: f64,
    /// Radius where 2Δ(R) equals the kinetic energy.
    pub inferred_r: Option<f64>,
    pub ambiguous: bool,
    pub amplitude: f64,
}

/// Lines weaker than this fraction of the global maximum are roundoff ripple.
pub const RELATIVE_FLOOR: f64 = 1e-6;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Solve 2Δ(R) = energy on the branch outside the crossing.
pub fn infer_radius(sys: &CoupledSystem, energy: f64) -> (Option<f64>, bool) {
    let Ok(c) = sys.crossing() else {
        return (None, true);
    };
    let hi = sys.working_range.1;
    let f = |r: f64| 2.0 * sys.half_difference(r) - energy;
    let samples = 4000;
    let mut roots = Vec::new();
    let mut prev_r = c.r_c;
    let mut prev = f(prev_r);
    for i in 1..=samples {
        let r = c.r_c + (hi - c.r_c) * i as f64 / samples as f64;
        let v = f(r);
        if prev.signum() != v.signum() {
            let (mut a, mut b) = (prev_r, r);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if f(m).signum() == f(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_r = r;
        prev = v;
    }
    match roots.len() {
        0 => (None, true),
        1 => (Some(roots[0]), false),
        _ => (Some(roots[0]), true),
    }
}

/// Momentum lines of one channel, annotated against `sys` when given.
pub fn find_momentum_peaks(state: &TwoChannelState, channel: Channel, k_floor: f64, sys: Option<&CoupledSystem>) -> Result<Vec<MomentumPeak>> {
    spectrum_peaks(&state.to_momentum(channel), state.grid().mass(), k_floor, sys)
}

/// Local maxima of |Ψ(k)| with |k| ≥ k_floor above median + 5·MAD of that band.
// parabola through f[j-1..=j+1]
pub(crate) fn parabolic_vertex(x: &[f64], f: &[f64], j: usize) -> f64 {
    let (x0, x1, x2) = (x[j - 1], x[j], x[j + 1]);
    let (y0, y1, y2) = (f[j - 1], f[j], f[j + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        x1
    } else {
        (x1 - 0.5 * num / den).clamp(x0, x2)
    }
}

pub fn spectrum_peaks(mom: &MomentumAmplitude, mass: f64, k_floor: f64, sys: Option<&CoupledSystem>) -> Result<Vec<MomentumPeak>> {
    let k_top = mom.k[mom.k.len() - 1];
    if !(k_floor.abs() < k_top) {
        return Err(Error::Domain(format!("k_floor {k_floor} not below the largest grid momentum {k_top}")));
    }
    let a = mom.abs();
    let band: Vec<usize> = (0..a.len()).filter(|&i| mom.k[i].abs() >= k_floor.abs()).collect();
    let mut vals: Vec<f64> = band.iter().map(|&i| a[i]).collect();
    let med = median(&mut vals);
    let mut dev: Vec<f64> = band.iter().map(|&i| (a[i] - med).abs()).collect();
    let mad = median(&mut dev);
    let top = a.iter().cloned().fold(0.0, f64::max);
    let floor = (med + 5.0 * mad).max(RELATIVE_FLOOR * top);
    let mut peaks = Vec::new();
    for &i in &band {
        if i == 0 || i + 1 == a.len() || mom.k[i - 1].abs() < k_floor.abs() || mom.k[i + 1].abs() < k_floor.abs() {
            continue;
        }
        if !(a[i] > floor && a[i] > a[i - 1] && a[i] >= a[i + 1]) {
            continue;
        }
        let half = 0.5 * a[i];
        let cross = |dir: isize| {
            let mut j = i as isize;
            while j + dir >= 0 && ((j + dir) as usize) < a.len() && a[(j + dir) as usize] > half {
                j += dir;
            }
            let (j0, j1) = (j as usize, (j + dir).clamp(0, a.len() as isize - 1) as usize);
            if j0 == j1 || a[j0] == a[j1] {
                return mom.k[j0];
            }
            mom.k[j0] + (mom.k[j1] - mom.k[j0]) * (a[j0] - half) / (a[j0] - a[j1])
        };
        let width = cross(1) - cross(-1);
        let k = parabolic_vertex(&mom.k, &a, i);
        let e = kinetic_energy(k, mass);
        let (inferred_r, ambiguous) = match sys {
            Some(s) => infer_radius(s, e),
            None => (None, true),
        };
        peaks.push(MomentumPeak { k, kinetic_energy: hartree_to_cm(e), width, inferred_r, ambiguous, amplitude: a[i] });
    }
    Ok(peaks)
}

/// Inputs of the thermal average over the collision-energy distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalContext {
    pub temperature_k: f64,
    pub volume_cm3: f64,
    /// Atom number density, cm⁻³.
    pub density_cm3: f64,
    /// Box level spacing at E₀, cm⁻¹.
    pub de_dn_cm: f64,
    pub spin_factor: f64,
}

impl ThermalContext {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.temperature_k, self.volume_cm3, self.density_cm3, self.de_dn_cm];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Domain("thermal context entries must be positive".into()));
        }
        if !(self.spin_factor > 0.0 && self.spin_factor <= 1.0) {
            return Err(Error::Domain(format!("spin factor {} outside (0, 1]", self.spin_factor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalResult {
    /// P·k_BT/(dE/dn).
    pub zp: f64,
    /// Translational partition function (2πμk_BT)^{3/2}V/h³.
    pub z: f64,
    pub p_t: f64,
    pub n_atoms: f64,
    pub n_mol: f64,
}

pub fn thermal_chain(p: f64, ctx: &ThermalContext, mass: f64) -> Result<ThermalResult> {
    ctx.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let kt_cm = hartree_to_cm(thermal_energy(ctx.temperature_k));
    let zp = p * kt_cm / ctx.de_dn_cm;
    let bohr_cm = BOHR_M * 100.0;
    let volume = ctx.volume_cm3 / bohr_cm.powi(3);
    let z = (mass * thermal_energy(ctx.temperature_k) / (2.0 * std::f64::consts::PI)).powf(1.5) * volume;
    let p_t = zp / z;
    let n_atoms = ctx.density_cm3 * ctx.volume_cm3;
    Ok(ThermalResult { zp, z, p_t, n_atoms, n_mol: 0.5 * n_atoms * n_atoms * p_t * ctx.spin_factor })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hole {
    /// 1 − min(|Ψ_final|/|Ψ_initial|) over the interval.
    pub depth: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Largest interval inside `window` where the smoothed final amplitude falls
/// below (1 − threshold) of the smoothed initial amplitude.
pub fn detect_hole(final_state: &TwoChannelState, initial: &TwoChannelState, channel: Channel, window: (f64, f64), threshold: f64) -> Result<Option<Hole>> {
    if !final_state.grid().same_as(initial.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = final_state.grid();
    let ef = moving_rms(grid, &final_state.wavefunction(channel), 2.0);
    let ei = moving_rms(grid, &initial.wavefunction(channel), 2.0);
    let scale = ei.iter().cloned().fold(0.0, f64::max);
    let r = grid.nodes();
    let mut best: Option<(usize, usize)> = None;
    let mut start: Option<usize> = None;
    let in_hole = |j: usize| r[j] >= window.0 && r[j] <= window.1 && ei[j] > 1e-3 * scale && ef[j] < (1.0 - threshold) * ei[j];
    for j in 0..=r.len() {
        if j < r.len() && in_hole(j) {
            start.get_or_insert(j);
            continue;
        }
        if let Some(s) = start.take() {
            let e = j - 1;
            if best.is_none_or(|(a, b)| r[e] - r[s] > r[b] - r[a]) {
                best = Some((s, e));
            }
        }
    }
    Ok(best.map(|(s, e)| {
        let min_ratio = (s..=e).map(|j| ef[j] / ei[j]).fold(f64::INFINITY, f64::min);
        Hole { depth: 1.0 - min_ratio, r_lo: r[s], r_hi: r[e] }
    }))
}
