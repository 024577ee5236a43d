//! Chebyshev propagation of the coupled two-channel state with a
//! piecewise-frozen pulse envelope.

mod bessel;

pub use bessel::bessel_j_sequence;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Channel, KineticWorkspace, RadialGrid, TwoChannelState};
use crate::potentials::{CoupledSystem, PulseEnvelope};
use crate::units::{au_to_ps, ps_to_au};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// ‖φ_n‖ may not exceed this multiple of ‖ψ‖ inside the spectral range.
const GROWTH_LIMIT: f64 = 4.0;

/// Discretized two-channel Hamiltonian: diagonal potentials plus W·f(t)
/// coupling, sharing one kinetic operator.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Arc<RadialGrid>,
    v_g: Vec<f64>,
    v_e: Vec<f64>,
    coupling: f64,
    envelope: PulseEnvelope,
}

/// Scratch buffers for one propagation.
#[derive(Debug, Clone)]
pub struct Workspace {
    kin: [KineticWorkspace; 2],
    prev: [Vec<Complex64>; 2],
    cur: [Vec<Complex64>; 2],
    next: [Vec<Complex64>; 2],
    acc: [Vec<Complex64>; 2],
}

/// Chebyshev expansion of exp(−iH dt) over a fixed spectral interval.
#[derive(Debug, Clone)]
pub struct ChebyshevSeries {
    pub dt: f64,
    pub bounds: (f64, f64),
    pub coefficients: Vec<Complex64>,
}

impl ChebyshevSeries {
    pub fn new(dt: f64, bounds: (f64, f64), tolerance: f64) -> Self {
        let half = 0.5 * (bounds.1 - bounds.0);
        let alpha = half * dt;
        let cap = (10.0 * alpha.abs() + 100.0) as usize;
        let j = bessel_j_sequence(alpha.abs(), cap);
        let sign: f64 = if alpha < 0.0 { -1.0 } else { 1.0 };
        let mut last = 0;
        for (n, v) in j.iter().enumerate() {
            if 2.0 * v.abs() >= tolerance {
                last = n;
            }
        }
        let mut minus_i_pow = Complex64::new(1.0, 0.0);
        let coefficients = (0..=last.min(cap))
            .map(|n| {
                let weight = if n == 0 { 1.0 } else { 2.0 };
                let c = minus_i_pow * weight * j[n] * sign.powi(n as i32);
                minus_i_pow *= Complex64::new(0.0, -1.0);
                c
            })
            .collect();
        ChebyshevSeries { dt, bounds, coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

impl Hamiltonian {
    /// Samples both dressed curves on the grid, capping them at `ceiling` (hartree).
    pub fn new(sys: &CoupledSystem, grid: Arc<RadialGrid>, ceiling: Option<f64>) -> Self {
        let cap = |v: f64| ceiling.map_or(v, |c| v.min(c));
        let v_g = grid.sample(|r| cap(sys.ground.value(r)));
        let v_e = grid.sample(|r| cap(sys.excited.value(r)));
        Hamiltonian { grid, v_g, v_e, coupling: sys.coupling, envelope: sys.envelope.clone() }
    }

    pub fn from_parts(grid: Arc<RadialGrid>, v_g: Vec<f64>, v_e: Vec<f64>, coupling: f64, envelope: PulseEnvelope) -> Result<Self> {
        for v in [&v_g, &v_e] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), got: v.len() });
            }
        }
        Ok(Hamiltonian { grid, v_g, v_e, coupling, envelope })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn envelope(&self) -> &PulseEnvelope {
        &self.envelope
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn potential(&self, channel: Channel) -> &[f64] {
        match channel {
            Channel::Ground => &self.v_g,
            Channel::Excited => &self.v_e,
        }
    }

    /// Copy with the channel roles exchanged.
    pub fn swapped(&self) -> Self {
        Hamiltonian { v_g: self.v_e.clone(), v_e: self.v_g.clone(), ..self.clone() }
    }

    pub fn workspace(&self) -> Workspace {
        let n = self.grid.len();
        let z = || [vec![ZERO; n], vec![ZERO; n]];
        Workspace { kin: [self.grid.workspace(), self.grid.workspace()], prev: z(), cur: z(), next: z(), acc: z() }
    }

    /// Interval enclosing the spectrum of H for envelope values up to `f_max`,
    /// widened by `margin` of its width on both sides.
    pub fn spectral_bounds(&self, f_max: f64, margin: f64) -> (f64, f64) {
        let (lo, hi) = self.v_g.iter().chain(&self.v_e).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let w = self.coupling.abs() * f_max;
        let (e_min, e_max) = (lo - w, hi + w + self.grid.kinetic_bound());
        let pad = margin * (e_max - e_min);
        (e_min - pad, e_max + pad)
    }

    /// out = (H(f) − shift)·scale applied to the pair (g, e).
    #[allow(clippy::too_many_arguments)]
    fn apply_scaled(
        &self,
        f: f64,
        g: &[Complex64],
        e: &[Complex64],
        out_g: &mut [Complex64],
        out_e: &mut [Complex64],
        kin: &mut [KineticWorkspace; 2],
        shift: f64,
        scale: f64,
    ) {
        let [kg, ke] = kin;
        let w = self.coupling * f;
        let grid = &self.grid;
        rayon::join(
            || {
                grid.apply_kinetic_into(g, out_g, kg);
                for i in 0..g.len() {
                    out_g[i] = (out_g[i] + g[i] * (self.v_g[i] - shift) + e[i] * w) * scale;
                }
            },
            || {
                grid.apply_kinetic_into(e, out_e, ke);
                for i in 0..e.len() {
                    out_e[i] = (out_e[i] + e[i] * (self.v_e[i] - shift) + g[i] * w) * scale;
                }
            },
        );
    }

    /// H(f)·ψ.
    pub fn apply(&self, f: f64, state: &TwoChannelState) -> Result<TwoChannelState> {
        if !self.grid.same_as(state.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut ws = self.workspace();
        let n = self.grid.len();
        let (mut og, mut oe) = (vec![ZERO; n], vec![ZERO; n]);
        self.apply_scaled(f, state.amplitudes(Channel::Ground), state.amplitudes(Channel::Excited), &mut og, &mut oe, &mut ws.kin, 0.0, 1.0);
        TwoChannelState::new(self.grid.clone(), state.t, og, oe)
    }

    /// ⟨ψ|H(f)|ψ⟩.
    pub fn expectation(&self, f: f64, state: &TwoChannelState) -> Result<Complex64> {
        state.inner(&self.apply(f, state)?)
    }

    /// ψ ← exp(−iH(f)·dt)ψ with the series built for this dt.
    pub fn step(&self, state: &mut TwoChannelState, f: f64, series: &ChebyshevSeries, ws: &mut Workspace) -> Result<()> {
        if f.abs() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("envelope value {f} outside [0, 1]")));
        }
        let (lo, hi) = series.bounds;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let a = &series.coefficients;
        let Workspace { kin, prev, cur, next, acc } = ws;
        {
            let (g, e) = state.split_mut();
            prev[0].copy_from_slice(g);
            prev[1].copy_from_slice(e);
        }
        let norm0: f64 = prev.iter().flat_map(|v| v.iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for c in 0..2 {
            for (o, p) in acc[c].iter_mut().zip(&prev[c]) {
                *o = a[0] * p;
            }
        }
        if a.len() > 1 {
            let (c0, c1) = cur.split_at_mut(1);
            self.apply_scaled(f, &prev[0], &prev[1], &mut c0[0], &mut c1[0], kin, mid, 1.0 / half);
            for c in 0..2 {
                for (o, p) in acc[c].iter_mut().zip(&cur[c]) {
                    *o += a[1] * p;
                }
            }
        }
        for coeff in a.iter().skip(2) {
            {
                let (n0, n1) = next.split_at_mut(1);
                self.apply_scaled(f, &cur[0], &cur[1], &mut n0[0], &mut n1[0], kin, mid, 2.0 / half);
            }
            let mut norm = 0.0;
            for c in 0..2 {
                for i in 0..next[c].len() {
                    let v = next[c][i] - prev[c][i];
                    next[c][i] = v;
                    norm += v.norm_sqr();
                    acc[c][i] += coeff * v;
                }
            }
            let growth = norm.sqrt() / norm0.max(f64::MIN_POSITIVE);
            if !(growth <= GROWTH_LIMIT) {
                return Err(Error::SpectralRange { growth });
            }
            std::mem::swap(prev, cur);
            std::mem::swap(cur, next);
        }
        let phase = Complex64::from_polar(1.0, -mid * series.dt);
        let (g, e) = state.split_mut();
        for (o, v) in g.iter_mut().zip(&acc[0]) {
            *o = phase * v;
        }
        for (o, v) in e.iter_mut().zip(&acc[1]) {
            *o = phase * v;
        }
        state.t += series.dt;
        Ok(())
    }

    /// One exact-to-tolerance step with frozen envelope value `f`; `dt` may be negative.
    pub fn evolve_frozen(&self, state: &mut TwoChannelState, f: f64, dt: f64, tolerance: f64) -> Result<()> {
        let series = ChebyshevSeries::new(dt, self.spectral_bounds(f.abs(), 0.05), tolerance);
        self.step(state, f, &series, &mut self.workspace())
    }
}

/// Outer-step layout of a propagation; times in atomic units.
#[derive(Debug, Clone, Serialize)]
pub struct PropagationPlan {
    /// Step used where the envelope varies.
    pub dt_ramp: f64,
    /// Step used where the envelope is constant.
    pub dt_flat: f64,
    pub cheb_tolerance: f64,
    /// Relative widening of the spectral interval.
    pub margin: f64,
    pub snapshot_times: Vec<f64>,
}

impl PropagationPlan {
    /// 0.01 ps on ramps, 0.5 ps on plateaus, tolerance 1e-14.
    pub fn new(snapshot_times_ps: &[f64]) -> Self {
        PropagationPlan {
            dt_ramp: ps_to_au(0.01),
            dt_flat: ps_to_au(0.5),
            cheb_tolerance: 1e-14,
            margin: 0.05,
            snapshot_times: snapshot_times_ps.iter().map(|&t| ps_to_au(t)).collect(),
        }
    }

    pub fn validate(&self, envelope: &PulseEnvelope) -> Result<()> {
        if !(self.cheb_tolerance > 0.0 && self.cheb_tolerance <= 1e-6) {
            return Err(Error::Domain(format!("Chebyshev tolerance {} outside (0, 1e-6]", self.cheb_tolerance)));
        }
        if !(self.dt_ramp > 0.0 && self.dt_flat > 0.0) {
            return Err(Error::Domain("time steps must be positive".into()));
        }
        if !(self.margin >= 0.05) {
            return Err(Error::Domain(format!("spectral margin {} below 5%", self.margin)));
        }
        let (t0, t1) = envelope.span();
        if let Some(t) = self.snapshot_times.iter().find(|&&t| t < t0 - 1e-9 || t > t1 + 1e-9) {
            return Err(Error::Domain(format!("snapshot at {} ps outside the pulse span", au_to_ps(*t))));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PopulationSample {
    /// ps
    pub t: f64,
    pub ground: f64,
    pub excited: f64,
}

#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub snapshots: Vec<TwoChannelState>,
    pub populations: Vec<PopulationSample>,
    pub steps: usize,
    /// Largest |norm − initial norm| seen after any step.
    pub max_norm_drift: f64,
}

impl TimeSeries {
    pub fn final_state(&self) -> Option<&TwoChannelState> {
        self.snapshots.last()
    }
}

fn population(state: &TwoChannelState) -> PopulationSample {
    PopulationSample { t: au_to_ps(state.t), ground: state.channel_norm(Channel::Ground), excited: state.channel_norm(Channel::Excited) }
}

/// Sub-interval of the pulse with one step size and one spectral interval.
#[derive(Debug, Clone, Copy)]
struct Stretch {
    t0: f64,
    t1: f64,
    constant: bool,
    f_max: f64,
}

fn stretches(envelope: &PulseEnvelope, snapshots: &[f64]) -> Vec<Stretch> {
    let mut out = Vec::new();
    for s in envelope.segments() {
        let mut cuts = vec![s.t_start];
        cuts.extend(snapshots.iter().copied().filter(|&t| t > s.t_start && t < s.t_end));
        cuts.push(s.t_end);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                out.push(Stretch { t0: w[0], t1: w[1], constant: s.is_constant(), f_max: s.max_value() });
            }
        }
    }
    out
}

/// Runs the state through the whole pulse span, recording snapshots at the
/// plan's times (the final state is always recorded last).
pub fn propagate(ham: &Hamiltonian, plan: &PropagationPlan, initial: &TwoChannelState) -> Result<TimeSeries> {
    plan.validate(&ham.envelope)?;
    if !ham.grid.same_as(initial.grid()) {
        return Err(Error::GridMismatch);
    }
    let env = &ham.envelope;
    let (t_start, _) = env.span();
    let mut state = initial.clone();
    state.t = t_start;
    let norm0 = state.norm();
    let mut snaps: Vec<f64> = plan.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    let mut snapshots = Vec::new();
    let mut next_snap = 0;
    while next_snap < snaps.len() && snaps[next_snap] <= t_start + 1e-9 {
        snapshots.push(state.clone());
        next_snap += 1;
    }
    let mut populations = vec![population(&state)];
    let mut ws = ham.workspace();
    let mut steps = 0;
    let mut max_drift: f64 = 0.0;
    for st in stretches(env, &snaps) {
        let dt_target = if st.constant { plan.dt_flat } else { plan.dt_ramp };
        let n = ((st.t1 - st.t0) / dt_target).ceil().max(1.0) as usize;
        let dt = (st.t1 - st.t0) / n as f64;
        let series = ChebyshevSeries::new(dt, ham.spectral_bounds(st.f_max, plan.margin), plan.cheb_tolerance);
        for i in 0..n {
            let t = st.t0 + i as f64 * dt;
            let f = env.value(t + 0.5 * dt);
            ham.step(&mut state, f, &series, &mut ws).map_err(|e| Error::Step { t_ps: au_to_ps(t), source: Box::new(e) })?;
            state.t = if i + 1 == n { st.t1 } else { st.t0 + (i + 1) as f64 * dt };
            steps += 1;
            max_drift = max_drift.max((state.norm() - norm0).abs());
            populations.push(population(&state));
        }
        while next_snap < snaps.len() && snaps[next_snap] <= st.t1 + 1e-9 {
            snapshots.push(state.clone());
            next_snap += 1;
        }
    }
    let last_recorded = snapshots.last().map(|s| s.t);
    if last_recorded != Some(state.t) {
        snapshots.push(state);
    }
    Ok(TimeSeries { snapshots, populations, steps, max_norm_drift: max_drift })
}
