//! Sine-DVR grids, optionally mapped onto a non-uniform radial coordinate,
//! with the matching kinetic operator and a momentum representation.

mod momentum;
mod state;
mod transforms;

pub use momentum::MomentumAmplitude;
pub use state::{Channel, TwoChannelState};

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use transforms::{Trig, TrigBuffers};

const SIMPSON_INTERVALS: usize = 20_000;
const MAP_SUBSTEPS: usize = 4;

/// Radial coordinate mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Mapping {
    Uniform,
    /// Local spacing follows β·π/k(R) with k(R) = √(2μ(E_env − V_env(R))).
    /// `ke_floor` (hartree) keeps k finite in forbidden regions.
    Adaptive { e_env: f64, beta: f64, ke_floor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Kinetic transforms run at length 2(n+1); an n+1 with small prime
    /// factors is several times faster than a prime one.
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub mass: f64,
    pub mapping: Mapping,
    /// Momentum that a uniform grid must resolve, if any.
    pub k_required: Option<f64>,
}

/// Sampled R(x) together with dR/dx for Hermite interpolation.
#[derive(Debug, Clone)]
struct MapTrace {
    r: Vec<f64>,
    j: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    n: usize,
    r_min: f64,
    r_max: f64,
    mass: f64,
    mapping: Mapping,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// dR/dx on the full lattice x = 0..=n+1.
    jac_lattice: Vec<f64>,
    /// Trapezoid weight over Jacobian on the lattice.
    omega: Vec<f64>,
    inv_sqrt_w: Vec<f64>,
    k_max: f64,
    trace: Option<MapTrace>,
    trig: Trig,
}

/// Per-thread scratch for [`RadialGrid::apply_kinetic_into`].
#[derive(Debug, Clone)]
pub struct KineticWorkspace {
    a: Vec<Complex64>,
    lattice: Vec<Complex64>,
    bufs: TrigBuffers,
}

fn smooth_max(a: f64, floor: f64) -> f64 {
    0.5 * (a + floor + ((a - floor).powi(2) + 0.25 * floor * floor).sqrt())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

impl RadialGrid {
    pub fn uniform(n: usize, r_min: f64, r_max: f64, mass: f64) -> Result<Self> {
        Self::build(&GridSpec { n, r_min, r_max, mass, mapping: Mapping::Uniform, k_required: None }, &|_| 0.0)
    }

    /// Build a grid; `v_env` is the enveloping potential used by adaptive
    /// mappings and ignored otherwise.
    pub fn build(spec: &GridSpec, v_env: &dyn Fn(f64) -> f64) -> Result<Self> {
        let &GridSpec { n, r_min, r_max, mass, mapping, k_required } = spec;
        if n < 16 {
            return Err(Error::Domain(format!("grid needs N >= 16, got {n}")));
        }
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::Domain(format!("grid range must satisfy 0 < R_min < R_max, got [{r_min}, {r_max}]")));
        }
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        let n1 = n + 1;
        let len = r_max - r_min;
        let (jac_lattice, trace) = match mapping {
            Mapping::Uniform => {
                if let Some(k) = k_required {
                    let required = ((len * k / PI).ceil() as usize).saturating_sub(1);
                    if n < required {
                        return Err(Error::Capacity { required, given: n });
                    }
                }
                (vec![len / n1 as f64; n1 + 1], None)
            }
            Mapping::Adaptive { e_env, beta, ke_floor } => {
                if !(beta > 0.0 && beta <= 1.0) {
                    return Err(Error::Domain(format!("mapping beta must lie in (0, 1], got {beta}")));
                }
                if !(ke_floor > 0.0) {
                    return Err(Error::Domain(format!("mapping ke_floor must be positive, got {ke_floor}")));
                }
                let k_eff = |r: f64| (2.0 * mass * smooth_max(e_env - v_env(r), ke_floor)).sqrt();
                let xi = simpson(k_eff, r_min, r_max, SIMPSON_INTERVALS);
                let required = ((xi / (beta * PI)).ceil() as usize).saturating_sub(1);
                if n < required {
                    return Err(Error::Capacity { required, given: n });
                }
                let trace = integrate_map(&k_eff, xi, n1, r_min, r_max);
                let jac = (0..=n1).map(|q| trace.j[q * MAP_SUBSTEPS]).collect();
                (jac, Some(trace))
            }
        };
        let nodes: Vec<f64> = match &trace {
            None => (1..=n).map(|j| r_min + j as f64 * len / n1 as f64).collect(),
            Some(t) => (1..=n).map(|j| t.r[j * MAP_SUBSTEPS]).collect(),
        };
        Ok(Self::assemble(n, r_min, r_max, mass, mapping, nodes, jac_lattice, trace))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        n: usize,
        r_min: f64,
        r_max: f64,
        mass: f64,
        mapping: Mapping,
        nodes: Vec<f64>,
        jac_lattice: Vec<f64>,
        trace: Option<MapTrace>,
    ) -> RadialGrid {
        let n1 = n + 1;
        let weights: Vec<f64> = jac_lattice[1..=n].to_vec();
        let omega = (0..=n1)
            .map(|q| if q == 0 || q == n1 { 0.5 } else { 1.0 } / jac_lattice[q])
            .collect();
        let inv_sqrt_w = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        let k_max = PI / weights.iter().cloned().fold(f64::INFINITY, f64::min);
        RadialGrid {
            n,
            r_min,
            r_max,
            mass,
            mapping,
            nodes,
            weights,
            jac_lattice,
            omega,
            inv_sqrt_w,
            k_max,
            trace,
            trig: Trig::new(n1),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn box_length(&self) -> f64 {
        self.r_max - self.r_min
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Same nodes and weights with another reduced mass.
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        Ok(RadialGrid { mass, ..self.clone() })
    }

    pub fn mapping(&self) -> Mapping {
        self.mapping
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights; equal to the Jacobian dR/dx at the nodes.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest momentum the finest local spacing supports, π/min ΔR.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// Local momentum cutoff π/ΔR at node `j`.
    pub fn local_k_max(&self, j: usize) -> f64 {
        PI / self.weights[j]
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.n == other.n && self.mass == other.mass && self.nodes == other.nodes && self.weights == other.weights)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// Mapped coordinate x ∈ [0, n+1] of a radius.
    pub fn x_of_r(&self, r: f64) -> f64 {
        let n1 = (self.n + 1) as f64;
        let Some(t) = &self.trace else {
            return (r - self.r_min) / (self.r_max - self.r_min) * n1;
        };
        let r = r.clamp(self.r_min, self.r_max);
        let i = t.r.partition_point(|&ri| ri <= r).clamp(1, t.r.len() - 1) - 1;
        let h = 1.0 / MAP_SUBSTEPS as f64;
        let (r0, r1, j0, j1) = (t.r[i], t.r[i + 1], t.j[i], t.j[i + 1]);
        let hermite = |s: f64| {
            let (s2, s3) = (s * s, s * s * s);
            let val = (2.0 * s3 - 3.0 * s2 + 1.0) * r0 + (s3 - 2.0 * s2 + s) * h * j0 + (-2.0 * s3 + 3.0 * s2) * r1 + (s3 - s2) * h * j1;
            let der = ((6.0 * s2 - 6.0 * s) * r0 + (3.0 * s2 - 4.0 * s + 1.0) * h * j0 + (-6.0 * s2 + 6.0 * s) * r1 + (3.0 * s2 - 2.0 * s) * h * j1) / h;
            (val, der)
        };
        let mut s = ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
        for _ in 0..30 {
            let (val, der) = hermite(s);
            let next = (s - (val - r) / (der * h)).clamp(0.0, 1.0);
            if (next - s).abs() < 1e-15 {
                s = next;
                break;
            }
            s = next;
        }
        (i as f64 + s) * h
    }

    /// The same mapping sampled with 2N+1 points; every original node is kept.
    pub fn refined(&self) -> RadialGrid {
        let n = 2 * self.n + 1;
        let n1 = n + 1;
        let trace = self.trace.as_ref().map(|t| {
            let h = 1.0 / MAP_SUBSTEPS as f64;
            let steps = n1 * MAP_SUBSTEPS;
            let mut r = Vec::with_capacity(steps + 1);
            let mut j = Vec::with_capacity(steps + 1);
            for i in 0..=steps {
                let x = 0.5 * i as f64 * h;
                let k = ((x / h).floor() as usize).min(t.r.len() - 2);
                let s = x / h - k as f64;
                let (s2, s3) = (s * s, s * s * s);
                let (r0, r1, j0, j1) = (t.r[k], t.r[k + 1], t.j[k], t.j[k + 1]);
                r.push((2.0 * s3 - 3.0 * s2 + 1.0) * r0 + (s3 - 2.0 * s2 + s) * h * j0 + (-2.0 * s3 + 3.0 * s2) * r1 + (s3 - s2) * h * j1);
                let der = ((6.0 * s2 - 6.0 * s) * r0 + (3.0 * s2 - 4.0 * s + 1.0) * h * j0 + (-6.0 * s2 + 6.0 * s) * r1 + (3.0 * s2 - 2.0 * s) * h * j1) / h;
                j.push(0.5 * der);
            }
            for (i, (ri, ji)) in r.iter_mut().zip(j.iter_mut()).enumerate() {
                // exact values wherever the coarse trace has a sample
                if i % 2 == 0 {
                    *ri = t.r[i / 2];
                    *ji = 0.5 * t.j[i / 2];
                }
            }
            MapTrace { r, j }
        });
        let len = self.box_length();
        let jac_lattice: Vec<f64> = match &trace {
            None => vec![len / n1 as f64; n1 + 1],
            Some(t) => (0..=n1).map(|q| t.j[q * MAP_SUBSTEPS]).collect(),
        };
        let nodes: Vec<f64> = match &trace {
            None => (1..=n).map(|j| self.r_min + j as f64 * len / n1 as f64).collect(),
            Some(t) => (1..=n).map(|j| t.r[j * MAP_SUBSTEPS]).collect(),
        };
        Self::assemble(n, self.r_min, self.r_max, self.mass, self.mapping, nodes, jac_lattice, trace)
    }

    pub fn workspace(&self) -> KineticWorkspace {
        let zero = Complex64::new(0.0, 0.0);
        KineticWorkspace { a: vec![zero; self.n], lattice: vec![zero; self.n + 2], bufs: self.trig.buffers() }
    }

    /// Sine coefficients c_k of ψ(R(x)) = Σ c_k sin(kπx/(n+1)) from a DVR vector.
    pub(crate) fn sine_coefficients(&self, v: &[Complex64], out: &mut [Complex64], ws: &mut KineticWorkspace) {
        let scale = 2.0 / (self.n + 1) as f64;
        for (a, (x, s)) in ws.a.iter_mut().zip(v.iter().zip(&self.inv_sqrt_w)) {
            *a = x * s;
        }
        self.trig.dst1(&ws.a, out, &mut ws.bufs);
        for c in out.iter_mut() {
            *c *= scale;
        }
    }

    /// `out = T̂ v` for a DVR vector `v` (amplitudes scaled by √w).
    pub fn apply_kinetic_into(&self, v: &[Complex64], out: &mut [Complex64], ws: &mut KineticWorkspace) {
        let n1 = self.n + 1;
        let dk = PI / n1 as f64;
        self.sine_coefficients(v, out, ws);
        for (k, c) in out.iter_mut().enumerate() {
            *c *= dk * (k + 1) as f64;
        }
        self.trig.cos_eval(out, &mut ws.lattice, &mut ws.bufs);
        for (y, o) in ws.lattice.iter_mut().zip(&self.omega) {
            *y *= *o;
        }
        self.trig.cos_eval_t(&ws.lattice, &mut ws.a, &mut ws.bufs);
        for (k, c) in ws.a.iter_mut().enumerate() {
            *c *= dk * (k + 1) as f64;
        }
        self.trig.dst1(&ws.a, out, &mut ws.bufs);
        let scale = 2.0 / n1 as f64 / (2.0 * self.mass);
        for (o, s) in out.iter_mut().zip(&self.inv_sqrt_w) {
            *o *= scale * s;
        }
    }

    pub fn apply_kinetic(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: v.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        self.apply_kinetic_into(v, &mut out, &mut self.workspace());
        Ok(out)
    }

    /// Dense symmetric kinetic matrix in the DVR basis.
    pub fn kinetic_matrix(&self) -> Mat<f64> {
        let n = self.n;
        let mut m = Mat::<f64>::zeros(n, n);
        let mut ws = self.workspace();
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply_kinetic_into(&e, &mut col, &mut ws);
            for i in 0..n {
                m[(i, j)] = col[i].re;
            }
            e[j] = Complex64::new(0.0, 0.0);
        }
        for j in 0..n {
            for i in 0..j {
                let s = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        m
    }

    /// Upper bound on the kinetic spectrum.
    pub fn kinetic_bound(&self) -> f64 {
        let n1 = (self.n + 1) as f64;
        let kk = self.n as f64 * PI / n1;
        let jq = self.jac_lattice.iter().cloned().fold(f64::INFINITY, f64::min);
        let jw = self.weights.iter().cloned().fold(f64::INFINITY, f64::min);
        kk * kk / (2.0 * self.mass * jq * jw)
    }

    /// Weighted inner product Σ conj(a)·b of two DVR vectors.
    pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    /// Converts wavefunction values ψ(R_j) into DVR amplitudes.
    pub fn to_dvr(&self, psi: &[Complex64]) -> Vec<Complex64> {
        psi.iter().zip(&self.weights).map(|(p, w)| p * w.sqrt()).collect()
    }

    pub fn from_dvr(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(&self.inv_sqrt_w).map(|(p, s)| p * s).collect()
    }

    pub fn to_dvr_real(&self, psi: &[f64]) -> Vec<f64> {
        psi.iter().zip(&self.weights).map(|(p, w)| p * w.sqrt()).collect()
    }

    pub fn from_dvr_real(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.inv_sqrt_w).map(|(p, s)| p * s).collect()
    }
}

/// RK4 integration of dR/dx = Ξ/(n1·k(R)), rescaled to end exactly at r_max.
fn integrate_map(k_eff: &dyn Fn(f64) -> f64, xi: f64, n1: usize, r_min: f64, r_max: f64) -> MapTrace {
    let steps = n1 * MAP_SUBSTEPS;
    let h = 1.0 / MAP_SUBSTEPS as f64;
    let c = xi / n1 as f64;
    let rhs = |r: f64| c / k_eff(r);
    let mut r = vec![r_min; steps + 1];
    let mut j = vec![rhs(r_min); steps + 1];
    for i in 0..steps {
        let y = r[i];
        let k1 = j[i];
        let k2 = rhs(y + 0.5 * h * k1);
        let k3 = rhs(y + 0.5 * h * k2);
        let k4 = rhs(y + h * k3);
        r[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        j[i + 1] = rhs(r[i + 1]);
    }
    let lambda = (r_max - r_min) / (r[steps] - r_min);
    for (ri, ji) in r.iter_mut().zip(j.iter_mut()) {
        *ri = r_min + (*ri - r_min) * lambda;
        *ji *= lambda;
    }
    r[steps] = r_max;
    MapTrace { r, j }
}
