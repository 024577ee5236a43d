//! Stationary states of one channel on a grid, and the characteristic times
//! built from level energies.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::potentials::Curve;

/// Eigenvalues and DVR eigenvectors of T̂ + V, ascending.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub energies: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl Diagonalization {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.vectors.nrows()).map(|r| self.vectors[(r, i)]).collect();
        fix_sign(&mut v);
        v
    }
}

/// Makes the innermost significant lobe positive.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn hamiltonian_matrix(potential: &[f64], grid: &RadialGrid) -> Result<Mat<f64>> {
    if potential.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: potential.len() });
    }
    let mut h = grid.kinetic_matrix();
    for (i, v) in potential.iter().enumerate() {
        h[(i, i)] += v;
    }
    Ok(h)
}

pub fn diagonalize(potential: &[f64], grid: &RadialGrid) -> Result<Diagonalization> {
    let h = hamiltonian_matrix(potential, grid)?;
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let energies: Vec<f64> = (0..grid.len()).map(|i| s[i]).collect();
    if energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Eigen("eigenvalues returned out of order".into()));
    }
    Ok(Diagonalization { energies, vectors: evd.U().to_owned() })
}

#[derive(Debug, Clone, Serialize)]
pub struct Level {
    /// Index in the full grid spectrum, counted from the lowest state.
    pub v: usize,
    /// Hartree.
    pub energy: f64,
    /// ⟨ħ²/(2μR²)⟩ in hartree.
    pub b_v: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LevelSet {
    pub label: String,
    pub levels: Vec<Level>,
    /// Asymptote of the curve, hartree.
    pub dissociation: f64,
    pub grid: Arc<RadialGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Compare against a 2N+1 grid; fail when levels move by more than `tolerance`
    /// relative to their height above the potential minimum.
    pub resolution_check: bool,
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { resolution_check: true, tolerance: 1e-6 }
    }
}

fn b_constant(grid: &RadialGrid, v: &[f64]) -> f64 {
    let m2 = 2.0 * grid.mass();
    v.iter().zip(grid.nodes()).map(|(x, r)| x * x / (m2 * r * r)).sum()
}

/// All eigenpairs of `curve` on `grid` with energies (hartree) inside `window`.
pub fn solve_levels(label: &str, curve: &Curve, grid: &Arc<RadialGrid>, window: (f64, f64), opts: SolveOptions) -> Result<LevelSet> {
    let pot = grid.sample(|r| curve.value(r));
    let diag = diagonalize(&pot, grid)?;
    let idx: Vec<usize> = (0..grid.len()).filter(|&i| diag.energies[i] >= window.0 && diag.energies[i] <= window.1).collect();
    if idx.is_empty() {
        return Err(Error::Domain(format!(
            "no eigenvalue in [{:.6e}, {:.6e}] hartree (spectrum spans [{:.6e}, {:.6e}])",
            window.0,
            window.1,
            diag.energies[0],
            diag.energies[grid.len() - 1]
        )));
    }
    if opts.resolution_check {
        let fine = grid.refined();
        let fine_pot = fine.sample(|r| curve.value(r));
        let fine_e = fine_pot_energies(&fine_pot, &fine)?;
        let v_min = pot.iter().chain(&fine_pot).cloned().fold(f64::INFINITY, f64::min);
        let drift = idx.iter().map(|&i| (diag.energies[i] - fine_e[i]).abs() / (diag.energies[i] - v_min).max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
        if drift > opts.tolerance {
            return Err(Error::Resolution { drift, tolerance: opts.tolerance });
        }
    }
    let levels = idx
        .into_iter()
        .map(|i| {
            let vector = diag.vector(i);
            Level { v: i, energy: diag.energies[i], b_v: b_constant(grid, &vector), vector }
        })
        .collect();
    Ok(LevelSet { label: label.to_string(), levels, dissociation: curve.asymptote(), grid: grid.clone() })
}

fn fine_pot_energies(pot: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let h = hamiltonian_matrix(pot, grid)?;
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))
}

impl LevelSet {
    pub fn get(&self, v: usize) -> Result<&Level> {
        self.levels.iter().find(|l| l.v == v).ok_or(Error::MissingLevel(v))
    }

    /// Levels below the dissociation limit.
    pub fn bound(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(move |l| l.energy < self.dissociation)
    }

    /// ⟨χ_v | χ_w'⟩ between two level sets on the same grid.
    pub fn overlap(&self, v: usize, other: &LevelSet, w: usize) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let (a, b) = (self.get(v)?, other.get(w)?);
        Ok(a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum())
    }

    /// Number of sign changes of ψ_v sampled at four points per grid cell.
    pub fn node_count(&self, v: usize) -> Result<usize> {
        let level = self.get(v)?;
        let g = &self.grid;
        let c: Vec<num_complex::Complex64> = level.vector.iter().map(|&x| x.into()).collect();
        let m = 4 * (g.len() + 1);
        let radii: Vec<f64> = {
            let mut out = Vec::with_capacity(m);
            let nodes = g.nodes();
            let mut prev = g.r_min();
            for &r in nodes.iter().chain(std::iter::once(&g.r_max())) {
                for s in 1..=4 {
                    out.push(prev + (r - prev) * s as f64 / 4.0);
                }
                prev = r;
            }
            out.pop();
            out
        };
        let psi: Vec<f64> = g.interpolate(&c, &radii)?.iter().map(|z| z.re).collect();
        let max = psi.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut count = 0;
        let mut last = 0.0;
        for &p in &psi {
            if p.abs() < 1e-6 * max {
                continue;
            }
            if last != 0.0 && p.signum() != last {
                count += 1;
            }
            last = p.signum();
        }
        Ok(count)
    }

    /// 2π/|E_{v+1} − E_v| in a.u. of time.
    pub fn vibrational_period(&self, v: usize) -> Result<f64> {
        let (a, b) = (self.get(v)?, self.get(v + 1)?);
        Ok(2.0 * PI / (b.energy - a.energy).abs())
    }
}

/// Box-normalized continuum state used as the initial wavefunction.
#[derive(Debug, Clone)]
pub struct ContinuumRef {
    /// Collision energy above the dissociation limit, hartree.
    pub e0: f64,
    pub n0: usize,
    /// Local level spacing (E_{n+1} − E_{n−1})/2, hartree.
    pub de_dn: f64,
    pub vector: Vec<f64>,
    pub box_length: f64,
}

/// Box eigenstate with collision energy closest to `e_target` above threshold.
pub fn continuum_state(curve: &Curve, grid: &RadialGrid, e_target: f64) -> Result<ContinuumRef> {
    if !(e_target > 0.0) {
        return Err(Error::Domain(format!("collision energy must be above threshold, got {e_target:e} hartree")));
    }
    let pot = grid.sample(|r| curve.value(r));
    let diag = diagonalize(&pot, grid)?;
    let thr = curve.asymptote();
    let first = diag.energies.partition_point(|&e| e <= thr);
    if first + 1 >= grid.len() {
        return Err(Error::Domain("no box states above threshold on this grid".into()));
    }
    let n0 = (first..grid.len())
        .min_by(|&a, &b| (diag.energies[a] - thr - e_target).abs().total_cmp(&(diag.energies[b] - thr - e_target).abs()))
        .expect("non-empty range");
    if n0 == 0 || n0 + 1 >= grid.len() {
        return Err(Error::MissingLevel(n0));
    }
    Ok(ContinuumRef {
        e0: diag.energies[n0] - thr,
        n0,
        de_dn: 0.5 * (diag.energies[n0 + 1] - diag.energies[n0 - 1]),
        vector: diag.vector(n0),
        box_length: grid.box_length(),
    })
}

/// π/Ω with ħΩ = √((W·⟨χ_e|χ_g⟩)² + ((E_e − E_g)/2)²); atomic units.
pub fn beat_period(e_e: f64, e_g: f64, overlap: f64, coupling: f64) -> Result<f64> {
    if overlap.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("overlap {overlap} exceeds 1 in magnitude")));
    }
    let omega = (coupling * overlap).hypot(0.5 * (e_e - e_g));
    if omega == 0.0 {
        return Err(Error::Singularity("beat period of degenerate, uncoupled levels"));
    }
    Ok(PI / omega)
}

/// 2π/|E_e − E_g| for a pair of adiabatic levels; atomic units.
pub fn adiabatic_beat_time(e_ad_e: f64, e_ad_g: f64) -> Result<f64> {
    let d = (e_ad_e - e_ad_g).abs();
    if d == 0.0 {
        return Err(Error::Singularity("adiabatic beat time of degenerate levels"));
    }
    Ok(2.0 * PI / d)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::potentials::Morse;
    use crate::units::{au_to_ps, cm_to_hartree, hartree_to_cm, thermal_energy, MU_CS2};

    #[test]
    fn harmonic_levels() {
        let (mass, omega) = (1000.0, 0.01);
        let k = mass * omega * omega;
        let grid = Arc::new(RadialGrid::uniform(320, 0.5, 5.5, mass).unwrap());
        let curve = Curve::Harmonic { force_constant: k, r_eq: 3.0, offset: 0.0 };
        let set = solve_levels("ho", &curve, &grid, (0.0, 10.75 * omega), SolveOptions::default()).unwrap();
        assert_eq!(set.levels.len(), 11);
        for l in &set.levels {
            assert_relative_eq!(l.energy, omega * (l.v as f64 + 0.5), max_relative = 1e-8);
            assert_eq!(set.node_count(l.v).unwrap(), l.v);
            assert_relative_eq!(au_to_ps(set.vibrational_period(l.v.min(9)).unwrap()), au_to_ps(2.0 * PI / omega), max_relative = 1e-6);
        }
    }

    #[test]
    fn morse_levels_and_rotational_constants() {
        let morse = Morse { depth: cm_to_hartree(279.0), r_eq: 12.0, alpha: 0.38 };
        let curve = Curve::Morse { morse, asymptote: 0.0 };
        let grid = Arc::new(RadialGrid::uniform(1024, 7.0, 40.0, MU_CS2).unwrap());
        let set = solve_levels("morse", &curve, &grid, (-1.0, morse.level_energy(29, MU_CS2) + 1e-9), SolveOptions::default()).unwrap();
        assert_eq!(set.levels.len(), 30);
        for l in &set.levels {
            assert_relative_eq!(l.energy, morse.level_energy(l.v, MU_CS2), max_relative = 1e-8);
            assert!(l.b_v > 0.0);
        }
        let b0 = set.get(0).unwrap().b_v;
        assert_relative_eq!(b0, 1.0 / (2.0 * MU_CS2 * 144.0), max_relative = 0.02);
        for w in set.levels.windows(2) {
            assert!(w[1].energy > w[0].energy);
            assert!(w[1].b_v < w[0].b_v);
        }
        let ortho: f64 = set.get(3).unwrap().vector.iter().zip(&set.get(7).unwrap().vector).map(|(a, b)| a * b).sum();
        assert!(ortho.abs() < 1e-8);
        assert!(set.vibrational_period(28).unwrap() > set.vibrational_period(5).unwrap());
    }

    #[test]
    fn under_resolved_grid_is_reported() {
        let morse = Morse { depth: cm_to_hartree(279.0), r_eq: 12.0, alpha: 0.38 };
        let curve = Curve::Morse { morse, asymptote: 0.0 };
        let grid = Arc::new(RadialGrid::uniform(60, 7.0, 40.0, MU_CS2).unwrap());
        let r = solve_levels("morse", &curve, &grid, (-1.0, 0.0), SolveOptions::default());
        assert!(matches!(r, Err(Error::Resolution { .. })), "{r:?}");
    }

    #[test]
    fn free_box_density_of_states() {
        let grid = RadialGrid::uniform(256, 1.0, 761.0, MU_CS2).unwrap();
        let c = continuum_state(&Curve::Flat(0.0), &grid, thermal_energy(0.11e-3)).unwrap();
        let n = (c.n0 + 1) as f64;
        assert_relative_eq!(c.de_dn, 2.0 * c.e0 / n, max_relative = 1e-10);
        assert_relative_eq!(c.e0, (PI * n / 760.0).powi(2) / (2.0 * MU_CS2), max_relative = 1e-10);
        assert!((hartree_to_cm(c.de_dn) - 0.69e-4).abs() < 0.15 * 0.69e-4);
        assert!(matches!(continuum_state(&Curve::Flat(0.0), &grid, -1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn beat_periods() {
        let w = cm_to_hartree(13.17);
        let cases = [(-144.05, -142.43, 0.22, 5.5), (-134.77, -143.27, 0.05, 3.9)];
        for (ee, eg, s, t) in cases {
            let p = au_to_ps(beat_period(cm_to_hartree(ee), cm_to_hartree(eg), s, w).unwrap());
            assert!((p - t).abs() < 0.05 * t, "{p} vs {t}");
        }
        let pure = beat_period(cm_to_hartree(-140.0), cm_to_hartree(-141.0), 0.0, w).unwrap();
        assert_relative_eq!(pure, 2.0 * PI / cm_to_hartree(1.0), max_relative = 1e-12);
        assert!(beat_period(0.1, 0.1, 0.0, w).is_err());
        assert!(beat_period(0.1, 0.2, 1.5, w).is_err());
    }

    #[test]
    fn adiabatic_beats() {
        let t = |d: f64| au_to_ps(adiabatic_beat_time(cm_to_hartree(d), 0.0).unwrap());
        assert!((t(0.74) - 45.0).abs() < 0.5);
        assert!((t(3.0) - 11.1).abs() < 0.05);
        assert_relative_eq!(t(1.48), 0.5 * t(0.74), max_relative = 1e-12);
        assert!(adiabatic_beat_time(1.0, 1.0).is_err());
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #[test]
            fn beat_period_bounds(de in -20.0f64..20.0, s in -1.0f64..1.0, w in 0.1f64..30.0) {
                prop_assume!(de.abs() > 1e-6 && s.abs() > 1e-6);
                let t = beat_period(cm_to_hartree(de), 0.0, s, cm_to_hartree(w)).unwrap();
                prop_assert!(t <= PI / (cm_to_hartree(w) * s.abs()) * (1.0 + 1e-12));
                prop_assert!(t <= 2.0 * PI / cm_to_hartree(de.abs()) * (1.0 + 1e-12));
            }
        }
    }
}
