//! Declarative run configuration: a sectioned TOML file whose keys all have
//! defaults reproducing the reference system.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Mapping, RadialGrid};
use crate::observables::ThermalContext;
use crate::potentials::{calibrate_crossing, reference_curves, CoupledSystem, Crossing, Morse, PotentialCurve, PulseEnvelope, Shape};
use crate::propagator::PropagationPlan;
use crate::units::{cm_to_hartree, coupling_from_intensity, ps_to_au, Quantity, Unit, MU_CS2};

/// Intensity and transition dipole used when the system section names no coupling.
pub const DEFAULT_INTENSITY_MW_CM2: f64 = 43.0;
pub const DEFAULT_DIPOLE_AU: f64 = 3.429;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub system: SystemSection,
    pub ground: CurveSection,
    pub excited: CurveSection,
    pub grid: GridSection,
    pub pulse: PulseSection,
    pub propagation: PropagationSection,
    pub analysis: AnalysisSection,
    pub times: TimesSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub label: String,
    /// Recorded in manifests; the pipeline itself is deterministic.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    /// Reduced mass, electron masses.
    pub mass: f64,
    /// ħΔ_L in cm⁻¹; the dressed ground asymptote sits this far below the excited one.
    pub detuning_cm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intensity_mw_cm2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dipole_au: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_cm: Option<f64>,
    /// Adjust the excited C₃ so the crossing lands on `target_r_c`.
    pub calibrate: bool,
    pub target_r_c: f64,
    pub working_range: [f64; 2],
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            mass: MU_CS2,
            detuning_cm: 140.0,
            intensity_mw_cm2: None,
            dipole_au: None,
            coupling_cm: None,
            calibrate: true,
            target_r_c: 29.3,
            working_range: [8.0, 208.0],
        }
    }
}

/// Overrides of one reference curve; missing keys keep the reference value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_depth_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_r_eq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_window: Option<[f64; 2]>,
}

impl CurveSection {
    fn apply(&self, base: PotentialCurve, asymptote: f64) -> PotentialCurve {
        let m = base.short_range;
        PotentialCurve {
            short_range: Morse {
                depth: self.morse_depth_cm.map_or(m.depth, cm_to_hartree),
                r_eq: self.morse_r_eq.unwrap_or(m.r_eq),
                alpha: self.morse_alpha.unwrap_or(m.alpha),
            },
            c_n: self.c_n.unwrap_or(base.c_n),
            power: self.power.unwrap_or(base.power),
            switch_radius: self.switch_radius.unwrap_or(base.switch_radius),
            switch_window: self.switch_window.map_or(base.switch_window, |w| (w[0], w[1])),
            asymptote,
        }
    }

    fn validate(&self, section: &str) -> Result<()> {
        let positive = [
            ("morse_depth_cm", self.morse_depth_cm),
            ("morse_r_eq", self.morse_r_eq),
            ("morse_alpha", self.morse_alpha),
            ("switch_radius", self.switch_radius),
        ];
        for (key, v) in positive {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::config(format!("{section}.{key}"), format!("must be positive, got {x}")));
                }
            }
        }
        if let Some(c) = self.c_n {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::config(format!("{section}.c_n"), format!("must be non-negative, got {c}")));
            }
        }
        if let Some(p) = self.power {
            if p < 1 {
                return Err(Error::config(format!("{section}.power"), format!("must be at least 1, got {p}")));
            }
        }
        if let Some([lo, hi]) = self.switch_window {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::config(format!("{section}.switch_window"), format!("needs 0 < lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingKind {
    Uniform,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub r_min: f64,
    /// L_R = R_max − R_min, bohr.
    pub length: f64,
    pub mapping: MappingKind,
    pub beta: f64,
    pub e_env_cm: f64,
    pub ke_floor_cm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_required: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: 1439,
            r_min: 8.0,
            length: 200.0,
            mapping: MappingKind::Adaptive,
            beta: 0.7,
            e_env_cm: 0.0,
            ke_floor_cm: 100.0,
            k_required: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub ramp: Shape,
    pub rise_end_ps: f64,
    pub plateau_end_ps: f64,
    pub fall_end_ps: f64,
    pub end_ps: f64,
    pub amplitude: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        PulseSection {
            ramp: Shape::SinSquaredRamp,
            rise_end_ps: 100.0,
            plateau_end_ps: 295.0,
            fall_end_ps: 310.0,
            end_ps: 395.0,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialChannel {
    Ground,
    Excited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationSection {
    pub dt_ramp_ps: f64,
    pub dt_flat_ps: f64,
    pub cheb_tolerance: f64,
    pub margin: f64,
    pub snapshots_ps: Vec<f64>,
    /// Temperature fixing the collision energy of the initial box state, K.
    pub temperature_k: f64,
    /// Potentials are capped here before propagation, cm⁻¹.
    pub ceiling_cm: f64,
    pub initial_channel: InitialChannel,
}

impl Default for PropagationSection {
    fn default() -> Self {
        PropagationSection {
            dt_ramp_ps: 0.01,
            dt_flat_ps: 0.5,
            cheb_tolerance: 1e-14,
            margin: 0.05,
            snapshots_ps: Vec::new(),
            temperature_k: 0.11e-3,
            ceiling_cm: 5000.0,
            initial_channel: InitialChannel::Ground,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub k_floor: f64,
    /// Level windows in cm⁻¹; bound levels below each asymptote when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_window_cm: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excited_window_cm: Option<[f64; 2]>,
    /// Re-solve levels on a doubled grid and reject drifts above 1e-6.
    pub resolution_check: bool,
    /// Projections below this are left out of the report.
    pub projection_floor: f64,
    pub hole_window: [f64; 2],
    pub hole_threshold: f64,
    pub volume_cm3: f64,
    pub density_cm3: f64,
    pub spin_factor: f64,
    /// Box level spacing at the collision energy; taken from the grid when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub de_dn_cm: Option<f64>,
    /// Extra transition probabilities pushed through the thermal chain.
    pub probabilities: Vec<f64>,
    /// Time of the impulsive prediction; one flat-top Rabi period at R_c when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impulsive_time_ps: Option<f64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            k_floor: 5.0,
            ground_window_cm: None,
            excited_window_cm: None,
            resolution_check: true,
            projection_floor: 1e-12,
            hole_window: [8.0, 60.0],
            hole_threshold: 0.5,
            volume_cm3: 1e-3,
            density_cm3: 1e11,
            spin_factor: 0.75,
            de_dn_cm: None,
            probabilities: Vec::new(),
            impulsive_time_ps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TimesSection {
    /// Radii (bohr) for local Rabi periods.
    pub radii: Vec<f64>,
    /// Local detunings Δ (cm⁻¹) for local Rabi periods.
    pub detunings_cm: Vec<f64>,
    /// Two-level beats from tabulated `[E_e, E_g, overlap]`, energies in cm⁻¹.
    pub beat_rows: Vec<[f64; 3]>,
    /// Two-level beats between computed levels `[v_e, v_g]`.
    pub beat_pairs: Vec<[usize; 2]>,
    pub vibrational_ground: Vec<usize>,
    pub vibrational_excited: Vec<usize>,
    /// `[v_upper, v_lower]` on the flat-top adiabatic curves.
    pub adiabatic_pairs: Vec<[usize; 2]>,
}

impl TimesSection {
    pub fn needs_levels(&self) -> bool {
        !(self.beat_pairs.is_empty() && self.vibrational_ground.is_empty() && self.vibrational_excited.is_empty() && self.adiabatic_pairs.is_empty())
    }
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive, got {x}")))
    }
}

fn ordered(path: &str, w: [f64; 2]) -> Result<()> {
    if w[0] < w[1] {
        Ok(())
    } else {
        Err(Error::config(path, format!("needs lo < hi, got [{}, {}]", w[0], w[1])))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("", e.to_string().trim_end().to_string()))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            Error::config(path, e.inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML text; parsing it gives back an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        positive("system.mass", s.mass)?;
        if !s.detuning_cm.is_finite() {
            return Err(Error::config("system.detuning_cm", "must be finite"));
        }
        match (s.coupling_cm, s.intensity_mw_cm2, s.dipole_au) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Error::config("system.coupling_cm", "give either coupling_cm or intensity_mw_cm2 + dipole_au, not both"))
            }
            (Some(w), None, None) => positive("system.coupling_cm", w)?,
            (None, Some(i), Some(d)) => {
                positive("system.intensity_mw_cm2", i)?;
                positive("system.dipole_au", d)?;
            }
            (None, Some(_), None) => return Err(Error::config("system.dipole_au", "required together with intensity_mw_cm2")),
            (None, None, Some(_)) => return Err(Error::config("system.intensity_mw_cm2", "required together with dipole_au")),
            (None, None, None) => {}
        }
        positive("system.working_range", s.working_range[0])?;
        ordered("system.working_range", s.working_range)?;
        if s.calibrate && !(s.target_r_c >= s.working_range[0] && s.target_r_c <= s.working_range[1]) {
            return Err(Error::config("system.target_r_c", format!("{} outside the working range", s.target_r_c)));
        }
        self.ground.validate("ground")?;
        self.excited.validate("excited")?;

        let g = &self.grid;
        if g.n < 16 {
            return Err(Error::config("grid.n", format!("needs at least 16 points, got {}", g.n)));
        }
        positive("grid.r_min", g.r_min)?;
        positive("grid.length", g.length)?;
        if !(g.beta > 0.0 && g.beta <= 1.0) {
            return Err(Error::config("grid.beta", format!("must lie in (0, 1], got {}", g.beta)));
        }
        positive("grid.ke_floor_cm", g.ke_floor_cm)?;
        if let Some(k) = g.k_required {
            positive("grid.k_required", k)?;
        }

        let p = &self.pulse;
        let times = [0.0, p.rise_end_ps, p.plateau_end_ps, p.fall_end_ps, p.end_ps];
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::config("pulse", format!("times must be non-decreasing from 0, got {:?}", &times[1..])));
        }
        if !(p.end_ps > 0.0) {
            return Err(Error::config("pulse.end_ps", "pulse must have positive duration"));
        }
        if !(0.0..=1.0).contains(&p.amplitude) {
            return Err(Error::config("pulse.amplitude", format!("must lie in [0, 1], got {}", p.amplitude)));
        }

        let q = &self.propagation;
        positive("propagation.dt_ramp_ps", q.dt_ramp_ps)?;
        positive("propagation.dt_flat_ps", q.dt_flat_ps)?;
        if !(q.cheb_tolerance > 0.0 && q.cheb_tolerance <= 1e-6) {
            return Err(Error::config("propagation.cheb_tolerance", format!("must lie in (0, 1e-6], got {}", q.cheb_tolerance)));
        }
        if !(q.margin >= 0.05) {
            return Err(Error::config("propagation.margin", format!("must be at least 0.05, got {}", q.margin)));
        }
        if let Some((i, t)) = q.snapshots_ps.iter().enumerate().find(|(_, &t)| !(t >= 0.0 && t <= p.end_ps)) {
            return Err(Error::config(format!("propagation.snapshots_ps[{i}]"), format!("{t} ps outside [0, {}]", p.end_ps)));
        }
        positive("propagation.temperature_k", q.temperature_k)?;
        positive("propagation.ceiling_cm", q.ceiling_cm)?;

        let a = &self.analysis;
        if !(a.k_floor >= 0.0) {
            return Err(Error::config("analysis.k_floor", format!("must be non-negative, got {}", a.k_floor)));
        }
        if let Some(w) = a.ground_window_cm {
            ordered("analysis.ground_window_cm", w)?;
        }
        if let Some(w) = a.excited_window_cm {
            ordered("analysis.excited_window_cm", w)?;
        }
        if !(a.projection_floor >= 0.0) {
            return Err(Error::config("analysis.projection_floor", "must be non-negative"));
        }
        ordered("analysis.hole_window", a.hole_window)?;
        if !(a.hole_threshold > 0.0 && a.hole_threshold < 1.0) {
            return Err(Error::config("analysis.hole_threshold", format!("must lie in (0, 1), got {}", a.hole_threshold)));
        }
        positive("analysis.volume_cm3", a.volume_cm3)?;
        positive("analysis.density_cm3", a.density_cm3)?;
        if !(a.spin_factor > 0.0 && a.spin_factor <= 1.0) {
            return Err(Error::config("analysis.spin_factor", format!("must lie in (0, 1], got {}", a.spin_factor)));
        }
        if let Some(d) = a.de_dn_cm {
            positive("analysis.de_dn_cm", d)?;
        }
        if let Some((i, x)) = a.probabilities.iter().enumerate().find(|(_, &x)| !(0.0..=1.0).contains(&x)) {
            return Err(Error::config(format!("analysis.probabilities[{i}]"), format!("{x} outside [0, 1]")));
        }
        if let Some(t) = a.impulsive_time_ps {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::config("analysis.impulsive_time_ps", format!("must be non-negative, got {t}")));
            }
        }

        let t = &self.times;
        if let Some((i, row)) = t.beat_rows.iter().enumerate().find(|(_, r)| !(r[2].abs() <= 1.0)) {
            return Err(Error::config(format!("times.beat_rows[{i}]"), format!("overlap {} exceeds 1 in magnitude", row[2])));
        }
        if let Some((i, r)) = t.radii.iter().enumerate().find(|(_, &r)| !(r >= s.working_range[0] && r <= s.working_range[1])) {
            return Err(Error::config(format!("times.radii[{i}]"), format!("{r} bohr outside the working range")));
        }
        if let Some((i, d)) = t.detunings_cm.iter().enumerate().find(|(_, &d)| !(d >= 0.0 && d.is_finite())) {
            return Err(Error::config(format!("times.detunings_cm[{i}]"), format!("must be non-negative, got {d}")));
        }
        Ok(())
    }

    /// |W_L| in cm⁻¹.
    pub fn coupling_cm(&self) -> Result<f64> {
        let s = &self.system;
        if let Some(w) = s.coupling_cm {
            return Ok(w);
        }
        let i = s.intensity_mw_cm2.unwrap_or(DEFAULT_INTENSITY_MW_CM2);
        let d = s.dipole_au.unwrap_or(DEFAULT_DIPOLE_AU);
        Ok(coupling_from_intensity(Quantity::new(i, Unit::MegawattPerCm2), d)?.value)
    }

    pub fn envelope(&self) -> Result<PulseEnvelope> {
        let p = &self.pulse;
        PulseEnvelope::rectangular(p.rise_end_ps, p.plateau_end_ps, p.fall_end_ps, p.end_ps, p.ramp, p.amplitude)
    }

    /// The dressed system, calibrated if requested, together with its crossing.
    pub fn system(&self) -> Result<(CoupledSystem, Crossing)> {
        let s = &self.system;
        let (g, e) = reference_curves();
        let ground = self.ground.apply(g, cm_to_hartree(-s.detuning_cm));
        let excited = self.excited.apply(e, 0.0);
        let range = (s.working_range[0], s.working_range[1]);
        let sys = CoupledSystem::new(ground.into(), excited.into(), cm_to_hartree(self.coupling_cm()?), self.envelope()?, s.mass, range);
        if s.calibrate {
            calibrate_crossing(&sys, s.target_r_c)
        } else {
            let c = sys.crossing()?;
            Ok((sys, c))
        }
    }

    pub fn grid_spec(&self, mass: f64) -> GridSpec {
        let g = &self.grid;
        let mapping = match g.mapping {
            MappingKind::Uniform => Mapping::Uniform,
            MappingKind::Adaptive => Mapping::Adaptive {
                e_env: cm_to_hartree(g.e_env_cm),
                beta: g.beta,
                ke_floor: cm_to_hartree(g.ke_floor_cm),
            },
        };
        GridSpec { n: g.n, r_min: g.r_min, r_max: g.r_min + g.length, mass, mapping, k_required: g.k_required }
    }

    pub fn build_grid(&self, sys: &CoupledSystem) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::build(&self.grid_spec(sys.mass), &|r| sys.enveloping_potential(r))?))
    }

    pub fn plan(&self) -> PropagationPlan {
        let q = &self.propagation;
        PropagationPlan {
            dt_ramp: ps_to_au(q.dt_ramp_ps),
            dt_flat: ps_to_au(q.dt_flat_ps),
            cheb_tolerance: q.cheb_tolerance,
            margin: q.margin,
            snapshot_times: q.snapshots_ps.iter().map(|&t| ps_to_au(t)).collect(),
        }
    }

    pub fn thermal_context(&self, de_dn_cm: f64) -> ThermalContext {
        let a = &self.analysis;
        ThermalContext {
            temperature_k: self.propagation.temperature_k,
            volume_cm3: a.volume_cm3,
            density_cm3: a.density_cm3,
            de_dn_cm: a.de_dn_cm.unwrap_or(de_dn_cm),
            spin_factor: a.spin_factor,
        }
    }
}
