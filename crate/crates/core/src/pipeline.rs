//! Subcommand orchestration: one validated config in, one run directory out.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{InitialChannel, RunConfig};
use crate::error::{Error, Result};
use crate::grid::{Channel, RadialGrid, TwoChannelState};
use crate::impulsive::{evolve_impulsive, excited_population, momentum_of_ia};
use crate::io::{fmt_f64, RunDir};
use crate::observables::{detect_hole, find_momentum_peaks, level_projections, spectrum_peaks, thermal_chain};
use crate::potentials::{Crossing, CoupledSystem, Curve, PulseTime};
use crate::propagator::{propagate, Hamiltonian, TimeSeries};
use crate::spectrum::{adiabatic_beat_time, beat_period, continuum_state, solve_levels, ContinuumRef, LevelSet, SolveOptions};
use crate::units::{au_to_ps, cm_to_hartree, hartree_to_cm, ps_to_au, thermal_energy};

const CURVE_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Calibrate,
    Spectrum,
    Propagate,
    Analyze,
    Impulsive,
    Times,
}

impl Command {
    pub const ALL: [Command; 6] = [Command::Calibrate, Command::Spectrum, Command::Propagate, Command::Analyze, Command::Impulsive, Command::Times];

    pub fn name(self) -> &'static str {
        match self {
            Command::Calibrate => "calibrate",
            Command::Spectrum => "spectrum",
            Command::Propagate => "propagate",
            Command::Analyze => "analyze",
            Command::Impulsive => "impulsive",
            Command::Times => "times",
        }
    }
}

/// Where a finished run wrote its files, plus a few lines for the terminal.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

/// Executes `cmd` and writes its artifacts, `config.toml` and `manifest.json` into `out`.
pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let (sys, crossing) = cfg.system()?;
    let mut dir = RunDir::create(out)?;
    let mut summary = Vec::new();
    let results = match cmd {
        Command::Calibrate => calibrate(&sys, &crossing, &mut dir, &mut summary)?,
        Command::Spectrum => spectrum(cfg, &sys, &mut dir, &mut summary)?,
        Command::Propagate => propagate_cmd(cfg, &sys, &mut dir, &mut summary)?,
        Command::Analyze => analyze(cfg, &sys, &mut dir, &mut summary)?,
        Command::Impulsive => impulsive(cfg, &sys, &crossing, &mut dir, &mut summary)?,
        Command::Times => times(cfg, &sys, &crossing, &mut dir, &mut summary)?,
    };
    let echo = cfg.to_toml();
    dir.write_text("config.toml", &echo)?;
    let manifest = json!({
        "command": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "label": cfg.run.label,
        "seed": cfg.run.seed,
        "config": echo,
        "files": dir.files(),
        "results": results,
    });
    dir.write_json("manifest.json", &manifest)?;
    Ok(RunReport { dir: dir.path().to_path_buf(), files: dir.files().to_vec(), summary })
}

fn curve_json(c: &Curve) -> Value {
    match c {
        Curve::Switched(p) => json!({
            "morse_depth_cm": hartree_to_cm(p.short_range.depth),
            "morse_r_eq": p.short_range.r_eq,
            "morse_alpha": p.short_range.alpha,
            "c_n": p.c_n,
            "power": p.power,
            "switch_radius": p.switch_radius,
            "switch_window": [p.switch_window.0, p.switch_window.1],
            "asymptote_cm": hartree_to_cm(p.asymptote),
        }),
        other => json!({ "description": format!("{other:?}"), "asymptote_cm": hartree_to_cm(other.asymptote()) }),
    }
}

fn grid_json(g: &RadialGrid) -> Value {
    json!({
        "n": g.len(),
        "r_min": g.r_min(),
        "r_max": g.r_max(),
        "mass": g.mass(),
        "mapping": g.mapping(),
        "k_max": g.k_max(),
    })
}

fn system_json(sys: &CoupledSystem, c: &Crossing) -> Value {
    json!({
        "ground": curve_json(&sys.ground),
        "excited": curve_json(&sys.excited),
        "coupling_cm": hartree_to_cm(sys.coupling),
        "detuning_cm": hartree_to_cm(sys.detuning()),
        "mass": sys.mass,
        "working_range": [sys.working_range.0, sys.working_range.1],
        "crossing": { "r_c": c.r_c, "v_c_cm": hartree_to_cm(c.v_c) },
    })
}

fn calibrate(sys: &CoupledSystem, c: &Crossing, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    let t_c = au_to_ps(sys.local_rabi_period(c.r_c, PulseTime::FlatTop)?);
    let (lo, hi) = sys.working_range;
    let f = sys.envelope.peak();
    let rows = (0..=CURVE_SAMPLES).map(|i| {
        let r = lo + (hi - lo) * i as f64 / CURVE_SAMPLES as f64;
        let ad = sys.adiabatic_unchecked(r, f);
        [r, hartree_to_cm(sys.ground.value(r)), hartree_to_cm(sys.excited.value(r)), hartree_to_cm(ad.lower), hartree_to_cm(ad.upper)]
            .map(fmt_f64)
            .to_vec()
    });
    dir.write_csv("curves.csv", &["R_bohr", "V_g_cm-1", "V_e_cm-1", "V_lower_cm-1", "V_upper_cm-1"], rows)?;
    let mut out = system_json(sys, c);
    out["rabi_period_crossing_ps"] = json!(t_c);
    dir.write_json("system.json", &out)?;
    summary.push(format!("crossing R_c = {:.4} bohr at V_c = {:.3} cm-1", c.r_c, hartree_to_cm(c.v_c)));
    summary.push(format!("W_L = {:.3} cm-1, T_Rabi(R_c) = {:.3} ps", hartree_to_cm(sys.coupling), t_c));
    Ok(out)
}

fn window(cfg_window: Option<[f64; 2]>, asymptote: f64) -> (f64, f64) {
    cfg_window.map_or((f64::NEG_INFINITY, asymptote), |w| (cm_to_hartree(w[0]), cm_to_hartree(w[1])))
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions { resolution_check: cfg.analysis.resolution_check, ..SolveOptions::default() }
}

fn channel_levels(cfg: &RunConfig, sys: &CoupledSystem, grid: &Arc<RadialGrid>) -> Result<(LevelSet, LevelSet)> {
    let opts = solve_options(cfg);
    let g = solve_levels("ground", &sys.ground, grid, window(cfg.analysis.ground_window_cm, sys.ground.asymptote()), opts)?;
    let e = solve_levels("excited", &sys.excited, grid, window(cfg.analysis.excited_window_cm, sys.excited.asymptote()), opts)?;
    Ok((g, e))
}

fn level_rows(set: &LevelSet) -> Vec<Vec<String>> {
    set.levels
        .iter()
        .map(|l| {
            let t_vib = set.vibrational_period(l.v).map_or(String::new(), |t| fmt_f64(au_to_ps(t)));
            vec![l.v.to_string(), fmt_f64(hartree_to_cm(l.energy)), fmt_f64(hartree_to_cm(l.b_v)), t_vib]
        })
        .collect()
}

fn spectrum(cfg: &RunConfig, sys: &CoupledSystem, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    let grid = cfg.build_grid(sys)?;
    let (g, e) = channel_levels(cfg, sys, &grid)?;
    let header = ["v", "E_cm-1", "B_cm-1", "T_vib_ps"];
    dir.write_csv("levels_ground.csv", &header, level_rows(&g))?;
    dir.write_csv("levels_excited.csv", &header, level_rows(&e))?;
    let scatter = [(&g, "ground"), (&e, "excited")]
        .into_iter()
        .flat_map(|(set, name)| {
            set.levels.iter().map(move |l| vec![name.to_string(), l.v.to_string(), fmt_f64(hartree_to_cm(l.energy)), fmt_f64(hartree_to_cm(l.b_v))])
        })
        .collect::<Vec<_>>();
    dir.write_csv("bv_ev.csv", &["channel", "v", "E_cm-1", "B_cm-1"], scatter)?;
    let cont = continuum_state(&sys.ground, &grid, thermal_energy(cfg.propagation.temperature_k))?;
    let cont_json = continuum_json(&cont);
    summary.push(format!("{} ground and {} excited levels on {} points", g.levels.len(), e.levels.len(), grid.len()));
    summary.push(format!("continuum state n0 = {} at E0 = {:.4e} cm-1, dE/dn = {:.4e} cm-1", cont.n0, hartree_to_cm(cont.e0), hartree_to_cm(cont.de_dn)));
    Ok(json!({
        "grid": grid_json(&grid),
        "ground_levels": g.levels.len(),
        "excited_levels": e.levels.len(),
        "continuum": cont_json,
    }))
}

fn continuum_json(c: &ContinuumRef) -> Value {
    json!({ "n0": c.n0, "e0_cm": hartree_to_cm(c.e0), "de_dn_cm": hartree_to_cm(c.de_dn), "box_length": c.box_length })
}

/// Box continuum state of the initial channel, computed on the capped curve
/// the propagator actually sees.
fn initial_state(cfg: &RunConfig, sys: &CoupledSystem, grid: &Arc<RadialGrid>) -> Result<(ContinuumRef, TwoChannelState)> {
    let cap = cm_to_hartree(cfg.propagation.ceiling_cm);
    let curve = match cfg.propagation.initial_channel {
        InitialChannel::Ground => sys.ground.clone(),
        InitialChannel::Excited => sys.excited.clone(),
    };
    let asymptote = curve.asymptote();
    let capped = Curve::custom("capped", asymptote, move |r| curve.value(r).min(cap));
    let cont = continuum_state(&capped, grid, thermal_energy(cfg.propagation.temperature_k))?;
    let state = match cfg.propagation.initial_channel {
        InitialChannel::Ground => TwoChannelState::ground_only(grid.clone(), &cont.vector)?,
        InitialChannel::Excited => {
            let zeros = vec![Complex64::new(0.0, 0.0); grid.len()];
            TwoChannelState::new(grid.clone(), 0.0, zeros, cont.vector.iter().map(|&x| x.into()).collect())?
        }
    };
    Ok((cont, state))
}

struct Propagated {
    grid: Arc<RadialGrid>,
    cont: ContinuumRef,
    initial: TwoChannelState,
    series: TimeSeries,
}

fn run_propagation(cfg: &RunConfig, sys: &CoupledSystem) -> Result<Propagated> {
    let grid = cfg.build_grid(sys)?;
    let (cont, initial) = initial_state(cfg, sys, &grid)?;
    let ham = Hamiltonian::new(sys, grid.clone(), Some(cm_to_hartree(cfg.propagation.ceiling_cm)));
    let series = propagate(&ham, &cfg.plan(), &initial)?;
    Ok(Propagated { grid, cont, initial, series })
}

fn write_populations(dir: &mut RunDir, ts: &TimeSeries) -> Result<()> {
    let rows = ts.populations.iter().map(|p| vec![fmt_f64(p.t), fmt_f64(p.ground), fmt_f64(p.excited)]);
    dir.write_csv("populations.csv", &["t_ps", "P_g", "P_e"], rows)
}

fn write_state(dir: &mut RunDir, stem: &str, s: &TwoChannelState) -> Result<()> {
    let (g, e) = (s.wavefunction(Channel::Ground), s.wavefunction(Channel::Excited));
    let rows = s.grid().nodes().iter().enumerate().map(|(i, &r)| vec![fmt_f64(r), fmt_f64(g[i].re), fmt_f64(g[i].im), fmt_f64(e[i].re), fmt_f64(e[i].im)]);
    dir.write_csv(&format!("{stem}_state.csv"), &["R_bohr", "Re_g", "Im_g", "Re_e", "Im_e"], rows)?;
    let (mg, me) = (s.to_momentum(Channel::Ground), s.to_momentum(Channel::Excited));
    let rows = mg.k.iter().enumerate().map(|(i, &k)| vec![fmt_f64(k), fmt_f64(mg.amp[i].norm()), fmt_f64(me.amp[i].norm())]);
    dir.write_csv(&format!("{stem}_momentum.csv"), &["k_au", "Abs_g", "Abs_e"], rows)
}

fn propagate_cmd(cfg: &RunConfig, sys: &CoupledSystem, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    let p = run_propagation(cfg, sys)?;
    write_populations(dir, &p.series)?;
    write_state(dir, "snapshots/initial", &p.initial)?;
    let mut snaps = Vec::new();
    for (i, s) in p.series.snapshots.iter().enumerate() {
        write_state(dir, &format!("snapshots/{i:03}"), s)?;
        snaps.push(json!({ "index": i, "t_ps": au_to_ps(s.t) }));
    }
    let last = p.series.populations.last().ok_or_else(|| Error::Domain("propagation recorded no populations".into()))?;
    summary.push(format!("{} steps to {:.3} ps, max norm drift {:.2e}", p.series.steps, last.t, p.series.max_norm_drift));
    summary.push(format!("final P_g = {:.6e}, P_e = {:.6e}", last.ground, last.excited));
    Ok(json!({
        "grid": grid_json(&p.grid),
        "continuum": continuum_json(&p.cont),
        "steps": p.series.steps,
        "max_norm_drift": p.series.max_norm_drift,
        "final_populations": { "ground": last.ground, "excited": last.excited },
        "snapshots": snaps,
    }))
}

fn projections_json(map: &std::collections::BTreeMap<usize, f64>, floor: f64) -> (Value, f64) {
    let total = map.values().sum();
    let kept: serde_json::Map<String, Value> = map.iter().filter(|(_, &p)| p > floor).map(|(v, &p)| (v.to_string(), json!(p))).collect();
    (Value::Object(kept), total)
}

fn analyze(cfg: &RunConfig, sys: &CoupledSystem, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    let p = run_propagation(cfg, sys)?;
    write_populations(dir, &p.series)?;
    let fin = p.series.final_state().ok_or_else(|| Error::Domain("propagation recorded no snapshot".into()))?;
    let (lg, le) = channel_levels(cfg, sys, &p.grid)?;
    let floor = cfg.analysis.projection_floor;
    let (proj_g, bound_g) = projections_json(&level_projections(fin, Channel::Ground, &lg)?, floor);
    let (proj_e, bound_e) = projections_json(&level_projections(fin, Channel::Excited, &le)?, floor);

    let k_floor = cfg.analysis.k_floor;
    let peaks_g = find_momentum_peaks(fin, Channel::Ground, k_floor, Some(sys))?;
    let peaks_e = find_momentum_peaks(fin, Channel::Excited, k_floor, Some(sys))?;
    let hw = cfg.analysis.hole_window;
    let hole = detect_hole(fin, &p.initial, Channel::Ground, (hw[0], hw[1]), cfg.analysis.hole_threshold)?;

    let ctx = cfg.thermal_context(hartree_to_cm(p.cont.de_dn));
    ctx.validate()?;
    let mut inputs = vec![("excited_bound".to_string(), bound_e), ("ground_bound".to_string(), bound_g)];
    inputs.extend(cfg.analysis.probabilities.iter().enumerate().map(|(i, &x)| (format!("input_{i}"), x)));
    let mut thermal = Vec::new();
    for (label, prob) in &inputs {
        let t = thermal_chain(*prob, &ctx, sys.mass)?;
        thermal.push(json!({ "label": label, "p": prob, "result": t }));
        summary.push(format!("{label}: P = {prob:.4e} -> ZP = {:.4e}, N_mol = {:.4e}", t.zp, t.n_mol));
    }

    let (t_max, p_max) = p.series.populations.iter().map(|s| (s.t, s.excited)).fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let last = p.series.populations.last().expect("final population recorded");
    summary.insert(0, format!("final P_e = {:.4e} (max {:.4e} at {:.3} ps); bound: ground {:.4e}, excited {:.4e}", last.excited, p_max, t_max, bound_g, bound_e));
    summary.push(format!("{} ground-channel momentum peaks above |k| = {k_floor}", peaks_g.len()));

    let report = json!({
        "grid": grid_json(&p.grid),
        "continuum": continuum_json(&p.cont),
        "populations": {
            "final_ground": last.ground,
            "final_excited": last.excited,
            "max_excited": p_max,
            "max_excited_t_ps": t_max,
            "max_norm_drift": p.series.max_norm_drift,
            "steps": p.series.steps,
        },
        "projections": {
            "ground": proj_g,
            "excited": proj_e,
            "ground_bound_total": bound_g,
            "excited_bound_total": bound_e,
            "floor": floor,
        },
        "peaks": { "ground": peaks_g, "excited": peaks_e, "k_floor": k_floor },
        "hole": hole,
        "thermal": { "context": ctx, "results": thermal },
    });
    dir.write_json("report.json", &report)?;
    Ok(json!({ "grid": grid_json(&p.grid), "steps": p.series.steps, "report": "report.json" }))
}

fn impulsive(cfg: &RunConfig, sys: &CoupledSystem, c: &Crossing, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    if cfg.propagation.initial_channel != InitialChannel::Ground {
        return Err(Error::config("propagation.initial_channel", "impulsive predictions start from the ground channel"));
    }
    let grid = cfg.build_grid(sys)?;
    let (cont, _) = initial_state(cfg, sys, &grid)?;
    let e_g = cont.e0 + sys.ground.asymptote();
    let t = match cfg.analysis.impulsive_time_ps {
        Some(ps) => ps_to_au(ps),
        None => sys.local_rabi_period(c.r_c, PulseTime::FlatTop)?,
    };
    let psi: Vec<Complex64> = cont.vector.iter().map(|&x| x.into()).collect();
    let pred = evolve_impulsive(sys, &grid, &psi, e_g, t)?;
    let mom_g = momentum_of_ia(&pred)?;
    let mom_e = pred.state().to_momentum(Channel::Excited);
    let found = spectrum_peaks(&mom_g, sys.mass, cfg.analysis.k_floor, Some(sys))?;

    let rows = mom_g.k.iter().enumerate().map(|(i, &k)| vec![fmt_f64(k), fmt_f64(mom_g.amp[i].norm()), fmt_f64(mom_e.amp[i].norm())]);
    dir.write_csv("momentum.csv", &["k_au", "Abs_g", "Abs_e"], rows)?;
    let wg = grid.from_dvr(&pred.psi_g);
    let rows = grid.nodes().iter().enumerate().map(|(i, &r)| vec![fmt_f64(r), fmt_f64(wg[i].norm_sqr()), fmt_f64(pred.psi_e_density[i])]);
    dir.write_csv("density.csv", &["R_bohr", "rho_g", "rho_e"], rows)?;

    let peaks: Vec<Value> = pred
        .k_peaks
        .iter()
        .map(|p| {
            json!({
                "r0": p.r0,
                "k_in": p.k_in,
                "k_out": p.k_out,
                "k_leading": p.k_leading,
                "e_2delta_cm": hartree_to_cm(p.e_2delta),
                "amplitude_factor": p.amplitude_factor,
                "valid": p.valid,
            })
        })
        .collect();
    let p_e = excited_population(&pred);
    let out = json!({
        "t_ps": au_to_ps(t),
        "excited_population": p_e,
        "predicted": peaks,
        "found": found,
        "k_floor": cfg.analysis.k_floor,
        "grid": grid_json(&grid),
    });
    dir.write_json("predictions.json", &out)?;
    summary.push(format!("impulsive state at {:.4} ps: P_e = {:.4e}", au_to_ps(t), p_e));
    for p in pred.k_peaks.iter().filter(|p| p.valid) {
        summary.push(format!("  maximum at R = {:.2} bohr -> k = {:.3} a.u. (2Δ = {:.2} cm-1)", p.r0, p.k_out, hartree_to_cm(p.e_2delta)));
    }
    Ok(json!({ "predictions": "predictions.json", "t_ps": au_to_ps(t) }))
}

struct TimeRow {
    quantity: &'static str,
    argument: String,
    t_ps: f64,
}

fn adiabatic_levels(cfg: &RunConfig, sys: &CoupledSystem, grid: &Arc<RadialGrid>) -> Result<(LevelSet, LevelSet)> {
    let f = sys.envelope.peak();
    let (s1, s2) = (sys.clone(), sys.clone());
    let lower = Curve::custom("adiabatic lower", sys.ground.asymptote(), move |r| s1.adiabatic_unchecked(r, f).lower);
    let upper = Curve::custom("adiabatic upper", sys.excited.asymptote(), move |r| s2.adiabatic_unchecked(r, f).upper);
    let opts = solve_options(cfg);
    let lo = solve_levels("adiabatic lower", &lower, grid, (f64::NEG_INFINITY, sys.ground.asymptote()), opts)?;
    let up = solve_levels("adiabatic upper", &upper, grid, (f64::NEG_INFINITY, sys.excited.asymptote()), opts)?;
    Ok((lo, up))
}

fn times(cfg: &RunConfig, sys: &CoupledSystem, c: &Crossing, dir: &mut RunDir, summary: &mut Vec<String>) -> Result<Value> {
    let tc = &cfg.times;
    let w = sys.coupling * sys.envelope.peak();
    let mut rows = vec![TimeRow {
        quantity: "rabi_resonant",
        argument: format!("R_c={:.2} bohr", c.r_c),
        t_ps: au_to_ps(sys.local_rabi_period(c.r_c, PulseTime::FlatTop)?),
    }];
    for &r in &tc.radii {
        let d = sys.local_detuning(r)?;
        rows.push(TimeRow {
            quantity: "rabi_local",
            argument: format!("R={r} bohr (Delta={:.2} cm-1)", hartree_to_cm(d)),
            t_ps: au_to_ps(sys.local_rabi_period(r, PulseTime::FlatTop)?),
        });
    }
    for &d in &tc.detunings_cm {
        let omega = w.hypot(cm_to_hartree(d));
        if omega == 0.0 {
            return Err(Error::Singularity("local Rabi period with zero coupling at the crossing"));
        }
        rows.push(TimeRow { quantity: "rabi_local", argument: format!("Delta={d} cm-1"), t_ps: au_to_ps(PI / omega) });
    }
    for &[e_e, e_g, o] in &tc.beat_rows {
        rows.push(TimeRow {
            quantity: "two_level_beat",
            argument: format!("E_e={e_e} cm-1 E_g={e_g} cm-1 overlap={o}"),
            t_ps: au_to_ps(beat_period(cm_to_hartree(e_e), cm_to_hartree(e_g), o, w)?),
        });
    }
    let mut grid_info = Value::Null;
    if tc.needs_levels() {
        let grid = cfg.build_grid(sys)?;
        grid_info = grid_json(&grid);
        let (lg, le) = channel_levels(cfg, sys, &grid)?;
        for &[v_e, v_g] in &tc.beat_pairs {
            let (a, b) = (le.get(v_e)?, lg.get(v_g)?);
            let o = le.overlap(v_e, &lg, v_g)?;
            rows.push(TimeRow {
                quantity: "two_level_beat",
                argument: format!("v_e={v_e} v_g={v_g} overlap={o:.4}"),
                t_ps: au_to_ps(beat_period(a.energy, b.energy, o, w)?),
            });
        }
        for (set, list, quantity) in [(&lg, &tc.vibrational_ground, "vibrational_ground"), (&le, &tc.vibrational_excited, "vibrational_excited")] {
            for &v in list {
                rows.push(TimeRow { quantity, argument: format!("v={v}"), t_ps: au_to_ps(set.vibrational_period(v)?) });
            }
        }
        if !tc.adiabatic_pairs.is_empty() {
            let (lo, up) = adiabatic_levels(cfg, sys, &grid)?;
            for &[vu, vl] in &tc.adiabatic_pairs {
                rows.push(TimeRow {
                    quantity: "adiabatic_beat",
                    argument: format!("v_upper={vu} v_lower={vl}"),
                    t_ps: au_to_ps(adiabatic_beat_time(up.get(vu)?.energy, lo.get(vl)?.energy)?),
                });
            }
        }
    }

    dir.write_csv("times.csv", &["quantity", "argument", "t_ps"], rows.iter().map(|r| vec![r.quantity.to_string(), r.argument.clone(), fmt_f64(r.t_ps)]))?;
    let width = rows.iter().map(|r| r.argument.chars().count()).max().unwrap_or(0);
    let mut table = String::new();
    for r in &rows {
        let line = format!("{:<20} {:<width$} {:>10.2} ps", r.quantity, r.argument, r.t_ps);
        table.push_str(&line);
        table.push('\n');
        summary.push(line);
    }
    dir.write_text("times.txt", &table)?;
    Ok(json!({ "rows": rows.len(), "grid": grid_info, "system": system_json(sys, c) }))
}
