//! Propagate a box continuum state through a short pulse and look at
//! populations, the hole burnt into the ground channel and momentum peaks.

use std::sync::Arc;

use photoassoc::grid::{Channel, GridSpec, Mapping, RadialGrid, TwoChannelState};
use photoassoc::observables::{detect_hole, find_momentum_peaks};
use photoassoc::potentials::{reference_system, PulseEnvelope, Shape};
use photoassoc::propagator::{propagate, Hamiltonian, PropagationPlan};
use photoassoc::spectrum::continuum_state;
use photoassoc::units::{au_to_ps, cm_to_hartree, hartree_to_cm, thermal_energy};

fn main() -> photoassoc::Result<()> {
    let env = PulseEnvelope::rectangular(2.0, 10.0, 12.0, 12.0, Shape::SinSquaredRamp, 1.0)?;
    let (sys, _) = reference_system(env, (8.0, 208.0))?;
    let spec = GridSpec {
        n: 1439,
        r_min: 8.0,
        r_max: 208.0,
        mass: sys.mass,
        mapping: Mapping::Adaptive { e_env: 0.0, beta: 0.7, ke_floor: cm_to_hartree(100.0) },
        k_required: None,
    };
    let grid = Arc::new(RadialGrid::build(&spec, &|r| sys.enveloping_potential(r))?);
    let cont = continuum_state(&sys.ground, &grid, thermal_energy(0.11e-3))?;
    println!("N = {}, initial state n0 = {} at {:.3e} cm⁻¹", grid.len(), cont.n0, hartree_to_cm(cont.e0));

    let init = TwoChannelState::ground_only(grid.clone(), &cont.vector)?;
    let ham = Hamiltonian::new(&sys, grid.clone(), Some(cm_to_hartree(5000.0)));
    let plan = PropagationPlan::new(&[1.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    let ts = propagate(&ham, &plan, &init)?;
    println!("{} steps, max norm drift {:.2e}\n", ts.steps, ts.max_norm_drift);

    for p in ts.populations.iter().step_by((ts.populations.len() / 12).max(1)) {
        println!("t = {:7.3} ps   P_g = {:.8}   P_e = {:.4e}", p.t, p.ground, p.excited);
    }

    let snap = &ts.snapshots[ts.snapshots.len() - 2];
    match detect_hole(snap, &init, Channel::Ground, (8.0, 60.0), 0.2)? {
        Some(h) => println!("\nhole at {:.2} ps: depth {:.3} over [{:.1}, {:.1}] a0", au_to_ps(snap.t), h.depth, h.r_lo, h.r_hi),
        None => println!("\nno hole deeper than 20% inside 60 a0"),
    }
    let mut peaks = find_momentum_peaks(snap, Channel::Excited, 5.0, Some(&sys))?;
    println!("{} excited-channel peaks above the noise floor; strongest:", peaks.len());
    peaks.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    for p in peaks.iter().take(6) {
        println!("  k = {:7.3}  E = {:7.2} cm⁻¹  width {:.3}  |Ψ| = {:.3e}", p.k, p.kinetic_energy, p.width, p.amplitude);
    }
    Ok(())
}
