//! Frozen-nuclei (impulsive) evolution of the initial state and the momentum
//! peaks it predicts from the envelope maxima of ψ₀.

use std::sync::Arc;

use num_complex::Complex64;
use photoassoc::grid::{GridSpec, Mapping, RadialGrid};
use photoassoc::impulsive::{evolve_impulsive, excited_population, momentum_of_ia, predict_k_peaks};
use photoassoc::observables::spectrum_peaks;
use photoassoc::potentials::{reference_system, PulseEnvelope, PulseTime};
use photoassoc::spectrum::continuum_state;
use photoassoc::units::{au_to_ps, cm_to_hartree, hartree_to_cm, thermal_energy};

fn main() -> photoassoc::Result<()> {
    let (sys, c) = reference_system(PulseEnvelope::reference(), (8.0, 208.0))?;
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
    let psi: Vec<Complex64> = cont.vector.iter().map(|&x| x.into()).collect();

    println!("   R0 (a0)   2Δ+W²/2Δ (cm⁻¹)   k (a.u.)   W²/4ΩΔ    valid");
    for p in predict_k_peaks(&sys, &grid, &psi)? {
        println!("{:10.2} {:17.3} {:10.3} {:10.5} {:>8}", p.r0, hartree_to_cm(p.e_2delta), p.k_out, p.amplitude_factor, p.valid);
    }

    let t = sys.local_rabi_period(c.r_c, PulseTime::FlatTop)?;
    let e_g = cont.e0 + sys.ground.asymptote();
    let pred = evolve_impulsive(&sys, &grid, &psi, e_g, t)?;
    println!("\nafter {:.3} ps of frozen-nuclei evolution P_e = {:.4e}", au_to_ps(t), excited_population(&pred));
    let mom = momentum_of_ia(&pred)?;
    let mut found = spectrum_peaks(&mom, sys.mass, 5.0, Some(&sys))?;
    found.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    for p in found.iter().take(8) {
        println!("  ground-channel peak k = {:8.3}  |Ψ| = {:.3e}  R ≈ {:?}", p.k, p.amplitude, p.inferred_r);
    }
    Ok(())
}
