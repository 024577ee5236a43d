//! Calibrate the crossing of the dressed curves and look at the light-induced
//! potentials and local Rabi periods around it.

use photoassoc::observables::infer_radius;
use photoassoc::potentials::{reference_system, PulseEnvelope, PulseTime};
use photoassoc::units::{au_to_ps, cm_to_hartree, hartree_to_cm};

fn main() -> photoassoc::Result<()> {
    let (sys, c) = reference_system(PulseEnvelope::reference(), (8.0, 760.0))?;
    println!("R_c = {:.4} a0, V_c = {:.3} cm⁻¹, detuning {:.1} cm⁻¹", c.r_c, hartree_to_cm(c.v_c), hartree_to_cm(sys.detuning()));

    println!("\n   R (a0)   Δ (cm⁻¹)   V_lower    V_upper   θ (rad)   T_Rabi (ps)");
    for r in [20.0, 25.0, c.r_c, 35.0, 50.0, 80.0, 120.0] {
        let ad = sys.adiabatic_transform(r, 1.0)?;
        println!(
            "{r:9.2} {:10.3} {:10.3} {:10.3} {:9.4} {:12.4}",
            hartree_to_cm(sys.local_detuning(r)?),
            hartree_to_cm(ad.lower),
            hartree_to_cm(ad.upper),
            ad.mixing_angle,
            au_to_ps(sys.local_rabi_period(r, PulseTime::FlatTop)?)
        );
    }

    // where a ground-state fragment would pick up 2Δ = 134.8 cm⁻¹
    let (r, ambiguous) = infer_radius(&sys, cm_to_hartree(134.8));
    println!("\n2Δ = 134.8 cm⁻¹ at R = {r:?} (ambiguous: {ambiguous})");
    Ok(())
}
