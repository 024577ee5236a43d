//! Bound levels of a Morse well against the closed form, rotational constants,
//! vibrational periods and the box-normalized continuum state.

use std::sync::Arc;

use photoassoc::grid::RadialGrid;
use photoassoc::potentials::{reference_system, Curve, Morse, PulseEnvelope};
use photoassoc::spectrum::{continuum_state, solve_levels, SolveOptions};
use photoassoc::units::{au_to_ps, cm_to_hartree, hartree_to_cm, thermal_energy, MU_CS2};

fn main() -> photoassoc::Result<()> {
    let morse = Morse { depth: cm_to_hartree(279.0), r_eq: 12.0, alpha: 0.38 };
    let curve = Curve::Morse { morse, asymptote: 0.0 };
    let grid = Arc::new(RadialGrid::uniform(2047, 7.0, 40.0, MU_CS2)?);
    let levels = solve_levels("morse", &curve, &grid, (f64::NEG_INFINITY, 0.0), SolveOptions::default())?;
    println!("{} bound levels (closed form: {})", levels.levels.len(), morse.level_count(MU_CS2));
    println!("\n   v    E (cm⁻¹)      exact        B_v (cm⁻¹)   T_vib (ps)");
    for l in levels.levels.iter().step_by(10) {
        let t = levels.vibrational_period(l.v).map(au_to_ps).unwrap_or(f64::NAN);
        println!(
            "{:4} {:12.6} {:12.6} {:12.6e} {:10.3}",
            l.v,
            hartree_to_cm(l.energy),
            hartree_to_cm(morse.level_energy(l.v, MU_CS2)),
            hartree_to_cm(l.b_v),
            t
        );
    }

    let (sys, _) = reference_system(PulseEnvelope::reference(), (8.0, 760.0))?;
    let grid = Arc::new(RadialGrid::uniform(3000, 8.0, 760.0, MU_CS2)?);
    let c = continuum_state(&sys.ground, &grid, thermal_energy(0.11e-3))?;
    println!(
        "\ncontinuum state in a {:.0} a0 box: n0 = {}, E0 = {:.4e} cm⁻¹, dE/dn = {:.4e} cm⁻¹",
        c.box_length,
        c.n0,
        hartree_to_cm(c.e0),
        hartree_to_cm(c.de_dn)
    );
    Ok(())
}
