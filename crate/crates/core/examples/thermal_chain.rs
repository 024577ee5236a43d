//! From a transition probability at one collision energy to molecules per pulse.

use photoassoc::observables::{thermal_chain, ThermalContext};
use photoassoc::units::MU_CS2;

fn main() -> photoassoc::Result<()> {
    let ctx = ThermalContext { temperature_k: 0.11e-3, volume_cm3: 1e-3, density_cm3: 1e11, de_dn_cm: 0.632e-4, spin_factor: 0.75 };
    ctx.validate()?;
    println!("     P          ZP          Z           P(T)        N_mol");
    for p in [0.78e-4, 2.83e-4, 1e-3] {
        let r = thermal_chain(p, &ctx, MU_CS2)?;
        println!("{p:.3e}  {:.4e}  {:.4e}  {:.4e}  {:.4e}", r.zp, r.z, r.p_t, r.n_mol);
    }
    Ok(())
}
