//! Two-level beat periods from tabulated level pairs, and the pure-detuning limit.

use photoassoc::spectrum::beat_period;
use photoassoc::units::{au_to_ps, cm_to_hartree};

fn main() -> photoassoc::Result<()> {
    let w = cm_to_hartree(13.17);
    let rows = [
        (141, 44, -144.05, -143.27, 0.10),
        (141, 45, -144.05, -142.43, 0.22),
        (141, 46, -144.05, -141.75, 0.16),
        (144, 44, -134.77, -143.27, 0.05),
        (144, 46, -134.77, -141.75, 0.02),
    ];
    println!(" v_e  v_g   E_e (cm⁻¹)  E_g (cm⁻¹)  overlap  T (ps)");
    for (ve, vg, e, g, o) in rows {
        let t = au_to_ps(beat_period(cm_to_hartree(e), cm_to_hartree(g), o, w)?);
        println!("{ve:4} {vg:4} {e:11.2} {g:11.2} {o:8.2} {t:7.2}");
    }
    let t0 = au_to_ps(beat_period(cm_to_hartree(-144.05), cm_to_hartree(-142.43), 0.0, w)?);
    println!("\nwithout coupling the same pair beats with {t0:.2} ps");
    Ok(())
}
