//! Unit conversions, the laser coupling and the momentum ↔ energy table.

use photoassoc::units::{coupling_from_intensity, hartree_to_cm, kinetic_energy, thermal_energy, Quantity, Unit, MU_CS2};

fn main() -> photoassoc::Result<()> {
    let e = Quantity::new(134.8, Unit::Wavenumber);
    println!("{e} = {} = {}", e.to(Unit::Hartree)?, e.to(Unit::ElectronVolt)?);
    let t = Quantity::new(0.11, Unit::Millikelvin);
    println!("k_B·{t} = {:.4e} cm⁻¹", hartree_to_cm(thermal_energy(t.to(Unit::Kelvin)?.value)));
    println!("{} = {}", Quantity::new(1.27, Unit::Picosecond), Quantity::new(1.27, Unit::Picosecond).to(Unit::AuTime)?);

    let w = coupling_from_intensity(Quantity::new(43.0, Unit::MegawattPerCm2), 3.429)?;
    println!("W_L at 43 MW/cm² with D = 3.429 a.u.: {w}");

    println!("\n  k (a.u.)   E (cm⁻¹)");
    for k in [12.2, 10.4, 8.6, 6.0] {
        println!("  {k:8.1}   {:8.2}", hartree_to_cm(kinetic_energy(k, MU_CS2)));
    }

    // mixing dimensions is an error, not a silent conversion
    assert!(Quantity::new(1.0, Unit::Bohr).to(Unit::Picosecond).is_err());
    Ok(())
}
