//! Uniform and adaptive radial grids: point counts, local resolution and the
//! momentum-space dual.

use std::sync::Arc;

use num_complex::Complex64;
use photoassoc::grid::{GridSpec, Mapping, RadialGrid};
use photoassoc::potentials::{reference_system, PulseEnvelope};
use photoassoc::units::cm_to_hartree;

fn main() -> photoassoc::Result<()> {
    let (sys, _) = reference_system(PulseEnvelope::reference(), (8.0, 760.0))?;
    let adaptive = Mapping::Adaptive { e_env: 0.0, beta: 0.7, ke_floor: cm_to_hartree(100.0) };

    for (name, r_max) in [("desk", 208.0), ("760 bohr box", 760.0)] {
        let probe = GridSpec { n: 16, r_min: 8.0, r_max, mass: sys.mass, mapping: adaptive, k_required: None };
        let need = match RadialGrid::build(&probe, &|r| sys.enveloping_potential(r)) {
            Err(photoassoc::Error::Capacity { required, .. }) => required,
            _ => 16,
        };
        let k_max = 40.0;
        let uni = ((r_max - 8.0) * k_max / std::f64::consts::PI).ceil();
        println!("{name}: adaptive mapping needs N >= {need}, a uniform grid resolving k = {k_max} needs {uni}");
    }

    let spec = GridSpec { n: 1439, r_min: 8.0, r_max: 208.0, mass: sys.mass, mapping: adaptive, k_required: None };
    let grid = Arc::new(RadialGrid::build(&spec, &|r| sys.enveloping_potential(r))?);
    println!("\nN = {}, global k_max = {:.2} a.u.", grid.len(), grid.k_max());
    for j in [0, grid.len() / 8, grid.len() / 2, grid.len() - 1] {
        println!("  R = {:7.2}  local spacing {:.4}  local k_max {:6.2}", grid.nodes()[j], grid.weights()[j], grid.local_k_max(j));
    }

    // a travelling Gaussian keeps its norm in momentum space
    let psi: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&r| Complex64::from_polar((-(r - 120.0f64).powi(2) / 50.0).exp(), -8.0 * r))
        .collect();
    let dvr = grid.to_dvr(&psi);
    let mom = grid.to_momentum(&dvr)?;
    let norm_r: f64 = dvr.iter().map(|z| z.norm_sqr()).sum();
    let peak = mom.k[mom.abs().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    println!("\nGaussian at k = -8: |ψ|² in R {norm_r:.6}, in k {:.6}, peak at k = {peak:.3}", mom.norm());
    Ok(())
}
