//! Field-dressed diabatic curves, their light-induced (adiabatic)
//! counterparts and the position-local characteristic times.

mod curve;
mod envelope;

pub use curve::{Curve, CustomCurve, Morse, PotentialCurve};
pub use envelope::{PulseEnvelope, Segment, Shape};

use crate::error::{Error, Result};
use crate::units::{cm_to_hartree, MU_CS2};

const CROSSING_SCAN_POINTS: usize = 20_000;

/// Crossing of the dressed diabatic curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub r_c: f64,
    pub v_c: f64,
}

/// Eigenvalues of the 2×2 dressed potential matrix at one R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adiabatic {
    pub lower: f64,
    pub upper: f64,
    /// θ with tan 2θ = W f / Δ(R), in [0, π/4].
    pub mixing_angle: f64,
}

/// Time argument of [`CoupledSystem::local_rabi_period`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseTime {
    /// Instant in atomic units; uses f(t).
    At(f64),
    /// Constant-coupling part of the pulse, f = peak value.
    FlatTop,
}

/// Ground and excited dressed curves coupled by `W_L f(t)`.
///
/// Energies in hartree, lengths in bohr, times in atomic units.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    pub ground: Curve,
    pub excited: Curve,
    /// |W_L| in hartree.
    pub coupling: f64,
    pub envelope: PulseEnvelope,
    /// Reduced mass in electron masses.
    pub mass: f64,
    /// Radial interval on which R-local quantities may be evaluated.
    pub working_range: (f64, f64),
}

impl CoupledSystem {
    pub fn new(ground: Curve, excited: Curve, coupling: f64, envelope: PulseEnvelope, mass: f64, working_range: (f64, f64)) -> Self {
        CoupledSystem { ground, excited, coupling, envelope, mass, working_range }
    }

    /// ħΔ_L: separation of the dressed asymptotes.
    pub fn detuning(&self) -> f64 {
        self.excited.asymptote() - self.ground.asymptote()
    }

    fn check_range(&self, r: f64) -> Result<()> {
        let (min, max) = self.working_range;
        if r.is_finite() && r >= min && r <= max {
            Ok(())
        } else {
            Err(Error::OutOfRange { r, min, max })
        }
    }

    /// (V_e − V_g)/2, signed. Positive outside the crossing.
    pub fn half_difference(&self, r: f64) -> f64 {
        0.5 * (self.excited.value(r) - self.ground.value(r))
    }

    /// Local detuning Δ(R) = |V_e(R) − V_g(R)|/2.
    pub fn local_detuning(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        Ok(self.half_difference(r).abs())
    }

    pub fn adiabatic_transform(&self, r: f64, f: f64) -> Result<Adiabatic> {
        self.check_range(r)?;
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain(format!("envelope value {f} outside [0, 1]")));
        }
        Ok(self.adiabatic_unchecked(r, f))
    }

    pub(crate) fn adiabatic_unchecked(&self, r: f64, f: f64) -> Adiabatic {
        let (vg, ve) = (self.ground.value(r), self.excited.value(r));
        let mean = 0.5 * (vg + ve);
        let delta = 0.5 * (ve - vg).abs();
        let w = self.coupling * f;
        let half_gap = delta.hypot(w);
        Adiabatic { lower: mean - half_gap, upper: mean + half_gap, mixing_angle: 0.5 * w.atan2(delta) }
    }

    /// Minimum of both adiabatic curves at the flat-top coupling. Used as
    /// the enveloping potential of adaptive grids.
    pub fn enveloping_potential(&self, r: f64) -> f64 {
        self.adiabatic_unchecked(r, self.envelope.peak()).lower
    }

    /// T = ħπ / √((W_L f(t))² + Δ(R)²), in atomic units of time.
    pub fn local_rabi_period(&self, r: f64, at: PulseTime) -> Result<f64> {
        let delta = self.local_detuning(r)?;
        let f = match at {
            PulseTime::FlatTop => self.envelope.peak(),
            PulseTime::At(t) => {
                let (t0, t1) = self.envelope.span();
                if t < t0 || t > t1 {
                    return Err(Error::Domain(format!("t = {t} a.u. outside the pulse span [{t0}, {t1}]")));
                }
                self.envelope.value(t)
            }
        };
        let omega = (self.coupling * f).hypot(delta);
        if omega == 0.0 {
            return Err(Error::Singularity("local Rabi period with zero coupling at the crossing"));
        }
        Ok(std::f64::consts::PI / omega)
    }

    /// The unique crossing of the dressed curves inside the working range.
    pub fn crossing(&self) -> Result<Crossing> {
        let (lo, hi) = self.working_range;
        let diff = |r: f64| self.excited.value(r) - self.ground.value(r);
        let mut brackets = Vec::new();
        let mut prev_r = lo;
        let mut prev = diff(lo);
        for i in 1..=CROSSING_SCAN_POINTS {
            // geometric spacing resolves the short-range region
            let r = lo * (hi / lo).powf(i as f64 / CROSSING_SCAN_POINTS as f64);
            let d = diff(r);
            if prev == 0.0 || prev.signum() != d.signum() {
                brackets.push((prev_r, r));
            }
            prev_r = r;
            prev = d;
        }
        match brackets.len() {
            0 => Err(Error::Crossing(format!("no crossing in [{lo}, {hi}] bohr"))),
            1 => {
                let r_c = bisect(&diff, brackets[0].0, brackets[0].1);
                Ok(Crossing { r_c, v_c: self.ground.value(r_c) })
            }
            n => Err(Error::Crossing(format!(
                "{n} crossings in [{lo}, {hi}] bohr (first near {:.3}, {:.3})",
                brackets[0].1,
                brackets[1].1
            ))),
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.crossing()?;
        Ok(self)
    }
}

/// Bisection to machine precision on a sign change in `[a, b]`.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Bounds of the C₃ search performed by [`calibrate_crossing`], in a.u.
pub const CALIBRATION_C3_RANGE: (f64, f64) = (1e-3, 1e4);

/// Adjust the excited-state long-range coefficient so that the dressed
/// crossing lands at `target_r_c`. The ground curve is left untouched.
pub fn calibrate_crossing(sys: &CoupledSystem, target_r_c: f64) -> Result<(CoupledSystem, Crossing)> {
    let (lo, hi) = CALIBRATION_C3_RANGE;
    let fail = |reason: String| Error::Calibration { reason, lo, hi };
    let Curve::Switched(excited) = &sys.excited else {
        return Err(fail("excited curve has no adjustable long-range coefficient".into()));
    };
    if !(sys.detuning() > 0.0) {
        return Err(fail(format!(
            "dressed asymptotes separated by {:.3e} hartree; a crossing at finite R needs red detuning",
            sys.detuning()
        )));
    }
    sys.check_range(target_r_c)?;

    let vg = sys.ground.value(target_r_c);
    let with_c3 = |c3: f64| PotentialCurve { c_n: c3, ..excited.clone() };
    let gap = |c3: f64| with_c3(c3).value(target_r_c) - vg;
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo.signum() == g_hi.signum() {
        return Err(fail(format!("V_e − V_g at R = {target_r_c} keeps sign {:+} across the range", g_lo.signum())));
    }
    let c3 = bisect(&gap, lo, hi);
    let calibrated = CoupledSystem { excited: Curve::Switched(with_c3(c3)), ..sys.clone() };
    let crossing = calibrated.crossing()?;
    if (crossing.r_c - target_r_c).abs() > 1e-3 {
        return Err(fail(format!("crossing landed at {} instead of {target_r_c}", crossing.r_c)));
    }
    Ok((calibrated, crossing))
}

/// Model curves used throughout the examples: a Morse + C₆ ground state
/// 140 cm⁻¹ below a Morse + C₃ excited state, before calibration.
pub fn reference_curves() -> (PotentialCurve, PotentialCurve) {
    let ground = PotentialCurve::new(
        Morse { depth: cm_to_hartree(279.0), r_eq: 12.0, alpha: 0.38 },
        6890.0,
        6,
        20.0,
        cm_to_hartree(-140.0),
    );
    let excited = PotentialCurve::new(
        Morse { depth: cm_to_hartree(2000.0), r_eq: 11.0, alpha: 0.30 },
        16.0,
        3,
        17.0,
        0.0,
    );
    (ground, excited)
}

/// Reference system calibrated to R_c = 29.3 a₀ with W_L = 13.17 cm⁻¹.
pub fn reference_system(envelope: PulseEnvelope, working_range: (f64, f64)) -> Result<(CoupledSystem, Crossing)> {
    let (g, e) = reference_curves();
    let sys = CoupledSystem::new(g.into(), e.into(), cm_to_hartree(13.17), envelope, MU_CS2, working_range);
    calibrate_crossing(&sys, 29.3)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use approx::assert_relative_eq;

    use super::*;
    use crate::units::{au_to_ps, hartree_to_cm};

    fn reference() -> (CoupledSystem, Crossing) {
        reference_system(PulseEnvelope::reference(), (8.0, 760.0)).unwrap()
    }

    #[test]
    fn calibration_lands_on_target() {
        let (sys, c) = reference();
        assert!((c.r_c - 29.3).abs() < 1e-3);
        let Curve::Switched(e) = &sys.excited else { unreachable!() };
        assert!((e.c_n - 16.4).abs() < 0.2, "C3 = {}", e.c_n);
        assert!((hartree_to_cm(c.v_c) + 143.0).abs() < 1.0, "V_c = {}", hartree_to_cm(c.v_c));
        let gap = hartree_to_cm(sys.excited.value(c.r_c) - sys.ground.value(c.r_c));
        assert!(gap.abs() < 1e-9);
    }

    #[test]
    fn detuning_examples() {
        let (sys, c) = reference();
        assert!(sys.local_detuning(c.r_c).unwrap() < 1e-14);
        let far = hartree_to_cm(sys.local_detuning(760.0).unwrap());
        assert!((far - 70.0).abs() < 0.01, "{far}");
        let at89 = hartree_to_cm(sys.local_detuning(89.0).unwrap());
        assert!((at89 - 67.4).abs() < 0.02 * 67.4, "{at89}");
        assert!(matches!(sys.local_detuning(1000.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn zero_detuning_cannot_be_calibrated() {
        let (g, e) = reference_curves();
        let g = PotentialCurve { asymptote: 0.0, ..g };
        let sys = CoupledSystem::new(g.into(), e.into(), 1e-4, PulseEnvelope::reference(), MU_CS2, (8.0, 760.0));
        assert!(matches!(calibrate_crossing(&sys, 29.3), Err(Error::Calibration { .. })));
    }

    #[test]
    fn larger_detuning_moves_crossing_inward() {
        let (sys, c) = reference();
        let Curve::Switched(g) = &sys.ground else { unreachable!() };
        let deeper = PotentialCurve { asymptote: 2.0 * g.asymptote, ..g.clone() };
        let sys2 = CoupledSystem { ground: deeper.into(), ..sys.clone() };
        assert!(sys2.crossing().unwrap().r_c < c.r_c);
    }

    #[test]
    fn adiabatic_limits() {
        let (sys, c) = reference();
        let a = sys.adiabatic_transform(40.0, 0.0).unwrap();
        let (vg, ve) = (sys.ground.value(40.0), sys.excited.value(40.0));
        assert_eq!(a.mixing_angle, 0.0);
        assert_relative_eq!(a.lower, vg.min(ve), max_relative = 1e-14);
        assert_relative_eq!(a.upper, vg.max(ve), max_relative = 1e-14);

        let at_rc = sys.adiabatic_transform(c.r_c, 1.0).unwrap();
        assert!((hartree_to_cm(at_rc.upper - at_rc.lower) - 26.34).abs() < 1e-9);
        assert!((at_rc.mixing_angle - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn weak_coupling_expansion() {
        let (sys, _) = reference();
        let r = 300.0;
        let delta = sys.local_detuning(r).unwrap();
        let w = sys.coupling;
        let a = sys.adiabatic_transform(r, 1.0).unwrap();
        let half_split = 0.5 * (a.upper - a.lower);
        let approx = delta + w * w / (2.0 * delta);
        assert!((half_split - approx).abs() < (w / delta).powi(4) * delta);
    }

    #[test]
    fn rabi_periods() {
        let (sys, c) = reference();
        let t_rc = au_to_ps(sys.local_rabi_period(c.r_c, PulseTime::FlatTop).unwrap());
        assert!((t_rc - 1.27).abs() < 0.01, "{t_rc}");
        let t89 = au_to_ps(sys.local_rabi_period(89.0, PulseTime::FlatTop).unwrap());
        assert!((t89 - 0.24).abs() < 0.01, "{t89}");
        // before the pulse starts f = 0 and at R_c both terms vanish
        assert!(matches!(sys.local_rabi_period(c.r_c, PulseTime::At(0.0)), Err(Error::Singularity(_))));
        // f = 0, Δ ≈ 70 cm⁻¹ far out
        let free = au_to_ps(sys.local_rabi_period(700.0, PulseTime::At(0.0)).unwrap());
        let expected = 5.30884e-12 * std::f64::consts::PI / 70.0 * 1e12;
        assert!((free - expected).abs() < 1e-3 * expected, "{free}");
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #[test]
            fn trace_and_gap(r in 8.0f64..760.0, f in 0.0f64..=1.0) {
                let (sys, _) = reference();
                let a = sys.adiabatic_transform(r, f).unwrap();
                let (vg, ve) = (sys.ground.value(r), sys.excited.value(r));
                prop_assert!(((a.lower + a.upper) - (vg + ve)).abs() <= 1e-12 * (vg + ve).abs());
                prop_assert!(a.upper - a.lower >= 2.0 * sys.coupling * f * (1.0 - 1e-14));
                prop_assert!(a.lower <= vg.min(ve) && a.upper >= vg.max(ve));
                prop_assert!((0.0..=FRAC_PI_4 + 1e-15).contains(&a.mixing_angle));
            }

            #[test]
            fn rabi_period_peaks_at_crossing(r in 8.0f64..760.0) {
                let (sys, c) = reference();
                let t = sys.local_rabi_period(r, PulseTime::FlatTop).unwrap();
                let t_c = sys.local_rabi_period(c.r_c, PulseTime::FlatTop).unwrap();
                prop_assert!(t <= t_c);
            }

            #[test]
            fn mixing_angle_decreases_outward(r in 30.0f64..700.0) {
                let (sys, _) = reference();
                let a = sys.adiabatic_transform(r, 1.0).unwrap().mixing_angle;
                let b = sys.adiabatic_transform(r + 5.0, 1.0).unwrap().mixing_angle;
                prop_assert!(b <= a);
            }
        }
    }
}
