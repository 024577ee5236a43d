use std::fmt;
use std::sync::Arc;

/// Morse well measured from its own dissociation limit:
/// `D[(1 − e^{−α(R−Rₑ)})² − 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Morse {
    pub depth: f64,
    pub r_eq: f64,
    pub alpha: f64,
}

impl Morse {
    pub fn value(&self, r: f64) -> f64 {
        let e = (-self.alpha * (r - self.r_eq)).exp();
        self.depth * ((1.0 - e) * (1.0 - e) - 1.0)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let e = (-self.alpha * (r - self.r_eq)).exp();
        2.0 * self.depth * self.alpha * e * (1.0 - e)
    }

    /// λ = √(2μD)/α; the well holds ⌊λ − ½⌋ + 1 levels.
    pub fn lambda(&self, mass: f64) -> f64 {
        (2.0 * mass * self.depth).sqrt() / self.alpha
    }

    /// Closed-form level energy relative to the dissociation limit.
    pub fn level_energy(&self, v: usize, mass: f64) -> f64 {
        let x = 1.0 - (v as f64 + 0.5) / self.lambda(mass);
        -self.depth * x * x
    }

    pub fn level_count(&self, mass: f64) -> usize {
        let l = self.lambda(mass) - 0.5;
        if l < 0.0 {
            0
        } else {
            l.floor() as usize + 1
        }
    }
}

/// Short-range Morse well joined to a `−Cₙ/Rⁿ` dispersion tail by a C¹
/// smoothstep over `[lo·R_sw, hi·R_sw]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCurve {
    pub short_range: Morse,
    pub c_n: f64,
    pub power: i32,
    pub switch_radius: f64,
    pub switch_window: (f64, f64),
    pub asymptote: f64,
}

impl PotentialCurve {
    pub fn new(short_range: Morse, c_n: f64, power: i32, switch_radius: f64, asymptote: f64) -> Self {
        PotentialCurve { short_range, c_n, power, switch_radius, switch_window: (0.8, 1.2), asymptote }
    }

    fn window(&self) -> (f64, f64) {
        (self.switch_window.0 * self.switch_radius, self.switch_window.1 * self.switch_radius)
    }

    /// Blend weight of the long-range tail and its R-derivative.
    fn blend(&self, r: f64) -> (f64, f64) {
        let (lo, hi) = self.window();
        if r <= lo {
            (0.0, 0.0)
        } else if r >= hi {
            (1.0, 0.0)
        } else {
            let w = hi - lo;
            let t = (r - lo) / w;
            (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t) / w)
        }
    }

    pub fn long_range(&self, r: f64) -> f64 {
        -self.c_n / r.powi(self.power)
    }

    pub fn value(&self, r: f64) -> f64 {
        let (s, _) = self.blend(r);
        let short = if s < 1.0 { self.short_range.value(r) } else { 0.0 };
        let long = if s > 0.0 { self.long_range(r) } else { 0.0 };
        self.asymptote + (1.0 - s) * short + s * long
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let (s, ds) = self.blend(r);
        let short = self.short_range.value(r);
        let long = self.long_range(r);
        let dlong = self.power as f64 * self.c_n / r.powi(self.power + 1);
        (1.0 - s) * self.short_range.derivative(r) + s * dlong + ds * (long - short)
    }
}

#[derive(Clone)]
pub struct CustomCurve {
    pub label: String,
    pub asymptote: f64,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomCurve").field("label", &self.label).field("asymptote", &self.asymptote).finish()
    }
}

/// A single electronic potential in hartree as a function of R in bohr.
#[derive(Debug, Clone)]
pub enum Curve {
    Switched(PotentialCurve),
    Morse { morse: Morse, asymptote: f64 },
    /// `½k(R − Rₑ)² + offset`
    Harmonic { force_constant: f64, r_eq: f64, offset: f64 },
    Flat(f64),
    Custom(CustomCurve),
}

impl Curve {
    pub fn custom(label: impl Into<String>, asymptote: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Curve::Custom(CustomCurve { label: label.into(), asymptote, f: Arc::new(f) })
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Curve::Switched(c) => c.value(r),
            Curve::Morse { morse, asymptote } => asymptote + morse.value(r),
            Curve::Harmonic { force_constant, r_eq, offset } => 0.5 * force_constant * (r - r_eq).powi(2) + offset,
            Curve::Flat(v) => *v,
            Curve::Custom(c) => (c.f)(r),
        }
    }

    /// Dissociation limit; `+∞` for confining curves.
    pub fn asymptote(&self) -> f64 {
        match self {
            Curve::Switched(c) => c.asymptote,
            Curve::Morse { asymptote, .. } => *asymptote,
            Curve::Harmonic { .. } => f64::INFINITY,
            Curve::Flat(v) => *v,
            Curve::Custom(c) => c.asymptote,
        }
    }

    pub fn sample(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&r| self.value(r)).collect()
    }
}

impl From<PotentialCurve> for Curve {
    fn from(c: PotentialCurve) -> Self {
        Curve::Switched(c)
    }
}
