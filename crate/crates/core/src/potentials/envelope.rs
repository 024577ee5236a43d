use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::ps_to_au;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    LinearRamp,
    Constant,
    SinSquaredRamp,
}

/// One piece of the pulse envelope; times in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub shape: Shape,
    pub f_start: f64,
    pub f_end: f64,
}

impl Segment {
    pub fn value(&self, t: f64) -> f64 {
        let tau = ((t - self.t_start) / (self.t_end - self.t_start)).clamp(0.0, 1.0);
        let w = match self.shape {
            Shape::Constant => 0.0,
            Shape::LinearRamp => tau,
            Shape::SinSquaredRamp => (0.5 * std::f64::consts::PI * tau).sin().powi(2),
        };
        self.f_start + (self.f_end - self.f_start) * w
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn is_constant(&self) -> bool {
        self.shape == Shape::Constant || self.f_start == self.f_end
    }

    pub fn max_value(&self) -> f64 {
        self.f_start.max(self.f_end)
    }
}

/// Piecewise temporal envelope f(t) ∈ [0, 1] of the coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    segments: Vec<Segment>,
}

impl PulseEnvelope {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Domain("envelope needs at least one segment".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_end >= s.t_start) {
                return Err(Error::Domain(format!("segment {i} ends before it starts")));
            }
            for f in [s.f_start, s.f_end] {
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::Domain(format!("segment {i}: envelope value {f} outside [0, 1]")));
                }
            }
            if s.shape == Shape::Constant && s.f_start != s.f_end {
                return Err(Error::Domain(format!("segment {i}: constant segment with f_start != f_end")));
            }
            if i > 0 {
                let prev = &segments[i - 1];
                if (prev.t_end - s.t_start).abs() > 1e-9 * s.t_start.abs().max(1.0) {
                    return Err(Error::Domain(format!("segments {} and {i} are not contiguous", i - 1)));
                }
                if (prev.f_end - s.f_start).abs() > 1e-12 {
                    return Err(Error::Domain(format!("envelope jumps between segments {} and {i}", i - 1)));
                }
            }
        }
        Ok(PulseEnvelope { segments })
    }

    /// Ramp up over `[0, rise_end]`, hold until `plateau_end`, ramp down until
    /// `fall_end`, then stay off until `end`. Times in ps.
    pub fn rectangular(rise_end: f64, plateau_end: f64, fall_end: f64, end: f64, ramp: Shape, amplitude: f64) -> Result<Self> {
        let times = [0.0, rise_end, plateau_end, fall_end, end];
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain(format!("pulse times must be non-decreasing, got {times:?}")));
        }
        let t: Vec<f64> = times.iter().map(|&t| ps_to_au(t)).collect();
        let mut segments = Vec::new();
        let mut push = |t0: f64, t1: f64, shape, f0, f1| {
            if t1 > t0 {
                segments.push(Segment { t_start: t0, t_end: t1, shape, f_start: f0, f_end: f1 });
            }
        };
        push(t[0], t[1], ramp, 0.0, amplitude);
        push(t[1], t[2], Shape::Constant, amplitude, amplitude);
        push(t[2], t[3], ramp, amplitude, 0.0);
        push(t[3], t[4], Shape::Constant, 0.0, 0.0);
        if segments.is_empty() {
            segments.push(Segment { t_start: 0.0, t_end: 0.0, shape: Shape::Constant, f_start: 0.0, f_end: 0.0 });
        }
        PulseEnvelope::new(segments)
    }

    /// sin² rise 0→100 ps, plateau to 295 ps, sin² fall to 310 ps, off until 395 ps.
    pub fn reference() -> Self {
        PulseEnvelope::rectangular(100.0, 295.0, 310.0, 395.0, Shape::SinSquaredRamp, 1.0).expect("valid reference envelope")
    }

    /// Constant coupling `f` for `duration` (a.u.).
    pub fn constant(duration: f64, f: f64) -> Result<Self> {
        PulseEnvelope::new(vec![Segment { t_start: 0.0, t_end: duration, shape: Shape::Constant, f_start: f, f_end: f }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn span(&self) -> (f64, f64) {
        (self.segments[0].t_start, self.segments[self.segments.len() - 1].t_end)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (t0, t1) = self.span();
        if t <= t0 {
            return self.segments[0].f_start;
        }
        if t >= t1 {
            return self.segments[self.segments.len() - 1].f_end;
        }
        let s = self.segments.iter().find(|s| t <= s.t_end).unwrap_or(&self.segments[self.segments.len() - 1]);
        s.value(t)
    }

    /// Largest envelope value, i.e. the flat-top level.
    pub fn peak(&self) -> f64 {
        self.segments.iter().map(Segment::max_value).fold(0.0, f64::max)
    }
}
