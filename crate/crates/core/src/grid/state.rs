use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MomentumAmplitude, RadialGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Ground,
    Excited,
}

impl Channel {
    pub fn other(self) -> Channel {
        match self {
            Channel::Ground => Channel::Excited,
            Channel::Excited => Channel::Ground,
        }
    }
}

/// Amplitudes of both channels on a shared grid.
///
/// Stored as DVR amplitudes `√w_i ψ(R_i)`, so the norm is a plain sum of
/// squared moduli. `t` is in atomic units.
#[derive(Debug, Clone)]
pub struct TwoChannelState {
    grid: Arc<RadialGrid>,
    pub t: f64,
    ground: Vec<Complex64>,
    excited: Vec<Complex64>,
}

impl TwoChannelState {
    /// From DVR amplitudes.
    pub fn new(grid: Arc<RadialGrid>, t: f64, ground: Vec<Complex64>, excited: Vec<Complex64>) -> Result<Self> {
        for v in [&ground, &excited] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), got: v.len() });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Domain("state contains non-finite amplitudes".into()));
            }
        }
        Ok(TwoChannelState { grid, t, ground, excited })
    }

    /// From wavefunction values ψ(R_i) at the nodes.
    pub fn from_wavefunctions(grid: Arc<RadialGrid>, t: f64, psi_g: &[Complex64], psi_e: &[Complex64]) -> Result<Self> {
        let (g, e) = (grid.to_dvr(psi_g), grid.to_dvr(psi_e));
        Self::new(grid, t, g, e)
    }

    /// Real DVR vector in the ground channel, excited channel empty.
    pub fn ground_only(grid: Arc<RadialGrid>, dvr: &[f64]) -> Result<Self> {
        let g = dvr.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let e = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self::new(grid, 0.0, g, e)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn amplitudes(&self, channel: Channel) -> &[Complex64] {
        match channel {
            Channel::Ground => &self.ground,
            Channel::Excited => &self.excited,
        }
    }

    pub fn amplitudes_mut(&mut self, channel: Channel) -> &mut [Complex64] {
        match channel {
            Channel::Ground => &mut self.ground,
            Channel::Excited => &mut self.excited,
        }
    }

    pub(crate) fn split_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        (&mut self.ground, &mut self.excited)
    }

    /// ψ(R_i) at the nodes.
    pub fn wavefunction(&self, channel: Channel) -> Vec<Complex64> {
        self.grid.from_dvr(self.amplitudes(channel))
    }

    pub fn channel_norm(&self, channel: Channel) -> f64 {
        self.amplitudes(channel).iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.channel_norm(Channel::Ground) + self.channel_norm(Channel::Excited)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        let s = 1.0 / n.sqrt();
        self.ground.iter_mut().chain(self.excited.iter_mut()).for_each(|z| *z *= s);
        Ok(())
    }

    /// Σ over both channels of conj(self)·other.
    pub fn inner(&self, other: &TwoChannelState) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(RadialGrid::inner(&self.ground, &other.ground) + RadialGrid::inner(&self.excited, &other.excited))
    }

    /// Largest pointwise amplitude difference over both channels.
    pub fn max_abs_diff(&self, other: &TwoChannelState) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let d = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        Ok(d(&self.ground, &other.ground).max(d(&self.excited, &other.excited)))
    }

    pub fn to_momentum(&self, channel: Channel) -> MomentumAmplitude {
        self.grid.to_momentum(self.amplitudes(channel)).expect("state length matches its grid")
    }
}
