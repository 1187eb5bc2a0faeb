use alloc::format;

use crate::error::{Error, Result};

/// How far the selected chromosome moves toward the unit centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Fixed step `alpha`.
    #[default]
    PlainAlpha,
    /// Step `alpha / max(r^2, epsilon)` clamped to `[0, 1]`, with `r` the
    /// distance between the chromosome and the centroid.
    Attenuated,
}

/// Rule for choosing among equidistant chromosomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

/// How `g` chromosomes are derived from one base vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// All chromosomes are exact copies of the base vector.
    Identical,
    /// Each chromosome is the base vector plus a keyed uniform offset.
    #[default]
    Jitter,
}

/// Free parameters of one evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    /// Influence of a unit on the selected chromosome. `0` disables updates.
    pub alpha: f64,
    /// Chromosomes per cell.
    pub g: usize,
    /// Genes per chromosome.
    pub dim: usize,
    /// Full passes over the unit list.
    pub rounds: usize,
    pub distance_mode: DistanceMode,
    /// Floor applied to `r^2` in attenuated mode.
    pub attenuation_epsilon: f64,
    pub tie_break: TieBreak,
    pub seed: u64,
    pub init_mode: InitMode,
    /// Half-width of the uniform jitter in [`InitMode::Jitter`].
    pub jitter_scale: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            alpha: 0.1,
            g: 5,
            dim: 50,
            rounds: 1,
            distance_mode: DistanceMode::PlainAlpha,
            attenuation_epsilon: 1e-6,
            tie_break: TieBreak::LowestIndex,
            seed: 0,
            init_mode: InitMode::Jitter,
            jitter_scale: 0.01,
        }
    }
}

impl EvolutionConfig {
    /// Checks ranges. `alpha = 0` is accepted: it turns evolution into the identity.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.g == 0 {
            return Err(Error::InvalidConfig("g must be positive".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be positive".into()));
        }
        if !(self.attenuation_epsilon > 0.0 && self.attenuation_epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "attenuation epsilon must be positive, got {}",
                self.attenuation_epsilon
            )));
        }
        if !(self.jitter_scale >= 0.0 && self.jitter_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jitter scale must be non-negative, got {}",
                self.jitter_scale
            )));
        }
        Ok(())
    }

    /// Step size for a chromosome at squared distance `r2` from the centroid.
    pub fn step(&self, r2: f64) -> f64 {
        match self.distance_mode {
            DistanceMode::PlainAlpha => self.alpha,
            DistanceMode::Attenuated => {
                (self.alpha / r2.max(self.attenuation_epsilon)).clamp(0.0, 1.0)
            }
        }
    }
}
