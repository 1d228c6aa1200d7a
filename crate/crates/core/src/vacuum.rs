//! Vacuum-mode bookkeeping and per-trial random phase realizations.
//!
//! Every unoccupied field mode that participates in down-conversion is a
//! stochastic phasor: unit amplitude, uniform random phase per trial. Two
//! registered modes are statistically independent; the same mode id always
//! refers to the same phasor within a scenario. This is the surrogate for the
//! undisturbed vacuum operators crossing the crystals, with matching second
//! moments (zero mean, unit variance, no cross-correlation).
//!
//! Phase draws are counter-style: `ChaCha8` keyed by the scenario seed with
//! the trial index as the stream counter, so `(seed, trial) -> phases` is
//! stable across runs and trials can be evaluated in any order or in
//! parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("vacuum mode label {0:?} is already registered")]
    DuplicateLabel(String),
}

/// Identity of one vacuum mode. Ids are dense indices into the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VacuumModeId(pub u32);

impl VacuumModeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Mutable registry used while a scenario is being assembled.
#[derive(Debug, Default, Clone)]
pub struct VacuumRegistry {
    labels: Vec<String>,
    amplitude_fluctuations: bool,
}

impl VacuumRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a new vacuum mode under a unique human-readable label.
    pub fn register(&mut self, label: &str) -> Result<VacuumModeId, RegistryError> {
        if self.labels.iter().any(|l| l == label) {
            return Err(RegistryError::DuplicateLabel(label.to_string()));
        }
        self.labels.push(label.to_string());
        Ok(VacuumModeId(self.labels.len() as u32 - 1))
    }

    /// Give the phasors a Rayleigh-distributed magnitude (unit second
    /// moment) on top of the random phase. Off by default: means are
    /// unchanged either way, but trial variances and mode-squaring
    /// observables differ, and the closed-form coincidence classes assume
    /// the phase-only model.
    pub fn set_amplitude_fluctuations(&mut self, enabled: bool) {
        self.amplitude_fluctuations = enabled;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Freeze the registry. Sampling is only available on the sealed form.
    pub fn seal(self) -> SealedRegistry {
        SealedRegistry {
            labels: Arc::new(self.labels),
            amplitude_fluctuations: self.amplitude_fluctuations,
        }
    }
}

/// Immutable registry; cheap to clone and safe to share across threads.
#[derive(Debug, Clone)]
pub struct SealedRegistry {
    labels: Arc<Vec<String>>,
    amplitude_fluctuations: bool,
}

impl SealedRegistry {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, id: VacuumModeId) -> bool {
        id.index() < self.labels.len()
    }

    pub fn label(&self, id: VacuumModeId) -> Option<&str> {
        self.labels.get(id.index()).map(String::as_str)
    }

    pub fn ids(&self) -> impl Iterator<Item = VacuumModeId> {
        (0..self.labels.len() as u32).map(VacuumModeId)
    }

    /// Fill `out[i]` with the phase of mode `i` for this `(seed, trial)`.
    pub(crate) fn fill_phases(&self, seed: u64, trial_index: u64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial_index);
        for slot in out.iter_mut() {
            *slot = rng.gen::<f64>() * std::f64::consts::TAU;
        }
    }

    /// Fill `out[i]` with the full phasor of mode `i`: unit magnitude, or
    /// Rayleigh-distributed magnitude when the registry enables amplitude
    /// fluctuations. Phases are drawn first, so the phase assignment always
    /// matches [`SealedRegistry::sample_realization`] for the same
    /// `(seed, trial)`.
    pub(crate) fn fill_phasors(
        &self,
        seed: u64,
        trial_index: u64,
        out: &mut [num_complex::Complex64],
    ) {
        debug_assert_eq!(out.len(), self.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial_index);
        for slot in out.iter_mut() {
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            *slot = num_complex::Complex64::from_polar(1.0, phase);
        }
        if self.amplitude_fluctuations {
            for slot in out.iter_mut() {
                // Rayleigh with E[a²] = 1.
                *slot *= (-(1.0 - rng.gen::<f64>()).ln()).sqrt();
            }
        }
    }

    /// One independent uniform phase in [0, 2π) per registered mode,
    /// deterministic in `(seed, trial_index)`.
    pub fn sample_realization(&self, seed: u64, trial_index: u64) -> PhaseRealization {
        let mut phases = vec![0.0; self.len()];
        self.fill_phases(seed, trial_index, &mut phases);
        PhaseRealization {
            trial_index,
            phases,
        }
    }
}

/// The phase assignment of every registered vacuum mode for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRealization {
    pub trial_index: u64,
    phases: Vec<f64>,
}

impl PhaseRealization {
    pub fn phase(&self, id: VacuumModeId) -> f64 {
        self.phases[id.index()]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}
