//! Symbolic field expressions and their ensemble statistics.
//!
//! A field at a bench port is a linear sum of terms. Each term attaches a
//! complex coefficient to a phase carrier: either a deterministic coherent
//! reference (pump or seed laser) or a stochastic vacuum phasor, possibly
//! conjugated. Down-conversion adds a creation term that conjugates the
//! vacuum (or seed) content of the opposite input channel; the emitting
//! crystal is recorded in the term's event tag so coincidences can pair the
//! two photons of one emission.
//!
//! Detected rates are vacuum-phase averages. Writing each detectable term as
//! `c · exp(i Σ_k n_k φ_k)` with integer exponents `n_k` per vacuum mode, the
//! average of a product of phasors is 1 when every exponent cancels and 0
//! otherwise. Grouping by exponent signature therefore gives the closed-form
//! rate that the Monte Carlo sampler converges to:
//!
//!   rate = Σ_signatures |Σ coefficients with that signature|²
//!
//! Terms on the same vacuum mode interfere, terms on distinct modes add
//! incoherently, and all coherent-reference terms interfere with each other.
//! Bare vacuum passthrough (untagged vacuum terms) never triggers a
//! detector.

use crate::vacuum::{SealedRegistry, VacuumModeId};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("vacuum mode {0:?} is not registered")]
    UnregisteredVacuum(VacuumModeId),
    #[error("beam splitter transmittance must lie in [0, 1], got {0}")]
    InvalidTransmittance(f64),
    #[error("crystal config invalid: {0}")]
    InvalidCrystal(String),
    #[error("port {port:?} must carry exactly one bare vacuum mode, found {count}")]
    InvalidModeContent { port: String, count: usize },
    #[error("monte carlo needs at least one trial")]
    NoTrials,
}

/// What fixes the phase of a term.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseCarrier {
    /// Deterministic reference (pump or seed laser). All coherent references
    /// are mutually phase-stable; the label records provenance.
    Coherent { reference: String },
    /// Stochastic vacuum phasor e^{+iφ}.
    Vacuum(VacuumModeId),
    /// Conjugated vacuum phasor e^{-iφ}; only created by down-conversion,
    /// encoding the a†-type coupling to the seeding vacuum.
    VacuumConj(VacuumModeId),
}

/// One additive term of a port field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTerm {
    pub coefficient: Complex64,
    pub carrier: PhaseCarrier,
    /// Crystal emission that created this term; `None` marks undisturbed
    /// passthrough (bare vacuum, seed beam).
    pub event_tag: Option<String>,
}

impl FieldTerm {
    /// Excited terms trigger detectors; untagged vacuum passthrough does not.
    /// Untagged coherent terms are laser light and do click.
    pub fn is_detectable(&self) -> bool {
        self.event_tag.is_some() || matches!(self.carrier, PhaseCarrier::Coherent { .. })
    }
}

/// The field at one bench port: a linear container of terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldExpression {
    pub terms: Vec<FieldTerm>,
    pub port_label: String,
}

impl FieldExpression {
    pub fn new(port_label: impl Into<String>) -> Self {
        Self {
            terms: Vec::new(),
            port_label: port_label.into(),
        }
    }

    /// Bare vacuum passthrough for one mode (unit coefficient, no tag).
    pub fn bare_vacuum(id: VacuumModeId, port_label: impl Into<String>) -> Self {
        Self {
            terms: vec![FieldTerm {
                coefficient: Complex64::new(1.0, 0.0),
                carrier: PhaseCarrier::Vacuum(id),
                event_tag: None,
            }],
            port_label: port_label.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Addition concatenates term lists.
    pub fn add(&self, other: &FieldExpression) -> FieldExpression {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        FieldExpression {
            terms,
            port_label: self.port_label.clone(),
        }
    }

    /// Scalar multiplication scales every coefficient.
    pub fn scale(&self, factor: Complex64) -> FieldExpression {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= factor;
        }
        out
    }

    fn check_registered(&self, registry: &SealedRegistry) -> Result<(), FieldError> {
        for t in &self.terms {
            match t.carrier {
                PhaseCarrier::Vacuum(id) | PhaseCarrier::VacuumConj(id) => {
                    if !registry.contains(id) {
                        return Err(FieldError::UnregisteredVacuum(id));
                    }
                }
                PhaseCarrier::Coherent { .. } => {}
            }
        }
        Ok(())
    }
}

/// Optional coherent seed applied to a crystal's idler input, overwriting the
/// random vacuum phase there.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedBeam {
    pub amplitude: f64,
    pub phase: f64,
    /// Which laser provides the seed; seeds sharing a reference are mutually
    /// coherent.
    pub reference: String,
}

impl SeedBeam {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        Self {
            amplitude,
            phase,
            reference: "seed".to_string(),
        }
    }
}

/// Parametric gain and pump drive of one crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    /// Small-signal coupling C; the spontaneous term variance is
    /// (gain · pump_amplitude)².
    pub gain: f64,
    pub pump_amplitude: f64,
    pub pump_phase: f64,
    pub seed: Option<SeedBeam>,
}

impl CrystalConfig {
    pub fn new(gain: f64) -> Self {
        Self {
            gain,
            pump_amplitude: 1.0,
            pump_phase: 0.0,
            seed: None,
        }
    }

    pub fn with_pump_phase(mut self, phase: f64) -> Self {
        self.pump_phase = phase;
        self
    }

    pub fn with_seed(mut self, seed: SeedBeam) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !self.gain.is_finite() || self.gain < 0.0 {
            return Err(FieldError::InvalidCrystal(format!(
                "gain must be finite and >= 0, got {}",
                self.gain
            )));
        }
        if !self.pump_amplitude.is_finite() || self.pump_amplitude < 0.0 {
            return Err(FieldError::InvalidCrystal(format!(
                "pump_amplitude must be finite and >= 0, got {}",
                self.pump_amplitude
            )));
        }
        if let Some(seed) = &self.seed {
            if !seed.amplitude.is_finite() || seed.amplitude < 0.0 {
                return Err(FieldError::InvalidCrystal(format!(
                    "seed amplitude must be finite and >= 0, got {}",
                    seed.amplitude
                )));
            }
        }
        Ok(())
    }
}

fn push_creation_terms(
    out: &mut FieldExpression,
    opposite_input: &FieldExpression,
    drive: Complex64,
    crystal_id: &str,
) {
    if drive.norm_sqr() == 0.0 {
        return;
    }
    for t in &opposite_input.terms {
        if t.event_tag.is_some() {
            // Emissions from upstream crystals would seed gain² pair terms;
            // the small-signal model drops them.
            continue;
        }
        let carrier = match &t.carrier {
            PhaseCarrier::Vacuum(id) => PhaseCarrier::VacuumConj(*id),
            PhaseCarrier::Coherent { reference } => PhaseCarrier::Coherent {
                reference: reference.clone(),
            },
            PhaseCarrier::VacuumConj(_) => continue,
        };
        out.terms.push(FieldTerm {
            coefficient: drive * t.coefficient.conj(),
            carrier,
            event_tag: Some(crystal_id.to_string()),
        });
    }
}

/// Down-conversion with explicit input fields. Each input must carry exactly
/// one bare vacuum mode (its mode identity); the output adds a creation term
/// conjugating the opposite input's vacuum and seed content, tagged with the
/// emitting crystal.
pub fn spdc_emit_into(
    config: &CrystalConfig,
    signal_in: &FieldExpression,
    idler_in: &FieldExpression,
    crystal_id: &str,
) -> Result<(FieldExpression, FieldExpression), FieldError> {
    config.validate()?;
    for (input, name) in [(signal_in, "signal"), (idler_in, "idler")] {
        let bare = input
            .terms
            .iter()
            .filter(|t| t.event_tag.is_none() && matches!(t.carrier, PhaseCarrier::Vacuum(_)))
            .count();
        if bare != 1 {
            return Err(FieldError::InvalidModeContent {
                port: format!("{crystal_id}.{name}"),
                count: bare,
            });
        }
    }

    // The seed rides on the idler input; it both passes through and is
    // conjugated into the stimulated signal term.
    let mut idler_eff = idler_in.clone();
    if let Some(seed) = &config.seed {
        if seed.amplitude > 0.0 {
            idler_eff.terms.push(FieldTerm {
                coefficient: Complex64::from_polar(seed.amplitude, seed.phase),
                carrier: PhaseCarrier::Coherent {
                    reference: seed.reference.clone(),
                },
                event_tag: None,
            });
        }
    }

    let drive = Complex64::from_polar(config.gain * config.pump_amplitude, config.pump_phase);
    let mut signal_out = signal_in.clone();
    push_creation_terms(&mut signal_out, &idler_eff, drive, crystal_id);
    let mut idler_out = idler_eff.clone();
    push_creation_terms(&mut idler_out, signal_in, drive, crystal_id);
    Ok((signal_out, idler_out))
}

/// Down-conversion seeded by two registered vacuum modes (fresh crystal with
/// open inputs).
pub fn spdc_emit(
    config: &CrystalConfig,
    signal_vac: VacuumModeId,
    idler_vac: VacuumModeId,
    crystal_id: &str,
    registry: &SealedRegistry,
) -> Result<(FieldExpression, FieldExpression), FieldError> {
    for id in [signal_vac, idler_vac] {
        if !registry.contains(id) {
            return Err(FieldError::UnregisteredVacuum(id));
        }
    }
    let signal_in = FieldExpression::bare_vacuum(signal_vac, format!("{crystal_id}.signal"));
    let idler_in = FieldExpression::bare_vacuum(idler_vac, format!("{crystal_id}.idler"));
    spdc_emit_into(config, &signal_in, &idler_in, crystal_id)
}

/// Lossless two-port splitter: out1 = √T·in1 + i√(1-T)·in2 and
/// out2 = i√(1-T)·in1 + √T·in2.
pub fn combine_beam_splitter(
    in1: &FieldExpression,
    in2: &FieldExpression,
    transmittance: f64,
) -> Result<(FieldExpression, FieldExpression), FieldError> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(FieldError::InvalidTransmittance(transmittance));
    }
    let t = Complex64::new(transmittance.sqrt(), 0.0);
    let r = Complex64::new(0.0, (1.0 - transmittance).sqrt());
    // A fully transmitting or fully reflecting port contributes no terms.
    let mix = |a: &FieldExpression, fa: Complex64, b: &FieldExpression, fb: Complex64| {
        let mut out = if fa.norm_sqr() > 0.0 {
            a.scale(fa)
        } else {
            FieldExpression::new(a.port_label.clone())
        };
        if fb.norm_sqr() > 0.0 {
            out.terms.extend(b.scale(fb).terms);
        }
        out
    };
    Ok((mix(in1, t, in2, r), mix(in2, t, in1, r)))
}

/// Multiply every coefficient by e^{iφ} (path delay).
pub fn apply_phase(field: &FieldExpression, phase: f64) -> FieldExpression {
    field.scale(Complex64::from_polar(1.0, phase))
}

/// Exponent signature of the vacuum phasors attached to a coefficient;
/// the empty signature is the deterministic (coherent) class.
type Signature = Vec<(u32, i32)>;

fn merge_exponent(sig: &mut BTreeMap<u32, i32>, carrier: &PhaseCarrier) {
    match carrier {
        PhaseCarrier::Coherent { .. } => {}
        PhaseCarrier::Vacuum(id) => *sig.entry(id.0).or_insert(0) += 1,
        PhaseCarrier::VacuumConj(id) => *sig.entry(id.0).or_insert(0) -= 1,
    }
}

fn finish_signature(sig: BTreeMap<u32, i32>) -> Signature {
    sig.into_iter().filter(|&(_, n)| n != 0).collect()
}

/// Closed-form vacuum-averaged singles rate.
pub fn ensemble_rate(field: &FieldExpression) -> f64 {
    let mut classes: BTreeMap<Signature, Complex64> = BTreeMap::new();
    for term in field.terms.iter().filter(|t| t.is_detectable()) {
        let mut sig = BTreeMap::new();
        merge_exponent(&mut sig, &term.carrier);
        *classes
            .entry(finish_signature(sig))
            .or_insert(Complex64::new(0.0, 0.0)) += term.coefficient;
    }
    classes.values().map(|c| c.norm_sqr()).sum()
}

/// Closed-form vacuum-averaged coincidence rate between two ports.
///
/// Each crystal emission (event tag) present at both ports contributes the
/// pair amplitude coeff_a(tag)·coeff_b(tag). Expanding those products into
/// monomials, a monomial keeps the phasor exponents of both factors; classes
/// of equal exponent signature add coherently, distinct signatures add
/// incoherently. Pairs whose vacuum signatures differ are distinguishable
/// through their markers and wash out, which is exactly what the trial
/// sampler produces on average.
pub fn ensemble_coincidence(a: &FieldExpression, b: &FieldExpression) -> f64 {
    let mut tags_a: BTreeMap<&str, Vec<&FieldTerm>> = BTreeMap::new();
    for t in &a.terms {
        if let Some(tag) = &t.event_tag {
            tags_a.entry(tag).or_default().push(t);
        }
    }
    let mut classes: BTreeMap<Signature, Complex64> = BTreeMap::new();
    for tb in &b.terms {
        let Some(tag) = &tb.event_tag else { continue };
        let Some(list) = tags_a.get(tag.as_str()) else {
            continue;
        };
        for ta in list {
            let mut sig = BTreeMap::new();
            merge_exponent(&mut sig, &ta.carrier);
            merge_exponent(&mut sig, &tb.carrier);
            *classes
                .entry(finish_signature(sig))
                .or_insert(Complex64::new(0.0, 0.0)) += ta.coefficient * tb.coefficient;
        }
    }
    classes.values().map(|c| c.norm_sqr()).sum()
}

/// Sample mean and standard error from a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

const TRIAL_CHUNK: u64 = 8192;

/// Shared scaffolding for trial-sampled averages: evaluates `value(phasors)`
/// over `trials` realizations in fixed-size chunks (deterministic reduction
/// order regardless of thread count).
fn monte_carlo<F>(
    registry: &SealedRegistry,
    seed: u64,
    trials: u64,
    value: F,
) -> Result<MonteCarloEstimate, FieldError>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    if trials == 0 {
        return Err(FieldError::NoTrials);
    }
    let n_modes = registry.len();
    let n_chunks = trials.div_ceil(TRIAL_CHUNK);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * TRIAL_CHUNK;
            let hi = (lo + TRIAL_CHUNK).min(trials);
            let mut phasors = vec![Complex64::new(1.0, 0.0); n_modes];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for trial in lo..hi {
                registry.fill_phasors(seed, trial, &mut phasors);
                let v = value(&phasors);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}

fn term_phasor(term: &FieldTerm, phasors: &[Complex64]) -> Complex64 {
    match &term.carrier {
        PhaseCarrier::Coherent { .. } => term.coefficient,
        PhaseCarrier::Vacuum(id) => term.coefficient * phasors[id.index()],
        PhaseCarrier::VacuumConj(id) => term.coefficient * phasors[id.index()].conj(),
    }
}

/// Trial-sampled singles rate: substitute unit phasors for every vacuum mode,
/// sum the detectable terms coherently, square, average.
pub fn monte_carlo_rate(
    field: &FieldExpression,
    registry: &SealedRegistry,
    seed: u64,
    trials: u64,
) -> Result<MonteCarloEstimate, FieldError> {
    field.check_registered(registry)?;
    let terms: Vec<&FieldTerm> = field.terms.iter().filter(|t| t.is_detectable()).collect();
    monte_carlo(registry, seed, trials, move |phasors| {
        terms
            .iter()
            .map(|t| term_phasor(t, phasors))
            .sum::<Complex64>()
            .norm_sqr()
    })
}

/// Trial-sampled coincidence rate; converges to [`ensemble_coincidence`].
pub fn monte_carlo_coincidence(
    a: &FieldExpression,
    b: &FieldExpression,
    registry: &SealedRegistry,
    seed: u64,
    trials: u64,
) -> Result<MonteCarloEstimate, FieldError> {
    a.check_registered(registry)?;
    b.check_registered(registry)?;
    let mut tags: BTreeMap<&str, (Vec<&FieldTerm>, Vec<&FieldTerm>)> = BTreeMap::new();
    for t in &a.terms {
        if let Some(tag) = &t.event_tag {
            tags.entry(tag).or_default().0.push(t);
        }
    }
    for t in &b.terms {
        if let Some(tag) = &t.event_tag {
            tags.entry(tag).or_default().1.push(t);
        }
    }
    let pairs: Vec<(Vec<&FieldTerm>, Vec<&FieldTerm>)> = tags
        .into_values()
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .collect();
    monte_carlo(registry, seed, trials, move |phasors| {
        pairs
            .iter()
            .map(|(ta, tb)| {
                let amp_a: Complex64 = ta.iter().map(|t| term_phasor(t, phasors)).sum();
                let amp_b: Complex64 = tb.iter().map(|t| term_phasor(t, phasors)).sum();
                amp_a * amp_b
            })
            .sum::<Complex64>()
            .norm_sqr()
    })
}
