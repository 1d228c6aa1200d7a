//! Composable bench graphs: crystals, splitters, delays and detectors wired
//! port-to-port, plus the scan driver that sweeps one bound parameter and
//! records a fringe.
//!
//! A bench is described element by element; every input names the upstream
//! output it consumes (or is left open, which admits a fresh vacuum mode).
//! Building validates the wiring — unique names, no dangling or doubly-used
//! outputs, no cycles, exactly one mode entering each crystal port — and
//! registers every vacuum mode the description implies. Evaluation then
//! propagates field expressions from sources to detectors in topological
//! order.

use crate::field::{
    apply_phase, combine_beam_splitter, ensemble_coincidence, ensemble_rate,
    monte_carlo_coincidence, monte_carlo_rate, spdc_emit_into, CrystalConfig, FieldError,
    FieldExpression, SeedBeam,
};
use crate::vacuum::{RegistryError, SealedRegistry, VacuumModeId, VacuumRegistry};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("duplicate element name {0:?}")]
    DuplicateElement(String),
    #[error("element {by:?} references unknown element {referenced:?}")]
    UnknownElement { referenced: String, by: String },
    #[error("element {by:?} references {element:?}.{slot:?}, which that element does not provide")]
    InvalidSlot {
        element: String,
        slot: OutSlot,
        by: String,
    },
    #[error("dangling port: output {element:?}.{slot:?} is not consumed")]
    DanglingPort { element: String, slot: OutSlot },
    #[error("output {element:?}.{slot:?} is consumed more than once")]
    OutputReused { element: String, slot: OutSlot },
    #[error("bench graph has a cycle through {0:?}")]
    Cycle(String),
    #[error("crystal port {port:?} carries {count} modes, needs exactly 1")]
    ModeCount { port: String, count: usize },
    #[error("polarizing splitter {0:?} needs an input with a definite polarization")]
    UnpolarizedPbsInput(String),
    #[error("unknown detector {0:?}")]
    UnknownDetector(String),
    #[error("no parameter {param:?} on element {element:?}")]
    UnknownBinding { element: String, param: ParamName },
    #[error("scan values must be strictly increasing")]
    NonMonotonicScan,
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Polarization tag carried per beam; sufficient for an ideal polarizing
/// splitter, no Jones calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Horizontal,
    Vertical,
}

/// Phase-matching arrangement: type I emits signal and idler co-polarized,
/// type II emits them orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrystalType {
    TypeI,
    TypeII,
}

/// Output slots an element can expose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutSlot {
    Signal,
    Idler,
    Out1,
    Out2,
    Out,
}

/// Reference to an upstream element output.
#[derive(Debug, Clone, PartialEq)]
pub struct PortRef {
    pub element: String,
    pub slot: OutSlot,
}

impl PortRef {
    pub fn new(element: impl Into<String>, slot: OutSlot) -> Self {
        Self {
            element: element.into(),
            slot,
        }
    }
}

/// An element input: either wired to an upstream output or left open, in
/// which case a fresh vacuum mode enters there.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Open,
    Port(PortRef),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    Crystal {
        config: CrystalConfig,
        crystal_type: CrystalType,
        signal_in: Input,
        idler_in: Input,
    },
    BeamSplitter {
        transmittance: f64,
        in1: Input,
        in2: Input,
    },
    PolarizingSplitter {
        input: PortRef,
    },
    Mirror {
        input: PortRef,
    },
    Delay {
        input: PortRef,
        phase: f64,
    },
    Attenuator {
        input: PortRef,
        transmittance: f64,
    },
    Detector {
        input: PortRef,
    },
}

impl ElementSpec {
    fn outputs(&self) -> &'static [OutSlot] {
        match self {
            ElementSpec::Crystal { .. } => &[OutSlot::Signal, OutSlot::Idler],
            ElementSpec::BeamSplitter { .. } | ElementSpec::PolarizingSplitter { .. } => {
                &[OutSlot::Out1, OutSlot::Out2]
            }
            ElementSpec::Mirror { .. } | ElementSpec::Delay { .. } | ElementSpec::Attenuator { .. } => {
                &[OutSlot::Out]
            }
            ElementSpec::Detector { .. } => &[],
        }
    }

    fn wired_inputs(&self) -> Vec<&PortRef> {
        fn openable<'a>(refs: &mut Vec<&'a PortRef>, input: &'a Input) {
            if let Input::Port(p) = input {
                refs.push(p);
            }
        }
        let mut refs = Vec::new();
        match self {
            ElementSpec::Crystal {
                signal_in, idler_in, ..
            } => {
                openable(&mut refs, signal_in);
                openable(&mut refs, idler_in);
            }
            ElementSpec::BeamSplitter { in1, in2, .. } => {
                openable(&mut refs, in1);
                openable(&mut refs, in2);
            }
            ElementSpec::PolarizingSplitter { input }
            | ElementSpec::Mirror { input }
            | ElementSpec::Delay { input, .. }
            | ElementSpec::Attenuator { input, .. }
            | ElementSpec::Detector { input } => refs.push(input),
        }
        refs
    }
}

/// Ordered list of named elements; the build step validates the wiring.
#[derive(Debug, Clone, Default)]
pub struct BenchDescription {
    pub elements: Vec<(String, ElementSpec)>,
}

impl BenchDescription {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, spec: ElementSpec) -> &mut Self {
        self.elements.push((name.into(), spec));
        self
    }
}

/// Tunable element parameters a scan can bind to or an override can set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamName {
    Gain,
    PumpAmplitude,
    PumpPhase,
    SeedAmplitude,
    SeedPhase,
    DelayPhase,
    Transmittance,
}

/// Parameter overrides applied at evaluation time, keyed by element name.
#[derive(Debug, Clone, Default)]
pub struct Overrides(BTreeMap<(String, ParamName), f64>);

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, element: impl Into<String>, param: ParamName, value: f64) -> Self {
        self.0.insert((element.into(), param), value);
        self
    }

    fn get(&self, element: &str, param: ParamName) -> Option<f64> {
        self.0.get(&(element.to_string(), param)).copied()
    }

    fn keys(&self) -> impl Iterator<Item = (&str, ParamName)> {
        self.0.iter().map(|((e, p), _)| (e.as_str(), *p))
    }
}

/// The swept parameter of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanBinding {
    pub element: String,
    pub param: ParamName,
}

impl ScanBinding {
    pub fn new(element: impl Into<String>, param: ParamName) -> Self {
        Self {
            element: element.into(),
            param,
        }
    }
}

/// How a scan converts detector expressions into numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanMode {
    /// Closed-form vacuum average.
    Analytic,
    /// Trial-sampled phasor average; mean and standard error per point.
    MonteCarlo { trials: u64, seed: u64 },
    /// Counts drawn from Poisson(rate × scale × integration) per point.
    Poisson {
        seed: u64,
        /// Counts per second per unit dimensionless rate.
        scale: f64,
        /// Integration time per point, seconds.
        integration: f64,
    },
}

impl ScanMode {
    pub fn tag(&self) -> &'static str {
        match self {
            ScanMode::Analytic => "analytic",
            ScanMode::MonteCarlo { .. } => "mc",
            ScanMode::Poisson { .. } => "poisson",
        }
    }
}

/// Samples of one detector while one parameter is swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub parameter: Vec<f64>,
    /// Rates (ANALYTIC/MONTE_CARLO) or counts (POISSON), one per parameter.
    pub rates: Vec<f64>,
    /// Per-point standard errors; empty in ANALYTIC mode.
    pub std_errors: Vec<f64>,
    pub detector: String,
    pub mode: ScanMode,
}

#[derive(Debug)]
enum Source {
    Open(VacuumModeId),
    Port(usize, OutSlot),
}

#[derive(Debug)]
enum Node {
    Crystal {
        config: CrystalConfig,
        crystal_type: CrystalType,
        signal_in: Source,
        idler_in: Source,
    },
    BeamSplitter {
        transmittance: f64,
        in1: SplitterSource,
        in2: SplitterSource,
    },
    PolarizingSplitter {
        input: (usize, OutSlot),
    },
    Mirror {
        input: (usize, OutSlot),
    },
    Delay {
        input: (usize, OutSlot),
        phase: f64,
    },
    Attenuator {
        input: (usize, OutSlot),
        transmittance: f64,
    },
    Detector {
        input: (usize, OutSlot),
    },
}

#[derive(Debug)]
enum SplitterSource {
    /// Open splitter port: vacuum enters but never clicks; modeled as the
    /// registered bare mode so unitarity bookkeeping stays exact.
    Open(VacuumModeId),
    Port(usize, OutSlot),
}

#[derive(Clone)]
struct Beam {
    expression: FieldExpression,
    polarization: Option<Polarization>,
}

/// Executable bench: validated wiring, sealed vacuum registry, topological
/// evaluation order.
#[derive(Debug)]
pub struct Bench {
    names: Vec<String>,
    nodes: Vec<Node>,
    order: Vec<usize>,
    detectors: BTreeMap<String, usize>,
    registry: SealedRegistry,
}

/// Validate a description and produce an executable bench.
pub fn build_bench(desc: &BenchDescription) -> Result<Bench, BenchError> {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, (name, _)) in desc.elements.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(BenchError::DuplicateElement(name.clone()));
        }
    }

    let resolve = |port: &PortRef, by: &str| -> Result<(usize, OutSlot), BenchError> {
        let &idx = index
            .get(port.element.as_str())
            .ok_or_else(|| BenchError::UnknownElement {
                referenced: port.element.clone(),
                by: by.to_string(),
            })?;
        if !desc.elements[idx].1.outputs().contains(&port.slot) {
            return Err(BenchError::InvalidSlot {
                element: port.element.clone(),
                slot: port.slot,
                by: by.to_string(),
            });
        }
        Ok((idx, port.slot))
    };

    // Every output must be consumed exactly once.
    let mut consumers: BTreeMap<(usize, OutSlot), &str> = BTreeMap::new();
    for (name, spec) in &desc.elements {
        for port in spec.wired_inputs() {
            let key = resolve(port, name)?;
            if consumers.insert(key, name).is_some() {
                return Err(BenchError::OutputReused {
                    element: port.element.clone(),
                    slot: port.slot,
                });
            }
        }
    }
    for (i, (name, spec)) in desc.elements.iter().enumerate() {
        for &slot in spec.outputs() {
            if !consumers.contains_key(&(i, slot)) {
                return Err(BenchError::DanglingPort {
                    element: name.clone(),
                    slot,
                });
            }
        }
    }

    // Kahn topological sort over element dependencies.
    let n = desc.elements.len();
    let mut indegree = vec![0usize; n];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (name, spec)) in desc.elements.iter().enumerate() {
        for port in spec.wired_inputs() {
            let (src, _) = resolve(port, name)?;
            indegree[i] += 1;
            dependents[src].push(i);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop() {
        order.push(i);
        for &d in &dependents[i] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(d);
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
        return Err(BenchError::Cycle(desc.elements[stuck].0.clone()));
    }

    // Register vacuum modes for every open input, in description order.
    let mut registry = VacuumRegistry::new();
    let mut nodes = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    let mut detectors = BTreeMap::new();
    for (i, (name, spec)) in desc.elements.iter().enumerate() {
        let node = match spec {
            ElementSpec::Crystal {
                config,
                crystal_type,
                signal_in,
                idler_in,
            } => {
                config.validate()?;
                let mut source = |input: &Input, port: &str| -> Result<Source, BenchError> {
                    Ok(match input {
                        Input::Open => {
                            Source::Open(registry.register(&format!("{name}.{port}-vac"))?)
                        }
                        Input::Port(p) => {
                            let (idx, slot) = resolve(p, name)?;
                            Source::Port(idx, slot)
                        }
                    })
                };
                Node::Crystal {
                    config: config.clone(),
                    crystal_type: *crystal_type,
                    signal_in: source(signal_in, "signal")?,
                    idler_in: source(idler_in, "idler")?,
                }
            }
            ElementSpec::BeamSplitter {
                transmittance,
                in1,
                in2,
            } => {
                if !(0.0..=1.0).contains(transmittance) {
                    return Err(BenchError::Field(FieldError::InvalidTransmittance(
                        *transmittance,
                    )));
                }
                let mut source = |input: &Input, port: &str| -> Result<SplitterSource, BenchError> {
                    Ok(match input {
                        Input::Open => {
                            SplitterSource::Open(registry.register(&format!("{name}.{port}-vac"))?)
                        }
                        Input::Port(p) => {
                            let (idx, slot) = resolve(p, name)?;
                            SplitterSource::Port(idx, slot)
                        }
                    })
                };
                Node::BeamSplitter {
                    transmittance: *transmittance,
                    in1: source(in1, "in1")?,
                    in2: source(in2, "in2")?,
                }
            }
            ElementSpec::PolarizingSplitter { input } => Node::PolarizingSplitter {
                input: resolve(input, name)?,
            },
            ElementSpec::Mirror { input } => Node::Mirror {
                input: resolve(input, name)?,
            },
            ElementSpec::Delay { input, phase } => Node::Delay {
                input: resolve(input, name)?,
                phase: *phase,
            },
            ElementSpec::Attenuator {
                input,
                transmittance,
            } => Node::Attenuator {
                input: resolve(input, name)?,
                transmittance: *transmittance,
            },
            ElementSpec::Detector { input } => {
                detectors.insert(name.clone(), i);
                Node::Detector {
                    input: resolve(input, name)?,
                }
            }
        };
        nodes.push(node);
        names.push(name.clone());
    }

    let bench = Bench {
        names,
        nodes,
        order,
        detectors,
        registry: registry.seal(),
    };
    // Static discipline checks: one mode per crystal port, polarization
    // defined at every polarizing splitter.
    bench.evaluate(&Overrides::new())?;
    Ok(bench)
}

impl Bench {
    pub fn registry(&self) -> &SealedRegistry {
        &self.registry
    }

    pub fn detectors(&self) -> impl Iterator<Item = &str> {
        self.detectors.keys().map(String::as_str)
    }

    fn binding_exists(&self, element: &str, param: ParamName) -> bool {
        let Some(idx) = self.names.iter().position(|n| n.as_str() == element) else {
            return false;
        };
        match (&self.nodes[idx], param) {
            (Node::Crystal { .. }, ParamName::Gain | ParamName::PumpAmplitude | ParamName::PumpPhase) => true,
            (Node::Crystal { config, .. }, ParamName::SeedAmplitude | ParamName::SeedPhase) => {
                config.seed.is_some()
            }
            (Node::Delay { .. }, ParamName::DelayPhase) => true,
            (Node::BeamSplitter { .. } | Node::Attenuator { .. }, ParamName::Transmittance) => true,
            _ => false,
        }
    }

    fn check_overrides(&self, overrides: &Overrides) -> Result<(), BenchError> {
        for (element, param) in overrides.keys() {
            if !self.binding_exists(element, param) {
                return Err(BenchError::UnknownBinding {
                    element: element.to_string(),
                    param,
                });
            }
        }
        Ok(())
    }

    /// Propagate field expressions from sources to every detector.
    pub fn evaluate(
        &self,
        overrides: &Overrides,
    ) -> Result<BTreeMap<String, FieldExpression>, BenchError> {
        self.check_overrides(overrides)?;
        let mut ports: BTreeMap<(usize, OutSlot), Beam> = BTreeMap::new();
        let mut results = BTreeMap::new();
        for &i in &self.order {
            let name = &self.names[i];
            let take = |ports: &BTreeMap<(usize, OutSlot), Beam>, key: (usize, OutSlot)| -> Beam {
                ports.get(&key).expect("topological order").clone()
            };
            match &self.nodes[i] {
                Node::Crystal {
                    config,
                    crystal_type,
                    signal_in,
                    idler_in,
                } => {
                    let mut cfg = config.clone();
                    if let Some(v) = overrides.get(name, ParamName::Gain) {
                        cfg.gain = v;
                    }
                    if let Some(v) = overrides.get(name, ParamName::PumpAmplitude) {
                        cfg.pump_amplitude = v;
                    }
                    if let Some(v) = overrides.get(name, ParamName::PumpPhase) {
                        cfg.pump_phase = v;
                    }
                    if let Some(seed) = &mut cfg.seed {
                        if let Some(v) = overrides.get(name, ParamName::SeedAmplitude) {
                            seed.amplitude = v;
                        }
                        if let Some(v) = overrides.get(name, ParamName::SeedPhase) {
                            seed.phase = v;
                        }
                    }
                    let fetch = |src: &Source, port: &str| match src {
                        Source::Open(id) => Beam {
                            expression: FieldExpression::bare_vacuum(*id, format!("{name}.{port}")),
                            polarization: None,
                        },
                        Source::Port(idx, slot) => take(&ports, (*idx, *slot)),
                    };
                    let s_in = fetch(signal_in, "signal");
                    let i_in = fetch(idler_in, "idler");
                    for (beam, port) in [(&s_in, "signal"), (&i_in, "idler")] {
                        let bare = beam
                            .expression
                            .terms
                            .iter()
                            .filter(|t| {
                                t.event_tag.is_none()
                                    && matches!(t.carrier, crate::field::PhaseCarrier::Vacuum(_))
                            })
                            .count();
                        if bare != 1 {
                            return Err(BenchError::ModeCount {
                                port: format!("{name}.{port}"),
                                count: bare,
                            });
                        }
                    }
                    let (sig, idl) = spdc_emit_into(&cfg, &s_in.expression, &i_in.expression, name)?;
                    let (sig_pol, idl_pol) = match crystal_type {
                        CrystalType::TypeI => {
                            (Some(Polarization::Horizontal), Some(Polarization::Horizontal))
                        }
                        CrystalType::TypeII => {
                            (Some(Polarization::Horizontal), Some(Polarization::Vertical))
                        }
                    };
                    ports.insert(
                        (i, OutSlot::Signal),
                        Beam {
                            expression: sig,
                            polarization: sig_pol,
                        },
                    );
                    ports.insert(
                        (i, OutSlot::Idler),
                        Beam {
                            expression: idl,
                            polarization: idl_pol,
                        },
                    );
                }
                Node::BeamSplitter {
                    transmittance,
                    in1,
                    in2,
                } => {
                    let t = overrides
                        .get(name, ParamName::Transmittance)
                        .unwrap_or(*transmittance);
                    let fetch = |src: &SplitterSource, port: &str| match src {
                        SplitterSource::Open(id) => Beam {
                            expression: FieldExpression::bare_vacuum(*id, format!("{name}.{port}")),
                            polarization: None,
                        },
                        SplitterSource::Port(idx, slot) => take(&ports, (*idx, *slot)),
                    };
                    let b1 = fetch(in1, "in1");
                    let b2 = fetch(in2, "in2");
                    let (o1, o2) = combine_beam_splitter(&b1.expression, &b2.expression, t)?;
                    let pol = match (b1.polarization, b2.polarization) {
                        (Some(p), Some(q)) if p == q => Some(p),
                        (Some(p), None) | (None, Some(p)) => Some(p),
                        _ => None,
                    };
                    ports.insert(
                        (i, OutSlot::Out1),
                        Beam {
                            expression: o1,
                            polarization: pol,
                        },
                    );
                    ports.insert(
                        (i, OutSlot::Out2),
                        Beam {
                            expression: o2,
                            polarization: pol,
                        },
                    );
                }
                Node::PolarizingSplitter { input } => {
                    let beam = take(&ports, *input);
                    let pol = beam
                        .polarization
                        .ok_or_else(|| BenchError::UnpolarizedPbsInput(name.clone()))?;
                    let empty = Beam {
                        expression: FieldExpression::new(format!("{name}.empty")),
                        polarization: None,
                    };
                    let (h, v) = match pol {
                        Polarization::Horizontal => (beam, empty),
                        Polarization::Vertical => (empty, beam),
                    };
                    ports.insert((i, OutSlot::Out1), h);
                    ports.insert((i, OutSlot::Out2), v);
                }
                Node::Mirror { input } => {
                    let beam = take(&ports, *input);
                    ports.insert(
                        (i, OutSlot::Out),
                        Beam {
                            expression: beam.expression.scale(Complex64::i()),
                            polarization: beam.polarization,
                        },
                    );
                }
                Node::Delay { input, phase } => {
                    let beam = take(&ports, *input);
                    let phi = overrides.get(name, ParamName::DelayPhase).unwrap_or(*phase);
                    ports.insert(
                        (i, OutSlot::Out),
                        Beam {
                            expression: apply_phase(&beam.expression, phi),
                            polarization: beam.polarization,
                        },
                    );
                }
                Node::Attenuator {
                    input,
                    transmittance,
                } => {
                    let beam = take(&ports, *input);
                    let t = overrides
                        .get(name, ParamName::Transmittance)
                        .unwrap_or(*transmittance)
                        .clamp(0.0, 1.0);
                    ports.insert(
                        (i, OutSlot::Out),
                        Beam {
                            expression: beam.expression.scale(Complex64::new(t.sqrt(), 0.0)),
                            polarization: beam.polarization,
                        },
                    );
                }
                Node::Detector { input } => {
                    let beam = take(&ports, *input);
                    let mut expr = beam.expression;
                    expr.port_label = name.clone();
                    results.insert(name.clone(), expr);
                }
            }
        }
        Ok(results)
    }

    fn run_scan<F>(
        &self,
        detector_label: String,
        binding: &ScanBinding,
        values: &[f64],
        mode: ScanMode,
        overrides: &Overrides,
        rate_of: F,
    ) -> Result<FringeScan, BenchError>
    where
        F: Fn(&BTreeMap<String, FieldExpression>, &ScanMode) -> Result<(f64, Option<f64>), BenchError>,
    {
        if !self.binding_exists(&binding.element, binding.param) {
            return Err(BenchError::UnknownBinding {
                element: binding.element.clone(),
                param: binding.param,
            });
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BenchError::NonMonotonicScan);
        }
        let mut rates = Vec::with_capacity(values.len());
        let mut std_errors = Vec::new();
        for (k, &v) in values.iter().enumerate() {
            let point_overrides = overrides
                .clone()
                .set(binding.element.clone(), binding.param, v);
            let fields = self.evaluate(&point_overrides)?;
            let (rate, stderr) = rate_of(&fields, &mode)?;
            let (rate, stderr) = match mode {
                ScanMode::Poisson {
                    seed,
                    scale,
                    integration,
                } => {
                    let count = poisson_count(rate, scale, integration, seed, k as u64);
                    (count, Some(count.sqrt()))
                }
                _ => (rate, stderr),
            };
            rates.push(rate);
            if let Some(s) = stderr {
                std_errors.push(s);
            }
        }
        Ok(FringeScan {
            parameter: values.to_vec(),
            rates,
            std_errors,
            detector: detector_label,
            mode,
        })
    }

    /// Sweep `binding` over `values` and record the rate at one detector.
    pub fn scan(
        &self,
        detector: &str,
        binding: &ScanBinding,
        values: &[f64],
        mode: ScanMode,
    ) -> Result<FringeScan, BenchError> {
        self.scan_with(detector, binding, values, mode, &Overrides::new())
    }

    /// Like [`Bench::scan`] with fixed extra overrides applied at every point.
    pub fn scan_with(
        &self,
        detector: &str,
        binding: &ScanBinding,
        values: &[f64],
        mode: ScanMode,
        overrides: &Overrides,
    ) -> Result<FringeScan, BenchError> {
        if !self.detectors.contains_key(detector) {
            return Err(BenchError::UnknownDetector(detector.to_string()));
        }
        let registry = self.registry.clone();
        let det = detector.to_string();
        self.run_scan(
            det.clone(),
            binding,
            values,
            mode,
            overrides,
            move |fields, mode| {
                let expr = &fields[&det];
                Ok(match mode {
                    ScanMode::MonteCarlo { trials, seed } => {
                        let est = monte_carlo_rate(expr, &registry, *seed, *trials)?;
                        (est.mean, Some(est.std_error))
                    }
                    _ => (ensemble_rate(expr), None),
                })
            },
        )
    }

    /// Coincidence fringe between two detectors.
    pub fn coincidence_scan(
        &self,
        detector_a: &str,
        detector_b: &str,
        binding: &ScanBinding,
        values: &[f64],
        mode: ScanMode,
    ) -> Result<FringeScan, BenchError> {
        self.coincidence_scan_with(detector_a, detector_b, binding, values, mode, &Overrides::new())
    }

    pub fn coincidence_scan_with(
        &self,
        detector_a: &str,
        detector_b: &str,
        binding: &ScanBinding,
        values: &[f64],
        mode: ScanMode,
        overrides: &Overrides,
    ) -> Result<FringeScan, BenchError> {
        for d in [detector_a, detector_b] {
            if !self.detectors.contains_key(d) {
                return Err(BenchError::UnknownDetector(d.to_string()));
            }
        }
        let registry = self.registry.clone();
        let (da, db) = (detector_a.to_string(), detector_b.to_string());
        self.run_scan(
            format!("{detector_a}x{detector_b}"),
            binding,
            values,
            mode,
            overrides,
            move |fields, mode| {
                let a = &fields[&da];
                let b = &fields[&db];
                Ok(match mode {
                    ScanMode::MonteCarlo { trials, seed } => {
                        let est = monte_carlo_coincidence(a, b, &registry, *seed, *trials)?;
                        (est.mean, Some(est.std_error))
                    }
                    _ => (ensemble_coincidence(a, b), None),
                })
            },
        )
    }
}

/// Helper for seed beams used by scenario builders.
pub fn seed_beam(amplitude: f64, phase: f64, reference: &str) -> SeedBeam {
    SeedBeam {
        amplitude,
        phase,
        reference: reference.to_string(),
    }
}

/// One Poisson draw for a scan point, on its own counter-derived substream.
pub fn poisson_count(rate: f64, scale: f64, integration: f64, seed: u64, point: u64) -> f64 {
    let lambda = rate * scale * integration;
    if lambda <= 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point);
    Poisson::new(lambda).expect("positive lambda").sample(&mut rng)
}
