//! Built-in experiment scenarios: parameter schemas, bench construction,
//! execution and result bundling.
//!
//! Five experiments are available:
//!
//! * `three_crystal` — induced coherence with three crystals: two vacuum-mode
//!   alignments chain the crystals so one detector sees coherent signal
//!   fringes over an incoherent background while the other sees the idler
//!   counterpart. Unpumping the background crystal restores full visibility.
//! * `stimulated_sequential` / `stimulated_parallel` — a coherent seed in the
//!   idler channels overwrites the random vacuum phases; the fringe
//!   visibility climbs as n/(n+1) with the mean seed photon number n.
//! * `spatial_mz` — two displaced TEM₀₀ detection modes on the emission cone
//!   fed into a Mach-Zehnder: lateral coherence falls off with the mode
//!   overlap while coincidence marking makes the modes distinguishable.
//! * `tem01_double_slit` — a TEM₀₁-pumped pair source imaged onto a double
//!   slit: an idler detector position scan trades visibility against
//!   which-slit knowledge at D² + V² = 1.
//!
//! Every parameter has a typed default; unknown keys are rejected with the
//! nearest valid name. Runs are deterministic for a fixed seed.

use crate::analysis::{duality_report, visibility, DualityReport, Visibility, VisibilityMethod};
use crate::bench::{
    build_bench, poisson_count, BenchDescription, BenchError, CrystalType, ElementSpec, FringeScan,
    Input, ParamName, PortRef, ScanBinding, ScanMode, OutSlot,
};
use crate::field::{
    apply_phase, combine_beam_splitter, ensemble_rate, monte_carlo_rate, CrystalConfig,
    FieldError, FieldExpression, FieldTerm, PhaseCarrier, SeedBeam,
};
use crate::modes::HermiteGaussMode;
use crate::spatial::{
    calibrate_correlation_width, conditional_signal_amplitude, cone_mode_coherence,
    slit_far_field, vd_at_idler_position, BiphotonAmplitude, SlitGeometry, SpatialError,
};
use crate::vacuum::VacuumRegistry;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("unknown parameter {key:?}{}", nearest.as_ref().map(|n| format!(" (did you mean {n:?}?)")).unwrap_or_default())]
    UnknownParameter { key: String, nearest: Option<String> },
    #[error("parameter {key:?} expects {expected}, got {got}")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        got: String,
    },
    #[error("invalid value for {key:?}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error("analysis failed for {scan}: {source}")]
    Analysis {
        scan: String,
        source: crate::analysis::AnalysisError,
    },
}

/// The five built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    ThreeCrystal,
    StimulatedSequential,
    StimulatedParallel,
    SpatialMz,
    Tem01DoubleSlit,
}

impl ScenarioKind {
    pub fn all() -> [ScenarioKind; 5] {
        [
            ScenarioKind::ThreeCrystal,
            ScenarioKind::StimulatedSequential,
            ScenarioKind::StimulatedParallel,
            ScenarioKind::SpatialMz,
            ScenarioKind::Tem01DoubleSlit,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ThreeCrystal => "three_crystal",
            ScenarioKind::StimulatedSequential => "stimulated_sequential",
            ScenarioKind::StimulatedParallel => "stimulated_parallel",
            ScenarioKind::SpatialMz => "spatial_mz",
            ScenarioKind::Tem01DoubleSlit => "tem01_double_slit",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioKind::ThreeCrystal => {
                "three-crystal induced coherence: fringes over an incoherent background"
            }
            ScenarioKind::StimulatedSequential => {
                "two crystals in series, idler vacuum overwritten by a seed laser"
            }
            ScenarioKind::StimulatedParallel => {
                "two crystals in parallel, idler vacuum overwritten by a seed laser"
            }
            ScenarioKind::SpatialMz => {
                "lateral coherence of two TEM00 detection modes on the emission cone"
            }
            ScenarioKind::Tem01DoubleSlit => {
                "TEM01 pair source on a double slit with a scanned idler reference"
            }
        }
    }

    pub fn parse(name: &str) -> Result<Self, ScenarioError> {
        Self::all()
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
    }

    pub fn params(&self) -> &'static [ParamSpec] {
        match self {
            ScenarioKind::ThreeCrystal => THREE_CRYSTAL_PARAMS,
            ScenarioKind::StimulatedSequential => STIM_SEQUENTIAL_PARAMS,
            ScenarioKind::StimulatedParallel => STIM_PARALLEL_PARAMS,
            ScenarioKind::SpatialMz => SPATIAL_MZ_PARAMS,
            ScenarioKind::Tem01DoubleSlit => TEM01_PARAMS,
        }
    }
}

/// A typed parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(u64),
    Float(f64),
    Text(String),
}

impl ParamValue {
    fn type_name(&self) -> &'static str {
        match self {
            ParamValue::Int(_) => "integer",
            ParamValue::Float(_) => "float",
            ParamValue::Text(_) => "text",
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

/// Declared default for one scenario parameter.
#[derive(Debug, Clone, Copy)]
pub enum ParamDefault {
    Float(f64),
    Int(u64),
    Text(&'static str),
}

impl ParamDefault {
    pub fn to_value(self) -> ParamValue {
        match self {
            ParamDefault::Float(v) => ParamValue::Float(v),
            ParamDefault::Int(v) => ParamValue::Int(v),
            ParamDefault::Text(v) => ParamValue::Text(v.to_string()),
        }
    }
}

/// One documented scenario parameter.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: ParamDefault,
    pub doc: &'static str,
}

pub const THREE_CRYSTAL_PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "gain1", default: ParamDefault::Float(0.1), doc: "parametric gain of crystal BBO1" },
    ParamSpec { key: "gain2", default: ParamDefault::Float(0.1), doc: "parametric gain of crystal BBO2 (0 switches it off)" },
    ParamSpec { key: "gain3", default: ParamDefault::Float(0.1), doc: "parametric gain of crystal BBO3 (0 switches it off)" },
    ParamSpec { key: "pump_amplitude", default: ParamDefault::Float(1.0), doc: "common pump amplitude" },
    ParamSpec { key: "scan_points", default: ParamDefault::Int(33), doc: "samples across one 2π pump-delay period" },
    ParamSpec {
        key: "alignment",
        default: ParamDefault::Text("bbo3"),
        doc: "which crystal shares BBO1's idler mode: \"bbo3\" pairs s1 with s3 at detector A \
              (BBO2 is the background there; unpumping BBO2 restores V=1 at A, unpumping BBO3 \
              restores V=1 at D), \"bbo2\" is the published arrangement pairing s1 with s2 at A",
    },
];

pub const STIM_SEQUENTIAL_PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "gain", default: ParamDefault::Float(0.1), doc: "parametric gain of both crystals" },
    ParamSpec { key: "pump_amplitude", default: ParamDefault::Float(1.0), doc: "common pump amplitude" },
    ParamSpec { key: "seed_photon_number", default: ParamDefault::Float(19.0), doc: "mean seed photon number n; fringe visibility is n/(n+1)" },
    ParamSpec { key: "scan_points", default: ParamDefault::Int(33), doc: "samples across one 2π pump-delay period" },
];

pub const STIM_PARALLEL_PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "gain", default: ParamDefault::Float(0.1), doc: "parametric gain of both crystals" },
    ParamSpec { key: "pump_amplitude", default: ParamDefault::Float(1.0), doc: "common pump amplitude" },
    ParamSpec { key: "seed_photon_number", default: ParamDefault::Float(49.0), doc: "mean seed photon number n; fringe visibility is n/(n+1)" },
    ParamSpec { key: "scan_points", default: ParamDefault::Int(33), doc: "samples across one 2π pump-delay period" },
];

pub const SPATIAL_MZ_PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "waist", default: ParamDefault::Float(100.0), doc: "TEM00 detection-mode waist, micrometers (placeholder, not a measured value)" },
    ParamSpec { key: "background_fraction", default: ParamDefault::Float(0.0), doc: "uncorrected incoherent background fraction entering the visibility" },
    ParamSpec { key: "separation_max_w0", default: ParamDefault::Float(4.0), doc: "largest mode separation of the V/D table, in waist units" },
    ParamSpec { key: "separation_points", default: ParamDefault::Int(41), doc: "rows of the V/D table" },
    ParamSpec { key: "scan_points", default: ParamDefault::Int(33), doc: "samples across one 2π Mach-Zehnder delay period" },
    ParamSpec { key: "emitters", default: ParamDefault::Int(64), doc: "independent cone emitters in the discretized source" },
];

pub const TEM01_PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "waist", default: ParamDefault::Float(100.0), doc: "pump-mode waist, micrometers (placeholder, not a measured value)" },
    ParamSpec { key: "wavelength", default: ParamDefault::Float(0.702), doc: "down-converted wavelength, micrometers (placeholder, not a measured value)" },
    ParamSpec { key: "sigma_c", default: ParamDefault::Float(0.0), doc: "signal-idler correlation width, micrometers; 0 calibrates it to the hump-correlation target" },
    ParamSpec { key: "hump_correlation_target", default: ParamDefault::Float(0.96), doc: "same-hump correlation used to calibrate sigma_c" },
    ParamSpec { key: "slit_width_w0", default: ParamDefault::Float(0.25), doc: "slit width in waist units" },
    ParamSpec { key: "idler_scan_halfwidth_w0", default: ParamDefault::Float(3.0), doc: "idler detector scan half-range in waist units" },
    ParamSpec { key: "idler_scan_points", default: ParamDefault::Int(121), doc: "idler positions in the V/D scan" },
    ParamSpec { key: "screen_samples", default: ParamDefault::Int(1024), doc: "angular samples of the far-field screen" },
    ParamSpec { key: "screen_periods", default: ParamDefault::Float(10.0), doc: "fringe periods covered either side of the axis" },
];

/// Suggest the closest candidate for a misspelled key.
pub fn nearest_key<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    fn distance(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        let mut cur = vec![0; b.len() + 1];
        for (i, ca) in a.iter().enumerate() {
            cur[0] = i + 1;
            for (j, cb) in b.iter().enumerate() {
                let sub = prev[j] + usize::from(ca != cb);
                cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[b.len()]
    }
    candidates
        .map(|c| (distance(key, c), c))
        .min_by_key(|&(d, _)| d)
        .filter(|&(d, _)| d <= 3)
        .map(|(_, c)| c.to_string())
}

/// Rate conversion applied to every scan of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RunMode {
    Analytic,
    MonteCarlo { trials: u64 },
    Poisson { scale: f64, integration: f64 },
}

impl RunMode {
    fn scan_mode(&self, seed: u64) -> ScanMode {
        match *self {
            RunMode::Analytic => ScanMode::Analytic,
            RunMode::MonteCarlo { trials } => ScanMode::MonteCarlo { trials, seed },
            RunMode::Poisson { scale, integration } => ScanMode::Poisson {
                seed,
                scale,
                integration,
            },
        }
    }
}

/// A validated scenario: kind, parameters, execution mode and seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    values: BTreeMap<String, ParamValue>,
    pub mode: RunMode,
    pub seed: u64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        let values = kind
            .params()
            .iter()
            .map(|p| (p.key.to_string(), p.default.to_value()))
            .collect();
        Self {
            kind,
            values,
            mode: RunMode::Analytic,
            seed: 1,
        }
    }

    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Override one parameter; unknown keys are rejected with a suggestion,
    /// type mismatches name the expected type. Integers coerce to floats.
    pub fn set(&mut self, key: &str, value: ParamValue) -> Result<(), ScenarioError> {
        let Some(spec) = self.kind.params().iter().find(|p| p.key == key) else {
            return Err(ScenarioError::UnknownParameter {
                key: key.to_string(),
                nearest: nearest_key(key, self.kind.params().iter().map(|p| p.key)),
            });
        };
        let coerced = match (&spec.default, value) {
            (ParamDefault::Float(_), ParamValue::Float(v)) => ParamValue::Float(v),
            (ParamDefault::Float(_), ParamValue::Int(v)) => ParamValue::Float(v as f64),
            (ParamDefault::Int(_), ParamValue::Int(v)) => ParamValue::Int(v),
            (ParamDefault::Text(_), ParamValue::Text(v)) => ParamValue::Text(v),
            (_, got) => {
                return Err(ScenarioError::TypeMismatch {
                    key: key.to_string(),
                    expected: match spec.default {
                        ParamDefault::Float(_) => "float",
                        ParamDefault::Int(_) => "integer",
                        ParamDefault::Text(_) => "text",
                    },
                    got: got.type_name().to_string(),
                })
            }
        };
        self.values.insert(key.to_string(), coerced);
        Ok(())
    }

    pub fn parameters(&self) -> &BTreeMap<String, ParamValue> {
        &self.values
    }

    fn f64(&self, key: &str) -> f64 {
        match &self.values[key] {
            ParamValue::Float(v) => *v,
            ParamValue::Int(v) => *v as f64,
            ParamValue::Text(_) => unreachable!("schema guarantees numeric {key}"),
        }
    }

    fn u64(&self, key: &str) -> u64 {
        match &self.values[key] {
            ParamValue::Int(v) => *v,
            _ => unreachable!("schema guarantees integer {key}"),
        }
    }

    fn text(&self, key: &str) -> &str {
        match &self.values[key] {
            ParamValue::Text(v) => v,
            _ => unreachable!("schema guarantees text {key}"),
        }
    }
}

/// One named scan of a result bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedScan {
    pub name: String,
    pub scan: FringeScan,
}

/// One named duality report of a result bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub report: DualityReport,
}

/// Position-resolved V/D table (idler position or mode separation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdTable {
    pub parameter_name: String,
    /// Rows of (parameter, V, D, D² + V²).
    pub rows: Vec<[f64; 4]>,
}

/// Everything a run produces, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub mode: RunMode,
    pub parameters: BTreeMap<String, ParamValue>,
    pub scans: Vec<NamedScan>,
    pub vd_table: Option<VdTable>,
    pub duality: Vec<NamedReport>,
}

/// Closed-form visibility of the seeded two-path arrangement: coherent
/// stimulated amplitude √n per path over a unit-variance spontaneous term
/// per path gives V = n/(n+1).
pub fn stimulated_visibility(n: f64) -> f64 {
    n / (n + 1.0)
}

fn phase_grid(points: u64) -> Vec<f64> {
    let n = points.max(2);
    let step = std::f64::consts::TAU / (n - 1) as f64;
    (0..n).map(|k| k as f64 * step).collect()
}

fn fit_visibility(
    scan: &FringeScan,
    name: &str,
    method: VisibilityMethod,
) -> Result<Visibility, ScenarioError> {
    visibility(scan, method).map_err(|source| ScenarioError::Analysis {
        scan: name.to_string(),
        source,
    })
}

impl Scenario {
    /// Execute the scenario. Deterministic for a fixed seed.
    pub fn run(&self) -> Result<ResultBundle, ScenarioError> {
        let mut bundle = ResultBundle {
            scenario: self.kind.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            mode: self.mode,
            parameters: self.values.clone(),
            scans: Vec::new(),
            vd_table: None,
            duality: Vec::new(),
        };
        match self.kind {
            ScenarioKind::ThreeCrystal => self.run_three_crystal(&mut bundle)?,
            ScenarioKind::StimulatedSequential => self.run_stimulated(&mut bundle, true)?,
            ScenarioKind::StimulatedParallel => self.run_stimulated(&mut bundle, false)?,
            ScenarioKind::SpatialMz => self.run_spatial_mz(&mut bundle)?,
            ScenarioKind::Tem01DoubleSlit => self.run_tem01(&mut bundle)?,
        }
        Ok(bundle)
    }

    /// Extraction method for the headline visibility reports: exact analytic
    /// scans of the seeded benches use raw extrema (the extrema land on the
    /// sampling grid, keeping the sequential/parallel variants bit-identical);
    /// everything else goes through the sinusoid fit.
    fn visibility_method(&self) -> VisibilityMethod {
        match (self.kind, self.mode) {
            (
                ScenarioKind::StimulatedSequential | ScenarioKind::StimulatedParallel,
                RunMode::Analytic,
            ) => VisibilityMethod::RawExtrema,
            _ => VisibilityMethod::SinusoidFit,
        }
    }

    fn run_three_crystal(&self, bundle: &mut ResultBundle) -> Result<(), ScenarioError> {
        let alignment = self.text("alignment");
        if alignment != "bbo3" && alignment != "bbo2" {
            return Err(ScenarioError::InvalidValue {
                key: "alignment".into(),
                reason: format!("expected \"bbo3\" or \"bbo2\", got {alignment:?}"),
            });
        }
        let desc = three_crystal_bench(
            [self.f64("gain1"), self.f64("gain2"), self.f64("gain3")],
            self.f64("pump_amplitude"),
            alignment == "bbo3",
        );
        let bench = build_bench(&desc)?;
        let values = phase_grid(self.u64("scan_points"));
        let binding = ScanBinding::new("bbo1", ParamName::PumpPhase);
        let mode = self.mode.scan_mode(self.seed);
        for det in ["A", "A2", "D", "D2"] {
            let scan = bench.scan(det, &binding, &values, mode)?;
            bundle.scans.push(NamedScan {
                name: det.to_string(),
                scan,
            });
        }
        // Headline visibilities at the two primary detectors. No which-path
        // reference is wired in this arrangement, so D = 0 by definition.
        for det in ["A", "D"] {
            let scan = &bundle.scans.iter().find(|s| s.name == det).unwrap().scan;
            let v = fit_visibility(scan, det, self.visibility_method())?;
            bundle.duality.push(NamedReport {
                name: det.to_string(),
                report: duality_report(v, 0.0, 0.0),
            });
        }
        Ok(())
    }

    fn run_stimulated(&self, bundle: &mut ResultBundle, sequential: bool) -> Result<(), ScenarioError> {
        let n = self.f64("seed_photon_number");
        if n < 0.0 {
            return Err(ScenarioError::InvalidValue {
                key: "seed_photon_number".into(),
                reason: format!("must be >= 0, got {n}"),
            });
        }
        let desc = stimulated_bench(
            self.f64("gain"),
            self.f64("pump_amplitude"),
            n.sqrt(),
            sequential,
        );
        let bench = build_bench(&desc)?;
        let values = phase_grid(self.u64("scan_points"));
        // Both variants sweep the delay of pump 3.
        let binding = ScanBinding::new("bbo3", ParamName::PumpPhase);
        let mode = self.mode.scan_mode(self.seed);
        for det in ["A", "A2"] {
            let scan = bench.scan(det, &binding, &values, mode)?;
            bundle.scans.push(NamedScan {
                name: det.to_string(),
                scan,
            });
        }
        let scan = &bundle.scans[0].scan;
        let v = fit_visibility(scan, "A", self.visibility_method())?;
        bundle.duality.push(NamedReport {
            name: "A".to_string(),
            report: duality_report(v, 0.0, 0.0),
        });
        Ok(())
    }

    fn run_spatial_mz(&self, bundle: &mut ResultBundle) -> Result<(), ScenarioError> {
        let waist = self.f64("waist");
        let background = self.f64("background_fraction");
        let emitters = self.u64("emitters").max(8) as usize;
        let delays = phase_grid(self.u64("scan_points"));

        // Fringe scans at three representative mode separations.
        for sep_w0 in [0.0, 1.0, 2.0] {
            let scan = mz_fringe_scan(
                waist,
                sep_w0 * waist,
                emitters,
                &delays,
                self.mode.scan_mode(self.seed),
            )?;
            bundle.scans.push(NamedScan {
                name: format!("mz-d{}w0", sep_w0 as u64),
                scan,
            });
        }

        // V/D table over the separation range from the closed forms.
        let d_max = self.f64("separation_max_w0") * waist;
        let points = self.u64("separation_points").max(2);
        let mut rows = Vec::with_capacity(points as usize);
        for k in 0..points {
            let d = d_max * k as f64 / (points - 1) as f64;
            let (v, dd) = cone_mode_coherence(waist, d, background)?;
            rows.push([d, v, dd, dd * dd + v * v]);
        }
        bundle.vd_table = Some(VdTable {
            parameter_name: "separation".to_string(),
            rows,
        });

        // Duality reports from the closed forms at two reference
        // separations; the fringe scans cross-validate the same overlap.
        for (name, sep_w0) in [("d0w0", 0.0), ("d2w0", 2.0)] {
            let (v, d) = cone_mode_coherence(waist, sep_w0 * waist, background)?;
            bundle.duality.push(NamedReport {
                name: name.to_string(),
                report: duality_report(
                    Visibility {
                        value: v,
                        sigma: 0.0,
                        method: VisibilityMethod::RawExtrema,
                    },
                    d,
                    0.0,
                ),
            });
        }
        Ok(())
    }

    fn run_tem01(&self, bundle: &mut ResultBundle) -> Result<(), ScenarioError> {
        let waist = self.f64("waist");
        let wavelength = self.f64("wavelength");
        let pump = HermiteGaussMode::new(1, 0, waist, wavelength / 2.0).map_err(SpatialError::from)?;
        let sigma_c = match self.f64("sigma_c") {
            v if v > 0.0 => v,
            _ => calibrate_correlation_width(&pump, self.f64("hump_correlation_target"))?,
        };
        let bp = BiphotonAmplitude::new(pump, sigma_c, wavelength)?;
        let base = SlitGeometry::for_pump(
            &bp,
            self.u64("screen_samples").max(16) as usize,
            self.f64("screen_periods"),
        )?;
        let geom = SlitGeometry::new(
            base.centers,
            self.f64("slit_width_w0") * waist,
            base.screen,
            base.wavelength,
        )?;

        // Far-field interference pattern with the idler detector centered.
        let a1 = conditional_signal_amplitude(&bp, 0.0, geom.centers[0]);
        let a2 = conditional_signal_amplitude(&bp, 0.0, geom.centers[1]);
        bundle.scans.push(NamedScan {
            name: "farfield-centered".to_string(),
            scan: farfield_scan(a1, a2, &geom, self.mode.scan_mode(self.seed))?,
        });

        // Position-resolved V/D table over the idler detector scan.
        let half = self.f64("idler_scan_halfwidth_w0") * waist;
        let points = self.u64("idler_scan_points").max(2);
        let mut rows = Vec::with_capacity(points as usize);
        for k in 0..points {
            let x = -half + 2.0 * half * k as f64 / (points - 1) as f64;
            let (v, d) = vd_at_idler_position(&bp, &geom, x)?;
            rows.push([x, v, d, d * d + v * v]);
        }
        bundle.vd_table = Some(VdTable {
            parameter_name: "idler_position".to_string(),
            rows,
        });

        // Duality at the mode center and offset into one hump. The V and D
        // here are the exact contrast and rate asymmetry of the conditional
        // two-slit fringe (raw-extrema definitions).
        for (name, x) in [("centered", 0.0), ("offset-3sigma", 3.0 * sigma_c)] {
            let (v, d) = vd_at_idler_position(&bp, &geom, x)?;
            bundle.duality.push(NamedReport {
                name: name.to_string(),
                report: duality_report(
                    Visibility {
                        value: v,
                        sigma: 0.0,
                        method: VisibilityMethod::RawExtrema,
                    },
                    d,
                    0.0,
                ),
            });
        }
        Ok(())
    }
}

/// Three crystals, two vacuum-mode chains, two recombining splitters.
///
/// `idler_partner_bbo3` wires BBO1's idler mode through BBO3 and BBO1's
/// signal mode through BBO2 (detector A pairs s1 with s3). The alternative
/// routes the idler through BBO2, reproducing the published description
/// (detector A pairs s1 with s2).
pub fn three_crystal_bench(
    gains: [f64; 3],
    pump_amplitude: f64,
    idler_partner_bbo3: bool,
) -> BenchDescription {
    let cfg = |gain: f64| {
        let mut c = CrystalConfig::new(gain);
        c.pump_amplitude = pump_amplitude;
        c
    };
    let mut desc = BenchDescription::new();
    desc.push(
        "bbo1",
        ElementSpec::Crystal {
            config: cfg(gains[0]),
            crystal_type: CrystalType::TypeI,
            signal_in: Input::Open,
            idler_in: Input::Open,
        },
    );
    let (signal_chained, idler_chained) = if idler_partner_bbo3 {
        ("bbo2", "bbo3")
    } else {
        ("bbo3", "bbo2")
    };
    let bbo2_gain = cfg(gains[1]);
    let bbo3_gain = cfg(gains[2]);
    for (name, config) in [("bbo2", bbo2_gain), ("bbo3", bbo3_gain)] {
        let (signal_in, idler_in) = if name == signal_chained {
            (Input::Port(PortRef::new("bbo1", OutSlot::Signal)), Input::Open)
        } else {
            (Input::Open, Input::Port(PortRef::new("bbo1", OutSlot::Idler)))
        };
        desc.push(
            name,
            ElementSpec::Crystal {
                config,
                crystal_type: CrystalType::TypeI,
                signal_in,
                idler_in,
            },
        );
    }
    // The crystal holding the signal chain emits s1's beam; the idler-chain
    // crystal emits i1's beam.
    desc.push(
        "sbs",
        ElementSpec::BeamSplitter {
            transmittance: 0.5,
            in1: Input::Port(PortRef::new(signal_chained, OutSlot::Signal)),
            in2: Input::Port(PortRef::new(idler_chained, OutSlot::Signal)),
        },
    );
    desc.push(
        "ibs",
        ElementSpec::BeamSplitter {
            transmittance: 0.5,
            in1: Input::Port(PortRef::new(idler_chained, OutSlot::Idler)),
            in2: Input::Port(PortRef::new(signal_chained, OutSlot::Idler)),
        },
    );
    for (det, elem, slot) in [
        ("A", "sbs", OutSlot::Out1),
        ("A2", "sbs", OutSlot::Out2),
        ("D", "ibs", OutSlot::Out1),
        ("D2", "ibs", OutSlot::Out2),
    ] {
        desc.push(
            det,
            ElementSpec::Detector {
                input: PortRef::new(elem, slot),
            },
        );
    }
    desc
}

/// Two seeded crystals, in series on the signal mode or in parallel, both
/// terminated by the same 50:50 splitter so the detection chains match.
pub fn stimulated_bench(
    gain: f64,
    pump_amplitude: f64,
    seed_amplitude: f64,
    sequential: bool,
) -> BenchDescription {
    let cfg = || {
        let mut c = CrystalConfig::new(gain);
        c.pump_amplitude = pump_amplitude;
        c.seed = Some(SeedBeam {
            amplitude: seed_amplitude,
            phase: 0.0,
            reference: "hene".to_string(),
        });
        c
    };
    let mut desc = BenchDescription::new();
    if sequential {
        desc.push(
            "bbo1",
            ElementSpec::Crystal {
                config: cfg(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Open,
                idler_in: Input::Open,
            },
        );
        desc.push(
            "bbo3",
            ElementSpec::Crystal {
                config: cfg(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Port(PortRef::new("bbo1", OutSlot::Signal)),
                idler_in: Input::Open,
            },
        );
        desc.push(
            "tap",
            ElementSpec::BeamSplitter {
                transmittance: 0.5,
                in1: Input::Port(PortRef::new("bbo3", OutSlot::Signal)),
                in2: Input::Open,
            },
        );
        for (det, elem, slot) in [
            ("A", "tap", OutSlot::Out1),
            ("A2", "tap", OutSlot::Out2),
            ("I1", "bbo1", OutSlot::Idler),
            ("I3", "bbo3", OutSlot::Idler),
        ] {
            desc.push(
                det,
                ElementSpec::Detector {
                    input: PortRef::new(elem, slot),
                },
            );
        }
    } else {
        desc.push(
            "bbo2",
            ElementSpec::Crystal {
                config: cfg(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Open,
                idler_in: Input::Open,
            },
        );
        desc.push(
            "bbo3",
            ElementSpec::Crystal {
                config: cfg(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Open,
                idler_in: Input::Open,
            },
        );
        desc.push(
            "tap",
            ElementSpec::BeamSplitter {
                transmittance: 0.5,
                in1: Input::Port(PortRef::new("bbo2", OutSlot::Signal)),
                in2: Input::Port(PortRef::new("bbo3", OutSlot::Signal)),
            },
        );
        for (det, elem, slot) in [
            ("A", "tap", OutSlot::Out1),
            ("A2", "tap", OutSlot::Out2),
            ("I2", "bbo2", OutSlot::Idler),
            ("I3", "bbo3", OutSlot::Idler),
        ] {
            desc.push(
                det,
                ElementSpec::Detector {
                    input: PortRef::new(elem, slot),
                },
            );
        }
    }
    desc
}

/// Mach-Zehnder fringe of two displaced TEM₀₀ projections of the emission
/// cone, modeled as a line of independent unit-variance emitters.
fn mz_fringe_scan(
    waist: f64,
    separation: f64,
    emitters: usize,
    delays: &[f64],
    mode: ScanMode,
) -> Result<FringeScan, ScenarioError> {
    let mode1 = HermiteGaussMode::new(0, 0, waist, 0.702).map_err(SpatialError::from)?;
    let mode2 = mode1.clone().with_center([separation, 0.0]);
    let lo = -6.0 * waist;
    let hi = separation + 6.0 * waist;
    let step = (hi - lo) / (emitters - 1) as f64;

    let mut registry = VacuumRegistry::new();
    let mut expr1 = FieldExpression::new("mode1");
    let mut expr2 = FieldExpression::new("mode2");
    for k in 0..emitters {
        let x = lo + k as f64 * step;
        let id = registry
            .register(&format!("cone-{k:03}"))
            .expect("unique emitter labels");
        let weight = if k == 0 || k + 1 == emitters { 0.5 } else { 1.0 };
        let scale = (weight * step).sqrt();
        let tag = format!("cone-{k:03}");
        for (expr, mode) in [(&mut expr1, &mode1), (&mut expr2, &mode2)] {
            expr.terms.push(FieldTerm {
                coefficient: Complex64::new(mode.amplitude_1d(x) * scale, 0.0),
                carrier: PhaseCarrier::Vacuum(id),
                event_tag: Some(tag.clone()),
            });
        }
    }
    let registry = registry.seal();

    let mut rates = Vec::with_capacity(delays.len());
    let mut std_errors = Vec::new();
    for (idx, &delta) in delays.iter().enumerate() {
        let (out, _) = combine_beam_splitter(&expr1, &apply_phase(&expr2, delta), 0.5)?;
        match mode {
            ScanMode::Analytic => rates.push(ensemble_rate(&out)),
            ScanMode::MonteCarlo { trials, seed } => {
                let est = monte_carlo_rate(&out, &registry, seed, trials)?;
                rates.push(est.mean);
                std_errors.push(est.std_error);
            }
            ScanMode::Poisson {
                seed,
                scale,
                integration,
            } => {
                let count = poisson_count(ensemble_rate(&out), scale, integration, seed, idx as u64);
                std_errors.push(count.sqrt());
                rates.push(count);
            }
        }
    }
    Ok(FringeScan {
        parameter: delays.to_vec(),
        rates,
        std_errors,
        detector: "mz-out1".to_string(),
        mode,
    })
}

/// Far-field double-slit scan; the pair state occupies a single transverse
/// mode, so the trial sampler reproduces the analytic pattern with zero
/// variance.
fn farfield_scan(
    a1: Complex64,
    a2: Complex64,
    geom: &SlitGeometry,
    mode: ScanMode,
) -> Result<FringeScan, ScenarioError> {
    let analytic = slit_far_field(a1, a2, geom);
    let angles: Vec<f64> = geom.screen.coords().collect();
    let mut rates = Vec::with_capacity(angles.len());
    let mut std_errors = Vec::new();
    match mode {
        ScanMode::Analytic => {
            rates.extend(analytic.values.iter().map(|v| v.re));
        }
        ScanMode::MonteCarlo { trials, seed } => {
            let mut registry = VacuumRegistry::new();
            let id = registry.register("pump-mode-vac").expect("fresh registry");
            let registry = registry.seal();
            let sinc = |u: f64| if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
            let k = std::f64::consts::TAU / geom.wavelength;
            for &theta in &angles {
                let envelope = sinc(0.5 * k * geom.width * theta);
                let mut expr = FieldExpression::new("farfield");
                for (amp, center) in [(a1, geom.centers[0]), (a2, geom.centers[1])] {
                    expr.terms.push(FieldTerm {
                        coefficient: amp
                            * envelope
                            * Complex64::from_polar(1.0, -k * theta * center),
                        carrier: PhaseCarrier::Vacuum(id),
                        event_tag: Some("pair".to_string()),
                    });
                }
                let est = monte_carlo_rate(&expr, &registry, seed, trials)?;
                rates.push(est.mean);
                std_errors.push(est.std_error);
            }
        }
        ScanMode::Poisson {
            seed,
            scale,
            integration,
        } => {
            for (idx, v) in analytic.values.iter().enumerate() {
                let count = poisson_count(v.re, scale, integration, seed, idx as u64);
                std_errors.push(count.sqrt());
                rates.push(count);
            }
        }
    }
    Ok(FringeScan {
        parameter: angles,
        rates,
        std_errors,
        detector: "farfield".to_string(),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn analytic(kind: ScenarioKind) -> Scenario {
        Scenario::new(kind)
    }

    fn report<'a>(bundle: &'a ResultBundle, name: &str) -> &'a DualityReport {
        &bundle
            .duality
            .iter()
            .find(|r| r.name == name)
            .unwrap_or_else(|| panic!("missing report {name}"))
            .report
    }

    #[test]
    fn stimulated_visibility_closed_form() {
        assert_eq!(stimulated_visibility(0.0), 0.0);
        assert_relative_eq!(stimulated_visibility(19.0), 0.95, epsilon = 1e-12);
        assert_relative_eq!(stimulated_visibility(49.0), 0.98, epsilon = 1e-12);
        assert!(stimulated_visibility(1e12) > 0.999999999);
    }

    #[test]
    fn unknown_parameter_suggests_nearest() {
        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        match sc.set("gian2", ParamValue::Float(0.0)) {
            Err(ScenarioError::UnknownParameter { nearest, .. }) => {
                assert_eq!(nearest.as_deref(), Some("gain2"));
            }
            other => panic!("expected unknown parameter, got {other:?}"),
        }
    }

    #[test]
    fn type_mismatch_rejected() {
        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        assert!(matches!(
            sc.set("gain2", ParamValue::Text("big".into())),
            Err(ScenarioError::TypeMismatch { .. })
        ));
        // Int coerces to float.
        sc.set("gain2", ParamValue::Int(0)).unwrap();
    }

    #[test]
    fn three_crystal_all_pumped_two_thirds() {
        let bundle = analytic(ScenarioKind::ThreeCrystal).run().unwrap();
        for det in ["A", "D"] {
            let r = report(&bundle, det);
            assert_relative_eq!(r.visibility, 2.0 / 3.0, epsilon = 1e-9);
            assert!(!r.violation);
        }
        // Flat incoherent background: minima stay well above zero.
        let scan = &bundle.scans.iter().find(|s| s.name == "A").unwrap().scan;
        let min = scan.rates.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min > 1e-4);
    }

    #[test]
    fn three_crystal_background_off_restores_visibility() {
        // Default alignment: BBO2 feeds the background at A, BBO3 at D.
        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        sc.set("gain2", ParamValue::Float(0.0)).unwrap();
        let bundle = sc.run().unwrap();
        assert_relative_eq!(report(&bundle, "A").visibility, 1.0, epsilon = 1e-9);

        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        sc.set("gain3", ParamValue::Float(0.0)).unwrap();
        let bundle = sc.run().unwrap();
        assert_relative_eq!(report(&bundle, "D").visibility, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn three_crystal_published_alignment() {
        // The published arrangement: unpumping BBO2 gives full idler-side
        // visibility at D, unpumping BBO3 full signal-side visibility at A.
        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        sc.set("alignment", ParamValue::Text("bbo2".into())).unwrap();
        sc.set("gain2", ParamValue::Float(0.0)).unwrap();
        let bundle = sc.run().unwrap();
        assert_relative_eq!(report(&bundle, "D").visibility, 1.0, epsilon = 1e-9);

        let mut sc = analytic(ScenarioKind::ThreeCrystal);
        sc.set("alignment", ParamValue::Text("bbo2".into())).unwrap();
        sc.set("gain3", ParamValue::Float(0.0)).unwrap();
        let bundle = sc.run().unwrap();
        assert_relative_eq!(report(&bundle, "A").visibility, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn stimulated_matches_oracle() {
        for (kind, n) in [
            (ScenarioKind::StimulatedSequential, 19.0),
            (ScenarioKind::StimulatedParallel, 49.0),
        ] {
            let bundle = analytic(kind).run().unwrap();
            let r = report(&bundle, "A");
            assert_relative_eq!(r.visibility, stimulated_visibility(n), epsilon = 1e-9);
        }
    }

    #[test]
    fn stimulated_zero_seed_no_fringes() {
        let mut sc = analytic(ScenarioKind::StimulatedSequential);
        sc.set("seed_photon_number", ParamValue::Float(0.0)).unwrap();
        let bundle = sc.run().unwrap();
        assert!(report(&bundle, "A").visibility < 1e-9);
    }

    #[test]
    fn stimulated_variants_bit_identical() {
        for n in [19.0, 49.0, 3.5] {
            let mut seq = analytic(ScenarioKind::StimulatedSequential);
            seq.set("seed_photon_number", ParamValue::Float(n)).unwrap();
            let mut par = analytic(ScenarioKind::StimulatedParallel);
            par.set("seed_photon_number", ParamValue::Float(n)).unwrap();
            let v_seq = report(&seq.run().unwrap(), "A").visibility;
            let v_par = report(&par.run().unwrap(), "A").visibility;
            assert_eq!(v_seq.to_bits(), v_par.to_bits(), "n = {n}");
        }
    }

    #[test]
    fn spatial_mz_table_matches_closed_forms() {
        let bundle = analytic(ScenarioKind::SpatialMz).run().unwrap();
        let table = bundle.vd_table.as_ref().unwrap();
        let waist = 100.0;
        for row in &table.rows {
            let [d, v, dd, sum] = *row;
            let mu = (-d * d / (4.0 * waist * waist)).exp();
            assert_relative_eq!(v, mu, epsilon = 1e-5);
            assert_relative_eq!(sum, 1.0, epsilon = 1e-9);
            assert!((0.0..=1.0).contains(&dd));
        }
        // Fringe-extracted visibility agrees with the overlap.
        let r = report(&bundle, "d2w0");
        assert_relative_eq!(r.visibility, (-1.0f64).exp(), epsilon = 1e-6);
        assert_relative_eq!(r.duality_sum, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn spatial_mz_background_lowers_sum() {
        let mut sc = analytic(ScenarioKind::SpatialMz);
        sc.set("background_fraction", ParamValue::Float(0.10)).unwrap();
        let bundle = sc.run().unwrap();
        let r = report(&bundle, "d0w0");
        assert_relative_eq!(r.visibility, 0.90, epsilon = 1e-6);
        assert_relative_eq!(r.duality_sum, 0.81, epsilon = 1e-4);
    }

    #[test]
    fn tem01_centered_idler_and_dip() {
        let bundle = analytic(ScenarioKind::Tem01DoubleSlit).run().unwrap();
        let r = report(&bundle, "centered");
        assert_relative_eq!(r.visibility, 1.0, epsilon = 1e-9);
        assert!(r.distinguishability < 1e-9);
        let scan = &bundle.scans[0].scan;
        let center = scan.rates[scan.rates.len() / 2];
        let peak = scan.rates.iter().cloned().fold(0.0, f64::max);
        assert!(center < 1e-9 * peak);
        // Which-path marking off-center.
        let r = report(&bundle, "offset-3sigma");
        assert!(r.distinguishability >= 0.95);
        // Duality saturated along the scan.
        for row in &bundle.vd_table.as_ref().unwrap().rows {
            assert!((row[3] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        for kind in ScenarioKind::all() {
            let sc = Scenario::new(kind)
                .with_mode(RunMode::MonteCarlo { trials: 2000 })
                .with_seed(7);
            let a = sc.run().unwrap();
            let b = sc.run().unwrap();
            assert_eq!(a, b, "{}", kind.name());
        }
    }

    #[test]
    fn three_crystal_detector_expressions_have_expected_carriers() {
        // Published arrangement: detector A carries BBO1- and BBO2-tagged
        // terms on the shared conjugated idler vacuum plus BBO3 background
        // terms on a distinct carrier.
        let desc = three_crystal_bench([0.1, 0.1, 0.1], 1.0, false);
        let bench = build_bench(&desc).unwrap();
        let fields = bench.evaluate(&crate::bench::Overrides::new()).unwrap();
        let a = &fields["A"];
        let carrier_of = |tag: &str| {
            a.terms
                .iter()
                .find(|t| t.event_tag.as_deref() == Some(tag))
                .map(|t| t.carrier.clone())
                .unwrap_or_else(|| panic!("no {tag} term at A"))
        };
        let c1 = carrier_of("bbo1");
        let c2 = carrier_of("bbo2");
        let c3 = carrier_of("bbo3");
        assert_eq!(c1, c2, "signal pair must share the idler vacuum");
        assert_ne!(c1, c3, "background crystal rides its own vacuum");
        assert!(matches!(c1, PhaseCarrier::VacuumConj(_)));
    }

    /// Coincidence reference marking on the published three-crystal bench:
    /// detectors straight on the signal beams instead of the splitter.
    fn marked_three_crystal() -> crate::bench::Bench {
        let mut desc = BenchDescription::new();
        let cfg = CrystalConfig::new(0.1);
        desc.push(
            "bbo1",
            ElementSpec::Crystal {
                config: cfg.clone(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Open,
                idler_in: Input::Open,
            },
        );
        desc.push(
            "bbo2",
            ElementSpec::Crystal {
                config: cfg.clone(),
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Open,
                idler_in: Input::Port(PortRef::new("bbo1", OutSlot::Idler)),
            },
        );
        desc.push(
            "bbo3",
            ElementSpec::Crystal {
                config: cfg,
                crystal_type: CrystalType::TypeI,
                signal_in: Input::Port(PortRef::new("bbo1", OutSlot::Signal)),
                idler_in: Input::Open,
            },
        );
        desc.push(
            "ibs",
            ElementSpec::BeamSplitter {
                transmittance: 0.5,
                in1: Input::Port(PortRef::new("bbo2", OutSlot::Idler)),
                in2: Input::Port(PortRef::new("bbo3", OutSlot::Idler)),
            },
        );
        for (det, elem, slot) in [
            ("ref_s1", "bbo3", OutSlot::Signal),
            ("ref_s2", "bbo2", OutSlot::Signal),
            ("D", "ibs", OutSlot::Out1),
            ("D2", "ibs", OutSlot::Out2),
        ] {
            desc.push(
                det,
                ElementSpec::Detector {
                    input: PortRef::new(elem, slot),
                },
            );
        }
        build_bench(&desc).unwrap()
    }

    #[test]
    fn coincidence_with_s2_reference_is_flat() {
        // Gating the combined idler port on BBO2's signal selects only the
        // BBO2 pair class: a positive, delay-independent rate.
        let bench = marked_three_crystal();
        let scan = bench
            .coincidence_scan(
                "D",
                "ref_s2",
                &ScanBinding::new("bbo1", ParamName::PumpPhase),
                &phase_grid(17),
                ScanMode::Analytic,
            )
            .unwrap();
        let first = scan.rates[0];
        assert!(first > 0.0);
        for &r in &scan.rates {
            assert!((r - first).abs() < 1e-12 * first, "not flat: {r} vs {first}");
        }
    }

    #[test]
    fn coincidence_with_s1_reference_follows_class_algebra() {
        // With BBO2 unpumped the s0-beam reference shares tags BBO1 and BBO3
        // with the idler port. Their pair amplitudes conjugate different
        // vacuum sets ({s0,i0} vs {s0,i3}), so the class algebra adds them
        // incoherently: the hand-computed oracle is the flat sum of the two
        // squared pair products, delay-independent.
        let bench = marked_three_crystal();
        let values = phase_grid(17);
        let overrides =
            crate::bench::Overrides::new().set("bbo2", crate::bench::ParamName::Gain, 0.0);
        let scan = bench
            .coincidence_scan_with(
                "D",
                "ref_s1",
                &ScanBinding::new("bbo1", ParamName::PumpPhase),
                &values,
                ScanMode::Analytic,
                &overrides,
            )
            .unwrap();
        // Oracle: |c_D(b1)·c_R(b1)|² + |c_D(b3)·c_R(b3)|² with the splitter
        // factor 1/√2 on the idler side and unit pump drives of gain 0.1.
        let c = 0.1f64;
        let pair = (c / 2f64.sqrt()) * c;
        let oracle = 2.0 * pair * pair;
        for &r in &scan.rates {
            assert_relative_eq!(r, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn nearest_key_suggestions() {
        let keys = ["gain1", "gain2", "pump_amplitude"];
        assert_eq!(
            nearest_key("gain", keys.iter().copied()),
            Some("gain1".to_string())
        );
        assert_eq!(nearest_key("zzzzzz", keys.iter().copied()), None);
    }

    #[test]
    fn scenario_parse_names() {
        for kind in ScenarioKind::all() {
            assert_eq!(ScenarioKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(ScenarioKind::parse("three-crystal").is_err());
    }
}
