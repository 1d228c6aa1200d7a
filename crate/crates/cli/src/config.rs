//! Run configuration and its flat key-value file format.
//!
//! Grammar: `key = value` lines with `#` comments; one optional
//! `[scenario_name]` section per known scenario holding parameter overrides.
//! Only the section matching the selected scenario is applied. Values parse
//! as integer, then float, then bare text. Diagnostics carry line numbers
//! and suggest the nearest valid key.

use spdc_core::{nearest_key, ParamValue, RunMode, Scenario, ScenarioError, ScenarioKind};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}{}", nearest.as_ref().map(|n| format!(" (did you mean {n:?}?)")).unwrap_or_default())]
    UnknownKey {
        line: usize,
        key: String,
        nearest: Option<String>,
    },
    #[error("line {line}: unknown section {section:?}; sections must name a scenario")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: {key} expects {expected}, got {got:?}")]
    BadValue {
        line: usize,
        key: String,
        expected: &'static str,
        got: String,
    },
    #[error("config names no scenario (`scenario = <name>` missing)")]
    MissingScenario,
    #[error("line {line}: {source}")]
    Scenario {
        line: usize,
        source: ScenarioError,
    },
}

/// Output formats to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            json: true,
        }
    }
}

/// How rates are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeChoice {
    #[default]
    Analytic,
    MonteCarlo,
    Poisson,
}

impl ModeChoice {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "analytic" => Some(ModeChoice::Analytic),
            "mc" => Some(ModeChoice::MonteCarlo),
            "poisson" => Some(ModeChoice::Poisson),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModeChoice::Analytic => "analytic",
            ModeChoice::MonteCarlo => "mc",
            ModeChoice::Poisson => "poisson",
        }
    }
}

/// A complete run request: scenario, overrides, execution and output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub overrides: Vec<(String, ParamValue)>,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub seed: u64,
    pub mode: ModeChoice,
    pub trials: u64,
    pub scale: f64,
    pub integration: f64,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            overrides: Vec::new(),
            out_dir: PathBuf::from("results"),
            formats: Formats::default(),
            seed: 1,
            mode: ModeChoice::Analytic,
            trials: 100_000,
            scale: 1e4,
            integration: 1.0,
        }
    }

    pub fn run_mode(&self) -> RunMode {
        match self.mode {
            ModeChoice::Analytic => RunMode::Analytic,
            ModeChoice::MonteCarlo => RunMode::MonteCarlo {
                trials: self.trials,
            },
            ModeChoice::Poisson => RunMode::Poisson {
                scale: self.scale,
                integration: self.integration,
            },
        }
    }

    /// Build the validated scenario this config describes.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        let kind = ScenarioKind::parse(&self.scenario)?;
        let mut sc = Scenario::new(kind)
            .with_mode(self.run_mode())
            .with_seed(self.seed);
        for (key, value) in &self.overrides {
            sc.set(key, value.clone())?;
        }
        Ok(sc)
    }

    /// Serialize back to the config file format. Parsing the result yields
    /// an equal config.
    pub fn to_config_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "scenario = {}", self.scenario).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "mode = {}", self.mode.name()).unwrap();
        writeln!(out, "trials = {}", self.trials).unwrap();
        writeln!(out, "scale = {}", float_text(self.scale)).unwrap();
        writeln!(out, "integration = {}", float_text(self.integration)).unwrap();
        writeln!(out, "out = {}", self.out_dir.display()).unwrap();
        let mut formats = Vec::new();
        if self.formats.csv {
            formats.push("csv");
        }
        if self.formats.json {
            formats.push("json");
        }
        writeln!(out, "format = {}", formats.join(",")).unwrap();
        if !self.overrides.is_empty() {
            writeln!(out, "\n[{}]", self.scenario).unwrap();
            for (key, value) in &self.overrides {
                let text = match value {
                    ParamValue::Float(v) => float_text(*v),
                    other => other.to_string(),
                };
                writeln!(out, "{key} = {text}").unwrap();
            }
        }
        out
    }
}

/// Render a float so it re-parses as a float (integral values keep a ".0").
fn float_text(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn parse_value(text: &str) -> ParamValue {
    if let Ok(i) = text.parse::<u64>() {
        return ParamValue::Int(i);
    }
    if let Ok(f) = text.parse::<f64>() {
        return ParamValue::Float(f);
    }
    ParamValue::Text(text.to_string())
}

const GLOBAL_KEYS: [&str; 8] = [
    "scenario",
    "seed",
    "mode",
    "trials",
    "scale",
    "integration",
    "out",
    "format",
];

/// (line, key, value) of one parsed assignment.
type Entry = (usize, String, String);

/// Parse the config file format; the first error wins and names its line.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut scenario: Option<(String, usize)> = None;
    let mut globals: Vec<Entry> = Vec::new();
    let mut sections: Vec<(String, Vec<Entry>)> = Vec::new();
    let mut current: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(name) = stripped.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: raw.trim().to_string(),
                });
            };
            let name = name.trim();
            if ScenarioKind::parse(name).is_err() {
                return Err(ConfigError::UnknownSection {
                    line,
                    section: name.to_string(),
                });
            }
            current = Some(sections.len());
            sections.push((name.to_string(), Vec::new()));
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: raw.trim().to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        match current {
            Some(section) => sections[section].1.push((line, key, value)),
            None => {
                if key == "scenario" {
                    scenario = Some((value, line));
                } else {
                    globals.push((line, key, value));
                }
            }
        }
    }

    let Some((scenario_name, scenario_line)) = scenario else {
        return Err(ConfigError::MissingScenario);
    };
    let kind =
        ScenarioKind::parse(&scenario_name).map_err(|source| ConfigError::Scenario {
            line: scenario_line,
            source,
        })?;

    let mut config = RunConfig::new(scenario_name);
    for (line, key, value) in globals {
        match key.as_str() {
            "seed" => {
                config.seed = value.parse().map_err(|_| ConfigError::BadValue {
                    line,
                    key,
                    expected: "a non-negative integer",
                    got: value,
                })?
            }
            "trials" => {
                config.trials = value.parse().map_err(|_| ConfigError::BadValue {
                    line,
                    key,
                    expected: "a positive integer",
                    got: value,
                })?
            }
            "scale" => {
                config.scale = value.parse().map_err(|_| ConfigError::BadValue {
                    line,
                    key,
                    expected: "a number",
                    got: value,
                })?
            }
            "integration" => {
                config.integration = value.parse().map_err(|_| ConfigError::BadValue {
                    line,
                    key,
                    expected: "a number",
                    got: value,
                })?
            }
            "mode" => {
                config.mode = ModeChoice::parse(&value).ok_or(ConfigError::BadValue {
                    line,
                    key,
                    expected: "analytic, mc or poisson",
                    got: value,
                })?
            }
            "out" => config.out_dir = PathBuf::from(value),
            "format" => {
                let mut formats = Formats {
                    csv: false,
                    json: false,
                };
                for part in value.split(',') {
                    match part.trim() {
                        "csv" => formats.csv = true,
                        "json" => formats.json = true,
                        other => {
                            return Err(ConfigError::BadValue {
                                line,
                                key,
                                expected: "a subset of csv,json",
                                got: other.to_string(),
                            })
                        }
                    }
                }
                config.formats = formats;
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    nearest: nearest_key(&key, GLOBAL_KEYS.into_iter()),
                    key,
                })
            }
        }
    }

    for (name, entries) in sections {
        let section_kind = ScenarioKind::parse(&name).expect("validated above");
        for (line, key, value) in entries {
            // Validate against the section's schema even when inactive.
            let Some(_) = section_kind.params().iter().find(|p| p.key == key) else {
                return Err(ConfigError::UnknownKey {
                    line,
                    nearest: nearest_key(&key, section_kind.params().iter().map(|p| p.key)),
                    key,
                });
            };
            if section_kind == kind {
                config.overrides.push((key, parse_value(&value)));
            }
        }
    }

    // Type-check the overrides now so errors surface at parse time.
    config
        .to_scenario()
        .map_err(|source| ConfigError::Scenario { line: 0, source })?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("scenario = three_crystal\n").unwrap();
        assert_eq!(cfg.scenario, "three_crystal");
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.mode, ModeChoice::Analytic);
        assert!(cfg.formats.csv && cfg.formats.json);
        assert!(cfg.overrides.is_empty());
    }

    #[test]
    fn section_overrides_apply() {
        let cfg = parse_config(
            "scenario = three_crystal\nseed = 9\n\n[three_crystal]\ngain2 = 0.0\n",
        )
        .unwrap();
        assert_eq!(cfg.overrides, vec![("gain2".into(), ParamValue::Float(0.0))]);
        let sc = cfg.to_scenario().unwrap();
        assert_eq!(sc.parameters()["gain2"], ParamValue::Float(0.0));
    }

    #[test]
    fn misspelled_key_names_nearest() {
        let err = parse_config("scenario = three_crystal\n[three_crystal]\ngian2 = 0\n")
            .unwrap_err();
        match err {
            ConfigError::UnknownKey { line, key, nearest } => {
                assert_eq!(line, 3);
                assert_eq!(key, "gian2");
                assert_eq!(nearest.as_deref(), Some("gain2"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_scenario_rejected() {
        assert!(matches!(
            parse_config("seed = 4\n"),
            Err(ConfigError::MissingScenario)
        ));
    }

    #[test]
    fn unknown_section_rejected() {
        let err = parse_config("scenario = three_crystal\n[four_crystal]\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownSection { line: 2, .. }));
    }

    #[test]
    fn type_mismatch_reported() {
        let err =
            parse_config("scenario = three_crystal\n[three_crystal]\ngain2 = strong\n")
                .unwrap_err();
        assert!(err.to_string().contains("expects float"), "got: {err}");
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = parse_config(
            "# a comment\nscenario = spatial_mz  # trailing\n\nseed = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = RunConfig::new("tem01_double_slit");
        cfg.seed = 77;
        cfg.mode = ModeChoice::Poisson;
        cfg.scale = 2.5e4;
        cfg.integration = 0.25;
        cfg.formats = Formats {
            csv: true,
            json: false,
        };
        cfg.out_dir = PathBuf::from("out/tem01");
        cfg.overrides = vec![
            ("waist".to_string(), ParamValue::Float(120.0)),
            ("idler_scan_points".to_string(), ParamValue::Int(61)),
        ];
        let text = cfg.to_config_text();
        let reparsed = parse_config(&text).unwrap();
        assert_eq!(cfg, reparsed);
    }
}
