//! Run-configuration parsing and validation.
//!
//! Configurations are TOML with `[system]`, `[medium]`, `[sweep]`,
//! `[propagation]` and `[output]` sections. Every dimensioned value is a
//! string carrying a mandatory unit suffix; unknown keys are rejected.
//!
//! Frequencies and rates accept `Hz`, `kHz`, `MHz`, `GHz` (ordinary
//! frequencies ν, converted to angular frequencies by ω = 2πν) as well as
//! `rad/s` and `1/s` (used as-is). Lengths accept `um` and `mm`, densities
//! `um^-3` and `mm^-3`. The van der Waals coefficient combines a frequency
//! unit with `um^6`.

use rydeit_core::{
    AtomicSystem, G2Weight, MediumProfile, ProfileKind, PropagationConfig, PropagationMode,
    SweepSpec,
};
use serde::Deserialize;
use std::f64::consts::TAU;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Syntax(String),
    #[error("config key `{key}`: {msg}")]
    Field { key: String, msg: String },
    #[error("unknown preset `{0}` (available: pritchard2010)")]
    UnknownPreset(String),
}

fn field_err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        key: key.to_string(),
        msg: msg.into(),
    }
}

/// The canonical cold-⁸⁷Rb parameter set: homogeneous medium of optical
/// depth 4.524 probed across ±15 MHz at three input intensities.
pub const PRESET_PRITCHARD2010: &str = r#"
[system]
gamma_e = "3.8e7 1/s"
gamma_r = "5e3 1/s"
linewidth_1ph = "5.7e4 Hz"
linewidth_2ph = "1.1e5 Hz"
c6 = "1.4e11 Hz um^6"
omega_c = "2.25 MHz"
delta_c = "-0.1 MHz"

[medium]
profile = "homogeneous"
length = "1.3 mm"
density = "1.2e7 mm^-3"
optical_depth = 4.524

[sweep]
delta_p_min = "-15 MHz"
delta_p_max = "15 MHz"
delta_p_count = 201
omega_p = ["0.15 MHz", "0.5 MHz", "1.0 MHz"]
realizations = 10
g2_input = 1.0

[propagation]
mode = "stochastic"
seed = 42
substeps = 4
g2_feedback = true
g2_weight = "conditional"

[output]
dir = "out"
"#;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    medium: RawMedium,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    propagation: RawPropagation,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    gamma_e: String,
    gamma_r: String,
    #[serde(default)]
    linewidth_1ph: Option<String>,
    #[serde(default)]
    linewidth_2ph: Option<String>,
    c6: String,
    omega_c: String,
    delta_c: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    profile: String,
    length: String,
    density: String,
    optical_depth: f64,
    #[serde(default)]
    center: Option<String>,
    #[serde(default)]
    sigma_rho: Option<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    delta_p_min: Option<String>,
    #[serde(default)]
    delta_p_max: Option<String>,
    #[serde(default)]
    delta_p_count: Option<usize>,
    #[serde(default)]
    omega_p: Option<Vec<String>>,
    #[serde(default)]
    realizations: Option<usize>,
    #[serde(default)]
    g2_input: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPropagation {
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    substeps: Option<u32>,
    #[serde(default)]
    g2_feedback: Option<bool>,
    #[serde(default)]
    g2_weight: Option<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    dir: Option<String>,
}

/// Fully validated run configuration in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: AtomicSystem,
    pub medium: MediumProfile,
    pub sweep: SweepSpec,
    pub propagation: PropagationConfig,
    pub out_dir: PathBuf,
}

fn split_quantity<'a>(key: &str, raw: &'a str) -> Result<(f64, Vec<&'a str>), ConfigError> {
    let mut parts = raw.split_whitespace();
    let value: f64 = parts
        .next()
        .ok_or_else(|| field_err(key, "empty value"))?
        .parse()
        .map_err(|_| field_err(key, format!("cannot parse `{raw}` as a number with unit")))?;
    let units: Vec<&str> = parts.collect();
    if units.is_empty() {
        return Err(field_err(
            key,
            format!("`{raw}` is missing a unit suffix (dimensioned values require one)"),
        ));
    }
    Ok((value, units))
}

/// Angular frequency in rad/s. Ordinary-frequency units pick up the 2π.
fn parse_angular(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let (value, units) = split_quantity(key, raw)?;
    if units.len() != 1 {
        return Err(field_err(
            key,
            format!("unexpected unit `{}`", units.join(" ")),
        ));
    }
    angular_factor(key, units[0]).map(|f| value * f)
}

fn angular_factor(key: &str, unit: &str) -> Result<f64, ConfigError> {
    Ok(match unit {
        "rad/s" | "1/s" => 1.0,
        "Hz" => TAU,
        "kHz" => TAU * 1e3,
        "MHz" => TAU * 1e6,
        "GHz" => TAU * 1e9,
        other => {
            return Err(field_err(
                key,
                format!("unknown frequency unit `{other}` (use rad/s, 1/s, Hz, kHz, MHz or GHz)"),
            ))
        }
    })
}

fn parse_length_um(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let (value, units) = split_quantity(key, raw)?;
    match units.as_slice() {
        ["um"] | ["µm"] => Ok(value),
        ["mm"] => Ok(value * 1e3),
        other => Err(field_err(
            key,
            format!("unknown length unit `{}` (use um or mm)", other.join(" ")),
        )),
    }
}

fn parse_density_um3(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let (value, units) = split_quantity(key, raw)?;
    match units.as_slice() {
        ["um^-3"] => Ok(value),
        ["mm^-3"] => Ok(value * 1e-9),
        other => Err(field_err(
            key,
            format!(
                "unknown density unit `{}` (use um^-3 or mm^-3)",
                other.join(" ")
            ),
        )),
    }
}

/// Van der Waals coefficient in rad/s·μm⁶ from `<value> <freq-unit> um^6`.
fn parse_c6(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let (value, units) = split_quantity(key, raw)?;
    match units.as_slice() {
        [freq, "um^6"] => Ok(value * angular_factor(key, freq)?),
        other => Err(field_err(
            key,
            format!(
                "unknown unit `{}` (use `<freq-unit> um^6`, e.g. `1.4e11 Hz um^6`)",
                other.join(" ")
            ),
        )),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    RunConfig::from_raw(raw)
}

pub fn load_preset(name: &str) -> Result<RunConfig, ConfigError> {
    match name {
        "pritchard2010" => parse_config(PRESET_PRITCHARD2010),
        other => Err(ConfigError::UnknownPreset(other.to_string())),
    }
}

impl RunConfig {
    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        // [system]
        let gamma_e = parse_angular("system.gamma_e", &raw.system.gamma_e)?;
        let gamma_r = parse_angular("system.gamma_r", &raw.system.gamma_r)?;
        let lw1 = match &raw.system.linewidth_1ph {
            Some(s) => parse_angular("system.linewidth_1ph", s)?,
            None => 0.0,
        };
        let lw2 = match &raw.system.linewidth_2ph {
            Some(s) => parse_angular("system.linewidth_2ph", s)?,
            None => 0.0,
        };
        let c6 = parse_c6("system.c6", &raw.system.c6)?;
        let omega_c = parse_angular("system.omega_c", &raw.system.omega_c)?;
        let delta_c = parse_angular("system.delta_c", &raw.system.delta_c)?;
        if !(omega_c > 0.0) {
            return Err(field_err(
                "system.omega_c",
                "must be > 0 (the blockade-derived grid requires a control field)",
            ));
        }
        let system = AtomicSystem::new(gamma_e, gamma_r, lw1, lw2, c6, omega_c, delta_c)
            .map_err(|e| field_err("system", e.to_string()))?;

        // [medium]
        let length = parse_length_um("medium.length", &raw.medium.length)?;
        let density = parse_density_um3("medium.density", &raw.medium.density)?;
        let medium = match raw.medium.profile.as_str() {
            "homogeneous" => {
                if raw.medium.sigma_rho.is_some() || raw.medium.center.is_some() {
                    return Err(field_err(
                        "medium.profile",
                        "center/sigma_rho only apply to the gaussian profile",
                    ));
                }
                MediumProfile::homogeneous(length, density, raw.medium.optical_depth)
            }
            "gaussian" => {
                let sigma = raw.medium.sigma_rho.as_deref().ok_or_else(|| {
                    field_err("medium.sigma_rho", "required for gaussian profile")
                })?;
                let sigma = parse_length_um("medium.sigma_rho", sigma)?;
                let center = match &raw.medium.center {
                    Some(c) => parse_length_um("medium.center", c)?,
                    None => length / 2.0,
                };
                MediumProfile::gaussian(length, density, center, sigma, raw.medium.optical_depth)
            }
            other => {
                return Err(field_err(
                    "medium.profile",
                    format!("unknown profile `{other}` (use homogeneous or gaussian)"),
                ))
            }
        }
        .map_err(|e| field_err("medium", e.to_string()))?;

        // [sweep]
        let dp_min = match &raw.sweep.delta_p_min {
            Some(s) => parse_angular("sweep.delta_p_min", s)?,
            None => -TAU * 15e6,
        };
        let dp_max = match &raw.sweep.delta_p_max {
            Some(s) => parse_angular("sweep.delta_p_max", s)?,
            None => TAU * 15e6,
        };
        let dp_count = raw.sweep.delta_p_count.unwrap_or(201);
        if dp_count < 1 {
            return Err(field_err("sweep.delta_p_count", "must be >= 1"));
        }
        if dp_count > 1 && !(dp_min < dp_max) {
            return Err(field_err(
                "sweep.delta_p_min",
                "must be below sweep.delta_p_max",
            ));
        }
        let omega_p = match &raw.sweep.omega_p {
            Some(list) => list
                .iter()
                .map(|s| parse_angular("sweep.omega_p", s))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![TAU * 0.15e6, TAU * 0.5e6, TAU * 1.0e6],
        };
        if !omega_p.iter().all(|&o| o > 0.0) {
            return Err(field_err("sweep.omega_p", "all inputs must be > 0"));
        }
        let sweep = SweepSpec {
            delta_p_values: rydeit_core::experiment::linspace(dp_min, dp_max, dp_count),
            omega_p_inputs: omega_p,
            n_realizations: raw.sweep.realizations.unwrap_or(10),
            g2_input: raw.sweep.g2_input.unwrap_or(1.0),
        };
        sweep
            .validate()
            .map_err(|e| field_err("sweep", e.to_string()))?;

        // [propagation]
        let mode = match raw.propagation.mode.as_deref() {
            None | Some("stochastic") => PropagationMode::Stochastic,
            Some("continuous") => PropagationMode::Continuous,
            Some(other) => {
                return Err(field_err(
                    "propagation.mode",
                    format!("unknown mode `{other}` (use stochastic or continuous)"),
                ))
            }
        };
        let g2_weight = match raw.propagation.g2_weight.as_deref() {
            None | Some("conditional") => G2Weight::Conditional,
            Some("unconditional") => G2Weight::Unconditional,
            Some(other) => {
                return Err(field_err(
                    "propagation.g2_weight",
                    format!("unknown weight `{other}` (use conditional or unconditional)"),
                ))
            }
        };
        let substeps = raw.propagation.substeps.unwrap_or(4);
        if substeps < 1 {
            return Err(field_err("propagation.substeps", "must be >= 1"));
        }
        let propagation = PropagationConfig {
            mode,
            seed: raw.propagation.seed.unwrap_or(42),
            substeps,
            g2_feedback: raw.propagation.g2_feedback.unwrap_or(true),
            g2_weight,
        };

        Ok(RunConfig {
            system,
            medium,
            sweep,
            propagation,
            out_dir: PathBuf::from(raw.output.dir.unwrap_or_else(|| "out".to_string())),
        })
    }

    /// Canonical serialization in internal units. Parsing the output yields
    /// an identical configuration (floats print with shortest round-trip
    /// precision).
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let sys = &self.system;
        s.push_str("[system]\n");
        s.push_str(&format!("gamma_e = \"{} rad/s\"\n", sys.gamma_e_pop));
        s.push_str(&format!("gamma_r = \"{} rad/s\"\n", sys.gamma_r_pop));
        s.push_str(&format!(
            "linewidth_1ph = \"{} rad/s\"\n",
            sys.linewidth_1ph
        ));
        s.push_str(&format!(
            "linewidth_2ph = \"{} rad/s\"\n",
            sys.linewidth_2ph
        ));
        s.push_str(&format!("c6 = \"{} rad/s um^6\"\n", sys.c6));
        s.push_str(&format!("omega_c = \"{} rad/s\"\n", sys.omega_c));
        s.push_str(&format!("delta_c = \"{} rad/s\"\n", sys.delta_c));
        s.push('\n');
        s.push_str("[medium]\n");
        match self.medium.kind {
            ProfileKind::Homogeneous => {
                s.push_str("profile = \"homogeneous\"\n");
            }
            ProfileKind::Gaussian { center, sigma_rho } => {
                s.push_str("profile = \"gaussian\"\n");
                s.push_str(&format!("center = \"{center} um\"\n"));
                s.push_str(&format!("sigma_rho = \"{sigma_rho} um\"\n"));
            }
        }
        s.push_str(&format!("length = \"{} um\"\n", self.medium.length));
        s.push_str(&format!("density = \"{} um^-3\"\n", self.medium.rho_peak));
        s.push_str(&format!(
            "optical_depth = {:?}\n",
            self.medium.optical_depth
        ));
        s.push('\n');
        s.push_str("[sweep]\n");
        let dps = &self.sweep.delta_p_values;
        s.push_str(&format!("delta_p_min = \"{} rad/s\"\n", dps[0]));
        s.push_str(&format!("delta_p_max = \"{} rad/s\"\n", dps[dps.len() - 1]));
        s.push_str(&format!("delta_p_count = {}\n", dps.len()));
        let omegas: Vec<String> = self
            .sweep
            .omega_p_inputs
            .iter()
            .map(|o| format!("\"{o} rad/s\""))
            .collect();
        s.push_str(&format!("omega_p = [{}]\n", omegas.join(", ")));
        s.push_str(&format!("realizations = {}\n", self.sweep.n_realizations));
        s.push_str(&format!("g2_input = {:?}\n", self.sweep.g2_input));
        s.push('\n');
        s.push_str("[propagation]\n");
        s.push_str(&format!(
            "mode = \"{}\"\n",
            match self.propagation.mode {
                PropagationMode::Stochastic => "stochastic",
                PropagationMode::Continuous => "continuous",
            }
        ));
        s.push_str(&format!("seed = {}\n", self.propagation.seed));
        s.push_str(&format!("substeps = {}\n", self.propagation.substeps));
        s.push_str(&format!("g2_feedback = {}\n", self.propagation.g2_feedback));
        s.push_str(&format!(
            "g2_weight = \"{}\"\n",
            match self.propagation.g2_weight {
                G2Weight::Conditional => "conditional",
                G2Weight::Unconditional => "unconditional",
            }
        ));
        s.push('\n');
        s.push_str("[output]\n");
        s.push_str(&format!("dir = {:?}\n", self.out_dir.display().to_string()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn preset_matches_published_parameters() {
        let cfg = load_preset("pritchard2010").unwrap();
        assert_eq!(cfg.system.gamma_e_pop, 3.8e7);
        assert_eq!(cfg.system.gamma_r_pop, 5e3);
        assert_relative_eq!(cfg.system.c6, TAU * 1.4e11, max_relative = 1e-15);
        assert_relative_eq!(cfg.system.omega_c, TAU * 2.25e6, max_relative = 1e-15);
        assert_relative_eq!(cfg.system.delta_c, -TAU * 1e5, max_relative = 1e-15);
        assert_relative_eq!(cfg.system.linewidth_1ph, TAU * 5.7e4, max_relative = 1e-15);
        assert_relative_eq!(cfg.system.linewidth_2ph, TAU * 1.1e5, max_relative = 1e-15);
        assert_eq!(cfg.medium.length, 1300.0);
        assert_relative_eq!(cfg.medium.rho_peak, 1.2e-2, max_relative = 1e-15);
        assert_eq!(cfg.medium.optical_depth, 4.524);
        assert_eq!(cfg.sweep.delta_p_values.len(), 201);
        assert_eq!(cfg.sweep.n_realizations, 10);
        assert_eq!(cfg.propagation.seed, 42);
        assert_eq!(cfg.propagation.mode, PropagationMode::Stochastic);
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(matches!(
            load_preset("nope"),
            Err(ConfigError::UnknownPreset(_))
        ));
    }

    #[test]
    fn empty_sweep_section_gets_defaults() {
        let text = PRESET_PRITCHARD2010.replace(
            r#"delta_p_min = "-15 MHz"
delta_p_max = "15 MHz"
delta_p_count = 201
omega_p = ["0.15 MHz", "0.5 MHz", "1.0 MHz"]
realizations = 10
g2_input = 1.0"#,
            "",
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.sweep.delta_p_values.len(), 201);
        assert_relative_eq!(
            cfg.sweep.delta_p_values[0],
            -TAU * 15e6,
            max_relative = 1e-15
        );
        assert_eq!(cfg.sweep.omega_p_inputs.len(), 3);
        assert_eq!(cfg.sweep.n_realizations, 10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = PRESET_PRITCHARD2010.replace("seed = 42", "seed = 42\nbogus_knob = 3");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("bogus_knob"), "{err}");
    }

    #[test]
    fn missing_unit_suffix_is_rejected() {
        let text = PRESET_PRITCHARD2010.replace("omega_c = \"2.25 MHz\"", "omega_c = \"2.25\"");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("omega_c") && msg.contains("unit"), "{msg}");
    }

    #[test]
    fn negative_control_field_is_rejected_naming_the_key() {
        let text = PRESET_PRITCHARD2010.replace("omega_c = \"2.25 MHz\"", "omega_c = \"-1 MHz\"");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("omega_c") && msg.contains("> 0"), "{msg}");
    }

    #[test]
    fn gaussian_profile_parses_with_default_center() {
        let text = PRESET_PRITCHARD2010.replace(
            "profile = \"homogeneous\"",
            "profile = \"gaussian\"\nsigma_rho = \"0.7 mm\"",
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(
            cfg.medium.kind,
            ProfileKind::Gaussian {
                center: 650.0,
                sigma_rho: 700.0
            }
        );
    }

    #[test]
    fn serialization_round_trips() {
        let preset = load_preset("pritchard2010").unwrap();
        let text = preset.to_toml_string();
        let reparsed = parse_config(&text).unwrap();
        assert_eq!(preset, reparsed);

        // also through a gaussian configuration
        let text = PRESET_PRITCHARD2010.replace(
            "profile = \"homogeneous\"",
            "profile = \"gaussian\"\nsigma_rho = \"0.7 mm\"",
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(parse_config(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn unit_conversions() {
        assert_relative_eq!(
            parse_angular("k", "2.5 MHz").unwrap(),
            TAU * 2.5e6,
            max_relative = 1e-15
        );
        assert_eq!(parse_angular("k", "3.8e7 1/s").unwrap(), 3.8e7);
        assert_eq!(parse_angular("k", "1e4 rad/s").unwrap(), 1e4);
        assert_eq!(parse_length_um("k", "1.3 mm").unwrap(), 1300.0);
        assert_eq!(parse_length_um("k", "6.6 um").unwrap(), 6.6);
        assert_relative_eq!(
            parse_density_um3("k", "1.2e7 mm^-3").unwrap(),
            1.2e-2,
            max_relative = 1e-15
        );
        assert!(parse_angular("k", "5 furlongs").is_err());
        assert!(parse_c6("k", "1.4e11 Hz").is_err());
    }
}
