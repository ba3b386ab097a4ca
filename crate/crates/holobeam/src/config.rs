//! Experiment configuration: file schema, defaults, and the dBm-to-watts
//! ingestion boundary. Everything past this module works in watts.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::channel::HmtConfig;
use crate::error::{Error, Result};

/// `10^(dbm/10)` milliwatts, in watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Selection policy run by the experiment harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Holobeam,
    SeqHalving,
    Uniform,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Holobeam => "holobeam",
            Policy::SeqHalving => "seq_halving",
            Policy::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holobeam" => Ok(Policy::Holobeam),
            "seq_halving" => Ok(Policy::SeqHalving),
            "uniform" => Ok(Policy::Uniform),
            other => Err(Error::Parse(format!("unknown policy '{other}'"))),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How each trial draws the user location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UserModel {
    /// Independent uniform draw of both direction parameters per trial.
    Uniform,
    Fixed { alpha1: f64, alpha2: f64 },
}

/// Where phase 1 freezes the second parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Beta2Init {
    /// 0-based index into the beta2 grid.
    Index(usize),
    /// The grid value closest to zero.
    #[serde(rename = "midpoint", with = "midpoint_str")]
    Midpoint,
}

mod midpoint_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str("midpoint")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "midpoint" {
            Ok(())
        } else {
            Err(de::Error::custom(format!(
                "beta2_init must be \"midpoint\" or an index, got \"{s}\""
            )))
        }
    }
}

/// Full sweep description. Field names double as the config-file schema;
/// powers are ingested in dBm and geometry in meters. Defaults reproduce
/// the 30 GHz reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub aperture_width: f64,
    pub aperture_length: f64,
    pub wavelength: f64,
    pub element_pitch: f64,
    pub radiation_factor: f64,
    pub noise_power_dbm: f64,
    /// One experiment cell per (policy, distance, power, budget).
    pub pilot_powers_dbm: Vec<f64>,
    /// Data transmit power; tracks the pilot power when absent.
    pub data_power_dbm: Option<f64>,
    pub distances_m: Vec<f64>,
    pub budgets: Vec<u64>,
    pub policies: Vec<Policy>,
    pub trials: u64,
    pub base_seed: u64,
    pub user_model: UserModel,
    pub total_slots: u64,
    pub beta2_init: Beta2Init,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            aperture_width: 1.0,
            aperture_length: 1.0,
            wavelength: 0.01,
            element_pitch: 0.0025,
            radiation_factor: 0.4,
            noise_power_dbm: -115.0,
            pilot_powers_dbm: vec![20.0],
            data_power_dbm: None,
            distances_m: vec![800.0],
            budgets: vec![50, 100, 200, 400, 800],
            policies: vec![Policy::Holobeam, Policy::SeqHalving, Policy::Uniform],
            trials: 1000,
            base_seed: 0x0b3a_17e5,
            user_model: UserModel::Uniform,
            total_slots: 10_000,
            beta2_init: Beta2Init::Midpoint,
        }
    }
}

impl ExperimentConfig {
    /// Watts-domain channel config for one sweep cell.
    pub fn cell_hmt(&self, power_dbm: f64, distance_m: f64) -> HmtConfig {
        let pilot = dbm_to_watts(power_dbm);
        HmtConfig {
            aperture_width: self.aperture_width,
            aperture_length: self.aperture_length,
            wavelength: self.wavelength,
            element_pitch: self.element_pitch,
            radiation_factor: self.radiation_factor,
            distance: distance_m,
            pilot_power: pilot,
            noise_power: dbm_to_watts(self.noise_power_dbm),
            data_power: self.data_power_dbm.map_or(pilot, dbm_to_watts),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        for (name, list_empty) in [
            ("pilot_powers_dbm", self.pilot_powers_dbm.is_empty()),
            ("distances_m", self.distances_m.is_empty()),
            ("budgets", self.budgets.is_empty()),
            ("policies", self.policies.is_empty()),
        ] {
            if list_empty {
                return Err(Error::InvalidConfig(format!("{name} must not be empty")));
            }
        }
        if let Some(&max_n) = self.budgets.iter().max() {
            if self.total_slots < max_n {
                return Err(Error::InvalidConfig(format!(
                    "total_slots {} smaller than largest budget {max_n}",
                    self.total_slots
                )));
            }
        }
        if let UserModel::Fixed { alpha1, alpha2 } = self.user_model {
            if alpha1.abs() > 1.0 || alpha2.abs() > 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "fixed user ({alpha1}, {alpha2}) outside [-1, 1]^2"
                )));
            }
        }
        // every cell must produce a valid channel config
        for &p in &self.pilot_powers_dbm {
            for &d in &self.distances_m {
                self.cell_hmt(p, d).validate()?;
            }
        }
        Ok(())
    }
}

/// Parses a TOML experiment config; absent keys take the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_conversions() {
        assert_relative_eq!(dbm_to_watts(20.0), 0.1, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(-115.0), 3.1622776601683794e-15, max_relative = 1e-12);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(5.0)), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn defaults_validate_and_match_reference_setup() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let hmt = cfg.cell_hmt(20.0, 800.0);
        hmt.validate().unwrap();
        assert_relative_eq!(hmt.kx(), 100.0, max_relative = 1e-12);
        assert_relative_eq!(hmt.g(), 3.957858736028819e-14, max_relative = 1e-9);
    }

    #[test]
    fn parse_minimal_and_full() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());

        let text = r#"
            distances_m = [500.0, 800.0]
            pilot_powers_dbm = [5.0, 20.0]
            budgets = [100, 200]
            trials = 10
            policies = ["holobeam", "uniform"]
            user_model = { kind = "fixed", alpha1 = 0.5, alpha2 = -0.5 }
            beta2_init = 50
        "#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.policies, vec![Policy::Holobeam, Policy::Uniform]);
        assert_eq!(cfg.beta2_init, Beta2Init::Index(50));
        assert_eq!(
            cfg.user_model,
            UserModel::Fixed {
                alpha1: 0.5,
                alpha2: -0.5
            }
        );
    }

    #[test]
    fn parse_rejects_bad_configs() {
        assert!(parse_config("trials = 0").is_err());
        assert!(parse_config("budgets = []").is_err());
        assert!(parse_config("budgets = [20000]").is_err());
        assert!(parse_config("beta2_init = \"center\"").is_err());
        assert!(parse_config("no_such_key = 1").is_err());
        assert!(parse_config("noise_power_dbm = -115\nwavelength = -1.0").is_err());
    }

    #[test]
    fn policy_names_round_trip() {
        for p in [Policy::Holobeam, Policy::SeqHalving, Policy::Uniform] {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
        }
        assert!("lse".parse::<Policy>().is_err());
    }
}
