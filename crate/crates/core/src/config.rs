//! Experiment configuration, read from a single JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::GridConfig;
use crate::error::{Error, Result};
use crate::geometry::SphereRule;
use crate::model_space::ModelSpace;

/// Sphere quadrature sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphereConfig {
    /// Gauss–Legendre nodes in `cos θ` on `S²`.
    pub polar: usize,
    /// Uniform azimuth nodes on `S²`.
    pub azimuth: usize,
    /// Uniform nodes on `S¹`.
    pub circle: usize,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self { polar: 64, azimuth: 128, circle: 512 }
    }
}

impl SphereConfig {
    pub fn rule(&self, n: usize) -> Result<SphereRule> {
        match n {
            2 => SphereRule::new(2, 0, self.circle),
            _ => SphereRule::new(n, self.polar, self.azimuth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: String,
    /// Space in the short form accepted by [`ModelSpace::parse`]; the file may
    /// also give `{"kind": "hyperbolic", "n": 3}` or
    /// `{"kind": "damek-ricci", "p": 2, "q": 1}`.
    #[serde(deserialize_with = "space_selection")]
    pub space: String,
    /// Seed for every randomized choice of test functions.
    pub seed: u64,
    pub grid: GridConfig,
    pub sphere: SphereConfig,
    /// Number of sample points for point-level checks.
    pub samples: usize,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    /// Report destination; `None` prints to stdout.
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpaceSelection {
    Short(String),
    Keys(SpaceKeys),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceKeys {
    kind: String,
    n: Option<usize>,
    p: Option<usize>,
    q: Option<usize>,
}

fn space_selection<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    use serde::de::Error as _;
    match SpaceSelection::deserialize(d)? {
        SpaceSelection::Short(text) => Ok(text),
        SpaceSelection::Keys(SpaceKeys { kind, n, p, q }) => match (kind.as_str(), n, p, q) {
            ("euclidean" | "hyperbolic", Some(n), None, None) => Ok(format!("{kind}:{n}")),
            ("damek-ricci", None, Some(p), Some(q)) => Ok(format!("damek-ricci:{p}:{q}")),
            _ => Err(D::Error::custom(format!(
                "space kind '{kind}' needs n (euclidean, hyperbolic) or p and q (damek-ricci)"
            ))),
        },
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "harmonia".into(),
            space: "h3".into(),
            seed: 7,
            grid: GridConfig::default(),
            sphere: SphereConfig::default(),
            samples: 5,
            tolerances: BTreeMap::new(),
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: Self =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn model_space(&self) -> Result<ModelSpace> {
        ModelSpace::parse(&self.space)
    }

    /// Checks ranges; tolerance keys are checked against the suite's check names
    /// when a suite runs.
    pub fn validate(&self) -> Result<()> {
        self.model_space()?;
        self.grid.validate()?;
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        let s = &self.sphere;
        if s.polar < 4 || s.azimuth < 4 || s.circle < 4 {
            return Err(Error::Config("sphere quadrature needs at least 4 nodes per direction".into()));
        }
        for (name, &tol) in &self.tolerances {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Config(format!("tolerance '{name}' must lie in (0, 1), got {tol}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"space": "h3", "colour": 1}"#).is_err());
        let c: ExperimentConfig = serde_json::from_str(r#"{"grid": {"r_max": 6.0}}"#).unwrap();
        assert_eq!(c.grid.r_max, 6.0);
        assert_eq!(c.grid.radial_nodes, 257);
        c.validate().unwrap();
        let bad: ExperimentConfig = serde_json::from_str(r#"{"tolerances": {"heat.unit_mass": 2.0}}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad: ExperimentConfig = serde_json::from_str(r#"{"space": "q7"}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn space_keys_and_short_form_agree() {
        let keyed: ExperimentConfig = serde_json::from_str(r#"{"space": {"kind": "hyperbolic", "n": 3}}"#).unwrap();
        assert_eq!(keyed.model_space().unwrap(), ModelSpace::parse("h3").unwrap());
        let dr: ExperimentConfig = serde_json::from_str(r#"{"space": {"kind": "damek-ricci", "p": 2, "q": 1}}"#).unwrap();
        assert_eq!(dr.model_space().unwrap(), ModelSpace::damek_ricci(2, 1).unwrap());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"space": {"kind": "hyperbolic", "p": 3}}"#).is_err());
    }
}
