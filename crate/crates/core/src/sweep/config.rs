use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detection::DetectorModel;
use crate::error::{Error, Result};
use crate::states::{ResourceFamily, SqueezingPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceChoice {
    Cat,
    Sqphoton,
}

impl ResourceChoice {
    pub fn family(self, policy: SqueezingPolicy) -> ResourceFamily {
        match self {
            ResourceChoice::Cat => ResourceFamily::ExactCat,
            ResourceChoice::Sqphoton => ResourceFamily::SqueezedPhoton(policy),
        }
    }
}

/// What a custom run sweeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    #[default]
    Teleport,
    Hadamard,
    Fringe,
    Cat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig9,
    Fig11,
    Fig12,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig1,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig9,
        FigureId::Fig11,
        FigureId::Fig12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig9 => "fig9",
            FigureId::Fig11 => "fig11",
            FigureId::Fig12 => "fig12",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.strip_prefix("fig").unwrap_or(&key);
        Self::ALL
            .into_iter()
            .find(|f| &f.name()[3..] == key)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|f| f.name()).collect();
                Error::Config(format!("unknown figure '{s}', expected one of {}", known.join(", ")))
            })
    }
}

/// A sweep request. Unset lists fall back to per-experiment defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Figure id (`fig1`, ...) or the name of a custom experiment.
    pub experiment: String,
    pub alpha: Option<Vec<f64>>,
    pub eta: Option<Vec<f64>>,
    /// Points per axis of input grids.
    pub grid: usize,
    pub resource: Option<ResourceChoice>,
    pub r_policy: SqueezingPolicy,
    /// Cutoff override for every mode.
    pub dim: Option<usize>,
    pub out: PathBuf,
    /// Defaults to the available cores.
    pub workers: Option<usize>,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
    pub protocol: Protocol,
    pub theta: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: "custom".into(),
            alpha: None,
            eta: None,
            grid: 64,
            resource: None,
            r_policy: SqueezingPolicy::Numeric,
            dim: None,
            out: PathBuf::from("out"),
            workers: None,
            seed: 0,
            protocol: Protocol::Teleport,
            theta: None,
            phi: None,
            delta: None,
        }
    }
}

const MAX_GRID: usize = 1024;
const MAX_DIM: usize = 400;

fn check_list(name: &str, list: &Option<Vec<f64>>, ok: impl Fn(f64) -> bool, rule: &str) -> Result<()> {
    if let Some(v) = list {
        if v.is_empty() {
            return Err(Error::Config(format!("{name} list is empty")));
        }
        if let Some(x) = v.iter().find(|&&x| !ok(x)) {
            return Err(Error::Config(format!("{name} = {x}: {rule}")));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let name_ok = !self.experiment.is_empty()
            && self.experiment.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !name_ok {
            return Err(Error::Config(format!(
                "experiment name '{}' must be non-empty and use only letters, digits, '-' or '_'",
                self.experiment
            )));
        }
        check_list("alpha", &self.alpha, |a| a.is_finite() && a > 0.0 && a <= 4.0, "must be in (0, 4]")?;
        check_list("eta", &self.eta, |e| (0.0..=1.0).contains(&e), "must be in [0, 1]")?;
        check_list("theta", &self.theta, f64::is_finite, "must be finite")?;
        check_list("phi", &self.phi, f64::is_finite, "must be finite")?;
        check_list("delta", &self.delta, |d| d.is_finite() && d.abs() <= 10.0, "must be in [-10, 10]")?;
        if !(2..=MAX_GRID).contains(&self.grid) {
            return Err(Error::Config(format!("grid = {} must be in [2, {MAX_GRID}]", self.grid)));
        }
        if let Some(d) = self.dim {
            if !(2..=MAX_DIM).contains(&d) {
                return Err(Error::Config(format!("dim = {d} must be in [2, {MAX_DIM}]")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Validates and additionally requires an explicit, non-empty alpha list.
    pub fn validate_custom(&self) -> Result<()> {
        self.validate()?;
        if self.alpha.is_none() {
            return Err(Error::Config("custom runs need an alpha list".into()));
        }
        Ok(())
    }

    pub fn alphas_or(&self, default: &[f64]) -> Vec<f64> {
        self.alpha.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn etas_or(&self, default: &[f64]) -> Vec<f64> {
        self.eta.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn family_or(&self, default: ResourceChoice) -> ResourceFamily {
        self.resource.unwrap_or(default).family(self.r_policy)
    }

    pub fn detectors(etas: &[f64]) -> Result<Vec<DetectorModel>> {
        etas.iter().map(|&e| DetectorModel::new(e)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::from_json(r#"{"alpha": [1.0], "colour": 3}"#).is_err());
        let c = RunConfig::from_json(r#"{"alpha": [1.0], "r_policy": "eq8", "resource": "sqphoton"}"#).unwrap();
        assert_eq!(c.r_policy, SqueezingPolicy::Eq8);
        assert_eq!(c.grid, 64);
    }

    #[test]
    fn validation() {
        let ok = RunConfig { alpha: Some(vec![1.0]), ..Default::default() };
        ok.validate_custom().unwrap();
        assert!(RunConfig { alpha: Some(vec![]), ..Default::default() }.validate().is_err());
        assert!(RunConfig { eta: Some(vec![1.2]), ..ok.clone() }.validate().is_err());
        assert!(RunConfig { grid: 1, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { experiment: "../x".into(), ..ok.clone() }.validate().is_err());
        assert!(RunConfig::default().validate_custom().is_err());
    }

    #[test]
    fn figure_names() {
        assert_eq!(FigureId::parse("fig11").unwrap(), FigureId::Fig11);
        assert_eq!(FigureId::parse("3").unwrap(), FigureId::Fig3);
        assert!(FigureId::parse("fig2").is_err());
    }
}
