use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyVariant;
use crate::game::PathModel;
use crate::model::{Instance, MovementCost};
use crate::schema::InstanceDoc;
use crate::window::{GridSpec, Solver};

/// Bound checks a config may assert.
pub const REGISTERED_CHECKS: [&str; 3] = ["greedy-ratio", "average-ratio", "convexified-average-ratio"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    /// `max(1 + (eta + eta^2)/(2 lambda), eta^2)` for greedy.
    Greedy,
    /// `1 + (1/w) max(eta/lambda, 2(eta - 1))` for the deterministic average
    /// on convex instances.
    Average,
    /// `(1 + alpha/lambda)(1 + (1/w) max(2/lambda, 2))` for the deterministic
    /// average with `0.5 ||.||^2` movement.
    ConvexifiedAverage,
}

impl BoundCheck {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "greedy-ratio" => Ok(BoundCheck::Greedy),
            "average-ratio" => Ok(BoundCheck::Average),
            "convexified-average-ratio" => Ok(BoundCheck::ConvexifiedAverage),
            other => Err(Error::input(format!(
                "unknown check \"{other}\"; registered: {}",
                REGISTERED_CHECKS.join(", ")
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundCheck::Greedy => "greedy-ratio",
            BoundCheck::Average => "average-ratio",
            BoundCheck::ConvexifiedAverage => "convexified-average-ratio",
        }
    }

    /// Bound value when the check covers this run.
    pub fn bound(self, algorithm: AlgorithmKind, w: usize, instance: &Instance) -> Option<f64> {
        let (eta, lambda) = (instance.eta(), instance.lambda()?);
        match self {
            BoundCheck::Greedy => {
                let greedy_like = algorithm == AlgorithmKind::Greedy
                    || (w == 1 && matches!(algorithm, AlgorithmKind::Dsfhc | AlgorithmKind::Sfhc));
                greedy_like.then(|| crate::bounds::greedy_ratio(eta, lambda))
            }
            BoundCheck::Average => (algorithm == AlgorithmKind::Dsfhc && instance.is_convex())
                .then(|| crate::bounds::subroutine_average_ratio(eta, lambda, w)),
            BoundCheck::ConvexifiedAverage => (algorithm == AlgorithmKind::Dsfhc
                && *instance.movement() == MovementCost::SqL2Half)
                .then(|| instance.convexifier())
                .flatten()
                .map(|alpha| crate::bounds::convexifiable_dsfhc_ratio(alpha, lambda, w)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Greedy,
    Sfhc,
    Dsfhc,
    RsfhcA,
    RsfhcB,
    Afhc,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Greedy => "greedy",
            AlgorithmKind::Sfhc => "sfhc",
            AlgorithmKind::Dsfhc => "dsfhc",
            AlgorithmKind::RsfhcA => "rsfhc_a",
            AlgorithmKind::RsfhcB => "rsfhc_b",
            AlgorithmKind::Afhc => "afhc",
        }
    }

    pub fn randomized(self) -> bool {
        matches!(self, AlgorithmKind::RsfhcA | AlgorithmKind::RsfhcB)
    }
}

fn default_ws() -> Vec<usize> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: AlgorithmKind,
    #[serde(default = "default_ws")]
    pub ws: Vec<usize>,
    /// Phase for `sfhc`.
    #[serde(default)]
    pub h: usize,
    #[serde(default)]
    pub solver: Solver,
}

impl AlgorithmSpec {
    /// Row label, e.g. `sfhc(h=2)`.
    pub fn label(&self) -> String {
        match self.name {
            AlgorithmKind::Sfhc => format!("sfhc(h={})", self.h),
            k => k.name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSpec {
    Inline {
        id: String,
        instance: InstanceDoc,
    },
    Generator {
        id: String,
        family: FamilyVariant,
        path: PathModel,
        #[serde(rename = "T")]
        horizon: usize,
        x0: Vec<f64>,
        /// Snap start and minimizers to this lattice.
        #[serde(default)]
        snap: Option<GridSpec>,
    },
}

impl InstanceSpec {
    pub fn id(&self) -> &str {
        match self {
            InstanceSpec::Inline { id, .. } | InstanceSpec::Generator { id, .. } => id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Count { master: u64, count: usize },
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::List(vec![0])
    }
}

impl SeedSpec {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Count { master, count } => {
                let mut state = *master;
                (0..*count)
                    .map(|_| {
                        state = super::suite::splitmix64(state);
                        state
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    /// Lattice for the offline optimum. Without one, quadratic instances
    /// use the exact chain and others a lattice covering the instance.
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub instances: Vec<InstanceSpec>,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.bound_checks()?;
        let mut ids = std::collections::HashSet::new();
        for inst in &self.instances {
            if !ids.insert(inst.id()) {
                return Err(Error::input(format!("duplicate instance id \"{}\"", inst.id())));
            }
        }
        for alg in &self.algorithms {
            if alg.ws.contains(&0) {
                return Err(Error::input(format!("{}: window lengths must be >= 1", alg.label())));
            }
            if alg.name == AlgorithmKind::Sfhc && alg.ws.iter().any(|&w| alg.h >= w) {
                return Err(Error::input("sfhc phase h must be below every w"));
            }
            if alg.name == AlgorithmKind::RsfhcB && alg.ws.iter().any(|&w| w < 4) {
                return Err(Error::input("rsfhc_b needs w >= 4"));
            }
        }
        Ok(())
    }

    pub fn bound_checks(&self) -> Result<Vec<BoundCheck>> {
        self.checks.iter().map(|c| BoundCheck::parse(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_fails_at_parse_time() {
        let err = ExperimentConfig::from_json(r#"{"checks": ["no-such-bound"]}"#).unwrap_err();
        assert!(err.to_string().contains("no-such-bound"));
    }

    #[test]
    fn seed_count_is_deterministic() {
        let s = SeedSpec::Count { master: 9, count: 4 };
        assert_eq!(s.expand(), s.expand());
        assert_eq!(s.expand().len(), 4);
    }

    #[test]
    fn empty_config_parses() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert!(cfg.instances.is_empty());
    }
}
