//! Experiment configuration: a TOML document, overridden field by field by
//! command-line flags, then resolved against per-experiment defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use congrowth::group::ModelKind;
use congrowth::series::SeriesKind;
use congrowth::{Execution, GroupModel, ShardPlan};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ModelInfo,
    CensusBalls,
    CensusConjugacy,
    CensusBarriers,
    CensusFractional,
    CensusDrift,
    AuditContraction,
    Admissible,
    ComplexBuild,
    ComplexLoxodromic,
    ComplexAcyl,
    Series,
    SccEstimate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        use Experiment::*;
        match self {
            ModelInfo => "model-info",
            CensusBalls => "census-balls",
            CensusConjugacy => "census-conjugacy",
            CensusBarriers => "census-barriers",
            CensusFractional => "census-fractional",
            CensusDrift => "census-drift",
            AuditContraction => "audit-contraction",
            Admissible => "admissible",
            ComplexBuild => "complex-build",
            ComplexLoxodromic => "complex-loxodromic",
            ComplexAcyl => "complex-acyl",
            Series => "series",
            SccEstimate => "scc-estimate",
        }
    }

    /// Parameters the experiment reads, beyond the common ones.
    fn params(self) -> &'static [&'static str] {
        use Experiment::*;
        match self {
            ModelInfo => &["max_radius", "g", "search_radius"],
            CensusBalls => &["max_radius", "annulus_width"],
            CensusConjugacy => &["max_radius", "delta_hat", "fit_lo", "fit_hi"],
            CensusBarriers => &[
                "max_radius",
                "epsilon",
                "slack",
                "proper",
                "f",
                "fit_lo",
                "fit_hi",
            ],
            CensusFractional => &[
                "max_radius",
                "epsilon",
                "f",
                "theta",
                "min_len",
                "fit_lo",
                "fit_hi",
            ],
            CensusDrift => &[
                "max_radius",
                "epsilon",
                "f",
                "power",
                "theta1",
                "theta2",
                "fit_lo",
                "fit_hi",
            ],
            AuditContraction => &["f", "t", "axis_radius", "sample_radius"],
            Admissible => &["f", "power", "t1", "t2", "d", "tau", "window_radius"],
            ComplexBuild => &["f", "k", "window_radius"],
            ComplexLoxodromic => &["f", "g", "k", "k_prime", "max_radius", "window_radius"],
            ComplexAcyl => &[
                "f",
                "k",
                "window_radius",
                "d",
                "r_values",
                "mover_radius",
                "sample_size",
                "samples",
                "search_radius",
            ],
            Series => &[
                "kind",
                "max_radius",
                "max_order",
                "delta_hat",
                "fit_lo",
                "fit_hi",
                "annulus_width",
            ],
            SccEstimate => &["generators", "m1", "m2", "max_radius"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const COMMON: &[&str] = &[
    "experiment",
    "id",
    "model",
    "budget",
    "shards",
    "sequential",
    "seed",
    "out_dir",
];

/// Every field is optional on input; [`ExperimentConfig::resolve`] fills the
/// ones the experiment reads and rejects the ones it does not.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment kind (config files only; subcommands set it).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    /// Experiment id; names the output files.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Group model: free(2), F2, free-product(2,3), Z2*Z3, ...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Cap on enumerated elements.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shards: Option<usize>,
    /// Run shards in order on one thread.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequential: Option<bool>,
    /// Seed for sampled probes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_radius: Option<usize>,
    /// Annulus half-width Δ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus_width: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<usize>,
    /// Endpoint slack M of the barrier-free census.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<usize>,
    /// Require barriers to enter and exit the path in its interior.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    /// Contracting element, as a word such as "a b'".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Axis translate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<String>,
    /// Power m of f.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    /// Minimal barrier-free interval length L.
    #[arg(long = "L", alias = "min-len")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_len: Option<usize>,
    #[arg(long = "K")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long = "K-prime")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<usize>,
    /// Admissible length threshold D, or the displacement bound of the
    /// acylindricity probe.
    #[arg(long = "D")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Connector projection bound of admissible paths.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<usize>,
    /// Fit window start.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_lo: Option<usize>,
    /// Fit window end.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_hi: Option<usize>,
    #[arg(long = "R", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mover_radius: Option<usize>,
    /// Vertex pairs sampled per R.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    /// Random elements sampled for the kernel bound.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_radius: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_radius: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_radius: Option<usize>,
    /// Series kind: sphere, ball, conjugacy-pointed, conjugacy-primitive,
    /// conjugacy-stable-capped.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_hat: Option<f64>,
    /// Subgroup generators, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[arg(long = "M1")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<usize>,
    #[arg(long = "M2")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $(if $top.$field.is_some() { $base.$field = $top.$field.clone(); })*
    };
}

macro_rules! default {
    ($cfg:ident; $($field:ident = $value:expr),* $(,)?) => {{
        $(if $cfg.$field.is_none() { $cfg.$field = Some($value); })*
    }};
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &ExperimentConfig) -> Self {
        overlay!(self, top;
            experiment, id, model, budget, shards, sequential, seed, out_dir, max_radius, annulus_width,
            epsilon, slack, proper, f, g, t, t1, t2, power, theta, theta1, theta2, min_len, k, k_prime,
            d, tau, window_radius, fit_lo, fit_hi, r_values, mover_radius, sample_size, samples,
            search_radius, axis_radius, sample_radius, kind, max_order, delta_hat, generators, m1, m2,
        );
        self
    }

    /// Fills defaults and validates every parameter; no enumeration happens
    /// before this succeeds.
    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        let experiment = self
            .experiment
            .ok_or_else(|| usage("no experiment selected"))?;
        let set: Vec<String> = match serde_json::to_value(&self) {
            Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        };
        for key in &set {
            if !COMMON.contains(&key.as_str()) && !experiment.params().contains(&key.as_str()) {
                return Err(usage(format!(
                    "parameter {key} does not apply to {experiment}"
                )));
            }
        }
        default!(self;
            id = experiment.name().to_string(),
            model = "free(2)".to_string(),
            budget = ShardPlan::default().budget,
            shards = ShardPlan::default().shards,
            sequential = false,
            seed = 0,
            out_dir = PathBuf::from("."),
        );
        use Experiment::*;
        match experiment {
            ModelInfo => {
                default!(self; max_radius = 6);
                if self.g.is_some() {
                    default!(self; search_radius = 6);
                }
            }
            CensusBalls => default!(self; max_radius = 10, annulus_width = 0),
            CensusConjugacy => default!(self; max_radius = 10, fit_lo = 1),
            CensusBarriers => {
                default!(self; max_radius = 8, epsilon = 2, slack = 0, proper = false, fit_lo = 1)
            }
            CensusFractional => {
                default!(self; max_radius = 8, epsilon = 2, theta = 0.5, min_len = 2, fit_lo = 1)
            }
            CensusDrift => {
                default!(self; max_radius = 8, epsilon = 2, power = 1, theta1 = 0.5, theta2 = 0.5, fit_lo = 1)
            }
            AuditContraction => {
                default!(self; t = "e".to_string(), axis_radius = 5, sample_radius = 4)
            }
            Admissible => default!(self; power = 4, d = 2, window_radius = 2),
            ComplexBuild => default!(self; window_radius = 3),
            ComplexLoxodromic => {
                default!(self; k = 3, k_prime = 1, max_radius = 3, window_radius = 1)
            }
            ComplexAcyl => default!(self;
                window_radius = 3, d = 1, r_values = vec![1, 2, 3, 4], mover_radius = 2, sample_size = 200,
                samples = 24, search_radius = 8,
            ),
            Series => default!(self; max_radius = 12, max_order = 4, fit_lo = 1),
            SccEstimate => default!(self; m1 = 1, m2 = 1, max_radius = 10),
        }
        if matches!(
            experiment,
            CensusConjugacy | CensusBarriers | CensusFractional | CensusDrift | Series
        ) {
            default!(self; fit_hi = self.max_radius.unwrap_or(0));
        }
        self.validate(experiment)
    }

    fn validate(self, experiment: Experiment) -> Result<Resolved, CliError> {
        let kind = parse_model(self.model.as_deref().unwrap_or_default())?;
        let model = GroupModel::from_kind(&kind).map_err(|e| usage(e.to_string()))?;
        if self.shards == Some(0) {
            return Err(usage("shards must be positive"));
        }
        for (name, v) in [
            ("theta", self.theta),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
        ] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) || (name == "theta" && v == 0.0) {
                    return Err(usage(format!("{name} = {v} is out of range")));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.fit_lo, self.fit_hi) {
            if lo >= hi || hi > self.max_radius.unwrap_or(usize::MAX) {
                return Err(usage(format!(
                    "fit window {lo}..={hi} must be increasing and within max_radius"
                )));
            }
        }
        for (name, v) in [
            ("k", self.k),
            ("power", self.power),
            ("d", self.d),
            ("m1", self.m1),
        ] {
            if v == Some(0) {
                return Err(usage(format!("{name} must be positive")));
            }
        }
        if let Some(r) = &self.r_values {
            if r.is_empty() || r.contains(&0) {
                return Err(usage("R values must be positive"));
            }
        }
        if let Some(k) = &self.kind {
            SeriesKind::from_str(k).map_err(|e| usage(e.to_string()))?;
        } else if experiment == Experiment::Series {
            return Err(usage("series needs --kind"));
        }
        for (name, word) in [
            ("f", &self.f),
            ("g", &self.g),
            ("t", &self.t),
            ("t1", &self.t1),
            ("t2", &self.t2),
        ] {
            if let Some(w) = word {
                model.parse(w).map_err(|e| usage(format!("{name}: {e}")))?;
            }
        }
        let needs_f = matches!(
            experiment,
            Experiment::CensusBarriers
                | Experiment::CensusFractional
                | Experiment::CensusDrift
                | Experiment::AuditContraction
                | Experiment::Admissible
                | Experiment::ComplexBuild
                | Experiment::ComplexLoxodromic
                | Experiment::ComplexAcyl
        );
        if needs_f && self.f.is_none() {
            return Err(usage(format!("{experiment} needs --f")));
        }
        if experiment == Experiment::ComplexLoxodromic && self.g.is_none() {
            return Err(usage("complex-loxodromic needs --g"));
        }
        if experiment == Experiment::SccEstimate {
            let gens = self.generators.as_deref().unwrap_or_default();
            if gens.is_empty() {
                return Err(usage("scc-estimate needs --generators"));
            }
            for w in gens {
                model
                    .parse(w)
                    .map_err(|e| usage(format!("generator {w:?}: {e}")))?;
            }
            if self.m2 < self.m1 {
                return Err(usage("need M1 <= M2"));
            }
        }
        let plan = ShardPlan::default()
            .with_shards(self.shards.unwrap_or(1))
            .with_budget(self.budget.unwrap_or(u64::MAX))
            .with_execution(if self.sequential == Some(true) {
                Execution::Sequential
            } else {
                Execution::Parallel
            });
        Ok(Resolved {
            experiment,
            model,
            plan,
            config: self,
        })
    }
}

/// A validated configuration together with the objects it describes.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub experiment: Experiment,
    pub model: GroupModel,
    pub plan: ShardPlan,
    pub config: ExperimentConfig,
}

/// Accepts `free(2)`, `F2`, `F_2`, `free-product(2,3)`, `free_product(2,3)`,
/// `Z2*Z3` and `Z/2*Z/3`.
pub fn parse_model(text: &str) -> Result<ModelKind, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || {
        usage(format!(
            "cannot parse model {text:?}; try free(2) or free-product(2,3)"
        ))
    };
    let numbers = |inner: &str| -> Result<Vec<u32>, CliError> {
        inner
            .split(',')
            .map(|x| x.parse::<u32>().map_err(|_| bad()))
            .collect()
    };
    let call = |prefix: &str| {
        s.strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    if let Some(inner) = call("free") {
        let v = numbers(inner)?;
        return match v.as_slice() {
            [rank] => Ok(ModelKind::Free {
                rank: *rank as usize,
            }),
            _ => Err(bad()),
        };
    }
    if let Some(inner) = call("free-product").or_else(|| call("free_product")) {
        return Ok(ModelKind::FreeProduct {
            orders: numbers(inner)?,
        });
    }
    if let Some(rank) = s.strip_prefix("F_").or_else(|| s.strip_prefix('F')) {
        return Ok(ModelKind::Free {
            rank: rank.parse().map_err(|_| bad())?,
        });
    }
    if s.starts_with('Z') {
        let orders = s
            .split('*')
            .map(|f| {
                let n = f
                    .strip_prefix("Z/")
                    .or_else(|| f.strip_prefix('Z'))
                    .ok_or_else(bad)?;
                n.parse::<u32>().map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(ModelKind::FreeProduct { orders });
    }
    Err(bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_spellings() {
        assert_eq!(parse_model("free(2)").unwrap(), ModelKind::Free { rank: 2 });
        assert_eq!(parse_model("F_3").unwrap(), ModelKind::Free { rank: 3 });
        let p = ModelKind::FreeProduct { orders: vec![2, 3] };
        for s in [
            "free-product(2, 3)",
            "free_product(2,3)",
            "Z2*Z3",
            "Z/2 * Z/3",
        ] {
            assert_eq!(parse_model(s).unwrap(), p, "{s}");
        }
        assert!(parse_model("SL(2,Z)").is_err());
        assert!(parse_model("free(2,3)").is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = ExperimentConfig {
            model: Some("F2".into()),
            max_radius: Some(4),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            max_radius: Some(7),
            ..Default::default()
        };
        let c = file.overlay(&flags);
        assert_eq!((c.model.as_deref(), c.max_radius), (Some("F2"), Some(7)));
    }

    #[test]
    fn resolve_fills_and_rejects() {
        let c = ExperimentConfig {
            experiment: Some(Experiment::CensusBalls),
            ..Default::default()
        };
        let r = c.clone().resolve().unwrap();
        assert_eq!(r.config.max_radius, Some(10));
        assert_eq!(r.config.id.as_deref(), Some("census-balls"));
        let stray = ExperimentConfig {
            theta: Some(0.5),
            ..c.clone()
        };
        assert!(matches!(stray.resolve(), Err(CliError::Usage(_))));
        let elementary = ExperimentConfig {
            experiment: Some(Experiment::CensusConjugacy),
            model: Some("free(1)".into()),
            ..Default::default()
        };
        assert!(matches!(elementary.resolve(), Err(CliError::Usage(_))));
    }
}
