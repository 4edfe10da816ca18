//! Run configuration shared by the flag front end and `run --config`.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use hopial::constants::{ExponentSet, TheoremId};
use hopial::funcspace::{FamilyKind, FunctionSpec, Interval};
use hopial::opial::OpialVariant;
use hopial::verify::{ParamFamily, SearchTarget, WeightPlan};
use hopial::Mode;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COUNT: usize = 200;
pub const DEFAULT_BUDGET: usize = 60;

fn unit() -> Interval {
    Interval::unit()
}

fn one() -> FunctionSpec {
    FunctionSpec::constant(1.0)
}

fn default_count() -> usize {
    DEFAULT_COUNT
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// A complete run. On disk this is one flat JSON object: the job's fields
/// next to `command` and the shared keys below.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub job: Job,
    pub interval: Interval,
    /// Fixed relative quadrature tolerance; structural defaults when unset.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub output: Outputs,
}

/// The keys shared by every command.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Shared {
    #[serde(default = "unit")]
    interval: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default)]
    output: Outputs,
}

const SHARED_KEYS: [&str; 4] = ["interval", "tol", "seed", "output"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    /// Directory for `suite` artifacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

// Externally tagged so that deserialization errors keep their field path;
// `RunConfig` moves the tag into a `command` key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Job {
    Constant {
        theorem: TheoremId,
        #[serde(default = "one")]
        r: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Verify {
        theorem: TheoremId,
        #[serde(default = "one")]
        r: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
        f: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    Sweep {
        theorem: TheoremId,
        #[serde(default = "default_count")]
        count: usize,
        /// Test-function family; random piecewise-linear when unset.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<FamilyKind>,
        /// Weights; random power laws when unset.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<WeightChoice>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
        /// Also sweep the alternate mode and attach it as a companion report.
        #[serde(default, skip_serializing_if = "is_false")]
        both_modes: bool,
    },
    Sharpness {
        target: SearchTarget,
        family: ParamFamily,
        #[serde(default = "default_budget")]
        budget: usize,
    },
    Lemma {
        variant: OpialVariant,
        y: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split: Option<f64>,
    },
    Suite,
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Constant { .. } => "constant",
            Job::Verify { .. } => "verify",
            Job::Sweep { .. } => "sweep",
            Job::Sharpness { .. } => "sharpness",
            Job::Lemma { .. } => "lemma",
            Job::Suite => "suite",
        }
    }
}

/// Sweep weights as written in a config; the seed comes from the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightChoice {
    Unit,
    Fixed {
        r: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
    },
    RandomPowerLaw {
        alpha_range: (f64, f64),
        c_range: (f64, f64),
    },
}

impl WeightChoice {
    pub fn plan(&self, seed: u64) -> WeightPlan {
        match self {
            WeightChoice::Unit => WeightPlan::unit(),
            WeightChoice::Fixed { r, s } => WeightPlan::Fixed {
                r: r.clone(),
                s: s.clone(),
            },
            WeightChoice::RandomPowerLaw { alpha_range, c_range } => WeightPlan::RandomPowerLaw {
                alpha_range: *alpha_range,
                c_range: *c_range,
                // Keep weight draws independent of the f family stream.
                seed: seed ^ 0x5DEE_CE66_D1CE_4E5B,
            },
        }
    }
}

impl Default for WeightChoice {
    fn default() -> Self {
        WeightChoice::RandomPowerLaw {
            alpha_range: (0.0, 2.0),
            c_range: (0.5, 2.0),
        }
    }
}

pub fn default_family() -> FamilyKind {
    FamilyKind::RandomPiecewiseLinear {
        n_knots: 4,
        value_range: (0.0, 1.0),
        pin_zero: Default::default(),
    }
}

impl RunConfig {
    pub fn new(job: Job) -> Self {
        Self {
            job,
            interval: Interval::unit(),
            tol: None,
            seed: None,
            output: Outputs::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Parses a JSON config, naming the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
        let Value::Object(mut fields) = value else {
            bail!("config: expected a JSON object");
        };
        let command = match fields.remove("command") {
            Some(Value::String(c)) => c,
            Some(other) => bail!("config field `command`: expected a string, got {other}"),
            None => bail!("config field `command`: missing"),
        };
        let mut shared = Map::new();
        for key in SHARED_KEYS {
            if let Some(v) = fields.remove(key) {
                shared.insert(key.to_string(), v);
            }
        }
        let shared: Shared = serde_path_to_error::deserialize(Value::Object(shared))
            .map_err(|e| anyhow!("config field `{}`: {}", e.path(), e.inner()))?;
        let tagged = if command == "suite" && fields.is_empty() {
            Value::String(command)
        } else {
            Value::Object(Map::from_iter([(command, Value::Object(fields))]))
        };
        let job: Job = serde_path_to_error::deserialize(tagged).map_err(|e| {
            // Drop the synthetic leading `command.` segment from the path.
            let path = e.path().to_string();
            let field = path.split_once('.').map_or(path.as_str(), |(_, rest)| rest);
            anyhow!(
                "config field `{}`: {}",
                if field.is_empty() { "command" } else { field },
                e.inner()
            )
        })?;
        let cfg = RunConfig {
            job,
            interval: shared.interval,
            tol: shared.tol,
            seed: shared.seed,
            output: shared.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        let mut out = Map::new();
        out.insert("command".into(), Value::String(self.job.name().into()));
        if let Ok(Value::Object(tagged)) = serde_json::to_value(&self.job) {
            for (_, body) in tagged {
                if let Value::Object(fields) = body {
                    out.extend(fields);
                }
            }
        }
        let shared = Shared {
            interval: self.interval,
            tol: self.tol,
            seed: self.seed,
            output: self.output.clone(),
        };
        if let Ok(Value::Object(fields)) = serde_json::to_value(&shared) {
            out.extend(fields);
        }
        Value::Object(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.interval.validate().map_err(|e| anyhow!("interval: {e}"))?;
        if let Some(t) = self.tol {
            if !(t > 1e-14 && t < 1e-2) {
                bail!("tol: {t} outside the accepted range (1e-14, 1e-2)");
            }
        }
        match &self.job {
            Job::Sweep { count, .. } if *count == 0 => bail!("count: must be at least 1"),
            Job::Sharpness { budget, .. } if *budget < 50 => bail!("budget: must be at least 50"),
            _ => Ok(()),
        }
    }
}
