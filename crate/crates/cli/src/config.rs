use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use antitree_core::{GrowthLaw, PotentialDistribution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PhaseDiagram,
    Lyapunov,
    Density,
    HarmonicCheck,
    GeometryAudit,
    SpectrumSets,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::PhaseDiagram,
        Experiment::Lyapunov,
        Experiment::Density,
        Experiment::HarmonicCheck,
        Experiment::GeometryAudit,
        Experiment::SpectrumSets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PhaseDiagram => "phase-diagram",
            Experiment::Lyapunov => "lyapunov",
            Experiment::Density => "density",
            Experiment::HarmonicCheck => "harmonic-check",
            Experiment::GeometryAudit => "geometry-audit",
            Experiment::SpectrumSets => "spectrum-sets",
        }
    }

    fn needs_distribution(self) -> bool {
        self != Experiment::GeometryAudit
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    /// `bernoulli`, `uniform`, `triangular` or `discrete`.
    pub kind: String,
    /// `(value, weight)` pairs for `discrete`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(f64, f64)>>,
}

impl DistributionConfig {
    pub fn build(&self) -> Result<PotentialDistribution, CliError> {
        let atoms_unused = || {
            if self.atoms.is_some() {
                Err(CliError::Config(format!("`atoms` is only valid for discrete, not {}", self.kind)))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "bernoulli" => atoms_unused().map(|_| PotentialDistribution::bernoulli()),
            "uniform" => atoms_unused().map(|_| PotentialDistribution::uniform()),
            "triangular" => atoms_unused().map(|_| PotentialDistribution::triangular()),
            "discrete" => {
                let atoms = self
                    .atoms
                    .as_ref()
                    .ok_or_else(|| CliError::Config("discrete distribution needs `atoms`".into()))?;
                PotentialDistribution::discrete(atoms).map_err(|e| CliError::Config(e.to_string()))
            }
            other => Err(CliError::Config(format!("unknown distribution kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Shell sizes, one integer per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<PathBuf>,
}

impl GrowthConfig {
    pub fn build(&self, base: &Path) -> Result<GrowthLaw, CliError> {
        match (self.d, self.custom.as_ref()) {
            (Some(d), None) => {
                GrowthLaw::uniform_power(d, self.c.unwrap_or(1.0)).map_err(|e| CliError::Config(e.to_string()))
            }
            (None, Some(path)) => {
                if self.c.is_some() {
                    return Err(CliError::Config("`C` cannot be combined with `custom`".into()));
                }
                GrowthLaw::from_file(&base.join(path)).map_err(|e| CliError::Config(e.to_string()))
            }
            _ => Err(CliError::Config("growth needs exactly one of `d` or `custom`".into())),
        }
    }
}

/// Inclusive grid of `steps` evenly spaced points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: u64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            s => (0..s).map(|j| self.min + (self.max - self.min) * j as f64 / (s - 1) as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    List(Vec<f64>),
    Grid(Grid),
}

impl LambdaSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            LambdaSpec::Value(v) => vec![*v],
            LambdaSpec::List(v) => v.clone(),
            LambdaSpec::Grid(g) => g.points(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionConfig>,
    #[serde(default = "default_lambda")]
    pub lambda: LambdaSpec,
    pub growth: GrowthConfig,
    #[serde(default = "default_energy")]
    pub energy: Grid,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Sample sizes for `harmonic-check`; defaults to a 1-2-5 ladder up to `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonic_n: Option<Vec<u64>>,
}

fn default_lambda() -> LambdaSpec {
    LambdaSpec::Value(1.0)
}

fn default_energy() -> Grid {
    Grid { min: 2.0, max: 2.0, steps: 1 }
}

fn default_trials() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self, experiment: Experiment) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(CliError::Config(format!("config is for `{e}`, not `{experiment}`")));
            }
        }
        if self.n < 1 {
            return bad("N must be at least 1");
        }
        if self.trials < 1 {
            return bad("trials must be at least 1");
        }
        if self.energy.steps < 1 || self.energy.points().iter().any(|e| !e.is_finite()) {
            return bad("energy grid must be nonempty and finite");
        }
        let lambdas = self.lambda.points();
        if lambdas.is_empty() || lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return bad("lambda grid must be nonempty, finite and nonnegative");
        }
        if experiment.needs_distribution() && self.distribution.is_none() {
            return Err(CliError::Config(format!("`{experiment}` needs a [distribution] block")));
        }
        match experiment {
            Experiment::Lyapunov if self.trials < 2 => bad("lyapunov needs at least 2 trials"),
            Experiment::HarmonicCheck if self.trials < 2 => bad("harmonic-check needs at least 2 trials"),
            Experiment::HarmonicCheck | Experiment::Density if lambdas.len() != 1 => {
                Err(CliError::Config(format!("`{experiment}` takes a single lambda")))
            }
            Experiment::HarmonicCheck if self.energy.steps != 1 => bad("harmonic-check takes a single energy"),
            Experiment::GeometryAudit => match self.growth.d {
                Some(d) if d.fract() == 0.0 && (1.0..=5.0).contains(&d) => Ok(()),
                _ => bad("geometry-audit needs an integer growth.d in 1..=5"),
            },
            _ => Ok(()),
        }
    }

    /// Key-sorted compact JSON without `output_dir`, the form that gets hashed.
    pub fn canonical_json(&self) -> String {
        // serde_json::Value objects are BTreeMap-backed, so keys come out sorted.
        let mut v = serde_json::to_value(self).expect("config is always representable as JSON");
        v.as_object_mut().expect("config is a table").remove("output_dir");
        serde_json::to_string(&v).expect("JSON value serializes")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn harmonic_sizes(&self) -> Vec<u64> {
        if let Some(v) = &self.harmonic_n {
            return v.iter().copied().filter(|&n| n >= 1).collect();
        }
        let mut out = Vec::new();
        let mut decade = 1u64;
        while decade <= self.n {
            for m in [1, 2, 5] {
                if decade * m <= self.n {
                    out.push(decade * m);
                }
            }
            decade = decade.saturating_mul(10);
        }
        out
    }
}
