use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use hbent::engine::LocalSearchConfig;
use hbent::harness::ExperimentSpec;
use hbent::{Encoding, EngineConfig, FitnessKind};
use serde::Deserialize;

/// `--k` value: a term count or `unrestricted`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermLimit {
    Unrestricted,
    Terms(usize),
}

impl FromStr for TermLimit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "unrestricted" => Ok(TermLimit::Unrestricted),
            t => t
                .parse()
                .map(TermLimit::Terms)
                .map_err(|_| format!("expected an integer or `unrestricted`, got `{s}`")),
        }
    }
}

impl fmt::Display for TermLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermLimit::Unrestricted => f.write_str("unrestricted"),
            TermLimit::Terms(k) => write!(f, "{k}"),
        }
    }
}

impl<'de> Deserialize<'de> for TermLimit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(TermLimit::Terms(k)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn parse_fitness(s: &str) -> Result<FitnessKind, String> {
    match s {
        "bent" => Ok(FitnessKind::Bent),
        "bent-k" | "bent_k" => Ok(FitnessKind::BentK),
        _ => Err(format!("unknown fitness `{s}`, expected bent or bent-k")),
    }
}

/// Evolution settings from a config file or the command line. Every field
/// is optional so that the two sources can be layered.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSettings {
    pub name: Option<String>,
    pub n: Option<usize>,
    pub degree: Option<usize>,
    pub encoding: Option<Encoding>,
    pub k: Option<TermLimit>,
    #[serde(default, deserialize_with = "fitness_field")]
    pub fitness: Option<FitnessKind>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub evaluations: Option<u64>,
    pub population: Option<usize>,
    pub pmut: Option<f64>,
    pub local_search: Option<bool>,
    pub ls_fraction: Option<f64>,
    pub ls_trials: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

fn fitness_field<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<FitnessKind>, D::Error> {
    let s = String::deserialize(d)?;
    parse_fitness(&s).map(Some).map_err(serde::de::Error::custom)
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl EvolveSettings {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: EvolveSettings) -> Self {
        overlay!(
            self, top, name, n, degree, encoding, k, fitness, runs, seed, evaluations, population,
            pmut, local_search, ls_fraction, ls_trials, workers, out
        );
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
    }

    pub fn into_spec(self) -> anyhow::Result<ExperimentSpec> {
        let Some(n) = self.n else {
            bail!("--n is required (flag or config file)");
        };
        let Some(d) = self.degree else {
            bail!("--degree is required (flag or config file)");
        };
        let encoding = self.encoding.unwrap_or(Encoding::Ranf);
        let mut engine = EngineConfig::new(encoding, n, d);
        engine.k = match self.k.unwrap_or(TermLimit::Unrestricted) {
            TermLimit::Unrestricted => None,
            TermLimit::Terms(k) => Some(k),
        };
        if let Some(f) = self.fitness {
            engine.fitness = f;
        } else if engine.k.is_some() && encoding != Encoding::Wanf {
            engine.fitness = FitnessKind::BentK;
        }
        if let Some(p) = self.population {
            engine.population_size = p;
        }
        if let Some(e) = self.evaluations {
            engine.max_evaluations = e;
        }
        if let Some(p) = self.pmut {
            engine.p_mut = p;
        }
        if self.local_search.unwrap_or(false) {
            let mut ls = LocalSearchConfig::default();
            if let Some(f) = self.ls_fraction {
                ls.fraction = f;
            }
            if let Some(t) = self.ls_trials {
                ls.trials = t;
            }
            engine.local_search = Some(ls);
        }
        engine.validate()?;

        let runs = self.runs.unwrap_or(30);
        if runs == 0 {
            bail!("--runs must be at least 1");
        }
        let name = self.name.unwrap_or_else(|| default_name(&engine));
        Ok(ExperimentSpec {
            name,
            engine,
            runs,
            base_seed: self.seed.unwrap_or(0),
            output_path: self.out.unwrap_or_else(|| PathBuf::from("results")),
        })
    }
}

fn default_name(engine: &EngineConfig) -> String {
    let k = engine.k.map_or("unrestricted".to_string(), |k| format!("k{k}"));
    let fitness = match engine.fitness {
        FitnessKind::Bent => "bent",
        FitnessKind::BentK => "bentk",
    };
    let ls = if engine.local_search.is_some() { "_ls" } else { "" };
    format!("n{}_d{}_{}_{k}_{fitness}{ls}", engine.n, engine.d, engine.encoding)
}
