//! Steady-state evolutionary algorithm with 3-tournament elimination and an
//! optional hill-climbing local search.
//!
//! Each iteration samples three distinct individuals, removes the worst
//! (ties broken uniformly at random), crosses the two survivors into one
//! child, mutates the child with probability `p_mut`, and puts the child in
//! the eliminated slot. Every decode-and-score counts as one evaluation,
//! including initialization and local search. A run stops when the budget
//! is used up or a bent homogeneous function is found.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{bent_nonlinearity, is_homogeneous, AnfVector};
use crate::encodings::{binomial, Encoding, Genotype, GpConfig, Representation};
use crate::error::{Error, Result};
use crate::fitness::{Evaluator, FitnessValue, Objective};

/// Longest fitness trace kept in a [`RunResult`].
pub const MAX_TRACE_POINTS: usize = 1000;

/// Called with every evaluated genotype, its decoded ANF and its fitness.
pub type Observer<'a> = &'a mut dyn FnMut(&Genotype, &AnfVector, FitnessValue);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitnessKind {
    Bent,
    BentK,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalSearchConfig {
    /// Share of the population (rounded up) searched besides the best individual.
    pub fraction: f64,
    /// Consecutive non-improving mutations before giving up.
    pub trials: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            fraction: 0.01,
            trials: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub population_size: usize,
    pub max_evaluations: u64,
    pub p_mut: f64,
    pub tournament_size: usize,
    pub encoding: Encoding,
    pub n: usize,
    pub d: usize,
    pub k: Option<usize>,
    pub fitness: FitnessKind,
    pub local_search: Option<LocalSearchConfig>,
    pub seed: u64,
    #[serde(default)]
    pub gp: GpConfig,
}

impl EngineConfig {
    /// Defaults: population 500, 10^6 evaluations, `p_mut = 0.5`, `fit_bent`.
    pub fn new(encoding: Encoding, n: usize, d: usize) -> Self {
        EngineConfig {
            population_size: 500,
            max_evaluations: 1_000_000,
            p_mut: 0.5,
            tournament_size: 3,
            encoding,
            n,
            d,
            k: None,
            fitness: FitnessKind::Bent,
            local_search: None,
            seed: 0,
            gp: GpConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.n > crate::boolfn::MAX_VARS {
            return fail(format!("n must be in 1..=16, got {}", self.n));
        }
        if self.d > self.n {
            return fail(format!("degree {} exceeds n = {}", self.d, self.n));
        }
        if self.tournament_size != 3 {
            return fail(format!("tournament size is fixed at 3, got {}", self.tournament_size));
        }
        if self.population_size < self.tournament_size {
            return fail(format!(
                "population size {} is smaller than the tournament",
                self.population_size
            ));
        }
        if self.max_evaluations == 0 {
            return fail("max_evaluations must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.p_mut) {
            return fail(format!("p_mut must be a probability, got {}", self.p_mut));
        }
        if self.encoding == Encoding::Wanf && self.k.is_none() {
            return fail("wANF encoding requires k".into());
        }
        if self.fitness == FitnessKind::BentK && self.k.is_none() {
            return fail("fitness bent-k requires k".into());
        }
        if let Some(k) = self.k {
            let terms = binomial(self.n, self.d);
            if k > terms {
                return fail(format!("k = {k} exceeds C({}, {}) = {terms}", self.n, self.d));
            }
        }
        if let Some(ls) = &self.local_search {
            if !(ls.fraction > 0.0 && ls.fraction <= 1.0) || ls.trials == 0 {
                return fail(format!("invalid local search settings {ls:?}"));
            }
        }
        Ok(())
    }

    fn objective(&self) -> Objective {
        match (self.fitness, self.k) {
            (FitnessKind::BentK, Some(k)) => Objective::BentK(k),
            _ => Objective::Bent,
        }
    }
}

/// A scored genotype.
#[derive(Clone, Debug)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: FitnessValue,
    /// Decodes to a bent function, homogeneous of the target degree.
    pub solved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub encoding: Encoding,
    pub n: usize,
    pub d: usize,
    pub k: Option<usize>,
    pub success: bool,
    /// Best fitness rendered with six fractional digits.
    pub best_value: String,
    pub best_fitness: FitnessRecord,
    pub best_genotype: String,
    pub best_anf: String,
    pub best_terms: usize,
    pub evaluations_used: u64,
    /// `(evaluation index, best-so-far value)` at each improvement, thinned
    /// to at most [`MAX_TRACE_POINTS`] points.
    pub fitness_trace: Vec<(u64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub value: f64,
    pub nl: Option<u32>,
    pub max_count: Option<u32>,
    pub penalty: Option<u32>,
}

impl From<FitnessValue> for FitnessRecord {
    fn from(f: FitnessValue) -> Self {
        use crate::fitness::FitnessComponents::*;
        let (nl, max_count, penalty) = match f.components() {
            Spectral { nl, max_count } => (Some(nl), Some(max_count), None),
            Penalized { penalty } => (None, None, Some(penalty)),
        };
        FitnessRecord {
            value: f.value(),
            nl,
            max_count,
            penalty,
        }
    }
}

/// Scores genotypes and tracks the budget, the best-so-far and the trace.
struct Scorer<'a, 'o> {
    rep: &'a Representation,
    evaluator: Evaluator,
    bent_nl: Option<u32>,
    evaluations: u64,
    best: Option<(Individual, AnfVector)>,
    trace: Vec<(u64, f64)>,
    observer: Option<Observer<'o>>,
}

impl Scorer<'_, '_> {
    fn score(&mut self, genotype: Genotype) -> Individual {
        let (tt, anf) = self.rep.decode(&genotype);
        let fitness = self.evaluator.evaluate(&tt, &anf);
        self.evaluations += 1;
        if let Some(obs) = self.observer.as_mut() {
            obs(&genotype, &anf, fitness);
        }
        let solved = fitness.nonlinearity().is_some()
            && fitness.nonlinearity() == self.bent_nl
            && is_homogeneous(&anf, self.rep.degree());
        let ind = Individual {
            genotype,
            fitness,
            solved,
        };
        let improved = self
            .best
            .as_ref()
            .is_none_or(|(b, _)| fitness > b.fitness);
        if improved {
            self.trace.push((self.evaluations, fitness.value()));
            self.best = Some((ind.clone(), anf));
        }
        ind
    }

    fn solved(&self) -> bool {
        self.best.as_ref().is_some_and(|(b, _)| b.solved)
    }
}

/// Hill climbing by repeated mutation: a strictly better mutant replaces the
/// current individual and resets the trial counter; `trials` consecutive
/// failures, exhausting `budget` evaluations, or reaching a solution stop it.
/// Returns the final individual and the evaluations spent.
pub fn local_search(
    individual: Individual,
    rep: &Representation,
    trials: usize,
    budget: u64,
    rng: &mut impl Rng,
    mut score: impl FnMut(Genotype) -> Individual,
) -> (Individual, u64) {
    let mut current = individual;
    let mut spent = 0;
    let mut failures = 0;
    while failures < trials && spent < budget && !current.solved {
        let mut candidate = current.genotype.clone();
        rep.mutate(&mut candidate, rng);
        let scored = score(candidate);
        spent += 1;
        if scored.fitness > current.fitness {
            current = scored;
            failures = 0;
        } else {
            failures += 1;
        }
    }
    (current, spent)
}

/// Runs one steady-state evolution. Deterministic for a given config.
pub fn run_sst(config: &EngineConfig) -> Result<RunResult> {
    run_sst_observed(config, None)
}

/// Like [`run_sst`], calling `observer` on every evaluated individual.
pub fn run_sst_observed(
    config: &EngineConfig,
    observer: Option<Observer<'_>>,
) -> Result<RunResult> {
    config.validate()?;
    let rep = Representation::new(config.encoding, config.n, config.d, config.k, config.gp.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut scorer = Scorer {
        rep: &rep,
        evaluator: Evaluator::new(config.objective()),
        bent_nl: bent_nonlinearity(config.n),
        evaluations: 0,
        best: None,
        trace: Vec::new(),
        observer,
    };

    let mut population: Vec<Individual> = (0..config.population_size)
        .map(|_| {
            let g = rep.random(&mut rng);
            scorer.score(g)
        })
        .collect();

    let mut iterations: u64 = 0;
    while !scorer.solved() && scorer.evaluations < config.max_evaluations {
        let picks = sample(&mut rng, population.len(), 3).into_vec();
        let worst_fitness = picks.iter().map(|&i| population[i].fitness).min().expect("three picks");
        let tied: Vec<usize> = picks
            .iter()
            .copied()
            .filter(|&i| population[i].fitness == worst_fitness)
            .collect();
        let worst = tied[rng.gen_range(0..tied.len())];
        let parents: Vec<usize> = picks.into_iter().filter(|&i| i != worst).collect();

        let mut child = rep.crossover(
            &population[parents[0]].genotype,
            &population[parents[1]].genotype,
            &mut rng,
        )?;
        if rng.gen_bool(config.p_mut) {
            rep.mutate(&mut child, &mut rng);
        }
        population[worst] = scorer.score(child);
        iterations += 1;

        if let Some(ls) = &config.local_search {
            if iterations.is_multiple_of(config.population_size as u64) {
                apply_local_search(&mut population, ls, config, &rep, &mut scorer, &mut rng);
            }
        }
    }

    let (best, best_anf) = scorer.best.take().expect("population is never empty");
    let mut trace = std::mem::take(&mut scorer.trace);
    thin_trace(&mut trace, MAX_TRACE_POINTS);
    Ok(RunResult {
        seed: config.seed,
        encoding: config.encoding,
        n: config.n,
        d: config.d,
        k: config.k,
        success: best.solved,
        best_value: best.fitness.to_string(),
        best_fitness: best.fitness.into(),
        best_genotype: best.genotype.serialize(),
        best_anf: best_anf.to_monomial_string(),
        best_terms: best_anf.monomial_count(),
        evaluations_used: scorer.evaluations,
        fitness_trace: trace,
    })
}

fn apply_local_search(
    population: &mut [Individual],
    ls: &LocalSearchConfig,
    config: &EngineConfig,
    rep: &Representation,
    scorer: &mut Scorer<'_, '_>,
    rng: &mut ChaCha8Rng,
) {
    // current best, earliest index on ties
    let best_index = population
        .iter()
        .enumerate()
        .fold(0, |bi, (i, ind)| if ind.fitness > population[bi].fitness { i } else { bi });
    let extra = ((ls.fraction * population.len() as f64).ceil() as usize).min(population.len());
    let mut targets = vec![best_index];
    targets.extend(sample(rng, population.len(), extra));

    for idx in targets {
        let remaining = config.max_evaluations.saturating_sub(scorer.evaluations);
        if remaining == 0 || scorer.solved() {
            return;
        }
        let start = population[idx].clone();
        let (improved, _) = local_search(start, rep, ls.trials, remaining, rng, |g| scorer.score(g));
        population[idx] = improved;
    }
}

/// Keeps at most `limit` evenly spaced points, always including the last.
fn thin_trace(trace: &mut Vec<(u64, f64)>, limit: usize) {
    let len = trace.len();
    if len <= limit || limit < 2 {
        return;
    }
    let kept: Vec<(u64, f64)> = (0..limit)
        .map(|i| trace[i * (len - 1) / (limit - 1)])
        .collect();
    *trace = kept;
}
