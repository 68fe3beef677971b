//! Genetic search over [`CnnGenome`]s.
//!
//! Each generation keeps the best quarter plus a few random survivors as
//! parents, then refills the population with mutated uniform-crossover
//! children. Fitness is `far² + frr²` on held-out tuning data at threshold 0.5;
//! lower is better.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{train, CnnGenome, CnnModel, GenomeTrait, TrainSet};
use crate::rng::{derive_seed, stream_rng, Stream};

/// Threshold used to score genomes during the search.
pub const GA_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub elite_fraction: f64,
    pub random_parents: usize,
    pub children_per_gen: usize,
    pub mutation_rate: f64,
    /// Root of the search's random streams. Not read from config files; the
    /// harness derives it from the experiment seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 10,
            elite_fraction: 0.25,
            random_parents: 3,
            children_per_gen: 12,
            mutation_rate: 0.15,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn n_elites(&self) -> usize {
        (self.population as f64 * self.elite_fraction).round() as usize
    }

    pub fn n_parents(&self) -> usize {
        self.n_elites() + self.random_parents
    }

    pub fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!("mutation_rate {} outside [0, 1]", self.mutation_rate)));
        }
        let elites = self.n_elites();
        if elites == 0 {
            return Err(Error::Config("elite_fraction leaves no elites".into()));
        }
        if self.random_parents > self.population.saturating_sub(elites) {
            return Err(Error::Config(format!(
                "{} random parents requested but only {} non-elites",
                self.random_parents,
                self.population.saturating_sub(elites)
            )));
        }
        if self.n_parents() < 2 {
            return Err(Error::Config("crossover needs at least 2 parents".into()));
        }
        if self.n_parents() + self.children_per_gen != self.population {
            return Err(Error::Config(format!(
                "{} elites + {} random parents + {} children != population {}",
                elites, self.random_parents, self.children_per_gen, self.population
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredGenome {
    pub genome: CnnGenome,
    pub far: f64,
    pub frr: f64,
    pub score: f64,
}

impl ScoredGenome {
    pub fn new(genome: CnnGenome, far: f64, frr: f64) -> Self {
        Self {
            genome,
            far,
            frr,
            score: far * far + frr * frr,
        }
    }

    /// Score assigned to genomes that cannot be built or trained.
    pub fn worst(genome: CnnGenome) -> Self {
        Self::new(genome, 1.0, 1.0)
    }
}

/// One line of the JSONL search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaLogRecord {
    pub generation: usize,
    pub index: usize,
    pub genome: CnnGenome,
    pub far: f64,
    pub frr: f64,
    pub score: f64,
    /// True for parents carried over with their earlier score.
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    pub best: ScoredGenome,
    /// Every generation's population with scores, in population order.
    pub history: Vec<Vec<ScoredGenome>>,
    /// Best score seen up to and including each generation.
    pub best_so_far: Vec<f64>,
    pub log: Vec<GaLogRecord>,
}

/// FAR and FRR of confidences at the GA threshold (accept iff `> 0.5`).
pub fn far_frr(pos_conf: &[f64], neg_conf: &[f64]) -> (f64, f64) {
    let frac = |v: &[f64], f: &dyn Fn(f64) -> bool| v.iter().filter(|&&c| f(c)).count() as f64 / v.len() as f64;
    let far = frac(neg_conf, &|c| c > GA_THRESHOLD);
    let frr = frac(pos_conf, &|c| c <= GA_THRESHOLD);
    (far, frr)
}

/// Build, train and score one genome. Genomes that are invalid for `w_s` or
/// whose training diverges get the worst score instead of an error.
pub fn evaluate_genome(genome: &CnnGenome, train_set: &TrainSet, tune: &TrainSet, w_s: usize, seed: u64) -> Result<ScoredGenome> {
    if train_set.positives.is_empty() || train_set.negatives.is_empty() {
        return Err(Error::Training("training set needs both classes".into()));
    }
    if tune.positives.is_empty() || tune.negatives.is_empty() {
        return Err(Error::Training("tuning set needs both classes".into()));
    }
    let mut model = match CnnModel::build(genome, w_s, derive_seed(seed, Stream::Init, 0, 0)) {
        Ok(m) => m,
        Err(Error::InvalidGenome(_)) => return Ok(ScoredGenome::worst(*genome)),
        Err(e) => return Err(e),
    };
    match train(&mut model, train_set, derive_seed(seed, Stream::Shuffle, 0, 0)) {
        Ok(_) => {}
        Err(Error::Training(_)) => return Ok(ScoredGenome::worst(*genome)),
        Err(e) => return Err(e),
    }
    let pos = model.predict(&tune.positives)?;
    let neg = model.predict(&tune.negatives)?;
    let (far, frr) = far_frr(&pos, &neg);
    Ok(ScoredGenome::new(*genome, far, frr))
}

/// Indices into `scored` of the next generation's parents: the lowest-score
/// elites (ties keep population order) followed by distinct uniform picks
/// from the rest.
pub fn select_parent_indices<R: Rng + ?Sized>(scored: &[ScoredGenome], cfg: &GaConfig, rng: &mut R) -> Result<Vec<usize>> {
    if scored.len() != cfg.population {
        return Err(Error::Config(format!(
            "population has {} genomes, config says {}",
            scored.len(),
            cfg.population
        )));
    }
    cfg.validate()?;
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].score.total_cmp(&scored[b].score));
    let elites = cfg.n_elites();
    let rest = &order[elites..];
    let mut parents = order[..elites].to_vec();
    parents.extend(sample(rng, rest.len(), cfg.random_parents).iter().map(|i| rest[i]));
    Ok(parents)
}

pub fn select_parents<R: Rng + ?Sized>(scored: &[ScoredGenome], cfg: &GaConfig, rng: &mut R) -> Result<Vec<CnnGenome>> {
    Ok(select_parent_indices(scored, cfg, rng)?
        .into_iter()
        .map(|i| scored[i].genome)
        .collect())
}

/// Uniform crossover: every trait from `a` or `b` with equal probability.
pub fn crossover<R: Rng + ?Sized>(a: &CnnGenome, b: &CnnGenome, rng: &mut R) -> CnnGenome {
    let mut child = *a;
    for t in GenomeTrait::ALL {
        if rng.random_bool(0.5) {
            t.copy(&mut child, b);
        }
    }
    child
}

/// Each trait is redrawn uniformly from its domain with probability `rate`.
/// A redraw may land on the current value.
pub fn mutate<R: Rng + ?Sized>(g: &CnnGenome, rate: f64, rng: &mut R) -> CnnGenome {
    let mut out = *g;
    for t in GenomeTrait::ALL {
        if rng.random_bool(rate) {
            let i = rng.random_range(0..t.domain_size());
            t.set_index(&mut out, i);
        }
    }
    out
}

/// Run the search with `evaluate(genome, generation, index)` as fitness.
/// Parents keep their score from the generation that produced it.
pub fn run_ga_with<F>(cfg: &GaConfig, mut evaluate: F) -> Result<GaRun>
where
    F: FnMut(&CnnGenome, usize, usize) -> Result<ScoredGenome>,
{
    cfg.validate()?;
    let mut log = Vec::with_capacity(cfg.population * cfg.generations);
    let mut history: Vec<Vec<ScoredGenome>> = Vec::with_capacity(cfg.generations);
    let mut best: Option<ScoredGenome> = None;
    let mut best_so_far = Vec::with_capacity(cfg.generations);

    for generation in 0..cfg.generations {
        let mut rng = stream_rng(cfg.seed, Stream::Ga, generation as u64, 0);
        let (carried, fresh): (Vec<ScoredGenome>, Vec<CnnGenome>) = match history.last() {
            None => (vec![], (0..cfg.population).map(|_| CnnGenome::random(&mut rng)).collect()),
            Some(prev) => {
                let parents: Vec<ScoredGenome> = select_parent_indices(prev, cfg, &mut rng)?
                    .into_iter()
                    .map(|i| prev[i])
                    .collect();
                let children = (0..cfg.children_per_gen)
                    .map(|_| {
                        let pair = sample(&mut rng, parents.len(), 2);
                        let child = crossover(&parents[pair.index(0)].genome, &parents[pair.index(1)].genome, &mut rng);
                        mutate(&child, cfg.mutation_rate, &mut rng)
                    })
                    .collect();
                (parents, children)
            }
        };

        let mut population = Vec::with_capacity(cfg.population);
        for s in carried {
            log.push(record(generation, population.len(), &s, true));
            population.push(s);
        }
        for g in fresh {
            let index = population.len();
            let s = evaluate(&g, generation, index)?;
            log.push(record(generation, index, &s, false));
            population.push(s);
        }
        for s in &population {
            if best.is_none_or(|b| s.score < b.score) {
                best = Some(*s);
            }
        }
        best_so_far.push(best.map_or(f64::INFINITY, |b| b.score));
        history.push(population);
    }
    Ok(GaRun {
        best: best.expect("at least one generation"),
        history,
        best_so_far,
        log,
    })
}

/// Full search where each genome is trained on `train_set` and scored on
/// `tune`. Genome `(generation, index)` uses its own derived seed.
pub fn run_ga(cfg: &GaConfig, train_set: &TrainSet, tune: &TrainSet, w_s: usize) -> Result<GaRun> {
    run_ga_with(cfg, |g, generation, index| {
        let seed = derive_seed(cfg.seed, Stream::GaEval, generation as u64, index as u64);
        evaluate_genome(g, train_set, tune, w_s, seed)
    })
}

fn record(generation: usize, index: usize, s: &ScoredGenome, cached: bool) -> GaLogRecord {
    GaLogRecord {
        generation,
        index,
        genome: s.genome,
        far: s.far,
        frr: s.frr,
        score: s.score,
        cached,
    }
}
