//! Bound-constrained differential evolution (DE/rand/1/bin) over real
//! vectors with a pluggable objective.
//!
//! All stochastic draws come from one seeded generator in a fixed order, so
//! a run is replayable bit-exactly from its seed:
//!
//! 1. initialization: member 0 dims 0..D, member 1 dims 0..D, ...
//! 2. per generation, per member i: the donor indices (rejection-sampled
//!    until distinct), then `j_rand`, then one uniform draw per dimension.
//!
//! Selection is greedy with ties favoring the trial vector; every slot is
//! therefore non-worsening and the best-so-far history is monotone
//! non-increasing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Donor selection strategy for the mutation vector.
///
/// `Rand1` is v = x_r1 + F (x_r2 - x_r3); `Best1` replaces the random base
/// with the current best vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    Rand1,
    Best1,
}

/// DE control parameters. Defaults are Np=60, F=0.7, Cr=0.8, MaxGs=1500.
#[derive(Debug, Clone)]
pub struct DeConfig {
    /// Population size, at least 4 (mutation needs three distinct donors).
    pub np: usize,
    /// Scaling factor in [0, 1].
    pub f: f64,
    /// Crossover probability in [0, 1].
    pub cr: f64,
    /// Number of evolution generations to run after seeding.
    pub max_gs: usize,
    /// Per-dimension (low, high) box bounds.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
    pub mutation: Mutation,
}

impl DeConfig {
    pub fn with_bounds(bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        DeConfig {
            np: 60,
            f: 0.7,
            cr: 0.8,
            max_gs: 1500,
            bounds,
            seed,
            mutation: Mutation::Rand1,
        }
    }

    /// Uniform bounds `(lo, hi)` in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64, seed: u64) -> Self {
        Self::with_bounds(vec![(lo, hi); dim], seed)
    }

    /// The unit hypercube, the genome space of the clustering encoding.
    pub fn unit_box(dim: usize, seed: u64) -> Self {
        Self::uniform(dim, 0.0, 1.0, seed)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.np < 4 {
            return Err(Error::InvalidConfig(format!(
                "np = {} but mutation needs 3 donors distinct from the target",
                self.np
            )));
        }
        if !(0.0..=1.0).contains(&self.f) {
            return Err(Error::InvalidConfig(format!("f = {} not in [0, 1]", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidConfig(format!("cr = {} not in [0, 1]", self.cr)));
        }
        if self.max_gs < 1 {
            return Err(Error::InvalidConfig("max_gs must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if self.bounds.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "{} bounds for dimension {dim}",
                self.bounds.len()
            )));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "bad bound interval ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Partial DE settings as read from a JSON config file; unset keys keep
/// their defaults. Keys: np, f, cr, max_gs, seed, mutation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeTuning {
    pub np: Option<usize>,
    pub f: Option<f64>,
    pub cr: Option<f64>,
    pub max_gs: Option<usize>,
    pub seed: Option<u64>,
    pub mutation: Option<Mutation>,
}

impl DeTuning {
    pub fn apply(&self, cfg: &mut DeConfig) {
        if let Some(np) = self.np {
            cfg.np = np;
        }
        if let Some(f) = self.f {
            cfg.f = f;
        }
        if let Some(cr) = self.cr {
            cfg.cr = cr;
        }
        if let Some(max_gs) = self.max_gs {
            cfg.max_gs = max_gs;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mutation) = self.mutation {
            cfg.mutation = mutation;
        }
    }
}

/// Population, objective values, generation counter, and best-so-far.
#[derive(Debug, Clone)]
pub struct DeState {
    cfg: DeConfig,
    dim: usize,
    population: Vec<Vec<f64>>,
    values: Vec<f64>,
    generation: usize,
    best: Vec<f64>,
    best_value: f64,
    rng: ChaCha8Rng,
}

/// Seed a population uniformly inside the bounds and evaluate it.
pub fn initialize<F>(cfg: &DeConfig, dim: usize, objective: &F) -> Result<DeState>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let population: Vec<Vec<f64>> = (0..cfg.np)
        .map(|_| {
            cfg.bounds
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect()
        })
        .collect();
    DeState::evaluated(cfg.clone(), dim, population, rng, objective)
}

/// Build a state around a handcrafted population (warm starts, tests).
pub fn from_population<F>(cfg: &DeConfig, population: Vec<Vec<f64>>, objective: &F) -> Result<DeState>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = population.first().map_or(0, Vec::len);
    cfg.validate(dim)?;
    if population.len() != cfg.np {
        return Err(Error::InvalidConfig(format!(
            "population has {} members, config says np = {}",
            population.len(),
            cfg.np
        )));
    }
    for member in &population {
        if member.len() != dim {
            return Err(Error::InvalidConfig("ragged population".into()));
        }
        for (x, &(lo, hi)) in member.iter().zip(&cfg.bounds) {
            if !(lo..=hi).contains(x) {
                return Err(Error::InvalidConfig(format!("member value {x} outside bounds")));
            }
        }
    }
    let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    DeState::evaluated(cfg.clone(), dim, population, rng, objective)
}

impl DeState {
    fn evaluated<F>(
        cfg: DeConfig,
        dim: usize,
        population: Vec<Vec<f64>>,
        rng: ChaCha8Rng,
        objective: &F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = evaluate_all(&population, objective)?;
        let (best_idx, &best_value) = argmin(&values);
        Ok(DeState {
            best: population[best_idx].clone(),
            best_value,
            cfg,
            dim,
            population,
            values,
            generation: 1,
            rng,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn population(&self) -> &[Vec<f64>] {
        &self.population
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn best(&self) -> (&[f64], f64) {
        (&self.best, self.best_value)
    }

    /// Draw donors for slot `i` and form the clamped mutation vector.
    pub fn mutate(&mut self, i: usize, f: f64) -> Vec<f64> {
        let (base, r2, r3) = match self.cfg.mutation {
            Mutation::Rand1 => {
                let r1 = self.draw_index(&[i]);
                let r2 = self.draw_index(&[i, r1]);
                let r3 = self.draw_index(&[i, r1, r2]);
                (self.population[r1].as_slice(), r2, r3)
            }
            Mutation::Best1 => {
                let r2 = self.draw_index(&[i]);
                let r3 = self.draw_index(&[i, r2]);
                (self.best.as_slice(), r2, r3)
            }
        };
        mutant_vector(
            base,
            &self.population[r2],
            &self.population[r3],
            f,
            &self.cfg.bounds,
        )
    }

    fn draw_index(&mut self, exclude: &[usize]) -> usize {
        loop {
            let idx = self.rng.gen_range(0..self.cfg.np);
            if !exclude.contains(&idx) {
                return idx;
            }
        }
    }

    /// One full generation: build all trial vectors, evaluate them, apply
    /// greedy selection (trial survives on ties), and advance the counter.
    pub fn step<F>(&mut self, objective: &F) -> Result<()>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let f = self.cfg.f;
        let cr = self.cfg.cr;
        let trials: Vec<Vec<f64>> = (0..self.cfg.np)
            .map(|i| {
                let mutant = self.mutate(i, f);
                crossover(&self.population[i], &mutant, cr, &mut self.rng)
            })
            .collect();
        let trial_values = evaluate_all(&trials, objective)?;
        for (i, (trial, value)) in trials.into_iter().zip(trial_values).enumerate() {
            if value <= self.values[i] {
                self.population[i] = trial;
                self.values[i] = value;
                if value < self.best_value {
                    self.best_value = value;
                    self.best = self.population[i].clone();
                }
            }
        }
        self.generation += 1;
        Ok(())
    }
}

/// v = base + f (b - c), clamped per-dimension into the bounds.
pub fn mutant_vector(
    base: &[f64],
    b: &[f64],
    c: &[f64],
    f: f64,
    bounds: &[(f64, f64)],
) -> Vec<f64> {
    base.iter()
        .zip(b)
        .zip(c)
        .zip(bounds)
        .map(|(((&x, &y), &z), &(lo, hi))| (x + f * (y - z)).clamp(lo, hi))
        .collect()
}

/// Binomial crossover: u_j = mutant_j when rand_j <= cr or j = j_rand,
/// else target_j.
///
/// `j_rand` is drawn first, then one uniform per dimension (always consumed,
/// keeping the stream length fixed at dim + 1 draws).
pub fn crossover(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let dim = target.len();
    let j_rand = rng.gen_range(0..dim);
    (0..dim)
        .map(|j| {
            let r: f64 = rng.gen();
            if r <= cr || j == j_rand {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect()
}

fn evaluate_all<F>(members: &[Vec<f64>], objective: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = members.par_iter().map(|m| objective(m)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ObjectiveNonFinite);
    }
    Ok(values)
}

fn argmin(values: &[f64]) -> (usize, &f64) {
    values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite values"))
        .expect("nonempty population")
}

/// Outcome of a full run: the best vector, its value, and the per-generation
/// best-so-far trace (length `max_gs`).
#[derive(Debug, Clone)]
pub struct DeRun {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub history: Vec<f64>,
}

/// Seed, then run exactly `max_gs` generations. Deterministic for a fixed
/// seed.
pub fn run<F>(cfg: &DeConfig, dim: usize, objective: &F) -> Result<DeRun>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut state = initialize(cfg, dim, objective)?;
    let mut history = Vec::with_capacity(cfg.max_gs);
    for _ in 0..cfg.max_gs {
        state.step(objective)?;
        history.push(state.best_value);
    }
    Ok(DeRun {
        best: state.best,
        best_value: state.best_value,
        history,
    })
}
