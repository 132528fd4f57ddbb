//! Seeded generators for the formula distributions.
//!
//! Every sampler draws from an explicit [`RngStream`]. A stream is a ChaCha8
//! generator keyed by `seed` and positioned on ChaCha stream `stream_id`, so parallel
//! trials get independent sequences by using their trial index as stream id.
//!
//! Consistent clauses are drawn by rejection inside the full universe: pick a
//! uniform variable set and a uniform polarity pattern, and redraw the pattern while
//! it is falsified by a required assignment.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{clause_universe_size, hamming, Assignment, Clause, Formula, PlantedInstance, UniverseMode};
use crate::enumerate::Enumerator;
use crate::{Error, Result};

pub const DEFAULT_MAX_TRIES: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Draw clauses independently (`true`) or as a uniform set of distinct clauses.
    pub with_repetition: bool,
}

impl SamplerConfig {
    pub fn new(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k, with_repetition: true }
    }

    /// `m = round(c * n)`.
    pub fn from_density(n: usize, k: usize, c: f64) -> Self {
        Self::new(n, (c * n as f64).round() as usize, k)
    }

    pub fn distinct(self) -> Self {
        Self { with_repetition: false, ..self }
    }

    pub fn density(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n || self.k >= 64 {
            return Err(Error::WidthExceedsVariables { k: self.k, n: self.n });
        }
        Ok(())
    }

    fn check_distinct_room(&self, mode: UniverseMode) -> Result<()> {
        if self.with_repetition {
            return Ok(());
        }
        let size = clause_universe_size(self.n, self.k, mode)?;
        if size.to_usize().is_some_and(|s| s < self.m) {
            return Err(Error::UniverseTooSmall { requested: self.m, available: size.to_string() });
        }
        Ok(())
    }
}

fn random_vars<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut vars = index::sample(rng, n, k).into_vec();
    vars.sort_unstable();
    vars
}

/// Polarity pattern that makes every literal over `vars` false under `a`.
fn falsifying_pattern(vars: &[usize], a: &Assignment) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (j, &v)| acc | (u64::from(!a.get(v)) << j))
}

/// One clause uniform over those satisfied by every assignment in `respect`.
fn draw_clause<R: Rng + ?Sized>(n: usize, k: usize, respect: &[&Assignment], rng: &mut R) -> Clause {
    // variable set and pattern are redrawn together: sets touching a disagreement
    // between two respected assignments have fewer admissible patterns
    loop {
        let vars = random_vars(n, k, rng);
        let pattern = rng.random_range(0..1u64 << k);
        if respect.iter().all(|a| falsifying_pattern(&vars, a) != pattern) {
            return Clause::from_parts(&vars, pattern).expect("distinct sorted variables");
        }
    }
}

fn draw_formula<R: Rng + ?Sized>(cfg: &SamplerConfig, respect: &[&Assignment], rng: &mut R) -> Formula {
    let mut clauses = Vec::with_capacity(cfg.m);
    if cfg.with_repetition {
        for _ in 0..cfg.m {
            clauses.push(draw_clause(cfg.n, cfg.k, respect, rng));
        }
    } else {
        let mut seen = HashSet::with_capacity(cfg.m);
        while clauses.len() < cfg.m {
            let c = draw_clause(cfg.n, cfg.k, respect, rng);
            if seen.insert(c.clone()) {
                clauses.push(c);
            }
        }
    }
    Formula::new(cfg.n, cfg.k, clauses).expect("sampled clauses fit the configuration")
}

/// Uniform k-CNF formula with `m` clauses.
pub fn sample_uniform_formula(cfg: &SamplerConfig, rng: &mut RngStream) -> Result<Formula> {
    cfg.validate()?;
    cfg.check_distinct_room(UniverseMode::All)?;
    Ok(draw_formula(cfg, &[], rng))
}

pub fn sample_assignment(n: usize, rng: &mut RngStream) -> Assignment {
    let bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    Assignment::from_bools(&bits)
}

/// Planted distribution: a uniform assignment, then clauses uniform among those it satisfies.
pub fn sample_planted(cfg: &SamplerConfig, rng: &mut RngStream) -> Result<PlantedInstance> {
    cfg.validate()?;
    cfg.check_distinct_room(UniverseMode::ConsistentOne)?;
    let planted = sample_assignment(cfg.n, rng);
    let formula = draw_formula(cfg, &[&planted], rng);
    PlantedInstance::new(formula, planted)
}

/// Planted instance with a caller-chosen assignment.
pub fn sample_planted_with(cfg: &SamplerConfig, planted: &Assignment, rng: &mut RngStream) -> Result<PlantedInstance> {
    cfg.validate()?;
    if planted.n() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, found: planted.n() });
    }
    cfg.check_distinct_room(UniverseMode::ConsistentOne)?;
    let formula = draw_formula(cfg, &[planted], rng);
    PlantedInstance::new(formula, planted.clone())
}

/// Clauses uniform among those satisfied by both `phi` and `psi`.
pub fn sample_doubly_planted(
    cfg: &SamplerConfig,
    phi: &Assignment,
    psi: &Assignment,
    rng: &mut RngStream,
) -> Result<Formula> {
    cfg.validate()?;
    for a in [phi, psi] {
        if a.n() != cfg.n {
            return Err(Error::DimensionMismatch { expected: cfg.n, found: a.n() });
        }
    }
    let d = hamming(phi, psi)?;
    let mode = UniverseMode::ConsistentTwo(d);
    if clause_universe_size(cfg.n, cfg.k, mode)?.to_usize() == Some(0) && cfg.m > 0 {
        return Err(Error::UniverseTooSmall { requested: cfg.m, available: "0".into() });
    }
    cfg.check_distinct_room(mode)?;
    if phi == psi {
        return Ok(draw_formula(cfg, &[phi], rng));
    }
    Ok(draw_formula(cfg, &[phi, psi], rng))
}

/// A uniform formula conditioned on satisfiability, with the number of draws used.
pub fn sample_uniform_satisfiable(
    cfg: &SamplerConfig,
    rng: &mut RngStream,
    max_tries: u64,
) -> Result<(Formula, u64)> {
    sample_uniform_satisfiable_with(cfg, rng, max_tries, &Enumerator::default())
}

pub fn sample_uniform_satisfiable_with(
    cfg: &SamplerConfig,
    rng: &mut RngStream,
    max_tries: u64,
    enumerator: &Enumerator,
) -> Result<(Formula, u64)> {
    cfg.validate()?;
    if cfg.n > enumerator.max_vars {
        return Err(Error::EnumerationBound { n: cfg.n, bound: enumerator.max_vars });
    }
    for tries in 1..=max_tries {
        let f = sample_uniform_formula(cfg, rng)?;
        if enumerator.is_satisfiable(&f)? {
            return Ok((f, tries));
        }
    }
    Err(Error::Exhausted(max_tries))
}
