//! Seeded random set-partitioning instances with a planted exact cover.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{build_hamiltonian, ground_states};
use super::instance::ProblemInstance;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorStyle {
    /// Flights are time-ordered; decoy routes splice the head of one planted
    /// aircraft route onto the tail of another.
    TailAssignment,
    /// Decoy routes are uniform random flight subsets of bounded size.
    RandomSubsets { min_size: usize, max_size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub num_flights: usize,
    pub num_routes: usize,
    /// Routes in the planted cover.
    pub planted_routes: usize,
    pub style: GeneratorStyle,
    /// Draw integer costs uniformly from `1..=cost_max`; `0` leaves costs empty.
    pub cost_max: u32,
    /// Redraw until the exact cover is unique.
    pub unique: bool,
    pub seed: u64,
}

impl GeneratorConfig {
    /// 30 flights served by 3 planted aircraft routes.
    pub fn tail_assignment(num_routes: usize, seed: u64) -> Self {
        Self {
            num_flights: 30,
            num_routes,
            planted_routes: 3,
            style: GeneratorStyle::TailAssignment,
            cost_max: 0,
            unique: false,
            seed,
        }
    }

    /// One flight per route, decoys of one or two flights.
    pub fn sparse(num_routes: usize, seed: u64) -> Self {
        Self {
            num_flights: num_routes,
            num_routes,
            planted_routes: (num_routes / 2).max(1),
            style: GeneratorStyle::RandomSubsets { min_size: 1, max_size: 2 },
            cost_max: 0,
            unique: false,
            seed,
        }
    }
}

const MAX_ATTEMPTS: usize = 1_000;
const MAX_DRAWS: usize = 100_000;

fn random_partition(rng: &mut ChaCha8Rng, items: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..items).collect();
    order.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = order[..parts].iter().map(|&f| vec![f]).collect();
    for &f in &order[parts..] {
        let b = rng.random_range(0..parts);
        blocks[b].push(f);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks
}

fn decoy(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, planted: &[Vec<usize>]) -> Vec<usize> {
    let mut r: Vec<usize> = match cfg.style {
        GeneratorStyle::TailAssignment => {
            let a = rng.random_range(0..planted.len());
            let b = (a + rng.random_range(1..planted.len().max(2))) % planted.len();
            let cut = rng.random_range(0..cfg.num_flights);
            planted[a].iter().filter(|&&f| f < cut).chain(planted[b].iter().filter(|&&f| f >= cut)).copied().collect()
        }
        GeneratorStyle::RandomSubsets { min_size, max_size } => {
            let size = rng.random_range(min_size..=max_size);
            rand::seq::index::sample(rng, cfg.num_flights, size).into_vec()
        }
    };
    r.sort_unstable();
    r
}

/// One instance from `cfg`; deterministic in `cfg.seed`.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<ProblemInstance> {
    let (f, n, p) = (cfg.num_flights, cfg.num_routes, cfg.planted_routes);
    let bad_style = match cfg.style {
        GeneratorStyle::TailAssignment => p < 2,
        GeneratorStyle::RandomSubsets { min_size, max_size } => min_size == 0 || min_size > max_size || max_size > f,
    };
    if p == 0 || p > f || p > n || bad_style {
        return Err(Error::Config(format!("inconsistent generator configuration {cfg:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..MAX_ATTEMPTS {
        let planted = random_partition(&mut rng, f, p);
        let mut routes = planted.clone();
        let mut draws = 0;
        while routes.len() < n && draws < MAX_DRAWS {
            draws += 1;
            let r = decoy(&mut rng, cfg, &planted);
            if !r.is_empty() && !routes.contains(&r) {
                routes.push(r);
            }
        }
        if routes.len() < n {
            continue;
        }
        routes.shuffle(&mut rng);
        let mut coverage = vec![Vec::new(); f];
        for (ri, r) in routes.iter().enumerate() {
            for &fl in r {
                coverage[fl].push(ri);
            }
        }
        let costs = (cfg.cost_max > 0).then(|| (0..n).map(|_| rng.random_range(1..=cfg.cost_max) as f64).collect());
        let inst = ProblemInstance::new(n, coverage, costs, None)?;
        if cfg.unique {
            let exact = ProblemInstance::new(n, inst.coverage().to_vec(), None, None)?;
            if ground_states(&build_hamiltonian(&exact))?.ground_states.len() != 1 {
                continue;
            }
        }
        return Ok(inst);
    }
    Err(Error::Config("no instance satisfied the generator constraints".into()))
}
