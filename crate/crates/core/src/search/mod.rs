//! Population search over the flip graph.
//!
//! A run keeps `population_size` schemes. Each cycle runs the walk phase
//! (and, in exploratory mode, the resize phase) on every slot against a
//! read-only snapshot of the registry, then merges the slots' discoveries
//! into the registry at a barrier. Every slot draws from its own random
//! stream keyed by `(seed, slot, cycle)`, so results do not depend on the
//! number of worker threads.

mod registry;
mod resize;
mod walk;

use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scheme::{Format, Scheme};

pub use registry::{BestRegistry, RegistryEntry};
pub use resize::{resize, ResizeAction, ResizeReport};
pub use walk::{minimize_additions, random_walk, try_flip, WalkOutcome, WalkStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Walk only, on the formats of the initial schemes.
    Focused,
    /// Walk and resize, spreading over many formats.
    Exploratory,
    /// Flip-only walks that minimize additive complexity at fixed rank.
    ComplexityMin,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "focused" => Ok(Mode::Focused),
            "exploratory" => Ok(Mode::Exploratory),
            "complexity" | "complexity_min" | "complexity-min" => Ok(Mode::ComplexityMin),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub population_size: usize,
    /// Walk steps per slot and cycle.
    pub max_iterations: usize,
    pub p_reduce: f64,
    pub p_expand: f64,
    pub p_resize: f64,
    pub expand_rank_slack: usize,
    pub equal_rank_accept: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Stop after this many walk/resize cycles.
    pub max_cycles: Option<usize>,
    /// Stop once this much wall-clock time has passed (checked at barriers).
    pub time_budget: Option<Duration>,
    /// Stop once every initial format has a registry entry of at most this rank.
    pub target_rank: Option<usize>,
    /// Worker threads; `1` runs the population sequentially.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            population_size: 256,
            max_iterations: 10_000,
            p_reduce: 0.5,
            p_expand: 0.01,
            p_resize: 0.2,
            expand_rank_slack: 2,
            equal_rank_accept: 0.01,
            seed: 0,
            mode: Mode::Focused,
            max_cycles: Some(10),
            time_budget: None,
            target_rank: None,
            threads: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_reduce", self.p_reduce),
            ("p_expand", self.p_expand),
            ("p_resize", self.p_resize),
            ("equal_rank_accept", self.equal_rank_accept),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parse(format!("{name} = {p} is not a probability")));
            }
        }
        if self.population_size == 0 {
            return Err(Error::EmptyPopulation);
        }
        Ok(())
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Random stream for one slot in one cycle.
pub fn slot_rng(seed: u64, slot: usize, cycle: usize) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ slot as u64) ^ cycle as u64);
    ChaCha8Rng::seed_from_u64(key)
}

/// Applies `steps` random accepted moves (mostly flips, some expansions,
/// periodic reductions) to produce a different correct scheme of the same
/// format.
pub fn scramble<R: Rng + ?Sized>(s: &Scheme, steps: usize, rng: &mut R) -> Scheme {
    let mut out = s.normalized();
    let mut buf = Vec::new();
    for step in 0..steps {
        if rng.random::<f64>() < 0.1 || !try_flip(&mut out, rng, &mut buf) {
            let _ = out.expand(rng);
        }
        if step % 16 == 15 {
            out.reduce();
        }
    }
    out
}

/// Summary emitted at each synchronization barrier.
#[derive(Debug, Clone)]
pub struct SyncReport {
    pub cycle: usize,
    pub elapsed: Duration,
    /// `(format, rank, complexity)` for every registry entry.
    pub best: Vec<(Format, usize, i64)>,
    /// Formats whose entry changed at this barrier.
    pub updated: Vec<Format>,
    pub stats: WalkStats,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub registry: BestRegistry,
    pub cycles: usize,
    pub stats: WalkStats,
}

struct Slot {
    scheme: Scheme,
    outcome: WalkOutcome,
}

fn run_phase(
    slot: &mut Slot,
    index: usize,
    cycle: usize,
    snapshot: &BestRegistry,
    cfg: &SearchConfig,
) {
    let mut rng = slot_rng(cfg.seed, index, cycle);
    let best_rank = snapshot
        .best_rank(slot.scheme.format())
        .unwrap_or(slot.scheme.rank());
    slot.outcome = match cfg.mode {
        Mode::ComplexityMin => {
            let best = minimize_additions(&slot.scheme, cfg, &mut rng);
            slot.scheme = best.clone();
            WalkOutcome {
                improvements: vec![best],
                stats: WalkStats::default(),
            }
        }
        Mode::Focused | Mode::Exploratory => {
            random_walk(&mut slot.scheme, best_rank, cfg, &mut rng)
        }
    };
    if cfg.mode == Mode::Exploratory {
        resize(&mut slot.scheme, snapshot, cfg, &mut rng);
    }
}

/// Runs the population search.
///
/// `registry` seeds the per-format bests (e.g. loaded from disk); the
/// returned registry starts from it.
/// `on_sync` runs after every barrier and may persist the registry; an
/// error from it aborts the run.
pub fn run_search(
    cfg: &SearchConfig,
    initial: &[Scheme],
    registry: BestRegistry,
    mut on_sync: impl FnMut(&SyncReport, &BestRegistry) -> Result<()>,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let start = Instant::now();
    let mut registry = registry;
    for s in initial {
        registry.offer(s);
    }
    let targets: Vec<Format> = {
        let mut f: Vec<Format> = initial.iter().map(Scheme::format).collect();
        f.sort();
        f.dedup();
        f
    };
    let mut slots: Vec<Slot> = (0..cfg.population_size)
        .map(|k| Slot {
            scheme: initial[k % initial.len()].normalized(),
            outcome: WalkOutcome::default(),
        })
        .collect();

    let pool = if cfg.threads == 1 {
        None
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if cfg.threads > 1 {
            builder = builder.num_threads(cfg.threads);
        }
        Some(
            builder
                .build()
                .map_err(|e| Error::Parse(format!("thread pool: {e}")))?,
        )
    };

    let mut total = WalkStats::default();
    let mut cycle = 0;
    loop {
        if cfg.max_cycles.is_some_and(|c| cycle >= c) {
            break;
        }
        let snapshot = registry.clone();
        match &pool {
            None => {
                for (k, slot) in slots.iter_mut().enumerate() {
                    run_phase(slot, k, cycle, &snapshot, cfg);
                }
            }
            Some(pool) => pool.install(|| {
                slots
                    .par_iter_mut()
                    .enumerate()
                    .for_each(|(k, slot)| run_phase(slot, k, cycle, &snapshot, cfg));
            }),
        }

        // barrier: merge discoveries in slot order
        let mut stats = WalkStats::default();
        let mut updated = Vec::new();
        for slot in &mut slots {
            stats.absorb(&slot.outcome.stats);
            let outcome = std::mem::take(&mut slot.outcome);
            for s in outcome
                .best()
                .into_iter()
                .chain(std::iter::once(&slot.scheme))
            {
                if registry.offer(s) {
                    updated.push(s.format());
                }
            }
        }
        updated.sort();
        updated.dedup();
        total.absorb(&stats);
        cycle += 1;

        let report = SyncReport {
            cycle,
            elapsed: start.elapsed(),
            best: registry
                .iter()
                .map(|(f, e)| (*f, e.rank, e.complexity))
                .collect(),
            updated,
            stats,
        };
        on_sync(&report, &registry)?;

        if cfg.time_budget.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
        if let Some(target) = cfg.target_rank {
            if targets
                .iter()
                .all(|f| registry.best_rank(*f).is_some_and(|r| r <= target))
            {
                break;
            }
        }
    }
    Ok(SearchOutcome {
        registry,
        cycles: cycle,
        stats: total,
    })
}
