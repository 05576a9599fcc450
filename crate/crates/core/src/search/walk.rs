//! The random-walk kernel and the flip-only complexity minimizer.

use rand::Rng;

use super::SearchConfig;
use crate::local_ops::FlipCandidate;
use crate::scheme::Scheme;

/// Counters collected while walking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub steps: u64,
    pub flips: u64,
    /// try_flip failures: no candidate applies.
    pub flip_failures: u64,
    /// Expands triggered by a failed flip.
    pub fallback_expands: u64,
    /// Expands triggered by the `p_expand` draw.
    pub gated_expands: u64,
    /// `p_expand` draws that were blocked by the rank gate.
    pub gate_blocks: u64,
    /// Largest `rank − best_rank` seen at a gated expand.
    pub gated_expand_max_excess: i64,
    pub reductions: u64,
    pub improvements: u64,
}

impl WalkStats {
    pub fn absorb(&mut self, other: &WalkStats) {
        self.steps += other.steps;
        self.flips += other.flips;
        self.flip_failures += other.flip_failures;
        self.fallback_expands += other.fallback_expands;
        self.gated_expands += other.gated_expands;
        self.gate_blocks += other.gate_blocks;
        self.gated_expand_max_excess = self
            .gated_expand_max_excess
            .max(other.gated_expand_max_excess);
        self.reductions += other.reductions;
        self.improvements += other.improvements;
    }
}

#[derive(Debug, Clone, Default)]
pub struct WalkOutcome {
    /// Each scheme adopted as the walker's best, in discovery order.
    pub improvements: Vec<Scheme>,
    pub stats: WalkStats,
}

impl WalkOutcome {
    pub fn best(&self) -> Option<&Scheme> {
        self.improvements.last()
    }
}

/// Draws a uniform flip candidate with random pair order and side.
fn pick_flip<R: Rng + ?Sized>(
    scheme: &Scheme,
    rng: &mut R,
    buf: &mut Vec<FlipCandidate>,
) -> Option<(FlipCandidate, bool)> {
    scheme.flip_candidates_into(buf);
    if buf.is_empty() {
        return None;
    }
    let mut c = buf[rng.random_range(0..buf.len())];
    if rng.random_bool(0.5) {
        c = c.reversed();
    }
    Some((c, rng.random_bool(0.5)))
}

/// Draws candidates without replacement, each with a random pair order and
/// side order, until one applies without overflow.
fn draw_flip<R: Rng + ?Sized>(
    scheme: &mut Scheme,
    rng: &mut R,
    buf: &mut Vec<FlipCandidate>,
) -> Option<FlipCandidate> {
    scheme.flip_candidates_into(buf);
    while !buf.is_empty() {
        let mut c = buf.swap_remove(rng.random_range(0..buf.len()));
        if rng.random_bool(0.5) {
            c = c.reversed();
        }
        let side = rng.random_bool(0.5);
        if scheme.flip(c, side).is_ok() || scheme.flip(c, !side).is_ok() {
            return Some(c);
        }
    }
    None
}

/// One flip followed by reduction checks on the two touched terms. Fails
/// only when every candidate overflows on both sides.
pub fn try_flip<R: Rng + ?Sized>(
    scheme: &mut Scheme,
    rng: &mut R,
    buf: &mut Vec<FlipCandidate>,
) -> bool {
    match draw_flip(scheme, rng, buf) {
        Some(c) => {
            scheme.reduce_around(&[c.i, c.j]);
            true
        }
        None => false,
    }
}

/// Runs `cfg.max_iterations` steps of the walk from `scheme` (mutated in
/// place). `best_rank` is the reference rank for the scheme's format.
pub fn random_walk<R: Rng + ?Sized>(
    scheme: &mut Scheme,
    mut best_rank: usize,
    cfg: &SearchConfig,
    rng: &mut R,
) -> WalkOutcome {
    let mut out = WalkOutcome::default();
    let stats = &mut out.stats;
    let mut buf = Vec::new();
    for _ in 0..cfg.max_iterations {
        stats.steps += 1;
        if !try_flip(scheme, rng, &mut buf) {
            stats.flip_failures += 1;
            stats.fallback_expands += 1;
            let _ = scheme.expand(rng);
            continue;
        }
        stats.flips += 1;

        let rank = scheme.rank();
        if rank < best_rank || (rank == best_rank && rng.random::<f64>() < cfg.equal_rank_accept) {
            best_rank = rank;
            out.improvements.push(scheme.clone());
            stats.improvements += 1;
        }

        if rng.random::<f64>() < cfg.p_reduce && scheme.reduce() > 0 {
            stats.reductions += 1;
        }

        if rng.random::<f64>() < cfg.p_expand {
            if scheme.rank() <= best_rank + cfg.expand_rank_slack {
                let excess = scheme.rank() as i64 - best_rank as i64;
                stats.gated_expand_max_excess = stats.gated_expand_max_excess.max(excess);
                stats.gated_expands += 1;
                let _ = scheme.expand(rng);
            } else {
                stats.gate_blocks += 1;
            }
        }
    }
    out
}

/// Random flips at constant rank, keeping the scheme with the lowest
/// additive complexity seen. Flips that would zero out a factor are undone
/// so the rank never drops.
pub fn minimize_additions<R: Rng + ?Sized>(s: &Scheme, cfg: &SearchConfig, rng: &mut R) -> Scheme {
    let mut current = s.normalized();
    let mut best = current.clone();
    let mut best_complexity = best.additive_complexity();
    let mut buf = Vec::new();
    for _ in 0..cfg.max_iterations {
        let Some((c, side)) = pick_flip(&current, rng, &mut buf) else {
            break;
        };
        let saved = (current.terms()[c.i], current.terms()[c.j]);
        if current.flip(c, side).is_err() {
            continue;
        }
        let terms = current.terms_mut();
        if terms[c.i].has_zero_factor() || terms[c.j].has_zero_factor() {
            terms[c.i] = saved.0;
            terms[c.j] = saved.1;
            continue;
        }
        let complexity = current.additive_complexity();
        if complexity < best_complexity {
            best_complexity = complexity;
            best = current.clone();
        }
    }
    best
}
