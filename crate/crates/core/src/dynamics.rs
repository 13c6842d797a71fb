//! Improvement dynamics with full traces.
//!
//! Best-response dynamics moves one improving vertex at a time to its
//! smallest improving color. Coalition dynamics applies, at each step, the
//! first strong deviation of at most `q` players in the equilibrium
//! module's scan order. Every visited state is recorded with a 64-bit
//! FNV-1a digest of its color vector; exact repeats stop the run, while
//! repeats up to a relabeling of colors are flagged separately.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{find_strong_deviation, Pruning};
use crate::error::{DynamicsError, EquilibriumError};
use crate::game::{self, Color, Coloring};
use crate::graph::{Graph, VertexSet};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the color bytes, one byte per vertex.
pub fn state_digest(colors: &[Color]) -> u64 {
    colors.iter().fold(FNV_OFFSET, |h, &c| (h ^ c as u64).wrapping_mul(FNV_PRIME))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "seed", rename_all = "snake_case")]
pub enum Schedule {
    /// Vertices are scanned cyclically, resuming after the last mover.
    RoundRobin,
    /// Each step moves a uniformly chosen improving vertex.
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub actors: VertexSet,
    /// Colors of the actors before the step, in vertex order.
    pub old: Vec<Color>,
    pub new: Vec<Color>,
    pub delta_s: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// No further move exists: a Nash equilibrium for best-response
    /// dynamics, a q-strong equilibrium for coalition dynamics.
    Converged,
    CycleDetected,
    StepBudgetExhausted,
}

/// State `repeat_at` equals state `first_seen` (state `i` is the coloring
/// after `i` steps).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub first_seen: usize,
    pub repeat_at: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub sigma0: Coloring,
    pub steps: Vec<Step>,
    pub terminal: Terminal,
    pub final_coloring: Coloring,
    /// Digest of every visited state, starting with `sigma0`.
    pub visited_hashes: Vec<u64>,
    pub cycle: Option<Cycle>,
    /// First repeat of a state up to relabeling of colors.
    pub relabeled_cycle: Option<Cycle>,
}

/// Runs `rule` from `sigma0` until it yields no successor, a state repeats,
/// or `max_steps` steps have been taken. `rule` returns the next coloring.
pub fn run_with<R>(g: &Graph, sigma0: &Coloring, max_steps: usize, mut rule: R) -> Result<Trace, DynamicsError>
where
    R: FnMut(&Coloring) -> Result<Option<Coloring>, DynamicsError>,
{
    sigma0.check_against(g)?;
    let mut current = sigma0.clone();
    let mut seen = HashMap::from([(current.as_slice().to_vec(), 0usize)]);
    let mut seen_relabeled = HashMap::from([(current.canonical().as_slice().to_vec(), 0usize)]);
    let mut trace = Trace {
        sigma0: sigma0.clone(),
        steps: Vec::new(),
        terminal: Terminal::StepBudgetExhausted,
        final_coloring: sigma0.clone(),
        visited_hashes: vec![state_digest(current.as_slice())],
        cycle: None,
        relabeled_cycle: None,
    };
    loop {
        if trace.steps.len() >= max_steps {
            break;
        }
        let Some(next) = rule(&current)? else {
            trace.terminal = Terminal::Converged;
            break;
        };
        next.check_against(g)?;
        let actors = game::deviating_set(&current, &next)?;
        trace.steps.push(Step {
            actors,
            old: actors.iter().map(|v| current.color(v)).collect(),
            new: actors.iter().map(|v| next.color(v)).collect(),
            delta_s: game::cut_difference(g, &current, &next)?,
        });
        current = next;
        let index = trace.steps.len();
        trace.visited_hashes.push(state_digest(current.as_slice()));
        if trace.relabeled_cycle.is_none() {
            if let Some(&first_seen) = seen_relabeled.get(current.canonical().as_slice()) {
                trace.relabeled_cycle = Some(Cycle { first_seen, repeat_at: index });
            } else {
                seen_relabeled.insert(current.canonical().as_slice().to_vec(), index);
            }
        }
        if let Some(&first_seen) = seen.get(current.as_slice()) {
            trace.cycle = Some(Cycle { first_seen, repeat_at: index });
            trace.terminal = Terminal::CycleDetected;
            break;
        }
        seen.insert(current.as_slice().to_vec(), index);
    }
    trace.final_coloring = current;
    Ok(trace)
}

/// Smallest color that strictly lowers the number of same-colored
/// neighbors of `v`, if any.
fn smallest_improving_color(g: &Graph, sigma: &Coloring, v: usize) -> Option<Color> {
    let row = g.neighbors(v);
    let crowd = |a: Color| row.iter().filter(|&w| sigma.color(w) == a).count();
    let own = crowd(sigma.color(v));
    (1..=sigma.k() as Color).find(|&a| crowd(a) < own)
}

pub fn run_best_response(g: &Graph, sigma0: &Coloring, schedule: Schedule, max_steps: usize) -> Result<Trace, DynamicsError> {
    let n = g.n();
    match schedule {
        Schedule::RoundRobin => {
            let mut next_vertex = 0;
            run_with(g, sigma0, max_steps, |sigma| {
                for offset in 0..n {
                    let v = (next_vertex + offset) % n;
                    if let Some(a) = smallest_improving_color(g, sigma, v) {
                        next_vertex = (v + 1) % n;
                        return Ok(Some(sigma.replace(&[(v, a)])?));
                    }
                }
                Ok(None)
            })
        }
        Schedule::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_with(g, sigma0, max_steps, |sigma| {
                let movers: Vec<(usize, Color)> =
                    (0..n).filter_map(|v| smallest_improving_color(g, sigma, v).map(|a| (v, a))).collect();
                if movers.is_empty() {
                    return Ok(None);
                }
                let (v, a) = movers[rng.gen_range(0..movers.len())];
                Ok(Some(sigma.replace(&[(v, a)])?))
            })
        }
    }
}

pub fn run_coalition_dynamics(g: &Graph, sigma0: &Coloring, q: usize, max_steps: usize) -> Result<Trace, DynamicsError> {
    if q == 0 || q > g.n().max(1) {
        return Err(EquilibriumError::QOutOfRange { q, n: g.n() }.into());
    }
    run_with(g, sigma0, max_steps, |sigma| {
        Ok(find_strong_deviation(g, sigma, q, Pruning::L0)?.certificate().map(|c| c.target.clone()))
    })
}

/// Re-applies every step from `sigma0`, checking the recorded old colors and
/// cut differences, and returns the resulting coloring. Fails if the trace
/// is inconsistent with `g` or with its own final coloring.
pub fn replay(g: &Graph, trace: &Trace) -> Result<Coloring, DynamicsError> {
    trace.sigma0.check_against(g)?;
    let mut current = trace.sigma0.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let mismatch = |reason: &str| DynamicsError::ReplayMismatch { step: i, reason: reason.to_string() };
        let actors: Vec<usize> = step.actors.iter().collect();
        if actors.len() != step.old.len() || actors.len() != step.new.len() {
            return Err(mismatch("actor and color lists differ in length"));
        }
        if actors.iter().zip(&step.old).any(|(&v, &c)| v >= current.len() || current.color(v) != c) {
            return Err(mismatch("recorded old colors do not match the state"));
        }
        let assignments: Vec<(usize, Color)> = actors.iter().copied().zip(step.new.iter().copied()).collect();
        let next = current.replace(&assignments)?;
        if game::deviating_set(&current, &next)? != step.actors {
            return Err(mismatch("an actor keeps its color"));
        }
        if game::cut_difference(g, &current, &next)? != step.delta_s {
            return Err(mismatch("recorded cut difference is wrong"));
        }
        if trace.visited_hashes.get(i + 1) != Some(&state_digest(next.as_slice())) {
            return Err(mismatch("state digest differs"));
        }
        current = next;
    }
    if current != trace.final_coloring {
        return Err(DynamicsError::ReplayMismatch {
            step: trace.steps.len(),
            reason: "final coloring differs".to_string(),
        });
    }
    Ok(current)
}
