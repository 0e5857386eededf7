//! The size-biased coupling: a graph conditioned to contain a given cycle.
//!
//! Starting from an unconditioned sample, each permutation is corrected by
//! a short product of transpositions so that it maps the cycle's tails to
//! its heads; the result is uniform given those constraints, hence
//! distributed as the graph conditioned to contain the cycle. The coupling
//! is monotone: any edge of the base graph that contradicts the target
//! cycle's pattern disappears, and every other edge survives.

use rand::Rng;

use crate::graph::{CycleRecord, GraphError, GraphState, PermTower};

use super::StatsError;

fn validate(alpha: &CycleRecord, n: usize, d: usize) -> Result<(), StatsError> {
    let mut seen = vec![false; n];
    for &v in &alpha.vertices {
        if v >= n {
            return Err(StatsError::Graph(GraphError::InvalidCycle(format!(
                "vertex {v} out of range for n={n}"
            ))));
        }
        if seen[v] {
            return Err(StatsError::Graph(GraphError::InvalidCycle(format!(
                "vertex {v} repeated"
            ))));
        }
        seen[v] = true;
    }
    if alpha.word.len() != alpha.vertices.len() {
        return Err(StatsError::Graph(GraphError::InvalidCycle(
            "word and vertex list lengths differ".into(),
        )));
    }
    if alpha.word.letters().iter().any(|l| l.generator() as usize > d) {
        return Err(StatsError::Graph(GraphError::InvalidCycle(format!(
            "letter beyond alphabet size d={d}"
        ))));
    }
    Ok(())
}

/// Applies the transposition correction to one permutation: after the call,
/// `perm[a] = b` for every constraint, and the permutation is uniform given
/// those constraints if it was uniform before.
fn force_edges(perm: &mut [u32], constraints: &[(usize, usize)]) {
    let n = perm.len();
    let mut inverse = vec![0u32; n];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p as usize] = i as u32;
    }
    for &(a, b) in constraints {
        let cur = perm[a];
        if cur as usize != b {
            let x = inverse[b] as usize;
            perm[a] = b as u32;
            perm[x] = cur;
            inverse[b] = a as u32;
            inverse[cur as usize] = x as u32;
        }
    }
}

/// The coupling map: rewrites `state` into a graph containing `alpha`.
pub fn condition_on(state: &GraphState, alpha: &CycleRecord) -> Result<GraphState, StatsError> {
    let (n, d) = (state.n(), state.d());
    validate(alpha, n, d)?;
    let mut perms: Vec<Vec<u32>> =
        (0..d).map(|l| (0..n).map(|i| state.tower(l).apply(i) as u32).collect()).collect();
    let mut constraints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d];
    for (l, a, b) in alpha.directed_edges() {
        constraints[l].push((a, b));
    }
    for (l, cons) in constraints.iter().enumerate() {
        force_edges(&mut perms[l], cons);
    }
    let towers = perms
        .iter()
        .map(|p| PermTower::from_permutation(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GraphState::from_towers(towers)?)
}

/// Samples `G(n, 2d)` conditioned to contain `alpha`, by coupling from a
/// fresh uniform sample.
pub fn sample_conditioned(
    n: usize,
    d: usize,
    alpha: &CycleRecord,
    rng: &mut impl Rng,
) -> Result<GraphState, StatsError> {
    let base = GraphState::sample_uniform(n, d, rng);
    condition_on(&base, alpha)
}

/// Rejection-sampling oracle for the same conditioned law; only viable when
/// the conditioning event is likely enough.
pub fn rejection_conditioned(
    n: usize,
    d: usize,
    alpha: &CycleRecord,
    rng: &mut impl Rng,
    max_tries: u64,
) -> Result<GraphState, StatsError> {
    validate(alpha, n, d)?;
    for _ in 0..max_tries {
        let state = GraphState::sample_uniform(n, d, rng);
        if alpha.contained_in(&state) {
            return Ok(state);
        }
    }
    Err(StatsError::RejectionExhausted { max_tries })
}
