//! Closed cyclically nonbacktracking walk (CNBW) counts.
//!
//! Walks live on the `2dn` directed edges of the labeled graph; a step from
//! edge `e` to edge `f` is allowed when `f` starts where `e` ends and `f` is
//! not the reversal of `e`. The trace of the `k`-th power of that transfer
//! structure counts exactly the closed walks whose cyclic word is reduced,
//! which ties them to the eigenvalue side of the house.

use crate::graph::cycles::WorkBudget;

use super::{GraphError, GraphState};

/// Directed edge ids: `2*(l*n + u) + dir` where `dir = 0` runs `u -> π_l(u)`
/// and `dir = 1` runs the same edge backwards.
fn edge_head(state: &GraphState, e: usize) -> usize {
    let n = state.n();
    let dir = e & 1;
    let slot = e >> 1;
    let (l, u) = (slot / n, slot % n);
    if dir == 0 {
        state.tower(l).apply(u)
    } else {
        u
    }
}

fn edges_from(state: &GraphState, v: usize, out: &mut Vec<usize>) {
    let n = state.n();
    out.clear();
    for l in 0..state.d() {
        // Forward edge with tail v.
        out.push(2 * (l * n + v));
        // Backward edge with tail v: the edge (l, u) with π_l(u) = v.
        let u = state.tower(l).apply_inverse(v);
        out.push(2 * (l * n + u) + 1);
    }
}

/// Successor lists of the nonbacktracking transfer structure; entry `e`
/// holds the `2d - 1` edges that may follow `e`.
fn successors(state: &GraphState) -> Vec<Vec<u32>> {
    let n = state.n();
    let d = state.d();
    let m = 2 * d * n;
    let mut succ = vec![Vec::with_capacity(2 * d - 1); m];
    let mut from = Vec::with_capacity(2 * d);
    for e in 0..m {
        let head = edge_head(state, e);
        edges_from(state, head, &mut from);
        let rev = e ^ 1;
        for &f in &from {
            if f != rev {
                succ[e].push(f as u32);
            }
        }
    }
    succ
}

/// `CNBW_k` for every `k` in `1..=k_max`, via `k` applications of the
/// transfer structure to the identity. Entries stay integral in `f64` well
/// past the sizes the budget admits.
pub fn cnbw_counts(
    state: &GraphState,
    k_max: usize,
    budget: WorkBudget,
) -> Result<Vec<u64>, GraphError> {
    let m = 2 * state.d() * state.n();
    let work = (k_max as u64)
        .saturating_mul(m as u64)
        .saturating_mul(m as u64)
        .saturating_mul(2 * state.d() as u64);
    if work > budget.max_steps {
        return Err(GraphError::WorkBudget { steps: work, budget: budget.max_steps });
    }
    let succ = successors(state);

    // x holds B^j as m columns of length m; start at the identity.
    let mut x = vec![0.0f64; m * m];
    for e in 0..m {
        x[e * m + e] = 1.0;
    }
    let mut next = vec![0.0f64; m * m];
    let mut out = Vec::with_capacity(k_max);
    for _ in 1..=k_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for e in 0..m {
            // next[e][:] = sum over f in succ(e) of x[f][:]
            for &f in &succ[e] {
                let (dst, src) = (e * m, f as usize * m);
                for c in 0..m {
                    next[dst + c] += x[src + c];
                }
            }
        }
        std::mem::swap(&mut x, &mut next);
        let trace: f64 = (0..m).map(|e| x[e * m + e]).sum();
        out.push(trace.round() as u64);
    }
    Ok(out)
}

/// `CNBW_k` for a single length.
pub fn cnbw_count(state: &GraphState, k: usize, budget: WorkBudget) -> Result<u64, GraphError> {
    Ok(*cnbw_counts(state, k, budget)?.last().expect("k >= 1"))
}

/// Direct walk enumeration, exponential in `k`; the independent
/// cross-check for the transfer computation at small sizes.
pub fn brute_force_cnbw(state: &GraphState, k: usize) -> u64 {
    let m = 2 * state.d() * state.n();
    let succ = successors(state);
    let mut count = 0u64;
    let mut stack: Vec<usize> = Vec::with_capacity(k);
    fn rec(succ: &[Vec<u32>], stack: &mut Vec<usize>, k: usize, count: &mut u64) {
        let last = *stack.last().unwrap();
        if stack.len() == k {
            let first = stack[0];
            // Close cyclically: first must be a legal successor of last.
            if succ[last].contains(&(first as u32)) {
                *count += 1;
            }
            return;
        }
        for &f in &succ[last] {
            stack.push(f as usize);
            rec(succ, stack, k, count);
            stack.pop();
        }
    }
    for e in 0..m {
        stack.push(e);
        if k == 1 {
            if succ[e].contains(&(e as u32)) {
                count += 1;
            }
        } else {
            rec(&succ, &mut stack, k, &mut count);
        }
        stack.pop();
    }
    count
}

/// True iff some CNBW of length at most `k_max` is not a repeated walk
/// around a simple cycle, detected through the counting identity
/// `CNBW_k = Σ_{j|k} 2j C_j`.
pub fn bad_walk_exists(
    state: &GraphState,
    k_max: usize,
    budget: WorkBudget,
) -> Result<bool, GraphError> {
    let cnbw = cnbw_counts(state, k_max, budget)?;
    let cycles = super::count_cycles(state, k_max, budget)?.by_length();
    for k in 1..=k_max {
        let from_cycles: u64 = (1..=k)
            .filter(|j| k % j == 0)
            .map(|j| 2 * j as u64 * cycles.get(&j).copied().unwrap_or(0))
            .sum();
        if cnbw[k - 1] != from_cycles {
            return Ok(true);
        }
    }
    Ok(false)
}
