//! The growing random regular graph `G(t)`.
//!
//! `G(n, 2d)` is formed by `d` independent uniform permutations of `[n]`:
//! its adjacency matrix is the sum of the permutation matrices and their
//! transposes, so every vertex has degree `2d` with loops counted twice.
//! Each permutation grows by Chinese-restaurant insertion, which keeps the
//! marginal uniform at every size and deletion-consistent, and the whole
//! graph is run on a Poissonized clock that inserts vertex `m+1` after an
//! `Exp(m+1)` holding time.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::KahanSum;

mod cycles;
mod nonbacktracking;
mod spectrum;

pub use cycles::{count_cycles, enumerate_cycles, CycleRecord, WorkBudget};
pub use nonbacktracking::{bad_walk_exists, brute_force_cnbw, cnbw_count, cnbw_counts};
pub use spectrum::{eigenvalues, f_basis, gamma_traces, mobius, tr_poly, EigenOpts, GammaPoly};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("CRP choice {choice} out of range 1..={max}")]
    ChoiceOutOfRange { choice: usize, max: usize },
    #[error("towers must all have the same size")]
    MismatchedTowers,
    #[error("not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },
    #[error("work budget exceeded: {steps} steps > {budget}")]
    WorkBudget { steps: u64, budget: u64 },
    #[error("graph too large for dense eigensolver: n={n} > cap {cap}")]
    EigenTooLarge { n: usize, cap: usize },
    #[error("eigendecomposition failed to converge")]
    EigenFailed,
    #[error("invalid cycle record: {0}")]
    InvalidCycle(String),
}

/// A permutation of `[n]` stored as doubly linked cycle lists, supporting
/// O(1) Chinese-restaurant insertion, O(1) successor/predecessor queries,
/// and O(1) deletion of the last-inserted element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermTower {
    next: Vec<u32>,
    prev: Vec<u32>,
}

impl PermTower {
    pub fn new() -> Self {
        PermTower { next: Vec::new(), prev: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    /// `π(i)` for `i` in `0..n`.
    pub fn apply(&self, i: usize) -> usize {
        self.next[i] as usize
    }

    /// `π^{-1}(i)` for `i` in `0..n`.
    pub fn apply_inverse(&self, i: usize) -> usize {
        self.prev[i] as usize
    }

    /// Seats customer `n+1`: `choice = j` in `1..=n` seats it to the left of
    /// customer `j` (so the new customer maps to `j`), `choice = n+1` opens
    /// a new table (fixed point).
    pub fn crp_step(&mut self, choice: usize) -> Result<(), GraphError> {
        let n = self.len();
        if choice == 0 || choice > n + 1 {
            return Err(GraphError::ChoiceOutOfRange { choice, max: n + 1 });
        }
        let c = n as u32;
        if choice == n + 1 {
            self.next.push(c);
            self.prev.push(c);
        } else {
            let j = (choice - 1) as u32;
            let p = self.prev[j as usize];
            self.next.push(j);
            self.prev.push(p);
            self.next[p as usize] = c;
            self.prev[j as usize] = c;
        }
        Ok(())
    }

    /// Deletes the last-inserted element from its cycle, recovering the
    /// previous tower state exactly.
    pub fn pop_last(&mut self) {
        let n = self.len();
        assert!(n > 0, "pop on empty tower");
        let c = n - 1;
        let (nx, pv) = (self.next[c] as usize, self.prev[c] as usize);
        if nx != c {
            self.next[pv] = nx as u32;
            self.prev[nx] = pv as u32;
        }
        self.next.pop();
        self.prev.pop();
    }

    /// Builds a tower from the one-line form `perm[i] = π(i)`.
    pub fn from_permutation(perm: &[u32]) -> Result<Self, GraphError> {
        let n = perm.len();
        let mut prev = vec![u32::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p as usize >= n || prev[p as usize] != u32::MAX {
                return Err(GraphError::InvalidPermutation { n });
            }
            prev[p as usize] = i as u32;
        }
        Ok(PermTower { next: perm.to_vec(), prev })
    }

    /// Uniform random permutation of `[n]` (Fisher–Yates); same marginal law
    /// as `n` CRP steps with uniform choices.
    pub fn uniform(n: usize, rng: &mut impl Rng) -> Self {
        let mut perm: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        PermTower::from_permutation(&perm).expect("shuffle is a permutation")
    }

    /// Cycle decomposition with 1-based labels, each cycle led by its
    /// minimal element, cycles ordered by minimal element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            loop {
                seen[v] = true;
                cycle.push(v as u32 + 1);
                v = self.apply(v);
                if v == start {
                    break;
                }
            }
            out.push(cycle);
        }
        out
    }

    fn from_cycles(n: usize, cycles: &[Vec<u32>]) -> Result<Self, GraphError> {
        let mut perm = vec![u32::MAX; n];
        for cycle in cycles {
            for (i, &v) in cycle.iter().enumerate() {
                let w = cycle[(i + 1) % cycle.len()];
                if v == 0 || v as usize > n || perm[v as usize - 1] != u32::MAX {
                    return Err(GraphError::InvalidPermutation { n });
                }
                perm[v as usize - 1] = w - 1;
            }
        }
        if perm.iter().any(|&p| p == u32::MAX) {
            return Err(GraphError::InvalidPermutation { n });
        }
        PermTower::from_permutation(&perm)
    }
}

impl Default for PermTower {
    fn default() -> Self {
        PermTower::new()
    }
}

/// The full state of `G(n, 2d)`: `d` permutation towers of common size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphState {
    towers: Vec<PermTower>,
}

impl GraphState {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "need at least one permutation");
        GraphState { towers: vec![PermTower::new(); d] }
    }

    pub fn d(&self) -> usize {
        self.towers.len()
    }

    pub fn n(&self) -> usize {
        self.towers[0].len()
    }

    pub fn tower(&self, l: usize) -> &PermTower {
        &self.towers[l]
    }

    pub fn from_towers(towers: Vec<PermTower>) -> Result<Self, GraphError> {
        if towers.is_empty() || towers.iter().any(|t| t.len() != towers[0].len()) {
            return Err(GraphError::MismatchedTowers);
        }
        Ok(GraphState { towers })
    }

    /// Inserts one vertex, applying a CRP step with the given choice to each
    /// tower.
    pub fn insert_vertex(&mut self, choices: &[usize]) -> Result<(), GraphError> {
        assert_eq!(choices.len(), self.d());
        for (t, &c) in self.towers.iter_mut().zip(choices) {
            t.crp_step(c)?;
        }
        Ok(())
    }

    /// Inserts one vertex with uniform choices drawn from `rng`.
    pub fn insert_vertex_uniform(&mut self, rng: &mut impl Rng) {
        let n = self.n();
        let choices: Vec<usize> = (0..self.d()).map(|_| rng.gen_range(1..=n + 1)).collect();
        self.insert_vertex(&choices).expect("uniform choice in range");
    }

    /// Removes the last-inserted vertex from every tower.
    pub fn pop_last(&mut self) {
        for t in &mut self.towers {
            t.pop_last();
        }
    }

    /// Uniform `G(n, 2d)` without growing through the tower history.
    pub fn sample_uniform(n: usize, d: usize, rng: &mut impl Rng) -> Self {
        GraphState { towers: (0..d).map(|_| PermTower::uniform(n, rng)).collect() }
    }

    /// Dense adjacency matrix `A = Σ_l (P_l + P_l^T)`; loops count twice.
    pub fn adjacency(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut a = nalgebra::DMatrix::zeros(n, n);
        for t in &self.towers {
            for i in 0..n {
                let j = t.apply(i);
                a[(i, j)] += 1.0;
                a[(j, i)] += 1.0;
            }
        }
        a
    }

    pub fn snapshot(&self, time: f64) -> Snapshot {
        Snapshot {
            d: self.d(),
            n: self.n(),
            time,
            perms: self.towers.iter().map(|t| t.cycles()).collect(),
        }
    }
}

/// JSON-serializable replica snapshot: permutations in cycle form, 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub d: usize,
    pub n: usize,
    pub time: f64,
    pub perms: Vec<Vec<Vec<u32>>>,
}

impl Snapshot {
    pub fn restore(&self) -> Result<GraphState, GraphError> {
        let towers = self
            .perms
            .iter()
            .map(|cycles| PermTower::from_cycles(self.n, cycles))
            .collect::<Result<Vec<_>, _>>()?;
        if towers.len() != self.d {
            return Err(GraphError::MismatchedTowers);
        }
        GraphState::from_towers(towers)
    }
}

/// Continuous clock of the Poissonized process: from size `m` the next
/// insertion arrives after an `Exp(m+1)` holding time.
#[derive(Clone, Copy, Debug)]
pub struct Clock {
    time: KahanSum,
    n: usize,
}

impl Clock {
    pub fn start() -> Self {
        Clock { time: KahanSum::new(0.0), n: 0 }
    }

    pub fn at(time: f64, n: usize) -> Self {
        Clock { time: KahanSum::new(time), n }
    }

    pub fn time(&self) -> f64 {
        self.time.value()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// One vertex insertion on the Poissonized clock.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsertionEvent {
    pub time: f64,
    /// 1-based label of the inserted vertex (= new graph size).
    pub vertex: usize,
}

/// Runs the clock to `until`, inserting vertices with uniform CRP choices.
/// Holding times restart memorylessly at each call.
pub fn advance(
    clock: &mut Clock,
    state: &mut GraphState,
    until: f64,
    rng: &mut impl Rng,
) -> Vec<InsertionEvent> {
    assert!(until >= clock.time(), "cannot advance backwards");
    let mut events = Vec::new();
    loop {
        let rate = (clock.n + 1) as f64;
        let dt = Exp::new(rate).unwrap().sample(rng);
        if clock.time() + dt > until {
            clock.time = KahanSum::new(until);
            break;
        }
        clock.time.add(dt);
        clock.n += 1;
        state.insert_vertex_uniform(rng);
        events.push(InsertionEvent { time: clock.time(), vertex: clock.n });
    }
    events
}

/// Seeded growth with per-vertex streams: the holding time and the `d` CRP
/// choices for vertex `v` come from sub-stream `v` of `(master, replica)`.
/// Restarting from any snapshot of the same seeded trajectory therefore
/// reproduces the remaining insertions exactly.
pub fn grow_seeded(
    master: u64,
    replica: u64,
    d: usize,
    t_end: f64,
) -> (GraphState, Clock, Vec<InsertionEvent>) {
    let mut state = GraphState::new(d);
    let events = grow_seeded_continue(master, replica, &mut state, t_end);
    let clock = Clock::at(t_end, state.n());
    (state, clock, events)
}

/// Continues a seeded trajectory whose prefix was grown by the same
/// `(master, replica)` pair. The event clock of the existing vertices is
/// replayed from their streams, so no extra bookkeeping needs to survive a
/// snapshot round trip.
pub fn grow_seeded_continue(
    master: u64,
    replica: u64,
    state: &mut GraphState,
    t_end: f64,
) -> Vec<InsertionEvent> {
    let d = state.d();
    let mut t = KahanSum::new(0.0);
    for v in 1..=state.n() {
        let mut stream = crate::seed::sub_rng(master, replica, v as u64);
        t.add(Exp::new(v as f64).unwrap().sample(&mut stream));
    }
    let mut events = Vec::new();
    loop {
        let v = state.n() + 1;
        let mut stream = crate::seed::sub_rng(master, replica, v as u64);
        let dt = Exp::new(v as f64).unwrap().sample(&mut stream);
        if t.value() + dt > t_end {
            break;
        }
        t.add(dt);
        let choices: Vec<usize> = (0..d).map(|_| stream.gen_range(1..=v)).collect();
        state.insert_vertex(&choices).expect("choices in range");
        events.push(InsertionEvent { time: t.value(), vertex: v });
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn first_customer_is_a_fixed_point() {
        let mut t = PermTower::new();
        for choice in [1usize] {
            t.crp_step(choice).unwrap();
        }
        assert_eq!(t.apply(0), 0);
        let mut t2 = PermTower::new();
        t2.crp_step(1).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn seating_rule_by_hand() {
        // π = (1 2) on two customers, i.e. π(1)=2, π(2)=1 in 1-based terms.
        let mut t = PermTower::from_permutation(&[1, 0]).unwrap();
        // Customer 3 to the left of customer 1: π(3)=1, and 2 now maps to 3.
        t.crp_step(1).unwrap();
        assert_eq!(t.apply(2), 0);
        assert_eq!(t.apply(1), 2);
        assert_eq!(t.apply(0), 1);

        // New table instead: (1 2)(3).
        let mut t = PermTower::from_permutation(&[1, 0]).unwrap();
        t.crp_step(3).unwrap();
        assert_eq!(t.apply(2), 2);
        assert_eq!(t.apply(0), 1);
        assert_eq!(t.apply(1), 0);
    }

    #[test]
    fn choice_out_of_range() {
        let mut t = PermTower::new();
        t.crp_step(1).unwrap();
        assert!(matches!(t.crp_step(3), Err(GraphError::ChoiceOutOfRange { .. })));
        assert!(matches!(t.crp_step(0), Err(GraphError::ChoiceOutOfRange { .. })));
    }

    /// Every choice sequence of length n yields a distinct permutation, so
    /// uniform choices give the uniform law on S_n.
    #[test]
    fn choice_sequences_enumerate_sn() {
        for n in 1..=4 {
            let mut seen = HashMap::new();
            let seqs: Vec<Vec<usize>> = (0..n).fold(vec![vec![]], |acc, i| {
                acc.into_iter()
                    .flat_map(|s| {
                        (1..=i + 1).map(move |c| {
                            let mut s2 = s.clone();
                            s2.push(c);
                            s2
                        })
                    })
                    .collect()
            });
            for seq in &seqs {
                let mut t = PermTower::new();
                for &c in seq {
                    t.crp_step(c).unwrap();
                }
                let oneline: Vec<usize> = (0..n).map(|i| t.apply(i)).collect();
                *seen.entry(oneline).or_insert(0usize) += 1;
            }
            let fact: usize = (1..=n).product();
            assert_eq!(seen.len(), fact);
            assert!(seen.values().all(|&v| v == 1));
        }
    }

    #[test]
    fn deletion_consistency_is_exact() {
        let mut rng = crate::seed::replica_rng(11, 0);
        let mut state = GraphState::new(3);
        let mut history = vec![state.clone()];
        for _ in 0..40 {
            state.insert_vertex_uniform(&mut rng);
            history.push(state.clone());
        }
        for snapshot in history.iter().rev().skip(1) {
            state.pop_last();
            assert_eq!(&state, snapshot);
        }
    }

    #[test]
    fn adjacency_rows_sum_to_2d() {
        let mut rng = crate::seed::replica_rng(5, 1);
        for d in 1..=3 {
            let state = GraphState::sample_uniform(17, d, &mut rng);
            let a = state.adjacency();
            for i in 0..17 {
                let row: f64 = (0..17).map(|j| a[(i, j)]).sum();
                assert_eq!(row, 2.0 * d as f64);
            }
        }
    }

    #[test]
    fn advance_until_now_is_a_noop() {
        let mut rng = crate::seed::replica_rng(1, 0);
        let mut clock = Clock::start();
        let mut state = GraphState::new(2);
        let events = advance(&mut clock, &mut state, 0.0, &mut rng);
        assert!(events.is_empty());
        assert_eq!(state.n(), 0);
    }

    /// E[M_t] = e^t - 1: the size chain started at 0 with rates m+1 is a
    /// Yule process shifted down by one.
    #[test]
    fn poissonized_clock_mean_growth() {
        let t_end = 2.0f64;
        let reps = 4000;
        let mut total = 0.0;
        for r in 0..reps {
            let mut rng = crate::seed::replica_rng(99, r);
            let mut clock = Clock::start();
            let mut state = GraphState::new(1);
            advance(&mut clock, &mut state, t_end, &mut rng);
            total += clock.n() as f64;
        }
        let mean = total / reps as f64;
        let expect = t_end.exp() - 1.0;
        // sd of M_t is about e^t; three sigma of the replicate mean.
        let tol = 3.0 * t_end.exp() / (reps as f64).sqrt();
        assert!((mean - expect).abs() < tol, "mean {mean} vs {expect} ± {tol}");
    }

    #[test]
    fn seeded_growth_resumes_identically() {
        let (state, clock, events) = grow_seeded(77, 3, 2, 4.0);
        // Stop midway, snapshot, resume.
        let (state2, clock2, mut events2) = grow_seeded(77, 3, 2, 1.5);
        let snap = state2.snapshot(clock2.time());
        let mut restored = snap.restore().unwrap();
        assert_eq!(restored, state2);
        let more = grow_seeded_continue(77, 3, &mut restored, 4.0);
        events2.extend(more);
        assert_eq!(state, restored);
        assert_eq!(events, events2);
        assert_eq!(clock.n(), restored.n());
    }

    #[test]
    fn snapshot_json_round_trip() {
        let (state, clock, _) = grow_seeded(8, 0, 2, 3.0);
        let snap = state.snapshot(clock.time());
        let json = serde_json::to_string(&snap).unwrap();
        let back: Snapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(back.restore().unwrap(), state);
    }
}
