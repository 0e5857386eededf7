//! Exact enumeration of short simple cycles.
//!
//! A cycle is a closed walk that repeats no vertex and traverses no edge
//! twice in either direction; its word is the dihedral class spelled by the
//! edge labels. Loops are length-1 cycles (`π_l(v) = v`) and a pair of
//! parallel edges is a length-2 cycle. Enumeration is a rooted DFS over
//! labeled edges with canonical-root pruning: a cycle is only discovered
//! from its minimal vertex, once per direction, and the two directed
//! traversals are merged at the end.

use crate::counts::CountVector;
use crate::words::{Letter, Word, WordClass};

use super::{GraphError, GraphState};

/// A realized cycle: the vertex sequence `v_0 … v_{k-1}` (0-based labels)
/// and the word spelled along it. Letter `i` labels the step from `v_i` to
/// `v_{i+1}` (cyclically): letter `π_l` means `π_l(v_i) = v_{i+1}`, letter
/// `π_l^{-1}` means `π_l(v_{i+1}) = v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub vertices: Vec<usize>,
    pub word: Word,
}

impl CycleRecord {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn class(&self) -> WordClass {
        crate::words::canonicalize(&self.word)
    }

    /// Directed edge list `(label, tail, head)` with `π_label(tail) = head`,
    /// 0-based labels and vertices.
    pub fn directed_edges(&self) -> Vec<(usize, usize, usize)> {
        let k = self.len();
        (0..k)
            .map(|i| {
                let from = self.vertices[i];
                let to = self.vertices[(i + 1) % k];
                let letter = self.word.letters()[i];
                let l = letter.generator() as usize - 1;
                if letter.inverted() {
                    (l, to, from)
                } else {
                    (l, from, to)
                }
            })
            .collect()
    }

    /// Checks the record against a graph's permutations.
    pub fn contained_in(&self, state: &GraphState) -> bool {
        self.directed_edges().iter().all(|&(l, a, b)| state.tower(l).apply(a) == b)
    }
}

/// Work-budget guard for the exponential walk searches.
#[derive(Clone, Copy, Debug)]
pub struct WorkBudget {
    pub max_steps: u64,
}

impl Default for WorkBudget {
    fn default() -> Self {
        WorkBudget { max_steps: 2_000_000_000 }
    }
}

struct CycleSearch<'a> {
    state: &'a GraphState,
    k_max: usize,
    budget: u64,
    steps: u64,
    /// Path as (vertex, letter, edge id); edge id = (label, tail-of-forward).
    path_vertices: Vec<usize>,
    path_letters: Vec<Letter>,
    used_edges: Vec<(usize, usize)>,
    found: Vec<CycleRecord>,
}

impl<'a> CycleSearch<'a> {
    fn run(mut self) -> Result<Vec<CycleRecord>, GraphError> {
        for root in 0..self.state.n() {
            self.path_vertices.clear();
            self.path_letters.clear();
            self.used_edges.clear();
            self.path_vertices.push(root);
            self.extend(root, root)?;
        }
        Ok(self.found)
    }

    fn extend(&mut self, root: usize, at: usize) -> Result<(), GraphError> {
        if self.path_letters.len() >= self.k_max {
            return Ok(());
        }
        let d = self.state.d();
        for l in 0..d {
            let tower = self.state.tower(l);
            // Forward step over edge (l, at), then backward step over the
            // edge (l, u) with π_l(u) = at.
            let fwd = (tower.apply(at), (l, at), Letter::new(l as u16 + 1, false).unwrap());
            let back_tail = tower.apply_inverse(at);
            let bwd = (back_tail, (l, back_tail), Letter::new(l as u16 + 1, true).unwrap());
            for (next, edge, letter) in [fwd, bwd] {
                self.steps += 1;
                if self.steps > self.budget {
                    return Err(GraphError::WorkBudget { steps: self.steps, budget: self.budget });
                }
                if self.used_edges.contains(&edge) {
                    continue;
                }
                if next == root {
                    // Closed traversal; record it.
                    self.path_letters.push(letter);
                    let word = Word::new(self.path_letters.clone())
                        .expect("cycle words are cyclically reduced");
                    self.found.push(CycleRecord { vertices: self.path_vertices.clone(), word });
                    self.path_letters.pop();
                } else if next > root && !self.path_vertices.contains(&next) {
                    self.path_vertices.push(next);
                    self.path_letters.push(letter);
                    self.used_edges.push(edge);
                    self.extend(root, next)?;
                    self.used_edges.pop();
                    self.path_letters.pop();
                    self.path_vertices.pop();
                }
            }
        }
        Ok(())
    }
}

/// Enumerates every simple cycle of length at most `k_max`, one record per
/// geometric cycle (the DFS sees each cycle twice, once per direction; the
/// duplicate with the lexicographically larger traversal is dropped).
pub fn enumerate_cycles(
    state: &GraphState,
    k_max: usize,
    budget: WorkBudget,
) -> Result<Vec<CycleRecord>, GraphError> {
    let search = CycleSearch {
        state,
        k_max,
        budget: budget.max_steps,
        steps: 0,
        path_vertices: Vec::new(),
        path_letters: Vec::new(),
        used_edges: Vec::new(),
        found: Vec::new(),
    };
    let traversals = search.run()?;

    // Pair up the two directed traversals of each geometric cycle. A
    // traversal is kept if it is the smaller of its pair under a total
    // order on (vertices, oriented edge ids).
    let mut keyed: Vec<(Vec<(usize, usize, usize)>, CycleRecord)> = traversals
        .into_iter()
        .map(|rec| {
            let mut edges = rec.directed_edges();
            edges.sort_unstable();
            (edges, rec)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| traversal_key(&a.1).cmp(&traversal_key(&b.1))));
    let mut out = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        debug_assert!(i + 1 < keyed.len(), "directed traversals come in pairs");
        debug_assert_eq!(keyed[i].0, keyed[i + 1].0, "pair shares an edge set");
        out.push(keyed[i].1.clone());
        i += 2;
    }
    Ok(out)
}

fn traversal_key(rec: &CycleRecord) -> (Vec<usize>, Vec<u16>) {
    (rec.vertices.clone(), rec.word.letters().iter().map(|l| l.generator() * 2 + u16::from(l.inverted())).collect())
}

/// Exact counts of simple cycles of length at most `k_max`, keyed by word
/// class; each geometric cycle counts once.
pub fn count_cycles(
    state: &GraphState,
    k_max: usize,
    budget: WorkBudget,
) -> Result<CountVector, GraphError> {
    let mut counts = CountVector::new();
    for rec in enumerate_cycles(state, k_max, budget)? {
        counts.add(rec.class(), 1);
    }
    Ok(counts)
}
