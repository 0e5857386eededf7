//! Brute-force oracles at tiny sizes.
//!
//! Every distributional claim in the crate can be checked against full
//! enumeration when `(n!)^d` is small: the joint law of the cycle counts,
//! per-class means, and the classical cycle-count law of a single uniform
//! permutation.

use std::collections::BTreeMap;

use crate::counts::CountVector;
use crate::graph::{count_cycles, GraphState, PermTower, WorkBudget};
use crate::words::{Rational, WordClass};

use super::StatsError;

/// Exact joint distribution of `(C_1, …, C_r)` under the uniform law on
/// `d`-tuples of permutations of `[n]`.
#[derive(Clone, Debug)]
pub struct ExactJointLaw {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    /// Cell -> number of permutation tuples realizing it.
    pub cells: BTreeMap<Vec<u64>, u64>,
    /// `(n!)^d`, the denominator of every probability.
    pub total: u64,
}

impl ExactJointLaw {
    pub fn probability(&self, cell: &[u64]) -> Rational {
        Rational::new(self.cells.get(cell).copied().unwrap_or(0) as i128, self.total as i128)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u64>, Rational)> {
        self.cells.iter().map(|(c, &m)| (c, Rational::new(m as i128, self.total as i128)))
    }

    /// Exact mean of `C_k`.
    pub fn mean_k(&self, k: usize) -> Rational {
        assert!(k >= 1 && k <= self.r);
        let sum: i128 =
            self.cells.iter().map(|(cell, &m)| cell[k - 1] as i128 * m as i128).sum();
        Rational::new(sum, self.total as i128)
    }
}

fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (0..n as u32).collect();
    fn heap(v: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        for i in 0..k {
            heap(v, k - 1, out);
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
    }
    heap(&mut current, n, &mut out);
    out
}

/// Full enumeration of all `(n!)^d` permutation tuples. The budget guards
/// the blowup; counting work per tuple is tiny at oracle sizes.
pub fn exact_cycle_distribution(
    n: usize,
    d: usize,
    r: usize,
    budget: u64,
) -> Result<ExactJointLaw, StatsError> {
    let fact: u64 = (1..=n as u64).product();
    let total = fact.checked_pow(d as u32).filter(|&t| t <= budget).ok_or(
        StatsError::OracleBudget { n, d, budget },
    )?;
    let perms = all_permutations(n);
    let towers: Vec<PermTower> =
        perms.iter().map(|p| PermTower::from_permutation(p).unwrap()).collect();

    let mut cells: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut index = vec![0usize; d];
    loop {
        let state =
            GraphState::from_towers(index.iter().map(|&i| towers[i].clone()).collect()).unwrap();
        let counts = count_cycles(&state, r, WorkBudget::default())?.by_length();
        let cell: Vec<u64> = (1..=r).map(|k| counts.get(&k).copied().unwrap_or(0)).collect();
        *cells.entry(cell).or_insert(0) += 1;

        // Odometer over tuple indices.
        let mut pos = 0;
        loop {
            if pos == d {
                return Ok(ExactJointLaw { n, d, r, cells, total });
            }
            index[pos] += 1;
            if index[pos] < towers.len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// Exact per-class means `E C_w` by the same enumeration.
pub fn exact_class_means(
    n: usize,
    d: usize,
    r: usize,
    budget: u64,
) -> Result<BTreeMap<WordClass, Rational>, StatsError> {
    let fact: u64 = (1..=n as u64).product();
    let total = fact.checked_pow(d as u32).filter(|&t| t <= budget).ok_or(
        StatsError::OracleBudget { n, d, budget },
    )?;
    let perms = all_permutations(n);
    let towers: Vec<PermTower> =
        perms.iter().map(|p| PermTower::from_permutation(p).unwrap()).collect();
    let mut sums: BTreeMap<WordClass, u64> = BTreeMap::new();
    let mut index = vec![0usize; d];
    loop {
        let state =
            GraphState::from_towers(index.iter().map(|&i| towers[i].clone()).collect()).unwrap();
        let counts: CountVector = count_cycles(&state, r, WorkBudget::default())?;
        for (class, m) in counts.iter() {
            *sums.entry(class.clone()).or_insert(0) += m;
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return Ok(sums
                    .into_iter()
                    .map(|(cl, s)| (cl, Rational::new(s as i128, total as i128)))
                    .collect());
            }
            index[pos] += 1;
            if index[pos] < towers.len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// Falling factorial `[n]_k = n (n-1) ⋯ (n-k+1)`.
pub fn falling(n: u64, k: u32) -> u128 {
    (0..k as u64).map(|i| (n - i) as u128).product()
}

/// The classical joint law of the cycle counts `(c_1, …, c_r)` of a uniform
/// permutation of `[n]`: the exact marginal of
/// `P[(c_1..c_n)] = Π_k 1/(k^{c_k} c_k!)`.
pub fn classical_cycle_law(n: usize, r: usize) -> BTreeMap<Vec<u64>, Rational> {
    let mut out: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
    // Enumerate cycle-type multiplicity vectors with Σ k c_k = n.
    fn rec(
        k: usize,
        remaining: usize,
        counts: &mut Vec<u64>,
        n: usize,
        r: usize,
        out: &mut BTreeMap<Vec<u64>, Rational>,
    ) {
        if k > n {
            if remaining == 0 {
                let mut prob = Rational::new(1, 1);
                for (idx, &c) in counts.iter().enumerate() {
                    let kk = (idx + 1) as i128;
                    let mut denom: i128 = 1;
                    for _ in 0..c {
                        denom *= kk;
                    }
                    for j in 1..=c as i128 {
                        denom *= j;
                    }
                    prob *= Rational::new(1, denom);
                }
                let cell: Vec<u64> = counts.iter().take(r).copied().collect();
                *out.entry(cell).or_insert_with(|| Rational::new(0, 1)) += prob;
            }
            return;
        }
        let max = remaining / k;
        for c in 0..=max {
            counts[k - 1] = c as u64;
            rec(k + 1, remaining - c * k, counts, n, r, out);
        }
        counts[k - 1] = 0;
    }
    let mut counts = vec![0u64; n];
    rec(1, n, &mut counts, n, r, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_fixed_point_counts() {
        let law = exact_cycle_distribution(3, 1, 3, 10_000_000).unwrap();
        // P[C_1 = 3] = 1/6 (identity); P[C_1 = 0] = 2/6 (the two 3-cycles).
        let p3: Rational = law
            .iter()
            .filter(|(cell, _)| cell[0] == 3)
            .map(|(_, p)| p)
            .sum();
        assert_eq!(p3, Rational::new(1, 6));
        let p0: Rational = law
            .iter()
            .filter(|(cell, _)| cell[0] == 0)
            .map(|(_, p)| p)
            .sum();
        assert_eq!(p0, Rational::new(2, 6));
        let total: Rational = law.iter().map(|(_, p)| p).sum();
        assert_eq!(total, Rational::new(1, 1));
    }

    #[test]
    fn s2_transposition_is_a_two_cycle() {
        let law = exact_cycle_distribution(2, 1, 2, 10_000_000).unwrap();
        let p: Rational = law.iter().filter(|(c, _)| c[1] == 1).map(|(_, p)| p).sum();
        assert_eq!(p, Rational::new(1, 2));
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(
            exact_cycle_distribution(8, 2, 2, 10_000_000),
            Err(StatsError::OracleBudget { .. })
        ));
    }

    #[test]
    fn graph_law_matches_classical_cycle_law() {
        // d=1 graph cycles are exactly the permutation cycles.
        for n in [3usize, 4, 5] {
            let r = n.min(3);
            let law = exact_cycle_distribution(n, 1, r, 10_000_000).unwrap();
            let classical = classical_cycle_law(n, r);
            let mut keys: Vec<Vec<u64>> = law.cells.keys().cloned().collect();
            keys.extend(classical.keys().cloned());
            keys.sort();
            keys.dedup();
            for cell in keys {
                let lhs = law.probability(&cell);
                let rhs =
                    classical.get(&cell).copied().unwrap_or_else(|| Rational::new(0, 1));
                assert_eq!(lhs, rhs, "n={n} cell {cell:?}");
            }
        }
    }

    #[test]
    fn class_means_match_appendix_formula() {
        // E C_w = ([n]_k / h(w)) Π_i 1/[n]_{e_i} with e_i the letter usage.
        for (n, d) in [(4usize, 1usize), (3, 2)] {
            let means = exact_class_means(n, d, 3, 10_000_000).unwrap();
            for (class, mean) in &means {
                let k = class.len() as u32;
                let mut usage = vec![0u32; d];
                for l in class.canonical().letters() {
                    usage[l.generator() as usize - 1] += 1;
                }
                let mut denom: i128 = class.h() as i128;
                for &e in &usage {
                    denom *= falling(n as u64, e) as i128;
                }
                let expect = Rational::new(falling(n as u64, k) as i128, denom);
                assert_eq!(*mean, expect, "n={n} d={d} class [{class}]");
            }
        }
    }

    #[test]
    fn falling_factorial_bound_sanity() {
        // [n]_k >= n^k (1 - k^2/2n), used by the tail of the coupling bound.
        for n in [10u64, 50, 200] {
            for k in 1..=6u32 {
                let lhs = falling(n, k) as f64;
                let rhs = (n as f64).powi(k as i32) * (1.0 - (k * k) as f64 / (2 * n) as f64);
                assert!(lhs >= rhs, "n={n} k={k}");
            }
        }
    }
}
