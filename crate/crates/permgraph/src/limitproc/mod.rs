//! The limiting Markov process of the short-cycle counts.
//!
//! Spontaneous cycles with word `w` immigrate at rate `μ(w) = (|w|-c)/h`,
//! every existing cycle doubles one of its `k` letters at total rate `k`,
//! and the product measure of Poisson(`1/h(w)`) is the unique stationary
//! law. This module provides the exact event-driven simulation (word level
//! and length-aggregated), the stationary start, the time-reversed rate
//! table, the degree-increment process, and the closed-form moment
//! formulas used as Monte Carlo targets.

use thiserror::Error;

use crate::counts::CountVector;
use crate::words::{
    enumerate_classes, halvings, mu_k, stationary_mean_k, EnumLimits, WordClass, WordError,
};

mod simulate;
mod system;

pub use simulate::{
    sample_stationary_init, simulate, simulate_lengths, AtomTrail, CyclePath, ImmigrationAtom,
    InitMode, LengthPath, LengthProcess, LengthTrail, ReplicaSeed,
};
pub use system::{ClassId, ClassInfo, WordSystem};

#[derive(Debug, Error)]
pub enum LimitError {
    #[error(transparent)]
    Words(#[from] WordError),
    #[error("time {t} outside the simulated horizon [0, {horizon}]")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("table cap {cap} exceeds truncation {trunc}")]
    CapAboveTruncation { cap: usize, trunc: usize },
    #[error("negative horizon {horizon}")]
    NegativeHorizon { horizon: f64 },
    #[error("class [{class}] not present in the simulation table")]
    UnknownClass { class: WordClass },
    #[error("need j <= k in a Yule occupancy, got j={j}, k={k}")]
    BadOccupancyPair { j: u32, k: u32 },
}

/// Exact binomial coefficient as `f64` (arguments stay tiny here).
pub(crate) fn binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..r {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

/// Probability that a Yule chain started at `j` sits at `k` after time
/// `delta`: `C(k-1, k-j) p^j (1-p)^{k-j}` with `p = e^{-delta}`.
pub fn expec_alpha(j: u32, k: u32, delta: f64) -> Result<f64, LimitError> {
    if j == 0 || k < j {
        return Err(LimitError::BadOccupancyPair { j, k });
    }
    let p = (-delta).exp();
    Ok(binomial(k as u64 - 1, (k - j) as u64) * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32))
}

/// Arguments of the stationary covariance formula.
#[derive(Clone, Copy, Debug)]
pub struct CovSpec {
    pub d: u64,
    pub j: u32,
    pub k: u32,
    pub s: f64,
    pub t: f64,
}

/// Stationary covariance of the length totals,
/// `cov(N_k(t), N_j(s)) = (a(d,j)/2j) C(k-1, k-j) p^j (1-p)^{k-j}` with
/// `p = e^{s-t}` for `k >= j`, and zero otherwise.
pub fn cov_formula(spec: &CovSpec) -> f64 {
    assert!(spec.s <= spec.t, "require s <= t");
    assert!(spec.j >= 1 && spec.k >= 1);
    if spec.k < spec.j {
        return 0.0;
    }
    let mean_j = stationary_mean_k(spec.d, spec.j).expect("valid parameters");
    let mean_j = *mean_j.numer() as f64 / *mean_j.denom() as f64;
    let p = (spec.s - spec.t).exp();
    mean_j
        * binomial(spec.k as u64 - 1, (spec.k - spec.j) as u64)
        * p.powi(spec.j as i32)
        * (1.0 - p).powi((spec.k - spec.j) as i32)
}

/// Large-degree limit of the centered Chebyshev trace covariance:
/// `δ_{ik} (k/2) e^{k(s-t)}` for `s <= t`.
pub fn ou_covariance(i: u32, k: u32, s: f64, t: f64) -> f64 {
    assert!(s <= t, "require s <= t");
    if i != k {
        return 0.0;
    }
    (k as f64 / 2.0) * (k as f64 * (s - t)).exp()
}

/// Exact pre-limit covariance of the centered scaled Chebyshev traces at
/// fixed degree parameter `d`:
/// `(1/4) (2d-1)^{-(i+j)/2} Σ_{k|i, l|j} 4 l k cov(N_k(t), N_l(s))`.
pub fn chebyshev_trace_cov(d: u64, i: u32, j: u32, s: f64, t: f64) -> f64 {
    assert!(s <= t, "require s <= t");
    let base = (2 * d - 1) as f64;
    let mut sum = 0.0;
    for k in 1..=i {
        if i % k != 0 {
            continue;
        }
        for l in 1..=j {
            if j % l != 0 {
                continue;
            }
            sum += 4.0 * (l as f64) * (k as f64) * cov_formula(&CovSpec { d, j: l, k, s, t });
        }
    }
    0.25 * base.powf(-((i + j) as f64) / 2.0) * sum
}

/// One outgoing move of the stationary time-reversed chain.
#[derive(Clone, Debug, PartialEq)]
pub enum ReversedMove {
    /// A cycle with word `from` shrinks to `to` (halving a double pair).
    Shrink { from: WordClass, to: WordClass, rate: f64 },
    /// A cycle with word `from` is destroyed.
    Death { from: WordClass, rate: f64 },
    /// A new cycle with word of length L appears.
    Create { class: WordClass, rate: f64 },
}

impl ReversedMove {
    pub fn rate(&self) -> f64 {
        match self {
            ReversedMove::Shrink { rate, .. }
            | ReversedMove::Death { rate, .. }
            | ReversedMove::Create { rate, .. } => *rate,
        }
    }
}

/// The full outgoing-rate table of the time-reversed truncated chain at
/// state `x`: shrink moves at rate `b x_w` (with `b` the halving
/// multiplicity), deaths at rate `(k - c(w)) x_w`, and creations at the top
/// layer `|w| = L` at rate `L/h(w)`.
pub fn reversed_rates(
    x: &CountVector,
    d: u16,
    trunc: usize,
    limits: EnumLimits,
) -> Result<Vec<ReversedMove>, WordError> {
    let mut moves = Vec::new();
    for (class, count) in x.iter() {
        if count == 0 {
            continue;
        }
        let mut by_target: std::collections::BTreeMap<WordClass, u64> = Default::default();
        for target in halvings(class) {
            *by_target.entry(target).or_insert(0) += 1;
        }
        for (target, b) in by_target {
            moves.push(ReversedMove::Shrink {
                from: class.clone(),
                to: target,
                rate: b as f64 * count as f64,
            });
        }
        let death = (class.len() as u32 - class.c()) as f64 * count as f64;
        if death > 0.0 {
            moves.push(ReversedMove::Death { from: class.clone(), rate: death });
        }
    }
    for class in enumerate_classes(d, trunc, limits)? {
        let rate = trunc as f64 / class.h() as f64;
        moves.push(ReversedMove::Create { class, rate });
    }
    Ok(moves)
}

/// The `(d+1)` vs `d` increment process: word-level dynamics restricted to
/// classes that use generator `d+1`, whose immigration aggregates to
/// `ν(d,k)` per length. Independent of the level-`d` process because the
/// word sets are disjoint.
pub fn simulate_increment_process(
    d: u16,
    cap: usize,
    trunc: usize,
    horizon: f64,
    seed: ReplicaSeed,
    limits: EnumLimits,
) -> Result<CyclePath, LimitError> {
    let sys = std::sync::Arc::new(WordSystem::increment(d, cap, limits)?);
    simulate(&sys, trunc, horizon, seed, InitMode::Stationary)
}

/// Length process of the full level-`d` dynamics: immigration `μ_d(k)`,
/// stationary means `a(d,k)/2k`.
pub fn length_process(d: u64, cap: usize, trunc: usize) -> Result<LengthProcess, WordError> {
    let to_f = |r: crate::words::Rational| *r.numer() as f64 / *r.denom() as f64;
    let immigration = (1..=cap).map(|k| mu_k(d, k as u32).map(to_f)).collect::<Result<_, _>>()?;
    let init_means =
        (1..=cap).map(|k| stationary_mean_k(d, k as u32).map(to_f)).collect::<Result<_, _>>()?;
    Ok(LengthProcess { cap, trunc, immigration, init_means })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn class(s: &str) -> WordClass {
        WordClass::parse(s).unwrap()
    }

    fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn yule_occupancy_formula() {
        assert_eq!(expec_alpha(3, 3, 0.0).unwrap(), 1.0);
        let v = expec_alpha(1, 2, 2f64.ln()).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        assert!(matches!(expec_alpha(3, 2, 1.0), Err(LimitError::BadOccupancyPair { .. })));
        // Occupancies sum to one.
        for (j, delta) in [(1u32, 1.0), (2, 0.5), (3, 0.7)] {
            let mut total = 0.0;
            for k in j..200 {
                total += expec_alpha(j, k, delta).unwrap();
            }
            assert!((total - 1.0).abs() < 1e-10, "j={j} delta={delta}");
        }
    }

    #[test]
    fn covariance_formula_examples() {
        // Same time, same length: the stationary variance a(d,k)/2k.
        let v = cov_formula(&CovSpec { d: 2, j: 2, k: 2, s: 1.0, t: 1.0 });
        assert!((v - 3.0).abs() < 1e-12);
        // The spot value at lag ln 2.
        let v = cov_formula(&CovSpec { d: 2, j: 1, k: 2, s: 0.0, t: 2f64.ln() });
        assert!((v - 0.5).abs() < 1e-12);
        // Shorter later than longer: independent.
        let v = cov_formula(&CovSpec { d: 2, j: 3, k: 2, s: 0.0, t: 1.0 });
        assert_eq!(v, 0.0);
    }

    #[test]
    fn ou_covariance_examples() {
        assert_eq!(ou_covariance(2, 2, 1.0, 1.0), 1.0);
        let v = ou_covariance(2, 2, 0.0, 2f64.ln());
        assert!((v - 0.25).abs() < 1e-12);
        assert_eq!(ou_covariance(1, 2, 0.0, 1.0), 0.0);
    }

    #[test]
    fn prelimit_chebyshev_diagonal_approaches_half_k() {
        for k in 1..=3u32 {
            let mut prev_err = f64::INFINITY;
            for d in [5u64, 20, 50, 200] {
                let v = chebyshev_trace_cov(d, k, k, 1.0, 1.0);
                let err = (v - k as f64 / 2.0).abs();
                assert!(err < prev_err, "error should shrink with d");
                prev_err = err;
            }
            let v50 = chebyshev_trace_cov(50, k, k, 1.0, 1.0);
            assert!((v50 - k as f64 / 2.0).abs() / (k as f64 / 2.0) < 0.05);
        }
    }

    #[test]
    fn stationary_init_means() {
        let limits = EnumLimits::default();
        let sys = WordSystem::new(1, 1, limits).unwrap();
        let reps = 20_000;
        let mut counts = Vec::with_capacity(reps);
        for r in 0..reps {
            let init = sample_stationary_init(&sys, ReplicaSeed::new(404, r as u64));
            counts.push(init.len() as f64);
        }
        let (mean, se) = mean_and_stderr(&counts);
        assert!((mean - 1.0).abs() < 3.0 * se, "Poisson(1) loop count: {mean} ± {se}");
    }

    #[test]
    fn doubled_two_cycles_never_immigrate() {
        let sys = Arc::new(WordSystem::new(2, 2, EnumLimits::default()).unwrap());
        for r in 0..200 {
            let path =
                simulate(&sys, 2, 3.0, ReplicaSeed::new(17, r), InitMode::Atoms(&[])).unwrap();
            for atom in path.atoms() {
                assert!(atom.immigrant);
                let born = path.system().info(atom.visits[0].1).class.clone();
                assert_ne!(born, class("1 1"));
                assert_ne!(born, class("2 2"));
            }
        }
    }

    #[test]
    fn single_generator_dynamics() {
        // d=1: only the loop class immigrates, at rate one; lengths then
        // grow as a pure Yule process.
        let sys = Arc::new(WordSystem::new(1, 6, EnumLimits::default()).unwrap());
        let horizon = 2.0;
        let mut arrivals = Vec::new();
        for r in 0..4000 {
            let path =
                simulate(&sys, 6, horizon, ReplicaSeed::new(93, r), InitMode::Atoms(&[])).unwrap();
            arrivals
                .push(path.atoms().iter().filter(|a| a.immigrant).count() as f64);
            for atom in path.atoms() {
                assert_eq!(path.system().info(atom.visits[0].1).len, 1);
            }
        }
        let (mean, se) = mean_and_stderr(&arrivals);
        assert!((mean - horizon).abs() < 3.0 * se, "Poisson({horizon}) arrivals: {mean} ± {se}");
    }

    #[test]
    fn stationary_marginals_stay_poisson() {
        // Means and variances of N_w(t) stay at 1/h(w) under the dynamics.
        let sys = Arc::new(WordSystem::new(2, 3, EnumLimits::default()).unwrap());
        let reps: usize = 20_000;
        let t = 0.8;
        let mut per_class: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); sys.len()];
        for r in 0..reps {
            let path =
                simulate(&sys, 3, t, ReplicaSeed::new(7654, r as u64), InitMode::Stationary)
                    .unwrap();
            for (i, n) in path.counts_ids_at(t).unwrap().into_iter().enumerate() {
                per_class[i].push(n as f64);
            }
        }
        for (i, samples) in per_class.iter().enumerate() {
            let info = &sys.classes()[i];
            let (mean, se) = mean_and_stderr(samples);
            assert!(
                (mean - info.mean).abs() < 4.0 * se,
                "[{}] mean {mean} vs {} ± {se}",
                info.class,
                info.mean
            );
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / (samples.len() - 1) as f64;
            let se_var = (2.0 / samples.len() as f64).sqrt() * info.mean.max(0.3);
            assert!(
                (var - info.mean).abs() < 5.0 * se_var,
                "[{}] var {var} vs {}",
                info.class,
                info.mean
            );
        }
    }

    #[test]
    fn aggregate_counts_and_horizon_guard() {
        let sys = Arc::new(WordSystem::new(2, 3, EnumLimits::default()).unwrap());
        let path = simulate(&sys, 3, 1.0, ReplicaSeed::new(1, 1), InitMode::Atoms(&[])).unwrap();
        assert!(path.aggregate_k(1.5).is_err());
        let empty = simulate(&sys, 3, 0.0, ReplicaSeed::new(1, 2), InitMode::Atoms(&[])).unwrap();
        assert_eq!(empty.aggregate_k(0.0).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn aggregate_means_match_closed_form() {
        let sys = Arc::new(WordSystem::new(2, 3, EnumLimits::default()).unwrap());
        let reps = 20_000usize;
        let mut sums = vec![Vec::with_capacity(reps); 3];
        for r in 0..reps {
            let path = simulate(&sys, 3, 0.5, ReplicaSeed::new(2222, r as u64), InitMode::Stationary)
                .unwrap();
            for (i, n) in path.aggregate_k(0.5).unwrap().into_iter().enumerate() {
                sums[i].push(n as f64);
            }
        }
        for (i, expect) in [(0usize, 2.0), (1, 3.0), (2, 14.0 / 3.0)] {
            let (mean, se) = mean_and_stderr(&sums[i]);
            assert!((mean - expect).abs() < 3.5 * se, "k={}: {mean} vs {expect}", i + 1);
        }
    }

    #[test]
    fn reversed_rate_table_examples() {
        let limits = EnumLimits::default();
        // One doubled 2-cycle: shrinks to the loop at rate 2, never dies.
        let x: CountVector = [(class("1 1"), 1u64)].into_iter().collect();
        let moves = reversed_rates(&x, 2, 3, limits).unwrap();
        let shrinks: Vec<_> = moves
            .iter()
            .filter(|m| matches!(m, ReversedMove::Shrink { .. }))
            .collect();
        assert_eq!(shrinks.len(), 1);
        assert_eq!(
            shrinks[0],
            &ReversedMove::Shrink { from: class("1 1"), to: class("1"), rate: 2.0 }
        );
        assert!(!moves.iter().any(
            |m| matches!(m, ReversedMove::Death { from, .. } if *from == class("1 1"))
        ));

        // A primitive 2-cycle only dies, at rate k - c = 2.
        let x: CountVector = [(class("1 2"), 1u64)].into_iter().collect();
        let moves = reversed_rates(&x, 2, 3, limits).unwrap();
        assert!(moves
            .iter()
            .any(|m| *m == ReversedMove::Death { from: class("1 2"), rate: 2.0 }));
        assert!(!moves.iter().any(|m| matches!(m, ReversedMove::Shrink { .. })));

        // Empty state: only creations, at the top layer, at rate L/h(w).
        let moves = reversed_rates(&CountVector::new(), 2, 3, limits).unwrap();
        assert!(moves.iter().all(|m| matches!(m, ReversedMove::Create { .. })));
        let total: f64 = moves.iter().map(|m| m.rate()).sum();
        // Σ L/h over the layer = L a(d,L)/2L = a(d,L)/2.
        assert!((total - 14.0).abs() < 1e-12);
    }

    #[test]
    fn increment_process_rates() {
        // d=1 -> 2 at length 1: immigration rate ν(1,1) = 1.
        let mut arrivals = Vec::new();
        let horizon = 1.5;
        for r in 0..4000 {
            let path = simulate_increment_process(
                1,
                1,
                1,
                horizon,
                ReplicaSeed::new(31337, r),
                EnumLimits::default(),
            )
            .unwrap();
            arrivals.push(path.atoms().iter().filter(|a| a.immigrant).count() as f64);
        }
        let (mean, se) = mean_and_stderr(&arrivals);
        assert!((mean - horizon).abs() < 3.0 * se, "{mean} vs {horizon}");
    }

    #[test]
    fn length_engine_matches_word_level_law() {
        // Stationary means of N_k agree between the two engines.
        let proc = length_process(2, 3, 3).unwrap();
        let reps = 20_000;
        let mut samples = vec![Vec::with_capacity(reps); 3];
        for r in 0..reps {
            let path = simulate_lengths(&proc, 0.6, ReplicaSeed::new(515, r as u64), true).unwrap();
            for (i, n) in path.counts_at(0.6).unwrap().into_iter().enumerate() {
                samples[i].push(n as f64);
            }
        }
        for (i, expect) in [(0usize, 2.0), (1, 3.0), (2, 14.0 / 3.0)] {
            let (mean, se) = mean_and_stderr(&samples[i]);
            assert!((mean - expect).abs() < 3.5 * se, "k={}: {mean} vs {expect}", i + 1);
        }
    }

    #[test]
    fn generator_at_a_fixed_state() {
        // (E f(X_δ) - f(x0))/δ matches the generator exactly for coordinate
        // functions. x0 = one loop π_1 plus one 2-cycle π_1π_2.
        let sys = Arc::new(WordSystem::new(2, 2, EnumLimits::default()).unwrap());
        let x0 = [
            ImmigrationAtom { class: class("1"), birth_time: 0.0 },
            ImmigrationAtom { class: class("1 2"), birth_time: 0.0 },
        ];
        let id_loop = sys.id_of(&class("1")).unwrap();
        let id_12 = sys.id_of(&class("1 2")).unwrap();
        let id_11 = sys.id_of(&class("1 1")).unwrap();
        let delta = 0.01;
        let reps = 400_000u64;
        let mut sum = vec![0.0f64; sys.len()];
        for r in 0..reps {
            let path =
                simulate(&sys, 2, delta, ReplicaSeed::new(8712, r), InitMode::Atoms(&x0)).unwrap();
            for (i, n) in path.counts_ids_at(delta).unwrap().into_iter().enumerate() {
                sum[i] += n as f64;
            }
        }
        let x_at = |id: ClassId| if id == id_loop || id == id_12 { 1.0 } else { 0.0 };
        for id in 0..sys.len() as ClassId {
            let info = sys.info(id);
            // L x_w = Σ_u a(u,w) x_u + μ(w) - |w| x_w.
            let inflow: f64 = (0..sys.len() as ClassId)
                .map(|u| {
                    let t = sys.info(u).targets.iter().filter(|t| **t == Some(id)).count();
                    t as f64 * x_at(u)
                })
                .sum();
            let lf = inflow + info.mu - info.len as f64 * x_at(id);
            let emp = (sum[id as usize] / reps as f64 - x_at(id)) / delta;
            // Monte Carlo error of order sqrt(rate/(δ reps)).
            let se = (3.0 / (delta * reps as f64)).sqrt();
            assert!(
                (emp - lf).abs() < 4.0 * se,
                "[{}]: empirical {emp} vs generator {lf} ± {se}",
                info.class
            );
        }
        let _ = id_11;
    }
}
