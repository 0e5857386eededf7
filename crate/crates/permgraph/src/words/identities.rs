//! Exact identity checks on the word combinatorics.
//!
//! These are the machine-checkable counterparts of the structural facts the
//! limit process rests on: the orbit-size law, the doubling/halving ratio
//! `a/h(u) = b/h(w)`, the doubling-sum vector identity, the aggregate
//! immigration-rate identity, and the stationary-mean identity. Everything
//! here is exact rational arithmetic; any failure is reported with the
//! offending classes and both sides of the identity.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{
    a_count, count_multiset, doublings, enumerate_classes, enumerate_classes_upto, halvings,
    mu_weight, stationary_mean, EnumLimits, Rational, WordClass, WordError,
};

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error(transparent)]
    Words(#[from] WordError),
    #[error("orbit size of [{class}] is {actual}, expected 2k/h = {expected}")]
    OrbitSize { class: WordClass, actual: usize, expected: usize },
    #[error("orbit sizes over d={d}, k={k} sum to {sum}, expected a(d,k) = {expected}")]
    OrbitTotal { d: u16, k: usize, sum: u128, expected: u128 },
    #[error("doubling/halving ratio fails for u=[{u}], w=[{w}]: a={a}, b={b}, h(u)={hu}, h(w)={hw}")]
    DoubleHalveRatio { u: WordClass, w: WordClass, a: u64, b: u64, hu: u32, hw: u32 },
    #[error("doubling-sum identity fails at [{class}]: lhs {lhs}, rhs {rhs}")]
    DoublingSum { class: WordClass, lhs: Rational, rhs: Rational },
    #[error("immigration rate at d={d}, k={k}: sum of mu(w) is {sum}, expected {expected}")]
    ImmigrationRate { d: u16, k: usize, sum: Rational, expected: Rational },
    #[error("stationary mean at d={d}, k={k}: sum of 1/h(w) is {sum}, expected {expected}")]
    StationaryMean { d: u16, k: usize, sum: Rational, expected: Rational },
}

/// Orbit-size law: every class of length `k` has exactly `2k/h(w)` orbit
/// members, and the orbit sizes sum to `a(d,k)`.
pub fn check_orbit_sizes(d: u16, k: usize, limits: EnumLimits) -> Result<(), IdentityError> {
    let classes = enumerate_classes(d, k, limits)?;
    let mut total: u128 = 0;
    for cl in &classes {
        let word = cl.canonical();
        let mut orbit = std::collections::HashSet::new();
        for r in 0..k {
            orbit.insert(word.rotated(r).letters().to_vec());
            orbit.insert(word.rotated(r).inverse().letters().to_vec());
        }
        if orbit.len() != cl.orbit_size() {
            return Err(IdentityError::OrbitSize {
                class: cl.clone(),
                actual: orbit.len(),
                expected: cl.orbit_size(),
            });
        }
        total += orbit.len() as u128;
    }
    let expected = a_count(d as u64, k as u32)?;
    if total != expected {
        return Err(IdentityError::OrbitTotal { d, k, sum: total, expected });
    }
    Ok(())
}

/// Doubling/halving ratio: for every adjacent pair of classes `|w| = |u|+1`
/// with `a` doublings of `u` reaching `w` and `b` halvings of `w` reaching
/// `u`, checks `a·h(w) = b·h(u)` (the cross-multiplied form of
/// `a/h(u) = b/h(w)`), including that `a = 0` forces `b = 0`.
pub fn check_double_halve_ratio(
    d: u16,
    k_max: usize,
    limits: EnumLimits,
) -> Result<(), IdentityError> {
    for k in 2..=k_max {
        let shorter = enumerate_classes(d, k - 1, limits)?;
        let longer = enumerate_classes(d, k, limits)?;

        // (u, w) -> (a, b), built from both move directions.
        let mut edges: BTreeMap<(WordClass, WordClass), (u64, u64)> = BTreeMap::new();
        for u in &shorter {
            for (w, a) in count_multiset(doublings(u)) {
                edges.entry((u.clone(), w)).or_insert((0, 0)).0 = a;
            }
        }
        for w in &longer {
            for (u, b) in count_multiset(halvings(w)) {
                edges.entry((u, w.clone())).or_insert((0, 0)).1 = b;
            }
        }
        for ((u, w), (a, b)) in edges {
            if a * w.h() as u64 != b * u.h() as u64 {
                return Err(IdentityError::DoubleHalveRatio {
                    a,
                    b,
                    hu: u.h(),
                    hw: w.h(),
                    u,
                    w,
                });
            }
        }
    }
    Ok(())
}

/// Doubling-sum vector identity over `W'_K`: summing `1/h(u)` over all
/// doublings of all classes shorter than `K` gives the coefficient vector
/// `c(w)/h(w)`.
pub fn check_doubling_sum_identity(
    d: u16,
    k_max: usize,
    limits: EnumLimits,
) -> Result<(), IdentityError> {
    let mut lhs: BTreeMap<WordClass, Rational> = BTreeMap::new();
    for u in enumerate_classes_upto(d, k_max - 1, limits)? {
        let weight = stationary_mean(&u);
        for target in doublings(&u) {
            *lhs.entry(target).or_insert_with(|| Rational::new(0, 1)) += weight;
        }
    }
    for w in enumerate_classes_upto(d, k_max, limits)? {
        let rhs = Rational::new(w.c() as i128, w.h() as i128);
        let got = lhs.remove(&w).unwrap_or_else(|| Rational::new(0, 1));
        if got != rhs {
            return Err(IdentityError::DoublingSum { class: w, lhs: got, rhs });
        }
    }
    debug_assert!(lhs.is_empty());
    Ok(())
}

/// Immigration-rate identity: `Σ_{|w|=k} μ(w) = [a(d,k) - a(d,k-1)]/2`.
pub fn check_immigration_rate(d: u16, k: usize, limits: EnumLimits) -> Result<(), IdentityError> {
    let sum: Rational = enumerate_classes(d, k, limits)?.iter().map(mu_weight).sum();
    let expected = super::mu_k(d as u64, k as u32)?;
    if sum != expected {
        return Err(IdentityError::ImmigrationRate { d, k, sum, expected });
    }
    Ok(())
}

/// Stationary-mean identity: `Σ_{|w|=k} 1/h(w) = a(d,k)/2k`.
pub fn check_stationary_mean(d: u16, k: usize, limits: EnumLimits) -> Result<(), IdentityError> {
    let sum: Rational = enumerate_classes(d, k, limits)?.iter().map(stationary_mean).sum();
    let expected = super::stationary_mean_k(d as u64, k as u32)?;
    if sum != expected {
        return Err(IdentityError::StationaryMean { d, k, sum, expected });
    }
    Ok(())
}

/// Runs every identity check for alphabet `d` up to length `k_max`.
pub fn check_all(d: u16, k_max: usize, limits: EnumLimits) -> Result<(), IdentityError> {
    for k in 1..=k_max {
        check_orbit_sizes(d, k, limits)?;
        check_immigration_rate(d, k, limits)?;
        check_stationary_mean(d, k, limits)?;
    }
    check_double_halve_ratio(d, k_max, limits)?;
    check_doubling_sum_identity(d, k_max, limits)?;
    Ok(())
}
