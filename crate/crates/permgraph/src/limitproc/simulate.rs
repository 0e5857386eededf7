//! Event-driven simulation of the limiting cycle process.
//!
//! Immigration atoms arrive per class as independent Poisson streams with
//! rate `μ(w)`; the stationary start adds Poisson(`1/h(w)`) atoms at time
//! zero. Each atom then runs an independent word chain that doubles one of
//! its `k` letters at total rate `k`. Chains are killed, not reflected, when
//! they outgrow the truncation; since lengths never shrink, a path capped at
//! `K < L` still has the exact law of the full process restricted to words
//! of length at most `K`.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::counts::CountVector;
use crate::seed::sub_rng;
use crate::words::WordClass;
use crate::KahanSum;

use super::system::{ClassId, WordSystem};
use super::LimitError;

/// Stream indices within a replica: class streams first, chain streams in a
/// far-away block keyed by (class, per-class atom ordinal).
const CLASS_STREAM_BASE: u64 = 1;
const CHAIN_STREAM_BASE: u64 = 1 << 48;
const CHAIN_STRIDE: u64 = 1 << 24;

/// Identifies one replica of one seeded experiment.
#[derive(Clone, Copy, Debug)]
pub struct ReplicaSeed {
    pub master: u64,
    pub replica: u64,
}

impl ReplicaSeed {
    pub fn new(master: u64, replica: u64) -> Self {
        ReplicaSeed { master, replica }
    }

    fn class_stream(&self, class: ClassId) -> ChaCha12Rng {
        sub_rng(self.master, self.replica, CLASS_STREAM_BASE + class as u64)
    }

    fn chain_stream(&self, class: ClassId, ordinal: u64) -> ChaCha12Rng {
        sub_rng(
            self.master,
            self.replica,
            CHAIN_STREAM_BASE + class as u64 * CHAIN_STRIDE + ordinal,
        )
    }
}

/// A spontaneous (or initial) cycle: the word it starts from and its birth
/// time; 0 marks atoms of the stationary initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmigrationAtom {
    pub class: WordClass,
    pub birth_time: f64,
}

/// One atom's trajectory through the class table.
#[derive(Clone, Debug)]
pub struct AtomTrail {
    pub birth: f64,
    /// True when the atom arrived after time zero (spontaneous formation).
    pub immigrant: bool,
    /// `(enter_time, class)` segments, starting at the birth state.
    pub visits: Vec<(f64, ClassId)>,
    /// Time the chain left the observable window, if it did.
    pub left_at: Option<f64>,
    /// Whether leaving the window was a genuine kill (length exceeded the
    /// truncation L, not merely the table cap).
    pub killed: bool,
}

impl AtomTrail {
    /// Class occupied at time `t`, if the atom is alive and observable.
    fn class_at(&self, t: f64) -> Option<ClassId> {
        if t < self.birth {
            return None;
        }
        if let Some(gone) = self.left_at {
            if t >= gone {
                return None;
            }
        }
        let idx = self.visits.partition_point(|&(s, _)| s <= t);
        Some(self.visits[idx - 1].1)
    }
}

/// A realized trajectory of the limiting process up to a horizon.
#[derive(Debug)]
pub struct CyclePath {
    system: Arc<WordSystem>,
    trunc: usize,
    horizon: f64,
    atoms: Vec<AtomTrail>,
}

impl CyclePath {
    pub fn system(&self) -> &Arc<WordSystem> {
        &self.system
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Truncation L: chains are killed above this length.
    pub fn truncation(&self) -> usize {
        self.trunc
    }

    /// Largest word length the path observes (the table cap).
    pub fn observe_cap(&self) -> usize {
        self.system.cap()
    }

    pub fn atoms(&self) -> &[AtomTrail] {
        &self.atoms
    }

    fn check_time(&self, t: f64) -> Result<(), LimitError> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(LimitError::BeyondHorizon { t, horizon: self.horizon });
        }
        Ok(())
    }

    /// Occupation counts per class id at time `t`.
    pub fn counts_ids_at(&self, t: f64) -> Result<Vec<u64>, LimitError> {
        self.check_time(t)?;
        let mut counts = vec![0u64; self.system.len()];
        for atom in &self.atoms {
            if let Some(c) = atom.class_at(t) {
                counts[c as usize] += 1;
            }
        }
        Ok(counts)
    }

    /// `N_w(t)` as a count vector over word classes.
    pub fn counts_at(&self, t: f64) -> Result<CountVector, LimitError> {
        let ids = self.counts_ids_at(t)?;
        Ok(ids
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(i, n)| (self.system.info(i as ClassId).class.clone(), n))
            .collect())
    }

    /// Length totals `N_k(t)` for `k = 1..=observe_cap` (index `k-1`).
    pub fn aggregate_k(&self, t: f64) -> Result<Vec<u64>, LimitError> {
        let ids = self.counts_ids_at(t)?;
        let mut by_k = vec![0u64; self.system.cap()];
        for (i, n) in ids.into_iter().enumerate() {
            by_k[self.system.info(i as ClassId).len as usize - 1] += n;
        }
        Ok(by_k)
    }

    /// All jump times (births, doublings, departures), sorted.
    pub fn jump_times(&self) -> Vec<f64> {
        let mut times = Vec::new();
        for atom in &self.atoms {
            for &(t, _) in &atom.visits {
                if t > 0.0 {
                    times.push(t);
                }
            }
            if let Some(t) = atom.left_at {
                times.push(t);
            }
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times
    }
}

/// Initial condition for a simulation run.
#[derive(Clone, Copy, Debug)]
pub enum InitMode<'a> {
    /// Poisson(`1/h(w)`) atoms per class at time zero: the stationary start.
    Stationary,
    /// Explicit atom list (may be empty).
    Atoms(&'a [ImmigrationAtom]),
}

/// Draws the stationary initial condition: independent Poisson(`1/h(w)`)
/// atoms at time zero for every class of length at most `sys.cap()`.
pub fn sample_stationary_init(sys: &WordSystem, seed: ReplicaSeed) -> Vec<ImmigrationAtom> {
    let mut out = Vec::new();
    for id in 0..sys.len() as ClassId {
        let mut stream = seed.class_stream(id);
        let n = poisson_draw(&mut stream, sys.info(id).mean);
        for _ in 0..n {
            out.push(ImmigrationAtom { class: sys.info(id).class.clone(), birth_time: 0.0 });
        }
    }
    out
}

fn poisson_draw(rng: &mut impl Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Exact event-driven simulation over `[0, horizon]`.
///
/// `trunc` is the truncation L; the table cap of `sys` may sit at or below
/// it when only shorter words will be read out. Per-class immigration uses
/// independent seeded streams, so any class's arrivals are reproducible in
/// isolation.
pub fn simulate(
    sys: &Arc<WordSystem>,
    trunc: usize,
    horizon: f64,
    seed: ReplicaSeed,
    init: InitMode<'_>,
) -> Result<CyclePath, LimitError> {
    if sys.cap() > trunc {
        return Err(LimitError::CapAboveTruncation { cap: sys.cap(), trunc });
    }
    if horizon < 0.0 {
        return Err(LimitError::NegativeHorizon { horizon });
    }
    let mut atoms = Vec::new();
    let mut ordinals = vec![0u64; sys.len()];

    match init {
        InitMode::Stationary => {
            for id in 0..sys.len() as ClassId {
                let mut stream = seed.class_stream(id);
                let n = poisson_draw(&mut stream, sys.info(id).mean);
                for _ in 0..n {
                    atoms.push(spawn(sys, trunc, seed, id, 0.0, false, &mut ordinals, horizon));
                }
                // Immigration arrivals continue on the same class stream.
                push_arrivals(sys, trunc, seed, id, horizon, &mut stream, &mut ordinals, &mut atoms);
            }
        }
        InitMode::Atoms(list) => {
            for atom in list {
                let id = sys
                    .id_of(&atom.class)
                    .ok_or_else(|| LimitError::UnknownClass { class: atom.class.clone() })?;
                if atom.birth_time < 0.0 || atom.birth_time > horizon {
                    return Err(LimitError::BeyondHorizon { t: atom.birth_time, horizon });
                }
                atoms.push(spawn(
                    sys,
                    trunc,
                    seed,
                    id,
                    atom.birth_time,
                    false,
                    &mut ordinals,
                    horizon,
                ));
            }
            for id in 0..sys.len() as ClassId {
                let mut stream = seed.class_stream(id);
                push_arrivals(sys, trunc, seed, id, horizon, &mut stream, &mut ordinals, &mut atoms);
            }
        }
    }
    Ok(CyclePath { system: Arc::clone(sys), trunc, horizon, atoms })
}

#[allow(clippy::too_many_arguments)]
fn push_arrivals(
    sys: &Arc<WordSystem>,
    trunc: usize,
    seed: ReplicaSeed,
    id: ClassId,
    horizon: f64,
    stream: &mut ChaCha12Rng,
    ordinals: &mut [u64],
    atoms: &mut Vec<AtomTrail>,
) {
    let mu = sys.info(id).mu;
    if mu <= 0.0 {
        return;
    }
    let gap = Exp::new(mu).expect("positive rate");
    let mut t = KahanSum::new(0.0);
    loop {
        t.add(gap.sample(stream));
        if t.value() > horizon {
            break;
        }
        atoms.push(spawn(sys, trunc, seed, id, t.value(), true, ordinals, horizon));
    }
}

#[allow(clippy::too_many_arguments)]
fn spawn(
    sys: &Arc<WordSystem>,
    trunc: usize,
    seed: ReplicaSeed,
    id: ClassId,
    birth: f64,
    immigrant: bool,
    ordinals: &mut [u64],
    horizon: f64,
) -> AtomTrail {
    let ordinal = ordinals[id as usize];
    ordinals[id as usize] += 1;
    let mut rng = seed.chain_stream(id, ordinal);
    evolve(sys, trunc, id, birth, immigrant, horizon, &mut rng)
}

fn evolve(
    sys: &WordSystem,
    trunc: usize,
    start: ClassId,
    birth: f64,
    immigrant: bool,
    horizon: f64,
    rng: &mut impl Rng,
) -> AtomTrail {
    let mut visits = vec![(birth, start)];
    let mut clock = KahanSum::new(birth);
    let mut cur = start;
    loop {
        let info = sys.info(cur);
        let k = info.len as usize;
        clock.add(Exp::new(k as f64).expect("positive length").sample(rng));
        if clock.value() > horizon {
            return AtomTrail { birth, immigrant, visits, left_at: None, killed: false };
        }
        let pos = rng.gen_range(0..k);
        match info.targets[pos] {
            Some(next) => {
                visits.push((clock.value(), next));
                cur = next;
            }
            None => {
                let killed = k + 1 > trunc;
                return AtomTrail { birth, immigrant, visits, left_at: Some(clock.value()), killed };
            }
        }
    }
}

/// The length-aggregated engine: one site per length `k`, immigration at a
/// per-length rate, Yule growth `k -> k+1` at rate `k`. This is the exact
/// law of the length totals of the word-level process, and also serves the
/// degree-increment dynamics by swapping in the ν rates.
#[derive(Clone, Debug)]
pub struct LengthProcess {
    /// Observation cap: lengths above this are not tracked.
    pub cap: usize,
    /// Truncation L (kill threshold), at least `cap`.
    pub trunc: usize,
    /// Immigration rate per length, index `k-1`.
    pub immigration: Vec<f64>,
    /// Stationary means per length, index `k-1` (`a(d,k)/2k` for the full
    /// process); used by the stationary start.
    pub init_means: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LengthTrail {
    pub birth: f64,
    pub immigrant: bool,
    pub visits: Vec<(f64, u32)>,
    pub left_at: Option<f64>,
}

/// Trajectory of length totals.
#[derive(Clone, Debug)]
pub struct LengthPath {
    pub cap: usize,
    pub horizon: f64,
    pub atoms: Vec<LengthTrail>,
}

impl LengthPath {
    /// `N_k(t)` for `k = 1..=cap` (index `k-1`).
    pub fn counts_at(&self, t: f64) -> Result<Vec<u64>, LimitError> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(LimitError::BeyondHorizon { t, horizon: self.horizon });
        }
        let mut counts = vec![0u64; self.cap];
        for atom in &self.atoms {
            if t < atom.birth {
                continue;
            }
            if let Some(gone) = atom.left_at {
                if t >= gone {
                    continue;
                }
            }
            let idx = atom.visits.partition_point(|&(s, _)| s <= t);
            counts[atom.visits[idx - 1].1 as usize - 1] += 1;
        }
        Ok(counts)
    }
}

/// Simulates the length process with a stationary start when `stationary`
/// is set, empty otherwise.
pub fn simulate_lengths(
    proc: &LengthProcess,
    horizon: f64,
    seed: ReplicaSeed,
    stationary: bool,
) -> Result<LengthPath, LimitError> {
    if proc.cap > proc.trunc {
        return Err(LimitError::CapAboveTruncation { cap: proc.cap, trunc: proc.trunc });
    }
    if horizon < 0.0 {
        return Err(LimitError::NegativeHorizon { horizon });
    }
    let mut atoms = Vec::new();
    let mut ordinals = vec![0u64; proc.cap];
    for k in 1..=proc.cap {
        let mut stream = seed.class_stream(k as ClassId);
        if stationary {
            let n = poisson_draw(&mut stream, proc.init_means[k - 1]);
            for _ in 0..n {
                atoms.push(evolve_length(proc, k, 0.0, false, horizon, seed, &mut ordinals));
            }
        }
        let mu = proc.immigration[k - 1];
        if mu <= 0.0 {
            continue;
        }
        let gap = Exp::new(mu).expect("positive rate");
        let mut t = KahanSum::new(0.0);
        loop {
            t.add(gap.sample(&mut stream));
            if t.value() > horizon {
                break;
            }
            atoms.push(evolve_length(proc, k, t.value(), true, horizon, seed, &mut ordinals));
        }
    }
    Ok(LengthPath { cap: proc.cap, horizon, atoms })
}

fn evolve_length(
    proc: &LengthProcess,
    start: usize,
    birth: f64,
    immigrant: bool,
    horizon: f64,
    seed: ReplicaSeed,
    ordinals: &mut [u64],
) -> LengthTrail {
    let ordinal = ordinals[start - 1];
    ordinals[start - 1] += 1;
    let mut rng = seed.chain_stream(start as ClassId, ordinal);
    let mut visits = vec![(birth, start as u32)];
    let mut clock = KahanSum::new(birth);
    let mut k = start;
    loop {
        clock.add(Exp::new(k as f64).expect("positive length").sample(&mut rng));
        if clock.value() > horizon {
            return LengthTrail { birth, immigrant, visits, left_at: None };
        }
        if k + 1 > proc.cap {
            return LengthTrail { birth, immigrant, visits, left_at: Some(clock.value()) };
        }
        k += 1;
        visits.push((clock.value(), k as u32));
    }
}
