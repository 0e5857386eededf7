//! Precomputed class tables for the word-level Markov dynamics.
//!
//! A `WordSystem` fixes an alphabet size and a length cap and resolves, once,
//! every class up to the cap together with its immigration rate, stationary
//! mean, and doubling transition targets. Simulations then run on dense
//! integer ids. Chains only ever grow, so a system capped at `K` simulates
//! the restriction of the full process to words of length at most `K`
//! exactly; the cap is an observation window, not an approximation.

use std::collections::HashMap;
use std::ops::Range;

use crate::words::{
    double, enumerate_classes, mu_weight, stationary_mean, EnumLimits, WordClass, WordError,
};

pub type ClassId = u32;

#[derive(Clone, Debug)]
pub struct ClassInfo {
    pub class: WordClass,
    pub len: u32,
    pub h: u32,
    pub c: u32,
    /// Immigration rate `μ(w) = (|w| - c)/h`.
    pub mu: f64,
    /// Stationary mean `1/h(w)`.
    pub mean: f64,
    /// Doubling target per letter position of the canonical representative;
    /// `None` when the target length exceeds the table cap.
    pub targets: Vec<Option<ClassId>>,
}

#[derive(Debug)]
pub struct WordSystem {
    d: u16,
    cap: usize,
    classes: Vec<ClassInfo>,
    index: HashMap<WordClass, ClassId>,
    len_ranges: Vec<Range<usize>>,
}

impl WordSystem {
    /// Full table of all classes with length `1..=cap` over `d` generators.
    pub fn new(d: u16, cap: usize, limits: EnumLimits) -> Result<Self, WordError> {
        let mut all = Vec::new();
        for k in 1..=cap {
            all.push(enumerate_classes(d, k, limits)?);
        }
        Self::build(d, cap, all)
    }

    /// Table for the `(d+1) vs d` increment dynamics: all classes over
    /// `d+1` generators that use generator `d+1` at least once. Doubling
    /// repeats letters, so the set is closed under the dynamics and its
    /// immigration rates aggregate to `ν(d, k)` per length.
    pub fn increment(d: u16, cap: usize, limits: EnumLimits) -> Result<Self, WordError> {
        let mut all = Vec::new();
        for k in 1..=cap {
            let layer: Vec<WordClass> = enumerate_classes(d + 1, k, limits)?
                .into_iter()
                .filter(|cl| cl.canonical().max_generator() == d + 1)
                .collect();
            all.push(layer);
        }
        Self::build(d + 1, cap, all)
    }

    fn build(d: u16, cap: usize, layers: Vec<Vec<WordClass>>) -> Result<Self, WordError> {
        assert!(cap >= 1);
        let mut classes = Vec::new();
        let mut index = HashMap::new();
        let mut len_ranges = Vec::with_capacity(cap);
        for layer in &layers {
            let start = classes.len();
            for cl in layer {
                index.insert(cl.clone(), classes.len() as ClassId);
                classes.push(ClassInfo {
                    len: cl.len() as u32,
                    h: cl.h(),
                    c: cl.c(),
                    mu: rat_to_f64(mu_weight(cl)),
                    mean: rat_to_f64(stationary_mean(cl)),
                    targets: Vec::new(),
                    class: cl.clone(),
                });
            }
            len_ranges.push(start..classes.len());
        }
        // Resolve doubling targets now that ids are fixed.
        for i in 0..classes.len() {
            let cl = classes[i].class.clone();
            let k = cl.len();
            let targets: Vec<Option<ClassId>> = (1..=k)
                .map(|pos| {
                    if k + 1 > cap {
                        None
                    } else {
                        let t = double(&cl, pos).expect("position in range");
                        Some(*index.get(&t).unwrap_or_else(|| {
                            panic!("doubling target {t} missing from table")
                        }))
                    }
                })
                .collect();
            classes[i].targets = targets;
        }
        Ok(WordSystem { d, cap, classes, index, len_ranges })
    }

    pub fn d(&self) -> u16 {
        self.d
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn info(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id as usize]
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn id_of(&self, class: &WordClass) -> Option<ClassId> {
        self.index.get(class).copied()
    }

    /// Ids of all classes of one length.
    pub fn layer(&self, k: usize) -> Range<usize> {
        if k >= 1 && k <= self.cap {
            self.len_ranges[k - 1].clone()
        } else {
            0..0
        }
    }

    /// Total immigration rate over the table.
    pub fn total_mu(&self) -> f64 {
        self.classes.iter().map(|c| c.mu).sum()
    }
}

fn rat_to_f64(r: crate::words::Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
