//! Machine- and human-readable report types shared by the validation
//! harness and the command-line front end.
//!
//! Every Monte Carlo assertion is a three-sigma gate carrying the full
//! `(statistic, formula, estimate, stderr)` quadruple, and every report
//! embeds the crate version, the master seed, and a hash of the
//! configuration that produced it.

use serde::{Deserialize, Serialize};

/// Outcome of one statistical gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Gate {
    /// What was measured, e.g. `cov(N_2(t), N_1(s)) @ dt=0.25`.
    pub statistic: String,
    /// Closed-form target value.
    pub formula: f64,
    /// Monte Carlo estimate.
    pub estimate: f64,
    /// Standard error of the estimate (0 for exact checks).
    pub stderr: f64,
    /// Number of replicas behind the estimate.
    pub replicas: u64,
    pub pass: bool,
}

impl Gate {
    /// Three-sigma gate: passes when `|estimate - formula| <= 3 stderr`.
    pub fn three_sigma(statistic: impl Into<String>, formula: f64, estimate: f64, stderr: f64, replicas: u64) -> Gate {
        let pass = (estimate - formula).abs() <= 3.0 * stderr;
        Gate { statistic: statistic.into(), formula, estimate, stderr, replicas, pass }
    }

    /// Gate on a p-value: passes when `p > threshold`.
    pub fn p_value(statistic: impl Into<String>, p: f64, threshold: f64, replicas: u64) -> Gate {
        Gate {
            statistic: statistic.into(),
            formula: threshold,
            estimate: p,
            stderr: 0.0,
            replicas,
            pass: p > threshold,
        }
    }

    /// Exact pass/fail check with recorded values.
    pub fn exact(statistic: impl Into<String>, formula: f64, estimate: f64, pass: bool) -> Gate {
        Gate { statistic: statistic.into(), formula, estimate, stderr: 0.0, replicas: 0, pass }
    }

    pub fn z_score(&self) -> f64 {
        if self.stderr > 0.0 {
            (self.estimate - self.formula) / self.stderr
        } else {
            0.0
        }
    }
}

/// A bundle of gates plus the provenance needed to reproduce them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub gates: Vec<Gate>,
}

impl Report {
    pub fn new(title: impl Into<String>, seed: u64, config_hash: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash: config_hash.into(),
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn all_pass(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Aligned-column rendering for terminals.
    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "# {} (v{}, seed {}, config {})", self.title, self.version, self.seed, self.config_hash).unwrap();
        let name_w = self.gates.iter().map(|g| g.statistic.len()).max().unwrap_or(9).max(9);
        writeln!(
            out,
            "{:name_w$}  {:>14}  {:>14}  {:>12}  {:>8}  {:>9}  {}",
            "statistic", "formula", "estimate", "stderr", "z", "replicas", "status"
        )
        .unwrap();
        for g in &self.gates {
            writeln!(
                out,
                "{:name_w$}  {:>14.8}  {:>14.8}  {:>12.3e}  {:>8.2}  {:>9}  {}",
                g.statistic,
                g.formula,
                g.estimate,
                g.stderr,
                g.z_score(),
                g.replicas,
                if g.pass { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
        let failed = self.gates.iter().filter(|g| !g.pass).count();
        writeln!(out, "-- {} gates, {} failed", self.gates.len(), failed).unwrap();
        out
    }
}
