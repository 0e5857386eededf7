//! Validation harness: exact oracles, Monte Carlo gates, couplings, and
//! total-variation scans.
//!
//! Oracle supremacy rules the module: every distributional claim that can
//! be enumerated at tiny sizes is checked exactly, and only then do seeded
//! Monte Carlo gates take over at scale.

use thiserror::Error;

use crate::graph::GraphError;
use crate::limitproc::LimitError;
use crate::words::WordError;

pub mod chisq;
pub mod compare;
pub mod coupling;
pub mod exact;
pub mod tv;

pub use chisq::{chi_square, poisson_chi_square, ChiSquare};
pub use compare::{
    cov_with_stderr, graph_vs_limit, intertwining_scan, limit_covariance_scan, mean_with_stderr,
    ou_limit_scan, overlap_probability, stationarity_scan, yule_occupancy_scan, CompareConfig,
    CovScanConfig, IntertwiningConfig, OuScanConfig, StationarityConfig, YuleConfig,
};
pub use coupling::{condition_on, rejection_conditioned, sample_conditioned};
pub use exact::{
    classical_cycle_law, exact_class_means, exact_cycle_distribution, falling, ExactJointLaw,
};
pub use tv::{bound_shape, empirical_tv, exact_tv, PoissonReference, TvReport};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error(transparent)]
    Words(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("oracle budget exceeded: (n!)^d with n={n}, d={d} > {budget}")]
    OracleBudget { n: usize, d: usize, budget: u64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: u64, need: u64 },
    #[error("rejection sampling exhausted after {max_tries} tries")]
    RejectionExhausted { max_tries: u64 },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Report;

    #[test]
    fn overlap_probability_degenerate_cases() {
        // A single permutation's cycles are vertex-disjoint.
        let (p, _) = overlap_probability(1, 30, 4, 2_000, 11).unwrap();
        assert_eq!(p, 0.0);
        // r = 0 considers no cycles at all.
        let (p, se) = overlap_probability(2, 30, 0, 2_000, 11).unwrap();
        assert_eq!((p, se), (0.0, 0.0));
        assert!(matches!(
            overlap_probability(2, 30, 2, 10, 11),
            Err(StatsError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn overlap_probability_halves_as_n_doubles() {
        let mut estimates = Vec::new();
        for (i, n) in [60usize, 120, 240].into_iter().enumerate() {
            let (p, se) = overlap_probability(2, n, 2, 60_000, 77 + i as u64).unwrap();
            estimates.push((p, se));
        }
        for w in estimates.windows(2) {
            let (p0, se0) = w[0];
            let (p1, se1) = w[1];
            let ratio = p1 / p0;
            // Successive ratios near 1/2 within generous Monte Carlo error.
            let se = ratio * ((se0 / p0).powi(2) + (se1 / p1).powi(2)).sqrt();
            assert!((ratio - 0.5).abs() < 4.0 * se, "ratio {ratio} ± {se}");
        }
    }

    #[test]
    fn small_graph_vs_limit_run_passes() {
        // The warm-up must outrun the O(1/n) mean bias for a three-sigma
        // gate at this replica count; s = 6.5 gives n ~ 650.
        let cfg = CompareConfig {
            d: 2,
            k_max: 2,
            s: 6.5,
            t_offsets: vec![0.0, 0.5],
            replicas: 3_000,
            master: 20_250,
        };
        let mut report = Report::new("graph vs limit (smoke)", cfg.master, "test");
        graph_vs_limit(&cfg, &mut report).unwrap();
        let failed: Vec<_> = report.gates.iter().filter(|g| !g.pass).collect();
        assert!(failed.is_empty(), "failed gates: {failed:?}");
    }

    #[test]
    fn single_permutation_limit_means_are_classical() {
        // d=1 sanity: limit means a(1,k)/2k = 1/k.
        for k in 1..6u32 {
            let m = crate::words::stationary_mean_k(1, k).unwrap();
            assert_eq!(m, crate::words::Rational::new(1, k as i128));
        }
    }

    #[test]
    fn yule_scan_smoke() {
        let cfg = YuleConfig {
            j_list: vec![1, 2],
            k_max: 5,
            deltas: vec![0.5],
            chains: 30_000,
            master: 4096,
        };
        let mut report = Report::new("yule (smoke)", cfg.master, "test");
        yule_occupancy_scan(&cfg, &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
    }

    #[test]
    fn intertwining_scan_smoke() {
        let cfg = IntertwiningConfig {
            d_low: 1,
            k_max: 2,
            horizon: 1.0,
            replicas: 4_000,
            master: 31,
        };
        let mut report = Report::new("intertwining (smoke)", cfg.master, "test");
        intertwining_scan(&cfg, &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
    }

    #[test]
    fn ou_scan_exact_part() {
        let cfg = OuScanConfig {
            d_list: vec![2, 5, 10, 20, 50],
            k_list: vec![1, 2, 3],
            s: 1.0,
            t: 1.0,
            mc_d: None,
            replicas: 0,
            master: 0,
            diag_tolerance: 0.05,
        };
        let mut report = Report::new("ou exact (smoke)", 0, "test");
        ou_limit_scan(&cfg, &mut report).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
    }
}
