//! Chi-square goodness-of-fit with standard cell pooling.

/// Result of a chi-square test.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pools consecutive cells until each group's expected count reaches
/// `min_expected` (trailing leftovers merge into the final group), then
/// compares observed counts against `probs`.
///
/// `probs` may sum to less than one; the remainder becomes an implicit tail
/// cell with the unassigned observations.
pub fn chi_square(observed: &[u64], probs: &[f64], total: u64, min_expected: f64) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let n = total as f64;
    let tail_prob = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    let tail_obs = total - observed.iter().sum::<u64>().min(total);

    // Build pooled groups of (observed, expected).
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut acc_o = tail_obs as f64;
    let mut acc_e = n * tail_prob;
    for (&o, &p) in observed.iter().zip(probs).rev() {
        acc_o += o as f64;
        acc_e += n * p;
        if acc_e >= min_expected {
            groups.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = groups.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            groups.push((acc_o, acc_e));
        }
    }

    let statistic: f64 = groups.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = groups.len().saturating_sub(1).max(1);
    let p_value = statrs::function::gamma::gamma_ur(dof as f64 / 2.0, statistic / 2.0);
    ChiSquare { statistic, dof, p_value }
}

/// Poisson pmf values `P[X = 0..=max]` for mean `lambda`.
pub fn poisson_pmf(lambda: f64, max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut p = (-lambda).exp();
    out.push(p);
    for j in 1..=max {
        p *= lambda / j as f64;
        out.push(p);
    }
    out
}

/// Chi-square test of integer samples against a Poisson distribution.
pub fn poisson_chi_square(counts_hist: &[u64], lambda: f64, total: u64) -> ChiSquare {
    let probs = poisson_pmf(lambda, counts_hist.len().saturating_sub(1));
    chi_square(counts_hist, &probs, total, 5.0)
}
