//! The eigenvalue side: Chebyshev trace statistics tied to walk counts.
//!
//! With `λ_i` the eigenvalues of `A / (2 sqrt(2d-1))`, the polynomials
//!
//! ```text
//! Γ_0 = 1,   Γ_{2k} = 2 T_{2k} + (2d-2)/(2d-1)^k,   Γ_{2k+1} = 2 T_{2k+1}
//! ```
//!
//! satisfy `Σ_i Γ_k(λ_i) = (2d-1)^{-k/2} CNBW_k` exactly, for every graph in
//! the model. Möbius inversion over the divisor lattice turns the Γ family
//! into a basis `f_k` whose adjusted traces recover plain cycle counts on
//! graphs without bad walks.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{GraphError, GraphState};

/// Settings for eigenvalue-dependent operations.
#[derive(Clone, Copy, Debug)]
pub struct EigenOpts {
    /// Largest `n` the dense solver will accept.
    pub max_n: usize,
}

impl Default for EigenOpts {
    fn default() -> Self {
        EigenOpts { max_n: 2000 }
    }
}

/// Eigenvalues of `A / (2 sqrt(2d-1))`, descending.
pub fn eigenvalues(state: &GraphState, opts: EigenOpts) -> Result<Vec<f64>, GraphError> {
    let n = state.n();
    if n > opts.max_n {
        return Err(GraphError::EigenTooLarge { n, cap: opts.max_n });
    }
    let scale = 2.0 * ((2 * state.d() - 1) as f64).sqrt();
    let a: DMatrix<f64> = state.adjacency() / scale;
    let eig = SymmetricEigen::try_new(a, 1e-12, 10_000).ok_or(GraphError::EigenFailed)?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(vals)
}

/// `Σ_i Γ_k(λ_i)` for `k = 1..=k_max` (index `k-1`), evaluated by the
/// three-term Chebyshev recurrence, which stays exact off `[-1, 1]`.
pub fn gamma_traces(state: &GraphState, k_max: usize, opts: EigenOpts) -> Result<Vec<f64>, GraphError> {
    let vals = eigenvalues(state, opts)?;
    Ok(gamma_traces_from_eigenvalues(&vals, state.d(), state.n(), k_max))
}

pub(crate) fn gamma_traces_from_eigenvalues(
    vals: &[f64],
    d: usize,
    n: usize,
    k_max: usize,
) -> Vec<f64> {
    let mut cheb_sums = vec![0.0f64; k_max + 1];
    for &x in vals {
        let mut t_prev = 1.0; // T_0
        let mut t_cur = x; // T_1
        if k_max >= 1 {
            cheb_sums[1] += t_cur;
        }
        for sums in cheb_sums.iter_mut().take(k_max + 1).skip(2) {
            let t_next = 2.0 * x * t_cur - t_prev;
            *sums += t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    (1..=k_max)
        .map(|k| {
            let mut g = 2.0 * cheb_sums[k];
            if k % 2 == 0 {
                g += n as f64 * (2 * d - 2) as f64 / ((2 * d - 1) as f64).powi(k as i32 / 2);
            }
            g
        })
        .collect()
}

/// Möbius function on the positive integers.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut m = n;
    let mut primes = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if m > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A polynomial expressed in the Γ basis; `coeffs[j]` multiplies `Γ_j`.
#[derive(Clone, Debug)]
pub struct GammaPoly {
    pub d: usize,
    pub coeffs: Vec<f64>,
}

impl GammaPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The `Γ_0` coefficient, subtracted per-vertex in the adjusted trace.
    pub fn a0(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Monomial coefficients (index = power of x).
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        let deg = self.degree();
        let mut out = vec![0.0; deg + 1];
        // Chebyshev coefficient rows built by the same recurrence.
        let mut t_prev = vec![0.0; deg + 1];
        let mut t_cur = vec![0.0; deg + 1];
        t_prev[0] = 1.0;
        if deg >= 1 {
            t_cur[1] = 1.0;
        }
        let base = (2 * self.d - 1) as f64;
        for j in 0..=deg {
            let row: &Vec<f64> = if j == 0 { &t_prev } else { &t_cur };
            let c = self.coeffs[j];
            if c != 0.0 {
                if j == 0 {
                    out[0] += c;
                } else {
                    for (o, r) in out.iter_mut().zip(row.iter()) {
                        *o += 2.0 * c * r;
                    }
                    if j % 2 == 0 {
                        out[0] += c * (2 * self.d - 2) as f64 / base.powi(j as i32 / 2);
                    }
                }
            }
            if j >= 1 && j < deg {
                let mut t_next = vec![0.0; deg + 1];
                for i in 0..deg {
                    t_next[i + 1] += 2.0 * t_cur[i];
                }
                for (i, v) in t_prev.iter().enumerate() {
                    t_next[i] -= v;
                }
                t_prev = std::mem::replace(&mut t_cur, t_next);
            }
        }
        out
    }

    /// Evaluates the polynomial at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let deg = self.degree();
        let mut acc = self.a0();
        let mut t_prev = 1.0;
        let mut t_cur = x;
        let base = (2 * self.d - 1) as f64;
        for j in 1..=deg {
            let t = if j == 1 { t_cur } else {
                let t_next = 2.0 * x * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
                t_next
            };
            let mut gamma = 2.0 * t;
            if j % 2 == 0 {
                gamma += (2 * self.d - 2) as f64 / base.powi(j as i32 / 2);
            }
            acc += self.coeffs[j] * gamma;
        }
        acc
    }
}

/// The Möbius-inverted basis polynomial
/// `f_k = (1/2k) Σ_{j|k} μ(k/j) (2d-1)^{j/2} Γ_j`.
pub fn f_basis(d: usize, k: usize) -> GammaPoly {
    assert!(k >= 1 && d >= 1);
    let base = (2 * d - 1) as f64;
    let mut coeffs = vec![0.0; k + 1];
    for j in 1..=k {
        if k % j == 0 {
            let m = mobius((k / j) as u64) as f64;
            if m != 0.0 {
                coeffs[j] = m * base.powf(j as f64 / 2.0) / (2.0 * k as f64);
            }
        }
    }
    GammaPoly { d, coeffs }
}

/// Adjusted trace `tr f(G) = Σ_i f(λ_i) - n a_0`; the `Γ_0` term cancels, so
/// this is the Γ-weighted sum of the `Γ_j` traces for `j >= 1`.
pub fn tr_poly(state: &GraphState, poly: &GammaPoly, opts: EigenOpts) -> Result<f64, GraphError> {
    assert_eq!(poly.d, state.d(), "polynomial built for a different degree");
    let traces = gamma_traces(state, poly.degree().max(1), opts)?;
    Ok(poly
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| c * traces[j - 1])
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycles::WorkBudget;
    use crate::graph::{cnbw_counts, count_cycles, PermTower};
    use approx::assert_relative_eq;

    fn state_from(perms: Vec<Vec<u32>>) -> GraphState {
        GraphState::from_towers(
            perms.iter().map(|p| PermTower::from_permutation(p).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn mobius_small_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), e, "mu({})", i + 1);
        }
    }

    #[test]
    fn triangle_gamma_trace_equals_walk_count() {
        let state = state_from(vec![vec![1, 2, 0]]);
        let traces = gamma_traces(&state, 3, EigenOpts::default()).unwrap();
        // d=1: scaling factor is 1, eigenvalues are cos(2πj/3).
        assert_relative_eq!(traces[2], 6.0, epsilon = 1e-9);
        assert_relative_eq!(traces[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn gamma_trace_identity_on_random_states() {
        for seed in 0..8 {
            let mut rng = crate::seed::replica_rng(500 + seed, 0);
            let d = 1 + (seed as usize) % 3;
            let n = 20 + 10 * (seed as usize);
            let state = GraphState::sample_uniform(n, d, &mut rng);
            let traces = gamma_traces(&state, 10, EigenOpts::default()).unwrap();
            let walks = cnbw_counts(&state, 10, WorkBudget::default()).unwrap();
            let base = (2 * d - 1) as f64;
            for k in 1..=10 {
                let expect = base.powf(-(k as f64) / 2.0) * walks[k - 1] as f64;
                let err = (traces[k - 1] - expect).abs() / expect.abs().max(1.0);
                assert!(err < 1e-8, "d={d} n={n} k={k}: {} vs {expect}", traces[k - 1]);
            }
        }
    }

    #[test]
    fn first_trace_counts_loops() {
        // Γ_1 trace is tr(A)/sqrt(2d-1) = 2 #loops / sqrt(2d-1).
        let state = state_from(vec![vec![0, 1, 3, 2], vec![1, 0, 2, 3]]);
        let traces = gamma_traces(&state, 1, EigenOpts::default()).unwrap();
        let loops = (0..4)
            .map(|v| (0..2).filter(|&l| state.tower(l).apply(v) == v).count() as f64)
            .sum::<f64>();
        assert_eq!(loops, 4.0);
        assert_relative_eq!(traces[0], 2.0 * loops / 3f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn f_basis_shapes() {
        // f_1 = sqrt(2d-1) x.
        let f1 = f_basis(2, 1);
        let mono = f1.monomial_coeffs();
        assert_relative_eq!(mono[1], 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(mono[0], 0.0, epsilon = 1e-12);

        // f_4 mixes divisors 1, 2, 4 with Möbius weights 0, -1, +1.
        let f4 = f_basis(2, 4);
        assert_eq!(f4.coeffs[1], 0.0);
        assert!(f4.coeffs[2] < 0.0);
        assert!(f4.coeffs[4] > 0.0);
        assert_eq!(f4.coeffs[3], 0.0);
    }

    #[test]
    fn constant_polynomial_has_zero_adjusted_trace() {
        let mut rng = crate::seed::replica_rng(9, 2);
        let state = GraphState::sample_uniform(15, 2, &mut rng);
        let one = GammaPoly { d: 2, coeffs: vec![1.0] };
        let tr = tr_poly(&state, &one, EigenOpts::default()).unwrap();
        assert_relative_eq!(tr, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn triangle_f3_trace_is_the_cycle_count() {
        let state = state_from(vec![vec![1, 2, 0]]);
        let f3 = f_basis(1, 3);
        let tr = tr_poly(&state, &f3, EigenOpts::default()).unwrap();
        assert_relative_eq!(tr, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn mobius_traces_recover_cycle_counts_without_bad_walks() {
        // Disjoint cycles by construction: d=1 states never have bad walks.
        let mut rng = crate::seed::replica_rng(31, 4);
        let state = GraphState::sample_uniform(40, 1, &mut rng);
        let counts = count_cycles(&state, 8, WorkBudget::default()).unwrap().by_length();
        for k in 1..=8 {
            let f = f_basis(1, k);
            let tr = tr_poly(&state, &f, EigenOpts::default()).unwrap();
            let c = counts.get(&k).copied().unwrap_or(0) as f64;
            assert!((tr - c).abs() < 1e-6, "k={k}: tr {tr} vs C {c}");
        }
    }

    #[test]
    fn eigen_cap_is_enforced(){
        let mut rng = crate::seed::replica_rng(2, 2);
        let state = GraphState::sample_uniform(30, 1, &mut rng);
        assert!(matches!(
            eigenvalues(&state, EigenOpts { max_n: 10 }),
            Err(GraphError::EigenTooLarge { .. })
        ));
    }

    #[test]
    fn monomial_and_gamma_eval_agree() {
        let f = f_basis(2, 6);
        let mono = f.monomial_coeffs();
        for x in [-1.2, -0.3, 0.0, 0.7, 1.5] {
            let via_mono: f64 = mono.iter().rev().fold(0.0, |acc, &c| acc * x + c);
            assert_relative_eq!(f.eval(x), via_mono, epsilon = 1e-9);
        }
    }
}
