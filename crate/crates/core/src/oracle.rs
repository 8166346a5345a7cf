//! Independent verification of the fidelity series through the
//! Bell-outcome integral representation.
//!
//! Phase invariance reduces both fidelities to one-dimensional integrals
//! over t = |beta|^2: F = int_0^inf e^(-2t) g(t)^2 dt with
//! g(t) = sum c_n t^n / n!, and G = int_0^inf e^(-2t) h(t) dt with
//! h(t) = sum c_n^2 t^n / n!. These integrands share nothing with the
//! closed series in `schmidt`, so agreement guards against transcription
//! errors on either side.

use crate::jacobi;
use crate::par;
use crate::schmidt::SchmidtState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Above this order the smallest quadrature weights (~e^(-x) at the largest
/// Laguerre node) leave the normal f64 range.
pub const MAX_ORDER: usize = 180;

const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("quadrature order must lie in 1..={MAX_ORDER}, got {0}")]
    OrderOutOfRange(usize),
    #[error("monte-carlo estimate needs at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

/// Gauss quadrature for integrals int_0^inf e^(-2t) f(t) dt; a rule of
/// order q is exact for polynomials up to degree 2q - 1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// e^(-x/2)-scaled Laguerre values (L~_order, L~_{order-1}) at x; the
/// scaling keeps the recurrence inside f64 range for x up to ~1200.
fn scaled_laguerre_pair(order: usize, x: f64) -> (f64, f64) {
    let scale = (-0.5 * x).exp();
    let mut prev = scale; // L~_0
    let mut cur = (1.0 - x) * scale; // L~_1
    if order == 0 {
        return (prev, 0.0);
    }
    for k in 1..order {
        let next = ((2 * k + 1) as f64 - x) * cur - k as f64 * prev;
        prev = cur;
        cur = next / (k + 1) as f64;
    }
    (cur, prev)
}

impl QuadratureRule {
    /// Builds an order-`order` rule by the Golub-Welsch construction for
    /// the standard Laguerre weight, Newton-polishes the nodes on the
    /// scaled recurrence, and rescales to the e^(-2t) weight
    /// (t = x/2, w = v/2).
    pub fn new(order: usize) -> Result<Self, OracleError> {
        if order == 0 || order > MAX_ORDER {
            return Err(OracleError::OrderOutOfRange(order));
        }
        // symmetric tridiagonal Jacobi matrix of the Laguerre recurrence
        let mut m = vec![0.0; order * order];
        for i in 0..order {
            m[i * order + i] = (2 * i + 1) as f64;
            if i + 1 < order {
                m[i * order + i + 1] = (i + 1) as f64;
                m[(i + 1) * order + i] = (i + 1) as f64;
            }
        }
        let mut roots = jacobi::symmetric_eigenvalues(m, order);
        roots.reverse(); // ascending

        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for mut x in roots {
            // Newton polish: L_order'(x) = order (L_order - L_{order-1}) / x
            for _ in 0..3 {
                let (l_cur, l_prev) = scaled_laguerre_pair(order, x);
                let deriv = order as f64 * (l_cur - l_prev) / x;
                if deriv != 0.0 {
                    x -= l_cur / deriv;
                }
            }
            // w_i = x e^(-x) / ((q+1)^2 L~_{q+1}(x)^2) with L~ the scaled
            // polynomial; the explicit e^(-x) stays normal for every node
            // up to MAX_ORDER
            let (l_next, _) = scaled_laguerre_pair(order + 1, x);
            let q1 = (order + 1) as f64;
            let w = x * (-x).exp() / (q1 * q1 * l_next * l_next);
            nodes.push(0.5 * x);
            weights.push(0.5 * w);
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// int_0^inf e^(-2t) f(t) dt, accumulated in ascending node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// e^(-t) sum c_n t^n / n!, built from Poisson probability terms so the
/// partial sums stay bounded for any state dimension and any node.
fn damped_series(coeffs: &[f64], t: f64, square_coeffs: bool) -> f64 {
    let mut term = (-t).exp();
    let mut acc = 0.0;
    for (n, &c) in coeffs.iter().enumerate() {
        if n > 0 {
            term *= t / n as f64;
        }
        acc += if square_coeffs { c * c * term } else { c * term };
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct OracleFidelities {
    pub f: f64,
    pub g: f64,
    /// False when the rule order cannot integrate g(t)^2 exactly
    /// (order < state dimension); the values are then approximations.
    pub order_adequate: bool,
}

/// Quadrature evaluation of both fidelities, independent of the closed
/// series.
pub fn oracle_fidelities(
    state: &SchmidtState,
    order: usize,
) -> Result<OracleFidelities, OracleError> {
    let rule = QuadratureRule::new(order)?;
    let c = state.coeffs();
    // Pair the damped series with the weight's own exponential: the raw
    // g(t) overflows f64 at the outer nodes for large states, while
    // w e^(2t) and e^(-t) g(t) are both tame.
    let mut f = 0.0;
    let mut g = 0.0;
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let gd = damped_series(c, t, false);
        let hd = damped_series(c, t, true);
        f += w * (2.0 * t).exp() * gd * gd;
        g += w * t.exp() * hd;
    }
    Ok(OracleFidelities {
        f,
        g,
        order_adequate: order >= state.dim(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct McFidelities {
    pub f: f64,
    pub f_stderr: f64,
    pub g: f64,
    pub g_stderr: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of the same integrals, sampling t from the density
/// 2 e^(-2t).
///
/// Samples are drawn in fixed-size blocks, one counter-based generator
/// stream per block, and the block sums are reduced in block order — the
/// result is bit-identical for a given seed no matter how many threads run.
pub fn mc_fidelities(
    state: &SchmidtState,
    samples: usize,
    seed: u64,
) -> Result<McFidelities, OracleError> {
    const BLOCK: usize = 1 << 14;

    if samples < MIN_SAMPLES {
        return Err(OracleError::TooFewSamples(samples));
    }
    let c = state.coeffs();
    let blocks: Vec<usize> = (0..samples.div_ceil(BLOCK)).collect();
    let partials = par::map_collect(&blocks, |&b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = BLOCK.min(samples - b * BLOCK);
        let mut sums = [0.0f64; 4];
        for _ in 0..count {
            let u: f64 = rng.gen();
            let t = -0.5 * (1.0 - u).ln();
            let gd = damped_series(c, t, false);
            let f_sample = 0.5 * (2.0 * t).exp() * gd * gd;
            let g_sample = 0.5 * t.exp() * damped_series(c, t, true);
            sums[0] += f_sample;
            sums[1] += f_sample * f_sample;
            sums[2] += g_sample;
            sums[3] += g_sample * g_sample;
        }
        sums
    });

    let mut total = [0.0f64; 4];
    for sums in partials {
        for (slot, s) in total.iter_mut().zip(sums) {
            *slot += s;
        }
    }
    let n = samples as f64;
    let f_mean = total[0] / n;
    let g_mean = total[2] / n;
    let f_var = ((total[1] - n * f_mean * f_mean) / (n - 1.0)).max(0.0);
    let g_var = ((total[3] - n * g_mean * g_mean) / (n - 1.0)).max(0.0);
    Ok(McFidelities {
        f: f_mean,
        f_stderr: (f_var / n).sqrt(),
        g: g_mean,
        g_stderr: (g_var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::{fidelity_estimation, fidelity_output, tmsv};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn exact_moment(k: usize) -> f64 {
        // int_0^inf e^(-2t) t^k dt = k! / 2^(k+1)
        let mut fact = 1.0;
        for i in 1..=k {
            fact *= i as f64;
        }
        fact / 2f64.powi(k as i32 + 1)
    }

    #[test]
    fn moments_up_to_degree_forty() {
        let rule = QuadratureRule::new(64).unwrap();
        for k in 0..=40 {
            let got = rule.integrate(|t| t.powi(k as i32));
            assert_relative_eq!(got, exact_moment(k), max_relative = 1e-12);
        }
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn high_order_rule_stays_finite_and_positive() {
        let rule = QuadratureRule::new(MAX_ORDER).unwrap();
        assert!(rule.nodes().iter().all(|x| x.is_finite()));
        assert!(rule.weights().iter().all(|&w| w > 0.0 && w.is_finite()));
        assert_relative_eq!(rule.integrate(|_| 1.0), 0.5, max_relative = 1e-10);
    }

    #[test]
    fn order_bounds_are_enforced() {
        assert!(matches!(
            QuadratureRule::new(0),
            Err(OracleError::OrderOutOfRange(0))
        ));
        assert!(QuadratureRule::new(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn reference_states() {
        let vacuum = SchmidtState::new(vec![1.0]).unwrap();
        let o = oracle_fidelities(&vacuum, 8).unwrap();
        assert_abs_diff_eq!(o.f, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(o.g, 0.5, epsilon = 1e-13);

        let one = SchmidtState::new(vec![0.0, 1.0]).unwrap();
        let o = oracle_fidelities(&one, 8).unwrap();
        assert_abs_diff_eq!(o.f, 0.25, epsilon = 1e-13);
        assert_abs_diff_eq!(o.g, 0.25, epsilon = 1e-13);
    }

    #[test]
    fn quadrature_matches_series_for_tmsv_states() {
        for lambda in [0.2, 0.5, 0.7] {
            let state = tmsv(lambda, 40).unwrap().state;
            let o = oracle_fidelities(&state, 64).unwrap();
            assert!(o.order_adequate);
            assert_abs_diff_eq!(o.f, fidelity_output(&state), epsilon = 1e-11);
            assert_abs_diff_eq!(o.g, fidelity_estimation(&state), epsilon = 1e-11);
        }
    }

    #[test]
    fn inadequate_order_is_flagged() {
        let state = tmsv(0.5, 64).unwrap().state;
        let o = oracle_fidelities(&state, 32).unwrap();
        assert!(!o.order_adequate);
    }

    #[test]
    fn mc_is_deterministic_and_consistent() {
        let state = tmsv(0.5, 30).unwrap().state;
        let a = mc_fidelities(&state, 50_000, 7).unwrap();
        let b = mc_fidelities(&state, 50_000, 7).unwrap();
        assert_eq!(a.f.to_bits(), b.f.to_bits());
        assert_eq!(a.g.to_bits(), b.g.to_bits());

        let f_series = fidelity_output(&state);
        let g_series = fidelity_estimation(&state);
        assert!((a.f - f_series).abs() <= 3.0 * a.f_stderr);
        assert!((a.g - g_series).abs() <= 3.0 * a.g_stderr);

        let c = mc_fidelities(&state, 50_000, 8).unwrap();
        assert_ne!(a.f.to_bits(), c.f.to_bits());

        assert!(matches!(
            mc_fidelities(&state, 100, 7),
            Err(OracleError::TooFewSamples(100))
        ));
    }
}
