//! Covariance-based non-Gaussianity witness for photon-number-correlated
//! states.
//!
//! A pure two-mode Gaussian state with the symmetric covariance pattern of
//! these states must satisfy a^2 - c^2 = 1/4; any excess certifies that the
//! state is non-Gaussian within this family. The nearest TMSV is the one
//! matching the state's quadrature variance a.

use crate::schmidt::SchmidtState;

use std::fmt;

/// Witness above this is a non-Gaussianity certificate (provided the
/// truncation tail cannot account for it); below `GAUSSIAN_TOL` the state
/// is consistent with a TMSV.
const CERTIFY_TOL: f64 = 1e-6;
const GAUSSIAN_TOL: f64 = 1e-8;
/// A discarded tail of squared weight eps can shift the witness by roughly
/// (a + c) * dim * eps; this safety factor covers that for the dimensions
/// and variances in play here.
const TAIL_SAFETY: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithGaussian,
    NonGaussian,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Verdict::ConsistentWithGaussian => "consistent_with_gaussian",
            Verdict::NonGaussian => "non_gaussian",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(label)
    }
}

#[derive(Debug, Clone)]
pub struct GaussianityReport {
    /// Common quadrature variance (vacuum = 1/2).
    pub a: f64,
    /// Cross-mode correlation.
    pub c: f64,
    /// a^2 - c^2 - 1/4; zero for a pure Gaussian of this covariance pattern.
    pub witness: f64,
    /// Weight of the TMSV with the same variance a.
    pub lambda_nearest: f64,
    /// Squared weight of the last retained coefficient.
    pub tail_weight: f64,
    pub verdict: Verdict,
}

/// Covariance parameters (a, c) of the state's quadrature variance matrix:
/// a = sum n c_n^2 + 1/2, c = sum (n+1) c_n c_{n+1}.
pub fn variance_params(state: &SchmidtState) -> (f64, f64) {
    let coeffs = state.coeffs();
    let a: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| n as f64 * c * c)
        .sum::<f64>()
        + 0.5;
    let c: f64 = coeffs
        .windows(2)
        .enumerate()
        .map(|(n, w)| (n + 1) as f64 * w[0] * w[1])
        .sum();
    (a, c)
}

/// Full purity-witness report for `state`.
pub fn gaussianity_witness(state: &SchmidtState) -> GaussianityReport {
    let (a, c) = variance_params(state);
    let witness = a * a - c * c - 0.25;
    let lambda_nearest = ((a - 0.5) / (a + 0.5)).max(0.0).sqrt();
    let tail_weight = state.tail_weight();
    let verdict = if witness.abs() < GAUSSIAN_TOL {
        Verdict::ConsistentWithGaussian
    } else if witness > CERTIFY_TOL && witness > TAIL_SAFETY * tail_weight {
        Verdict::NonGaussian
    } else {
        Verdict::Inconclusive
    };
    GaussianityReport {
        a,
        c,
        witness,
        lambda_nearest,
        tail_weight,
        verdict,
    }
}

impl GaussianityReport {
    pub fn csv_header() -> &'static str {
        "a,c,witness,lambda_nearest,tail_weight,verdict"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.a, self.c, self.witness, self.lambda_nearest, self.tail_weight, self.verdict
        )
    }
}

impl fmt::Display for GaussianityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "a: {:.16e}", self.a)?;
        writeln!(f, "c: {:.16e}", self.c)?;
        writeln!(f, "witness: {:.16e}", self.witness)?;
        writeln!(f, "lambda_nearest: {:.16e}", self.lambda_nearest)?;
        writeln!(f, "tail_weight: {:.16e}", self.tail_weight)?;
        write!(f, "verdict: {}", self.verdict)
    }
}
