//! Photon-number-correlated two-mode pure states sum_n c_n |n,n> and the
//! closed fidelity series they induce under the covariant teleportation
//! protocol.

use crate::numerics::LogFactorialTable;
use thiserror::Error;

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Norm gate for externally supplied amplitude vectors.
const NORM_TOL: f64 = 1e-6;

/// Entries this far below zero are treated as converged-eigenvector noise
/// and clamped; anything lower is a genuine sign violation.
const PERRON_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchmidtError {
    #[error("state weight must lie in [0, 1), got {0}")]
    WeightOutOfRange(f64),
    #[error("state must have at least one coefficient")]
    Empty,
    #[error("coefficient {index} is negative: {value}")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("squared norm {0} deviates from 1 by more than {NORM_TOL}")]
    NotNormalized(f64),
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
}

/// Schmidt coefficients c_0..c_{N-1} of a state sum_n c_n |n,n>.
///
/// All coefficients are nonnegative and the vector is unit-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    coeffs: Vec<f64>,
}

impl SchmidtState {
    /// Wraps an amplitude vector, enforcing nonnegativity and unit norm.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, SchmidtError> {
        if coeffs.is_empty() {
            return Err(SchmidtError::Empty);
        }
        for (index, &value) in coeffs.iter().enumerate() {
            if !value.is_finite() {
                return Err(SchmidtError::NonFinite { index });
            }
            if value < 0.0 {
                return Err(SchmidtError::NegativeCoefficient { index, value });
            }
        }
        let norm_sq: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(SchmidtError::NotNormalized(norm_sq));
        }
        Ok(Self { coeffs })
    }

    /// Packages a converged Perron eigenvector as a state: entries in
    /// [-1e-12, 0) are clamped to zero, then the vector is renormalized.
    pub fn from_perron_vector(v: &[f64]) -> Result<Self, SchmidtError> {
        if v.is_empty() {
            return Err(SchmidtError::Empty);
        }
        let mut coeffs = Vec::with_capacity(v.len());
        for (index, &value) in v.iter().enumerate() {
            if !value.is_finite() {
                return Err(SchmidtError::NonFinite { index });
            }
            if value < -PERRON_CLAMP {
                return Err(SchmidtError::NegativeCoefficient { index, value });
            }
            coeffs.push(value.max(0.0));
        }
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SchmidtError::NotNormalized(0.0));
        }
        for c in &mut coeffs {
            *c /= norm;
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Squared weight of the last retained Fock level; a cheap proxy for
    /// how much the truncation boundary matters for this state.
    pub fn tail_weight(&self) -> f64 {
        let c = *self.coeffs.last().expect("state is never empty");
        c * c
    }
}

/// A truncated state together with the probability weight lost to the cut.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub state: SchmidtState,
    /// 1 - sum of the untruncated squared coefficients below `dim`.
    pub leakage: f64,
}

/// Two-mode squeezed vacuum with weight `lambda` = tanh(r), truncated to
/// `dim` Fock levels and renormalized. Leakage is lambda^(2 dim) exactly.
pub fn tmsv(lambda: f64, dim: usize) -> Result<Truncated, SchmidtError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(SchmidtError::WeightOutOfRange(lambda));
    }
    if dim == 0 {
        return Err(SchmidtError::Empty);
    }
    let mut coeffs = Vec::with_capacity(dim);
    let mut power = 1.0;
    for _ in 0..dim {
        coeffs.push(power);
        power *= lambda;
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    let leakage = lambda.powi(2 * dim as i32);
    Ok(Truncated {
        state: SchmidtState { coeffs },
        leakage,
    })
}

/// TMSV with one photon subtracted from each mode: c_n proportional to
/// (n+1) x^n with x = T * lambda, truncated and renormalized.
pub fn photon_subtracted(x: f64, dim: usize) -> Result<Truncated, SchmidtError> {
    if !(0.0..1.0).contains(&x) {
        return Err(SchmidtError::WeightOutOfRange(x));
    }
    if dim == 0 {
        return Err(SchmidtError::Empty);
    }
    let mut coeffs = Vec::with_capacity(dim);
    let mut power = 1.0;
    for n in 0..dim {
        coeffs.push((n + 1) as f64 * power);
        power *= x;
    }
    let retained: f64 = coeffs.iter().map(|c| c * c).sum();
    let x2 = x * x;
    let amp_sq = (1.0 - x2).powi(3) / (1.0 + x2);
    let leakage = (1.0 - amp_sq * retained).max(0.0);
    let norm = retained.sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    Ok(Truncated {
        state: SchmidtState { coeffs },
        leakage,
    })
}

/// Output fidelity F = sum_{m,n} C(m+n, n) c_m c_n / 2^(m+n+1).
///
/// Evaluated diagonal by diagonal in m+n with log-domain binomial weights,
/// so the summation order (and hence the result) is independent of any
/// parallelism in the callers.
pub fn fidelity_output(state: &SchmidtState) -> f64 {
    let c = state.coeffs();
    let n_max = c.len() - 1;
    let table = LogFactorialTable::new(2 * n_max + 1);
    let mut total = 0.0;
    for s in 0..=(2 * n_max) {
        let lo = s.saturating_sub(n_max);
        let hi = s.min(n_max);
        let mut diag = 0.0;
        for n in lo..=hi {
            let m = s - n;
            let weight =
                (table.lf(s) - table.lf(n) - table.lf(m) - (s + 1) as f64 * LN_2).exp();
            diag += weight * c[n] * c[m];
        }
        total += diag;
    }
    total
}

/// Estimation fidelity G = sum_n c_n^2 / 2^(n+1).
pub fn fidelity_estimation(state: &SchmidtState) -> f64 {
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c * c * 2f64.powi(-(n as i32) - 1))
        .sum()
}

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected \"n c_n\", got {content:?}")]
    Malformed { line: usize, content: String },
    #[error("line {line}: coefficient indices must be contiguous from 0 (expected {expected}, found {found})")]
    NonContiguous {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: negative coefficient {value}")]
    Negative { line: usize, value: f64 },
    #[error("no data lines in state file")]
    Empty,
    #[error("squared norm {0} deviates from 1 by more than {NORM_TOL}")]
    Norm(f64),
}

/// Writes a state file: '#'-prefixed header lines, then one "n c_n" line
/// per coefficient with 17 significant digits.
pub fn save_state(
    state: &SchmidtState,
    path: &Path,
    comments: &[&str],
) -> Result<(), StateFileError> {
    let mut out = String::new();
    for comment in comments {
        let _ = writeln!(out, "# {comment}");
    }
    let _ = writeln!(out, "# dim {}", state.dim());
    for (n, c) in state.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{n} {c:.16e}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses a state file written by [`save_state`]. Coefficients are kept
/// exactly as read (no renormalization), so save -> load round-trips
/// bit-exactly.
pub fn load_state(path: &Path) -> Result<SchmidtState, StateFileError> {
    let text = fs::read_to_string(path)?;
    let mut coeffs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(n_tok), Some(c_tok), None) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(StateFileError::Malformed {
                line,
                content: raw.to_string(),
            });
        };
        let found: usize = n_tok.parse().map_err(|_| StateFileError::Malformed {
            line,
            content: raw.to_string(),
        })?;
        if found != coeffs.len() {
            return Err(StateFileError::NonContiguous {
                line,
                expected: coeffs.len(),
                found,
            });
        }
        let value: f64 = c_tok.parse().map_err(|_| StateFileError::Malformed {
            line,
            content: raw.to_string(),
        })?;
        if !value.is_finite() {
            return Err(StateFileError::Malformed {
                line,
                content: raw.to_string(),
            });
        }
        if value < 0.0 {
            return Err(StateFileError::Negative { line, value });
        }
        coeffs.push(value);
    }
    if coeffs.is_empty() {
        return Err(StateFileError::Empty);
    }
    let norm_sq: f64 = coeffs.iter().map(|c| c * c).sum();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(StateFileError::Norm(norm_sq));
    }
    Ok(SchmidtState { coeffs })
}
