//! Dominant eigenpair extraction for trade-off blocks and the scan over
//! photon-number-difference blocks that yields lambda_max(p).

use crate::jacobi;
use crate::numerics::LogFactorialTable;
use crate::operator::{self, OperatorError, RBlock};
use crate::par;
use crate::schmidt::{SchmidtError, SchmidtState};
use thiserror::Error;

use std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigError {
    #[error("power iteration stopped after {iterations} iterations without converging (last eigenvalue {last_eigenvalue:.17e}, residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        last_eigenvalue: f64,
        residual: f64,
    },
    #[error("block (p={p}, L={l}): {source}")]
    Block {
        p: f64,
        l: i32,
        #[source]
        source: Box<EigError>,
    },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("converged eigenvector is not a valid Schmidt state: {0}")]
    InvalidState(#[from] SchmidtError),
    #[error("product-space dimension {0}^2 exceeds the dense crosscheck limit of 36")]
    CrosscheckTooLarge(usize),
}

/// Converged dominant eigenpair.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalue: f64,
    /// Unit-norm, sign-canonicalized so the largest-magnitude entry is
    /// positive.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    /// max-norm of R v - lambda v for the returned pair.
    pub residual: f64,
}

/// Residual cap for block eigenvalues accepted without full eigenvector
/// convergence during a scan; the eigenvalue error of a settled Rayleigh
/// quotient is bounded by the 2-norm of the residual.
const RELAXED_RESIDUAL: f64 = 1e-7;

/// Iterations between stall checks in the scan path.
const STALL_WINDOW: usize = 2000;

struct RawEig {
    eigenvalue: f64,
    eigenvector: Vec<f64>,
    iterations: usize,
    residual: f64,
    /// The relative eigenvalue change has been below tol for a full window.
    lambda_settled: bool,
    converged: bool,
}

/// Power iteration core. With `stall_bail` the loop gives up early once the
/// eigenvalue has settled but the residual has stopped shrinking — the
/// signature of a nearly degenerate top pair, where the eigenvector (not
/// the eigenvalue) is what fails to converge.
fn power_iterate(block: &RBlock, tol: f64, max_iter: usize, stall_bail: bool) -> RawEig {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = block.dim();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut lambda_prev = f64::NAN;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut settled_streak = 0usize;
    let mut residual_at_window = f64::INFINITY;

    for it in 1..=max_iter {
        block.matvec(&v, &mut w);
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        residual = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| (wi - lambda * vi).abs())
            .fold(0.0, f64::max);

        let settled = (lambda - lambda_prev).abs() <= tol * lambda.abs();
        settled_streak = if settled { settled_streak + 1 } else { 0 };
        if settled && residual <= 10.0 * tol {
            canonicalize_sign(&mut v);
            return RawEig {
                eigenvalue: lambda,
                eigenvector: v,
                iterations: it,
                residual,
                lambda_settled: true,
                converged: true,
            };
        }
        lambda_prev = lambda;

        if it % STALL_WINDOW == 0 {
            let stalled = residual > 0.5 * residual_at_window;
            if stall_bail
                && stalled
                && settled_streak >= STALL_WINDOW
                && residual <= RELAXED_RESIDUAL
            {
                canonicalize_sign(&mut v);
                return RawEig {
                    eigenvalue: lambda,
                    eigenvector: v,
                    iterations: it,
                    residual,
                    lambda_settled: true,
                    converged: false,
                };
            }
            residual_at_window = residual;
        }

        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // zero matrix: the uniform start is already an eigenvector
            canonicalize_sign(&mut v);
            return RawEig {
                eigenvalue: 0.0,
                eigenvector: v,
                iterations: it,
                residual: 0.0,
                lambda_settled: true,
                converged: true,
            };
        }
        for (slot, &wi) in v.iter_mut().zip(&w) {
            *slot = wi / norm;
        }
    }

    canonicalize_sign(&mut v);
    RawEig {
        eigenvalue: lambda,
        eigenvector: v,
        iterations: max_iter,
        residual,
        lambda_settled: settled_streak >= STALL_WINDOW,
        converged: false,
    }
}

/// Power iteration from the uniform positive start vector.
///
/// Converges when the relative eigenvalue change drops below `tol` and the
/// max-norm residual below `10 * tol`. The uniform start has nonzero overlap
/// with the Perron vector of these entrywise-nonnegative blocks, so the
/// iteration cannot stall on an orthogonal subspace.
pub fn dominant_eig(block: &RBlock, tol: f64, max_iter: usize) -> Result<EigResult, EigError> {
    let raw = power_iterate(block, tol, max_iter, false);
    if raw.converged {
        Ok(EigResult {
            eigenvalue: raw.eigenvalue,
            eigenvector: raw.eigenvector,
            iterations: raw.iterations,
            residual: raw.residual,
        })
    } else {
        Err(EigError::NoConvergence {
            iterations: raw.iterations,
            last_eigenvalue: raw.eigenvalue,
            residual: raw.residual,
        })
    }
}

fn canonicalize_sign(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Scan configuration shared by the eigensolver, trade-off, and channel
/// drivers.
#[derive(Debug, Clone)]
pub struct ScanParams {
    /// Fock truncation dimension per block.
    pub dim: usize,
    /// Blocks L = 0, -1, ..., -l_max are always scanned.
    pub l_max: usize,
    /// Relative eigenvalue tolerance; the residual gate is 10x this.
    pub tol: f64,
    pub max_iter: usize,
    /// Also scan +1..=+l_max to verify the domination argument numerically.
    pub verify_blocks: bool,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            dim: 500,
            l_max: 30,
            tol: 1e-12,
            max_iter: 100_000,
            verify_blocks: false,
        }
    }
}

impl ScanParams {
    pub fn with_dim(dim: usize, l_max: usize) -> Self {
        Self {
            dim,
            l_max,
            ..Self::default()
        }
    }

    /// Signed block labels in tie-break priority order: L = 0 first, then
    /// increasing |L| with the negative sign before the positive one.
    fn block_labels(&self) -> Vec<i32> {
        let mut labels = vec![0];
        for l in 1..=self.l_max as i32 {
            labels.push(-l);
            if self.verify_blocks {
                labels.push(l);
            }
        }
        labels
    }
}

/// Result of diagonalizing every scanned block at one weight p.
#[derive(Debug, Clone)]
pub struct BlockScanResult {
    pub p: f64,
    /// (L, dominant eigenvalue) in scan priority order.
    pub block_eigenvalues: Vec<(i32, f64)>,
    pub l_star: i32,
    pub lambda_max: f64,
    /// Runner-up eigenvalue over the other blocks divided by lambda_max;
    /// close to 1 near p = 0 where the blocks are nearly degenerate and the
    /// eigenvector is correspondingly unreliable.
    pub degeneracy_ratio: f64,
    /// Perron eigenvector of the winning block packaged as a state; present
    /// when the winner is the diagonal block L = 0.
    pub optimal_state: Option<SchmidtState>,
    /// Iterations spent on the winning block.
    pub iterations: usize,
    /// Labels whose eigenvalue settled but whose eigenvector residual
    /// stalled (nearly degenerate top pair); their eigenvalues are accurate
    /// to roughly the stalled residual and they never win the argmax.
    pub relaxed_blocks: Vec<i32>,
}

/// Reusable scanner that builds each R_F block once and recombines it with
/// the diagonal estimation block for every requested p.
pub struct BlockScanner {
    params: ScanParams,
    /// R_F block per |L| (identical for both signs).
    rf_blocks: Vec<RBlock>,
}

impl BlockScanner {
    pub fn new(params: ScanParams) -> Result<Self, EigError> {
        let table = LogFactorialTable::for_blocks(params.dim, params.l_max);
        let labels: Vec<i32> = (0..=params.l_max as i32).collect();
        let rf_blocks = par::map_collect(&labels, |&l| operator::build_rf(&table, l, params.dim))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { params, rf_blocks })
    }

    pub fn params(&self) -> &ScanParams {
        &self.params
    }

    /// Diagonalizes every scanned block at weight `p` and reports the argmax
    /// with ties broken toward L = 0, then smaller |L|, then the negative
    /// sign.
    pub fn scan(&self, p: f64) -> Result<BlockScanResult, EigError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(OperatorError::WeightOutOfRange(p).into());
        }
        let labels = self.params.block_labels();
        let solved = par::map_collect(&labels, |&l| {
            let rf = &self.rf_blocks[l.unsigned_abs() as usize];
            let block = operator::combine(p, rf, &operator::rg_diagonal(l, self.params.dim));
            power_iterate(&block, self.params.tol, self.params.max_iter, true)
        });

        // A block whose eigenvalue settled while only the eigenvector
        // stalled still carries a trustworthy eigenvalue; it is kept as a
        // value-only candidate. A block that settled nothing is a failure.
        let mut results = Vec::with_capacity(labels.len());
        let mut relaxed_blocks = Vec::new();
        for (&l, raw) in labels.iter().zip(solved) {
            if !raw.converged {
                if raw.lambda_settled && raw.residual <= RELAXED_RESIDUAL {
                    relaxed_blocks.push(l);
                } else {
                    return Err(EigError::Block {
                        p,
                        l,
                        source: Box::new(EigError::NoConvergence {
                            iterations: raw.iterations,
                            last_eigenvalue: raw.eigenvalue,
                            residual: raw.residual,
                        }),
                    });
                }
            }
            results.push((l, raw));
        }

        // strict comparison over the priority-ordered list implements the
        // documented tie-break
        let mut best = 0usize;
        for i in 1..results.len() {
            if results[i].1.eigenvalue > results[best].1.eigenvalue {
                best = i;
            }
        }
        let (l_star, winner) = (results[best].0, &results[best].1);
        if !winner.converged {
            return Err(EigError::Block {
                p,
                l: l_star,
                source: Box::new(EigError::NoConvergence {
                    iterations: winner.iterations,
                    last_eigenvalue: winner.eigenvalue,
                    residual: winner.residual,
                }),
            });
        }
        let runner_up = results
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best)
            .map(|(_, (_, r))| r.eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max);
        let degeneracy_ratio = if runner_up.is_finite() {
            runner_up / winner.eigenvalue
        } else {
            0.0
        };

        let optimal_state = if l_star == 0 {
            Some(SchmidtState::from_perron_vector(&winner.eigenvector)?)
        } else {
            None
        };

        Ok(BlockScanResult {
            p,
            block_eigenvalues: results
                .iter()
                .map(|(l, r)| (*l, r.eigenvalue))
                .collect(),
            l_star,
            lambda_max: winner.eigenvalue,
            degeneracy_ratio,
            optimal_state,
            iterations: winner.iterations,
            relaxed_blocks,
        })
    }
}

/// One-shot scan; equivalent to `BlockScanner::new(params)?.scan(p)`.
pub fn block_scan(p: f64, params: &ScanParams) -> Result<BlockScanResult, EigError> {
    BlockScanner::new(params.clone())?.scan(p)
}

/// Builds the full two-mode operator R(p) on the product space of `dim`
/// Fock levels per mode and diagonalizes it with dense Jacobi rotations,
/// independently of the block machinery. Limited to dim <= 6.
pub fn small_n_crosscheck(p: f64, dim: usize) -> Result<f64, EigError> {
    if dim * dim > 36 {
        return Err(EigError::CrosscheckTooLarge(dim));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(OperatorError::WeightOutOfRange(p).into());
    }
    let table = LogFactorialTable::for_blocks(dim, dim);
    let side = dim * dim;
    let mut full = vec![0.0; side * side];
    for n in 0..dim {
        for m in 0..dim {
            let row = n * dim + m;
            for np in 0..dim {
                for mp in 0..dim {
                    let col = np * dim + mp;
                    let mut value = 0.0;
                    if n as i32 - m as i32 == np as i32 - mp as i32 {
                        let k = n + mp;
                        let log_el = table.lf(k)
                            - 0.5 * (table.lf(n) + table.lf(m) + table.lf(np) + table.lf(mp))
                            - (k + 1) as f64 * LN_2;
                        value += p * log_el.exp();
                    }
                    if row == col {
                        value += (1.0 - p) * 2f64.powi(-(n as i32) - 1);
                    }
                    full[row * side + col] = value;
                }
            }
        }
    }
    let eigs = jacobi::symmetric_eigenvalues(full, side);
    Ok(eigs[0])
}
