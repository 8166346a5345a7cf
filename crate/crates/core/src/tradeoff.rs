//! Closed-form Gaussian and photon-subtracted baselines, the p-scan that
//! traces the optimized trade-off curve, and the comparison against the
//! Gaussian curve.

use crate::eig::{BlockScanner, EigError, ScanParams};
use crate::numerics::LogFactorialTable;
use crate::operator::{build_rf, build_rg, RBlock};
use crate::par;
use crate::schmidt::{tmsv, SchmidtError, SchmidtState};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TradeoffError {
    #[error("output fidelity must lie in [0.5, 1), got {0}")]
    FidelityOutOfRange(f64),
    #[error("target output fidelity {target} is unreachable at this dimension; maximum achievable is {max_f:.6}")]
    UnreachableTarget { target: f64, max_f: f64 },
    #[error("bisection could not localize F = {target} within bracket [{f_lo:.6}, {f_hi:.6}]")]
    BisectionStalled { target: f64, f_lo: f64, f_hi: f64 },
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error(transparent)]
    State(#[from] SchmidtError),
}

/// Failure at a single grid point; a scan carries on past these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointError {
    #[error("p = {p}: {source}")]
    Solver {
        p: f64,
        #[source]
        source: EigError,
    },
    #[error("p = {p}: dominant block is L = {l_star}, no photon-number-diagonal optimal state")]
    OffDiagonalOptimum { p: f64, l_star: i32 },
}

/// One point of the optimized trade-off curve.
#[derive(Debug, Clone)]
pub struct TradeoffPoint {
    pub p: f64,
    pub lambda_max: f64,
    /// Output fidelity v^T R_F v of the optimal state.
    pub f: f64,
    /// Estimation fidelity v^T R_G v of the optimal state.
    pub g: f64,
    pub l_star: i32,
    pub dim: usize,
    /// Power-iteration count on the winning block.
    pub iterations: usize,
}

/// Braunstein-Kimble teleportation fidelities at squeezing `r`:
/// F = 1/(1+e^(-2r)), G = 1/(1+cosh^2 r).
pub fn bk_fidelities(r: f64) -> (f64, f64) {
    debug_assert!(r >= 0.0);
    let f = 1.0 / (1.0 + (-2.0 * r).exp());
    let cosh = r.cosh();
    let g = 1.0 / (1.0 + cosh * cosh);
    (f, g)
}

/// Optimal Gaussian estimation fidelity at output fidelity `f`:
/// G = 1/(1 + 1/(4 f (1-f))).
pub fn gaussian_tradeoff_g(f: f64) -> Result<f64, TradeoffError> {
    if !(0.5..1.0).contains(&f) {
        return Err(TradeoffError::FidelityOutOfRange(f));
    }
    Ok(gaussian_g_unchecked(f))
}

#[inline]
fn gaussian_g_unchecked(f: f64) -> f64 {
    1.0 / (1.0 + 1.0 / (4.0 * f * (1.0 - f)))
}

/// Closed-form fidelity pair for the photon-subtracted TMSV at x = T lambda.
pub fn photon_subtracted_fidelities(x: f64) -> (f64, f64) {
    debug_assert!((0.0..1.0).contains(&x));
    let x2 = x * x;
    let f = (1.0 + x).powi(3) * (2.0 - 2.0 * x + x2) / (4.0 * (1.0 + x2));
    let g = 2.0 * ((2.0 + x2) / (1.0 + x2)) * ((1.0 - x2) / (2.0 - x2)).powi(3);
    (f, g)
}

/// The L = 0 output and estimation blocks used for the Rayleigh split of
/// lambda into (F, G).
struct SplitBlocks {
    rf: RBlock,
    rg: RBlock,
}

impl SplitBlocks {
    fn new(dim: usize) -> Self {
        let table = LogFactorialTable::for_blocks(dim, 0);
        Self {
            rf: build_rf(&table, 0, dim).expect("capacity sized for dim"),
            rg: build_rg(&table, 0, dim).expect("capacity sized for dim"),
        }
    }

    fn split(&self, state: &SchmidtState) -> (f64, f64) {
        let v = state.coeffs();
        (self.rf.quadratic_form(v), self.rg.quadratic_form(v))
    }
}

fn point_and_state(
    scanner: &BlockScanner,
    blocks: &SplitBlocks,
    p: f64,
) -> Result<(TradeoffPoint, SchmidtState), PointError> {
    let scan = scanner
        .scan(p)
        .map_err(|source| PointError::Solver { p, source })?;
    let state = scan
        .optimal_state
        .ok_or(PointError::OffDiagonalOptimum {
            p,
            l_star: scan.l_star,
        })?;
    let (f, g) = blocks.split(&state);
    let point = TradeoffPoint {
        p,
        lambda_max: scan.lambda_max,
        f,
        g,
        l_star: scan.l_star,
        dim: scanner.params().dim,
        iterations: scan.iterations,
    };
    Ok((point, state))
}

fn point_at(
    scanner: &BlockScanner,
    blocks: &SplitBlocks,
    p: f64,
) -> Result<TradeoffPoint, PointError> {
    point_and_state(scanner, blocks, p).map(|(point, _)| point)
}

/// Evaluates the trade-off curve over `p_grid`. Failed points are reported
/// in place without aborting the rest of the scan; output order follows the
/// grid order.
pub fn scan_p(p_grid: &[f64], params: &ScanParams) -> Result<Vec<Result<TradeoffPoint, PointError>>, EigError> {
    let scanner = BlockScanner::new(params.clone())?;
    let blocks = SplitBlocks::new(params.dim);
    Ok(par::map_collect(p_grid, |&p| {
        point_at(&scanner, &blocks, p)
    }))
}

/// Maps scanned points to (F, delta_G) with delta_G = G - G_BK(F), the gap
/// to the optimal Gaussian curve evaluated at each point's own F.
pub fn delta_g_curve(points: &[TradeoffPoint]) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|pt| {
            // F sits in [0.5, 1) up to rounding noise at the p = 0 endpoint
            let f = pt.f.clamp(0.5, 1.0 - 1e-16);
            (pt.f, pt.g - gaussian_g_unchecked(f))
        })
        .collect()
}

fn locate_f(
    f_target: f64,
    scanner: &BlockScanner,
    blocks: &SplitBlocks,
) -> Result<(TradeoffPoint, SchmidtState), TradeoffError> {
    const F_TOL: f64 = 1e-4;
    const P_HI: f64 = 0.999;

    if !(0.5..1.0).contains(&f_target) {
        return Err(TradeoffError::FidelityOutOfRange(f_target));
    }
    let lo_pair = point_and_state(scanner, blocks, 0.0)?;
    if (lo_pair.0.f - f_target).abs() <= F_TOL {
        return Ok(lo_pair);
    }
    let hi_pair = point_and_state(scanner, blocks, P_HI)?;
    if f_target > hi_pair.0.f {
        return Err(TradeoffError::UnreachableTarget {
            target: f_target,
            max_f: hi_pair.0.f,
        });
    }

    let (mut lo, mut f_lo) = (0.0, lo_pair.0.f);
    let (mut hi, mut f_hi) = (P_HI, hi_pair.0.f);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let pair = point_and_state(scanner, blocks, mid)?;
        if (pair.0.f - f_target).abs() <= F_TOL {
            return Ok(pair);
        }
        if pair.0.f < f_target {
            lo = mid;
            f_lo = pair.0.f;
        } else {
            hi = mid;
            f_hi = pair.0.f;
        }
    }
    Err(TradeoffError::BisectionStalled {
        target: f_target,
        f_lo,
        f_hi,
    })
}

/// Locates the scan point whose output fidelity matches `f_target` by
/// bisection on p (F is nondecreasing in p), to |F - target| <= 1e-4.
pub fn find_p_for_f(f_target: f64, params: &ScanParams) -> Result<TradeoffPoint, TradeoffError> {
    let scanner = BlockScanner::new(params.clone())?;
    let blocks = SplitBlocks::new(params.dim);
    locate_f(f_target, &scanner, &blocks).map(|(point, _)| point)
}

/// A located trade-off point together with its optimal resource state.
#[derive(Debug, Clone)]
pub struct OptimalState {
    pub point: TradeoffPoint,
    pub state: SchmidtState,
}

/// Like [`find_p_for_f`], but also returns the optimal Schmidt state at the
/// located point.
pub fn find_optimal_state(
    f_target: f64,
    params: &ScanParams,
) -> Result<OptimalState, TradeoffError> {
    let scanner = BlockScanner::new(params.clone())?;
    let blocks = SplitBlocks::new(params.dim);
    let (point, state) = locate_f(f_target, &scanner, &blocks)?;
    Ok(OptimalState { point, state })
}

/// Coefficient differences c_n - c~_n against the TMSV whose closed-form
/// output fidelity equals `f_match`.
pub fn schmidt_delta(
    state: &SchmidtState,
    f_match: f64,
) -> Result<Vec<(usize, f64)>, TradeoffError> {
    if !(0.5..1.0).contains(&f_match) {
        return Err(TradeoffError::FidelityOutOfRange(f_match));
    }
    let lambda = lambda_for_bk_f(f_match);
    let reference = tmsv(lambda, state.dim())?.state;
    Ok(state
        .coeffs()
        .iter()
        .zip(reference.coeffs())
        .enumerate()
        .map(|(n, (c, c_ref))| (n, c - c_ref))
        .collect())
}

/// TMSV weight lambda = tanh(r) whose BK output fidelity equals `f`.
pub fn lambda_for_bk_f(f: f64) -> f64 {
    // e^(-2r) = 1/f - 1
    let r = -0.5 * (1.0 / f - 1.0).ln();
    r.tanh()
}
