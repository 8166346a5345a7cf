//! Self-verification: oracle equivalence, dense cross-checks, domination
//! ordering, and Monte-Carlo consistency. Prints one PASS/FAIL line per
//! check and exits nonzero on any failure.

use crate::{CliError, EXIT_OK};
use anyhow::anyhow;

use mdm_core::eig::{block_scan, dominant_eig, small_n_crosscheck, BlockScanner, ScanParams};
use mdm_core::numerics::LogFactorialTable;
use mdm_core::operator::{build_r, build_rf, build_rg};
use mdm_core::oracle::{mc_fidelities, oracle_fidelities, QuadratureRule};
use mdm_core::schmidt::{fidelity_estimation, fidelity_output, tmsv, SchmidtState};
use mdm_core::tradeoff::{bk_fidelities, gaussian_tradeoff_g};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run(seed: u64, mc_samples: usize, corrupt: bool) -> Result<u8, CliError> {
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("quadrature_moments", quadrature_moments()),
        ("bk_tradeoff_identity", bk_identity()),
        ("oracle_vs_series", oracle_vs_series(seed)),
        ("mc_vs_series", mc_vs_series(seed, mc_samples)),
        ("small_n_crosscheck", crosscheck(corrupt)),
        ("block_domination", domination()),
        ("rayleigh_split", rayleigh_split()),
    ];

    let mut failed = 0usize;
    for (name, outcome) in &checks {
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        println!("all {} checks passed", checks.len());
        Ok(EXIT_OK)
    } else {
        Err(CliError::numerical(anyhow!(
            "{failed} of {} checks failed",
            checks.len()
        )))
    }
}

fn quadrature_moments() -> Result<(), String> {
    let rule = QuadratureRule::new(64).map_err(|e| e.to_string())?;
    let mut factorial = 1.0;
    for k in 0..=40usize {
        if k > 0 {
            factorial *= k as f64;
        }
        let exact = factorial / 2f64.powi(k as i32 + 1);
        let got = rule.integrate(|t| t.powi(k as i32));
        let rel = ((got - exact) / exact).abs();
        if rel > 1e-12 {
            return Err(format!("moment {k}: relative error {rel:.3e}"));
        }
    }
    Ok(())
}

fn bk_identity() -> Result<(), String> {
    for i in 0..=200 {
        let r = 2.0 * i as f64 / 200.0;
        let (f, g) = bk_fidelities(r);
        let g_curve = gaussian_tradeoff_g(f).map_err(|e| e.to_string())?;
        if (g - g_curve).abs() > 1e-12 {
            return Err(format!("mismatch {:.3e} at r = {r}", (g - g_curve).abs()));
        }
    }
    Ok(())
}

fn random_state(rng: &mut ChaCha8Rng) -> SchmidtState {
    let dim = rng.gen_range(1..=50);
    let mut coeffs: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    SchmidtState::new(coeffs).expect("normalized nonnegative coefficients")
}

fn oracle_vs_series(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..25 {
        let state = random_state(&mut rng);
        let o = oracle_fidelities(&state, 64).map_err(|e| e.to_string())?;
        let df = (o.f - fidelity_output(&state)).abs();
        let dg = (o.g - fidelity_estimation(&state)).abs();
        if df > 1e-10 || dg > 1e-10 {
            return Err(format!("state {i}: |dF| = {df:.3e}, |dG| = {dg:.3e}"));
        }
    }
    Ok(())
}

fn mc_vs_series(seed: u64, samples: usize) -> Result<(), String> {
    let state = tmsv(0.5, 30).map_err(|e| e.to_string())?.state;
    let mc = mc_fidelities(&state, samples, seed).map_err(|e| e.to_string())?;
    let f = fidelity_output(&state);
    let g = fidelity_estimation(&state);
    if (mc.f - f).abs() > 3.0 * mc.f_stderr {
        return Err(format!(
            "F off by {:.3e} with stderr {:.3e}",
            (mc.f - f).abs(),
            mc.f_stderr
        ));
    }
    if (mc.g - g).abs() > 3.0 * mc.g_stderr {
        return Err(format!(
            "G off by {:.3e} with stderr {:.3e}",
            (mc.g - g).abs(),
            mc.g_stderr
        ));
    }
    Ok(())
}

/// Dense full-space diagonalization against the blockwise maximum over the
/// blocks that tile the truncated product space (block +-L at dimension
/// dim - |L|). With `corrupt` one matrix entry is bumped to prove the
/// comparison detects a broken block.
fn crosscheck(corrupt: bool) -> Result<(), String> {
    for dim in 2..=5usize {
        let table = LogFactorialTable::for_blocks(dim, dim);
        for i in 0..=4 {
            let p = i as f64 / 4.0;
            let full = small_n_crosscheck(p, dim).map_err(|e| e.to_string())?;
            let mut blockwise = f64::NEG_INFINITY;
            for l in -(dim as i32 - 1)..=(dim as i32 - 1) {
                let sub = dim - l.unsigned_abs() as usize;
                let mut block = build_r(&table, p, l, sub).map_err(|e| e.to_string())?;
                if corrupt && l == 0 && sub >= 2 {
                    block.bump_entry(0, 1, 1e-6);
                }
                let eig = dominant_eig(&block, 1e-13, 200_000).map_err(|e| e.to_string())?;
                blockwise = blockwise.max(eig.eigenvalue);
            }
            if (full - blockwise).abs() > 1e-10 {
                return Err(format!(
                    "dim {dim}, p = {p}: full {full:.15} vs blockwise {blockwise:.15}"
                ));
            }
        }
    }
    Ok(())
}

fn domination() -> Result<(), String> {
    let dim = 40;
    let mut params = ScanParams::with_dim(dim, 3);
    params.verify_blocks = true;
    let scanner = BlockScanner::new(params).map_err(|e| e.to_string())?;
    for i in 0..=4 {
        let p = i as f64 / 4.0;
        let scan = scanner.scan(p).map_err(|e| e.to_string())?;
        for l in 1..=3i32 {
            let lam = |label: i32| {
                scan.block_eigenvalues
                    .iter()
                    .find(|(x, _)| *x == label)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| format!("missing block {label}"))
            };
            let minus = lam(-l)?;
            let plus = lam(l)?;
            if minus < plus - 1e-12 {
                return Err(format!("p = {p}: lambda(-{l}) = {minus} < lambda(+{l}) = {plus}"));
            }
        }
    }
    Ok(())
}

fn rayleigh_split() -> Result<(), String> {
    let dim = 40;
    let table = LogFactorialTable::for_blocks(dim, 0);
    let rf = build_rf(&table, 0, dim).map_err(|e| e.to_string())?;
    let rg = build_rg(&table, 0, dim).map_err(|e| e.to_string())?;
    let params = ScanParams::with_dim(dim, 4);
    for i in 0..=4 {
        let p = i as f64 / 4.0;
        let scan = block_scan(p, &params).map_err(|e| e.to_string())?;
        let state = scan
            .optimal_state
            .ok_or_else(|| format!("no diagonal optimum at p = {p}"))?;
        let f = rf.quadratic_form(state.coeffs());
        let g = rg.quadratic_form(state.coeffs());
        let gap = (p * f + (1.0 - p) * g - scan.lambda_max).abs();
        if gap > 1e-10 {
            return Err(format!("p = {p}: |pF + (1-p)G - lambda| = {gap:.3e}"));
        }
    }
    Ok(())
}
