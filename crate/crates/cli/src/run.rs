//! Implementations of the CSV-producing subcommands.

use crate::grid::GridSpec;
use crate::{CliError, SolverOpts, EXIT_OK, EXIT_PARTIAL};
use anyhow::{anyhow, Context};

use mdm_core::gaussianity::{gaussianity_witness, GaussianityReport};
use mdm_core::numerics::LogFactorialTable;
use mdm_core::operator::{build_r, build_rf, build_rg, RBlock};
use mdm_core::schmidt::{save_state, tmsv};
use mdm_core::tradeoff::{
    bk_fidelities, delta_g_curve, find_optimal_state, lambda_for_bk_f,
    photon_subtracted_fidelities, scan_p,
};

use std::fmt::Write as _;
use std::path::Path;

type CmdResult = Result<u8, CliError>;

fn usage(e: anyhow::Error) -> CliError {
    CliError::usage(e)
}

fn numerical(e: anyhow::Error) -> CliError {
    CliError::numerical(e)
}

/// All floats are written with 17 significant digits, '.' decimal
/// separator, and '\n' line endings, so identical runs produce
/// byte-identical files.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(numerical)
}

pub fn tradeoff(solver: &SolverOpts, p_grid: GridSpec, out: &Path) -> CmdResult {
    p_grid.require_within(0.0, 1.0, "p").map_err(usage)?;
    let params = solver.params().map_err(usage)?;
    let grid = p_grid.points();

    let results = scan_p(&grid, &params).map_err(|e| numerical(e.into()))?;
    let mut failures = 0usize;
    let mut rows = Vec::new();
    for result in results {
        match result {
            Ok(pt) => rows.push(pt),
            Err(e) => {
                eprintln!("warning: {e}");
                failures += 1;
            }
        }
    }
    if rows.is_empty() {
        return Err(numerical(anyhow!(
            "no grid point succeeded ({failures} failures)"
        )));
    }

    let deltas = delta_g_curve(&rows);
    let mut csv = String::from("p,lambda_max,F,G,L_star,N,iterations,G_bk_at_F,delta_G\n");
    for (pt, (_, dg)) in rows.iter().zip(&deltas) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            fmt(pt.p),
            fmt(pt.lambda_max),
            fmt(pt.f),
            fmt(pt.g),
            pt.l_star,
            pt.dim,
            pt.iterations,
            fmt(pt.g - dg),
            fmt(*dg),
        );
    }
    write_file(out, &csv)?;

    Ok(if failures == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

pub fn baselines(r_grid: GridSpec, x_grid: GridSpec, out: &Path) -> CmdResult {
    r_grid
        .require_within(0.0, f64::INFINITY, "r")
        .map_err(usage)?;
    x_grid.require_within(0.0, 0.999999, "x").map_err(usage)?;

    let mut csv = String::from("kind,parameter,F,G\n");
    for r in r_grid.points() {
        let (f, g) = bk_fidelities(r);
        let _ = writeln!(csv, "bk,{},{},{}", fmt(r), fmt(f), fmt(g));
    }
    for x in x_grid.points() {
        let (f, g) = photon_subtracted_fidelities(x);
        let _ = writeln!(csv, "subtracted,{},{},{}", fmt(x), fmt(f), fmt(g));
    }
    write_file(out, &csv)?;
    Ok(EXIT_OK)
}

pub fn state(solver: &SolverOpts, target_f: f64, out_dir: &Path) -> CmdResult {
    let params = solver.params().map_err(usage)?;
    if !(0.5..1.0).contains(&target_f) {
        return Err(usage(anyhow!(
            "--target-f must lie in [0.5, 1), got {target_f}"
        )));
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(numerical)?;

    let found = find_optimal_state(target_f, &params).map_err(|e| numerical(e.into()))?;
    let point = &found.point;

    let state_path = out_dir.join("state.txt");
    save_state(
        &found.state,
        &state_path,
        &[
            &format!("optimal state at F = {} (target {target_f})", fmt(point.f)),
            &format!("p = {}, lambda_max = {}", fmt(point.p), fmt(point.lambda_max)),
        ],
    )
    .map_err(|e| numerical(e.into()))?;

    let report = gaussianity_witness(&found.state);
    let report_path = out_dir.join("gaussianity.txt");
    write_file(&report_path, &format!("{report}\n"))?;
    let report_csv_path = out_dir.join("gaussianity.csv");
    write_file(
        &report_csv_path,
        &format!("{}\n{}\n", GaussianityReport::csv_header(), report.csv_row()),
    )?;

    // reference TMSV matched by equal BK output fidelity
    let reference = tmsv(lambda_for_bk_f(point.f), params.dim)
        .map_err(|e| numerical(e.into()))?
        .state;
    let mut csv = String::from("n,c_n,c_tmsv_n,delta_c_n\n");
    for (n, (&c, &c_ref)) in found
        .state
        .coeffs()
        .iter()
        .zip(reference.coeffs())
        .enumerate()
    {
        let _ = writeln!(csv, "{n},{},{},{}", fmt(c), fmt(c_ref), fmt(c - c_ref));
    }
    let delta_path = out_dir.join("delta_c.csv");
    write_file(&delta_path, &csv)?;

    println!(
        "located p = {:.6}, F = {:.6}, G = {:.6} (dim {})",
        point.p, point.f, point.g, point.dim
    );
    println!("{report}");
    println!(
        "wrote {}, {}, {}, {}",
        state_path.display(),
        report_path.display(),
        report_csv_path.display(),
        delta_path.display()
    );
    Ok(EXIT_OK)
}

pub fn channel(solver: &SolverOpts, p_grid: GridSpec, out: &Path) -> CmdResult {
    p_grid.require_within(0.0, 1.0, "p").map_err(usage)?;
    let params = solver.params().map_err(usage)?;
    let grid = p_grid.points();

    let results =
        mdm_core::channel::channel_scan(&grid, &params).map_err(|e| numerical(e.into()))?;
    let mut failures = 0usize;
    let mut rows = Vec::new();
    for result in results {
        match result {
            Ok(pt) => rows.push(pt),
            Err(e) => {
                eprintln!("warning: {e}");
                failures += 1;
            }
        }
    }
    if rows.is_empty() {
        return Err(numerical(anyhow!("no grid point succeeded")));
    }

    let mut csv = String::from("p,f_av,f_gauss,r_star,cap_flag,f_opt,delta_f,artifact_flag\n");
    for pt in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt(pt.p),
            fmt(pt.f_av),
            fmt(pt.f_gauss),
            fmt(pt.r_star),
            u8::from(pt.capped),
            fmt(pt.f_opt),
            fmt(pt.delta_f),
            u8::from(pt.artifact),
        );
    }
    write_file(out, &csv)?;

    Ok(if failures == 0 { EXIT_OK } else { EXIT_PARTIAL })
}

pub fn dump(kind: &str, l: i32, dim: usize, p: f64, out: &Path) -> CmdResult {
    let table = LogFactorialTable::for_blocks(dim, l.unsigned_abs() as usize);
    let block: RBlock = match kind {
        "rf" => build_rf(&table, l, dim),
        "rg" => build_rg(&table, l, dim),
        "r" => build_r(&table, p, l, dim),
        other => return Err(usage(anyhow!("unknown block kind {other:?}; use rf, rg, or r"))),
    }
    .map_err(|e| numerical(e.into()))?;
    let mut buf = Vec::new();
    block.write_csv(&mut buf).map_err(|e| numerical(e.into()))?;
    let text = String::from_utf8(buf).expect("csv output is ascii");
    write_file(out, &text)?;
    Ok(EXIT_OK)
}
