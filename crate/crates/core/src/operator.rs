//! Truncated blocks of the trade-off operator, labelled by the photon-number
//! difference L between input and output modes.
//!
//! The output-fidelity block is the same for +L and -L; the estimation block
//! is diagonal and is the only constructor sensitive to the sign of L.

use crate::numerics::{CapacityError, LogFactorialTable};
use crate::par;
use thiserror::Error;

use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockKind {
    OutputFidelity,
    EstimationFidelity,
    Combined { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("block dimension must be at least 1")]
    EmptyBlock,
    #[error("weight p must lie in [0, 1], got {0}")]
    WeightOutOfRange(f64),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// Dense symmetric block of R_F, R_G, or R(p) at photon-number difference L.
#[derive(Debug, Clone, PartialEq)]
pub struct RBlock {
    l: i32,
    dim: usize,
    kind: BlockKind,
    /// Row-major `dim * dim`, exactly symmetric by construction.
    entries: Vec<f64>,
}

impl RBlock {
    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// out = R v.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (row, slot) in self.entries.chunks_exact(self.dim).zip(out.iter_mut()) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            *slot = acc;
        }
    }

    /// v^T R v, accumulated row by row in fixed order.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        let mut total = 0.0;
        for (row, &vi) in self.entries.chunks_exact(self.dim).zip(v) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            total += vi * acc;
        }
        total
    }

    /// Writes the block as CSV, one row per line, for cross-checking against
    /// external linear-algebra tools.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for row in self.entries.chunks_exact(self.dim) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Debug hook for verification harnesses: perturbs entry (i, j) (and its
    /// mirror) so downstream checks can prove they detect corruption.
    pub fn bump_entry(&mut self, i: usize, j: usize, delta: f64) {
        self.entries[i * self.dim + j] += delta;
        if i != j {
            self.entries[j * self.dim + i] += delta;
        }
    }
}

fn check_dims(table: &LogFactorialTable, l: i32, dim: usize) -> Result<usize, OperatorError> {
    if dim == 0 {
        return Err(OperatorError::EmptyBlock);
    }
    let l_abs = l.unsigned_abs() as usize;
    let required = 2 * (dim - 1) + l_abs;
    if required > table.capacity() {
        return Err(OperatorError::Capacity(CapacityError {
            capacity: table.capacity(),
            required,
        }));
    }
    Ok(l_abs)
}

/// Output-fidelity block: entry (n, m) = sqrt(C(n+m+|L|, n) C(n+m+|L|, m)) /
/// 2^(|L|+n+m+1). Identical for +L and -L.
pub fn build_rf(table: &LogFactorialTable, l: i32, dim: usize) -> Result<RBlock, OperatorError> {
    let l_abs = check_dims(table, l, dim)?;
    let mut entries = vec![0.0; dim * dim];
    par::for_each_row(&mut entries, dim, |n, row| {
        for (m, slot) in row.iter_mut().enumerate().skip(n) {
            *slot = table
                .sqrt_binom_product(n, m, l_abs)
                .expect("capacity checked above");
        }
    });
    // mirror the strict upper triangle so symmetry is exact
    for n in 0..dim {
        for m in 0..n {
            entries[n * dim + m] = entries[m * dim + n];
        }
    }
    Ok(RBlock {
        l,
        dim,
        kind: BlockKind::OutputFidelity,
        entries,
    })
}

/// Diagonal values of the estimation block: 1/2^(n+L+1) for L >= 0 and
/// 1/2^(n+1) for L < 0.
pub(crate) fn rg_diagonal(l: i32, dim: usize) -> Vec<f64> {
    let shift = if l >= 0 { l } else { 0 };
    (0..dim)
        .map(|n| 2f64.powi(-(n as i32 + shift + 1)))
        .collect()
}

/// Estimation-fidelity block; diagonal, and the only builder for which the
/// sign of L changes the result.
pub fn build_rg(table: &LogFactorialTable, l: i32, dim: usize) -> Result<RBlock, OperatorError> {
    check_dims(table, l, dim)?;
    let mut entries = vec![0.0; dim * dim];
    for (n, d) in rg_diagonal(l, dim).into_iter().enumerate() {
        entries[n * dim + n] = d;
    }
    Ok(RBlock {
        l,
        dim,
        kind: BlockKind::EstimationFidelity,
        entries,
    })
}

/// Combined block R(p) = p R_F + (1-p) R_G restricted to block L.
pub fn build_r(
    table: &LogFactorialTable,
    p: f64,
    l: i32,
    dim: usize,
) -> Result<RBlock, OperatorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(OperatorError::WeightOutOfRange(p));
    }
    let rf = build_rf(table, l, dim)?;
    Ok(combine(p, &rf, &rg_diagonal(l, dim)))
}

/// p * R_F + (1-p) * diag(rg). Factored out so that p-sweeps can reuse one
/// R_F build per L; the arithmetic per entry is identical to `build_r`.
pub(crate) fn combine(p: f64, rf: &RBlock, rg_diag: &[f64]) -> RBlock {
    debug_assert_eq!(rg_diag.len(), rf.dim);
    let dim = rf.dim;
    let q = 1.0 - p;
    let mut entries: Vec<f64> = rf.entries.iter().map(|&x| p * x).collect();
    for (n, &d) in rg_diag.iter().enumerate() {
        entries[n * dim + n] += q * d;
    }
    RBlock {
        l: rf.l,
        dim,
        kind: BlockKind::Combined { p },
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(dim: usize, l_max: usize) -> LogFactorialTable {
        LogFactorialTable::for_blocks(dim, l_max)
    }

    #[test]
    fn rf_block_l0_n2() {
        let t = table(2, 0);
        let b = build_rf(&t, 0, 2).unwrap();
        assert_relative_eq!(b.entry(0, 0), 0.5, max_relative = 1e-14);
        assert_relative_eq!(b.entry(0, 1), 0.25, max_relative = 1e-14);
        assert_relative_eq!(b.entry(1, 0), 0.25, max_relative = 1e-14);
        assert_relative_eq!(b.entry(1, 1), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn rf_sign_blind_and_corner_value() {
        let t = table(6, 3);
        let plus = build_rf(&t, 3, 6).unwrap();
        let minus = build_rf(&t, -3, 6).unwrap();
        assert_eq!(plus.entries(), minus.entries());
        // (0,0) entry is 1/2^(|L|+1)
        assert_relative_eq!(plus.entry(0, 0), 1.0 / 16.0, max_relative = 1e-14);

        let one = build_rf(&t, 1, 1).unwrap();
        assert_relative_eq!(one.entry(0, 0), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn rg_sign_sensitivity() {
        let t = table(2, 1);
        let zero = build_rg(&t, 0, 2).unwrap();
        assert_eq!(zero.entry(0, 0), 0.5);
        assert_eq!(zero.entry(1, 1), 0.25);
        assert_eq!(zero.entry(0, 1), 0.0);

        let plus = build_rg(&t, 1, 1).unwrap();
        assert_eq!(plus.entry(0, 0), 0.25);
        let minus = build_rg(&t, -1, 1).unwrap();
        assert_eq!(minus.entry(0, 0), 0.5);
    }

    #[test]
    fn rg_trace_is_geometric_sum() {
        let t = table(24, 0);
        let b = build_rg(&t, 0, 24).unwrap();
        let trace: f64 = (0..24).map(|i| b.entry(i, i)).sum();
        assert_relative_eq!(trace, 1.0 - 2f64.powi(-24), max_relative = 1e-14);
    }

    #[test]
    fn combined_block_collapses_at_weight_endpoints() {
        let t = table(5, 2);
        let rf = build_rf(&t, -2, 5).unwrap();
        let rg = build_rg(&t, -2, 5).unwrap();
        let at_one = build_r(&t, 1.0, -2, 5).unwrap();
        let at_zero = build_r(&t, 0.0, -2, 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(at_one.entry(i, j), rf.entry(i, j));
                assert_eq!(at_zero.entry(i, j), rg.entry(i, j));
            }
        }
    }

    #[test]
    fn combined_block_halfway_example() {
        let t = table(2, 0);
        let b = build_r(&t, 0.5, 0, 2).unwrap();
        assert_relative_eq!(b.entry(0, 0), 0.5, max_relative = 1e-14);
        assert_relative_eq!(b.entry(0, 1), 0.125, max_relative = 1e-14);
        assert_relative_eq!(b.entry(1, 1), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn combined_rejects_bad_weight() {
        let t = table(2, 0);
        assert!(matches!(
            build_r(&t, 1.5, 0, 2),
            Err(OperatorError::WeightOutOfRange(_))
        ));
        assert!(matches!(
            build_r(&t, -0.1, 0, 2),
            Err(OperatorError::WeightOutOfRange(_))
        ));
    }

    #[test]
    fn capacity_error_propagates() {
        let small = LogFactorialTable::new(4);
        assert!(matches!(
            build_rf(&small, 0, 100),
            Err(OperatorError::Capacity(_))
        ));
    }

    #[test]
    fn elementwise_domination_between_signed_blocks() {
        // R_F is sign-blind and R_G^(-L) >= R_G^(+L) entrywise, so the
        // combined -L block dominates +L entry by entry.
        let t = table(50, 3);
        for l in 1..=3 {
            for &p in &[0.0, 0.3, 0.7, 1.0] {
                let minus = build_r(&t, p, -l, 50).unwrap();
                let plus = build_r(&t, p, l, 50).unwrap();
                for (a, b) in minus.entries().iter().zip(plus.entries()) {
                    assert!(a >= b);
                }
            }
        }
    }

    #[test]
    fn matvec_and_quadratic_form_agree() {
        let t = table(8, 0);
        let b = build_r(&t, 0.37, 0, 8).unwrap();
        let v: Vec<f64> = (0..8).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let mut out = vec![0.0; 8];
        b.matvec(&v, &mut out);
        let dot: f64 = v.iter().zip(&out).map(|(a, b)| a * b).sum();
        assert_relative_eq!(dot, b.quadratic_form(&v), max_relative = 1e-14);
    }

    #[test]
    fn csv_dump_has_one_line_per_row() {
        let t = table(3, 0);
        let b = build_rf(&t, 0, 3).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 3);
    }
}
