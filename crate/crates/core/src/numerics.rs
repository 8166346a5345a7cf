//! Log-domain combinatorics shared by the operator builders and fidelity
//! series.
//!
//! Binomial coefficients such as C(1000, 500) overflow `f64` long before the
//! matrix elements they feed into leave the unit interval, so every
//! combinatorial factor is assembled from a precomputed table of ln(k!) and
//! exponentiated only once per element.

use thiserror::Error;

use std::f64::consts::LN_2;

/// Capacity violation raised when a factorial argument exceeds the table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("log-factorial table of capacity {capacity} cannot serve k = {required}; rebuild the table with capacity >= {required}")]
pub struct CapacityError {
    /// Largest index the table can serve.
    pub capacity: usize,
    /// Index that was requested.
    pub required: usize,
}

/// Precomputed values of ln(k!) for k = 0..=capacity.
///
/// Immutable after construction; shared freely between worker threads.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    /// Table serving ln(k!) for all k <= `capacity`.
    pub fn new(capacity: usize) -> Self {
        let mut values = Vec::with_capacity(capacity + 1);
        values.push(0.0);
        // Compensated running sum of ln(k); keeps the absolute error of each
        // entry near eps * ln(k!) instead of growing with k.
        let mut sum = 0.0_f64;
        let mut comp = 0.0_f64;
        for k in 1..=capacity {
            let term = (k as f64).ln() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
            values.push(sum);
        }
        Self { values }
    }

    /// Table sized for blocks of dimension `dim` with photon-number
    /// difference up to `l_max`: the largest factorial argument of an
    /// element is (dim-1) + (dim-1) + l_max.
    pub fn for_blocks(dim: usize, l_max: usize) -> Self {
        Self::new(2 * dim + l_max + 2)
    }

    /// Largest k this table can serve.
    pub fn capacity(&self) -> usize {
        self.values.len() - 1
    }

    /// ln(k!).
    pub fn log_factorial(&self, k: usize) -> Result<f64, CapacityError> {
        self.values.get(k).copied().ok_or(CapacityError {
            capacity: self.capacity(),
            required: k,
        })
    }

    /// Unchecked lookup for builders that have validated capacity up front.
    #[inline]
    pub(crate) fn lf(&self, k: usize) -> f64 {
        debug_assert!(k < self.values.len());
        self.values[k]
    }

    /// sqrt(C(n+m+L, n) * C(n+m+L, m)) / 2^(L+n+m+1), evaluated entirely in
    /// the log domain so that no intermediate quantity overflows even for
    /// n + m + L past 1000.
    ///
    /// Symmetric in (n, m); every value lies in (0, 1/2].
    pub fn sqrt_binom_product(
        &self,
        n: usize,
        m: usize,
        l: usize,
    ) -> Result<f64, CapacityError> {
        let k = n + m + l;
        if k > self.capacity() {
            return Err(CapacityError {
                capacity: self.capacity(),
                required: k,
            });
        }
        // canonical argument order makes the (n, m) symmetry bit-exact
        let (a, b) = if n <= m { (n, m) } else { (m, n) };
        let log_num = 2.0 * self.lf(k);
        let log_den = self.lf(a) + self.lf(b) + self.lf(a + l) + self.lf(b + l);
        let exponent = 0.5 * (log_num - log_den) - (k + 1) as f64 * LN_2;
        Ok(exponent.exp())
    }
}
