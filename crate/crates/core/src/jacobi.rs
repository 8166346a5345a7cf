//! Cyclic Jacobi eigenvalue sweep for dense symmetric matrices.
//!
//! Kept deliberately separate from the power-iteration path: this is the
//! reference method the cross-checks diagonalize against, so it must share
//! no code with what it verifies.

/// All eigenvalues of the symmetric matrix `a` (row-major, `n` x `n`),
/// sorted descending. `a` is consumed as scratch space.
pub(crate) fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return vec![a[0]];
    }

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j] * a[i * n + j];
            }
        }
        s
    };
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    let target = norm * 1e-30;

    for _sweep in 0..64 {
        if off(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Stable rotation angle: tan(theta) from the smaller root.
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matrix_returns_diagonal() {
        let a = vec![0.5, 0.0, 0.0, 0.25];
        let eigs = symmetric_eigenvalues(a, 2);
        assert_eq!(eigs, vec![0.5, 0.25]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[1/2, 1/8], [1/8, 1/4]] has top eigenvalue (3 + sqrt(2)) / 8.
        let a = vec![0.5, 0.125, 0.125, 0.25];
        let eigs = symmetric_eigenvalues(a, 2);
        assert_relative_eq!(eigs[0], (3.0 + 2f64.sqrt()) / 8.0, max_relative = 1e-14);
        assert_relative_eq!(eigs[1], (3.0 - 2f64.sqrt()) / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn trace_and_frobenius_norm_preserved() {
        // Deterministic dense symmetric test matrix.
        let n = 12;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] =
                    ((i * j + i + j) % 13) as f64 / 13.0 + if i == j { 1.0 } else { 0.0 };
            }
        }
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let frob: f64 = a.iter().map(|x| x * x).sum();
        let eigs = symmetric_eigenvalues(a, n);
        let eig_sum: f64 = eigs.iter().sum();
        let eig_sq: f64 = eigs.iter().map(|x| x * x).sum();
        assert_relative_eq!(trace, eig_sum, max_relative = 1e-12);
        assert_relative_eq!(frob, eig_sq, max_relative = 1e-12);
    }
}
