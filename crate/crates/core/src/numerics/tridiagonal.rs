//! Symmetric tridiagonal determinants and linear solves.

use crate::error::{Error, Result};

/// Determinant of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `offdiag` (`offdiag.len() == diag.len() - 1`), via the
/// three-term minor recursion
///
/// ```text
/// d_0 = 1,  d_1 = diag[0],  d_k = diag[k-1] * d_{k-1} - offdiag[k-2]^2 * d_{k-2}
/// ```
///
/// Exact up to floating-point rounding; an empty matrix has determinant 1.
/// Non-finite inputs propagate to a non-finite result rather than erroring.
pub fn tridiagonal_determinant(diag: &[f64], offdiag: &[f64]) -> f64 {
    assert_eq!(
        offdiag.len(),
        diag.len().saturating_sub(1),
        "offdiag must have one entry fewer than diag"
    );
    let (det, _) = minor_recursion(diag, offdiag, |_| {});
    det
}

/// Same recursion, but reporting every leading principal minor to `observe`.
/// The minors decide positive definiteness: the matrix is positive definite
/// iff all of them are positive.
pub(crate) fn minor_recursion(
    diag: &[f64],
    offdiag: &[f64],
    mut observe: impl FnMut(f64),
) -> (f64, bool) {
    let mut prev = 1.0f64; // d_{k-2}
    let mut cur = 1.0f64; // d_{k-1}, starts as the empty-matrix determinant
    let mut all_positive = true;
    for (k, &d) in diag.iter().enumerate() {
        let next = if k == 0 {
            d
        } else {
            d * cur - offdiag[k - 1] * offdiag[k - 1] * prev
        };
        observe(next);
        if !(next > 0.0) {
            all_positive = false;
        }
        prev = cur;
        cur = next;
    }
    (cur, all_positive)
}

/// Solve the symmetric tridiagonal system `A x = rhs` by the Thomas
/// algorithm (no pivoting). Errors with `NewtonDivergence` semantics are the
/// caller's business; here a vanishing pivot is reported as `FocalPoint`
/// since in this crate such systems arise as lattice Hessians whose pivots
/// vanish exactly at focal configurations.
pub fn tridiagonal_solve(diag: &[f64], offdiag: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0f64; n]; // modified upper band
    let mut d = vec![0.0f64; n]; // modified rhs
    let scale = diag.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tiny = 1e-14 * scale;

    let mut pivot = diag[0];
    if pivot.abs() < tiny || !pivot.is_finite() {
        return Err(Error::FocalPoint { sin_omega_t: pivot / scale });
    }
    c[0] = if n > 1 { offdiag[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - offdiag[i - 1] * c[i - 1];
        if pivot.abs() < tiny || !pivot.is_finite() {
            return Err(Error::FocalPoint { sin_omega_t: pivot / scale });
        }
        if i + 1 < n {
            c[i] = offdiag[i] / pivot;
        }
        d[i] = (rhs[i] - offdiag[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense determinant by cofactor expansion along the first row; the
    /// independent oracle for the recursion (kept well away from the
    /// three-term formula on purpose).
    fn dense_determinant(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 0 {
            return 1.0;
        }
        if n == 1 {
            return m[0][0];
        }
        let mut det = 0.0;
        for col in 0..n {
            if m[0][col] == 0.0 {
                continue;
            }
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != col)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * m[0][col] * dense_determinant(&minor);
        }
        det
    }

    fn dense_from_bands(diag: &[f64], offdiag: &[f64]) -> Vec<Vec<f64>> {
        let n = diag.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = diag[i];
            if i + 1 < n {
                m[i][i + 1] = offdiag[i];
                m[i + 1][i] = offdiag[i];
            }
        }
        m
    }

    #[test]
    fn second_difference_matrix_counts_slices() {
        // det of the n x n tridiag(2, -1) matrix is n + 1.
        assert_eq!(tridiagonal_determinant(&[2.0, 2.0, 2.0], &[-1.0, -1.0]), 4.0);
        let diag = vec![2.0; 8];
        let off = vec![-1.0; 7];
        assert_eq!(tridiagonal_determinant(&diag, &off), 9.0);
    }

    #[test]
    fn empty_and_single_entry() {
        assert_eq!(tridiagonal_determinant(&[], &[]), 1.0);
        assert_eq!(tridiagonal_determinant(&[7.5], &[]), 7.5);
    }

    #[test]
    fn solve_recovers_known_solution() {
        // A = tridiag(-1, 4, -1), x = [1, 2, 3] => rhs = A x.
        let diag = [4.0, 4.0, 4.0];
        let off = [-1.0, -1.0];
        let rhs = [4.0 - 2.0, 8.0 - 4.0, 12.0 - 2.0];
        let x = tridiagonal_solve(&diag, &off, &rhs).unwrap();
        for (got, want) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        // tridiag(1, -1) with diag 1: second pivot is 1 - 1 = 0.
        let err = tridiagonal_solve(&[1.0, 1.0], &[-1.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err.code(), "focal_point");
    }

    proptest! {
        #[test]
        fn matches_dense_cofactor_oracle(
            diag in proptest::collection::vec(-3.0f64..3.0, 1..=8),
            seed in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let off: Vec<f64> = seed[..diag.len() - 1].to_vec();
            let got = tridiagonal_determinant(&diag, &off);
            let want = dense_determinant(&dense_from_bands(&diag, &off));
            let scale = want.abs().max(1.0);
            prop_assert!((got - want).abs() <= 1e-12 * scale,
                "recursion {got} vs dense {want}");
        }

        #[test]
        fn solve_is_consistent_with_multiply(
            diag in proptest::collection::vec(3.0f64..6.0, 2..=10),
            seed in proptest::collection::vec(-1.0f64..1.0, 10),
            rhs_seed in proptest::collection::vec(-2.0f64..2.0, 10),
        ) {
            // Diagonally dominant by construction, so the solve is stable.
            let n = diag.len();
            let off: Vec<f64> = seed[..n - 1].to_vec();
            let rhs: Vec<f64> = rhs_seed[..n].to_vec();
            let x = tridiagonal_solve(&diag, &off, &rhs).unwrap();
            for i in 0..n {
                let mut ax = diag[i] * x[i];
                if i > 0 { ax += off[i - 1] * x[i - 1]; }
                if i + 1 < n { ax += off[i] * x[i + 1]; }
                prop_assert!((ax - rhs[i]).abs() <= 1e-10 * rhs[i].abs().max(1.0));
            }
        }
    }
}
