//! Dense helpers: rank decisions, null spaces, factorization-based solves and
//! smallest-eigenvalue audits. Backed by `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Outcome of a numerical rank decision.
#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    pub sigma_max: f64,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// `σ_rank / σ_{rank+1}` (infinite when there is no trailing value).
    pub gap: f64,
}

impl RankInfo {
    pub fn full(&self, n: usize) -> bool {
        self.rank == n
    }

    /// Distance of the spectrum from the cutoff `rel_tol · σ_max`: the gap
    /// `σ_rank / σ_{rank+1}` when a trailing value exists, otherwise
    /// `σ_rank / (rel_tol · σ_max)`.
    pub fn margin(&self, rel_tol: f64) -> f64 {
        if self.rank == 0 {
            return f64::INFINITY;
        }
        match self.sigma.get(self.rank) {
            Some(_) => self.gap,
            None => self.sigma[self.rank - 1] / (rel_tol * self.sigma_max),
        }
    }
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Rank with cutoff `rel_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> RankInfo {
    let sigma = singular_values(m);
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return RankInfo {
            rank: 0,
            sigma_max,
            sigma,
            gap: f64::INFINITY,
        };
    }
    let cut = rel_tol * sigma_max;
    let rank = sigma.iter().take_while(|&&s| s > cut).count();
    let gap = match (rank.checked_sub(1).map(|i| sigma[i]), sigma.get(rank)) {
        (Some(a), Some(&b)) if b > 0.0 => a / b,
        _ => f64::INFINITY,
    };
    RankInfo {
        rank,
        sigma_max,
        sigma,
        gap,
    }
}

/// Orthonormal basis (as columns) of `{x : m x = 0}`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        return DMatrix::identity(n, n);
    }
    // Pad to a square matrix so that the SVD exposes every right singular
    // vector, including those of the trailing null space.
    let rows = m.nrows().max(n);
    let mut sq = DMatrix::zeros(rows, n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax;
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut || smax == 0.0)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Greedy column selection by modified Gram–Schmidt with column pivoting.
/// Returns the indices of a maximal set of numerically independent columns,
/// in ascending order. A column is rejected once its remaining norm drops
/// below `rel_tol` times the largest initial column norm.
pub fn select_independent_columns(m: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let mut chosen = pivoted_gram_schmidt(m, rel_tol).0;
    chosen.sort_unstable();
    chosen
}

/// Orthonormal basis (as columns) of the column span of `m`, computed by the
/// same pivoted Gram–Schmidt process as [`select_independent_columns`].
pub fn orthonormal_column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let q = pivoted_gram_schmidt(m, rel_tol).1;
    if q.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&q)
    }
}

fn pivoted_gram_schmidt(m: &DMatrix<f64>, rel_tol: f64) -> (Vec<usize>, Vec<DVector<f64>>) {
    let n = m.ncols();
    let mut work: Vec<DVector<f64>> = (0..n).map(|j| m.column(j).into_owned()).collect();
    let scale = work.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut chosen = Vec::new();
    let mut basis = Vec::new();
    if scale == 0.0 {
        return (chosen, basis);
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        // Ties go to the lowest index so the selection is deterministic.
        let mut pos = 0;
        for (k, &j) in remaining.iter().enumerate() {
            if work[j].norm() > work[remaining[pos]].norm() {
                pos = k;
            }
        }
        let best = remaining[pos];
        let nrm = work[best].norm();
        if nrm <= rel_tol * scale {
            break;
        }
        remaining.remove(pos);
        let q = &work[best] / nrm;
        for &j in &remaining {
            // Two passes keep the projections accurate.
            for _ in 0..2 {
                let c = q.dot(&work[j]);
                work[j].axpy(-c, &q, 1.0);
            }
        }
        chosen.push(best);
        basis.push(q);
    }
    (chosen, basis)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn dense_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "dense_solve: {}x{} matrix with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or(Error::Singular)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// Inverse of a square matrix, failing on exact or numerical singularity.
pub fn dense_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = a.clone().try_inverse().ok_or(Error::Singular)?;
    if !inv.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Smallest eigenvalue of a symmetric matrix, cross-checked with shifted
/// inverse iteration.
pub fn dense_eigs_smallest(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 || n != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigen-audit needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let eig = a.clone().symmetric_eigen();
    let lam = eig.eigenvalues.min();
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);

    // Shift slightly below the candidate; inverse iteration must converge to
    // the same eigenvalue.
    let shift = lam - 1e-3 * scale;
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_7).fract());
    v /= v.norm();
    let mut rq = lam;
    for _ in 0..200 {
        let w = lu.solve(&v).ok_or(Error::Singular)?;
        let nrm = w.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            break;
        }
        v = w / nrm;
        let next = v.dot(&(a * &v));
        let done = (next - rq).abs() <= 1e-14 * scale;
        rq = next;
        if done {
            break;
        }
    }
    if (rq - lam).abs() > 1e-8 * scale {
        return Err(Error::Degenerate(format!(
            "eigen cross-check disagrees: {lam:e} vs {rq:e}"
        )));
    }
    Ok(lam)
}

/// Smallest singular value of a (possibly rectangular) matrix.
pub fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_one() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, -1.0, -2.0, -3.0]);
        let r = numerical_rank(&m, 1e-10);
        assert_eq!(r.rank, 1);
        assert!(r.gap > 1e10);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-14);
        let empty = DMatrix::<f64>::zeros(0, 4);
        assert_eq!(null_space(&empty, 1e-10).ncols(), 4);
    }

    #[test]
    fn column_selection_skips_dependent_columns() {
        let m = DMatrix::from_column_slice(3, 4, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(select_independent_columns(&m, 1e-10).len(), 2);
    }

    #[test]
    fn smallest_eigenvalues() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.5, 7.0]));
        assert!((dense_eigs_smallest(&d).unwrap() - 0.5).abs() < 1e-14);
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((dense_eigs_smallest(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_solve_is_reported() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(dense_solve(&a, &b), Err(Error::Singular)));
    }
}
