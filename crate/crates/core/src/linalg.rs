//! Dense linear-algebra helpers shared by the geometry and solver modules.
//!
//! Everything here works on `nalgebra::DMatrix<f64>`. Decompositions are
//! post-processed into a canonical form (descending singular values, fixed
//! column signs, positive `R` diagonal) so that results are reproducible.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold used to decide numerical rank.
pub(crate) fn rank_tolerance(rows: usize, cols: usize, largest: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * largest
}

/// Thin SVD with singular values sorted in descending order and each left
/// singular vector sign-normalized so that its first non-negligible entry is
/// positive. The matching row of `v_t` is flipped along with it.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl SortedSvd {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let svd = nalgebra::SVD::new(m.clone(), true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let s = svd.singular_values;

        let mut order: Vec<usize> = (0..s.len()).collect();
        // Stable sort keeps the decomposition's column order on ties.
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));

        let mut u_sorted = DMatrix::zeros(u.nrows(), order.len());
        let mut vt_sorted = DMatrix::zeros(order.len(), v_t.ncols());
        let mut s_sorted = DVector::zeros(order.len());
        for (dst, &src) in order.iter().enumerate() {
            let mut col = u.column(src).into_owned();
            let mut row = v_t.row(src).into_owned();
            if leading_sign(col.as_slice()) < 0.0 {
                col.neg_mut();
                row.neg_mut();
            }
            u_sorted.set_column(dst, &col);
            vt_sorted.set_row(dst, &row);
            s_sorted[dst] = s[src];
        }
        SortedSvd {
            u: u_sorted,
            singular_values: s_sorted,
            v_t: vt_sorted,
        }
    }

    /// Number of singular values above the standard rank tolerance.
    pub fn rank(&self) -> usize {
        let largest = self.singular_values.iter().copied().fold(0.0, f64::max);
        if largest == 0.0 {
            return 0;
        }
        let tol = rank_tolerance(self.u.nrows(), self.v_t.ncols(), largest);
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = nalgebra::SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = singular_values(m);
    let Some(&largest) = s.first() else { return 0 };
    if largest == 0.0 {
        return 0;
    }
    let tol = rank_tolerance(m.nrows(), m.ncols(), largest);
    s.iter().filter(|&&v| v > tol).count()
}

/// Sign of the first entry whose magnitude is not negligible relative to the
/// vector's largest entry.
fn leading_sign(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let cutoff = scale * 1e-12;
    v.iter()
        .find(|x| x.abs() > cutoff)
        .map_or(1.0, |x| x.signum())
}

/// Householder QR without pivoting. Returns the first `k` columns of `Q`
/// (with `R`'s diagonal made nonnegative) where `k` is the column count of
/// the input, or `RankDeficient` when some `|R_jj|` collapses.
pub fn thin_q(raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, k) = raw.shape();
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot orthonormalize a {n}x{k} matrix"
        )));
    }
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "{k} columns exceed ambient dimension {n}"
        )));
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let qr = raw.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    let diag_max = (0..k).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    let col_max = raw.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let tol = rank_tolerance(n, k, col_max.max(diag_max)) * 10.0;
    if diag_max == 0.0 || (0..k).any(|j| r[(j, j)].abs() <= tol) {
        return Err(Error::RankDeficient {
            rank: numerical_rank(raw),
            required: k,
        });
    }
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q.columns(0, k).into_owned())
}

/// `‖AᵀA − I‖_F`.
pub fn orthonormality_defect(a: &DMatrix<f64>) -> f64 {
    let gram = a.transpose() * a;
    let k = gram.nrows();
    (gram - DMatrix::identity(k, k)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_svd_reconstructs_and_sorts() {
        let m = DMatrix::from_row_slice(
            3,
            4,
            &[1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 3.0, 1.0, -2.0, 1.0, 1.0, 0.0],
        );
        let svd = SortedSvd::new(&m);
        let s = &svd.singular_values;
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
        let rebuilt = &svd.u * DMatrix::from_diagonal(s) * &svd.v_t;
        assert!((rebuilt - m).norm() < 1e-12);
        for j in 0..svd.u.ncols() {
            assert!(leading_sign(svd.u.column(j).as_slice()) > 0.0);
        }
    }

    #[test]
    fn thin_q_has_positive_r_diagonal() {
        let m = DMatrix::from_row_slice(3, 2, &[-2.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let q = thin_q(&m).unwrap();
        assert!(orthonormality_defect(&q) < 1e-14);
        // R_11 > 0 forces the first column to point along m[:,0] = -2·e1
        assert!((q[(0, 0)] + 1.0).abs() < 1e-14);
        let r = q.transpose() * &m;
        assert!(r[(0, 0)] > 0.0 && r[(1, 1)] > 0.0);
    }

    #[test]
    fn thin_q_reports_rank() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 1.0, 1.0, 2.0, 0.0, 1.0, 2.0, 3.0]);
        match thin_q(&m) {
            Err(Error::RankDeficient { rank, required }) => {
                assert_eq!(rank, 2);
                assert_eq!(required, 3);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }
}
