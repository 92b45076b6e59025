//! Points on Grassmann manifolds and the geometry between them.
//!
//! A [`Subspace`] is stored through an `n × k` matrix with orthonormal
//! columns; two subspaces are the same manifold point whenever their column
//! spans agree, so every distance here depends on the span only.
//!
//! Principal angles between subspaces of different dimensions are padded
//! with trailing zeros up to `max(k, r)`. A consequence is that a subspace
//! contained in another is at distance zero from it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SortedSvd};

/// Maximum `‖XᵀX − I‖_F` accepted for a basis.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Maximum `‖YᵀΔ‖_F` (relative to `max(1, ‖Δ‖_F)`) accepted for a tangent.
pub const HORIZONTALITY_TOL: f64 = 1e-8;

/// Cosines below this are treated as a right angle by [`log_map`].
const CUT_LOCUS_COS: f64 = 1e-12;

/// A point on `Gr(k, n)`, held as an orthonormal `n × k` representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps an orthonormal basis. Fails with `NotOrthonormal` when
    /// `‖XᵀX − I‖_F` exceeds [`ORTHONORMALITY_TOL`].
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (n, k) = basis.shape();
        if k == 0 || k > n {
            return Err(Error::DimensionMismatch(format!(
                "basis of shape {n}x{k} does not describe a subspace"
            )));
        }
        let deviation = linalg::orthonormality_defect(&basis);
        if !(deviation <= ORTHONORMALITY_TOL) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Subspace { basis })
    }

    /// Span of the columns of `raw`, via the `Q` factor of its QR
    /// decomposition (no column pivoting).
    pub fn orthonormalize(raw: &DMatrix<f64>) -> Result<Self> {
        let q = linalg::thin_q(raw)?;
        Ok(Subspace { basis: q })
    }

    /// Coordinate subspace spanned by the given standard basis vectors.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Result<Self> {
        let mut basis = DMatrix::zeros(ambient_dim, axes.len());
        for (j, &axis) in axes.iter().enumerate() {
            if axis >= ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "axis {axis} outside R^{ambient_dim}"
                )));
            }
            basis[(axis, j)] = 1.0;
        }
        Subspace::new(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn sub_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    /// Span of the first `r` basis columns.
    pub fn leading(&self, r: usize) -> Result<Subspace> {
        if r == 0 || r > self.sub_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot take {r} leading columns of a {}-dimensional subspace",
                self.sub_dim()
            )));
        }
        Ok(Subspace {
            basis: self.basis.columns(0, r).into_owned(),
        })
    }

    /// Image under a linear map, re-orthonormalized. For orthogonal `q`
    /// this is the rotated point `[QX]`.
    pub fn transform(&self, q: &DMatrix<f64>) -> Result<Subspace> {
        if q.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} map applied to R^{}",
                q.nrows(),
                q.ncols(),
                self.ambient_dim()
            )));
        }
        Subspace::orthonormalize(&(q * &self.basis))
    }

    /// Orthogonal projector `XXᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// Principal angles, ascending over the `min(k, r)` computed entries and
/// padded with trailing zeros to length `max(k, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles(Vec<f64>);

impl PrincipalAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// `‖sin θ‖₂`
    pub fn chordal(&self) -> f64 {
        self.0.iter().map(|a| a.sin().powi(2)).sum::<f64>().sqrt()
    }

    /// `‖θ‖₂`
    pub fn geodesic(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

fn check_ambient(x: &Subspace, y: &Subspace) -> Result<()> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            x.ambient_dim(),
            y.ambient_dim()
        )));
    }
    Ok(())
}

/// Orders a pair as (smaller-dimensional, larger-dimensional).
fn by_dim<'a>(x: &'a Subspace, y: &'a Subspace) -> (&'a Subspace, &'a Subspace) {
    if x.sub_dim() <= y.sub_dim() {
        (x, y)
    } else {
        (y, x)
    }
}

/// Principal angles between `[X]` and `[Y]`.
///
/// Cosines are the singular values of `XᵀY`, clamped to `[0, 1]`. Angles
/// whose cosine exceeds `1/√2` are taken from the matching sine instead (the
/// singular values of the residual `(I − P_large)·small`), since `arccos`
/// loses half the working precision near zero.
pub fn principal_angles(x: &Subspace, y: &Subspace) -> Result<PrincipalAngles> {
    check_ambient(x, y)?;
    let (small, large) = by_dim(x, y);
    let m = small.sub_dim();
    let cross = large.basis.transpose() * &small.basis;
    let cosines = linalg::singular_values(&cross);
    let residual = &small.basis - &large.basis * &cross;
    let mut sines = linalg::singular_values(&residual);
    sines.reverse();

    let mut angles = Vec::with_capacity(large.sub_dim());
    for i in 0..m {
        let c = cosines[i].clamp(0.0, 1.0);
        let angle = if c * c >= 0.5 {
            sines[i].clamp(0.0, 1.0).asin()
        } else {
            c.acos()
        };
        angles.push(angle.clamp(0.0, FRAC_PI_2));
    }
    // Cosine and sine routes can disagree in the last ulp at the switch-over.
    angles.sort_by(f64::total_cmp);
    angles.resize(large.sub_dim(), 0.0);
    Ok(PrincipalAngles(angles))
}

/// `‖sin θ([X],[Y])‖₂`
pub fn chordal_distance(x: &Subspace, y: &Subspace) -> Result<f64> {
    Ok(principal_angles(x, y)?.chordal())
}

/// `‖θ([X],[Y])‖₂`
pub fn geodesic_distance(x: &Subspace, y: &Subspace) -> Result<f64> {
    Ok(principal_angles(x, y)?.geodesic())
}

/// Squared chordal distance through the residual of the smaller subspace
/// after projection onto the larger one. Equals `min(k, r) − tr(YᵀXXᵀY)`
/// but keeps full relative precision when the two are close.
pub(crate) fn chordal_radicand(x: &Subspace, y: &Subspace) -> f64 {
    let (small, large) = by_dim(x, y);
    let cross = large.basis.transpose() * &small.basis;
    (&small.basis - &large.basis * cross).norm_squared()
}

/// Riemannian logarithm: the horizontal tangent `Δ` at `base` with
/// `exp_map(base, Δ) = target` and `‖Δ‖_F = geodesic_distance(base, target)`.
pub fn log_map(base: &Subspace, target: &Subspace) -> Result<DMatrix<f64>> {
    check_ambient(base, target)?;
    if base.sub_dim() != target.sub_dim() {
        return Err(Error::DimensionMismatch(format!(
            "log map needs equal dimensions, got {} and {}",
            base.sub_dim(),
            target.sub_dim()
        )));
    }
    let y = &base.basis;
    let x = &target.basis;
    let cross = y.transpose() * x;
    let smallest_cos = linalg::singular_values(&cross)
        .last()
        .copied()
        .unwrap_or(0.0);
    if smallest_cos <= CUT_LOCUS_COS {
        return Err(Error::LogUndefined { index: None });
    }
    let inv = cross
        .clone()
        .try_inverse()
        .ok_or(Error::LogUndefined { index: None })?;
    let a = (x - y * &cross) * inv;
    let svd = SortedSvd::new(&a);
    let atan = svd.singular_values.map(f64::atan);
    Ok(&svd.u * DMatrix::from_diagonal(&atan) * &svd.v_t)
}

/// Riemannian exponential: endpoint of the geodesic leaving `base` with
/// horizontal velocity `tangent`.
pub fn exp_map(base: &Subspace, tangent: &DMatrix<f64>) -> Result<Subspace> {
    if tangent.shape() != base.basis.shape() {
        return Err(Error::DimensionMismatch(format!(
            "tangent of shape {:?} at a point of shape {:?}",
            tangent.shape(),
            base.basis.shape()
        )));
    }
    let norm = tangent.norm();
    let deviation = (base.basis.transpose() * tangent).norm();
    if !(deviation <= HORIZONTALITY_TOL * norm.max(1.0)) {
        return Err(Error::NotHorizontal { deviation });
    }
    if norm == 0.0 {
        return Ok(base.clone());
    }
    let svd = SortedSvd::new(tangent);
    let cos = DMatrix::from_diagonal(&svd.singular_values.map(f64::cos));
    let sin = DMatrix::from_diagonal(&svd.singular_values.map(f64::sin));
    let v = svd.v_t.transpose();
    let moved = (&base.basis * &v * cos + &svd.u * sin) * &svd.v_t;
    Subspace::orthonormalize(&moved)
}

/// Projection of an ambient matrix onto the horizontal space at `base`.
pub fn project_horizontal(base: &Subspace, m: &DMatrix<f64>) -> DMatrix<f64> {
    m - &base.basis * (base.basis.transpose() * m)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    use super::*;

    fn line(n: usize, v: &[f64]) -> Subspace {
        let mut m = DMatrix::zeros(n, 1);
        for (i, x) in v.iter().enumerate() {
            m[(i, 0)] = *x;
        }
        Subspace::orthonormalize(&m).unwrap()
    }

    #[test]
    fn orthonormalize_examples() {
        let raw = DMatrix::identity(3, 3).columns(0, 2).into_owned();
        let s = Subspace::orthonormalize(&raw).unwrap();
        assert!((s.basis() - &raw).norm() < 1e-15);

        let s = Subspace::orthonormalize(&DMatrix::from_row_slice(2, 1, &[2.0, 0.0])).unwrap();
        assert!((s.basis()[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(s.basis()[(1, 0)], 0.0);

        let raw = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let s = Subspace::orthonormalize(&raw).unwrap();
        assert!(linalg::orthonormality_defect(s.basis()) < 1e-12);
        let e12 = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert!(principal_angles(&s, &e12).unwrap().max() < 1e-12);
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let raw = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let err = Subspace::orthonormalize(&raw).unwrap_err();
        assert!(matches!(
            err,
            Error::RankDeficient {
                rank: 1,
                required: 2
            }
        ));
    }

    #[test]
    fn new_validates_orthonormality() {
        let bad = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            Subspace::new(bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn principal_angle_examples() {
        let e12 = Subspace::coordinate(4, &[0, 1]).unwrap();
        assert_eq!(
            principal_angles(&e12, &e12).unwrap().as_slice(),
            &[0.0, 0.0]
        );

        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let e2 = Subspace::coordinate(2, &[1]).unwrap();
        let a = principal_angles(&e1, &e2).unwrap();
        assert!((a.as_slice()[0] - PI / 2.0).abs() < 1e-15);

        let diag = line(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let a = principal_angles(&e1, &diag).unwrap();
        assert!((a.as_slice()[0] - FRAC_PI_4).abs() < 1e-15);

        let x = Subspace::coordinate(3, &[0]).unwrap();
        let y = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert_eq!(principal_angles(&x, &y).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(principal_angles(&y, &x).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn padding_keeps_computed_angles_first() {
        // span(e1) against span(e2, e3): one right angle, one padded zero.
        let x = Subspace::coordinate(3, &[0]).unwrap();
        let y = Subspace::coordinate(3, &[1, 2]).unwrap();
        let a = principal_angles(&x, &y).unwrap();
        assert!((a.as_slice()[0] - PI / 2.0).abs() < 1e-15);
        assert_eq!(a.as_slice()[1], 0.0);
    }

    #[test]
    fn mismatched_ambient_dims() {
        let x = Subspace::coordinate(3, &[0]).unwrap();
        let y = Subspace::coordinate(4, &[0]).unwrap();
        assert!(matches!(
            principal_angles(&x, &y),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            chordal_distance(&x, &y),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            geodesic_distance(&x, &y),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let e2 = Subspace::coordinate(2, &[1]).unwrap();
        let diag = line(2, &[1.0, 1.0]);
        assert_eq!(chordal_distance(&e1, &e1).unwrap(), 0.0);
        assert!((chordal_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        assert!((chordal_distance(&e1, &diag).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(geodesic_distance(&e1, &e1).unwrap(), 0.0);
        assert!((geodesic_distance(&e1, &e2).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((geodesic_distance(&e1, &diag).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn radicand_matches_trace_form() {
        let x = line(3, &[1.0, 2.0, 0.5]);
        let y = Subspace::orthonormalize(&DMatrix::from_row_slice(
            3,
            2,
            &[0.3, 1.0, -1.0, 0.2, 0.7, 0.9],
        ))
        .unwrap();
        let p = y.basis().transpose() * x.basis();
        let trace = 1.0 - p.norm_squared();
        assert!((chordal_radicand(&x, &y) - trace).abs() < 1e-14);
        assert!((chordal_radicand(&y, &x) - trace).abs() < 1e-14);
        let d = chordal_distance(&x, &y).unwrap();
        assert!((d * d - trace).abs() < 1e-14);
    }

    #[test]
    fn log_map_examples() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        assert_eq!(log_map(&e1, &e1).unwrap().norm(), 0.0);

        let diag = line(2, &[1.0, 1.0]);
        let delta = log_map(&e1, &diag).unwrap();
        assert!((delta.norm() - FRAC_PI_4).abs() < 1e-14);
        assert!(delta[(0, 0)].abs() < 1e-15);
        let back = exp_map(&e1, &delta).unwrap();
        assert!(principal_angles(&back, &diag).unwrap().max() < 1e-14);
    }

    #[test]
    fn log_map_cut_locus() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let e2 = Subspace::coordinate(2, &[1]).unwrap();
        assert!(matches!(log_map(&e1, &e2), Err(Error::LogUndefined { .. })));
    }

    #[test]
    fn exp_map_examples() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let zero = DMatrix::zeros(2, 1);
        assert_eq!(exp_map(&e1, &zero).unwrap(), e1);

        let quarter = DMatrix::from_row_slice(2, 1, &[0.0, PI / 2.0]);
        let end = exp_map(&e1, &quarter).unwrap();
        let e2 = Subspace::coordinate(2, &[1]).unwrap();
        assert!(principal_angles(&end, &e2).unwrap().max() < 1e-15);
    }

    #[test]
    fn exp_map_rejects_vertical_tangent() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let vertical = DMatrix::from_row_slice(2, 1, &[0.1, 0.0]);
        assert!(matches!(
            exp_map(&e1, &vertical),
            Err(Error::NotHorizontal { .. })
        ));
    }
}
