//! Bookstein registration: a similarity transform that pins two (2D) or
//! three (3D) anchor points to canonical positions.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::geometry::LatentConfiguration;
use crate::hypercore::{degree_sequence, Hypergraph};

/// `x ↦ c·R·(x − b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BooksteinTransform {
    pub scale: f64,
    pub rotation: DMatrix<f64>,
    pub translation: DVector<f64>,
    /// `[a]` in 2D; `[φ, ω, θ]` (about x, y, z) in 3D.
    pub angles: Vec<f64>,
}

impl BooksteinTransform {
    pub fn identity(d: usize) -> Self {
        Self {
            scale: 1.0,
            rotation: DMatrix::identity(d, d),
            translation: DVector::zeros(d),
            angles: vec![0.0; if d == 2 { 1 } else { 3 }],
        }
    }

    pub fn apply(&self, x: &[f64]) -> DVector<f64> {
        &self.rotation * (DVector::from_column_slice(x) - &self.translation) * self.scale
    }
}

fn apply_all(u: &LatentConfiguration, t: &BooksteinTransform) -> Result<LatentConfiguration> {
    let mut coords = Vec::with_capacity(u.as_slice().len());
    for row in u.rows() {
        coords.extend(t.apply(row).iter());
    }
    LatentConfiguration::new(u.dim(), coords)
}

fn check_anchors(u: &LatentConfiguration, anchors: &[usize], d: usize) -> Result<()> {
    if u.dim() != d {
        return Err(Error::Dimension(format!("expected {d}-dimensional coordinates, got {}", u.dim())));
    }
    if anchors.len() != d || anchors.iter().any(|&a| a >= u.n_nodes()) {
        return Err(Error::Argument(format!("need {d} in-range anchor indices")));
    }
    for i in 0..d {
        if anchors[i + 1..].contains(&anchors[i]) {
            return Err(Error::Argument("anchor indices must differ".into()));
        }
    }
    Ok(())
}

/// Registers 2D coordinates so that `anchors[0] ↦ (−½, 0)` and
/// `anchors[1] ↦ (½, 0)`.
pub fn bookstein_2d(u: &LatentConfiguration, anchors: [usize; 2]) -> Result<(LatentConfiguration, BooksteinTransform)> {
    check_anchors(u, &anchors, 2)?;
    let p1 = u.row(anchors[0]);
    let p2 = u.row(anchors[1]);
    let (dx, dy) = (p2[0] - p1[0], p2[1] - p1[1]);
    let len = dx.hypot(dy);
    if !(len > 0.0) {
        return Err(Error::DegenerateAnchor("the two anchors coincide".into()));
    }
    let a = dy.atan2(dx);
    let (s, c) = a.sin_cos();
    let t = BooksteinTransform {
        scale: 1.0 / len,
        rotation: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        translation: DVector::from_vec(vec![0.5 * (p1[0] + p2[0]), 0.5 * (p1[1] + p2[1])]),
        angles: vec![a],
    };
    let mut out = apply_all(u, &t)?;
    out.row_mut(anchors[0]).copy_from_slice(&[-0.5, 0.0]);
    out.row_mut(anchors[1]).copy_from_slice(&[0.5, 0.0]);
    out.set_bookstein_anchors(anchors.to_vec())?;
    Ok((out, t))
}

fn rot_x(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
}

fn rot_y(omega: f64) -> Matrix3<f64> {
    let (s, c) = omega.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Registers 3D coordinates: the first two anchors go to `(∓½, 0, 0)` and the
/// third lands in the `z = 0` half-plane with non-negative `y`.
pub fn bookstein_3d(u: &LatentConfiguration, anchors: [usize; 3]) -> Result<(LatentConfiguration, BooksteinTransform)> {
    check_anchors(u, &anchors, 3)?;
    let p = |i: usize| nalgebra::Vector3::from_column_slice(u.row(anchors[i]));
    let mid = (p(0) + p(1)) * 0.5;
    let w2 = p(1) - mid;
    let w3 = p(2) - mid;
    let d12 = 2.0 * w2.norm();
    if !(d12 > 0.0) {
        return Err(Error::DegenerateAnchor("the first two anchors coincide".into()));
    }
    let theta = w2.y.atan2(w2.x);
    let omega = w2.z.atan2(w2.x.hypot(w2.y));
    let r23 = rot_y(omega) * rot_z(theta);
    let v3 = r23 * w3;
    let off_axis = v3.y.hypot(v3.z);
    if off_axis <= 1e-10 * w3.norm().max(d12) {
        return Err(Error::DegenerateAnchor("the three anchors are collinear".into()));
    }
    let phi = v3.z.atan2(v3.y);
    let r = rot_x(phi) * r23;
    let t = BooksteinTransform {
        scale: 1.0 / d12,
        rotation: DMatrix::from_column_slice(3, 3, r.as_slice()),
        translation: DVector::from_column_slice(mid.as_slice()),
        angles: vec![phi, omega, theta],
    };
    let mut out = apply_all(u, &t)?;
    out.row_mut(anchors[0]).copy_from_slice(&[-0.5, 0.0, 0.0]);
    out.row_mut(anchors[1]).copy_from_slice(&[0.5, 0.0, 0.0]);
    out.row_mut(anchors[2])[2] = 0.0;
    out.set_bookstein_anchors(anchors.to_vec())?;
    Ok((out, t))
}

/// Dispatches on the coordinate dimension.
pub fn bookstein(u: &LatentConfiguration, anchors: &[usize]) -> Result<(LatentConfiguration, BooksteinTransform)> {
    match (u.dim(), anchors) {
        (2, &[a, b]) => bookstein_2d(u, [a, b]),
        (3, &[a, b, c]) => bookstein_3d(u, [a, b, c]),
        (d, _) => Err(Error::Argument(format!("{} anchors for dimension {d}", anchors.len()))),
    }
}

/// Push-forward of `N(μ, Σ)` under the transform.
pub fn transform_gaussian(mean: &DVector<f64>, cov: &DMatrix<f64>, t: &BooksteinTransform) -> (DVector<f64>, DMatrix<f64>) {
    let mu = &t.rotation * (mean - &t.translation) * t.scale;
    let sigma = &t.rotation * cov * t.rotation.transpose() * (t.scale * t.scale);
    (mu, crate::linalg::symmetrize(&sigma))
}

/// The `d` nodes of highest total degree, ties broken by lower index.
pub fn default_anchors(h: &Hypergraph, d: usize) -> Result<Vec<usize>> {
    if h.n_nodes() < d {
        return Err(Error::Argument(format!("need at least {d} nodes for anchors")));
    }
    let deg = degree_sequence(h).totals();
    let mut idx: Vec<usize> = (0..h.n_nodes()).collect();
    idx.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    idx.truncate(d);
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rows: &[&[f64]]) -> LatentConfiguration {
        LatentConfiguration::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn translation_only() {
        let (b, _) = bookstein_2d(&cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.5]]), [0, 1]).unwrap();
        assert!((b.row(2)[0]).abs() < 1e-15 && (b.row(2)[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scaling_only() {
        let (b, t) = bookstein_2d(&cfg(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, 1.0]]), [0, 1]).unwrap();
        assert!((b.row(2)[0]).abs() < 1e-15 && (b.row(2)[1] - 0.5).abs() < 1e-15);
        assert_eq!(t.scale, 0.5);
    }

    #[test]
    fn coincident_and_collinear_anchors() {
        let u = cfg(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(bookstein_2d(&u, [0, 1]), Err(Error::DegenerateAnchor(_))));
        let u = cfg(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[0.0, 1.0, 0.0]]);
        assert!(matches!(bookstein_3d(&u, [0, 1, 2]), Err(Error::DegenerateAnchor(_))));
    }

    #[test]
    fn canonical_3d_anchors_are_fixed() {
        let u = cfg(&[&[-0.5, 0.0, 0.0], &[0.5, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.3, -0.2, 0.7]]);
        let (b, t) = bookstein_3d(&u, [0, 1, 2]).unwrap();
        assert_eq!(t.scale, 1.0);
        for (x, y) in b.as_slice().iter().zip(u.as_slice()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_scaling_law() {
        let t = BooksteinTransform {
            scale: 2.0,
            ..BooksteinTransform::identity(2)
        };
        let (m, s) = transform_gaussian(&DVector::from_vec(vec![1.0, 1.0]), &DMatrix::identity(2, 2), &t);
        assert_eq!(s, DMatrix::identity(2, 2) * 4.0);
        assert_eq!(m, DVector::from_vec(vec![2.0, 2.0]));
    }
}
