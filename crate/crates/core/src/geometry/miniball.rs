use crate::error::{Error, Result};

use super::latent::Ball;

pub(crate) type Point = [f64; 3];

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Sphere {
    center: Point,
    // squared radius; negative means the empty ball
    r2: f64,
}

impl Sphere {
    const EMPTY: Sphere = Sphere {
        center: [0.0; 3],
        r2: -1.0,
    };

    fn contains(&self, p: &Point) -> bool {
        self.r2 >= 0.0 && dist2(&self.center, p) <= self.r2 * (1.0 + 2.0 * SLACK) + 1e-300
    }
}

fn dist2(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Gaussian elimination with partial pivoting on an m×m system, m ≤ 3.
/// `None` when the system is numerically singular.
fn solve_small(a: &mut [[f64; 3]; 3], b: &mut [f64; 3], m: usize) -> Option<[f64; 3]> {
    let scale = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for c in col..m {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Circumsphere of affinely independent points within their affine hull.
fn circumsphere(pts: &[Point]) -> Option<Sphere> {
    match pts.len() {
        0 => Some(Sphere::EMPTY),
        1 => Some(Sphere {
            center: pts[0],
            r2: 0.0,
        }),
        m => {
            let p0 = pts[0];
            let mut v = [[0.0; 3]; 3];
            for j in 1..m {
                v[j - 1] = sub(&pts[j], &p0);
            }
            let mut a = [[0.0; 3]; 3];
            let mut b = [0.0; 3];
            for i in 0..m - 1 {
                for j in 0..m - 1 {
                    a[i][j] = 2.0 * dot(&v[i], &v[j]);
                }
                b[i] = dot(&v[i], &v[i]);
            }
            let lambda = solve_small(&mut a, &mut b, m - 1)?;
            let mut c = p0;
            for j in 0..m - 1 {
                for t in 0..3 {
                    c[t] += lambda[j] * v[j][t];
                }
            }
            let r2 = pts.iter().map(|p| dist2(&c, p)).fold(0.0, f64::max);
            Some(Sphere { center: c, r2 })
        }
    }
}

/// Smallest ball with every support point on or inside it, used when the
/// support is affinely dependent.
fn support_ball(support: &[Point]) -> Sphere {
    if let Some(s) = circumsphere(support) {
        return s;
    }
    let m = support.len();
    let mut best = Sphere::EMPTY;
    for mask in 1u32..(1 << m) - 1 {
        let subset: Vec<Point> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| support[i]).collect();
        if let Some(s) = circumsphere(&subset) {
            if support.iter().all(|p| s.contains(p)) && (best.r2 < 0.0 || s.r2 < best.r2) {
                best = s;
            }
        }
    }
    best
}

struct Support {
    pts: [Point; 4],
    len: usize,
}

fn welzl_mtf(pts: &mut [Point], end: usize, support: &mut Support, dim: usize) -> Sphere {
    let mut ball = support_ball(&support.pts[..support.len]);
    if support.len == dim + 1 {
        return ball;
    }
    for i in 0..end {
        if !ball.contains(&pts[i]) {
            support.pts[support.len] = pts[i];
            support.len += 1;
            ball = welzl_mtf(pts, i, support, dim);
            support.len -= 1;
            pts[..=i].rotate_right(1);
        }
    }
    ball
}

fn solve(pts: &mut [Point], dim: usize) -> Sphere {
    let mut support = Support {
        pts: [[0.0; 3]; 4],
        len: 0,
    };
    let n = pts.len();
    let mut ball = welzl_mtf(pts, n, &mut support, dim);
    // Report the radius that truly encloses every input point.
    ball.r2 = pts.iter().map(|p| dist2(&ball.center, p)).fold(0.0, f64::max);
    ball
}

/// Radius of the smallest enclosing ball of padded points in dimension `dim`.
pub(crate) fn miniball_radius(pts: &mut [Point], dim: usize) -> f64 {
    debug_assert!(!pts.is_empty() && dim <= 3);
    solve(pts, dim).r2.sqrt()
}

/// Smallest enclosing ball of a non-empty point set in R^2 or R^3.
pub fn miniball(points: &[&[f64]]) -> Result<Ball> {
    let dim = points
        .first()
        .ok_or_else(|| Error::Argument("miniball of an empty point set".into()))?
        .len();
    if !(1..=3).contains(&dim) || points.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension("points must share a dimension of at most 3".into()));
    }
    if points.iter().flat_map(|p| p.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Argument("non-finite coordinate".into()));
    }
    let mut pts: Vec<Point> = points
        .iter()
        .map(|p| {
            let mut q = [0.0; 3];
            q[..dim].copy_from_slice(p);
            q
        })
        .collect();
    let s = solve(&mut pts, dim);
    Ok(Ball {
        center: s.center[..dim].to_vec(),
        radius: s.r2.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_is_half_distance() {
        let b = miniball(&[&[0.0, 0.0], &[3.0, 4.0]]).unwrap();
        assert!((b.radius - 2.5).abs() < 1e-15);
        assert!((b.center[0] - 1.5).abs() < 1e-15 && (b.center[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equilateral_triangle_is_circumradius() {
        let h = 3f64.sqrt() / 2.0;
        let b = miniball(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]).unwrap();
        assert!((b.radius - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let b = miniball(&[&[0.0, 0.0], &[4.0, 0.0], &[2.0, 0.5]]).unwrap();
        assert!((b.radius - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        let b = miniball(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(b.radius, 0.0);
        let b = miniball(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]]).unwrap();
        assert!((b.radius - 1.5).abs() < 1e-14);
        let b = miniball(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0]]).unwrap();
        assert!((b.radius - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(miniball(&[]).is_err());
        assert!(miniball(&[&[0.0, 0.0], &[1.0]]).is_err());
    }

    #[test]
    fn regular_tetrahedron() {
        let pts: [&[f64]; 4] = [&[1.0, 1.0, 1.0], &[1.0, -1.0, -1.0], &[-1.0, 1.0, -1.0], &[-1.0, -1.0, 1.0]];
        let b = miniball(&pts).unwrap();
        assert!((b.radius - 3f64.sqrt()).abs() < 1e-14);
    }
}
