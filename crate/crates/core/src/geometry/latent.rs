use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest hyperedge order accepted by the geometric constructions unless a
/// caller raises it explicitly. Clique enumeration grows combinatorially in K.
pub const DEFAULT_MAX_ORDER: usize = 6;

/// N×d latent coordinates, `d ∈ {2, 3}`, optionally in Bookstein form.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentConfiguration {
    dim: usize,
    // row-major N×d
    coords: Vec<f64>,
    anchors: Option<Vec<usize>>,
}

impl LatentConfiguration {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Unsupported(format!("latent dimension {dim}; only 2 and 3 are supported")));
        }
        if coords.len() % dim != 0 {
            return Err(Error::Dimension(format!(
                "{} coordinates do not form rows of length {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("non-finite latent coordinate".into()));
        }
        Ok(Self {
            dim,
            coords,
            anchors: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(2, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("ragged coordinate rows".into()));
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            coords.extend(m.row(i).iter().copied());
        }
        Self::new(m.ncols(), coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_vector(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Row `i` padded to three components.
    pub(crate) fn point(&self, i: usize) -> [f64; 3] {
        let mut p = [0.0; 3];
        p[..self.dim].copy_from_slice(self.row(i));
        p
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_nodes(), self.dim, &self.coords)
    }

    pub fn anchors(&self) -> Option<&[usize]> {
        self.anchors.as_deref()
    }

    pub fn is_bookstein(&self) -> bool {
        self.anchors.is_some()
    }

    /// Marks the configuration as Bookstein-registered on `anchors`; the anchor
    /// rows must already sit at their canonical positions.
    pub fn set_bookstein_anchors(&mut self, anchors: Vec<usize>) -> Result<()> {
        if anchors.len() != self.dim {
            return Err(Error::Argument(format!(
                "{} anchors given for dimension {}",
                anchors.len(),
                self.dim
            )));
        }
        if anchors.iter().any(|&a| a >= self.n_nodes()) {
            return Err(Error::Argument("anchor index out of range".into()));
        }
        let a = self.row(anchors[0]);
        let b = self.row(anchors[1]);
        let ok = a[0] == -0.5 && b[0] == 0.5 && a[1..].iter().chain(&b[1..]).all(|&x| x == 0.0);
        let third_ok = self.dim == 2 || self.row(anchors[2])[2] == 0.0;
        if !ok || !third_ok {
            return Err(Error::Constraint("anchor rows are not in Bookstein position".into()));
        }
        self.anchors = Some(anchors);
        Ok(())
    }

    pub(crate) fn set_anchors_unchecked(&mut self, anchors: Option<Vec<usize>>) {
        self.anchors = anchors;
    }

    /// Appends rows, keeping anchors.
    pub fn extended(&self, extra: &LatentConfiguration) -> Result<LatentConfiguration> {
        if extra.dim != self.dim {
            return Err(Error::Dimension("latent dimension mismatch".into()));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&extra.coords);
        Ok(Self {
            dim: self.dim,
            coords,
            anchors: self.anchors.clone(),
        })
    }
}

/// Ordered radii `(r_2, …, r_K)`, strictly increasing and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSchedule(Vec<f64>);

impl RadiusSchedule {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Argument("empty radius schedule".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Constraint(format!("radii must be positive and finite: {radii:?}")));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Constraint(format!("radii must be strictly increasing: {radii:?}")));
        }
        Ok(Self(radii))
    }

    pub fn is_valid(radii: &[f64]) -> bool {
        !radii.is_empty()
            && radii.iter().all(|r| r.is_finite() && *r > 0.0)
            && radii.windows(2).all(|w| w[1] > w[0])
    }

    pub fn max_order(&self) -> usize {
        self.0.len() + 1
    }

    /// Radius for order `k`.
    pub fn get(&self, k: usize) -> f64 {
        self.0[k - 2]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        *self.0.last().expect("non-empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    /// Closed-ball membership with a `1e-12` relative slack.
    pub fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = self.center.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.sqrt() <= self.radius * (1.0 + 1e-12) + 1e-300
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_validation() {
        assert!(LatentConfiguration::new(4, vec![0.0; 8]).is_err());
        assert!(LatentConfiguration::new(2, vec![0.0; 3]).is_err());
        assert!(LatentConfiguration::new(2, vec![0.0, f64::NAN]).is_err());
        let mut u = LatentConfiguration::new(2, vec![-0.5, 0.0, 0.5, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(u.n_nodes(), 3);
        assert_eq!(u.row(2), &[1.0, 2.0]);
        assert!(u.set_bookstein_anchors(vec![1, 0]).is_err());
        u.set_bookstein_anchors(vec![0, 1]).unwrap();
        assert!(u.is_bookstein());
    }

    #[test]
    fn radius_schedule_ordering() {
        assert!(RadiusSchedule::new(vec![0.1, 0.2, 0.3]).is_ok());
        assert!(RadiusSchedule::new(vec![0.2, 0.2]).is_err());
        assert!(RadiusSchedule::new(vec![0.3, 0.2]).is_err());
        assert!(RadiusSchedule::new(vec![0.0, 0.2]).is_err());
        assert!(RadiusSchedule::new(vec![]).is_err());
        let r = RadiusSchedule::new(vec![0.1, 0.4]).unwrap();
        assert_eq!(r.max_order(), 3);
        assert_eq!(r.get(3), 0.4);
    }
}
