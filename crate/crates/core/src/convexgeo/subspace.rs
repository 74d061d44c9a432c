use serde::{Deserialize, Serialize};

use crate::linalg::orthonormality_defect;
use crate::{Error, Point, Result};

/// Tolerance on `dirs` being orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Affine 2-plane `base + s·dirs[0] + t·dirs[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePlane {
    #[serde(with = "crate::report::point_serde")]
    pub base: Point,
    #[serde(with = "crate::report::points_serde")]
    pub dirs: Vec<Point>,
}

impl AffinePlane {
    /// Validates that the two directions are orthonormal.
    pub fn new(base: Point, d1: Point, d2: Point) -> Result<Self> {
        let plane = AffinePlane { base, dirs: vec![d1, d2] };
        plane.validate()?;
        Ok(plane)
    }

    /// Gram–Schmidt the two spanning vectors first.
    pub fn spanned_by(base: Point, v1: &Point, v2: &Point) -> Result<Self> {
        let q = crate::linalg::gram_schmidt(&[v1.clone(), v2.clone()], 1e-12);
        if q.len() < 2 {
            return Err(Error::DegeneratePlane { defect: 1.0 });
        }
        let mut q = q.into_iter();
        let d1 = q.next().expect("two vectors");
        let d2 = q.next().expect("two vectors");
        AffinePlane::new(base, d1, d2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dirs.len() != 2 {
            return Err(Error::DegeneratePlane { defect: f64::INFINITY });
        }
        for d in &self.dirs {
            crate::error::check_dim(self.base.len(), d.len())?;
        }
        let defect = orthonormality_defect(&self.dirs);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::DegeneratePlane { defect });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn point(&self, s: f64, t: f64) -> Point {
        &self.base + &self.dirs[0] * s + &self.dirs[1] * t
    }

    /// Orthogonal projection onto the plane, with its parameters.
    pub fn project(&self, x: &Point) -> (Point, f64, f64) {
        let rel = x - &self.base;
        let s = self.dirs[0].dot(&rel);
        let t = self.dirs[1].dot(&rel);
        (self.point(s, t), s, t)
    }

    /// Same plane through another base point.
    pub fn through(&self, base: Point) -> Self {
        AffinePlane { base, dirs: self.dirs.clone() }
    }
}

/// Affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSubspace {
    #[serde(with = "crate::report::point_serde")]
    pub base: Point,
    #[serde(with = "crate::report::points_serde")]
    pub basis: Vec<Point>,
}

impl AffineSubspace {
    pub fn new(base: Point, basis: Vec<Point>) -> Result<Self> {
        if basis.len() > base.len() {
            return Err(Error::InvalidParams("more basis vectors than dimensions".into()));
        }
        for b in &basis {
            crate::error::check_dim(base.len(), b.len())?;
        }
        let defect = orthonormality_defect(&basis);
        if defect > 1e-9 {
            return Err(Error::InvalidParams(format!("basis not orthonormal (defect {defect:e})")));
        }
        Ok(AffineSubspace { base, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }
}
