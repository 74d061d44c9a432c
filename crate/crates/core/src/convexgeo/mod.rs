//! Convex bodies in R^d and the operations the classifiers build on.
//!
//! A [`ConvexBody`] is the intersection of a finite list of halfspaces
//! `a·x ≤ b` with an optional smooth part. Smooth parts are either analytic
//! round bodies (balls, cylinders, disc products, all with closed-form
//! projection) or user supplied [`SupportOracle`]s.
//!
//! Polyhedral bodies are projected exactly as a least-distance problem solved
//! through its non-negative least squares dual. Everything else, and any
//! polyhedral case that solve cannot settle, runs Dykstra's alternating
//! projections followed by an active-set polish. Emptiness is
//! detected approximately: a run that cannot reduce the constraint violation
//! below `1e-6` within the iteration budget declares the body empty.

mod body;
mod descriptor;
mod project;
mod subspace;

pub use body::{ConvexBody, Halfspace, RoundBody, SmoothPart, SupportOracle};
pub use descriptor::{BodyDescriptor, HalfspaceDescriptor};
pub(crate) use project::polyhedral_plane_distance;
pub use project::{Projection, DYKSTRA_MAX_ITERS, DYKSTRA_TOL, EMPTY_RESIDUAL, FEASIBILITY_TOL};
pub use subspace::{AffinePlane, AffineSubspace};

use crate::linalg::null_space;
use crate::{Error, Point, Result};

/// Rank tolerance used when stacking normals.
pub const RANK_TOL: f64 = 1e-9;

impl ConvexBody {
    /// Euclidean projection of `x` onto the body.
    pub fn project(&self, x: &Point) -> Result<Projection> {
        crate::error::check_dim(self.dim(), x.len())?;
        project::project(self, x)
    }

    /// Distance from `x` to the body.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }

    /// The maximal affine subspace contained in the body.
    ///
    /// Directions are the common null space of the stacked halfspace normals
    /// and the free axes of a round part; the base point is the projection of
    /// the origin. Oracle parts have no finite certificate and yield
    /// [`Error::NonPolyhedral`].
    pub fn lineality_space(&self) -> Result<AffineSubspace> {
        if self.is_empty() {
            return Err(Error::EmptyBody);
        }
        let dirs = self.lineality_directions()?;
        let base = self.project(&Point::zeros(self.dim()))?.point;
        AffineSubspace::new(base, dirs)
    }

    pub(crate) fn lineality_directions(&self) -> Result<Vec<Point>> {
        let d = self.dim();
        let mut rows: Vec<Point> = self.halfspaces().iter().map(|h| h.normal.clone()).collect();
        match self.smooth() {
            None => {}
            Some(SmoothPart::Round(r)) => {
                // v must lie in span(free axes): (I - F F^T) v = 0
                for i in 0..d {
                    let e = crate::linalg::unit(d, i);
                    rows.push(crate::linalg::reject(&e, &r.free_axes));
                }
            }
            Some(SmoothPart::Oracle(_)) => return Err(Error::NonPolyhedral),
        }
        Ok(null_space(&rows, d, RANK_TOL))
    }

    /// Dimension `k` of the lineality space, falling back to the declared hint
    /// for bodies without a finite certificate.
    pub fn lineality_dim(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptyBody);
        }
        match self.lineality_directions() {
            Ok(dirs) => Ok(dirs.len()),
            Err(Error::NonPolyhedral) => self.lineality_hint().ok_or(Error::NonPolyhedral),
            Err(e) => Err(e),
        }
    }

    /// True iff the body is a halfspace or a slab (lineality dimension d−1).
    pub fn is_halfspace_or_slab(&self) -> Result<bool> {
        let k = self.lineality_dim()?;
        Ok(k + 1 == self.dim())
    }

    /// Unit normal `a` and offset `b` of the hyperplane through the projection
    /// of `p`, so that `a·x ≤ b` on the body and `a·p > b`.
    pub fn supporting_hyperplane(&self, p: &Point) -> Result<(Point, f64)> {
        let proj = self.project(p)?;
        if proj.distance <= FEASIBILITY_TOL {
            return Err(Error::PointInsideBody { distance: proj.distance });
        }
        let a = (p - &proj.point) / proj.distance;
        let b = a.dot(&proj.point);
        Ok((a, b))
    }
}

#[cfg(test)]
mod tests;
