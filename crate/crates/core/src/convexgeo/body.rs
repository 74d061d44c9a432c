use std::fmt;
use std::sync::Arc;

use crate::linalg::{gram_schmidt, reject, RigidMotion};
use crate::{Error, Point, Result};

/// Closed halfspace `normal·x ≤ offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn violation(&self, x: &Point) -> f64 {
        (self.normal.dot(x) - self.offset).max(0.0)
    }

    pub fn project(&self, x: &Point) -> Point {
        let s = self.normal.dot(x) - self.offset;
        if s <= 0.0 {
            x.clone()
        } else {
            x - &self.normal * s
        }
    }
}

/// `{x : |P⊥(x − center)| ≤ radius}` where `P⊥` removes the components along
/// the orthonormal `free_axes`. No free axes gives a ball; free axes turn it
/// into a cylinder over a lower-dimensional ball.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundBody {
    pub center: Point,
    pub radius: f64,
    pub free_axes: Vec<Point>,
}

impl RoundBody {
    pub fn new(center: Point, radius: f64, free_axes: Vec<Point>) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParams(format!("radius must be finite and ≥ 0, got {radius}")));
        }
        for a in &free_axes {
            crate::error::check_dim(center.len(), a.len())?;
        }
        let free_axes = gram_schmidt(&free_axes, 1e-10);
        Ok(RoundBody { center, radius, free_axes })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn project(&self, x: &Point) -> Point {
        let rel = x - &self.center;
        let perp = reject(&rel, &self.free_axes);
        let n = perp.norm();
        if n <= self.radius {
            x.clone()
        } else {
            x - perp * (1.0 - self.radius / n)
        }
    }

    pub fn violation(&self, x: &Point) -> f64 {
        let rel = x - &self.center;
        (reject(&rel, &self.free_axes).norm() - self.radius).max(0.0)
    }

    /// `sup_{x ∈ body} u·x`; infinite unless `u` is orthogonal to the free axes.
    pub fn support(&self, u: &Point) -> f64 {
        let along: f64 = self.free_axes.iter().map(|f| f.dot(u).abs()).sum();
        if along > 1e-12 {
            return f64::INFINITY;
        }
        self.center.dot(u) + self.radius * reject(u, &self.free_axes).norm()
    }

    fn transformed(&self, m: &RigidMotion) -> RoundBody {
        RoundBody {
            center: m.apply(&self.center),
            radius: self.radius,
            free_axes: self.free_axes.iter().map(|f| m.apply_linear(f)).collect(),
        }
    }
}

/// A convex body known only through its support function and projection.
pub trait SupportOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn support(&self, u: &Point) -> f64;
    fn project(&self, x: &Point) -> Point;
}

struct MovedOracle {
    inner: Arc<dyn SupportOracle>,
    motion: RigidMotion,
}

impl SupportOracle for MovedOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn support(&self, u: &Point) -> f64 {
        let local = self.motion.rotation.transpose() * u;
        self.inner.support(&local) + u.dot(&self.motion.translation)
    }
    fn project(&self, x: &Point) -> Point {
        self.motion.apply(&self.inner.project(&self.motion.inverse_apply(x)))
    }
}

#[derive(Clone)]
pub enum SmoothPart {
    Round(RoundBody),
    Oracle(Arc<dyn SupportOracle>),
}

impl fmt::Debug for SmoothPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothPart::Round(r) => f.debug_tuple("Round").field(r).finish(),
            SmoothPart::Oracle(o) => write!(f, "Oracle(dim={})", o.dim()),
        }
    }
}

impl SmoothPart {
    pub fn project(&self, x: &Point) -> Point {
        match self {
            SmoothPart::Round(r) => r.project(x),
            SmoothPart::Oracle(o) => o.project(x),
        }
    }

    pub fn violation(&self, x: &Point) -> f64 {
        match self {
            SmoothPart::Round(r) => r.violation(x),
            SmoothPart::Oracle(o) => (o.project(x) - x).norm(),
        }
    }

    pub fn support(&self, u: &Point) -> f64 {
        match self {
            SmoothPart::Round(r) => r.support(u),
            SmoothPart::Oracle(o) => o.support(u),
        }
    }
}

/// Closed convex set in R^d: halfspaces intersected with an optional smooth part.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    smooth: Option<SmoothPart>,
    lineality_hint: Option<usize>,
    empty: bool,
}

/// Normals closer than this angle are merged.
const MERGE_ANGLE: f64 = 1e-10;

impl ConvexBody {
    /// Intersection of `a_i·x ≤ b_i`. Normals are normalised and near-duplicate
    /// halfspaces merged (keeping the tighter offset).
    pub fn polyhedron(dim: usize, halfspaces: Vec<(Point, f64)>) -> Result<Self> {
        let mut body = ConvexBody::whole_space(dim);
        for (a, b) in halfspaces {
            body.push_halfspace(a, b)?;
        }
        Ok(body)
    }

    pub fn whole_space(dim: usize) -> Self {
        ConvexBody { dim, halfspaces: Vec::new(), smooth: None, lineality_hint: None, empty: false }
    }

    pub fn empty(dim: usize) -> Self {
        ConvexBody { empty: true, ..ConvexBody::whole_space(dim) }
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::round(RoundBody::new(center, radius, Vec::new())?)
    }

    /// Cylinder over a ball: invariant along `axes`.
    pub fn cylinder(center: Point, radius: f64, axes: Vec<Point>) -> Result<Self> {
        Self::round(RoundBody::new(center, radius, axes)?)
    }

    pub fn round(r: RoundBody) -> Result<Self> {
        Ok(ConvexBody {
            dim: r.dim(),
            halfspaces: Vec::new(),
            smooth: Some(SmoothPart::Round(r)),
            lineality_hint: None,
            empty: false,
        })
    }

    pub fn from_oracle(oracle: Arc<dyn SupportOracle>, lineality_hint: Option<usize>) -> Self {
        ConvexBody {
            dim: oracle.dim(),
            halfspaces: Vec::new(),
            smooth: Some(SmoothPart::Oracle(oracle)),
            lineality_hint,
            empty: false,
        }
    }

    pub fn with_lineality_hint(mut self, k: Option<usize>) -> Self {
        self.lineality_hint = k;
        self
    }

    /// Intersect with a smooth part; fails if one is already present.
    pub fn with_smooth(mut self, part: SmoothPart) -> Result<Self> {
        if self.smooth.is_some() {
            return Err(Error::InvalidParams("body already has a smooth part".into()));
        }
        self.smooth = Some(part);
        Ok(self)
    }

    pub fn push_halfspace(&mut self, a: Point, b: f64) -> Result<()> {
        crate::error::check_dim(self.dim, a.len())?;
        if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite halfspace data".into()));
        }
        let n = a.norm();
        if n < 1e-14 {
            // 0·x ≤ b: either everything or nothing
            if b < 0.0 {
                self.empty = true;
            }
            return Ok(());
        }
        let normal = a / n;
        let offset = b / n;
        for h in &mut self.halfspaces {
            let cos = h.normal.dot(&normal).clamp(-1.0, 1.0);
            if cos.acos() < MERGE_ANGLE {
                h.offset = h.offset.min(offset);
                return Ok(());
            }
        }
        self.halfspaces.push(Halfspace { normal, offset });
        Ok(())
    }

    /// The body intersected with the affine subspace `{x : u·(x − p) = 0 ∀u}`.
    pub fn with_equalities(&self, normals: &[Point], p: &Point) -> Result<Self> {
        let mut out = self.clone();
        for u in normals {
            let b = u.dot(p);
            out.push_halfspace(u.clone(), b)?;
            out.push_halfspace(-u, -b)?;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn smooth(&self) -> Option<&SmoothPart> {
        self.smooth.as_ref()
    }

    pub fn lineality_hint(&self) -> Option<usize> {
        self.lineality_hint
    }

    pub fn is_polyhedral(&self) -> bool {
        self.smooth.is_none()
    }

    /// Explicit emptiness flag, or a failed feasibility run.
    pub fn is_empty(&self) -> bool {
        if self.empty {
            return true;
        }
        if self.halfspaces.is_empty() {
            return false;
        }
        if self.halfspaces.len() == 1 && self.smooth.is_none() {
            return false;
        }
        matches!(super::project::project(self, &Point::zeros(self.dim)), Err(Error::EmptyBody))
    }

    pub(crate) fn flagged_empty(&self) -> bool {
        self.empty
    }

    /// `true` when the body is all of R^d.
    pub fn is_whole_space(&self) -> bool {
        !self.empty && self.halfspaces.is_empty() && self.smooth.is_none()
    }

    /// Largest constraint violation at `x`.
    pub fn violation(&self, x: &Point) -> f64 {
        let mut v = self.halfspaces.iter().map(|h| h.violation(x)).fold(0.0, f64::max);
        if let Some(s) = &self.smooth {
            v = v.max(s.violation(x));
        }
        v
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        !self.empty && self.violation(x) <= tol
    }

    /// Support function of the smooth part when the body has no halfspaces.
    pub fn support(&self, u: &Point) -> Option<f64> {
        if !self.halfspaces.is_empty() {
            return None;
        }
        self.smooth.as_ref().map(|s| s.support(u))
    }

    /// Image under `x ↦ O x + v`.
    pub fn transformed(&self, m: &RigidMotion) -> Result<Self> {
        crate::error::check_dim(self.dim, m.dim())?;
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                let normal = m.apply_linear(&h.normal);
                let offset = h.offset + normal.dot(&m.translation);
                Halfspace { normal, offset }
            })
            .collect();
        let smooth = self.smooth.as_ref().map(|s| match s {
            SmoothPart::Round(r) => SmoothPart::Round(r.transformed(m)),
            SmoothPart::Oracle(o) => {
                SmoothPart::Oracle(Arc::new(MovedOracle { inner: o.clone(), motion: m.clone() }))
            }
        });
        Ok(ConvexBody { dim: self.dim, halfspaces, smooth, lineality_hint: self.lineality_hint, empty: self.empty })
    }
}
