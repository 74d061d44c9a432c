//! Domain families Ω ⊂ R^n with membership and clearance.
//!
//! Every domain is open. [`DomainSpec::contains`] uses strict inequalities with
//! no tolerance, and [`DomainSpec::clearance`] returns the distance from a point
//! to the complement `R^n ∖ Ω` (zero outside Ω). Clearance is exact for every
//! variant except unions, where it is the best lower bound given by a single
//! member.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::convexgeo::{BodyDescriptor, ConvexBody};
use crate::error::check_dim;
use crate::linalg::RigidMotion;
use crate::report::point_serde;
use crate::{Error, Point, Result};

/// Description of an open domain Ω, tagged by `"variant"` in JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum DomainSpec {
    FullSpace {
        dim: usize,
    },
    /// `R^n ∖ C` for a closed convex body `C`.
    ConvexComplement {
        #[serde(with = "body_serde")]
        body: ConvexBody,
    },
    /// `{x : (l₂, l₃) ∈ Γ}` in local coordinates `l = Oᵀ(x − v)`, where Γ is the
    /// open planar cone `|arg| < φ/2` around the positive `l₂` axis.
    Wedge {
        angle: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame: Option<RigidMotion>,
    },
    /// `x₄ > −a₁x₁² − a₂x₂² + a₃x₃²` in R⁴.
    QuadricGraph { a1: f64, a2: f64, a3: f64 },
    /// `x₄ > −a₂|x₂| + a₃|x₃|` in R^n, n ≥ 4.
    WedgeGraph { a2: f64, a3: f64, dim: usize },
    /// `n·x > offset`.
    Halfspace {
        #[serde(with = "point_serde")]
        normal: Point,
        offset: f64,
    },
    /// `lo < n·x < hi`.
    Slab {
        #[serde(with = "point_serde")]
        normal: Point,
        lo: f64,
        hi: f64,
    },
    /// Increasing union `Ω₁ ⊂ Ω₂ ⊂ …`.
    UnionChain { members: Vec<DomainSpec> },
}

mod body_serde {
    use super::*;

    pub fn serialize<S: Serializer>(b: &ConvexBody, s: S) -> std::result::Result<S::Ok, S::Error> {
        b.descriptor().map_err(serde::ser::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ConvexBody, D::Error> {
        let desc = BodyDescriptor::deserialize(d)?;
        ConvexBody::try_from(&desc).map_err(serde::de::Error::custom)
    }
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: DomainSpec = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn wedge(angle: f64) -> Result<Self> {
        let d = DomainSpec::Wedge { angle, frame: None };
        d.validate()?;
        Ok(d)
    }

    pub fn quadric_graph(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let d = DomainSpec::QuadricGraph { a1, a2, a3 };
        d.validate()?;
        Ok(d)
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if n < 1e-14 {
            return Err(Error::ZeroVector);
        }
        Ok(DomainSpec::Halfspace { normal: normal / n, offset: offset / n })
    }

    pub fn slab(normal: Point, lo: f64, hi: f64) -> Result<Self> {
        let n = normal.norm();
        if n < 1e-14 {
            return Err(Error::ZeroVector);
        }
        let d = DomainSpec::Slab { normal: normal / n, lo: lo / n, hi: hi / n };
        d.validate()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::FullSpace { dim } => *dim,
            DomainSpec::ConvexComplement { body } => body.dim(),
            DomainSpec::Wedge { frame, .. } => frame.as_ref().map_or(3, |f| f.dim()),
            DomainSpec::QuadricGraph { .. } => 4,
            DomainSpec::WedgeGraph { dim, .. } => *dim,
            DomainSpec::Halfspace { normal, .. } | DomainSpec::Slab { normal, .. } => normal.len(),
            DomainSpec::UnionChain { members } => members.first().map_or(0, |m| m.dim()),
        }
    }

    /// Parameter checks: dimension ≥ 3 and the constraints of each family.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 3 {
            return Err(Error::InvalidParams(format!("domain dimension {n} < 3")));
        }
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        match self {
            DomainSpec::Wedge { angle, .. } => {
                if !(*angle > 0.0 && *angle < 2.0 * PI) {
                    return bad("wedge angle must lie in (0, 2π)");
                }
            }
            DomainSpec::QuadricGraph { a1, a2, a3 } => {
                if !(a1.is_finite() && a2.is_finite() && a3.is_finite()) {
                    return bad("non-finite coefficient");
                }
                if *a1 < 0.0 || *a2 <= 0.0 {
                    return bad("quadric graph needs a1 ≥ 0 and a2 > 0");
                }
            }
            DomainSpec::WedgeGraph { a2, a3, dim } => {
                if *dim < 4 {
                    return bad("wedge graph needs dim ≥ 4");
                }
                if !(a2.is_finite() && a3.is_finite()) || *a2 <= 0.0 {
                    return bad("wedge graph needs a2 > 0");
                }
            }
            DomainSpec::Halfspace { normal, offset } => {
                if (normal.norm() - 1.0).abs() > 1e-12 || !offset.is_finite() {
                    return bad("halfspace normal must be a unit vector");
                }
            }
            DomainSpec::Slab { normal, lo, hi } => {
                if (normal.norm() - 1.0).abs() > 1e-12 {
                    return bad("slab normal must be a unit vector");
                }
                if !(lo < hi) {
                    return bad("slab needs lo < hi");
                }
            }
            DomainSpec::UnionChain { members } => {
                if members.is_empty() {
                    return bad("union chain is empty");
                }
                for m in members {
                    check_dim(n, m.dim())?;
                    m.validate()?;
                }
            }
            DomainSpec::FullSpace { .. } | DomainSpec::ConvexComplement { .. } => {}
        }
        Ok(())
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            DomainSpec::FullSpace { .. } => true,
            DomainSpec::ConvexComplement { body } => !body.contains(x, 0.0),
            DomainSpec::Wedge { angle, frame } => {
                let (u, w) = wedge_local(frame, x);
                (u != 0.0 || w != 0.0) && w.atan2(u).abs() < angle / 2.0
            }
            DomainSpec::QuadricGraph { a1, a2, a3 } => quadric_gap(*a1, *a2, *a3, x) > 0.0,
            DomainSpec::WedgeGraph { a2, a3, .. } => x[3] > -a2 * x[1].abs() + a3 * x[2].abs(),
            DomainSpec::Halfspace { normal, offset } => normal.dot(x) > *offset,
            DomainSpec::Slab { normal, lo, hi } => {
                let v = normal.dot(x);
                *lo < v && v < *hi
            }
            DomainSpec::UnionChain { members } => {
                for m in members {
                    if m.contains(x)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Distance from `x` to `R^n ∖ Ω`; zero outside Ω, `+∞` for R^n.
    pub fn clearance(&self, x: &Point) -> Result<f64> {
        if !self.contains(x)? {
            return Ok(0.0);
        }
        Ok(match self {
            DomainSpec::FullSpace { .. } => f64::INFINITY,
            DomainSpec::ConvexComplement { body } => match body.distance(x) {
                Ok(d) => d,
                Err(Error::EmptyBody) => f64::INFINITY,
                Err(e) => return Err(e),
            },
            DomainSpec::Wedge { angle, frame } => {
                let (u, w) = wedge_local(frame, x);
                cone_complement_distance(*angle, u, w)
            }
            DomainSpec::QuadricGraph { a1, a2, a3 } => quadric_distance(*a1, *a2, *a3, x),
            DomainSpec::WedgeGraph { a2, a3, dim } => {
                let mut best = f64::INFINITY;
                for piece in wedge_graph_complement(*a2, *a3, *dim)? {
                    best = best.min(piece.distance(x)?);
                }
                best
            }
            DomainSpec::Halfspace { normal, offset } => normal.dot(x) - offset,
            DomainSpec::Slab { normal, lo, hi } => {
                let v = normal.dot(x);
                (v - lo).min(hi - v)
            }
            DomainSpec::UnionChain { members } => {
                let mut best = 0.0f64;
                for m in members {
                    best = best.max(m.clearance(x)?);
                }
                best
            }
        })
    }

    /// The closed complement of a wedge with `φ ≥ π` as a convex cone.
    pub fn wedge_complement_body(&self) -> Option<ConvexBody> {
        let DomainSpec::Wedge { angle, frame } = self else {
            return None;
        };
        if *angle < PI {
            return None;
        }
        let dim = self.dim();
        let (s, c) = (angle / 2.0).sin_cos();
        let mut n1 = Point::zeros(dim);
        n1[1] = s;
        n1[2] = -c;
        let mut n2 = Point::zeros(dim);
        n2[1] = s;
        n2[2] = c;
        let local = ConvexBody::polyhedron(dim, vec![(n1, 0.0), (n2, 0.0)]).ok()?;
        match frame {
            Some(f) => local.transformed(f).ok(),
            None => Some(local),
        }
    }

    /// Checks that sampled points of each member lie in the next one.
    pub fn check_chain(&self, samples: usize, radius: f64, seed: u64) -> Result<bool> {
        let DomainSpec::UnionChain { members } = self else {
            return Ok(true);
        };
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pair in members.windows(2) {
            for _ in 0..samples {
                let x = Point::from_fn(n, |_, _| rng.gen_range(-radius..radius));
                if pair[0].contains(&x)? && !pair[1].contains(&x)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn wedge_local(frame: &Option<RigidMotion>, x: &Point) -> (f64, f64) {
    match frame {
        Some(f) => {
            let l = f.inverse_apply(x);
            (l[1], l[2])
        }
        None => (x[1], x[2]),
    }
}

/// Distance from `(u, w)` in the open cone `|arg| < φ/2` to its complement.
fn cone_complement_distance(angle: f64, u: f64, w: f64) -> f64 {
    let half = angle / 2.0;
    [(half.cos(), half.sin()), (half.cos(), -half.sin())]
        .iter()
        .map(|&(rc, rs)| {
            let t = u * rc + w * rs;
            if t <= 0.0 {
                u.hypot(w)
            } else {
                (u - t * rc).hypot(w - t * rs)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// `x₄ + a₁x₁² + a₂x₂² − a₃x₃²`; positive exactly on the quadric domain.
fn quadric_gap(a1: f64, a2: f64, a3: f64, x: &Point) -> f64 {
    x[3] + a1 * x[0] * x[0] + a2 * x[1] * x[1] - a3 * x[2] * x[2]
}

/// Distance from `y` to the surface `F = 0`, `F = x₄ + Σ cᵢxᵢ²`.
///
/// The foot point satisfies `x − y = μ∇F(x)`, so `xᵢ = yᵢ/(1 − 2cᵢμ)` and
/// `x₄ = y₄ + μ`. The vertical drop shows `|μ| ≤ F(y)`, so every root of the
/// scalar equation in that window is located by sampling and bisection. At a
/// pole `μ = 1/(2cᵢ)` the coordinates with that coefficient are free and are
/// placed on the ray through `y`.
fn quadric_distance(a1: f64, a2: f64, a3: f64, y: &Point) -> f64 {
    let c = [a1, a2, -a3];
    let f = quadric_gap(a1, a2, a3, y);
    if f <= 0.0 {
        return 0.0;
    }
    let foot_dist = |mu: f64| -> Option<f64> {
        let mut d2 = mu * mu;
        for i in 0..3 {
            let den = 1.0 - 2.0 * c[i] * mu;
            if den == 0.0 {
                return None;
            }
            let xi = y[i] / den;
            d2 += (xi - y[i]).powi(2);
        }
        Some(d2.sqrt())
    };
    let phi = |mu: f64| -> f64 {
        let mut v = y[3] + mu;
        for i in 0..3 {
            let den = 1.0 - 2.0 * c[i] * mu;
            v += c[i] * (y[i] / den).powi(2);
        }
        v
    };

    let mut best = f;
    let poles: Vec<f64> = c
        .iter()
        .filter(|ci| **ci != 0.0)
        .map(|ci| 0.5 / ci)
        .filter(|p| p.abs() <= f)
        .collect();

    let mut grid: Vec<f64> = (0..=2000).map(|k| -f + 2.0 * f * k as f64 / 2000.0).collect();
    for &p in &poles {
        for j in 1..=18 {
            for scale in [f, 1.0] {
                let e = scale * 10f64.powi(-j);
                grid.push(p - e);
                grid.push(p + e);
            }
        }
    }
    grid.retain(|m| m.abs() <= f && !poles.contains(m));
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut prev: Option<(f64, f64)> = None;
    for &m in &grid {
        let v = phi(m);
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if v == 0.0 {
            if let Some(d) = foot_dist(m) {
                best = best.min(d);
            }
        } else if let Some((m0, v0)) = prev {
            let no_pole_between = !poles.iter().any(|p| *p > m0 && *p < m);
            if no_pole_between && v0.signum() != v.signum() && v0 != 0.0 {
                let root = bisect(&phi, m0, m, v0);
                if let Some(d) = foot_dist(root) {
                    best = best.min(d);
                }
            }
        }
        prev = Some((m, v));
    }

    for &p in &poles {
        // free group: coefficients equal to the pole's; others follow from μ
        let mut fixed = y[3] + p;
        let mut d2 = p * p;
        let mut free_norm2 = 0.0;
        let mut coef = 0.0;
        for i in 0..3 {
            let den = 1.0 - 2.0 * c[i] * p;
            if den.abs() < 1e-15 {
                coef = c[i];
                free_norm2 += y[i] * y[i];
            } else {
                let xi = y[i] / den;
                fixed += c[i] * xi * xi;
                d2 += (xi - y[i]).powi(2);
            }
        }
        let r2 = -fixed / coef;
        if r2 >= 0.0 {
            d2 += (r2.sqrt() - free_norm2.sqrt()).powi(2);
            best = best.min(d2.sqrt());
        }
    }
    best
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut glo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Convex pieces whose union is the complement of a wedge graph.
///
/// `−a₂|x₂| = min_σ (−σa₂x₂)`; for `a₃ ≥ 0`, `a₃|x₃| = max_σ σa₃x₃`, which makes
/// the complement a union of two polyhedra. For `a₃ < 0` both terms are minima
/// and the complement is a single polyhedron.
fn wedge_graph_complement(a2: f64, a3: f64, dim: usize) -> Result<Vec<ConvexBody>> {
    let half = |s2: f64, s3: f64| {
        let mut a = Point::zeros(dim);
        a[1] = a2 * s2;
        a[2] = -a3 * s3;
        a[3] = 1.0;
        (a, 0.0)
    };
    if a3 >= 0.0 {
        [1.0, -1.0]
            .iter()
            .map(|&s3| ConvexBody::polyhedron(dim, vec![half(1.0, s3), half(-1.0, s3)]))
            .collect()
    } else {
        let all = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
        Ok(vec![ConvexBody::polyhedron(dim, all.iter().map(|&(a, b)| half(a, b)).collect())?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_orthogonal, random_unit, unit};
    use std::f64::consts::FRAC_PI_2;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    /// Brute-force distance to the graph `x₄ = g(x₁,x₂,x₃)` by multistart
    /// gradient descent on the squared distance over graph parameters.
    fn graph_distance_oracle(g: &dyn Fn(&[f64; 3]) -> f64, y: &Point) -> f64 {
        let d2 = |u: &[f64; 3]| {
            (u[0] - y[0]).powi(2) + (u[1] - y[1]).powi(2) + (u[2] - y[2]).powi(2) + (g(u) - y[3]).powi(2)
        };
        let mut best = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let span = 1.0 + y.norm();
        for start in 0..300 {
            let mut u = if start == 0 {
                [y[0], y[1], y[2]]
            } else {
                [
                    y[0] + rng.gen_range(-span..span),
                    y[1] + rng.gen_range(-span..span),
                    y[2] + rng.gen_range(-span..span),
                ]
            };
            let mut step = 0.1 * span;
            let mut cur = d2(&u);
            while step > 1e-12 {
                let mut moved = false;
                for i in 0..3 {
                    for s in [step, -step] {
                        let mut v = u;
                        v[i] += s;
                        let val = d2(&v);
                        if val < cur {
                            cur = val;
                            u = v;
                            moved = true;
                        }
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            best = best.min(cur.sqrt());
        }
        best
    }

    #[test]
    fn membership_examples() {
        assert!(DomainSpec::wedge(1.5 * PI).unwrap().contains(&p(&[0., 1., 0.])).unwrap());
        let q = DomainSpec::quadric_graph(1., 1., 1.).unwrap();
        assert!(q.contains(&p(&[0., 0., 0., 1.])).unwrap());
        let ball = DomainSpec::ConvexComplement { body: ConvexBody::ball(Point::zeros(3), 1.0).unwrap() };
        assert!(!ball.contains(&p(&[0.5, 0., 0.])).unwrap());
        assert!(matches!(ball.contains(&p(&[0.5, 0.])), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn boundary_points_are_excluded() {
        let h = DomainSpec::halfspace(unit(3, 2), 0.0).unwrap();
        assert!(!h.contains(&p(&[1., 1., 0.])).unwrap());
        let w = DomainSpec::wedge(FRAC_PI_2).unwrap();
        assert!(!w.contains(&p(&[0., 1., 1.])).unwrap());
        assert!(!w.contains(&p(&[3., 0., 0.])).unwrap());
        let q = DomainSpec::quadric_graph(1., 1., 0.).unwrap();
        assert!(!q.contains(&p(&[1., 0., 5., -1.])).unwrap());
        let ball = DomainSpec::ConvexComplement { body: ConvexBody::ball(Point::zeros(3), 1.0).unwrap() };
        assert!(!ball.contains(&p(&[1., 0., 0.])).unwrap());
    }

    #[test]
    fn clearance_examples() {
        let ball = DomainSpec::ConvexComplement { body: ConvexBody::ball(Point::zeros(3), 1.0).unwrap() };
        assert!((ball.clearance(&p(&[2., 0., 0.])).unwrap() - 1.0).abs() < 1e-12);
        let h = DomainSpec::halfspace(unit(3, 2), 0.0).unwrap();
        assert!((h.clearance(&p(&[0., 0., 5.])).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(h.clearance(&p(&[0., 0., -5.])).unwrap(), 0.0);
        let full = DomainSpec::FullSpace { dim: 3 };
        assert!(full.clearance(&p(&[1., 2., 3.])).unwrap().is_infinite());
    }

    #[test]
    fn quadric_clearance_grows_along_x2() {
        let q = DomainSpec::quadric_graph(1., 1., 0.).unwrap();
        // slice oracle: min over t of (t − B)² + t⁴ by dense search then refinement
        let oracle = |b: f64| {
            let h = |t: f64| ((t - b).powi(2) + t.powi(4)).sqrt();
            let (mut lo, mut hi) = (-1.0f64, b.max(1.0));
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if h(m1) < h(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            h(0.5 * (lo + hi))
        };
        let mut prev = 0.0;
        for b in [1.0, 10.0, 100.0] {
            let c = q.clearance(&p(&[0., b, 0., 0.])).unwrap();
            assert!((c - oracle(b)).abs() < 1e-8, "B={b}: {c} vs {}", oracle(b));
            assert!(c > prev);
            prev = c;
        }
        assert!(prev > 50.0);
    }

    #[test]
    fn quadric_clearance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (a1, a2, a3) in [(1.0, 1.0, 1.0), (0.0, 2.0, -1.0), (0.5, 3.0, 2.0), (2.0, 0.5, 0.0)] {
            let q = DomainSpec::quadric_graph(a1, a2, a3).unwrap();
            let g = move |u: &[f64; 3]| -a1 * u[0] * u[0] - a2 * u[1] * u[1] + a3 * u[2] * u[2];
            let mut checked = 0;
            while checked < 6 {
                let y = Point::from_fn(4, |_, _| rng.gen_range(-2.0..2.0));
                if !q.contains(&y).unwrap() {
                    continue;
                }
                let c = q.clearance(&y).unwrap();
                let o = graph_distance_oracle(&g, &y);
                assert!(c <= o + 1e-6, "overestimate at {y:?}: {c} > {o}");
                assert!(c >= o - 1e-5, "underestimate at {y:?}: {c} < {o}");
                checked += 1;
            }
        }
    }

    #[test]
    fn quadric_clearance_on_symmetry_axis() {
        // y on the x₃ axis: the foot point sits at a pole of the secular equation
        let q = DomainSpec::quadric_graph(0.0, 1.0, 4.0).unwrap();
        let y = p(&[0., 0., 0., 1.]);
        let g = |u: &[f64; 3]| -u[1] * u[1] + 4.0 * u[2] * u[2];
        let o = graph_distance_oracle(&g, &y);
        let c = q.clearance(&y).unwrap();
        assert!((c - o).abs() < 1e-6, "{c} vs {o}");
        assert!(c < 1.0);
    }

    #[test]
    fn wedge_graph_clearance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (a2, a3) in [(1.0, 0.5), (2.0, -1.0), (0.5, 0.0)] {
            let w = DomainSpec::WedgeGraph { a2, a3, dim: 4 };
            w.validate().unwrap();
            let g = move |u: &[f64; 3]| -a2 * u[1].abs() + a3 * u[2].abs();
            for _ in 0..8 {
                let y = Point::from_fn(4, |_, _| rng.gen_range(-2.0..2.0));
                let c = w.clearance(&y).unwrap();
                if !w.contains(&y).unwrap() {
                    assert_eq!(c, 0.0);
                    continue;
                }
                let o = graph_distance_oracle(&g, &y);
                assert!((c - o).abs() < 1e-5, "a2={a2} a3={a3} y={y:?}: {c} vs {o}");
            }
        }
    }

    #[test]
    fn wedge_clearance_is_planar_distance() {
        let w = DomainSpec::wedge(1.5 * PI).unwrap();
        // inside the open quadrant-complement: distance to nearest boundary ray
        assert!((w.clearance(&p(&[7., 1., 0.])).unwrap() - 1.0).abs() < 1e-12);
        let r = 2.0;
        let x = p(&[0., 0., r]);
        assert!((w.clearance(&x).unwrap() - r * (PI / 4.0).sin()).abs() < 1e-12);
        let narrow = DomainSpec::wedge(FRAC_PI_2).unwrap();
        assert!((narrow.clearance(&p(&[0., 1., 0.])).unwrap() - (PI / 4.0).sin()).abs() < 1e-12);
    }

    fn sample_domains() -> Vec<DomainSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frame = RigidMotion::new(random_orthogonal(3, &mut rng), p(&[0.3, -0.2, 0.5])).unwrap();
        vec![
            DomainSpec::ConvexComplement { body: ConvexBody::ball(Point::zeros(3), 1.0).unwrap() },
            DomainSpec::ConvexComplement {
                body: ConvexBody::polyhedron(3, vec![(unit(3, 0), 1.0), (-unit(3, 0), 1.0), (unit(3, 1), 0.0)])
                    .unwrap(),
            },
            DomainSpec::wedge(1.5 * PI).unwrap(),
            DomainSpec::Wedge { angle: 0.7 * PI, frame: Some(frame) },
            DomainSpec::quadric_graph(1.0, 1.0, 1.0).unwrap(),
            DomainSpec::quadric_graph(0.0, 2.0, -1.0).unwrap(),
            DomainSpec::WedgeGraph { a2: 1.0, a3: 0.5, dim: 5 },
            DomainSpec::halfspace(p(&[1., 1., 0.]), 0.5).unwrap(),
            DomainSpec::slab(unit(3, 2), -1.0, 1.0).unwrap(),
            DomainSpec::UnionChain {
                members: vec![
                    DomainSpec::halfspace(unit(3, 2), 2.0).unwrap(),
                    DomainSpec::halfspace(unit(3, 2), 1.0).unwrap(),
                ],
            },
        ]
    }

    #[test]
    fn clearance_positive_iff_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in sample_domains() {
            let n = d.dim();
            for _ in 0..1000 {
                let x = Point::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
                assert_eq!(d.clearance(&x).unwrap() > 0.0, d.contains(&x).unwrap(), "{d:?} at {x:?}");
            }
        }
    }

    #[test]
    fn clearance_ball_lies_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for d in sample_domains() {
            let n = d.dim();
            let mut tested = 0;
            while tested < 10 {
                let x = Point::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
                let c = d.clearance(&x).unwrap();
                if c == 0.0 || !c.is_finite() {
                    continue;
                }
                for _ in 0..100 {
                    let y = &x + random_unit(n, &mut rng) * (c * (1.0 - 1e-6));
                    assert!(d.contains(&y).unwrap(), "{d:?}: {x:?} radius {c}");
                }
                tested += 1;
            }
        }
    }

    #[test]
    fn membership_is_open() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for d in sample_domains() {
            let n = d.dim();
            for _ in 0..200 {
                let x = Point::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
                let eps = 1e-3;
                if d.clearance(&x).unwrap() > eps {
                    for _ in 0..10 {
                        let y = &x + random_unit(n, &mut rng) * (eps / 2.0);
                        assert!(d.contains(&y).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn wedge_complement_is_convex_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let frame = RigidMotion::new(random_orthogonal(3, &mut rng), p(&[1.0, 2.0, -1.0])).unwrap();
        for w in [
            DomainSpec::wedge(1.5 * PI).unwrap(),
            DomainSpec::Wedge { angle: 1.2 * PI, frame: Some(frame) },
        ] {
            let c = w.wedge_complement_body().unwrap();
            for _ in 0..1000 {
                let x = Point::from_fn(3, |_, _| rng.gen_range(-4.0..4.0));
                assert_eq!(c.contains(&x, 0.0), !w.contains(&x).unwrap());
                let dc = c.distance(&x).unwrap();
                assert!((dc - w.clearance(&x).unwrap()).abs() < 1e-9);
            }
        }
        assert!(DomainSpec::wedge(FRAC_PI_2).unwrap().wedge_complement_body().is_none());
    }

    #[test]
    fn union_chain_members_nest() {
        let d = &sample_domains()[9];
        assert!(d.check_chain(1000, 5.0, 1).unwrap());
        let bad = DomainSpec::UnionChain {
            members: vec![
                DomainSpec::halfspace(unit(3, 2), 1.0).unwrap(),
                DomainSpec::halfspace(unit(3, 2), 2.0).unwrap(),
            ],
        };
        assert!(!bad.check_chain(1000, 5.0, 1).unwrap());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DomainSpec::quadric_graph(1.0, 0.0, 1.0).is_err());
        assert!(DomainSpec::quadric_graph(-1.0, 1.0, 1.0).is_err());
        assert!(DomainSpec::wedge(2.0 * PI).is_err());
        assert!(DomainSpec::WedgeGraph { a2: 1.0, a3: 0.0, dim: 3 }.validate().is_err());
        assert!(DomainSpec::slab(unit(3, 0), 1.0, 1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        for d in sample_domains() {
            let text = serde_json::to_string(&d).unwrap();
            let back = DomainSpec::from_json(&text).unwrap();
            let x = p(&vec![0.7; d.dim()]);
            assert_eq!(back.contains(&x).unwrap(), d.contains(&x).unwrap());
            assert!((back.clearance(&x).unwrap() - d.clearance(&x).unwrap()).abs() < 1e-12);
        }
        let w = DomainSpec::from_json(r#"{"variant":"Wedge","angle":4.71238898038469}"#).unwrap();
        assert_eq!(w.dim(), 3);
        let c = DomainSpec::from_json(r#"{"variant":"ConvexComplement","body":{"dim":3,"support":"ball"}}"#).unwrap();
        assert!((c.clearance(&p(&[3., 0., 0.])).unwrap() - 2.0).abs() < 1e-12);
    }
}
