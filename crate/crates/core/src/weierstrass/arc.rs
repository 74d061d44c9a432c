//! Extension of a generalized conformal minimal immersion across an arc.
//!
//! Given two points of Ω, a polyline joining them inside Ω is found (straight
//! segment first, then a seeded rapidly-exploring random tree), split into
//! short segments, and each segment carries the constant null vector
//! `h = real_to_null(Δ/Δt)`. Then `f(t) = f(0) + Re ∫₀ᵗ h dt` is the
//! polyline itself and stays in Ω. The resulting `h` jumps at segment joints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{real_to_null, NullVector};
use crate::domains::DomainSpec;
use crate::error::check_dim;
use crate::report::{extended_f64, point_serde, points_serde};
use crate::{Error, Point, Result};

pub const ARC_SAMPLES: usize = 1000;
const RRT_BUDGET: usize = 20_000;
const GOAL_BIAS: f64 = 0.1;
const TRACE_STEPS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub t0: f64,
    pub t1: f64,
    #[serde(with = "point_serde")]
    pub start: Point,
    #[serde(with = "point_serde")]
    pub end: Point,
    pub h: NullVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSample {
    pub t: f64,
    #[serde(with = "point_serde")]
    pub f: Point,
    #[serde(with = "extended_f64")]
    pub clearance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcExtension {
    pub omega: DomainSpec,
    #[serde(with = "point_serde")]
    pub p: Point,
    #[serde(with = "point_serde")]
    pub q: Point,
    #[serde(with = "points_serde")]
    pub polyline: Vec<Point>,
    pub segments: Vec<ArcSegment>,
    pub samples: Vec<ArcSample>,
    /// Certified lower bound for the clearance along the whole polyline.
    #[serde(with = "extended_f64")]
    pub min_clearance: f64,
    pub endpoint_error: f64,
    /// `h` is piecewise constant, so the extension is not smooth at joints.
    pub smooth: bool,
}

impl ArcExtension {
    fn segment_at(&self, t: f64) -> &ArcSegment {
        let k = self.segments.partition_point(|s| s.t1 < t).min(self.segments.len() - 1);
        &self.segments[k]
    }

    /// `f(t)`.
    pub fn eval(&self, t: f64) -> Point {
        let s = self.segment_at(t);
        if t >= s.t1 {
            return s.end.clone();
        }
        let r = (t - s.t0) / (s.t1 - s.t0);
        &s.start + (&s.end - &s.start) * r
    }

    /// `h(t)`, the left-continuous value at joints.
    pub fn h(&self, t: f64) -> &NullVector {
        &self.segment_at(t).h
    }
}

/// Lower bound for the clearance along `[a, b]`, or `None` if the segment
/// cannot be certified inside Ω. Uses the 1-Lipschitz clearance: each
/// sample certifies a ball, and steps of half the clearance keep consecutive
/// balls overlapping.
fn segment_clearance(omega: &DomainSpec, a: &Point, b: &Point) -> Result<Option<f64>> {
    let len = (b - a).norm();
    let mut t = 0.0;
    let mut lower = f64::INFINITY;
    for _ in 0..TRACE_STEPS {
        let x = if len > 0.0 { a + (b - a) * (t / len) } else { a.clone() };
        let c = omega.clearance(&x)?;
        if !(c > 1e-9 * (1.0 + x.norm())) {
            return Ok(None);
        }
        lower = lower.min(0.5 * c);
        if t >= len {
            return Ok(Some(lower));
        }
        t = (t + 0.5 * c).min(len);
    }
    Ok(None)
}

fn find_polyline(omega: &DomainSpec, p: &Point, q: &Point, seed: u64) -> Result<Vec<Point>> {
    if segment_clearance(omega, p, q)?.is_some() {
        return Ok(vec![p.clone(), q.clone()]);
    }
    let n = p.len();
    let reach = (p - q).norm().max(1.0);
    let lo = p.zip_map(q, f64::min).add_scalar(-reach);
    let hi = p.zip_map(q, f64::max).add_scalar(reach);
    let step = 0.5 * reach;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![p.clone()];
    let mut parent = vec![0usize];
    for _ in 0..RRT_BUDGET {
        let target = if rng.gen::<f64>() < GOAL_BIAS {
            q.clone()
        } else {
            Point::from_fn(n, |i, _| rng.gen_range(lo[i]..=hi[i]))
        };
        let near = (0..nodes.len())
            .min_by(|a, b| (&nodes[*a] - &target).norm().total_cmp(&(&nodes[*b] - &target).norm()))
            .unwrap_or(0);
        let dir = &target - &nodes[near];
        let dist = dir.norm();
        if dist == 0.0 {
            continue;
        }
        let x = if dist > step { &nodes[near] + dir * (step / dist) } else { target };
        if !omega.contains(&x)? || segment_clearance(omega, &nodes[near], &x)?.is_none() {
            continue;
        }
        nodes.push(x.clone());
        parent.push(near);
        if segment_clearance(omega, &x, q)?.is_some() {
            let mut path = vec![q.clone()];
            let mut k = nodes.len() - 1;
            loop {
                path.push(nodes[k].clone());
                if k == 0 {
                    break;
                }
                k = parent[k];
            }
            path.reverse();
            return shortcut(omega, path);
        }
    }
    Err(Error::NoPathFound)
}

/// Greedy removal of intermediate vertices.
fn shortcut(omega: &DomainSpec, path: Vec<Point>) -> Result<Vec<Point>> {
    let mut out = vec![path[0].clone()];
    let mut i = 0;
    while i + 1 < path.len() {
        let mut j = path.len() - 1;
        while j > i + 1 && segment_clearance(omega, &path[i], &path[j])?.is_none() {
            j -= 1;
        }
        out.push(path[j].clone());
        i = j;
    }
    Ok(out)
}

/// Joins `p` to `q` inside Ω by a piecewise-linear `f` on `[0, 1]` with
/// piecewise-constant null `h`, `Re h = f′`. At least `segments` segments are
/// used (one per polyline leg at minimum), allocated by leg length.
pub fn extend_arc(p: &Point, q: &Point, omega: &DomainSpec, segments: usize, seed: u64) -> Result<ArcExtension> {
    check_dim(omega.dim(), p.len())?;
    check_dim(omega.dim(), q.len())?;
    if p.len() < 3 {
        return Err(Error::InvalidParams("arc extension needs n ≥ 3".into()));
    }
    if !omega.contains(p)? || !omega.contains(q)? {
        return Err(Error::EndpointOutsideDomain);
    }
    if p == q {
        return Err(Error::InvalidParams("endpoints coincide".into()));
    }
    let polyline = find_polyline(omega, p, q, seed)?;
    let legs: Vec<f64> = polyline.windows(2).map(|w| (&w[1] - &w[0]).norm()).collect();
    let total: f64 = legs.iter().sum();
    let want = segments.max(legs.len());
    let pieces: Vec<usize> = legs.iter().map(|l| ((want as f64 * l / total).round() as usize).max(1)).collect();
    let count: usize = pieces.iter().sum();

    let mut segs = Vec::with_capacity(count);
    let mut min_clearance = f64::INFINITY;
    let mut k = 0;
    for (leg, m) in polyline.windows(2).zip(&pieces) {
        min_clearance = min_clearance.min(segment_clearance(omega, &leg[0], &leg[1])?.ok_or(Error::NoPathFound)?);
        for r in 0..*m {
            let start = if r == 0 { leg[0].clone() } else { &leg[0] + (&leg[1] - &leg[0]) * (r as f64 / *m as f64) };
            let end = if r + 1 == *m {
                leg[1].clone()
            } else {
                &leg[0] + (&leg[1] - &leg[0]) * ((r + 1) as f64 / *m as f64)
            };
            let (t0, t1) = (k as f64 / count as f64, (k + 1) as f64 / count as f64);
            let h = real_to_null(&((&end - &start) / (t1 - t0)))?;
            segs.push(ArcSegment { t0, t1, start, end, h });
            k += 1;
        }
    }
    let mut arc = ArcExtension {
        omega: omega.clone(),
        p: p.clone(),
        q: q.clone(),
        polyline,
        segments: segs,
        samples: Vec::new(),
        min_clearance,
        endpoint_error: 0.0,
        smooth: false,
    };
    let samples = (0..ARC_SAMPLES)
        .map(|i| {
            let t = i as f64 / (ARC_SAMPLES - 1) as f64;
            let f = arc.eval(t);
            Ok(ArcSample { t, clearance: omega.clearance(&f)?, f })
        })
        .collect::<Result<Vec<_>>>()?;
    arc.endpoint_error = (&arc.eval(0.0) - p).amax().max((&arc.eval(1.0) - q).amax());
    arc.samples = samples;
    Ok(arc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcCheck {
    /// Max over samples of `|f(t) − f(0) − Re ∫₀ᵗ h|`.
    pub integral_mismatch: f64,
    /// Max over segment midpoints of `|f′ − Re h|` with `f′` by central differences.
    pub derivative_mismatch: f64,
    pub all_inside: bool,
    #[serde(with = "extended_f64")]
    pub min_sample_clearance: f64,
    pub endpoint_error: f64,
    pub max_null_residual: f64,
}

/// Re-checks the invariants of an arc extension.
pub fn verify_arc(arc: &ArcExtension) -> Result<ArcCheck> {
    let f0 = arc.eval(0.0);
    let mut integral_mismatch = 0.0f64;
    for s in &arc.samples {
        let mut acc = f0.clone();
        for seg in &arc.segments {
            if seg.t0 >= s.t {
                break;
            }
            acc += seg.h.re() * (seg.t1.min(s.t) - seg.t0);
        }
        integral_mismatch = integral_mismatch.max((&acc - &s.f).amax());
    }
    let mut derivative_mismatch = 0.0f64;
    let mut max_null_residual = 0.0f64;
    for seg in &arc.segments {
        let dt = seg.t1 - seg.t0;
        let (mid, d) = (0.5 * (seg.t0 + seg.t1), 0.25 * dt);
        let fd = (arc.eval(mid + d) - arc.eval(mid - d)) / (2.0 * d);
        derivative_mismatch = derivative_mismatch.max((fd - seg.h.re()).amax());
        max_null_residual = max_null_residual.max(super::null_residual(seg.h.as_vector().as_slice()));
    }
    let mut all_inside = true;
    let mut min_sample_clearance = f64::INFINITY;
    for s in &arc.samples {
        all_inside &= arc.omega.contains(&s.f)?;
        min_sample_clearance = min_sample_clearance.min(arc.omega.clearance(&s.f)?);
    }
    Ok(ArcCheck {
        integral_mismatch,
        derivative_mismatch,
        all_inside,
        min_sample_clearance,
        endpoint_error: (&arc.eval(0.0) - &arc.p).amax().max((&arc.eval(1.0) - &arc.q).amax()),
        max_null_residual,
    })
}
