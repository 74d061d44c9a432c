//! Tube and growth certificates for a candidate plane.

use rayon::prelude::*;

use super::GrowthSample;
use crate::convexgeo::{polyhedral_plane_distance, AffinePlane, ConvexBody};
use crate::domains::DomainSpec;
use crate::error::check_dim;
use crate::{Error, Point, Result};

/// Doubling steps per ray in the growth search (offsets up to 2^59).
pub const GROWTH_STEPS: usize = 60;
/// Parameter box `|s|, |t| ≤ PLANE_BOX` for plane minimisation and sampling.
const PLANE_BOX: f64 = 1e6;
const GOLDEN_ITERS: usize = 80;
const SAMPLES_PER_AXIS: usize = 100;

/// Golden-section minimisation of a convex function on `[lo, hi]`.
fn golden_min(f: &mut dyn FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// `inf_{x ∈ Λ} dist(x, C)`. Exact for polyhedra; otherwise see
/// [`box_plane_distance`].
pub fn plane_distance(body: &ConvexBody, plane: &AffinePlane) -> Result<f64> {
    plane.validate()?;
    check_dim(body.dim(), plane.dim())?;
    if body.flagged_empty() {
        return Ok(f64::INFINITY);
    }
    if body.is_polyhedral() {
        if let Some(d) = polyhedral_plane_distance(body.halfspaces(), &plane.base, &plane.dirs) {
            return Ok(d);
        }
    }
    box_plane_distance(body, plane)
}

/// `inf dist(Λ(s, t), C)` over the parameter box, continued outward along the
/// minimising direction when the minimum sits on the box boundary.
///
/// `(s, t) ↦ dist(Λ(s, t), C)` is convex, so nested golden-section searches
/// find its minimum; the inner minimum over `t` is again convex in `s`.
pub(crate) fn box_plane_distance(body: &ConvexBody, plane: &AffinePlane) -> Result<f64> {
    let g = |s: f64, t: f64| match body.distance(&plane.point(s, t)) {
        Err(Error::EmptyBody) => Ok(f64::INFINITY),
        r => r,
    };
    let mut outer = |s: f64| -> Result<f64> { Ok(golden_min(&mut |t| g(s, t), -PLANE_BOX, PLANE_BOX)?.1) };
    let (s, mut best) = golden_min(&mut outer, -PLANE_BOX, PLANE_BOX)?;
    let (t, v) = golden_min(&mut |t| g(s, t), -PLANE_BOX, PLANE_BOX)?;
    best = best.min(v);
    if s.abs().max(t.abs()) > 0.999 * PLANE_BOX {
        for f in [10.0, 100.0] {
            best = best.min(g(s * f, t * f)?);
        }
    }
    Ok(best)
}

/// The closed complement when it is a convex body.
fn convex_complement(omega: &DomainSpec) -> Option<ConvexBody> {
    match omega {
        DomainSpec::ConvexComplement { body } => Some(body.clone()),
        DomainSpec::Wedge { .. } => omega.wedge_complement_body(),
        _ => None,
    }
}

fn sample_params() -> Vec<f64> {
    let top = PLANE_BOX.asinh();
    (0..SAMPLES_PER_AXIS)
        .map(|i| (-top + 2.0 * top * i as f64 / (SAMPLES_PER_AXIS - 1) as f64).sinh())
        .collect()
}

/// Minimum clearance on Λ: exact when the complement is convex, otherwise the
/// minimum over a sinh-spaced 100×100 grid of plane points and the base.
pub fn tube_clearance(omega: &DomainSpec, plane: &AffinePlane) -> Result<f64> {
    plane.validate()?;
    check_dim(omega.dim(), plane.dim())?;
    if let Some(c) = convex_complement(omega) {
        return plane_distance(&c, plane);
    }
    let params = sample_params();
    let mut pts: Vec<(f64, f64)> = params.iter().flat_map(|&s| params.iter().map(move |&t| (s, t))).collect();
    pts.push((0.0, 0.0));
    pts.par_iter()
        .map(|&(s, t)| omega.clearance(&plane.point(s, t)))
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Clearance is nondecreasing along the four plane rays at offsets 10³…10⁶.
fn monotone_at_infinity(omega: &DomainSpec, plane: &AffinePlane) -> Result<bool> {
    for dir in rays(plane) {
        let mut prev = f64::NEG_INFINITY;
        for k in 3..=6 {
            let c = omega.clearance(&(&plane.base + &dir * 10f64.powi(k)))?;
            if c < prev - 1e-9 * (1.0 + prev.abs()) {
                return Ok(false);
            }
            prev = c;
        }
    }
    Ok(true)
}

fn rays(plane: &AffinePlane) -> [Point; 4] {
    [plane.dirs[0].clone(), -&plane.dirs[0], plane.dirs[1].clone(), -&plane.dirs[1]]
}

/// The δ-tube around Λ lies in Ω.
pub fn verify_tube_condition(omega: &DomainSpec, plane: &AffinePlane, delta: f64) -> Result<bool> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!("tube radius must be positive, got {delta}")));
    }
    let min = tube_clearance(omega, plane)?;
    if min < delta {
        return Ok(false);
    }
    if convex_complement(omega).is_some() {
        return Ok(true);
    }
    monotone_at_infinity(omega, plane)
}

/// For every radius there is a point of Λ with at least that clearance.
pub fn verify_growth_condition(omega: &DomainSpec, plane: &AffinePlane, radii: &[f64]) -> Result<bool> {
    plane.validate()?;
    check_dim(omega.dim(), plane.dim())?;
    Ok(growth_search(omega, plane, radii)?.0)
}

pub(crate) fn growth_search(omega: &DomainSpec, plane: &AffinePlane, radii: &[f64]) -> Result<(bool, Vec<GrowthSample>)> {
    growth_search_with(plane, radii, |q| omega.clearance(q))
}

/// Ray search along ±dirs with offsets `2^j`. Each radius is matched by the
/// first point, in order of increasing offset, whose clearance reaches it and
/// exceeds the clearance recorded for the previous radius (infinite clearance
/// matches every radius).
pub(crate) fn growth_search_with(
    plane: &AffinePlane,
    radii: &[f64],
    clearance: impl Fn(&Point) -> Result<f64>,
) -> Result<(bool, Vec<GrowthSample>)> {
    let dirs = rays(plane);
    let mut samples = Vec::with_capacity(radii.len());
    let mut start = 0;
    let mut last = f64::NEG_INFINITY;
    'radius: for &r in radii {
        for j in start..GROWTH_STEPS {
            let off = 2f64.powi(j as i32);
            for d in &dirs {
                let q = &plane.base + d * off;
                let c = clearance(&q)?;
                if c >= r && (c > last || c == f64::INFINITY) {
                    samples.push(GrowthSample { radius: r, point: q, clearance: c });
                    start = j;
                    last = c;
                    continue 'radius;
                }
            }
        }
        return Ok((false, samples));
    }
    Ok((true, samples))
}
