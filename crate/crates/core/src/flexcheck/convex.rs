//! Complements of closed convex sets in R^n.

use std::f64::consts::FRAC_PI_4;

use super::{certified, invalid, plane_distance, ClassificationResult, Rule, Verdict};
use crate::convexgeo::{AffinePlane, ConvexBody};
use crate::domains::DomainSpec;
use crate::linalg::{gram_schmidt, orthogonal_complement, reject};
use crate::{Error, Point, Result};

const TILT_STEPS: usize = 12;

/// Flexible unless `C` is a halfspace or a slab.
///
/// Writing `C = C' × R^k` with `C'` line-free, the witness is built inside a
/// hyperplane through an exterior point `p` parallel to a supporting
/// hyperplane of `C'`. For `m = n − k ≥ 3` the plane spans two directions of
/// that hyperplane; for `m = 2` it is the hyperplane's line times a lineality
/// direction. If the untilted plane fails certification the hyperplane is
/// tilted by `π/4, π/8, …` towards each of its directions.
pub fn classify_convex_complement(c: &ConvexBody) -> Result<ClassificationResult> {
    let n = c.dim();
    if n < 3 {
        return Err(invalid("convex complements need dimension ≥ 3"));
    }
    if c.is_whole_space() {
        return Err(invalid("C must be a proper subset of R^n"));
    }
    if c.is_empty() {
        return Ok(ClassificationResult::flexible(Rule::FullSpace, None, vec!["C is empty, Ω = R^n".into()]));
    }
    let k = match c.lineality_dim() {
        Ok(k) => k,
        Err(Error::NonPolyhedral) => {
            return Ok(ClassificationResult::unknown(vec![
                "lineality space unknown: no halfspace data and no hint".into(),
            ]))
        }
        Err(Error::EmptyBody) => {
            return Ok(ClassificationResult::flexible(Rule::FullSpace, None, vec!["C is empty, Ω = R^n".into()]))
        }
        Err(e) => return Err(e),
    };
    if k >= n {
        return Err(invalid("C must be a proper subset of R^n"));
    }
    let m = n - k;
    let mut diagnostics = vec![format!("lineality dimension k = {k}, m = {m}")];
    if m == 1 {
        diagnostics.push("C is a halfspace or a slab".into());
        return Ok(ClassificationResult::not_flexible(Rule::HalfspaceOrSlab, diagnostics));
    }
    let lineality = match c.lineality_directions() {
        Ok(d) => d,
        Err(Error::NonPolyhedral) => {
            diagnostics.push("k from hint; witness construction needs explicit lineality directions".into());
            return Ok(ClassificationResult::flexible(Rule::ConvexComplementRule, None, diagnostics));
        }
        Err(e) => return Err(e),
    };

    let omega = DomainSpec::ConvexComplement { body: c.clone() };
    let across = orthogonal_complement(&lineality, n);
    let p = exterior_point(c, &across)?;
    let (a, b) = c.supporting_hyperplane(&p)?;
    let a = unit_or(reject(&a, &lineality), &a);
    diagnostics.push(format!("exterior point at distance {:e}", a.dot(&p) - b));

    let in_sigma = |nu: &Point| -> Vec<Point> {
        let mut span = lineality.clone();
        span.push(nu.clone());
        let span = gram_schmidt(&span, 1e-10);
        across.iter().map(|u| reject(u, &span)).collect::<Vec<_>>()
    };

    let mut normals = vec![a.clone()];
    let sigma_dirs = gram_schmidt(&in_sigma(&a), 1e-8);
    for j in 0..TILT_STEPS {
        let theta = FRAC_PI_4 / 2f64.powi(j as i32);
        for w in &sigma_dirs {
            for sign in [1.0, -1.0] {
                normals.push(&a * theta.cos() + w * (sign * theta.sin()));
            }
        }
    }

    for (idx, nu) in normals.iter().enumerate() {
        let w = gram_schmidt(&in_sigma(nu), 1e-8);
        let pairs: Vec<(Point, Point)> = if m == 2 {
            match (w.first(), lineality.first()) {
                (Some(x), Some(y)) => vec![(x.clone(), y.clone())],
                _ => Vec::new(),
            }
        } else {
            let mut v = Vec::new();
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    if v.len() < 3 {
                        v.push((w[i].clone(), w[j].clone()));
                    }
                }
            }
            v
        };
        for (d1, d2) in pairs {
            let plane = AffinePlane::spanned_by(p.clone(), &d1, &d2)?;
            let delta = plane_distance(c, &plane)?;
            if !(delta > 1e-9) || !delta.is_finite() {
                continue;
            }
            let mut diag = diagnostics.clone();
            if idx > 0 {
                diag.push(format!("tilted supporting hyperplane (candidate {idx})"));
            }
            let r = certified(&omega, plane, delta, Rule::ConvexComplementRule, diag)?;
            if r.verdict == Verdict::Flexible {
                return Ok(r);
            }
        }
    }
    diagnostics.push("no candidate plane passed certification".into());
    Ok(ClassificationResult::unknown(diagnostics))
}

fn unit_or(v: Point, fallback: &Point) -> Point {
    let n = v.norm();
    if n > 1e-12 {
        v / n
    } else {
        fallback.clone()
    }
}

/// A point at distance ≥ 1 from `C`, reached from a point of `C` along a
/// direction transverse to the lineality space.
pub(super) fn exterior_point(c: &ConvexBody, across: &[Point]) -> Result<Point> {
    let y0 = c.project(&Point::zeros(c.dim()))?.point;
    for u in across {
        for sign in [1.0, -1.0] {
            for j in 0..super::GROWTH_STEPS {
                let q = &y0 + u * (sign * 2f64.powi(j as i32));
                if c.distance(&q)? >= 1.0 {
                    return Ok(q);
                }
            }
        }
    }
    Err(invalid("no exterior point found: C contains a line transverse to its lineality space"))
}
