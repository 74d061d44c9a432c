//! Complements of closed convex sets in C^n, written as R^{2n} with
//! interleaved coordinates `(x₁, y₁, x₂, y₂, …)`.

use serde::{Deserialize, Serialize};

use super::certify::growth_search_with;
use super::convex::exterior_point;
use super::{invalid, plane_distance, ClassificationResult, Rule, Witness, CERTIFY_RADII};
use crate::convexgeo::{AffinePlane, ConvexBody, SmoothPart, RANK_TOL};
use crate::linalg::{apply_j, gram_schmidt, null_space, orthogonal_complement, reject};
use crate::{Error, Point, Result};

/// Far points used to decide whether the one-dimensional factor is a point.
const FACTOR_PROBE: f64 = 1e3;
const POINT_SPREAD: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexLinealityReport {
    pub real_lineality_dim: usize,
    /// `k_C`: complex dimension of the largest complex affine subspace in `C`.
    pub complex_lineality_dim: usize,
    /// `m = n − k_C`.
    pub m: usize,
    pub factor_note: String,
}

struct Lineality {
    report: ComplexLinealityReport,
    real: Option<Vec<Point>>,
    complex: Option<Vec<Point>>,
}

fn half_dim(c: &ConvexBody) -> Result<usize> {
    if c.dim() % 2 != 0 {
        return Err(Error::OddDimension(c.dim()));
    }
    Ok(c.dim() / 2)
}

/// `V ∩ JV` for an orthonormal basis of `V`: the vectors `Bc` with `Jbc ⟂ V^⊥`.
fn complex_part(v: &[Point]) -> Result<Vec<Point>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    let d = v[0].len();
    let k = v.len();
    let cols: Vec<Point> = v.iter().map(|b| apply_j(b).map(|jb| reject(&jb, v))).collect::<Result<_>>()?;
    let rows: Vec<Point> = (0..d).map(|r| Point::from_fn(k, |i, _| cols[i][r])).collect();
    let coeffs = null_space(&rows, k, RANK_TOL);
    let vecs: Vec<Point> = coeffs
        .iter()
        .map(|c| v.iter().zip(c.iter()).fold(Point::zeros(d), |acc, (b, ci)| acc + b * *ci))
        .collect();
    Ok(gram_schmidt(&vecs, 1e-8))
}

fn lineality(c: &ConvexBody) -> Result<Lineality> {
    let n = half_dim(c)?;
    if c.is_empty() {
        return Err(Error::EmptyBody);
    }
    match c.lineality_directions() {
        Ok(real) => {
            let complex = complex_part(&real)?;
            let kc = complex.len() / 2;
            let report = ComplexLinealityReport {
                real_lineality_dim: real.len(),
                complex_lineality_dim: kc,
                m: n - kc,
                factor_note: format!("C ≅ C' × C^{kc} with C' ⊂ C^{} free of complex lines", n - kc),
            };
            Ok(Lineality { report, real: Some(real), complex: Some(complex) })
        }
        Err(Error::NonPolyhedral) => {
            let k = c.lineality_hint().ok_or(Error::NonPolyhedral)?;
            let kc = (k / 2).min(n);
            let report = ComplexLinealityReport {
                real_lineality_dim: k,
                complex_lineality_dim: kc,
                m: n - kc,
                factor_note: format!("hinted real lineality {k} assumed to contain C^{kc}"),
            };
            Ok(Lineality { report, real: None, complex: None })
        }
        Err(e) => Err(e),
    }
}

/// Real and complex lineality of `C ⊂ C^n`.
pub fn complex_lineality(c: &ConvexBody) -> Result<ComplexLinealityReport> {
    Ok(lineality(c)?.report)
}

/// Flexible for holomorphic curves unless `C ≅ C' × C^{n−1}` with `C'` not a point.
pub fn classify_complex_complement(c: &ConvexBody) -> Result<ClassificationResult> {
    let n = half_dim(c)?;
    if n < 2 {
        return Err(invalid("complex complements need n ≥ 2"));
    }
    if c.is_whole_space() {
        return Err(invalid("C must be a proper subset of C^n"));
    }
    if c.is_empty() {
        return Ok(ClassificationResult::flexible(Rule::FullSpace, None, vec!["C is empty, Ω = C^n".into()]));
    }
    let lin = lineality(c)?;
    let m = lin.report.m;
    let mut diagnostics = vec![
        format!(
            "real lineality {}, complex lineality {}, m = {m}",
            lin.report.real_lineality_dim, lin.report.complex_lineality_dim
        ),
        lin.report.factor_note.clone(),
    ];
    if m == 0 {
        return Err(invalid("C must be a proper subset of C^n"));
    }
    let (Some(real), Some(complex)) = (lin.real, lin.complex) else {
        if m == 1 {
            diagnostics.push("factor C' unknown without explicit lineality directions".into());
            return Ok(ClassificationResult::unknown(diagnostics));
        }
        diagnostics.push("witness construction needs explicit lineality directions".into());
        return Ok(ClassificationResult::flexible(Rule::ComplexProductRule, None, diagnostics));
    };

    if m == 1 {
        let spread = factor_spread(c, &complex)?;
        diagnostics.push(format!("spread of C' under far projections: {spread:e}"));
        return Ok(if spread < POINT_SPREAD {
            diagnostics.push("C is a complex hyperplane".into());
            ClassificationResult::flexible(Rule::ComplexHyperplane, None, diagnostics)
        } else {
            diagnostics.push("C \\ C' is hyperbolic by Picard's theorem".into());
            ClassificationResult::not_flexible(Rule::HyperbolicFactor, diagnostics)
        });
    }

    let across = orthogonal_complement(&real, c.dim());
    let p = exterior_point(c, &across)?;
    let (a2, b2) = c.supporting_hyperplane(&p)?;
    let ja2 = apply_j(&a2)?;
    let h = gram_schmidt(&[a2.clone(), ja2], 1e-12);
    diagnostics.push(format!("exterior point at distance {:e}", a2.dot(&p) - b2));

    let Some(a1) = finite_support_directions(c)
        .into_iter()
        .map(|u| reject(&u, &h))
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .filter(|v| v.norm() > 1e-9)
    else {
        diagnostics.push("no second supporting direction outside the complex line of the first".into());
        return Ok(ClassificationResult::unknown(diagnostics));
    };
    let v = a1.normalize();
    let jv = apply_j(&v)?;
    let line = AffinePlane::new(p, v.clone(), jv.clone())?;
    let delta = plane_distance(c, &line)?;
    if !(delta > 1e-9) {
        diagnostics.push(format!("witness line meets C (distance {delta:e})"));
        return Ok(ClassificationResult::unknown(diagnostics));
    }
    let slice_clearance = |q: &Point| match c.with_equalities(&[v.clone(), jv.clone()], q)?.distance(q) {
        Err(Error::EmptyBody) => Ok(f64::INFINITY),
        r => r,
    };
    let (ok, growth) = growth_search_with(&line, &CERTIFY_RADII, slice_clearance)?;
    if !ok {
        diagnostics.push("growth of hyperplane slices failed".into());
        return Ok(ClassificationResult::unknown(diagnostics));
    }
    diagnostics.push(format!("tube δ = {delta:e}"));
    Ok(ClassificationResult::flexible(
        Rule::ComplexProductRule,
        Some(Witness { plane: line, delta, growth, complex: true }),
        diagnostics,
    ))
}

/// Directions `u` with `sup_C u·x < ∞`.
fn finite_support_directions(c: &ConvexBody) -> Vec<Point> {
    let mut out: Vec<Point> = c.halfspaces().iter().map(|h| h.normal.clone()).collect();
    if let Some(SmoothPart::Round(r)) = c.smooth() {
        out.extend(orthogonal_complement(&r.free_axes, c.dim()));
    }
    out
}

/// Diameter of the projections of far points onto `C`, measured across the
/// complex lineality. Zero exactly when the factor `C'` is a point.
fn factor_spread(c: &ConvexBody, complex: &[Point]) -> Result<f64> {
    let w = orthogonal_complement(complex, c.dim());
    let y0 = c.project(&Point::zeros(c.dim()))?.point;
    let mut coords = Vec::new();
    for e in &w {
        for s in [FACTOR_PROBE, -FACTOR_PROBE] {
            let q = c.project(&(&y0 + e * s))?.point;
            coords.push(w.iter().map(|f| f.dot(&q)).collect::<Vec<f64>>());
        }
    }
    let mut spread = 0.0f64;
    for a in &coords {
        for b in &coords {
            let d = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            spread = spread.max(d);
        }
    }
    Ok(spread)
}
