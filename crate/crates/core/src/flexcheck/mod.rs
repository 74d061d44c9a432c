//! Flexibility classifiers and witness planes.
//!
//! Positive verdicts come with a witness: an affine 2-plane Λ whose δ-tube
//! lies in Ω (tube condition) and along which points with arbitrarily large
//! clearance exist (growth condition). Negative verdicts are issued only by
//! three rules: the complement is a halfspace or slab, Ω sits inside a
//! halfspace (harmonic maps from C into a halfspace have a constant
//! component), or a complex one-dimensional factor is hyperbolic by Picard's
//! theorem. Everything else is [`Verdict::Unknown`].

mod certify;
mod complex;
mod convex;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use certify::{plane_distance, tube_clearance, verify_growth_condition, verify_tube_condition, GROWTH_STEPS};
pub use complex::{classify_complex_complement, complex_lineality, ComplexLinealityReport};
pub use convex::classify_convex_complement;

use crate::convexgeo::AffinePlane;
use crate::domains::DomainSpec;
use crate::linalg::unit;
use crate::report::extended_f64;
use crate::{Error, Point, Result};

/// Radii used to re-certify every witness.
pub const CERTIFY_RADII: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Flexible,
    NotFlexible,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// R^n itself (empty complement).
    FullSpace,
    HalfspaceOrSlab,
    LiouvilleHalfspaceContainment,
    HyperbolicFactor,
    TubePlusGrowth,
    ConvexComplementRule,
    UnionChainRule,
    ComplexHyperplane,
    ComplexProductRule,
}

impl Rule {
    pub fn is_negative(self) -> bool {
        matches!(self, Rule::HalfspaceOrSlab | Rule::LiouvilleHalfspaceContainment | Rule::HyperbolicFactor)
    }
}

/// A point found by the growth search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub radius: f64,
    #[serde(with = "crate::report::point_serde")]
    pub point: Point,
    #[serde(with = "extended_f64")]
    pub clearance: f64,
}

/// Certified witness plane. For complex witnesses the plane is the complex
/// line `base + span_C(dirs[0])` with `dirs[1] = J·dirs[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub plane: AffinePlane,
    pub delta: f64,
    pub growth: Vec<GrowthSample>,
    #[serde(default)]
    pub complex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub reason: Option<Rule>,
    pub witness: Option<Witness>,
    pub diagnostics: Vec<String>,
}

impl ClassificationResult {
    pub fn flexible(reason: Rule, witness: Option<Witness>, diagnostics: Vec<String>) -> Self {
        ClassificationResult { verdict: Verdict::Flexible, reason: Some(reason), witness, diagnostics }
    }

    pub fn not_flexible(reason: Rule, diagnostics: Vec<String>) -> Self {
        ClassificationResult { verdict: Verdict::NotFlexible, reason: Some(reason), witness: None, diagnostics }
    }

    pub fn unknown(diagnostics: Vec<String>) -> Self {
        ClassificationResult { verdict: Verdict::Unknown, reason: None, witness: None, diagnostics }
    }
}

/// Classifies a catalogued domain.
pub fn classify_domain(omega: &DomainSpec) -> Result<ClassificationResult> {
    omega.validate()?;
    match omega {
        DomainSpec::FullSpace { .. } => Ok(ClassificationResult::flexible(
            Rule::FullSpace,
            None,
            vec!["R^n is flexible".into()],
        )),
        DomainSpec::ConvexComplement { body } => classify_convex_complement(body),
        DomainSpec::Wedge { angle, frame } => {
            let phi = *angle;
            if (phi - PI).abs() <= 1e-12 {
                return Ok(ClassificationResult::not_flexible(
                    Rule::HalfspaceOrSlab,
                    vec!["wedge of angle π is a halfspace".into()],
                ));
            }
            if phi < PI {
                return Ok(ClassificationResult::not_flexible(
                    Rule::LiouvilleHalfspaceContainment,
                    vec![format!("wedge of angle {phi} lies in a halfspace")],
                ));
            }
            // edge direction plus the direction of one side of the cone
            let n = omega.dim();
            let (s, c) = (phi / 2.0).sin_cos();
            let mut p = Point::zeros(n);
            p[1] = 1.0;
            let mut side = Point::zeros(n);
            side[1] = c;
            side[2] = s;
            let (p, d1, d2) = match frame {
                Some(f) => (f.apply(&p), f.apply_linear(&unit(n, 0)), f.apply_linear(&side)),
                None => (p, unit(n, 0), side),
            };
            let plane = AffinePlane::spanned_by(p, &d1, &d2)?;
            let delta = s * (1.0 - 1e-9);
            certified(omega, plane, delta, Rule::TubePlusGrowth, vec![format!("wedge angle {phi} > π")])
        }
        DomainSpec::QuadricGraph { a1, a2, a3 } => {
            // tangent plane of the slice graph at (0, 0), lifted through p = (0, 0, 0, 1)
            let p = Point::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
            let plane = AffinePlane::new(p, unit(4, 0), unit(4, 1))?;
            sampled_witness(omega, plane, vec![format!("quadric graph a = ({a1}, {a2}, {a3}), slice x3 = 0")])
        }
        DomainSpec::WedgeGraph { a2, a3, dim } => {
            let mut p = Point::zeros(*dim);
            p[3] = 1.0;
            let mut side = Point::zeros(*dim);
            side[1] = 1.0;
            side[3] = -a2;
            let plane = AffinePlane::spanned_by(p, &unit(*dim, 0), &side)?;
            sampled_witness(omega, plane, vec![format!("wedge graph a2 = {a2}, a3 = {a3}, slice x3 = 0")])
        }
        DomainSpec::Halfspace { .. } => Ok(ClassificationResult::not_flexible(
            Rule::LiouvilleHalfspaceContainment,
            vec!["halfspace".into()],
        )),
        DomainSpec::Slab { .. } => Ok(ClassificationResult::not_flexible(
            Rule::LiouvilleHalfspaceContainment,
            vec!["slab lies in a halfspace".into()],
        )),
        DomainSpec::UnionChain { members } => {
            let mut diagnostics = Vec::new();
            let mut all = true;
            for (i, m) in members.iter().enumerate() {
                let r = classify_domain(m)?;
                diagnostics.push(format!("member {i}: {:?} ({:?})", r.verdict, r.reason));
                all &= r.verdict == Verdict::Flexible;
            }
            if all {
                Ok(ClassificationResult::flexible(Rule::UnionChainRule, None, diagnostics))
            } else {
                diagnostics.push("not every member is flexible".into());
                Ok(ClassificationResult::unknown(diagnostics))
            }
        }
    }
}

/// Witness whose δ is the sampled minimum clearance on the plane.
fn sampled_witness(omega: &DomainSpec, plane: AffinePlane, diagnostics: Vec<String>) -> Result<ClassificationResult> {
    let min = tube_clearance(omega, &plane)?;
    if !(min > 0.0) {
        let mut d = diagnostics;
        d.push(format!("witness plane leaves the domain (min clearance {min:e})"));
        return Ok(ClassificationResult::unknown(d));
    }
    certified(omega, plane, min * (1.0 - 1e-9), Rule::TubePlusGrowth, diagnostics)
}

/// Runs the tube check at δ/2 and the growth check; Flexible only if both pass.
pub(crate) fn certified(
    omega: &DomainSpec,
    plane: AffinePlane,
    delta: f64,
    rule: Rule,
    mut diagnostics: Vec<String>,
) -> Result<ClassificationResult> {
    if !verify_tube_condition(omega, &plane, delta / 2.0)? {
        diagnostics.push(format!("tube check failed at δ/2 = {:e}", delta / 2.0));
        return Ok(ClassificationResult::unknown(diagnostics));
    }
    let (ok, growth) = certify::growth_search(omega, &plane, &CERTIFY_RADII)?;
    if !ok {
        diagnostics.push("growth check failed".into());
        return Ok(ClassificationResult::unknown(diagnostics));
    }
    diagnostics.push(format!("tube δ = {delta:e}"));
    Ok(ClassificationResult::flexible(rule, Some(Witness { plane, delta, growth, complex: false }), diagnostics))
}

fn invalid(msg: &str) -> Error {
    Error::InvalidParams(msg.into())
}

#[cfg(test)]
mod tests;
