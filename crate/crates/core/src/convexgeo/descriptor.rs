//! JSON descriptor of a convex body.
//!
//! ```json
//! {"dim": 3,
//!  "halfspaces": [{"a": [1, 0, 0], "b": 1}],
//!  "support": "ball" | "cylinder" | "disc-product" | "none",
//!  "params": {"center": [..], "radius": 1.0, "axes": [[..]], "disc_axes": [[..], [..]], "complex_index": 0},
//!  "lineality_hint": 1}
//! ```

use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, RoundBody, SmoothPart};
use crate::linalg::{orthogonal_complement, unit};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceDescriptor {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportKind {
    Ball,
    Cylinder,
    DiscProduct,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Free (translation-invariant) axes of a cylinder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<Vec<f64>>>,
    /// Two vectors spanning the plane of the disc in a disc product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc_axes: Option<Vec<Vec<f64>>>,
    /// Disc in the complex coordinate `z_k` (interleaved real coordinates).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDescriptor {
    pub dim: usize,
    #[serde(default)]
    pub halfspaces: Vec<HalfspaceDescriptor>,
    #[serde(default)]
    pub support: SupportKind,
    #[serde(default)]
    pub params: RoundParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lineality_hint: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty: bool,
}

fn vec_of(dim: usize, v: &[f64]) -> Result<Point> {
    crate::error::check_dim(dim, v.len())?;
    Ok(Point::from_column_slice(v))
}

impl TryFrom<&BodyDescriptor> for ConvexBody {
    type Error = Error;

    fn try_from(d: &BodyDescriptor) -> Result<Self> {
        if d.dim == 0 {
            return Err(Error::InvalidParams("dim must be ≥ 1".into()));
        }
        if d.empty {
            return Ok(ConvexBody::empty(d.dim));
        }
        let mut body = ConvexBody::whole_space(d.dim);
        for h in &d.halfspaces {
            body.push_halfspace(vec_of(d.dim, &h.a)?, h.b)?;
        }
        let p = &d.params;
        let center = match &p.center {
            Some(c) => vec_of(d.dim, c)?,
            None => Point::zeros(d.dim),
        };
        let radius = p.radius.unwrap_or(1.0);
        let round = match d.support {
            SupportKind::None => None,
            SupportKind::Ball => Some(RoundBody::new(center, radius, Vec::new())?),
            SupportKind::Cylinder => {
                let axes = p
                    .axes
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("cylinder needs params.axes".into()))?
                    .iter()
                    .map(|a| vec_of(d.dim, a))
                    .collect::<Result<Vec<_>>>()?;
                Some(RoundBody::new(center, radius, axes)?)
            }
            SupportKind::DiscProduct => {
                let disc: Vec<Point> = match (&p.disc_axes, p.complex_index) {
                    (Some(axes), _) => axes.iter().map(|a| vec_of(d.dim, a)).collect::<Result<_>>()?,
                    (None, Some(k)) if 2 * k + 1 < d.dim => vec![unit(d.dim, 2 * k), unit(d.dim, 2 * k + 1)],
                    _ => {
                        return Err(Error::InvalidParams(
                            "disc-product needs params.disc_axes or a valid params.complex_index".into(),
                        ))
                    }
                };
                let disc = crate::linalg::gram_schmidt(&disc, 1e-10);
                if disc.len() != 2 {
                    return Err(Error::InvalidParams("disc axes must span a plane".into()));
                }
                let free = orthogonal_complement(&disc, d.dim);
                Some(RoundBody::new(center, radius, free)?)
            }
        };
        if let Some(r) = round {
            body = body.with_smooth(SmoothPart::Round(r))?;
        }
        Ok(body.with_lineality_hint(d.lineality_hint))
    }
}

impl ConvexBody {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: BodyDescriptor = serde_json::from_str(text)?;
        ConvexBody::try_from(&d)
    }

    /// Descriptor of the body; oracle parts cannot be serialised.
    pub fn descriptor(&self) -> Result<BodyDescriptor> {
        let mut d = BodyDescriptor {
            dim: self.dim(),
            halfspaces: self
                .halfspaces()
                .iter()
                .map(|h| HalfspaceDescriptor { a: h.normal.iter().cloned().collect(), b: h.offset })
                .collect(),
            support: SupportKind::None,
            params: RoundParams::default(),
            lineality_hint: self.lineality_hint(),
            empty: self.flagged_empty(),
        };
        match self.smooth() {
            None => {}
            Some(SmoothPart::Round(r)) => {
                d.params.center = Some(r.center.iter().cloned().collect());
                d.params.radius = Some(r.radius);
                if r.free_axes.is_empty() {
                    d.support = SupportKind::Ball;
                } else {
                    d.support = SupportKind::Cylinder;
                    d.params.axes = Some(r.free_axes.iter().map(|a| a.iter().cloned().collect()).collect());
                }
            }
            Some(SmoothPart::Oracle(_)) => {
                return Err(Error::InvalidParams("oracle bodies have no JSON form".into()))
            }
        }
        Ok(d)
    }
}
