//! Classical minimal surfaces with closed-form `f` and `h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CPoint, DomainKind, ParamDomain, Theta, WeierstrassSample, DEFAULT_RESOLUTION};
use crate::error::check_dim;
use crate::linalg::RigidMotion;
use crate::{Error, Point, Result};

pub const SURFACES: [&str; 4] = ["plane", "enneper", "catenoid", "helicoid"];

/// Sampling and placement: `f ↦ R(scale·f) + t + offset`, `h ↦ scale·R h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogueParams {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub frame: Option<RigidMotion>,
    #[serde(default)]
    pub offset: Option<Vec<f64>>,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_scale() -> f64 {
    1.0
}

impl Default for CatalogueParams {
    fn default() -> Self {
        CatalogueParams { resolution: DEFAULT_RESOLUTION, scale: 1.0, frame: None, offset: None }
    }
}

fn p3(a: f64, b: f64, c: f64) -> Point {
    Point::from_column_slice(&[a, b, c])
}

fn c3(a: Complex64, b: Complex64, c: Complex64) -> CPoint {
    CPoint::from_column_slice(&[a, b, c])
}

/// Exact samples of `plane`, `enneper`, `catenoid` or `helicoid`.
///
/// - plane: `f = (u, v, 0)`, `h = (1, −i, 0)` on the unit disc, `θ = dz`.
/// - enneper: `f = Re(z − z³/3, i(z + z³/3), z²)`, `h = (1 − z², i(1 + z²), 2z)`
///   on the unit disc, `θ = dz`.
/// - catenoid: `f = (cosh s cos φ, cosh s sin φ, s)` for `z = e^{s+iφ}` on
///   `e⁻¹ ≤ |z| ≤ e`, `θ = dz/z`, `h = (sinh w, −i cosh w, 1)` with `w = log z`.
/// - helicoid: `f = (sinh u cos v, sinh u sin v, v)` on `[−1, 1] × [0, 2π]`,
///   `θ = dz`, `h = (cosh z, −i sinh z, −i)`.
pub fn surface_catalogue(name: &str, params: &CatalogueParams) -> Result<WeierstrassSample> {
    if !(params.scale > 0.0 && params.scale.is_finite()) {
        return Err(Error::InvalidParams("scale must be positive".into()));
    }
    if let Some(fr) = &params.frame {
        check_dim(3, fr.dim())?;
    }
    if let Some(o) = &params.offset {
        check_dim(3, o.len())?;
    }
    let res = params.resolution;
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let disc = || ParamDomain::new(DomainKind::Disc { radius: 1.0 }, res, res);
    let raw = match name {
        "plane" => WeierstrassSample::from_maps(disc()?, Theta::Dz, |z| p3(z.re, z.im, 0.0), |_| c3(one, -i, zero))?,
        "enneper" => WeierstrassSample::from_maps(
            disc()?,
            Theta::Dz,
            |z| {
                let z3 = z * z * z;
                p3((z - z3 / 3.0).re, (i * (z + z3 / 3.0)).re, (z * z).re)
            },
            |z| c3(one - z * z, i * (one + z * z), 2.0 * z),
        )?,
        "catenoid" => WeierstrassSample::from_maps(
            ParamDomain::new(DomainKind::Annulus { r_in: (-1f64).exp(), r_out: 1f64.exp() }, res, res)?,
            Theta::DzOverZ,
            |z| {
                let (s, phi) = (z.norm().ln(), z.arg());
                p3(s.cosh() * phi.cos(), s.cosh() * phi.sin(), s)
            },
            |z| {
                let w = z.ln();
                c3(w.sinh(), -i * w.cosh(), one)
            },
        )?,
        "helicoid" => WeierstrassSample::from_maps(
            ParamDomain::new(DomainKind::Strip { v0: 0.0, v1: std::f64::consts::TAU, half_length: 1.0 }, res, res)?,
            Theta::Dz,
            |z| p3(z.re.sinh() * z.im.cos(), z.re.sinh() * z.im.sin(), z.im),
            |z| c3(z.cosh(), -i * z.sinh(), -i),
        )?,
        other => return Err(Error::UnknownSurface(other.to_string())),
    };
    Ok(place(raw, params))
}

fn place(mut s: WeierstrassSample, params: &CatalogueParams) -> WeierstrassSample {
    let offset = params.offset.as_ref().map(|o| Point::from_column_slice(o));
    for (f, h) in s.f.iter_mut().zip(s.h.iter_mut()) {
        let mut x = &*f * params.scale;
        let mut y = &*h * Complex64::new(params.scale, 0.0);
        if let Some(fr) = &params.frame {
            x = fr.apply(&x);
            y = fr.rotation.map(|v| Complex64::new(v, 0.0)) * y;
        }
        if let Some(o) = &offset {
            x += o;
        }
        *f = x;
        *h = y;
    }
    s
}
