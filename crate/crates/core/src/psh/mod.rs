//! p-plurisubharmonic functions on R^n.
//!
//! A C² function τ is p-plurisubharmonic when the eigenvalues
//! `λ₁ ≤ … ≤ λ_n` of its Hessian satisfy `λ₁ + … + λ_p ≥ 0` everywhere, and
//! strongly so when the inequality is strict. A closed set `L` is p-convex
//! when `L = τ⁻¹(0)` for a nonnegative τ that is p-psh, and strongly p-psh off
//! `L`. Every check here runs on a finite grid: reports record the grid and
//! the tolerances so they read as desk-scale evidence, not proofs.

mod expr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use expr::{smooth_pos, Expr, Jet, SMOOTHING_WIDTH};

use crate::error::check_dim;
use crate::{Error, Point, Result};

/// Partial sums above `−PSH_TOL` count as nonnegative, above `+PSH_TOL` as positive.
pub const PSH_TOL: f64 = 1e-8;
pub const MIN_GRID: usize = 8;
const MAX_GRID_POINTS: usize = 1 << 22;
/// Grid points with `|τ| ≤ ZERO_TOL` are zero-set samples.
pub const ZERO_TOL: f64 = 1e-12;
/// Strong positivity off the zero set is tested only beyond this fraction of
/// the box diameter.
pub const CLEARANCE_FRACTION: f64 = 0.05;
pub const FD_REL_TOL: f64 = 1e-4;
pub const FD_STEP: f64 = 1e-4;
pub const TOUCH_TOL: f64 = 1e-9;
pub const CONTACT_RADII: usize = 24;
pub const CONTACT_ANGLES: usize = 64;
pub const CONTACT_R_MIN: f64 = 1e-3;
pub const CONTACT_R_MAX: f64 = 1e-1;
const ZERO_SET_SAMPLE: usize = 16;

/// Axis-aligned evaluation region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn cube(dim: usize, half: f64) -> Self {
        DomainBox { lo: vec![-half; dim], hi: vec![half; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| {
            let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
            *v >= a - slack && *v <= b + slack
        })
    }

    fn validate(&self, dim: usize) -> Result<()> {
        check_dim(dim, self.lo.len())?;
        check_dim(dim, self.hi.len())?;
        if self.lo.iter().zip(&self.hi).all(|(a, b)| a.is_finite() && b.is_finite() && a < b) {
            Ok(())
        } else {
            Err(Error::InvalidParams("box needs finite bounds with lo < hi".into()))
        }
    }

    /// `g` equally spaced nodes per axis, the i-th point in row-major order.
    fn node(&self, g: usize, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for k in (0..self.dim()).rev() {
            let i = idx % g;
            idx /= g;
            x[k] = self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (g - 1) as f64;
        }
        x
    }
}

/// A real function τ on R^n given by an expression in `x1 … xn`, with the
/// box used for grid checks. Its Hessian comes from second-order jets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarFieldRepr", into = "ScalarFieldRepr")]
pub struct ScalarField {
    dim: usize,
    source: String,
    expr: Expr,
    domain: DomainBox,
}

#[derive(Serialize, Deserialize)]
struct ScalarFieldRepr {
    dim: usize,
    expression: String,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    domain: Option<DomainBox>,
}

impl TryFrom<ScalarFieldRepr> for ScalarField {
    type Error = Error;

    fn try_from(r: ScalarFieldRepr) -> Result<Self> {
        let domain = r.domain.unwrap_or_else(|| DomainBox::cube(r.dim, 1.0));
        ScalarField::new(r.dim, &r.expression, domain)
    }
}

impl From<ScalarField> for ScalarFieldRepr {
    fn from(f: ScalarField) -> Self {
        ScalarFieldRepr { dim: f.dim, expression: f.source, domain: Some(f.domain) }
    }
}

impl ScalarField {
    pub fn new(dim: usize, expression: &str, domain: DomainBox) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        domain.validate(dim)?;
        let expr = Expr::parse(expression, dim)?;
        Ok(ScalarField { dim, source: expression.to_string(), expr, domain })
    }

    /// Field on the cube `[−half, half]^dim`.
    pub fn on_cube(dim: usize, expression: &str, half: f64) -> Result<Self> {
        Self::new(dim, expression, DomainBox::cube(dim, half))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expression(&self) -> &str {
        &self.source
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        self.expr.jet(x)
    }

    /// Symmetrised Hessian from the jet.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let h = self.expr.jet(x).h;
        (&h + h.transpose()) * 0.5
    }

    /// Central-difference Hessian with step `h`.
    pub fn fd_hessian(&self, x: &[f64], h: f64) -> DMatrix<f64> {
        let n = self.dim;
        let f = |di: usize, si: f64, dj: usize, sj: f64| {
            let mut y = x.to_vec();
            y[di] += si * h;
            y[dj] += sj * h;
            self.value(&y)
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = (f(i, 1.0, j, 1.0) - f(i, 1.0, j, -1.0) - f(i, -1.0, j, 1.0) + f(i, -1.0, j, -1.0)) / (4.0 * h * h);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Compares jet and finite-difference Hessians at random box points,
    /// skipping points whose FD stencil crosses a branch switch or a
    /// smoothing band edge.
    pub fn check_hessian(&self, samples: usize, seed: u64) -> HessianCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = self.domain.lo.iter().zip(&self.domain.hi).map(|(a, b)| a.abs().max(b.abs())).fold(1.0, f64::max);
        let h = FD_STEP * scale;
        let mut check = HessianCheck { step: h, checked: 0, skipped: 0, max_rel_error: 0.0, ok: true };
        for _ in 0..samples {
            let x: Vec<f64> = (0..self.dim).map(|k| rng.gen_range(self.domain.lo[k]..=self.domain.hi[k])).collect();
            let mut margin = f64::INFINITY;
            let jet = self.expr.jet_tracked(&x, &mut margin);
            if margin <= 4.0 * h || !jet.h.iter().all(|v| v.is_finite()) {
                check.skipped += 1;
                continue;
            }
            let exact = (&jet.h + jet.h.transpose()) * 0.5;
            let fd = self.fd_hessian(&x, h);
            let err = (&fd - &exact).amax() / exact.amax().max(1.0);
            check.max_rel_error = check.max_rel_error.max(err);
            check.checked += 1;
        }
        check.ok = check.max_rel_error <= FD_REL_TOL;
        check
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianCheck {
    pub step: f64,
    pub checked: usize,
    pub skipped: usize,
    pub max_rel_error: f64,
    pub ok: bool,
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `λ₁ + … + λ_p` for the ascending eigenvalues of a symmetric matrix.
pub fn partial_eigen_sum(m: &DMatrix<f64>, p: usize) -> f64 {
    sorted_eigenvalues(m).iter().take(p).sum()
}

fn check_p(p: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("p must lie in 1..={n}, got {p}")))
    }
}

pub fn hessian_partial_sum(tau: &ScalarField, x: &Point, p: usize) -> Result<f64> {
    check_dim(tau.dim, x.len())?;
    check_p(p, tau.dim)?;
    if !tau.domain.contains(x.as_slice()) {
        return Err(Error::InvalidParams("point outside the domain box".into()));
    }
    let h = tau.hessian(x.as_slice());
    if !h.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteHessian);
    }
    Ok(partial_eigen_sum(&h, p))
}

/// The bound `1 ≤ p ≤ max{2, n − 2}` under which p-convex sets admit
/// approximation of minimal surfaces in their complement.
pub fn gate_ok(p: usize, n: usize) -> bool {
    p >= 1 && p <= 2.max(n.saturating_sub(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    pub resolution: usize,
    pub points: usize,
    pub nonfinite: usize,
    pub tolerance: f64,
    pub zero_set_points: usize,
    pub complement_samples: usize,
    pub clearance_threshold: f64,
    pub min_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PshReport {
    pub p: usize,
    pub n: usize,
    /// Minimum of `λ₁ + … + λ_p` over the grid.
    pub min_partial_sum: f64,
    pub argmin: Vec<f64>,
    /// Minimum of `λ₁ + … + λ_q` for every `q = 1 … n`.
    pub min_partial_sums: Vec<f64>,
    pub psh: bool,
    pub strongly: bool,
    /// Strict positivity at grid points far from the zero set of τ.
    pub strong_on_complement: bool,
    /// p-psh implies q-psh for q > p, checked on the same grid.
    pub monotone_ok: bool,
    pub gate_ok: bool,
    pub grid: GridStats,
}

struct GridEval {
    nodes: Vec<Vec<f64>>,
    tau: Vec<f64>,
    sums: Vec<Option<Vec<f64>>>,
}

fn evaluate(tau: &ScalarField, grid: usize) -> Result<GridEval> {
    if grid < MIN_GRID {
        return Err(Error::InvalidParams(format!("grid needs at least {MIN_GRID} points per axis, got {grid}")));
    }
    let total = (0..tau.dim)
        .try_fold(1usize, |acc, _| acc.checked_mul(grid))
        .filter(|t| *t <= MAX_GRID_POINTS)
        .ok_or_else(|| Error::InvalidParams(format!("grid {grid}^{} exceeds {MAX_GRID_POINTS} points", tau.dim)))?;
    let rows: Vec<(Vec<f64>, f64, Option<Vec<f64>>)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x = tau.domain.node(grid, i);
            let jet = tau.expr.jet(&x);
            let h = (&jet.h + jet.h.transpose()) * 0.5;
            let sums = h.iter().all(|v| v.is_finite()).then(|| {
                sorted_eigenvalues(&h)
                    .iter()
                    .scan(0.0, |acc, l| {
                        *acc += l;
                        Some(*acc)
                    })
                    .collect()
            });
            (x, jet.v, sums)
        })
        .collect();
    let mut out = GridEval { nodes: Vec::with_capacity(total), tau: Vec::with_capacity(total), sums: Vec::with_capacity(total) };
    for (x, t, s) in rows {
        out.nodes.push(x);
        out.tau.push(t);
        out.sums.push(s);
    }
    Ok(out)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn report(tau: &ScalarField, p: usize, grid: usize, ev: &GridEval) -> PshReport {
    let n = tau.dim;
    let mut mins = vec![f64::INFINITY; n];
    let mut argmin = ev.nodes[0].clone();
    let mut nonfinite = 0;
    for (x, s) in ev.nodes.iter().zip(&ev.sums) {
        match s {
            Some(s) => {
                if s[p - 1] < mins[p - 1] {
                    argmin = x.clone();
                }
                for (m, v) in mins.iter_mut().zip(s) {
                    *m = m.min(*v);
                }
            }
            None => nonfinite += 1,
        }
    }
    let zero: Vec<&Vec<f64>> = ev.nodes.iter().zip(&ev.tau).filter(|(_, t)| t.abs() <= ZERO_TOL).map(|(x, _)| x).collect();
    let threshold = CLEARANCE_FRACTION * tau.domain.diameter();
    let far: Vec<bool> = ev
        .nodes
        .par_iter()
        .map(|x| zero.iter().all(|z| dist(x, z) > threshold))
        .collect();
    let complement: Vec<&Vec<f64>> = ev.sums.iter().zip(&far).filter(|(_, f)| **f).filter_map(|(s, _)| s.as_ref()).collect();
    let strong_on_complement = ev.sums.iter().zip(&far).filter(|(_, f)| **f).all(|(s, _)| s.is_some())
        && complement.iter().all(|s| s[p - 1] > PSH_TOL);
    let min_p = mins[p - 1];
    let psh = nonfinite == 0 && min_p >= -PSH_TOL;
    let monotone_ok = !psh || (p..=n).all(|q| mins[q - 1] >= -PSH_TOL * q as f64 / p as f64);
    PshReport {
        p,
        n,
        min_partial_sum: min_p,
        argmin,
        min_partial_sums: mins,
        psh,
        strongly: psh && min_p > PSH_TOL,
        strong_on_complement,
        monotone_ok,
        gate_ok: gate_ok(p, n),
        grid: GridStats {
            resolution: grid,
            points: ev.nodes.len(),
            nonfinite,
            tolerance: PSH_TOL,
            zero_set_points: zero.len(),
            complement_samples: complement.len(),
            clearance_threshold: threshold,
            min_tau: ev.tau.iter().copied().fold(f64::INFINITY, f64::min),
        },
    }
}

/// Grid check of p-plurisubharmonicity over the field's box.
pub fn is_p_psh(tau: &ScalarField, p: usize, grid: usize) -> Result<PshReport> {
    check_p(p, tau.dim)?;
    let ev = evaluate(tau, grid)?;
    Ok(report(tau, p, grid, &ev))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PConvexCertificate {
    pub p: usize,
    pub n: usize,
    pub zero_set_sample: Vec<Vec<f64>>,
    pub psh_on_grid: bool,
    pub strong_on_complement: bool,
    /// τ ≥ 0, p-psh on the grid and strongly p-psh at far complement samples.
    pub certified: bool,
    pub gate_ok: bool,
    pub report: PshReport,
}

/// Grid certificate that `L = τ⁻¹(0)` is p-convex. A `p` above the bound
/// `max{2, n − 2}` is reported through `gate_ok`, not as an error.
pub fn certify_p_convex(tau: &ScalarField, p: usize, grid: usize) -> Result<PConvexCertificate> {
    check_p(p, tau.dim)?;
    let ev = evaluate(tau, grid)?;
    let min_tau = ev.tau.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_tau >= -ZERO_TOL) {
        return Err(Error::InvalidParams(format!("τ must be nonnegative on the grid, min {min_tau:e}")));
    }
    let zero_set_sample: Vec<Vec<f64>> = ev
        .nodes
        .iter()
        .zip(&ev.tau)
        .filter(|(_, t)| t.abs() <= ZERO_TOL)
        .map(|(x, _)| x.clone())
        .take(ZERO_SET_SAMPLE)
        .collect();
    if zero_set_sample.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    let report = report(tau, p, grid, &ev);
    Ok(PConvexCertificate {
        p,
        n: tau.dim,
        zero_set_sample,
        psh_on_grid: report.psh,
        strong_on_complement: report.strong_on_complement,
        certified: report.psh && report.strong_on_complement,
        gate_ok: report.gate_ok,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactFit {
    pub slope: f64,
    pub intercept: f64,
    pub c: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactOrder {
    /// Rounded slope; `None` when τ∘f vanishes on some sampled circle.
    pub k: Option<u32>,
    pub fit: Option<ContactFit>,
    pub degenerate: bool,
    pub radii: Vec<f64>,
    pub minima: Vec<f64>,
}

/// Order `k` and constant `c` in `τ(f(z)) ≥ c|z − z₀|^k` near a point where
/// `f` touches the zero set of τ, from the least-squares fit of
/// `log min_{|z − z₀| = r} τ(f(z))` against `log r`.
pub fn estimate_contact_order<F>(f: F, tau: &ScalarField, center: Complex64) -> Result<ContactOrder>
where
    F: Fn(Complex64) -> Point,
{
    let p0 = f(center);
    check_dim(tau.dim, p0.len())?;
    let v0 = tau.value(p0.as_slice());
    if !(v0.abs() < TOUCH_TOL) {
        return Err(Error::NotTouching { value: v0 });
    }
    let radii: Vec<f64> = (0..CONTACT_RADII)
        .map(|i| CONTACT_R_MIN * (CONTACT_R_MAX / CONTACT_R_MIN).powf(i as f64 / (CONTACT_RADII - 1) as f64))
        .collect();
    let mut minima = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut m = f64::INFINITY;
        for j in 0..CONTACT_ANGLES {
            let z = center + Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / CONTACT_ANGLES as f64);
            let v = tau.value(f(z).as_slice());
            if v < 0.0 {
                return Err(Error::InsideBody { value: v });
            }
            m = m.min(v);
        }
        minima.push(m);
    }
    if minima.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Ok(ContactOrder { k: None, fit: None, degenerate: true, radii, minima });
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = minima.iter().map(|m| m.ln()).collect();
    let len = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / len, ys.iter().sum::<f64>() / len);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / len).sqrt();
    let k = (slope.round() >= 1.0).then(|| slope.round() as u32);
    Ok(ContactOrder {
        k,
        fit: Some(ContactFit { slope, intercept, c: intercept.exp(), residual }),
        degenerate: false,
        radii,
        minima,
    })
}
