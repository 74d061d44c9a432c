//! Weierstrass data of conformal minimal surfaces on sampled charts.
//!
//! A conformal minimal immersion `f: M → R^n` is encoded by
//! `h = 2∂f/θ`, a holomorphic map into the punctured null quadric
//! `A_* = {z ∈ C^n ∖ {0} : z₁² + … + z_n² = 0}`, together with a
//! nowhere-vanishing holomorphic 1-form θ. Conversely
//! `f(p) = f(p₀) + Re ∫_{p₀}^p hθ` whenever `hθ` has no real periods.
//!
//! Samples live on rectangular chart grids. Annuli use the chart
//! `w = log z`, periodic in `Im w`. Derivatives use sixth-order stencils
//! (one-sided near non-periodic edges), and edge integrals use a six-point
//! interpolating rule. Residual maxima are taken over interior nodes, whose
//! centred stencil fits in the grid.

mod arc;
mod catalogue;
mod export;
mod stencil;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use arc::{extend_arc, verify_arc, ArcCheck, ArcExtension, ArcSample, ArcSegment, ARC_SAMPLES};
pub use catalogue::{surface_catalogue, CatalogueParams, SURFACES};
pub use export::{to_csv, to_obj};

use crate::domains::DomainSpec;
use crate::error::check_dim;
use crate::{Error, Point, Result};
use stencil::{Axis, DIFF_WIDTH};

/// Complex vectors in C^n.
pub type CPoint = DVector<Complex64>;

pub const NULL_TOL: f64 = 1e-12;
/// `|h|` below this marks a branch point.
pub const BRANCH_TOL: f64 = 1e-10;
/// Largest real period accepted by [`integrate`].
pub const PERIOD_TOL: f64 = 1e-6;
/// Largest null residual of `h` accepted by [`integrate`].
pub const INTEGRATE_NULL_TOL: f64 = 1e-8;
pub const PATH_TOL: f64 = 1e-6;
pub const PATH_CHECKS: usize = 50;
const PATH_SEED: u64 = 42;
pub const DEFAULT_RESOLUTION: usize = 64;
pub const MIN_INTERIOR: usize = 4;
const MAX_VIOLATIONS: usize = 1000;

/// `|Σ zᵢ²| / Σ|zᵢ|²`, zero exactly on the null quadric.
pub fn null_residual(z: &[Complex64]) -> f64 {
    let s: Complex64 = z.iter().map(|v| v * v).sum();
    let m: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    s.norm() / m.max(1e-300)
}

/// A point of the null quadric `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Complex64>", try_from = "Vec<Complex64>")]
pub struct NullVector(CPoint);

impl NullVector {
    pub fn new(z: CPoint) -> Result<Self> {
        let residual = null_residual(z.as_slice());
        if residual > NULL_TOL {
            return Err(Error::NotNull { residual });
        }
        Ok(NullVector(z))
    }

    pub fn as_vector(&self) -> &CPoint {
        &self.0
    }

    pub fn into_inner(self) -> CPoint {
        self.0
    }

    /// Lies in `A_* = A ∖ {0}`.
    pub fn is_punctured(&self) -> bool {
        self.0.iter().any(|v| *v != Complex64::new(0.0, 0.0))
    }

    pub fn re(&self) -> Point {
        self.0.map(|v| v.re)
    }
}

impl From<NullVector> for Vec<Complex64> {
    fn from(v: NullVector) -> Self {
        v.0.iter().copied().collect()
    }
}

impl TryFrom<Vec<Complex64>> for NullVector {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        NullVector::new(CPoint::from_vec(v))
    }
}

/// `(a² − b², i(a² + b²), 2ab)`, the spinor parametrisation of `A ⊂ C³`.
pub fn spinor_param(a: Complex64, b: Complex64) -> NullVector {
    let i = Complex64::i();
    NullVector(CPoint::from_vec(vec![a * a - b * b, i * (a * a + b * b), 2.0 * a * b]))
}

/// `w + i·w′` with `w′ ⊥ w` and `|w′| = |w|`. The partner is the
/// Gram–Schmidt image of the coordinate axis least aligned with `w`
/// (lowest index on ties).
pub fn real_to_null(w: &Point) -> Result<NullVector> {
    let n = w.len();
    if n < 3 {
        return Err(Error::InvalidParams(format!("real_to_null needs n ≥ 3, got {n}")));
    }
    let norm = w.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroVector);
    }
    let k = (0..n).min_by(|a, b| w[*a].abs().total_cmp(&w[*b].abs())).unwrap_or(0);
    let mut e = Point::zeros(n);
    e[k] = 1.0;
    let partner = &e - w * (w[k] / (norm * norm));
    let partner = partner.normalize() * norm;
    Ok(NullVector(CPoint::from_fn(n, |i, _| Complex64::new(w[i], partner[i]))))
}

/// Holomorphic 1-form θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theta {
    Dz,
    DzOverZ,
}

/// Parameter domain; every kind is sampled on a rectangle of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainKind {
    /// The square inscribed in the disc of this radius about 0.
    Disc { radius: f64 },
    /// `r_in ≤ |z| ≤ r_out` in the chart `w = log z`.
    Annulus { r_in: f64, r_out: f64 },
    Rectangle { u0: f64, u1: f64, v0: f64, v1: f64 },
    /// `|Re z| ≤ half_length`, `v0 ≤ Im z ≤ v1`.
    Strip { v0: f64, v1: f64, half_length: f64 },
}

/// Closed chain of grid nodes; consecutive nodes are grid neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLoop {
    pub nodes: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub kind: DomainKind,
    pub nu: usize,
    pub nv: usize,
    pub loops: Vec<GridLoop>,
}

impl ParamDomain {
    /// Grid of `nu × nv` nodes with the default loop: the middle circle of an
    /// annulus, or the boundary of the central sub-rectangle.
    pub fn new(kind: DomainKind, nu: usize, nv: usize) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        match &kind {
            DomainKind::Disc { radius } if !(*radius > 0.0) => return bad("disc radius must be positive"),
            DomainKind::Annulus { r_in, r_out } if !(*r_in > 0.0 && r_out > r_in && r_out.is_finite()) => {
                return bad("annulus needs 0 < r_in < r_out")
            }
            DomainKind::Rectangle { u0, u1, v0, v1 } if !(u1 > u0 && v1 > v0) => return bad("empty rectangle"),
            DomainKind::Strip { v0, v1, half_length } if !(v1 > v0 && *half_length > 0.0) => {
                return bad("empty strip")
            }
            _ => {}
        }
        let mut d = ParamDomain { kind, nu, nv, loops: Vec::new() };
        for ax in [d.axis_u(), d.axis_v()] {
            let interior = ax.interior().len();
            if ax.n < DIFF_WIDTH || interior < MIN_INTERIOR {
                return Err(Error::GridTooCoarse(interior));
            }
        }
        d.loops.push(d.default_loop());
        Ok(d)
    }

    pub fn periodic(&self) -> bool {
        matches!(self.kind, DomainKind::Annulus { .. })
    }

    /// `(u0, u1, v0, v1)` of the chart rectangle; for annuli `v1 = v0 + 2π`
    /// is identified with `v0`.
    pub fn chart_rect(&self) -> (f64, f64, f64, f64) {
        match self.kind {
            DomainKind::Disc { radius } => {
                let a = radius / 2f64.sqrt();
                (-a, a, -a, a)
            }
            DomainKind::Annulus { r_in, r_out } => (r_in.ln(), r_out.ln(), 0.0, std::f64::consts::TAU),
            DomainKind::Rectangle { u0, u1, v0, v1 } => (u0, u1, v0, v1),
            DomainKind::Strip { v0, v1, half_length } => (-half_length, half_length, v0, v1),
        }
    }

    pub(crate) fn axis_u(&self) -> Axis {
        let (u0, u1, _, _) = self.chart_rect();
        Axis { n: self.nu, step: (u1 - u0) / (self.nu.max(2) - 1) as f64, periodic: false }
    }

    pub(crate) fn axis_v(&self) -> Axis {
        let (_, _, v0, v1) = self.chart_rect();
        if self.periodic() {
            Axis { n: self.nv, step: (v1 - v0) / self.nv.max(1) as f64, periodic: true }
        } else {
            Axis { n: self.nv, step: (v1 - v0) / (self.nv.max(2) - 1) as f64, periodic: false }
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// Chart coordinate `w` of node `(i, j)`.
    pub fn chart_point(&self, i: usize, j: usize) -> Complex64 {
        let (u0, _, v0, _) = self.chart_rect();
        Complex64::new(u0 + i as f64 * self.axis_u().step, v0 + j as f64 * self.axis_v().step)
    }

    /// Parameter `z` of node `(i, j)`.
    pub fn param_point(&self, i: usize, j: usize) -> Complex64 {
        let w = self.chart_point(i, j);
        if self.periodic() {
            w.exp()
        } else {
            w
        }
    }

    /// `θ / dw` at chart point `w`.
    pub fn theta_factor(&self, theta: Theta, w: Complex64) -> Complex64 {
        match (theta, self.periodic()) {
            (Theta::Dz, false) | (Theta::DzOverZ, true) => Complex64::new(1.0, 0.0),
            (Theta::Dz, true) => w.exp(),
            (Theta::DzOverZ, false) => 1.0 / w,
        }
    }

    fn default_loop(&self) -> GridLoop {
        if self.periodic() {
            let i = self.nu / 2;
            let mut nodes: Vec<(usize, usize)> = (0..self.nv).map(|j| (i, j)).collect();
            nodes.push((i, 0));
            return GridLoop { nodes };
        }
        let span = |n: usize| {
            let a = n / 4;
            (a, a + 2 * (n / 4))
        };
        let (a, b) = span(self.nu);
        let (c, d) = span(self.nv);
        let mut nodes = Vec::new();
        nodes.extend((a..b).map(|i| (i, c)));
        nodes.extend((c..d).map(|j| (b, j)));
        nodes.extend((a + 1..=b).rev().map(|i| (i, d)));
        nodes.extend((c + 1..=d).rev().map(|j| (a, j)));
        nodes.push((a, c));
        GridLoop { nodes }
    }

    fn check_theta(&self, theta: Theta) -> Result<()> {
        if theta == Theta::DzOverZ && !self.periodic() {
            let (u0, u1, v0, v1) = self.chart_rect();
            if u0 <= 0.0 && 0.0 <= u1 && v0 <= 0.0 && 0.0 <= v1 {
                return Err(Error::InvalidParams("dz/z needs a chart avoiding z = 0".into()));
            }
        }
        Ok(())
    }
}

/// Sampled pair `(f, h)` with `h = 2∂f/θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassSample {
    pub domain: ParamDomain,
    pub theta: Theta,
    pub f: Vec<Point>,
    pub h: Vec<CPoint>,
    /// Base node `p₀`; `f(p₀)` is `f[domain.index(base)]`.
    pub base: (usize, usize),
}

impl WeierstrassSample {
    /// Samples closed-form `f` and `h` (both functions of the parameter `z`).
    pub fn from_maps(
        domain: ParamDomain,
        theta: Theta,
        f: impl Fn(Complex64) -> Point,
        h: impl Fn(Complex64) -> CPoint,
    ) -> Result<Self> {
        domain.check_theta(theta)?;
        let mut fs = Vec::with_capacity(domain.len());
        let mut hs = Vec::with_capacity(domain.len());
        for i in 0..domain.nu {
            for j in 0..domain.nv {
                let z = domain.param_point(i, j);
                fs.push(f(z));
                hs.push(h(z));
            }
        }
        let n = fs[0].len();
        for (a, b) in fs.iter().zip(&hs) {
            check_dim(n, a.len())?;
            check_dim(n, b.len())?;
        }
        let base = (domain.nu / 2, domain.nv / 2);
        Ok(WeierstrassSample { domain, theta, f: fs, h: hs, base })
    }

    /// Samples `f` and obtains `h` by differentiation.
    pub fn from_f(domain: ParamDomain, theta: Theta, f: impl Fn(Complex64) -> Point) -> Result<Self> {
        domain.check_theta(theta)?;
        let mut fs = Vec::with_capacity(domain.len());
        for i in 0..domain.nu {
            for j in 0..domain.nv {
                fs.push(f(domain.param_point(i, j)));
            }
        }
        let n = fs[0].len();
        for a in &fs {
            check_dim(n, a.len())?;
        }
        let h = differentiate(&domain, theta, &fs);
        let base = (domain.nu / 2, domain.nv / 2);
        Ok(WeierstrassSample { domain, theta, f: fs, h, base })
    }

    pub fn dim(&self) -> usize {
        self.f.first().map_or(0, |p| p.len())
    }

    pub fn base_value(&self) -> &Point {
        &self.f[self.domain.index(self.base.0, self.base.1)]
    }
}

/// Chart derivatives `(f_u, f_v, Δf)` at node `(i, j)`.
fn derivatives(d: &ParamDomain, f: &[Point], i: usize, j: usize) -> (Point, Point, Point) {
    let n = f[0].len();
    let (mut fu, mut fv, mut lap) = (Point::zeros(n), Point::zeros(n), Point::zeros(n));
    for (k, w1, w2) in d.axis_u().diff(i) {
        let v = &f[d.index(k, j)];
        fu.axpy(w1, v, 1.0);
        lap.axpy(w2, v, 1.0);
    }
    for (k, w1, w2) in d.axis_v().diff(j) {
        let v = &f[d.index(i, k)];
        fv.axpy(w1, v, 1.0);
        lap.axpy(w2, v, 1.0);
    }
    (fu, fv, lap)
}

fn h_from(fu: &Point, fv: &Point, factor: Complex64) -> CPoint {
    CPoint::from_fn(fu.len(), |k, _| Complex64::new(fu[k], -fv[k]) / factor)
}

/// `2∂f/θ` at every node.
pub fn differentiate(d: &ParamDomain, theta: Theta, f: &[Point]) -> Vec<CPoint> {
    (0..d.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / d.nv, idx % d.nv);
            let (fu, fv, _) = derivatives(d, f, i, j);
            h_from(&fu, &fv, d.theta_factor(theta, d.chart_point(i, j)))
        })
        .collect()
}

fn interior_nodes(d: &ParamDomain) -> Vec<(usize, usize)> {
    let (ru, rv) = (d.axis_u().interior(), d.axis_v().interior());
    ru.flat_map(|i| rv.clone().map(move |j| (i, j))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Max null residual of the differentiated `h`.
    pub max_null: f64,
    /// `h²·max|Δf|` with `h` the larger grid spacing.
    pub max_harmonic: f64,
    pub max_laplacian: f64,
    pub min_h: f64,
    /// `min_h < BRANCH_TOL`: accepted, but the sample has branch points.
    pub branched: bool,
    /// Max of `| |f_u| − |f_v| |`.
    pub max_length_defect: f64,
    /// Max of `|f_u · f_v|`.
    pub max_orthogonality_defect: f64,
    pub interior_nodes: usize,
}

/// Conformality and harmonicity residuals at interior nodes.
pub fn conformality_residuals(s: &WeierstrassSample) -> Result<ResidualReport> {
    let d = &s.domain;
    let nodes = interior_nodes(d);
    let spacing = d.axis_u().step.max(d.axis_v().step);
    let rows: Vec<[f64; 5]> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (fu, fv, lap) = derivatives(d, &s.f, i, j);
            let h = h_from(&fu, &fv, d.theta_factor(s.theta, d.chart_point(i, j)));
            [
                null_residual(h.as_slice()),
                lap.amax(),
                h.norm(),
                (fu.norm() - fv.norm()).abs(),
                fu.dot(&fv).abs(),
            ]
        })
        .collect();
    let max = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
    let min_h = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    let max_laplacian = max(1);
    Ok(ResidualReport {
        max_null: max(0),
        max_harmonic: spacing * spacing * max_laplacian,
        max_laplacian,
        min_h,
        branched: min_h < BRANCH_TOL,
        max_length_defect: max(3),
        max_orthogonality_defect: max(4),
        interior_nodes: nodes.len(),
    })
}

/// Max-norm distance between `h` and the differentiated `f` at interior nodes.
pub fn round_trip_error(s: &WeierstrassSample) -> f64 {
    let dh = differentiate(&s.domain, s.theta, &s.f);
    interior_nodes(&s.domain)
        .iter()
        .map(|&(i, j)| {
            let k = s.domain.index(i, j);
            (&dh[k] - &s.h[k]).iter().map(|c| c.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Direction of the loop step from node `a` to its neighbour `b`: `(along_u, forward)`.
fn loop_step(d: &ParamDomain, a: (usize, usize), b: (usize, usize)) -> Result<(bool, bool)> {
    if a.0 >= d.nu || b.0 >= d.nu || a.1 >= d.nv || b.1 >= d.nv {
        return Err(Error::LoopExitsGrid);
    }
    let di = b.0 as isize - a.0 as isize;
    let mut dj = b.1 as isize - a.1 as isize;
    if d.periodic() && d.nv > 2 && dj.unsigned_abs() == d.nv - 1 {
        dj = -dj.signum();
    }
    match (di, dj) {
        (-1 | 1, 0) => Ok((true, di == 1)),
        (0, -1 | 1) => Ok((false, dj == 1)),
        _ => Err(Error::LoopExitsGrid),
    }
}

/// `Re ∮ hθ` over each loop. Every grid edge of the loop is integrated with
/// the six-point rule along its grid line.
pub fn period_integrals(s: &WeierstrassSample) -> Result<Vec<Point>> {
    periods_of(&s.domain, s.theta, &s.h)
}

fn periods_of(d: &ParamDomain, theta: Theta, h: &[CPoint]) -> Result<Vec<Point>> {
    if d.loops.is_empty() {
        return Err(Error::InvalidParams("domain has no loops".into()));
    }
    let n = h[0].len();
    let g = |i: usize, j: usize| -> CPoint { &h[d.index(i, j)] * d.theta_factor(theta, d.chart_point(i, j)) };
    let (au, av) = (d.axis_u(), d.axis_v());
    let mut out = Vec::with_capacity(d.loops.len());
    for lp in &d.loops {
        let nodes = &lp.nodes;
        if nodes.len() < 3 || nodes.first() != nodes.last() {
            return Err(Error::LoopExitsGrid);
        }
        let mut total = CPoint::zeros(n);
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (along_u, forward) = loop_step(d, a, b)?;
            let lower = if forward { a } else { b };
            let mut seg = CPoint::zeros(n);
            if along_u {
                for (k, wk) in au.edge(lower.0) {
                    seg += g(k, lower.1) * Complex64::new(wk, 0.0);
                }
            } else {
                for (k, wk) in av.edge(lower.1) {
                    seg += g(lower.0, k) * Complex64::new(0.0, wk);
                }
            }
            if forward {
                total += seg;
            } else {
                total -= seg;
            }
        }
        out.push(total.map(|c| c.re));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub periods: Vec<Vec<f64>>,
    pub max_path_disagreement: f64,
    pub checked_nodes: usize,
}

/// Enneper–Weierstrass integration `f = f₀ + Re ∫ hθ` along grid edges.
pub fn integrate(
    domain: ParamDomain,
    theta: Theta,
    h: Vec<CPoint>,
    base: (usize, usize),
    f0: Point,
) -> Result<WeierstrassSample> {
    Ok(integrate_with_report(domain, theta, h, base, f0)?.0)
}

/// [`integrate`] plus the periods and the path-independence check: `f` is
/// built along `u`-then-`v` staircases and compared with `v`-then-`u`
/// staircases at [`PATH_CHECKS`] random nodes.
pub fn integrate_with_report(
    domain: ParamDomain,
    theta: Theta,
    h: Vec<CPoint>,
    base: (usize, usize),
    f0: Point,
) -> Result<(WeierstrassSample, IntegrationReport)> {
    let d = &domain;
    domain.check_theta(theta)?;
    check_dim(d.len(), h.len())?;
    if base.0 >= d.nu || base.1 >= d.nv {
        return Err(Error::InvalidParams("base node outside the grid".into()));
    }
    let n = f0.len();
    for v in &h {
        check_dim(n, v.len())?;
        let residual = null_residual(v.as_slice());
        if !(residual <= INTEGRATE_NULL_TOL) {
            return Err(Error::NotNull { residual });
        }
    }
    let periods = periods_of(d, theta, &h)?;
    if let Some(worst) = periods.iter().map(|p| p.norm()).reduce(f64::max) {
        if !(worst <= PERIOD_TOL) {
            return Err(Error::PeriodObstruction { norm: worst });
        }
    }
    // Re(g du) and Re(g·i dv) densities
    let g: Vec<CPoint> = (0..d.len())
        .map(|k| &h[k] * d.theta_factor(theta, d.chart_point(k / d.nv, k % d.nv)))
        .collect();
    let du: Vec<Point> = g.iter().map(|v| v.map(|c| c.re)).collect();
    let dv: Vec<Point> = g.iter().map(|v| v.map(|c| -c.im)).collect();
    let (du, dv) = (&du, &dv);
    let (au, av) = (d.axis_u(), d.axis_v());

    let along_u = |j: usize| cumulative(&au, base.0, move |i| &du[d.index(i, j)]);
    let along_v = |i: usize| cumulative(&av, base.1, move |j| &dv[d.index(i, j)]);

    let row0 = along_u(base.1);
    let cols: Vec<Vec<Point>> = (0..d.nu).into_par_iter().map(along_v).collect();
    let mut f = vec![Point::zeros(n); d.len()];
    for i in 0..d.nu {
        for j in 0..d.nv {
            f[d.index(i, j)] = &f0 + &row0[i] + &cols[i][j];
        }
    }

    let col0 = along_v(base.0);
    let mut rng = ChaCha8Rng::seed_from_u64(PATH_SEED);
    let mut worst = 0.0f64;
    for _ in 0..PATH_CHECKS {
        let (i, j) = (rng.gen_range(0..d.nu), rng.gen_range(0..d.nv));
        let other = &f0 + &col0[j] + &along_u(j)[i];
        worst = worst.max((&other - &f[d.index(i, j)]).amax());
    }
    if !(worst <= PATH_TOL) {
        return Err(Error::PathDisagreement { max: worst });
    }
    let report = IntegrationReport {
        periods: periods.iter().map(|p| p.iter().copied().collect()).collect(),
        max_path_disagreement: worst,
        checked_nodes: PATH_CHECKS,
    };
    Ok((WeierstrassSample { domain, theta, f, h, base }, report))
}

/// `∫_{x_start}^{x_k}` of a sampled density along one axis, for every `k`.
fn cumulative<'a>(ax: &Axis, start: usize, val: impl Fn(usize) -> &'a Point) -> Vec<Point> {
    let n = val(start).len();
    let edge = |k: usize| ax.edge(k).iter().fold(Point::zeros(n), |acc, (m, w)| acc + val(*m) * *w);
    let mut out = vec![Point::zeros(n); ax.n];
    for k in start + 1..ax.n {
        out[k] = &out[k - 1] + edge(k - 1);
    }
    for k in (0..start).rev() {
        out[k] = &out[k + 1] - edge(k);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub nodes: usize,
    pub inside: usize,
    pub fraction: f64,
    #[serde(with = "crate::report::extended_f64")]
    pub min_clearance: f64,
    /// Grid indices of nodes outside Ω (at most 1000 listed).
    pub violations: Vec<(usize, usize)>,
    pub boundary_only: bool,
}

/// Fraction of nodes mapped into Ω and the smallest clearance. With
/// `boundary_only`, only the outermost ring of the grid is checked.
pub fn contained_in(s: &WeierstrassSample, omega: &DomainSpec, boundary_only: bool) -> Result<ContainmentReport> {
    check_dim(omega.dim(), s.dim())?;
    let d = &s.domain;
    let nodes: Vec<(usize, usize)> = (0..d.nu)
        .flat_map(|i| (0..d.nv).map(move |j| (i, j)))
        .filter(|&(i, j)| !boundary_only || i == 0 || i + 1 == d.nu || (!d.periodic() && (j == 0 || j + 1 == d.nv)))
        .collect();
    let rows: Vec<(bool, f64)> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let x = &s.f[d.index(i, j)];
            Ok((omega.contains(x)?, omega.clearance(x)?))
        })
        .collect::<Result<_>>()?;
    let inside = rows.iter().filter(|r| r.0).count();
    let violations: Vec<(usize, usize)> =
        nodes.iter().zip(&rows).filter(|(_, r)| !r.0).map(|(n, _)| *n).take(MAX_VIOLATIONS).collect();
    Ok(ContainmentReport {
        nodes: nodes.len(),
        inside,
        fraction: inside as f64 / nodes.len().max(1) as f64,
        min_clearance: rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        violations,
        boundary_only,
    })
}
