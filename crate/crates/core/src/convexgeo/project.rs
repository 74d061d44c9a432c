use nalgebra::{DMatrix, DVector};

use super::body::{ConvexBody, Halfspace, SmoothPart};
use crate::{Error, Point, Result};

pub const DYKSTRA_MAX_ITERS: usize = 10_000;
pub const DYKSTRA_TOL: f64 = 1e-10;
/// Accepted constraint violation of a returned projection.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Residual above which a Dykstra run declares the body empty.
pub const EMPTY_RESIDUAL: f64 = 1e-6;
/// Least-distance dual residual below which the constraints are inconsistent.
const INFEASIBLE_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Point,
    pub distance: f64,
    /// Dykstra sweeps used (0 for closed-form cases).
    pub sweeps: usize,
}

enum Piece<'a> {
    Half(&'a Halfspace),
    Smooth(&'a SmoothPart),
}

impl Piece<'_> {
    fn project(&self, x: &Point) -> Point {
        match self {
            Piece::Half(h) => h.project(x),
            Piece::Smooth(s) => s.project(x),
        }
    }
}

pub(crate) fn project(body: &ConvexBody, x: &Point) -> Result<Projection> {
    if body.flagged_empty() {
        return Err(Error::EmptyBody);
    }
    if body.is_whole_space() || body.violation(x) == 0.0 {
        return Ok(done(x, x.clone(), 0));
    }
    let mut pieces: Vec<Piece> = body.halfspaces().iter().map(Piece::Half).collect();
    if let Some(s) = body.smooth() {
        pieces.push(Piece::Smooth(s));
    }
    if pieces.len() == 1 {
        let y = pieces[0].project(x);
        return Ok(done(x, y, 0));
    }
    if body.is_polyhedral() {
        if let Some(y) = least_distance(body.halfspaces(), x)? {
            let y = polish_from(body.halfspaces(), x, &y).unwrap_or(y);
            return Ok(done(x, y, 0));
        }
    }

    let (mut y, sweeps) = dykstra(&pieces, x);
    if body.is_polyhedral() {
        if let Some(p) = polish_from(body.halfspaces(), x, &y) {
            y = p;
        }
    }
    if body.violation(&y) > EMPTY_RESIDUAL {
        return Err(Error::EmptyBody);
    }
    Ok(done(x, y, sweeps))
}

fn done(x: &Point, y: Point, sweeps: usize) -> Projection {
    let distance = (x - &y).norm();
    Projection { point: y, distance, sweeps }
}

fn dykstra(pieces: &[Piece], x0: &Point) -> (Point, usize) {
    let n = x0.len();
    let mut x = x0.clone();
    let mut incr: Vec<Point> = vec![Point::zeros(n); pieces.len()];
    let scale = 1.0 + x0.norm();
    for sweep in 1..=DYKSTRA_MAX_ITERS {
        let start = x.clone();
        let mut incr_change = 0.0;
        for (piece, p) in pieces.iter().zip(incr.iter_mut()) {
            let y = &x + &*p;
            let next = piece.project(&y);
            let new_p = &y - &next;
            incr_change += (&new_p - &*p).norm_squared();
            *p = new_p;
            x = next;
        }
        let moved = (&x - &start).norm();
        if moved <= DYKSTRA_TOL * scale && incr_change.sqrt() <= DYKSTRA_TOL * scale {
            return (x, sweep);
        }
    }
    (x, DYKSTRA_MAX_ITERS)
}

/// Exact projection onto the face picked out by constraints active at `y`,
/// dropping constraints with negative multipliers.
fn polish_from(halfspaces: &[Halfspace], x: &Point, y: &Point) -> Option<Point> {
    let mut active: Vec<&Halfspace> = halfspaces
        .iter()
        .filter(|h| (h.normal.dot(y) - h.offset).abs() <= 1e-7 * (1.0 + y.norm()))
        .collect();
    for _ in 0..=halfspaces.len() {
        let (_, lambda) = face_solve(&active, x)?;
        match lambda.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) {
            Some((i, l)) if *l < -1e-10 => {
                active.remove(i);
            }
            _ => return face_projection(halfspaces, &active, x),
        }
    }
    None
}

/// Lawson–Hanson non-negative least squares `min |Eu − f|, u ≥ 0`.
fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let m = e.ncols();
    let tol = 1e-12 * (1.0 + e.amax()) * (m as f64);
    let mut u = DVector::zeros(m);
    let mut passive = vec![false; m];
    for _ in 0..3 * m + 10 {
        let w = e.transpose() * (f - e * &u);
        let pick = (0..m).filter(|&j| !passive[j]).max_by(|&a, &b| w[a].total_cmp(&w[b]));
        match pick {
            Some(t) if w[t] > tol => passive[t] = true,
            _ => return Some(u),
        }
        loop {
            let idx: Vec<usize> = (0..m).filter(|&j| passive[j]).collect();
            let sub = DMatrix::from_fn(e.nrows(), idx.len(), |r, c| e[(r, idx[c])]);
            let sol = sub.svd(true, true).solve(f, 1e-13).ok()?;
            let mut s = DVector::zeros(m);
            for (c, &j) in idx.iter().enumerate() {
                s[j] = sol[c];
            }
            if idx.iter().all(|&j| s[j] > 0.0) {
                u = s;
                break;
            }
            let alpha = idx
                .iter()
                .filter(|&&j| s[j] <= 0.0)
                .map(|&j| u[j] / (u[j] - s[j]))
                .fold(f64::INFINITY, f64::min);
            u += (&s - &u) * alpha;
            for &j in &idx {
                if u[j] <= tol {
                    u[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    None
}

/// Exact projection onto `{a·y ≤ b}` as a least-distance problem
/// `min |z|, A z ≤ b − A x`, solved through its NNLS dual. A vanishing dual
/// residual certifies an infeasible system (`EmptyBody`); `Ok(None)` means the
/// solve broke down.
fn least_distance(halfspaces: &[Halfspace], x: &Point) -> Result<Option<Point>> {
    let n = x.len();
    let m = halfspaces.len();
    // column j is (−a_j, (a_j·x − b_j)/D), normalised; z is recovered in units of D
    let scale = halfspaces.iter().map(|h| (h.normal.dot(x) - h.offset).abs()).fold(1.0, f64::max);
    let mut e = DMatrix::zeros(n + 1, m);
    for (j, h) in halfspaces.iter().enumerate() {
        let mut col = DVector::zeros(n + 1);
        col.rows_mut(0, n).copy_from(&(-&h.normal));
        col[n] = (h.normal.dot(x) - h.offset) / scale;
        let norm = col.norm();
        if norm > 0.0 {
            e.set_column(j, &(col / norm));
        }
    }
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let Some(u) = nnls(&e, &f) else {
        return Ok(None);
    };
    let r = &e * u - f;
    if r.norm() <= INFEASIBLE_RESIDUAL {
        return Err(Error::EmptyBody);
    }
    if !(r[n] < -1e-12) {
        return Ok(None);
    }
    let z = Point::from_fn(n, |i, _| -scale * r[i] / r[n]);
    let y = x + z;
    let viol = halfspaces.iter().map(|h| h.violation(&y)).fold(0.0, f64::max);
    Ok((viol <= FEASIBILITY_TOL * (1.0 + x.norm())).then_some(y))
}

/// Rows above which plane elimination gives up.
const ELIMINATION_ROWS: usize = 4096;

/// Constraint `coeffs·v ≤ rhs` with unit coefficient vector.
fn unit_row(coeffs: Point, rhs: f64) -> Option<(Point, f64)> {
    let norm = coeffs.norm();
    (norm > 1e-12).then(|| (coeffs / norm, rhs / norm))
}

/// Fourier–Motzkin elimination of coordinate 0. `None` when a constant
/// row is violated, i.e. the system is infeasible.
fn eliminate_first(rows: Vec<(Point, f64)>) -> Option<Vec<(Point, f64)>> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for (a, b) in rows {
        let rest = a.rows(1, a.len() - 1).into_owned();
        if a[0] > 1e-12 {
            pos.push((rest / a[0], b / a[0]));
        } else if a[0] < -1e-12 {
            neg.push((rest / -a[0], b / -a[0]));
        } else {
            match unit_row(rest, b) {
                Some(r) => out.push(r),
                None if b < -FEASIBILITY_TOL => return None,
                None => {}
            }
        }
    }
    for (ap, bp) in &pos {
        for (an, bn) in &neg {
            match unit_row(ap + an, bp + bn) {
                Some(r) => out.push(r),
                None if bp + bn < -FEASIBILITY_TOL => return None,
                None => {}
            }
        }
    }
    Some(out)
}

/// Exact `inf_{s,t} dist(base + s·d1 + t·d2, P)` for a polyhedron `P`: the
/// plane parameters are eliminated, leaving a least-distance problem on the
/// orthogonal complement of the plane. `Some(∞)` for an empty polyhedron,
/// `None` when elimination grows too large or the solve breaks down.
pub(crate) fn polyhedral_plane_distance(halfspaces: &[Halfspace], base: &Point, dirs: &[Point]) -> Option<f64> {
    let n = base.len();
    let across = crate::linalg::orthogonal_complement(dirs, n);
    let mut rows: Vec<(Point, f64)> = halfspaces
        .iter()
        .map(|h| {
            let mut c = Point::zeros(2 + across.len());
            c[0] = h.normal.dot(&dirs[0]);
            c[1] = h.normal.dot(&dirs[1]);
            for (i, q) in across.iter().enumerate() {
                c[2 + i] = h.normal.dot(q);
            }
            (c, h.offset - h.normal.dot(base))
        })
        .collect();
    for _ in 0..2 {
        match eliminate_first(rows) {
            Some(r) if r.len() <= ELIMINATION_ROWS => rows = r,
            Some(_) => return None,
            None => return Some(f64::INFINITY),
        }
    }
    if rows.is_empty() {
        return Some(0.0);
    }
    let quotient: Vec<Halfspace> = rows.into_iter().map(|(normal, offset)| Halfspace { normal, offset }).collect();
    match least_distance(&quotient, &Point::zeros(across.len())) {
        Ok(w) => w.map(|w| w.norm()),
        Err(_) => Some(f64::INFINITY),
    }
}

/// Projection onto `{a·y = b for active}`; accepted only when the result is
/// feasible and the multipliers are nonnegative (KKT point).
fn face_projection(all: &[Halfspace], active: &[&Halfspace], x: &Point) -> Option<Point> {
    let (y, lambda) = face_solve(active, x)?;
    if lambda.iter().any(|l| *l < -1e-10) {
        return None;
    }
    let viol = all.iter().map(|h| h.violation(&y)).fold(0.0, f64::max);
    (viol <= 1e-12 * (1.0 + x.norm())).then_some(y)
}

fn face_solve(active: &[&Halfspace], x: &Point) -> Option<(Point, Vec<f64>)> {
    if active.is_empty() {
        return Some((x.clone(), Vec::new()));
    }
    let m = active.len();
    let n = x.len();
    let a = DMatrix::from_fn(m, n, |i, j| active[i].normal[j]);
    let r = nalgebra::DVector::from_iterator(m, active.iter().map(|h| h.normal.dot(x) - h.offset));
    let gram = &a * a.transpose();
    let pinv = gram.pseudo_inverse(1e-12).ok()?;
    let lambda = pinv * r;
    let y = x - a.transpose() * &lambda;
    if y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((y, lambda.iter().cloned().collect()))
}
