//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

/// Orthonormal basis of `{v : M v = 0}` where `M` has the given rows.
///
/// Singular values at or below `tol * max(1, σ_max)` count as zero.
pub fn null_space(rows: &[Point], dim: usize, tol: f64) -> Vec<Point> {
    if rows.is_empty() {
        return (0..dim).map(|i| unit(dim, i)).collect();
    }
    let m = rows.len().max(dim);
    let mut mat = DMatrix::<f64>::zeros(m, dim);
    for (i, r) in rows.iter().enumerate() {
        mat.set_row(i, &r.transpose());
    }
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let mut basis: Vec<Point> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cut)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    basis = gram_schmidt(&basis, 1e-12);
    basis
}

/// Modified Gram–Schmidt; drops vectors whose residual norm falls below `tol`.
pub fn gram_schmidt(vectors: &[Point], tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let n = w.norm();
        if n > tol {
            out.push(w / n);
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of span(`basis`) in R^dim.
pub fn orthogonal_complement(basis: &[Point], dim: usize) -> Vec<Point> {
    let mut all: Vec<Point> = basis.to_vec();
    let start = all.len();
    for i in 0..dim {
        all.push(unit(dim, i));
    }
    let q = gram_schmidt(&all, 1e-8);
    let k = gram_schmidt(basis, 1e-8).len();
    debug_assert!(start >= k);
    q.into_iter().skip(k).collect()
}

/// Projection of `v` onto the orthogonal complement of an orthonormal family.
pub fn reject(v: &Point, basis: &[Point]) -> Point {
    let mut w = v.clone();
    for q in basis {
        let c = q.dot(&w);
        w.axpy(-c, q, 1.0);
    }
    w
}

pub fn unit(dim: usize, i: usize) -> Point {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}

/// Largest deviation of the Gram matrix of `vs` from the identity.
pub fn orthonormality_defect(vs: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            d = d.max((a.dot(b) - target).abs());
        }
    }
    d
}

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix).
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

/// Random unitary matrix on C^n written as a real orthogonal matrix on
/// R^{2n} with interleaved coordinates `(x1, y1, x2, y2, ...)`.
pub fn random_unitary_real<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = g.qr().q();
    complex_to_real(&q)
}

/// Real 2n×2n matrix of a complex n×n matrix in interleaved coordinates.
pub fn complex_to_real(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..m.ncols() {
            let c = m[(j, k)];
            out[(2 * j, 2 * k)] = c.re;
            out[(2 * j, 2 * k + 1)] = -c.im;
            out[(2 * j + 1, 2 * k)] = c.im;
            out[(2 * j + 1, 2 * k + 1)] = c.re;
        }
    }
    out
}

/// The standard complex structure `J` (multiplication by i) on interleaved R^{2n}.
pub fn apply_j(v: &Point) -> Result<Point> {
    if v.len() % 2 != 0 {
        return Err(Error::OddDimension(v.len()));
    }
    let mut w = DVector::zeros(v.len());
    for j in 0..v.len() / 2 {
        w[2 * j] = -v[2 * j + 1];
        w[2 * j + 1] = v[2 * j];
    }
    Ok(w)
}

pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Point {
    loop {
        let v = DVector::<f64>::from_fn(dim, |_, _| rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Element of the affine orthogonal group: `x ↦ O x + v`.
///
/// Serialised as `{"rotation": [[row], ...], "translation": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MotionRepr", try_from = "MotionRepr")]
pub struct RigidMotion {
    pub rotation: DMatrix<f64>,
    pub translation: Point,
}

#[derive(Serialize, Deserialize)]
struct MotionRepr {
    rotation: Vec<Vec<f64>>,
    translation: Vec<f64>,
}

impl From<RigidMotion> for MotionRepr {
    fn from(m: RigidMotion) -> Self {
        MotionRepr {
            rotation: m.rotation.row_iter().map(|r| r.iter().cloned().collect()).collect(),
            translation: m.translation.iter().cloned().collect(),
        }
    }
}

impl TryFrom<MotionRepr> for RigidMotion {
    type Error = Error;

    fn try_from(r: MotionRepr) -> Result<Self> {
        let n = r.translation.len();
        if r.rotation.len() != n || r.rotation.iter().any(|row| row.len() != n) {
            return Err(Error::DimMismatch { expected: n, got: r.rotation.len() });
        }
        let rot = DMatrix::from_fn(n, n, |i, j| r.rotation[i][j]);
        RigidMotion::new(rot, DVector::from_vec(r.translation))
    }
}

impl RigidMotion {
    pub fn identity(dim: usize) -> Self {
        RigidMotion {
            rotation: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn new(rotation: DMatrix<f64>, translation: Point) -> Result<Self> {
        let n = translation.len();
        if rotation.nrows() != n || rotation.ncols() != n {
            return Err(Error::DimMismatch { expected: n, got: rotation.nrows() });
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(n, n)).amax();
        if defect > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "rotation is not orthogonal (defect {defect:e})"
            )));
        }
        Ok(RigidMotion { rotation, translation })
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.rotation * x + &self.translation
    }

    pub fn apply_linear(&self, v: &Point) -> Point {
        &self.rotation * v
    }

    pub fn inverse_apply(&self, y: &Point) -> Point {
        self.rotation.transpose() * (y - &self.translation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_rank_one_stack() {
        let rows = vec![unit(3, 0), -unit(3, 0)];
        let ns = null_space(&rows, 3, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(v[0].abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_commutes_with_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary_real(3, &mut rng);
        let v = random_unit(6, &mut rng);
        let lhs = apply_j(&(&u * &v)).unwrap();
        let rhs = &u * apply_j(&v).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((u.transpose() * &u - DMatrix::identity(6, 6)).amax() < 1e-12);
    }

    #[test]
    fn complement_spans_the_rest() {
        let b = vec![DVector::from_vec(vec![1.0, 1.0, 0.0]) / 2f64.sqrt()];
        let c = orthogonal_complement(&b, 3);
        assert_eq!(c.len(), 2);
        let mut all = b.clone();
        all.extend(c);
        assert!(orthonormality_defect(&all) < 1e-12);
    }
}
