use std::sync::Arc;

use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{random_unit, unit};
use crate::Point;

fn p(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

fn unit_ball3() -> ConvexBody {
    ConvexBody::ball(Point::zeros(3), 1.0).unwrap()
}

fn cylinder3() -> ConvexBody {
    ConvexBody::cylinder(Point::zeros(3), 1.0, vec![unit(3, 2)]).unwrap()
}

fn slab3() -> ConvexBody {
    ConvexBody::polyhedron(3, vec![(p(&[1., 0., 0.]), 1.0), (p(&[-1., 0., 0.]), 1.0)]).unwrap()
}

fn simplex3() -> ConvexBody {
    ConvexBody::polyhedron(
        3,
        vec![
            (p(&[-1., 0., 0.]), 0.0),
            (p(&[0., -1., 0.]), 0.0),
            (p(&[0., 0., -1.]), 0.0),
            (p(&[1., 1., 1.]), 1.0),
        ],
    )
    .unwrap()
}

/// Closed-form projection onto the simplex (sort-and-threshold), used as an oracle.
fn simplex_oracle(x: &Point) -> Point {
    // projection onto {y ≥ 0, Σy ≤ 1}
    let clipped: Point = x.map(|v| v.max(0.0));
    if clipped.sum() <= 1.0 {
        return clipped;
    }
    let mut u: Vec<f64> = x.iter().cloned().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    x.map(|v| (v - theta).max(0.0))
}

#[test]
fn project_ball_radial() {
    let pr = unit_ball3().project(&p(&[2., 0., 0.])).unwrap();
    assert_abs_diff_eq!(pr.point, p(&[1., 0., 0.]), epsilon = 1e-15);
    assert_abs_diff_eq!(pr.distance, 1.0, epsilon = 1e-15);
}

#[test]
fn project_halfspace() {
    let c = ConvexBody::polyhedron(3, vec![(p(&[1., 0., 0.]), 0.0)]).unwrap();
    let pr = c.project(&p(&[3., 5., -1.])).unwrap();
    assert_abs_diff_eq!(pr.point, p(&[0., 5., -1.]), epsilon = 1e-15);
    assert_abs_diff_eq!(pr.distance, 3.0, epsilon = 1e-15);
}

#[test]
fn project_cylinder_matches_radial_oracle() {
    // oracle: sqrt(4 + T^2) - 1 only holds for the point (2, T, 0) when the
    // cylinder axis is e3; cross-check with plain alternating projections on a
    // polygonal outer approximation as well.
    let cyl = cylinder3();
    for t in [0.0, 1.0, 10.0] {
        let x = p(&[2., t, 0.]);
        let d = cyl.distance(&x).unwrap();
        let oracle = (4.0f64 + t * t).sqrt() - 1.0;
        assert_abs_diff_eq!(d, oracle, epsilon = 1e-12);

        // polygon with 4096 tangent facets; its distance is within
        // 1 - cos(pi/4096) of the circle
        let m = 4096;
        let facets = (0..m)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                (p(&[a.cos(), a.sin(), 0.0]), 1.0)
            })
            .collect();
        let poly = ConvexBody::polyhedron(3, facets).unwrap();
        let dp = poly.distance(&x).unwrap();
        assert!((dp - oracle).abs() < 1e-5, "{dp} vs {oracle}");
    }
}

#[test]
fn project_simplex_matches_sort_oracle() {
    let s = simplex3();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = Point::from_fn(3, |_, _| rng.gen_range(-3.0..3.0));
        let got = s.project(&x).unwrap();
        let want = simplex_oracle(&x);
        assert!((got.point - &want).norm() < 1e-9, "x={x:?}");
        assert!(s.violation(&want) < 1e-12);
    }
}

#[test]
fn project_round_and_halfspace_intersection() {
    // half ball {|x| ≤ 1, x1 ≤ 0}: nearest point to (1, 1, 0) is (0, 1, 0)
    let mut body = unit_ball3();
    body.push_halfspace(p(&[1., 0., 0.]), 0.0).unwrap();
    let pr = body.project(&p(&[1., 1., 0.])).unwrap();
    assert!((&pr.point - p(&[0., 1., 0.])).norm() < 1e-8);
    assert!(body.violation(&pr.point) <= FEASIBILITY_TOL);
}

#[test]
fn empty_body_detected() {
    let c = ConvexBody::polyhedron(2, vec![(p(&[1., 0.]), -1.0), (p(&[-1., 0.]), -1.0)]).unwrap();
    assert!(c.is_empty());
    assert_eq!(c.project(&p(&[0., 0.])), Err(Error::EmptyBody));
    assert_eq!(ConvexBody::empty(3).lineality_space().unwrap_err(), Error::EmptyBody);
    assert!(!simplex3().is_empty());
}

#[test]
fn normals_normalised_and_merged() {
    let c = ConvexBody::polyhedron(
        2,
        vec![(p(&[2., 0.]), 2.0), (p(&[1., 1e-13]), 3.0), (p(&[0., 5.]), 1.0)],
    )
    .unwrap();
    assert_eq!(c.halfspaces().len(), 2);
    for h in c.halfspaces() {
        assert!((h.normal.norm() - 1.0).abs() < 1e-12);
    }
    assert_abs_diff_eq!(c.halfspaces()[0].offset, 1.0, epsilon = 1e-15);
}

#[test]
fn lineality_examples() {
    let slab = slab3().lineality_space().unwrap();
    assert_eq!(slab.dim(), 2);
    for v in &slab.basis {
        assert!(v[0].abs() < 1e-12);
    }
    let quadrant =
        ConvexBody::polyhedron(3, vec![(p(&[1., 0., 0.]), 0.0), (p(&[0., 1., 0.]), 0.0)]).unwrap();
    let q = quadrant.lineality_space().unwrap();
    assert_eq!(q.dim(), 1);
    assert_abs_diff_eq!(q.basis[0][2].abs(), 1.0, epsilon = 1e-12);
    assert_eq!(simplex3().lineality_space().unwrap().dim(), 0);
    assert_eq!(cylinder3().lineality_dim().unwrap(), 1);
}

#[test]
fn halfspace_or_slab_examples() {
    assert!(slab3().is_halfspace_or_slab().unwrap());
    let h = ConvexBody::polyhedron(3, vec![(p(&[0., 0., 1.]), 0.0)]).unwrap();
    assert!(h.is_halfspace_or_slab().unwrap());
    assert!(!cylinder3().is_halfspace_or_slab().unwrap());
    assert!(!unit_ball3().is_halfspace_or_slab().unwrap());
}

#[test]
fn cylinder_lineality_from_discretised_normals() {
    // oracle: tangent halfspaces of the cylinder at 64 angles; kernel of the
    // stacked normals is the axis.
    let facets = (0..64)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            (p(&[a.cos(), a.sin(), 0.0]), 1.0)
        })
        .collect();
    let poly = ConvexBody::polyhedron(3, facets).unwrap();
    assert_eq!(poly.lineality_dim().unwrap(), 1);
    assert_eq!(cylinder3().lineality_dim().unwrap(), poly.lineality_dim().unwrap());
}

struct BallOracle;

impl SupportOracle for BallOracle {
    fn dim(&self) -> usize {
        3
    }
    fn support(&self, u: &Point) -> f64 {
        u.norm()
    }
    fn project(&self, x: &Point) -> Point {
        let n = x.norm();
        if n <= 1.0 {
            x.clone()
        } else {
            x / n
        }
    }
}

#[test]
fn oracle_body_needs_hint() {
    let b = ConvexBody::from_oracle(Arc::new(BallOracle), None);
    assert_eq!(b.lineality_space().unwrap_err(), Error::NonPolyhedral);
    assert_eq!(b.is_halfspace_or_slab().unwrap_err(), Error::NonPolyhedral);
    let hinted = ConvexBody::from_oracle(Arc::new(BallOracle), Some(0));
    assert!(!hinted.is_halfspace_or_slab().unwrap());
    assert_abs_diff_eq!(hinted.distance(&p(&[0., 3., 0.])).unwrap(), 2.0, epsilon = 1e-15);
}

#[test]
fn supporting_hyperplane_examples() {
    let (a, b) = unit_ball3().supporting_hyperplane(&p(&[2., 0., 0.])).unwrap();
    assert_abs_diff_eq!(a, unit(3, 0), epsilon = 1e-15);
    assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);

    let h = ConvexBody::polyhedron(3, vec![(p(&[1., 0., 0.]), 0.0)]).unwrap();
    let (a, b) = h.supporting_hyperplane(&p(&[1., 1., 1.])).unwrap();
    assert_abs_diff_eq!(a, unit(3, 0), epsilon = 1e-15);
    assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);

    // square [-1,1]^2: nearest point to (3, 0.5) is (1, 0.5)
    let sq = ConvexBody::polyhedron(
        2,
        vec![(p(&[1., 0.]), 1.0), (p(&[-1., 0.]), 1.0), (p(&[0., 1.]), 1.0), (p(&[0., -1.]), 1.0)],
    )
    .unwrap();
    let (a, b) = sq.supporting_hyperplane(&p(&[3., 0.5])).unwrap();
    assert_abs_diff_eq!(a, unit(2, 0), epsilon = 1e-12);
    assert_abs_diff_eq!(b, 1.0, epsilon = 1e-12);

    assert!(matches!(
        unit_ball3().supporting_hyperplane(&p(&[0.5, 0., 0.])),
        Err(Error::PointInsideBody { .. })
    ));
}

#[test]
fn support_fn_dominates_sampled_extreme_points() {
    let ball = ConvexBody::ball(p(&[0.5, -1., 2.]), 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<Point> = (0..500)
        .map(|_| ball.project(&(p(&[0.5, -1., 2.]) + random_unit(3, &mut rng) * 10.0)).unwrap().point)
        .collect();
    for _ in 0..100 {
        let u = random_unit(3, &mut rng);
        let h = ball.support(&u).unwrap();
        let best = samples.iter().map(|x| u.dot(x)).fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= h + 1e-9);
    }
}

#[test]
fn descriptor_roundtrip() {
    let json = r#"{"dim":3,"halfspaces":[{"a":[0,0,2],"b":4}],"support":"cylinder",
                  "params":{"radius":2.0,"axes":[[0,0,1]]},"lineality_hint":1}"#;
    let body = ConvexBody::from_json(json).unwrap();
    assert_eq!(body.halfspaces().len(), 1);
    assert_abs_diff_eq!(body.halfspaces()[0].offset, 2.0);
    let back = ConvexBody::try_from(&body.descriptor().unwrap()).unwrap();
    assert_eq!(back.descriptor().unwrap(), body.descriptor().unwrap());

    let disc = ConvexBody::from_json(r#"{"dim":4,"support":"disc-product","params":{"complex_index":0}}"#)
        .unwrap();
    assert_eq!(disc.lineality_dim().unwrap(), 2);
    assert!(disc.contains(&p(&[0.5, 0.5, 100., -7.]), 0.0));
    assert!(!disc.contains(&p(&[1.0, 0.5, 0., 0.]), 0.0));
}

mod props {
    use super::{cylinder3, simplex3, slab3, unit_ball3, ChaCha8Rng, ConvexBody, Point, SeedableRng, FEASIBILITY_TOL};
    use proptest::prelude::*;

    fn bodies() -> Vec<ConvexBody> {
        vec![unit_ball3(), cylinder3(), slab3(), simplex3()]
    }

    fn pt() -> impl Strategy<Value = Point> {
        prop::collection::vec(-20.0f64..20.0, 3).prop_map(Point::from_vec)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projection_is_idempotent(x in pt()) {
            for b in bodies() {
                let y = b.project(&x).unwrap();
                prop_assert!(b.violation(&y.point) <= FEASIBILITY_TOL);
                prop_assert!(b.project(&y.point).unwrap().distance <= 1e-9);
            }
        }

        #[test]
        fn projection_is_nonexpansive(x in pt(), y in pt()) {
            for b in bodies() {
                let px = b.project(&x).unwrap().point;
                let py = b.project(&y).unwrap().point;
                prop_assert!((px - py).norm() <= (&x - &y).norm() + 1e-9);
            }
        }

        #[test]
        fn supporting_hyperplane_separates(x in pt()) {
            for b in bodies() {
                let d = b.distance(&x).unwrap();
                if d > 1e-6 {
                    let (a, off) = b.supporting_hyperplane(&x).unwrap();
                    prop_assert!(a.dot(&x) - off >= d - 1e-9);
                }
            }
        }
    }

    #[test]
    fn lineality_directions_keep_points_inside() {
        use rand::Rng as _;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for b in [slab3(), cylinder3(), simplex3()] {
            let sub = b.lineality_space().unwrap();
            for _ in 0..20 {
                let x = b.project(&Point::from_fn(3, |_, _| rng.gen_range(-5.0..5.0))).unwrap().point;
                for v in &sub.basis {
                    for t in [-1e3, -1.0, 1.0, 1e3] {
                        assert!(b.contains(&(&x + v * t), 1e-9));
                    }
                }
            }
        }
    }
}
