use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::convexgeo::ConvexBody;
use crate::linalg::{random_orthogonal, random_unitary_real, unit, RigidMotion};

fn p(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

fn ball3() -> ConvexBody {
    ConvexBody::ball(Point::zeros(3), 1.0).unwrap()
}

fn cylinder3() -> ConvexBody {
    ConvexBody::cylinder(Point::zeros(3), 1.0, vec![unit(3, 2)]).unwrap()
}

fn complement(body: ConvexBody) -> DomainSpec {
    DomainSpec::ConvexComplement { body }
}

fn plane_2st() -> AffinePlane {
    AffinePlane::new(p(&[2., 0., 0.]), unit(3, 1), unit(3, 2)).unwrap()
}

#[test]
fn tube_examples() {
    let cyl = complement(cylinder3());
    assert!(verify_tube_condition(&cyl, &plane_2st(), 0.99).unwrap());
    // radial oracle: the closest points are (2, 0, t) at distance √4 − 1
    let d = tube_clearance(&cyl, &plane_2st()).unwrap();
    assert!((d - (4f64.sqrt() - 1.0)).abs() < 1e-9, "{d}");
    let ball = complement(ball3());
    assert!(!verify_tube_condition(&ball, &plane_2st(), 1.01).unwrap());
    assert!(verify_tube_condition(&ball, &plane_2st(), 0.99).unwrap());
}

#[test]
fn wedge_tube_scales_with_offset() {
    let phi = 1.5 * PI;
    let w = DomainSpec::wedge(phi).unwrap();
    let (s, c) = (phi / 2.0).sin_cos();
    for r in [0.5, 1.0, 3.0, 10.0] {
        let plane = AffinePlane::new(p(&[0., r, 0.]), unit(3, 0), p(&[0., c, s])).unwrap();
        let delta = ((phi - PI) / 2.0).sin() * r;
        assert!(verify_tube_condition(&w, &plane, delta * (1.0 - 1e-9)).unwrap());
        assert!(!verify_tube_condition(&w, &plane, delta * (1.0 + 1e-6)).unwrap());
    }
}

#[test]
fn tube_rejects_bad_planes() {
    let ball = complement(ball3());
    let skew = AffinePlane { base: p(&[2., 0., 0.]), dirs: vec![unit(3, 1), p(&[0., 1., 1.])] };
    assert!(matches!(verify_tube_condition(&ball, &skew, 0.5), Err(Error::DegeneratePlane { .. })));
    assert!(verify_tube_condition(&ball, &plane_2st(), 0.0).is_err());
}

#[test]
fn sampled_tube_for_graph_domains() {
    let q = DomainSpec::quadric_graph(1.0, 1.0, 0.0).unwrap();
    let inside = AffinePlane::new(p(&[0., 0., 0., 1.]), unit(4, 0), unit(4, 1)).unwrap();
    assert!(verify_tube_condition(&q, &inside, 0.5).unwrap());
    let crossing = AffinePlane::new(p(&[0., 0., 0., 1.]), unit(4, 0), unit(4, 3)).unwrap();
    assert!(!verify_tube_condition(&q, &crossing, 0.1).unwrap());
}

#[test]
fn growth_examples() {
    let cyl = complement(cylinder3());
    let (ok, samples) = certify::growth_search(&cyl, &plane_2st(), &[1.0, 10.0, 100.0]).unwrap();
    assert!(ok);
    for s in &samples {
        // q = (2, T, 0) up to the sign of T, or (2, 0, T) along the axis
        let t = s.point[1].abs();
        assert!((s.clearance - ((4.0 + t * t).sqrt() - 1.0)).abs() < 1e-9);
        assert!(s.clearance >= s.radius);
    }
    assert!(samples.windows(2).all(|w| w[1].clearance > w[0].clearance));

    let h = DomainSpec::halfspace(unit(3, 2), 0.0).unwrap();
    let plane = AffinePlane::new(p(&[0., 0., 1.]), unit(3, 0), unit(3, 1)).unwrap();
    assert!(!verify_growth_condition(&h, &plane, &[2.0]).unwrap());
    assert!(verify_growth_condition(&h, &plane, &[1.0]).unwrap());
}

#[test]
fn quadric_growth_along_x2() {
    let q = DomainSpec::quadric_graph(1.0, 1.0, 0.0).unwrap();
    // tangent plane of x₄ = −x₁² − x₂² at (0, 1), lifted to pass through (0, 1, 0, 0)
    let plane = AffinePlane::spanned_by(p(&[0., 1., 0., 0.]), &unit(4, 0), &p(&[0., 1., 0., -2.])).unwrap();
    assert!(tube_clearance(&q, &plane).unwrap() > 0.0);
    assert!(verify_growth_condition(&q, &plane, &[1.0, 5.0]).unwrap());
}

#[test]
fn convex_complement_examples() {
    let h = ConvexBody::polyhedron(3, vec![(unit(3, 2), 0.0)]).unwrap();
    let r = classify_convex_complement(&h).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::NotFlexible, Some(Rule::HalfspaceOrSlab)));

    let r = classify_convex_complement(&ball3()).unwrap();
    assert_eq!(r.verdict, Verdict::Flexible);
    let w = r.witness.unwrap();
    // base at offset 2 on a tangent-offset plane: δ = offset − 1
    let offset = w.plane.base.norm();
    assert!((w.delta - (offset - 1.0)).abs() < 1e-9);
    for d in &w.plane.dirs {
        assert!(d.dot(&w.plane.base).abs() < 1e-9);
    }

    let slab = ConvexBody::polyhedron(4, vec![(unit(4, 3), 1.0), (-unit(4, 3), 1.0)]).unwrap();
    let r = classify_convex_complement(&slab).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::NotFlexible, Some(Rule::HalfspaceOrSlab)));

    let r = classify_convex_complement(&ConvexBody::empty(3)).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::Flexible, Some(Rule::FullSpace)));

    assert!(classify_convex_complement(&ConvexBody::whole_space(3)).is_err());
    assert!(classify_convex_complement(&ConvexBody::ball(Point::zeros(2), 1.0).unwrap()).is_err());
}

fn flexible_bodies() -> Vec<ConvexBody> {
    let orthant = ConvexBody::polyhedron(3, (0..3).map(|i| (-unit(3, i), 0.0)).collect()).unwrap();
    let wedge = ConvexBody::polyhedron(3, vec![(p(&[1., 1., 0.]), 0.0), (p(&[-1., 1., 0.]), 0.0)]).unwrap();
    let simplex = ConvexBody::polyhedron(
        4,
        (0..4).map(|i| (-unit(4, i), 0.0)).chain([(p(&[1., 1., 1., 1.]), 1.0)]).collect(),
    )
    .unwrap();
    vec![ball3(), cylinder3(), orthant, wedge, simplex]
}

#[test]
fn witnesses_are_sound() {
    for c in flexible_bodies() {
        let r = classify_convex_complement(&c).unwrap();
        assert_eq!(r.verdict, Verdict::Flexible, "{c:?}: {:?}", r.diagnostics);
        let w = r.witness.unwrap();
        assert!(w.delta > 0.0);
        let omega = complement(c.clone());
        assert!(verify_tube_condition(&omega, &w.plane, w.delta / 2.0).unwrap());
        assert!(verify_growth_condition(&omega, &w.plane, &CERTIFY_RADII).unwrap());
        assert!(w.growth.windows(2).all(|g| g[1].clearance > g[0].clearance));
    }
}

#[test]
fn rotated_slabs_and_halfspaces_are_not_flexible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..50 {
        let n = 3 + i % 3;
        let o = random_orthogonal(n, &mut rng);
        let v = Point::from_fn(n, |_, _| rng.gen_range(-5.0..5.0));
        let m = RigidMotion::new(o, v).unwrap();
        let base = if i % 2 == 0 {
            ConvexBody::polyhedron(n, vec![(unit(n, 0), 1.0)]).unwrap()
        } else {
            ConvexBody::polyhedron(n, vec![(unit(n, 0), 1.0), (-unit(n, 0), 0.5)]).unwrap()
        };
        let r = classify_convex_complement(&base.transformed(&m).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::NotFlexible);
        assert_eq!(r.reason, Some(Rule::HalfspaceOrSlab));
    }
}

#[test]
fn verdict_is_invariant_under_rigid_motions() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let bodies = [ball3(), cylinder3(), flexible_bodies()[2].clone()];
    for i in 0..20 {
        let c = &bodies[i % bodies.len()];
        let m = RigidMotion::new(random_orthogonal(3, &mut rng), Point::from_fn(3, |_, _| rng.gen_range(-3.0..3.0)))
            .unwrap();
        let a = classify_convex_complement(c).unwrap();
        let b = classify_convex_complement(&c.transformed(&m).unwrap()).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.reason, b.reason);
    }
}

#[test]
fn domain_examples() {
    let r = classify_domain(&DomainSpec::wedge(1.5 * PI).unwrap()).unwrap();
    assert_eq!(r.verdict, Verdict::Flexible);
    let w = r.witness.unwrap();
    assert!((w.delta - (0.75 * PI).sin()).abs() < 1e-8);

    let r = classify_domain(&DomainSpec::wedge(FRAC_PI_2).unwrap()).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::NotFlexible, Some(Rule::LiouvilleHalfspaceContainment)));

    let r = classify_domain(&DomainSpec::quadric_graph(0.0, 2.0, -1.0).unwrap()).unwrap();
    assert_eq!(r.verdict, Verdict::Flexible, "{:?}", r.diagnostics);
    assert_eq!(r.reason, Some(Rule::TubePlusGrowth));
    for (a1, a2, a3) in [(1.0, 1.0, 1.0), (0.0, 1.0, 3.0), (2.0, 0.5, 0.0)] {
        let r = classify_domain(&DomainSpec::quadric_graph(a1, a2, a3).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Flexible, "{:?}", r.diagnostics);
    }
    for (a2, a3) in [(1.0, 0.5), (2.0, -1.0)] {
        let r = classify_domain(&DomainSpec::WedgeGraph { a2, a3, dim: 4 }).unwrap();
        assert_eq!(r.verdict, Verdict::Flexible, "{:?}", r.diagnostics);
    }

    let h = DomainSpec::halfspace(unit(3, 2), 0.0).unwrap();
    assert_eq!(classify_domain(&h).unwrap().verdict, Verdict::NotFlexible);
    let s = DomainSpec::slab(unit(3, 2), 0.0, 1.0).unwrap();
    assert_eq!(classify_domain(&s).unwrap().verdict, Verdict::NotFlexible);
    let full = DomainSpec::FullSpace { dim: 3 };
    assert_eq!(classify_domain(&full).unwrap().reason, Some(Rule::FullSpace));

    assert!(matches!(
        classify_domain(&DomainSpec::QuadricGraph { a1: 1.0, a2: 0.0, a3: 1.0 }),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn wedge_threshold_is_pi() {
    for phi in [PI - 0.1, PI - 0.01, FRAC_PI_2] {
        let r = classify_domain(&DomainSpec::wedge(phi).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::NotFlexible, "φ = {phi}");
    }
    for phi in [PI + 0.01, PI + 0.1, 1.5 * PI] {
        let r = classify_domain(&DomainSpec::wedge(phi).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Flexible, "φ = {phi}: {:?}", r.diagnostics);
    }
    let r = classify_domain(&DomainSpec::wedge(PI).unwrap()).unwrap();
    assert_eq!(r.reason, Some(Rule::HalfspaceOrSlab));
}

#[test]
fn rotated_wedge_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let frame = RigidMotion::new(random_orthogonal(3, &mut rng), p(&[1., -2., 0.5])).unwrap();
    let w = DomainSpec::Wedge { angle: 1.3 * PI, frame: Some(frame) };
    let r = classify_domain(&w).unwrap();
    assert_eq!(r.verdict, Verdict::Flexible);
    let wit = r.witness.unwrap();
    assert!(verify_tube_condition(&w, &wit.plane, wit.delta / 2.0).unwrap());
}

#[test]
fn union_chain_rule() {
    let chain = DomainSpec::UnionChain {
        members: vec![
            complement(ConvexBody::ball(Point::zeros(3), 2.0).unwrap()),
            complement(ConvexBody::ball(Point::zeros(3), 1.0).unwrap()),
        ],
    };
    let r = classify_domain(&chain).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::Flexible, Some(Rule::UnionChainRule)));
    let mixed = DomainSpec::UnionChain {
        members: vec![DomainSpec::halfspace(unit(3, 2), 1.0).unwrap(), complement(ball3())],
    };
    assert_eq!(classify_domain(&mixed).unwrap().verdict, Verdict::Unknown);
}

fn re_z1_nonpositive() -> ConvexBody {
    ConvexBody::polyhedron(4, vec![(unit(4, 0), 0.0)]).unwrap()
}

fn totally_real_plane() -> ConvexBody {
    ConvexBody::polyhedron(4, vec![(unit(4, 1), 0.0), (-unit(4, 1), 0.0), (unit(4, 3), 0.0), (-unit(4, 3), 0.0)])
        .unwrap()
}

fn disc_times_c() -> ConvexBody {
    ConvexBody::from_json(r#"{"dim":4,"support":"disc-product","params":{"complex_index":0}}"#).unwrap()
}

fn complex_hyperplane() -> ConvexBody {
    ConvexBody::polyhedron(4, vec![(unit(4, 0), 0.0), (-unit(4, 0), 0.0), (unit(4, 1), 0.0), (-unit(4, 1), 0.0)])
        .unwrap()
}

#[test]
fn complex_lineality_examples() {
    let r = complex_lineality(&re_z1_nonpositive()).unwrap();
    assert_eq!((r.real_lineality_dim, r.complex_lineality_dim, r.m), (3, 1, 1));
    let r = complex_lineality(&totally_real_plane()).unwrap();
    assert_eq!((r.real_lineality_dim, r.complex_lineality_dim, r.m), (2, 0, 2));
    let r = complex_lineality(&disc_times_c()).unwrap();
    assert_eq!((r.complex_lineality_dim, r.m), (1, 1));
    let odd = ConvexBody::ball(Point::zeros(3), 1.0).unwrap();
    assert_eq!(complex_lineality(&odd), Err(Error::OddDimension(3)));
}

#[test]
fn complex_lineality_against_subspace_oracle() {
    // V spanned by random vectors; V ∩ JV computed independently from the
    // rank of [B, JB]: dim(V ∩ JV) = 2 dim V − rank[B, JB].
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for k in 0..=4 {
        let n = 6;
        let v: Vec<Point> = (0..k).map(|_| Point::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))).collect();
        let v = crate::linalg::gram_schmidt(&v, 1e-10);
        let normals = crate::linalg::orthogonal_complement(&v, n);
        let body = ConvexBody::polyhedron(n, normals.iter().flat_map(|a| [(a.clone(), 0.0), (-a, 0.0)]).collect())
            .unwrap();
        let mut cols = v.clone();
        cols.extend(v.iter().map(|b| crate::linalg::apply_j(b).unwrap()));
        let rank = if cols.is_empty() {
            0
        } else {
            DMatrix::from_columns(&cols).rank(1e-9)
        };
        let expected = 2 * v.len() - rank;
        let r = complex_lineality(&body).unwrap();
        assert_eq!(r.real_lineality_dim, v.len());
        assert_eq!(2 * r.complex_lineality_dim, expected, "k = {k}");
    }
}

#[test]
fn complex_classification_examples() {
    let r = classify_complex_complement(&complex_hyperplane()).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::Flexible, Some(Rule::ComplexHyperplane)));
    let r = classify_complex_complement(&disc_times_c()).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::NotFlexible, Some(Rule::HyperbolicFactor)));
    let r = classify_complex_complement(&re_z1_nonpositive()).unwrap();
    assert_eq!(r.verdict, Verdict::NotFlexible);
    let r = classify_complex_complement(&totally_real_plane()).unwrap();
    assert_eq!((r.verdict, r.reason), (Verdict::Flexible, Some(Rule::ComplexProductRule)), "{:?}", r.diagnostics);
    assert!(r.witness.unwrap().complex);
    let ball = ConvexBody::ball(Point::zeros(4), 1.0).unwrap();
    let r = classify_complex_complement(&ball).unwrap();
    assert_eq!(r.verdict, Verdict::Flexible, "{:?}", r.diagnostics);
}

#[test]
fn complex_witness_is_a_complex_line_missing_c() {
    let ball = ConvexBody::ball(Point::zeros(4), 1.0).unwrap();
    let w = classify_complex_complement(&ball).unwrap().witness.unwrap();
    let j0 = crate::linalg::apply_j(&w.plane.dirs[0]).unwrap();
    assert!((j0 - &w.plane.dirs[1]).norm() < 1e-12);
    assert!(plane_distance(&ball, &w.plane).unwrap() >= w.delta - 1e-12);
    // far slices miss the ball entirely
    assert!(w.growth.iter().all(|g| g.clearance >= g.radius));
    assert!(w.growth.windows(2).all(|g| g[1].clearance > g[0].clearance || g[1].clearance.is_infinite()));
}

#[test]
fn polygon_factor_verdict_is_complex_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    // hexagon in the z₁-plane times C
    let hexagon: Vec<(Point, f64)> = (0..6)
        .map(|i| {
            let t = i as f64 * PI / 3.0;
            (p(&[t.cos(), t.sin(), 0., 0.]), 1.0)
        })
        .collect();
    let c = ConvexBody::polyhedron(4, hexagon).unwrap();
    assert_eq!(classify_complex_complement(&c).unwrap().verdict, Verdict::NotFlexible);
    for _ in 0..10 {
        let u = random_unitary_real(2, &mut rng);
        let v = Point::from_fn(4, |_, _| rng.gen_range(-3.0..3.0));
        let moved = c.transformed(&RigidMotion::new(u, v).unwrap()).unwrap();
        let r = classify_complex_complement(&moved).unwrap();
        assert_eq!((r.verdict, r.reason), (Verdict::NotFlexible, Some(Rule::HyperbolicFactor)));
    }
}

#[test]
fn complex_structure_matches_num_complex() {
    let z = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)];
    let v = p(&[z[0].re, z[0].im, z[1].re, z[1].im]);
    let jv = crate::linalg::apply_j(&v).unwrap();
    for k in 0..2 {
        let iz = z[k] * Complex64::i();
        assert_eq!((jv[2 * k], jv[2 * k + 1]), (iz.re, iz.im));
    }
}

#[test]
fn result_serialises() {
    let r = classify_convex_complement(&ball3()).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: ClassificationResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn exact_plane_distance_matches_box_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for _ in 0..30 {
        let n = rng.gen_range(3..=5);
        let hs = (0..n + rng.gen_range(1..=4))
            .map(|_| (Point::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).normalize(), rng.gen_range(0.5..2.0)))
            .collect();
        let body = ConvexBody::polyhedron(n, hs).unwrap();
        let base = Point::from_fn(n, |_, _| rng.gen_range(-5.0..5.0));
        let d1 = Point::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let d2 = Point::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let plane = AffinePlane::spanned_by(base, &d1, &d2).unwrap();
        let exact = plane_distance(&body, &plane).unwrap();
        let boxed = certify::box_plane_distance(&body, &plane).unwrap();
        assert!((exact - boxed).abs() <= 1e-6 * (1.0 + boxed), "{exact} vs {boxed}");
        compared += usize::from(exact > 0.0);
    }
    assert!(compared > 0);
}

#[test]
fn plane_distance_to_a_cube() {
    let n = 4;
    let cube = ConvexBody::polyhedron(n, (0..n).flat_map(|i| [(unit(n, i), 1.0), (-unit(n, i), 1.0)]).collect()).unwrap();
    // Λ = {(3, s, t, 2)}: nearest cube point (1, ·, ·, 1)
    let plane = AffinePlane::new(p(&[3.0, 0.0, 0.0, 2.0]), unit(n, 1), unit(n, 2)).unwrap();
    assert!((plane_distance(&cube, &plane).unwrap() - 5f64.sqrt()).abs() < 1e-12);
    let through = AffinePlane::new(p(&[0.5, 0.0, 0.0, 0.0]), unit(n, 1), unit(n, 2)).unwrap();
    assert_eq!(plane_distance(&cube, &through).unwrap(), 0.0);
}
