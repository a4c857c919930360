use std::f64::consts::{PI, TAU};

use chibar::cones::{
    audit_selfliang, lrs_between, lrs_quadratic, region_statistic, CaseGeometry, CaseId, Cone2,
    Region,
};
use chibar::linalg2::{whitening_map, Point2, SymPD2};
use chibar::rng::{stream, PolarNormal};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn normal_point(rng: &mut ChaCha8Rng, scale: f64) -> Point2 {
    let (a, b) = PolarNormal::pair(rng);
    Point2::new(a * scale, b * scale)
}

fn random_cone(rng: &mut ChaCha8Rng) -> Cone2 {
    let dir = |rng: &mut ChaCha8Rng| Point2::from_angle(rng.random::<f64>() * TAU);
    match rng.random_range(0..5) {
        0 => Cone2::Origin,
        1 => Cone2::ray(dir(rng)).unwrap(),
        2 => loop {
            let a = dir(rng);
            let turn = 0.05 + rng.random::<f64>() * (PI - 0.1);
            if let Ok(c) = Cone2::sector(a, Point2::from_angle(a.angle() + turn)) {
                break c;
            }
        },
        3 => Cone2::half_plane(dir(rng)).unwrap(),
        _ => Cone2::FullPlane,
    }
}

fn random_spd(rng: &mut ChaCha8Rng) -> SymPD2 {
    let a11 = 0.1 + 5.0 * rng.random::<f64>();
    let a22 = 0.1 + 5.0 * rng.random::<f64>();
    let r = 0.98 * (2.0 * rng.random::<f64>() - 1.0);
    SymPD2::new(a11, r * (a11 * a22).sqrt(), a22).unwrap()
}

#[test]
fn projection_is_idempotent() {
    let mut rng = stream(1, 0);
    for _ in 0..10_000 {
        let c = random_cone(&mut rng);
        let z = normal_point(&mut rng, 3.0);
        let p = c.project(z);
        let pp = c.project(p);
        assert!(p.dist_sq(pp) <= 1e-24 * (1.0 + p.norm_sq()), "{c:?} {z:?}");
    }
}

#[test]
fn moreau_decomposition_on_faces() {
    let mut rng = stream(2, 0);
    let mut checked = 0;
    for _ in 0..10_000 {
        let c = random_cone(&mut rng);
        if !matches!(c, Cone2::Ray { .. } | Cone2::Sector { .. }) {
            continue;
        }
        let z = normal_point(&mut rng, 2.0);
        let p = c.project(z);
        let r = z - p;
        // Residual is orthogonal to the projection and the split is Pythagorean.
        assert!(p.dot(r).abs() < 1e-12 * (1.0 + z.norm_sq()));
        assert!((z.norm_sq() - p.norm_sq() - r.norm_sq()).abs() < 1e-12 * (1.0 + z.norm_sq()));
        checked += 1;
    }
    assert!(checked > 3000);
}

#[test]
fn projection_beats_boundary_candidates() {
    let mut rng = stream(3, 0);
    for _ in 0..5_000 {
        let c = random_cone(&mut rng);
        let z = normal_point(&mut rng, 2.0);
        let d = c.distance_sq(z);
        // Brute force over boundary rays and a dense angular sweep of members.
        for k in 0..360 {
            let u = Point2::from_angle(k as f64 * TAU / 360.0);
            if c.contains(u) {
                let t = z.dot(u).max(0.0);
                assert!(d <= z.dist_sq(u * t) + 1e-12);
            }
        }
    }
}

#[test]
fn metric_invariance_random_metrics() {
    let mut rng = stream(4, 0);
    let pairs = [
        (Cone2::Origin, Cone2::quadrant()),
        (
            Cone2::ray(Point2::new(0.0, 1.0)).unwrap(),
            Cone2::quadrant(),
        ),
        (
            Cone2::ray(Point2::new(0.0, 1.0)).unwrap(),
            Cone2::half_plane(Point2::new(0.0, 1.0)).unwrap(),
        ),
    ];
    for _ in 0..1_000 {
        let info = random_spd(&mut rng);
        let w = whitening_map(&info);
        let z = normal_point(&mut rng, 2.0);
        for (c0, c1) in &pairs {
            let quad = lrs_quadratic(&info, c0, c1, z).unwrap();
            let white = lrs_between(
                &c0.transform(&w).unwrap(),
                &c1.transform(&w).unwrap(),
                w.apply(z),
            );
            assert!(
                (quad - white).abs() < 1e-10 * (1.0 + quad.abs()),
                "{quad} vs {white}"
            );
        }
    }
}

#[test]
fn metric_invariance_unit_correlation_case8() {
    let info = SymPD2::new(1.0, 0.5, 1.0).unwrap();
    let orig = CaseGeometry::original(CaseId::Case8Correct, -0.5).unwrap();
    let white = CaseGeometry::from_information(CaseId::Case8Correct, &info).unwrap();
    let w = whitening_map(&info);
    let mut rng = stream(5, 0);
    for _ in 0..1_000 {
        let z = normal_point(&mut rng, 2.0);
        let a = lrs_quadratic(&info, &orig.null_cone, &orig.alt_cone, z).unwrap();
        let b = white.lrs_whitened(w.apply(z)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
    assert_eq!(
        lrs_quadratic(&info, &orig.null_cone, &orig.alt_cone, Point2::ORIGIN).unwrap(),
        0.0
    );
}

#[test]
fn identity_information_matches_whitened_path() {
    let id = SymPD2::identity();
    let c0 = Cone2::ray(Point2::new(0.0, 1.0)).unwrap();
    let c1 = Cone2::quadrant();
    let mut rng = stream(6, 0);
    for _ in 0..1_000 {
        let z = normal_point(&mut rng, 2.0);
        assert_eq!(
            lrs_quadratic(&id, &c0, &c1, z).unwrap(),
            lrs_between(&c0, &c1, z)
        );
    }
}

/// Samples uniformly in angle inside the given region until `count` hits.
fn points_in(geom: &CaseGeometry, region: Region, count: usize, seed: u64) -> Vec<Point2> {
    let mut rng = stream(seed, region as u64);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 200 * count {
        tries += 1;
        let z = Point2::from_angle(rng.random::<f64>() * TAU) * (0.05 + 4.0 * rng.random::<f64>());
        if geom.classify(z).region == region {
            out.push(z);
        }
    }
    out
}

#[test]
fn closed_forms_match_engine_case8_correct() {
    for &rho in &[0.2, 0.5, 0.8, -0.2, -0.5, -0.8] {
        let geom = CaseGeometry::new(CaseId::Case8Correct, rho).unwrap();
        for region in Region::CASE8 {
            let pts = points_in(&geom, region, 10_000, 7);
            if rho < 0.0 && region == Region::R1 {
                assert!(pts.is_empty());
                continue;
            }
            assert_eq!(pts.len(), 10_000, "rho={rho} region {region}");
            for z in pts {
                let label = geom.classify(z);
                let engine = geom.lrs_whitened(z).unwrap();
                let closed = region_statistic(&geom, z, label).unwrap();
                assert!((engine - closed).abs() < 1e-10, "rho={rho} {region} {z:?}");
                if matches!(region, Region::R3 | Region::R4 | Region::R5) {
                    assert!(engine.abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_engine_case7() {
    for &rho in &[-0.9, -0.3, 0.0, 0.4, 0.9] {
        let geom = CaseGeometry::new(CaseId::Case7, rho).unwrap();
        for region in Region::CASE7 {
            let pts = points_in(&geom, region, 10_000, 8);
            assert_eq!(pts.len(), 10_000);
            for z in pts {
                let engine = geom.lrs_whitened(z).unwrap();
                let closed = region_statistic(&geom, z, geom.classify(z)).unwrap();
                assert!((engine - closed).abs() < 1e-10, "rho={rho} {region}");
            }
        }
    }
}

#[test]
fn negative_rho_characterizations() {
    for &rho in &[-0.2, -0.5, -0.8] {
        let geom = CaseGeometry::new(CaseId::Case8Correct, rho).unwrap();
        let v = geom.axes()[1];
        let u = Point2::new(v.y, -v.x);
        let mut rng = stream(9, 0);
        let mut in_cone = 0;
        let mut in_r6 = 0;
        for _ in 0..10_000 {
            let z = normal_point(&mut rng, 1.0);
            let lrs = geom.lrs_whitened(z).unwrap();
            let full = z.norm_sq();
            let (a2, b2) = (z.dot(u).powi(2), z.dot(v).powi(2));
            // The chi-squared(2) branch never appears.
            assert!((lrs - full).abs() > 1e-12 || z.dot(v).abs() < 1e-6);
            if geom.alt_cone.contains(z) {
                in_cone += 1;
                assert!((lrs - a2).abs() < 1e-10);
            }
            if geom.classify(z).region == Region::R6 {
                in_r6 += 1;
                for form in [0.0, a2, b2, full] {
                    assert!((lrs - form).abs() > 1e-9, "rho={rho} z={z:?}");
                }
            }
        }
        assert!(
            in_cone > 500 && in_r6 > 1000,
            "rho={rho}: {in_cone} {in_r6}"
        );
    }
}

#[test]
fn selfliang_reconciled_list_matches_engine() {
    for &rho in &[0.0, 0.2, 0.5, 0.8] {
        let geom = CaseGeometry::new(CaseId::Case8Selfliang, rho).unwrap();
        let mut pts = Vec::new();
        for region in Region::CASE8 {
            let p = points_in(&geom, region, 10_000, 10);
            if rho > 0.0 || region != Region::R1 && region != Region::R4 {
                assert_eq!(p.len(), 10_000, "rho={rho} region {region}");
            }
            pts.extend(p);
        }
        let audit = audit_selfliang(rho, &pts).unwrap();
        for (region, n, reconciled, _literal) in &audit.regions {
            assert!(
                *reconciled < 1e-8,
                "rho={rho} region {region} n={n}: {reconciled}"
            );
        }
    }
}

#[test]
fn selfliang_literal_reading_disagrees() {
    let geom = CaseGeometry::new(CaseId::Case8Selfliang, 0.5).unwrap();
    let mut pts = Vec::new();
    for region in Region::CASE8 {
        pts.extend(points_in(&geom, region, 2_000, 11));
    }
    let audit = audit_selfliang(0.5, &pts).unwrap();
    let bad: Vec<Region> = audit
        .regions
        .iter()
        .filter(|r| r.3 > 1e-8)
        .map(|r| r.0)
        .collect();
    assert_eq!(bad, vec![Region::R3, Region::R4, Region::R6]);
}

#[test]
fn selfliang_is_never_negative() {
    let mut rng = stream(12, 0);
    for &rho in &[-0.8, -0.3, 0.3, 0.8] {
        let geom = CaseGeometry::new(CaseId::Case8Selfliang, rho).unwrap();
        for _ in 0..10_000 {
            assert!(geom.lrs_whitened(normal_point(&mut rng, 2.0)).unwrap() >= 0.0);
        }
    }
}

proptest! {
    #[test]
    fn whitened_lrs_is_nonnegative_and_bounded(
        rho in -0.99f64..0.99,
        x in -10.0f64..10.0,
        y in -10.0f64..10.0,
    ) {
        for case in [CaseId::Case7, CaseId::Case8Correct, CaseId::Case8Selfliang] {
            let geom = CaseGeometry::new(case, rho).unwrap();
            let z = Point2::new(x, y);
            let lrs = geom.lrs_whitened(z).unwrap();
            prop_assert!(lrs >= 0.0);
            prop_assert!(lrs <= z.norm_sq() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn classification_is_total_and_homogeneous(
        rho in -0.99f64..0.99,
        phi in 0.0f64..TAU,
        r in 0.01f64..100.0,
    ) {
        let geom = CaseGeometry::new(CaseId::Case8Correct, rho).unwrap();
        let z = Point2::from_angle(phi);
        prop_assert_eq!(geom.classify(z), geom.classify(z * r));
    }
}
