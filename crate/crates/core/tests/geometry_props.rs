use cartwing::geometry::*;
use proptest::prelude::*;

fn brute_force_distance(profile: &NacaProfile, p: Point) -> f64 {
    let n = 40_000;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        // cluster samples at the leading edge where curvature is large
        let s = k as f64 / n as f64;
        let xc = s * s;
        for upper in [true, false] {
            let q = surface_point(profile, xc, upper);
            best = best.min((q[0] - p[0]).hypot(q[1] - p[1]));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn airfoil_foot_is_the_sampled_minimizer(x in -0.2f64..1.2, y in -0.3f64..0.3) {
        let d = DomainSpec::default();
        let profile = d.profile.unwrap();
        let foot = d.closest_on_airfoil([x, y]).unwrap();
        let got = (foot.point[0] - x).hypot(foot.point[1] - y);
        let reference = brute_force_distance(&profile, [x, y]);
        prop_assert!(got <= reference + 1e-9, "{got} vs {reference}");
        prop_assert!(reference - got < 1e-6, "{got} vs {reference}");
    }

    #[test]
    fn feet_mirror_under_reflection(x in -0.2f64..1.2, y in 0.001f64..0.3) {
        let d = DomainSpec::default();
        let a = d.closest_boundary_point([x, y]);
        let b = d.closest_boundary_point([x, -y]);
        prop_assert!((a.point[0] - b.point[0]).abs() < 1e-9);
        prop_assert!((a.point[1] + b.point[1]).abs() < 1e-9);
        prop_assert!((a.normal[0] - b.normal[0]).abs() < 1e-6);
        prop_assert!((a.normal[1] + b.normal[1]).abs() < 1e-6);
    }

    #[test]
    fn normals_are_unit_and_point_into_the_fluid(x in 0.01f64..0.99, y in -0.05f64..0.05) {
        let d = DomainSpec::default();
        prop_assume!(d.contains([x, y]) == Region::ExteriorAirfoil);
        let foot = d.closest_boundary_point([x, y]);
        let [nx, ny] = foot.normal;
        prop_assert!(((nx * nx + ny * ny).sqrt() - 1.0).abs() < 1e-12);
        // tangent is the normal turned by +90 degrees
        prop_assert!((foot.tangent[0] + ny).abs() < 1e-15 && (foot.tangent[1] - nx).abs() < 1e-15);
        // from a body point the normal runs from P towards P0 and beyond into the fluid
        let dist = (foot.point[0] - x).hypot(foot.point[1] - y);
        if dist > 1e-9 {
            let dir = [(foot.point[0] - x) / dist, (foot.point[1] - y) / dist];
            prop_assert!(dir[0] * nx + dir[1] * ny > 0.999);
        }
        let probe = [foot.point[0] + 1e-4 * nx, foot.point[1] + 1e-4 * ny];
        prop_assert_eq!(d.contains(probe), Region::Interior);
    }
}

#[test]
fn box_feet_for_outside_points() {
    let d = DomainSpec::box_only(0.0, 1.0, 0.0, 1.0);
    let f = d.closest_boundary_point([-0.1, 0.4]);
    assert_eq!(f.point, [0.0, 0.4]);
    assert_eq!(f.normal, [1.0, 0.0]);
    assert_eq!(f.component, BoundaryComponent::Left);
    let f = d.closest_boundary_point([0.5, 1.2]);
    assert_eq!(f.normal, [0.0, -1.0]);
    assert_eq!(f.component, BoundaryComponent::Top);
}
