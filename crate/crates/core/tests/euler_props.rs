use cartwing::euler::*;
use proptest::prelude::*;

const GAS: GasModel = GasModel { gamma: 1.4 };

fn states() -> impl Strategy<Value = PrimitiveState> {
    (0.05f64..10.0, -5.0f64..5.0, -5.0f64..5.0, 0.05f64..10.0)
        .prop_map(|(r, u, v, p)| PrimitiveState::new(r, u, v, p))
}

proptest! {
    #[test]
    fn primitive_conserved_round_trip(p in states()) {
        let back = conserved_to_primitive(primitive_to_conserved(p, GAS).unwrap(), GAS).unwrap();
        for (a, b) in [(p.rho, back.rho), (p.u, back.u), (p.v, back.v), (p.p, back.p)] {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn left_and_right_eigenvectors_are_inverse(p in states(), y_axis in any::<bool>()) {
        let axis = if y_axis { Axis::Y } else { Axis::X };
        let e = eigensystem(primitive_to_conserved(p, GAS).unwrap(), GAS, axis).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..4).map(|k| e.left[a][k] * e.right[k][b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() < 1e-9, "L R [{a}][{b}] = {dot}");
            }
        }
    }

    #[test]
    fn right_eigenvectors_match_finite_difference_jacobian(p in states(), y_axis in any::<bool>()) {
        let axis = if y_axis { Axis::Y } else { Axis::X };
        let u = primitive_to_conserved(p, GAS).unwrap();
        let e = eigensystem(u, GAS, axis).unwrap();
        let base = u.to_array();
        for col in 0..4 {
            let r = e.right_column(col);
            // directional derivative of the flux along r by central differences
            let step = 1e-6 / (1.0 + r.iter().map(|v| v.abs()).fold(0.0, f64::max));
            let shift = |s: f64| ConservedState::from_array(std::array::from_fn(|c| base[c] + s * r[c]));
            let fp = physical_flux(shift(step), GAS, axis).unwrap();
            let fm = physical_flux(shift(-step), GAS, axis).unwrap();
            for c in 0..4 {
                let jr = (fp[c] - fm[c]) / (2.0 * step);
                let lr = e.eigenvalues[col] * r[c];
                prop_assert!((jr - lr).abs() < 1e-5 * (1.0 + lr.abs()), "column {col}, row {c}: {jr} vs {lr}");
            }
        }
    }

    #[test]
    fn axis_swap_symmetry(p in states()) {
        let u = primitive_to_conserved(p, GAS).unwrap();
        let fy = physical_flux(u.swapped(), GAS, Axis::Y).unwrap();
        let fx = physical_flux(u, GAS, Axis::X).unwrap();
        prop_assert_eq!(fy, [fx[0], fx[2], fx[1], fx[3]]);
    }
}

#[test]
fn unphysical_states_are_rejected() {
    assert!(conserved_to_primitive(ConservedState::new(-1.0, 0.0, 0.0, 1.0), GAS).is_err());
    assert!(conserved_to_primitive(ConservedState::new(1.0, 3.0, 0.0, 1.0), GAS).is_err());
    assert!(GasModel::new(1.0).is_err());
}
