use std::f64::consts::PI;

use approx::assert_relative_eq;
use cpwall::casimir::{electric_cp_closed, electric_cp_quadrature, magnetic_cp_closed, magnetic_cp_quadrature};
use cpwall::fields::{
    dynamic_electric_density, electric_transient, isotropic_electric_density, isotropic_magnetic_density,
    static_electric_density, static_electric_density_with, static_magnetic_density_with, DensityOptions,
};
use cpwall::geometry::{derive_frame, AtomSource};
use cpwall::Error;

// Independent evaluation of the transient integral with an adaptive
// Gauss-Kronrod routine over (0, inf).
const TRANSIENT_REFERENCE: [([f64; 3], f64, f64); 3] = [
    ([0.0, 1.0, 9.0], f64::NAN, 3.721947946377779e-4),
    ([0.0, 0.0, 9.0], 22.0, 1.7277380613593346e-7),
    ([0.0, 0.0, 9.0], 100.0, -1.4993834602076508e-9),
];

#[test]
fn transient_matches_reference_values() {
    let atom = AtomSource::isotropic(2.0, 1.0).unwrap();
    for (point, t, want) in TRANSIENT_REFERENCE {
        let frame = derive_frame(point, &atom).unwrap();
        let t = if t.is_nan() { 1.3 * frame.r1 } else { t };
        let got = electric_transient(&frame, &atom, t, &DensityOptions::default()).unwrap();
        assert_relative_eq!(got.total, want, max_relative = 1e-8);
    }
}

#[test]
fn dynamic_density_vanishes_before_arrival() {
    let atom = AtomSource::isotropic(2.0, 1.0).unwrap();
    let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
    let early = dynamic_electric_density(&frame, &atom, 0.5 * frame.r0).unwrap();
    assert_eq!(early.total, 0.0);
    let between = dynamic_electric_density(&frame, &atom, 0.5 * (frame.r0 + frame.r1)).unwrap();
    assert_eq!(between.image, 0.0);
    assert_eq!(between.cross, 0.0);
    assert!(between.direct != 0.0);
}

#[test]
fn wavefront_is_rejected() {
    let atom = AtomSource::isotropic(2.0, 1.0).unwrap();
    let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
    for t in [frame.r0, frame.r1] {
        assert!(matches!(dynamic_electric_density(&frame, &atom, t), Err(Error::Wavefront { .. })));
    }
    assert!(matches!(dynamic_electric_density(&frame, &atom, -1.0), Err(Error::NegativeTime(_))));
}

#[test]
fn image_part_is_direct_part_of_mirrored_point() {
    // a tangential dipole is mirrored onto itself up to sign
    for mu in [[1.0, 0.0, 0.0], [0.0, 0.7, 0.0], [0.6, -0.3, 0.0]] {
        let atom = AtomSource::oriented(1.5, mu).unwrap();
        let p = [0.8, -0.4, 4.0];
        let frame = derive_frame(p, &atom).unwrap();
        let mirrored = derive_frame([p[0], p[1], p[2] + 2.0 * atom.d], &atom).unwrap();
        let opts = DensityOptions::default();
        let here = static_electric_density_with(&frame, &atom, &opts).unwrap();
        let there = static_electric_density_with(&mirrored, &atom, &opts).unwrap();
        assert_relative_eq!(here.image, there.direct, max_relative = 1e-9);
        let here = static_magnetic_density_with(&frame, &atom, &opts).unwrap();
        let there = static_magnetic_density_with(&mirrored, &atom, &opts).unwrap();
        assert_relative_eq!(here.image, there.direct, max_relative = 1e-9);
    }
}

#[test]
fn wall_at_infinity_recovers_free_space() {
    let atom = AtomSource::isotropic(1e6, 1.0).unwrap();
    let frame = derive_frame([0.0, 6.0, 1e6], &atom).unwrap();
    let e = electric_cp_quadrature(&frame, &atom, 1.0).unwrap();
    assert_relative_eq!(e.total, -23.0 * 2.0 / (4.0 * PI * 6f64.powi(7)), max_relative = 1e-9);
    let m = magnetic_cp_quadrature(&frame, &atom, 1.0).unwrap();
    assert_relative_eq!(m.total, 7.0 * 2.0 / (4.0 * PI * 6f64.powi(7)), max_relative = 1e-9);
}

#[test]
fn late_time_density_settles_to_stationary_value() {
    let atom = AtomSource::isotropic(2.0, 1.0).unwrap();
    let frame = derive_frame([1.0, 0.0, 7.0], &atom).unwrap();
    let stationary = static_electric_density(&frame, &atom).unwrap();
    let late = dynamic_electric_density(&frame, &atom, 1e4 * frame.r1).unwrap();
    assert_relative_eq!(late.total, stationary.total, max_relative = 1e-3);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn far_geometry() -> impl Strategy<Value = (f64, [f64; 3])> {
        (0.5f64..10.0, -30.0f64..30.0, -30.0f64..30.0, 0.05f64..40.0)
            .prop_filter("far zone", |(d, x, y, z)| (x * x + y * y + (z - d) * (z - d)).sqrt() >= 5.0)
            .prop_map(|(d, x, y, z)| (d, [x, y, z]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn quadrature_agrees_with_closed_form((d, p) in far_geometry(), m in 0.2f64..2.0) {
            let atom = AtomSource::isotropic(d, m).unwrap();
            let frame = derive_frame(p, &atom).unwrap();
            let alpha = 2.0 * m * m;
            let eq = electric_cp_quadrature(&frame, &atom, 1.0).unwrap();
            let ec = electric_cp_closed(&frame, alpha, 1.0);
            prop_assert!((eq.total - ec.total).abs() <= 1e-8 * ec.total.abs());
            prop_assert!(eq.total < 0.0);
            let mq = magnetic_cp_quadrature(&frame, &atom, 1.0).unwrap();
            let mc = magnetic_cp_closed(&frame, alpha, 1.0);
            prop_assert!((mq.total - mc.total).abs() <= 1e-8 * mc.direct.abs());
        }

        #[test]
        fn radial_forms_match_tensor_route(d in 0.5f64..5.0, x in -5.0f64..5.0, z in 0.1f64..8.0) {
            let atom = AtomSource::isotropic(d, 1.0).unwrap();
            let Ok(frame) = derive_frame([x, 0.3, z], &atom) else { return Ok(()) };
            prop_assume!(frame.r0 > 0.3);
            let opts = DensityOptions::default();
            let radial = isotropic_electric_density(&frame, &atom, &opts).unwrap();
            let tensor = static_electric_density_with(&frame, &atom, &opts).unwrap();
            prop_assert!((radial.total - tensor.total).abs() <= 1e-8 * radial.direct.abs());
            let radial = isotropic_magnetic_density(&frame, &atom, &opts).unwrap();
            let tensor = static_magnetic_density_with(&frame, &atom, &opts).unwrap();
            prop_assert!((radial.total - tensor.total).abs() <= 1e-8 * radial.direct.abs());
        }

        #[test]
        fn density_scales_with_dipole_squared(d in 0.5f64..5.0, z in 0.1f64..8.0, m in 0.1f64..3.0) {
            let p = [0.4, -0.2, z];
            let unit = AtomSource::oriented(d, [0.3, 0.5, -0.8]).unwrap();
            let scaled = AtomSource::oriented(d, [0.3 * m, 0.5 * m, -0.8 * m]).unwrap();
            let Ok(frame) = derive_frame(p, &unit) else { return Ok(()) };
            prop_assume!(frame.r0 > 0.3);
            let opts = DensityOptions::default();
            let a = static_electric_density_with(&frame, &unit, &opts).unwrap();
            let b = static_electric_density_with(&frame, &scaled, &opts).unwrap();
            prop_assert!((b.total - m * m * a.total).abs() <= 1e-9 * (m * m * a.direct).abs());
        }

        #[test]
        fn static_parts_have_fixed_signs(d in 0.5f64..5.0, x in -5.0f64..5.0, z in 0.1f64..8.0,
                                         mu in prop::array::uniform3(-1.0f64..1.0)) {
            prop_assume!(mu.iter().any(|c| c.abs() > 1e-3));
            let atom = AtomSource::oriented(d, mu).unwrap();
            let Ok(frame) = derive_frame([x, 0.1, z], &atom) else { return Ok(()) };
            prop_assume!(frame.r0 > 0.3);
            let opts = DensityOptions::default();
            let e = static_electric_density_with(&frame, &atom, &opts).unwrap();
            let m = static_magnetic_density_with(&frame, &atom, &opts).unwrap();
            prop_assert!(e.direct >= 0.0 && e.image >= 0.0);
            prop_assert!(m.direct <= 0.0 && m.image <= 0.0);
            prop_assert_eq!(e.total, e.direct + e.image + e.cross);
        }
    }
}
