//! Randomized invariants of the closed-form geometry layer and the
//! matrix text format.

use kerr_rkg::geometry::{
    killing_norm, metric_components, mu_bounds, region_membership, scalars, special_s,
    KerrParams, Point,
};
use kerr_rkg::{matio, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Admissible (params, point) pairs: M = 1, a in [0, 1], r above the
/// horizon by a horizon-scaled offset, theta strictly interior.
fn param_point() -> impl Strategy<Value = (KerrParams, Point)> {
    (0.0..=1.0f64, 1e-6..3.0f64, 1e-3..(std::f64::consts::PI - 1e-3))
        .prop_map(|(a, dr, theta)| {
            let p = KerrParams::new(1.0, a).unwrap();
            let q = Point::new(&p, p.r_plus + dr, theta).unwrap();
            (p, q)
        })
}

proptest! {
    #[test]
    fn sigma_bar_forms_agree((p, q) in param_point()) {
        let s = scalars(&p, &q);
        let scale = s.sigma_bar_1.abs();
        prop_assert!((s.sigma_bar_1 - s.sigma_bar_2).abs() <= 1e-11 * scale);
        prop_assert!((s.sigma_bar_1 - s.sigma_bar_3).abs() <= 1e-11 * scale);
        prop_assert!(s.sigma_bar_1 > 0.0);
    }

    #[test]
    fn ergoregion_iff_negative_g_tt((p, q) in param_point()) {
        let g = metric_components(&p, &q);
        let rm = region_membership(&p, &q);
        prop_assert_eq!(rm.in_ergoregion, g.g_tt < 0.0);
    }

    #[test]
    fn killing_factorization_at_special_s((p, q) in param_point()) {
        let kn = killing_norm(&p, special_s(&p), &q);
        let f = kn.factored.unwrap();
        prop_assert!((kn.direct - f).abs() <= 1e-9 * kn.direct.abs().max(1.0));
    }

    #[test]
    fn mass_bounds_ordered(a in 0.0..=1.0f64, m in -5i64..=5) {
        let p = KerrParams::new(1.0, a).unwrap();
        let b = mu_bounds(&p, m);
        prop_assert!(b.mu_new <= b.mu_old);
        prop_assert!(b.alpha <= 0.0);
        if m != 0 && a > 0.0 {
            prop_assert!(b.mu_new < b.mu_old);
            prop_assert!(b.mu_new > 0.0);
        }
    }

    #[test]
    fn point_rejects_exterior(a in 0.0..=1.0f64, r in -1.0..10.0f64) {
        let p = KerrParams::new(1.0, a).unwrap();
        if r <= p.r_plus {
            prop_assert!(Point::new(&p, r, 1.0).is_err());
        }
    }

    #[test]
    fn matrix_text_roundtrip(entries in proptest::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 6)) {
        let m = DMatrix::from_fn(2, 3, |i, j| {
            let (re, im) = entries[3 * i + j];
            C64::new(re, im)
        });
        let back = matio::read_matrix(&matio::write_matrix(&m)).unwrap();
        prop_assert_eq!(m, back);
    }
}
