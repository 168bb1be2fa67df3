mod common;

use common::*;
use proptest::prelude::*;
use ttc_core::first_order_ttc;

fn arb_rigid() -> impl Strategy<Value = (f64, Vec2)> {
    (-std::f64::consts::PI..std::f64::consts::PI, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(a, x, y)| (a, Vec2::new(x, y)))
}

proptest! {
    #![proptest_config(proptest_config(0x7269_6731))]

    #[test]
    fn first_order_rigid_motion(si in arb_state(), sj in arb_state(), (angle, shift) in arb_rigid()) {
        prop_verdict(checks::rigid_first_order(&si, &sj, angle, shift))?;
    }

    #[test]
    fn second_order_rigid_motion(si in arb_state(), sj in arb_state(), (angle, shift) in arb_rigid()) {
        prop_verdict(checks::rigid_second_order(&si, &sj, angle, shift))?;
    }

    /// Adding the same velocity to both vehicles leaves the first-order TTC
    /// unchanged.
    #[test]
    fn first_order_galilean(si in arb_state(), sj in arb_state(), wx in -5.0..5.0f64, wy in -5.0..5.0f64) {
        prop_verdict(checks::galilean(&si, &sj, Vec2::new(wx, wy)))?;
    }

    /// The library's first-order TTC matches the textbook quadratic.
    #[test]
    fn first_order_matches_reference(si in arb_state(), sj in arb_state()) {
        let got = first_order_ttc(&si, &sj, PHI).time();
        let want = first_order_reference(&si, &sj, PHI);
        match (got, want) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y)),
            (None, None) => {}
            // tangency: the discriminant sits at zero
            (x, y) => {
                let dp = si.p - sj.p;
                let dv = si.v - sj.v;
                let disc = dp.dot(dv).powi(2) - dv.norm_sq() * (dp.norm_sq() - PHI * PHI);
                prop_assert!(disc.abs() < 1e-9, "{x:?} vs {y:?}");
            }
        }
    }
}
