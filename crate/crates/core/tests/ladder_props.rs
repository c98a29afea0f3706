mod common;

use common::*;
use proptest::prelude::*;
use resonance_core::ladder::{
    closed_form, parse_rational, plan_ladder, Integrability, LadderCase, RegularityClass, StepCount,
};

fn j0_of(steps: StepCount) -> Option<u32> {
    match steps {
        StepCount::Trivial => None,
        StepCount::Steps(j) => Some(j),
    }
}

proptest! {
    #[test]
    fn integrable_ladders_match_reciprocal_oracle(dim in 5i128..=60, num in 1i128..400, den in 1i128..40) {
        // Map num/den onto p > N/2.
        let p = q(dim, 2) + q(num, den);
        let ladder = plan_ladder(dim as u32, Integrability::Lp(p)).unwrap();
        let high = p > Q::from_integer(dim);
        let step = if high { step_high_p(dim, p) } else { step_mid_p(dim, p) };
        let oracle = reciprocal_ladder(dim, step);
        prop_assert_eq!(&ladder.exponents, &oracle);
        prop_assert_eq!(
            ladder.case,
            if high { LadderCase::IntegrableHighP } else { LadderCase::IntegrableMidP }
        );
        let ratio = if high { ratio_high_p(dim, p) } else { ratio_mid_p(dim, p) };
        prop_assert_eq!(j0_of(ladder.j0), floor_rule(ratio));
        for (i, r) in ladder.exponents.iter().enumerate() {
            prop_assert_eq!(closed_form(i as u32, Integrability::Lp(p), dim as u32, ladder.case).unwrap(), Some(*r));
        }
        prop_assert!(ladder.exponents.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(ladder.terminal.is_bounded());
    }

    #[test]
    fn rational_text_round_trips(num in -10_000i128..10_000, den in 1i128..500) {
        let r = q(num, den);
        prop_assert_eq!(parse_rational(&format!("{num}/{den}")).unwrap(), r);
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn inadmissible_exponents_are_rejected(dim in 5i128..=40, num in 1i128..100, den in 1i128..10) {
        let p = q(dim, 2) - q(num, den);
        prop_assume!(p > q(0, 1));
        prop_assert!(plan_ladder(dim as u32, Integrability::Lp(p)).is_err());
    }
}

#[test]
fn n12_json_schema() {
    let ladder = plan_ladder(12, Integrability::Vanishing).unwrap();
    let json = serde_json::to_value(&ladder).unwrap();
    assert_eq!(json["exponents"], serde_json::json!([[2, 1], [3, 1], [6, 1]]));
    assert_eq!(json["j0"], 1);
    // The last rung lands exactly on N/2, so a tail exponent 3/2·6 follows.
    assert_eq!(json["tail"], serde_json::json!([9, 1]));
    assert!(json["case"].is_string());
    assert!(json["terminal"].is_string());
    for factor in json["chain"].as_array().unwrap() {
        assert!(factor["kind"].is_string());
        assert!(factor["args"].is_array());
        assert!(factor["value"].is_null());
    }
}

#[test]
fn trivial_j0_serializes_as_string() {
    let ladder = plan_ladder(4, Integrability::Lp(q(9, 1))).unwrap();
    let json = serde_json::to_value(&ladder).unwrap();
    assert_eq!(json["j0"], "trivial");
}

#[test]
fn low_dimensions_skip_the_ladder() {
    for dim in 1..=3 {
        let ladder = plan_ladder(dim, Integrability::Lp(q(2, 1))).unwrap();
        assert_eq!(ladder.case, LadderCase::LowDim);
        if dim == 2 {
            assert_eq!(ladder.terminal, RegularityClass::LqAll);
        } else {
            assert!(ladder.terminal.is_bounded());
        }
    }
}
