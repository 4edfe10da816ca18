use hopial::constants::{ExponentSet, Side};
use hopial::funcspace::{FunctionSpec, Interval};
use hopial::opial::{verify_variant, LemmaInstance, OpialVariant, TestPath};
use hopial::verify::Status;
use hopial::Mode;
use proptest::prelude::*;

fn path(values: &[f64], pin_left: bool, pin_right: bool) -> TestPath {
    let n = values.len() + 1;
    let mut knots = vec![(0.0, if pin_left { 0.0 } else { values[0] })];
    for (i, &v) in values.iter().enumerate() {
        knots.push(((i + 1) as f64 / n as f64, v));
    }
    knots.push((1.0, if pin_right { 0.0 } else { values[values.len() - 1] }));
    TestPath::new(FunctionSpec::piecewise_linear(&knots), Interval::unit()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn opial_holds_for_paths_vanishing_at_both_ends(values in prop::collection::vec(0.0f64..2.0, 3)) {
        let rec = verify_variant(&LemmaInstance::new(OpialVariant::Opial, path(&values, true, true))).unwrap();
        prop_assert!(rec.status == Status::Holds, "{rec:?}");
    }

    #[test]
    fn left_anchored_lemmas_hold(values in prop::collection::vec(0.0f64..2.0, 3), p in 1u32..5) {
        let y = path(&values, true, false);
        let checks = [
            LemmaInstance::new(OpialVariant::B1, y.clone()).with_mode(Mode::AsDerived),
            LemmaInstance::new(OpialVariant::H1, y.clone()).with_exponents(ExponentSet::new(p as f64)),
            LemmaInstance::new(OpialVariant::Y1, y.clone()),
        ];
        for inst in checks {
            let rec = verify_variant(&inst).unwrap();
            prop_assert!(rec.status == Status::Holds, "{rec:?}");
        }
    }

    #[test]
    fn weighted_lemmas_hold(values in prop::collection::vec(0.0f64..2.0, 3), ra in 0.0f64..0.9) {
        let y = path(&values, true, false);
        let r = FunctionSpec::exponential(1.0, ra);
        for v in [OpialVariant::B2, OpialVariant::M1, OpialVariant::AG] {
            let mut inst = LemmaInstance::new(v, y.clone());
            if v.uses_r() {
                inst = inst.with_r(r.clone());
            }
            if v.uses_s() {
                inst = inst.with_s(r.clone());
            }
            let rec = verify_variant(&inst).unwrap();
            prop_assert!(rec.status == Status::Holds, "{v}: {rec:?}");
        }
    }
}

#[test]
fn equality_witnesses() {
    let hat = TestPath::hat(Interval::unit(), 0.5, 0.5).unwrap();
    let lin = TestPath::linear(Interval::unit(), Side::Left).unwrap();
    for inst in [
        LemmaInstance::new(OpialVariant::Opial, hat),
        LemmaInstance::new(OpialVariant::B1, lin.clone()),
        LemmaInstance::new(OpialVariant::H1, lin).with_exponents(ExponentSet::new(2.0)),
    ] {
        let rec = verify_variant(&inst).unwrap();
        assert!((rec.ratio - 1.0).abs() <= 1e-8, "{rec:?}");
        assert_eq!(rec.status, Status::Holds);
    }
}

#[test]
fn reflection_swaps_the_anchored_end() {
    let y = path(&[0.3, 1.2, 0.8], true, false);
    let z = y.reflected().unwrap();
    assert!(z.vanishes_right && !z.vanishes_left);
    let a = verify_variant(&LemmaInstance::new(OpialVariant::H1, y)).unwrap();
    let b = verify_variant(&LemmaInstance::new(OpialVariant::H1, z)).unwrap();
    assert!((a.ratio - b.ratio).abs() < 1e-10);
}

#[test]
fn missing_anchor_is_a_precondition_failure() {
    let free = path(&[0.3, 1.2, 0.8], false, false);
    let err = verify_variant(&LemmaInstance::new(OpialVariant::H1, free)).unwrap_err();
    assert!(matches!(err, hopial::Error::PreconditionFailed(_)));
}
