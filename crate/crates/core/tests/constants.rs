use approx::assert_relative_eq;
use hopial::constants::{beesack_das_balance, hardy_constant, ExponentSet, TheoremId};
use hopial::funcspace::{FunctionSpec, Interval};
use hopial::special::{boyd_l, boyd_n, BoydParams};
use hopial::Mode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit() -> Interval {
    Interval::unit()
}

fn one() -> FunctionSpec {
    FunctionSpec::constant(1.0)
}

fn constant(id: TheoremId, r: &FunctionSpec, s: Option<&FunctionSpec>) -> f64 {
    hardy_constant(id, r, s, &id.default_exponents(), &unit(), id.default_mode())
        .unwrap()
        .value
}

/// Weight symmetric about 1/2: a tent with a random apex height plus a floor.
fn symmetric_weight(rng: &mut ChaCha8Rng) -> FunctionSpec {
    let lo = rng.gen_range(0.2..1.0);
    let mid = rng.gen_range(0.2..2.0);
    let q = rng.gen_range(0.1..0.45);
    let v = rng.gen_range(0.2..2.0);
    FunctionSpec::piecewise_linear(&[(0.0, lo), (q, v), (0.5, mid), (1.0 - q, v), (1.0, lo)])
}

#[test]
fn mirror_pairs_agree_on_symmetric_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs = [
        (TheoremId::T2_1, TheoremId::T2_2),
        (TheoremId::T2_3, TheoremId::T2_4),
        (TheoremId::T2_5, TheoremId::T2_6),
        (TheoremId::T2_9, TheoremId::T2_10),
        (TheoremId::T2_11, TheoremId::T2_12),
    ];
    for case in 0..20 {
        let r = symmetric_weight(&mut rng);
        let s = symmetric_weight(&mut rng);
        for (odd, even) in pairs {
            let s_arg = odd.uses_s().then_some(&s);
            let a = constant(odd, &r, s_arg);
            let b = constant(even, &r, s_arg);
            assert_relative_eq!(a, b, max_relative = 1e-8);
            assert!(a > 0.0, "case {case}: {odd} constant {a}");
        }
    }
}

#[test]
fn mirror_is_an_involution() {
    for &id in TheoremId::ALL {
        if let Some(m) = id.mirror() {
            assert_eq!(m.mirror(), Some(id));
            assert_ne!(m.side(), id.side());
        }
    }
}

#[test]
fn weight_scaling_laws() {
    let r = FunctionSpec::power(1.3, 0.7);
    let s = FunctionSpec::exponential(0.8, 0.4);
    let c = 2.5;
    let cr = FunctionSpec::power(1.3 * c, 0.7);
    assert_relative_eq!(
        constant(TheoremId::T2_1, &cr, Some(&s)),
        c * c * constant(TheoremId::T2_1, &r, Some(&s)),
        max_relative = 1e-9
    );
    for id in [TheoremId::T2_3, TheoremId::T2_5, TheoremId::T2_11] {
        let s_arg = id.uses_s().then_some(&s);
        assert_relative_eq!(
            constant(id, &cr, s_arg),
            c * constant(id, &r, s_arg),
            max_relative = 1e-9
        );
    }
}

#[test]
fn factors_multiply_to_the_value() {
    let r = FunctionSpec::power(1.0, 0.5);
    let s = FunctionSpec::power(2.0, 0.3);
    for &id in TheoremId::ALL {
        for mode in [Mode::AsPrinted, Mode::AsDerived] {
            let Ok(c) = hardy_constant(
                id,
                &r,
                id.uses_s().then_some(&s),
                &id.default_exponents(),
                &unit(),
                mode,
            ) else {
                continue;
            };
            let prod: f64 = c.factors.iter().map(|(_, v)| v).product();
            assert_relative_eq!(c.value, prod, max_relative = 1e-12);
            assert_eq!(c.mode, mode);
        }
    }
}

#[test]
fn modes_agree_outside_the_ledger() {
    let r = FunctionSpec::power(1.2, 0.4);
    let s = FunctionSpec::power(0.9, 0.6);
    for &id in TheoremId::ALL {
        if id.has_discrepancy() {
            continue;
        }
        let s_arg = id.uses_s().then_some(&s);
        let e = id.default_exponents();
        let a = hardy_constant(id, &r, s_arg, &e, &unit(), Mode::AsPrinted).unwrap();
        let b = hardy_constant(id, &r, s_arg, &e, &unit(), Mode::AsDerived).unwrap();
        assert_eq!(a.value, b.value, "{id}");
    }
}

#[test]
fn sup_constants_grow_with_the_interval() {
    let r = FunctionSpec::exponential(1.0, -0.5);
    let small = Interval::new(0.0, 1.0).unwrap();
    let large = Interval::new(0.0, 1.5).unwrap();
    for id in [TheoremId::T2_3, TheoremId::T2_4, TheoremId::T2_11, TheoremId::T2_12] {
        let e = id.default_exponents();
        let a = hardy_constant(id, &r, None, &e, &small, Mode::AsPrinted).unwrap().value;
        let b = hardy_constant(id, &r, None, &e, &large, Mode::AsPrinted).unwrap().value;
        assert!(b >= a, "{id}: {b} < {a}");
    }
}

#[test]
fn analytic_examples() {
    assert_relative_eq!(
        constant(TheoremId::T2_1, &one(), Some(&one())),
        1.0 / 3.0,
        max_relative = 1e-12
    );
    assert_relative_eq!(constant(TheoremId::T2_3, &one(), None), 1.0, max_relative = 1e-12);
    assert_relative_eq!(constant(TheoremId::Hardy, &one(), None), 4.0, max_relative = 1e-12);
    // L^{1/2}(4, 2) · (∫(1-x)^2)^{1/2} with the derived L.
    let c = hardy_constant(
        TheoremId::T2_22,
        &one(),
        None,
        &ExponentSet::new(2.0),
        &unit(),
        Mode::AsDerived,
    )
    .unwrap();
    let l = boyd_l(4.0, 2.0).unwrap();
    assert_relative_eq!(c.value, l.sqrt() * (1.0f64 / 3.0).sqrt(), max_relative = 1e-9);
}

#[test]
fn boyd_overlap_values() {
    let n = boyd_n(&BoydParams::new(1.0, 1.0, 2.0).unwrap()).unwrap();
    assert_relative_eq!(n.value, 0.5, epsilon = 1e-9);
    assert_relative_eq!(boyd_l(1.0, 1.0).unwrap(), 0.5, epsilon = 1e-12);
    assert_relative_eq!(boyd_l(2.0, 1.0).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
}

#[test]
fn symmetric_balance_point() {
    let (h, k) = beesack_das_balance(&ExponentSet::new(1.0).with_q(1.0), &one(), &one(), &unit(), 1e-10).unwrap();
    assert_relative_eq!(h, 0.5, epsilon = 1e-8);
    assert_relative_eq!(k, 0.25, epsilon = 1e-6);
}

#[test]
fn printed_beesack_constant_is_vacuous() {
    let e = ExponentSet::new(2.0).with_k(3.0);
    let err = hardy_constant(TheoremId::T2_30, &one(), Some(&one()), &e, &unit(), Mode::AsPrinted).unwrap_err();
    assert!(err.to_string().contains("vacuous"));
    assert!(hardy_constant(TheoremId::T2_30, &one(), Some(&one()), &e, &unit(), Mode::AsDerived).is_ok());
}

#[test]
fn divergent_weights_are_reported() {
    // s = x^3 makes ∫ s^{-1/2} diverge at 0.
    let s = FunctionSpec::power(1.0, 3.0);
    let id = TheoremId::T2_14;
    let err = hardy_constant(id, &one(), Some(&s), &id.default_exponents(), &unit(), Mode::AsPrinted).unwrap_err();
    assert!(matches!(err, hopial::Error::NonIntegrable(_)), "{err:?}");
}
