//! Opial-type lemmas checked directly on test paths `y`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{beesack_k, check_positive_weight, ExponentSet, Side};
use crate::error::{Error, Result};
use crate::funcspace::{ClosedForm, FunctionSpec, Interval};
use crate::quad::{self, Accuracy, Shape};
use crate::verify::{classify, Status};
use crate::{eigen, special, Estimate, Mode};

macro_rules! variants {
    ($($v:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum OpialVariant {
            $(#[serde(rename = $name)] $v,)*
        }

        impl OpialVariant {
            pub const ALL: &'static [OpialVariant] = &[$(OpialVariant::$v,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(OpialVariant::$v => $name,)*
                }
            }
        }

        impl FromStr for OpialVariant {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($name => Ok(OpialVariant::$v),)*
                    _ => Err(Error::UnknownId(s.to_string())),
                }
            }
        }
    };
}

variants! {
    Opial => "OPIAL", B1 => "B1", B2 => "B2", M1 => "M1", Y => "Y", H1 => "H1",
    BW1 => "BW1", AG => "AG", Y1 => "Y1", Y2 => "Y2", Boyd => "BOYD", L0 => "L0",
    Z1 => "Z1", Z4 => "Z4", BS1 => "BS1", Bs2 => "BS2",
}

impl fmt::Display for OpialVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which endpoint conditions a lemma needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    /// `y(a) = 0`
    Left,
    /// `y(b) = 0`
    Right,
    /// `y(a) = 0` or `y(b) = 0`
    Either,
    /// `y(a) = y(b) = 0`
    Both,
}

impl OpialVariant {
    pub fn requirement(self) -> Requirement {
        use OpialVariant::*;
        match self {
            Opial => Requirement::Both,
            B1 | BW1 | Z1 | BS1 => Requirement::Left,
            Z4 | Bs2 => Requirement::Right,
            _ => Requirement::Either,
        }
    }

    pub fn uses_r(self) -> bool {
        use OpialVariant::*;
        matches!(self, B2 | M1 | Y | BW1 | Y2 | Z1 | Z4 | BS1 | Bs2)
    }

    pub fn uses_s(self) -> bool {
        use OpialVariant::*;
        matches!(self, Y | BW1 | AG | Z1 | Z4 | BS1 | Bs2)
    }

    /// Default exponents: `p` (or `ν`), `q` (or `η`), `k` (or Boyd's `s`).
    pub fn default_exponents(self) -> ExponentSet {
        use OpialVariant::*;
        let e = ExponentSet::new(1.0).unchecked();
        match self {
            M1 => ExponentSet::new(2.0),
            H1 => ExponentSet::new(2.0).unchecked(),
            Y1 | Y2 | L0 | Z1 | Z4 => e.with_q(1.0),
            Boyd => e.with_q(1.0).with_k(2.0),
            BS1 | Bs2 => e.with_q(1.0).with_k(2.0),
            _ => e,
        }
    }
}

/// An absolutely continuous test function with its exact a.e. derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPath {
    pub y: FunctionSpec,
    pub derivative: ClosedForm,
    pub interval: Interval,
    pub vanishes_left: bool,
    pub vanishes_right: bool,
    y_shape: Shape,
    dy_shape: Shape,
}

fn derivative_shape(y: &Shape) -> Shape {
    let d = |e: f64| if e > 0.0 { e - 1.0 } else { 0.0 };
    Shape::new(d(y.left), d(y.right)).with_breaks(&y.breaks)
}

impl TestPath {
    pub fn new(y: FunctionSpec, interval: Interval) -> Result<Self> {
        y.validate(&interval)?;
        let ya = y.eval(interval.a, &interval);
        let yb = y.eval(interval.b, &interval);
        if !ya.is_finite() || !yb.is_finite() {
            return Err(Error::InvalidSpec("a test path must be bounded".into()));
        }
        let derivative = y.derivative();
        let y_shape = Shape::of(&y, &interval);
        let dy_shape = derivative_shape(&y_shape);
        let path = Self {
            vanishes_left: ya.abs() <= 1e-14,
            vanishes_right: yb.abs() <= 1e-14,
            y,
            derivative,
            interval,
            y_shape,
            dy_shape,
        };
        path.check_derivative()?;
        Ok(path)
    }

    /// Cumulative check `∫_a^x y' = y(x) - y(a)` at a few points.
    fn check_derivative(&self) -> Result<()> {
        let iv = self.interval;
        let ya = self.y.eval(iv.a, &iv);
        let scale = (1..=64)
            .map(|i| self.y.eval(iv.a + iv.len() * i as f64 / 64.0, &iv).abs())
            .fold(ya.abs(), f64::max)
            .max(f64::MIN_POSITIVE);
        for t in [0.3, 0.61, 1.0] {
            let x = iv.a + t * iv.len();
            let sub = Interval { a: iv.a, b: x };
            let shape = Shape {
                left: self.dy_shape.left,
                right: if t == 1.0 { self.dy_shape.right } else { 0.0 },
                breaks: self.dy_shape.breaks.clone(),
            };
            let d = &self.derivative;
            let int = quad::integrate(&|u| d.eval(u, &iv), &shape, &sub, 1e-11)?;
            let diff = int.value - (self.y.eval(x, &iv) - ya);
            if diff.abs() > 1e-9 * scale {
                return Err(Error::InvalidSpec(format!(
                    "derivative is inconsistent with the path at x = {x} (off by {diff:e})"
                )));
            }
        }
        Ok(())
    }

    /// Tent with apex `(peak_x, height)` vanishing at both ends.
    pub fn hat(interval: Interval, peak_x: f64, height: f64) -> Result<Self> {
        if !(peak_x > interval.a && peak_x < interval.b) {
            return Err(Error::Domain {
                x: peak_x,
                a: interval.a,
                b: interval.b,
            });
        }
        Self::new(
            FunctionSpec::piecewise_linear(&[(interval.a, 0.0), (peak_x, height), (interval.b, 0.0)]),
            interval,
        )
    }

    /// `x - a` (side `Left`) or `b - x` (side `Right`).
    pub fn linear(interval: Interval, side: Side) -> Result<Self> {
        let y = match side {
            Side::Left => FunctionSpec::power(1.0, 1.0),
            Side::Right => FunctionSpec::shifted_power(1.0, 1.0),
        };
        Self::new(y, interval)
    }

    /// `(x - a)^alpha`, `alpha > 0`.
    pub fn power(interval: Interval, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "path exponent must be positive, got {alpha}"
            )));
        }
        Self::new(FunctionSpec::power(1.0, alpha), interval)
    }

    /// `c · y`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let y = match &self.y {
            FunctionSpec::PiecewiseLinear { knots } => FunctionSpec::PiecewiseLinear {
                knots: knots.iter().map(|k| [k[0], c * k[1]]).collect(),
            },
            other => FunctionSpec::Product {
                factors: vec![FunctionSpec::constant(c), other.clone()],
            },
        };
        Self::new(y, self.interval)
    }

    /// `y(a + b - x)`, when the catalog can express it.
    pub fn reflected(&self) -> Option<Self> {
        let iv = self.interval;
        let y = reflect_spec(&self.y, &iv)?;
        Self::new(y, iv).ok()
    }
}

/// The catalog function `x ↦ f(a + b - x)`, where expressible.
pub fn reflect_spec(f: &FunctionSpec, iv: &Interval) -> Option<FunctionSpec> {
    Some(match f {
        FunctionSpec::Constant { c } => FunctionSpec::constant(*c),
        FunctionSpec::PowerLaw { c, alpha }
        | FunctionSpec::ShiftedPowerLaw {
            c,
            alpha,
            from_right: false,
        } => FunctionSpec::shifted_power(*c, *alpha),
        FunctionSpec::ShiftedPowerLaw { c, alpha, .. } => FunctionSpec::power(*c, *alpha),
        FunctionSpec::PiecewiseLinear { knots } => {
            let mut k: Vec<[f64; 2]> = knots.iter().map(|k| [iv.reflect(k[0]), k[1]]).collect();
            k.reverse();
            FunctionSpec::PiecewiseLinear { knots: k }
        }
        FunctionSpec::Exponential { c, beta } => FunctionSpec::exponential(c * (beta * (iv.a + iv.b)).exp(), -beta),
        FunctionSpec::Product { factors } => FunctionSpec::Product {
            factors: factors.iter().map(|f| reflect_spec(f, iv)).collect::<Option<_>>()?,
        },
        FunctionSpec::Sum { terms } => FunctionSpec::Sum {
            terms: terms.iter().map(|f| reflect_spec(f, iv)).collect::<Option<_>>()?,
        },
    })
}

/// One lemma check.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance {
    pub variant: OpialVariant,
    pub path: TestPath,
    pub r: Option<FunctionSpec>,
    pub s: Option<FunctionSpec>,
    pub exponents: ExponentSet,
    pub mode: Mode,
    /// Split point `X` for Z1 (on `(a, X)`) and Z4 (on `(X, b)`).
    pub split: Option<f64>,
}

impl LemmaInstance {
    pub fn new(variant: OpialVariant, path: TestPath) -> Self {
        Self {
            variant,
            path,
            r: None,
            s: None,
            exponents: variant.default_exponents(),
            mode: Mode::AsPrinted,
            split: None,
        }
    }

    pub fn with_r(mut self, r: FunctionSpec) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_s(mut self, s: FunctionSpec) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_exponents(mut self, e: ExponentSet) -> Self {
        self.exponents = e;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    fn domain(&self) -> Result<Interval> {
        let iv = self.path.interval;
        let x = match self.split {
            None => return Ok(iv),
            Some(x) => x,
        };
        if !(x > iv.a && x < iv.b) {
            return Err(Error::Domain { x, a: iv.a, b: iv.b });
        }
        Ok(match self.variant {
            OpialVariant::Z1 => Interval { a: iv.a, b: x },
            OpialVariant::Z4 => Interval { a: x, b: iv.b },
            _ => iv,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub variant: OpialVariant,
    pub mode: Mode,
    pub lhs: f64,
    /// Right-hand side integral with its displayed outer power.
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub status: Status,
    pub budget: f64,
}

fn fail(msg: impl Into<String>) -> Error {
    Error::PreconditionFailed(msg.into())
}

fn need<'a>(w: &'a Option<FunctionSpec>, name: &str, v: OpialVariant) -> Result<&'a FunctionSpec> {
    w.as_ref().ok_or_else(|| fail(format!("{v} needs a weight {name}")))
}

fn restrict(shape: Shape, full: &Interval, sub: &Interval) -> Shape {
    Shape {
        left: if sub.a == full.a { shape.left } else { 0.0 },
        right: if sub.b == full.b { shape.right } else { 0.0 },
        breaks: shape.breaks.into_iter().filter(|&x| x > sub.a && x < sub.b).collect(),
    }
}

/// Pieces of a lemma: `∫ w_l |y|^p |y'|^q ≤ C (∫ w_r |y'|^k)^o`.
struct Plan<'a> {
    lhs_weight: Option<&'a FunctionSpec>,
    p: f64,
    q: f64,
    rhs_weight: Option<&'a FunctionSpec>,
    k: f64,
    outer: f64,
}

fn integrate_term(
    path: &TestPath,
    weight: Option<&FunctionSpec>,
    py: f64,
    pd: f64,
    sub: &Interval,
    acc: &Accuracy,
) -> Result<Estimate> {
    let iv = path.interval;
    let mut shape = path.y_shape.pow(py).times(&path.dy_shape.pow(pd));
    if let Some(w) = weight {
        shape = shape.times(&Shape::of(w, &iv));
    }
    let shape = restrict(shape, &iv, sub);
    let f = |x: f64| {
        let y = path.y.eval(x, &iv).abs();
        let d = path.derivative.eval(x, &iv).abs();
        let mut v = 1.0;
        if py != 0.0 {
            v *= y.powf(py);
        }
        if pd != 0.0 {
            v *= d.powf(pd);
        }
        if v == 0.0 {
            return 0.0;
        }
        match weight {
            Some(w) => v * w.eval(x, &iv),
            None => v,
        }
    };
    let r = acc.integrate(&f, &shape, sub)?;
    Ok(Estimate {
        value: r.value,
        rel_error: if r.value == 0.0 { 0.0 } else { r.rel_error() },
    })
}

fn plan_for<'a>(inst: &'a LemmaInstance) -> Result<Plan<'a>> {
    use OpialVariant::*;
    let v = inst.variant;
    let e = &inst.exponents;
    let p = e.p;
    let r = inst.r.as_ref();
    let s = inst.s.as_ref();
    let plan = |lhs_weight, p, q, rhs_weight, k, outer| Plan {
        lhs_weight,
        p,
        q,
        rhs_weight,
        k,
        outer,
    };
    Ok(match v {
        Opial | B1 => plan(None, 1.0, 1.0, None, 2.0, 1.0),
        B2 => plan(None, 1.0, 1.0, r, 2.0, 1.0),
        M1 => {
            let q = e.q_or_conjugate();
            plan(None, 1.0, 1.0, r, q, 2.0 / q)
        }
        Y => plan(s, 1.0, 1.0, None, 2.0, 1.0),
        H1 => plan(None, p, 1.0, None, p + 1.0, 1.0),
        BW1 => plan(s, p, 1.0, r, p + 1.0, 1.0),
        AG => plan(None, p, 1.0, s, p + 1.0, 1.0),
        Y1 => {
            let q = e.q.unwrap_or(1.0);
            plan(None, p, q, None, p + q, 1.0)
        }
        Y2 => {
            let q = e.q.unwrap_or(1.0);
            plan(r, p, q, r, p + q, 1.0)
        }
        Boyd => {
            let (eta, sb) = (e.q.unwrap_or(1.0), e.k.unwrap_or(2.0));
            plan(None, p, eta, None, sb, (p + eta) / sb)
        }
        L0 => {
            let eta = e.q.unwrap_or(1.0);
            plan(None, p, eta, None, eta, (p + eta) / eta)
        }
        Z1 | Z4 => {
            let q = e.q.unwrap_or(1.0);
            plan(r, p, q, s, p + q, 1.0)
        }
        BS1 | Bs2 => {
            let q = e.q.unwrap_or(1.0);
            let k = e.k.unwrap_or(2.0);
            plan(r, p, q, s, k, (p + q) / k)
        }
    })
}

fn check_requirement(inst: &LemmaInstance) -> Result<()> {
    let path = &inst.path;
    let ok = match inst.variant.requirement() {
        Requirement::Left => path.vanishes_left,
        Requirement::Right => path.vanishes_right,
        Requirement::Either => path.vanishes_left || path.vanishes_right,
        Requirement::Both => path.vanishes_left && path.vanishes_right,
    };
    if ok {
        Ok(())
    } else {
        Err(fail(match inst.variant.requirement() {
            Requirement::Left => "y(a) = 0",
            Requirement::Right => "y(b) = 0",
            Requirement::Either => "y(a) = 0 or y(b) = 0",
            Requirement::Both => "y(a) = y(b) = 0",
        }))
    }
}

fn check_params(inst: &LemmaInstance) -> Result<()> {
    use OpialVariant::*;
    let e = &inst.exponents;
    let p = e.p;
    match inst.variant {
        M1 => {
            let q = e.q_or_conjugate();
            if !(p > 1.0) {
                return Err(fail(format!("p > 1 (got {p})")));
            }
            if e.conjugate_check && (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
                return Err(fail(format!("1/p + 1/q = 1 (p = {p}, q = {q})")));
            }
        }
        H1 => {
            if !(p >= 1.0 && p.fract() == 0.0) {
                return Err(fail(format!("p is a positive integer (got {p})")));
            }
        }
        AG | BW1 => {
            if !(p > 0.0) {
                return Err(fail(format!("p > 0 (got {p})")));
            }
        }
        Y1 | Y2 => {
            let q = e.q.unwrap_or(1.0);
            if !(p >= 0.0 && q >= 1.0) {
                return Err(fail(format!("p >= 0 and q >= 1 (p = {p}, q = {q})")));
            }
        }
        Boyd => {
            special::BoydParams::new(p, e.q.unwrap_or(1.0), e.k.unwrap_or(2.0))
                .map_err(|_| fail("nu > 0, s > 1, 0 <= eta < s"))?;
        }
        L0 => {
            let eta = e.q.unwrap_or(1.0);
            if !(p > 0.0 && eta >= 1.0) {
                return Err(fail(format!("nu > 0 and eta >= 1 (nu = {p}, eta = {eta})")));
            }
        }
        Z1 | Z4 => {
            let q = e.q.unwrap_or(1.0);
            if !(p > 0.0 && q > 0.0 && p + q > 1.0) {
                return Err(fail(format!("p, q > 0 and p + q > 1 (p = {p}, q = {q})")));
            }
        }
        BS1 | Bs2 => {
            let q = e.q.unwrap_or(1.0);
            let k = e.k.unwrap_or(2.0);
            if !(k > 1.0 && p > 0.0 && q > 0.0 && q < k) {
                return Err(fail(format!("k > 1, p > 0 and 0 < q < k (p = {p}, q = {q}, k = {k})")));
            }
        }
        Opial | B1 | B2 | Y => {}
    }
    Ok(())
}

fn lemma_constant(inst: &LemmaInstance, sub: &Interval, acc: &Accuracy) -> Result<Estimate> {
    use OpialVariant::*;
    let iv = inst.path.interval;
    let len = iv.len();
    let e = &inst.exponents;
    let p = e.p;
    let v = inst.variant;
    let int_pow = |w: &FunctionSpec, ex: f64| -> Result<Estimate> {
        let shape = Shape::of(w, &iv).pow(ex);
        Ok(Estimate::from_quad(&acc.integrate(
            &|x| w.eval(x, &iv).powf(ex),
            &shape,
            &iv,
        )?))
    };
    Ok(match v {
        Opial => Estimate::exact(len / 4.0),
        B1 => Estimate::exact(match inst.mode {
            Mode::AsPrinted => iv.b / 2.0,
            Mode::AsDerived => len / 2.0,
        }),
        B2 | Y => int_pow(need(&inst.r, "r", v)?, -1.0)?.scale(0.5),
        M1 => int_pow(need(&inst.r, "r", v)?, 1.0 - p)?.powf(2.0 / p).scale(0.5),
        H1 => Estimate::exact(len.powf(p) / (p + 1.0)),
        BW1 => {
            let r = need(&inst.r, "r", v)?;
            let s = need(&inst.s, "s", v)?;
            let l = eigen::boyd_wong_eigenvalue(r, s, p, &iv)?;
            Estimate::exact(1.0 / (p + 1.0)) / l
        }
        AG => int_pow(need(&inst.s, "s", v)?, -1.0 / p)?
            .powf(p)
            .scale(1.0 / (p + 1.0)),
        Y1 | Y2 => {
            let q = e.q.unwrap_or(1.0);
            Estimate::exact(q / (p + q) * len.powf(p))
        }
        Boyd => {
            let (eta, sb) = (e.q.unwrap_or(1.0), e.k.unwrap_or(2.0));
            let n = special::boyd_n(&special::BoydParams::new(p, eta, sb)?)?;
            let ex = match inst.mode {
                Mode::AsPrinted => p,
                Mode::AsDerived => p + 1.0 - (p + eta) / sb,
            };
            n.scale(len.powf(ex))
        }
        L0 => {
            let eta = e.q.unwrap_or(1.0);
            let ex = match inst.mode {
                Mode::AsPrinted => p,
                Mode::AsDerived => p * (eta - 1.0) / eta,
            };
            Estimate::exact(special::boyd_l(p, eta)? * len.powf(ex))
        }
        Z1 | Z4 => {
            let r = need(&inst.r, "r", v)?;
            let s = need(&inst.s, "s", v)?;
            let ex = ExponentSet::new(p).with_q(e.q.unwrap_or(1.0));
            if v == Z1 {
                crate::constants::beesack_das_k1(&ex, r, s, sub, &iv)?
            } else {
                crate::constants::beesack_das_k2(&ex, r, s, sub, &iv)?
            }
        }
        BS1 | Bs2 => {
            let r = need(&inst.r, "r", v)?;
            let s = need(&inst.s, "s", v)?;
            let side = if v == BS1 { Side::Left } else { Side::Right };
            beesack_k(e, r, s, &iv, side, false)?
        }
    })
}

/// The lemma's left-hand side integral.
pub fn opial_lhs(inst: &LemmaInstance) -> Result<quad::QuadResult> {
    opial_lhs_with(inst, &Accuracy::default())
}

pub fn opial_lhs_with(inst: &LemmaInstance, acc: &Accuracy) -> Result<quad::QuadResult> {
    let plan = plan_for(inst)?;
    let sub = inst.domain()?;
    let e = integrate_term(&inst.path, plan.lhs_weight, plan.p, plan.q, &sub, acc)?;
    Ok(quad::QuadResult {
        value: e.value,
        abs_error_estimate: e.abs_error(),
        subdivisions: 0,
    })
}

/// Evaluates both sides and classifies the ratio.
pub fn verify_variant(inst: &LemmaInstance) -> Result<LemmaRecord> {
    verify_variant_with(inst, &Accuracy::default())
}

pub fn verify_variant_with(inst: &LemmaInstance, acc: &Accuracy) -> Result<LemmaRecord> {
    check_requirement(inst)?;
    check_params(inst)?;
    let iv = inst.path.interval;
    let v = inst.variant;
    if v.uses_r() {
        check_positive_weight(need(&inst.r, "r", v)?, &iv, "r")?;
    }
    if v.uses_s() {
        check_positive_weight(need(&inst.s, "s", v)?, &iv, "s")?;
    }
    if v == OpialVariant::Y {
        let s = need(&inst.s, "s", v)?;
        let sign = if inst.path.vanishes_left { 1.0 } else { -1.0 };
        let vals: Vec<f64> = (0..=64)
            .map(|i| s.eval(iv.a + iv.len() * i as f64 / 64.0, &iv))
            .collect();
        if vals
            .windows(2)
            .any(|w| sign * (w[1] - w[0]) > 1e-12 * w[0].abs().max(1.0))
        {
            return Err(fail(if sign > 0.0 {
                "the weight q = s is non-increasing"
            } else {
                "the weight q = s is non-decreasing"
            }));
        }
    }
    let plan = plan_for(inst)?;
    let sub = inst.domain()?;
    let lhs = integrate_term(&inst.path, plan.lhs_weight, plan.p, plan.q, &sub, acc)?;
    let rhs_weight = match v {
        OpialVariant::Y => {
            // ∫ r q |y'|^2 with q = s.
            let r = need(&inst.r, "r", v)?;
            let s = need(&inst.s, "s", v)?;
            Some(FunctionSpec::Product {
                factors: vec![r.clone(), s.clone()],
            })
        }
        _ => plan.rhs_weight.cloned(),
    };
    let rhs = integrate_term(&inst.path, rhs_weight.as_ref(), 0.0, plan.k, &sub, acc)?.powf(plan.outer);
    let constant = lemma_constant(inst, &sub, acc)?;
    let bound = constant.value * rhs.value;
    let ratio = if lhs.value == 0.0 { 0.0 } else { lhs.value / bound };
    let budget = (lhs.rel_error + rhs.rel_error + constant.rel_error).max(1e-12);
    Ok(LemmaRecord {
        variant: v,
        mode: inst.mode,
        lhs: lhs.value,
        rhs: rhs.value,
        constant: constant.value,
        ratio,
        status: classify(ratio, budget),
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn equality_witnesses() {
        let hat = TestPath::hat(unit(), 0.5, 1.0).unwrap();
        let inst = LemmaInstance::new(OpialVariant::Opial, hat);
        assert!((opial_lhs(&inst).unwrap().value - 1.0).abs() < 1e-12);
        let rec = verify_variant(&inst).unwrap();
        assert!((rec.ratio - 1.0).abs() < 1e-9, "{rec:?}");
        assert_eq!(rec.status, Status::Holds);

        let lin = TestPath::linear(unit(), Side::Left).unwrap();
        let rec = verify_variant(&LemmaInstance::new(OpialVariant::B1, lin.clone())).unwrap();
        assert!((rec.lhs - 0.5).abs() < 1e-12 && (rec.rhs - 1.0).abs() < 1e-12);
        assert!((rec.ratio - 1.0).abs() < 1e-9);

        let rec = verify_variant(&LemmaInstance::new(OpialVariant::H1, lin)).unwrap();
        assert!((rec.lhs - 1.0 / 3.0).abs() < 1e-12);
        assert!((rec.ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hat_of_height_half() {
        let hat = TestPath::hat(unit(), 0.5, 0.5).unwrap();
        let lhs = opial_lhs(&LemmaInstance::new(OpialVariant::Opial, hat)).unwrap();
        assert!((lhs.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_path_holds() {
        let zero = TestPath::new(FunctionSpec::constant(0.0), unit()).unwrap();
        for v in [OpialVariant::Opial, OpialVariant::H1, OpialVariant::Y1] {
            let rec = verify_variant(&LemmaInstance::new(v, zero.clone())).unwrap();
            assert_eq!(rec.ratio, 0.0);
            assert_eq!(rec.status, Status::Holds);
        }
    }

    #[test]
    fn requirements_are_enforced() {
        let lin = TestPath::linear(unit(), Side::Left).unwrap();
        let e = verify_variant(&LemmaInstance::new(OpialVariant::Opial, lin)).unwrap_err();
        assert!(matches!(e, Error::PreconditionFailed(ref m) if m.contains("y(a) = y(b) = 0")));
        let lin = TestPath::linear(unit(), Side::Left).unwrap();
        let e = verify_variant(
            &LemmaInstance::new(OpialVariant::Y1, lin).with_exponents(ExponentSet::new(1.0).with_q(0.5)),
        )
        .unwrap_err();
        assert!(matches!(e, Error::PreconditionFailed(ref m) if m.contains("q >= 1")));
    }

    #[test]
    fn b1_modes_differ_off_origin() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let lin = TestPath::linear(iv, Side::Left).unwrap();
        let printed = verify_variant(&LemmaInstance::new(OpialVariant::B1, lin.clone())).unwrap();
        let derived = verify_variant(&LemmaInstance::new(OpialVariant::B1, lin).with_mode(Mode::AsDerived)).unwrap();
        assert!((printed.constant - 1.0).abs() < 1e-15);
        assert!((derived.constant - 0.5).abs() < 1e-15);
        assert!((derived.ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn b2_with_constant_weight_matches_b1() {
        let hat = TestPath::hat(unit(), 0.3, 1.0).unwrap();
        let lin = TestPath::new(
            FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.3, 1.0), (1.0, 1.4)]),
            unit(),
        )
        .unwrap();
        let _ = hat;
        let b1 = verify_variant(&LemmaInstance::new(OpialVariant::B1, lin.clone())).unwrap();
        let b2 =
            verify_variant(&LemmaInstance::new(OpialVariant::B2, lin).with_r(FunctionSpec::constant(1.0))).unwrap();
        assert!((b1.constant * b1.rhs - b2.constant * b2.rhs).abs() < 1e-12);
    }

    #[test]
    fn boyd_wong_extremal_ratio() {
        // For r = 1, s = x the constant is 1/(2λ₀) with λ₀ = k², k tanh k = 1.
        let lin = TestPath::linear(unit(), Side::Left).unwrap();
        let inst = LemmaInstance::new(OpialVariant::BW1, lin)
            .with_r(FunctionSpec::constant(1.0))
            .with_s(FunctionSpec::power(1.0, 1.0));
        let rec = verify_variant(&inst).unwrap();
        assert!(rec.ratio < 1.0 && rec.ratio > 0.9, "{rec:?}");
        assert_eq!(rec.status, Status::Holds);
    }

    #[test]
    fn l0_overlap_with_b1() {
        // ν = η = 1: L = 1/2 and the bound reads ∫|y||y'| ≤ ½ (∫|y'|)².
        let path = TestPath::new(
            FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.4, 0.8), (1.0, 1.0)]),
            unit(),
        )
        .unwrap();
        let rec = verify_variant(&LemmaInstance::new(OpialVariant::L0, path)).unwrap();
        assert!((rec.ratio - 1.0).abs() < 1e-9, "{rec:?}");
    }

    #[test]
    fn homogeneity() {
        let path = TestPath::new(
            FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.3, 0.7), (0.8, 0.2), (1.0, 0.5)]),
            unit(),
        )
        .unwrap();
        let big = path.scaled(3.7).unwrap();
        for v in [
            OpialVariant::B1,
            OpialVariant::H1,
            OpialVariant::Y1,
            OpialVariant::Boyd,
            OpialVariant::AG,
        ] {
            let mk = |p: TestPath| LemmaInstance::new(v, p).with_s(FunctionSpec::power(1.0, 0.5));
            let a = verify_variant(&mk(path.clone())).unwrap();
            let b = verify_variant(&mk(big.clone())).unwrap();
            assert!((a.ratio - b.ratio).abs() < 1e-10 * a.ratio.max(1.0), "{v}: {a:?} {b:?}");
        }
    }

    #[test]
    fn reflection_duality() {
        let path = TestPath::new(
            FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.3, 0.7), (0.8, 0.2), (1.0, 0.5)]),
            unit(),
        )
        .unwrap();
        let refl = path.reflected().unwrap();
        let r = FunctionSpec::power(1.0, 0.6);
        let s = FunctionSpec::power(2.0, 0.3);
        let rr = reflect_spec(&r, &unit()).unwrap();
        let sr = reflect_spec(&s, &unit()).unwrap();
        let a = verify_variant(&LemmaInstance::new(OpialVariant::BS1, path).with_r(r).with_s(s)).unwrap();
        let b = verify_variant(&LemmaInstance::new(OpialVariant::Bs2, refl).with_r(rr).with_s(sr)).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-7 * a.ratio, "{a:?} {b:?}");
    }
}
