//! The constant catalog: for each Hardy-type theorem, its multiplicative
//! constant with a factor-level breakdown, and the shape of both sides of
//! the inequality.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{closed_antiderivative, ClosedForm, FunctionSpec, Interval};
use crate::quad::{self, Accuracy, CumulativeTable, Shape};
use crate::{eigen, special, Estimate, Mode};

macro_rules! theorem_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Stable identifiers of the implemented inequalities.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum TheoremId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl TheoremId {
            pub const ALL: &'static [TheoremId] = &[$(TheoremId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(TheoremId::$variant => $name,)*
                }
            }
        }

        impl FromStr for TheoremId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let norm = s.trim().replace('_', ".");
                match norm.as_str() {
                    $($name => Ok(TheoremId::$variant),)*
                    "HARDY.CLASSICAL" | "hardy" => Ok(TheoremId::Hardy),
                    _ => Err(Error::UnknownId(s.to_string())),
                }
            }
        }
    };
}

theorem_ids! {
    T2_1 => "T2.1", T2_2 => "T2.2", T2_3 => "T2.3", T2_4 => "T2.4",
    T2_5 => "T2.5", T2_6 => "T2.6", T2_7 => "T2.7", T2_8 => "T2.8",
    T2_9 => "T2.9", T2_10 => "T2.10", T2_11 => "T2.11", T2_12 => "T2.12",
    T2_13 => "T2.13", T2_14 => "T2.14", T2_15 => "T2.15", T2_16 => "T2.16",
    T2_17 => "T2.17", T2_18 => "T2.18", T2_19 => "T2.19", T2_20 => "T2.20",
    T2_21 => "T2.21", T2_22 => "T2.22", T2_23 => "T2.23", T2_27 => "T2.27",
    T2_28 => "T2.28", T2_30 => "T2.30", T2_31 => "T2.31",
    C2_1a => "C2.1a", C2_1b => "C2.1b", C2_2a => "C2.2a", C2_2b => "C2.2b",
    Hardy => "HARDY",
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which endpoint the running integral starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `F(x) = ∫_a^x f`, weight tail `R(x, b)`.
    Left,
    /// `F(x) = ∫_x^b f`, weight head `R(a, x)`.
    Right,
}

/// Groups of theorems sharing one constant formula (odd/even mirror pairs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    CauchySchwarz,
    SupLength,
    Beesack,
    Maroni,
    Yang,
    Hua,
    BoydWong,
    Calvert,
    YangPower,
    Corollary,
    YangWeighted,
    Boyd,
    BoydLimit,
    BeesackDas,
    BeesackK,
    Hardy,
}

impl TheoremId {
    pub fn family(self) -> Family {
        use TheoremId::*;
        match self {
            T2_1 | T2_2 => Family::CauchySchwarz,
            T2_3 | T2_4 => Family::SupLength,
            T2_5 | T2_6 => Family::Beesack,
            T2_7 | T2_8 => Family::Maroni,
            T2_9 | T2_10 => Family::Yang,
            T2_11 | T2_12 => Family::Hua,
            T2_13 => Family::BoydWong,
            T2_14 | T2_15 => Family::Calvert,
            T2_16 | T2_17 => Family::YangPower,
            C2_1a | C2_1b | C2_2a | C2_2b => Family::Corollary,
            T2_18 | T2_19 => Family::YangWeighted,
            T2_20 | T2_21 => Family::Boyd,
            T2_22 | T2_23 => Family::BoydLimit,
            T2_27 | T2_28 => Family::BeesackDas,
            T2_30 | T2_31 => Family::BeesackK,
            Hardy => Family::Hardy,
        }
    }

    pub fn side(self) -> Side {
        use TheoremId::*;
        match self {
            T2_2 | T2_4 | T2_6 | T2_8 | T2_10 | T2_12 | T2_15 | T2_17 | T2_19 | T2_21 | T2_23 | T2_28 | T2_31
            | C2_1b | C2_2b => Side::Right,
            _ => Side::Left,
        }
    }

    /// The partner theorem obtained by reflecting the interval, if any.
    pub fn mirror(self) -> Option<TheoremId> {
        use TheoremId::*;
        Some(match self {
            T2_1 => T2_2,
            T2_2 => T2_1,
            T2_3 => T2_4,
            T2_4 => T2_3,
            T2_5 => T2_6,
            T2_6 => T2_5,
            T2_7 => T2_8,
            T2_8 => T2_7,
            T2_9 => T2_10,
            T2_10 => T2_9,
            T2_11 => T2_12,
            T2_12 => T2_11,
            T2_14 => T2_15,
            T2_15 => T2_14,
            T2_16 => T2_17,
            T2_17 => T2_16,
            T2_18 => T2_19,
            T2_19 => T2_18,
            T2_20 => T2_21,
            T2_21 => T2_20,
            T2_22 => T2_23,
            T2_23 => T2_22,
            T2_27 => T2_28,
            T2_28 => T2_27,
            T2_30 => T2_31,
            T2_31 => T2_30,
            C2_1a => C2_1b,
            C2_1b => C2_1a,
            C2_2a => C2_2b,
            C2_2b => C2_2a,
            T2_13 | Hardy => return None,
        })
    }

    /// Whether the theorem involves a second weight `s`.
    pub fn uses_s(self) -> bool {
        matches!(
            self.family(),
            Family::CauchySchwarz
                | Family::Beesack
                | Family::Maroni
                | Family::Yang
                | Family::BoydWong
                | Family::Calvert
                | Family::BeesackDas
                | Family::BeesackK
        )
    }

    /// Whether the theorem involves the weight `r` at all.
    pub fn uses_r(self) -> bool {
        self.family() != Family::Hardy
    }

    /// Mode used when none is requested: the printed statement, except where
    /// it is vacuous.
    pub fn default_mode(self) -> Mode {
        match self.family() {
            Family::BeesackK => Mode::AsDerived,
            _ => Mode::AsPrinted,
        }
    }

    /// Whether the printed and derived readings differ for this theorem.
    pub fn has_discrepancy(self) -> bool {
        matches!(
            self.family(),
            Family::YangPower | Family::Boyd | Family::BoydLimit | Family::BeesackDas | Family::BeesackK
        )
    }

    pub fn default_exponents(self) -> ExponentSet {
        match self.family() {
            Family::BoydWong => ExponentSet::new(1.0),
            Family::Boyd | Family::BeesackK => ExponentSet::new(2.0).with_k(3.0),
            _ => ExponentSet::new(2.0),
        }
    }
}

fn default_true() -> bool {
    true
}

/// Exponents of a theorem instance. `q` defaults to the Hölder conjugate of
/// `p`; `k` carries Boyd's `s` for T2.20/T2.21 and the `k` of T2.30/T2.31.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default = "default_true")]
    pub conjugate_check: bool,
}

impl ExponentSet {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            q: None,
            k: None,
            conjugate_check: true,
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn unchecked(mut self) -> Self {
        self.conjugate_check = false;
        self
    }

    /// `q`, or the conjugate `p/(p-1)` when unset.
    pub fn q_or_conjugate(&self) -> f64 {
        self.q.unwrap_or(self.p / (self.p - 1.0))
    }
}

/// Resolved exponents after precondition checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub k: f64,
}

fn fail(msg: impl Into<String>) -> Error {
    Error::PreconditionFailed(msg.into())
}

fn is_int(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0
}

fn conjugate(e: &ExponentSet) -> Result<f64> {
    let q = e.q_or_conjugate();
    if e.conjugate_check && (1.0 / e.p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(fail(format!("1/p + 1/q = 1 (p = {}, q = {q})", e.p)));
    }
    Ok(q)
}

/// Checks the theorem's exponent conditions and fills in derived exponents.
pub fn resolve_exponents(id: TheoremId, e: &ExponentSet, mode: Mode) -> Result<Exponents> {
    let p = e.p;
    if !p.is_finite() {
        return Err(fail(format!("p must be finite, got {p}")));
    }
    let none = Exponents {
        p,
        q: f64::NAN,
        k: f64::NAN,
    };
    let out = match id.family() {
        Family::CauchySchwarz | Family::SupLength | Family::Beesack | Family::Yang => none,
        Family::Maroni => {
            if !(p > 1.0) {
                return Err(fail(format!("p > 1 (got {p})")));
            }
            Exponents {
                q: conjugate(e)?,
                ..none
            }
        }
        Family::Hua | Family::Calvert | Family::BoydWong => {
            if !(is_int(p) && p >= 1.0) {
                return Err(fail(format!("p is a positive integer (got {p})")));
            }
            none
        }
        Family::YangPower | Family::Corollary => {
            if !(is_int(p) && p > 1.0) {
                return Err(fail(format!("p > 1 is an integer (got {p})")));
            }
            Exponents {
                q: p / (p - 1.0),
                ..none
            }
        }
        Family::YangWeighted => {
            if !(is_int(p) && p >= 0.0) {
                return Err(fail(format!("p >= 0 is an integer (got {p})")));
            }
            none
        }
        Family::Boyd => {
            let s = e.k.ok_or_else(|| fail("Boyd exponent s (field k) is required"))?;
            if !(s > 1.0) {
                return Err(fail(format!("s > 1 (got {s})")));
            }
            if !(p > 1.0) {
                return Err(fail(format!("p > 1 so that q = p/(p-1) is finite (got {p})")));
            }
            let q = conjugate(e)?;
            let q_ok = if id.side() == Side::Left { q >= 0.0 } else { q > 1.0 };
            if !(q_ok && q < s) {
                return Err(fail(format!("q < s with q in range (q = {q}, s = {s})")));
            }
            Exponents { p, q, k: s }
        }
        Family::BoydLimit | Family::BeesackDas => {
            let q = conjugate(e)?;
            if !(p > 1.0 && q > 1.0) {
                return Err(fail(format!("p, q > 1 (p = {p}, q = {q})")));
            }
            Exponents { q, ..none }
        }
        Family::BeesackK => {
            let q = conjugate(e)?;
            if !(p > 1.0 && q > 1.0) {
                return Err(fail(format!("p, q > 1 (p = {p}, q = {q})")));
            }
            if mode == Mode::AsPrinted {
                return Err(fail(
                    "0 < q < k: the printed constant K(pq, q, q) sets k = q, which makes the \
                     statement vacuous",
                ));
            }
            let k = e.k.ok_or_else(|| fail("exponent k is required"))?;
            if !(k > 1.0 && q < k) {
                return Err(fail(format!("k > 1 and 0 < q < k (q = {q}, k = {k})")));
            }
            Exponents { p, q, k }
        }
        Family::Hardy => {
            if !(p > 1.0) {
                return Err(fail(format!("p > 1 (got {p})")));
            }
            none
        }
    };
    Ok(out)
}

/// Left-hand side shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lhs {
    /// `(∫ r Φ)^2`
    SquaredIntegral,
    /// `∫ r Φ^m`
    Power { m: f64 },
    /// `(∫ r Φ^m)^{1/m}`
    Root { m: f64 },
    /// `∫ (Φ(x)/(x - a))^p`
    HardyMean { p: f64 },
}

/// Weight multiplying `f^k` on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsWeight {
    One,
    S,
    /// The weight tail/head `R` times `s`.
    RS,
    /// The weight tail/head `R`.
    R,
}

/// `LHS ≤ prefactor · C · (∫ w f^k)^outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityForm {
    pub lhs: Lhs,
    pub weight: RhsWeight,
    pub f_power: f64,
    pub outer: f64,
}

pub fn inequality_form(id: TheoremId, ex: &Exponents, mode: Mode) -> InequalityForm {
    let Exponents { p, q, k } = *ex;
    let form = |lhs, weight, f_power, outer| InequalityForm {
        lhs,
        weight,
        f_power,
        outer,
    };
    let pw = Lhs::Power { m: p + 1.0 };
    match id.family() {
        Family::CauchySchwarz => form(Lhs::SquaredIntegral, RhsWeight::S, 2.0, 1.0),
        Family::SupLength => form(Lhs::Power { m: 2.0 }, RhsWeight::One, 2.0, 1.0),
        Family::Beesack => form(Lhs::Power { m: 2.0 }, RhsWeight::S, 2.0, 1.0),
        Family::Maroni => form(Lhs::Power { m: 2.0 }, RhsWeight::S, q, 2.0 / q),
        Family::Yang => form(Lhs::Power { m: 2.0 }, RhsWeight::RS, 2.0, 1.0),
        Family::Hua => form(pw, RhsWeight::One, p + 1.0, 1.0),
        Family::BoydWong | Family::Calvert => form(pw, RhsWeight::S, p + 1.0, 1.0),
        Family::YangPower => form(pw, RhsWeight::One, p * (p + 1.0) / (p - 1.0), (p - 1.0) / p),
        Family::Corollary => form(
            Lhs::Root { m: p + 1.0 },
            RhsWeight::One,
            p * (p + 1.0) / (p - 1.0),
            (p - 1.0) / (p * (p + 1.0)),
        ),
        Family::YangWeighted => form(pw, RhsWeight::R, p + 1.0, 1.0),
        Family::Boyd => form(pw, RhsWeight::One, k, (p + 1.0) / k),
        Family::BoydLimit => {
            let outer = match mode {
                Mode::AsPrinted => p + 1.0,
                Mode::AsDerived => (p + 1.0) / q,
            };
            form(pw, RhsWeight::One, q, outer)
        }
        Family::BeesackDas => form(pw, RhsWeight::S, p * q + q, 1.0 / q),
        Family::BeesackK => form(pw, RhsWeight::S, k, (p + 1.0) / k),
        Family::Hardy => form(Lhs::HardyMean { p }, RhsWeight::One, p, 1.0),
    }
}

/// A theorem constant `C` with its factors. The bound is
/// `prefactor · value · RHS`; `value` is the product of `factors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantBreakdown {
    pub value: f64,
    pub factors: Vec<(String, f64)>,
    pub mode: Mode,
    /// Relative error bound propagated from the quadratures.
    pub error_estimate: f64,
    /// Scalar written in front of `C` in the statement (e.g. `p + 1`).
    pub prefactor: f64,
}

impl ConstantBreakdown {
    fn build(mode: Mode, prefactor: f64, factors: Vec<(String, Estimate)>) -> Result<Self> {
        let value: f64 = factors.iter().map(|(_, e)| e.value).product();
        let error_estimate = factors.iter().map(|(_, e)| e.rel_error).sum::<f64>() + 4.0 * f64::EPSILON;
        if !value.is_finite() {
            return Err(Error::NonIntegrable(format!(
                "constant is not finite ({})",
                factors
                    .iter()
                    .map(|(n, e)| format!("{n} = {}", e.value))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(Self {
            value,
            factors: factors.into_iter().map(|(n, e)| (n, e.value)).collect(),
            mode,
            error_estimate,
            prefactor,
        })
    }

    /// `prefactor · value`, the full multiplier of the right-hand side.
    pub fn multiplier(&self) -> f64 {
        self.prefactor * self.value
    }
}

pub(crate) const TABLE_POINTS: usize = 1024;

/// Running integral of `spec^power`, closed form when the catalog allows.
pub(crate) struct Primitive {
    kind: PrimKind,
    total: f64,
    pub rel_error: f64,
    /// Shape of the integrand `spec^power`.
    pub shape: Shape,
}

enum PrimKind {
    Closed(ClosedForm, Interval),
    Table(CumulativeTable),
}

impl Primitive {
    pub fn of(spec: &FunctionSpec, power: f64, interval: &Interval, acc: &Accuracy) -> Result<Self> {
        spec.validate(interval)?;
        let shape = Shape::of(spec, interval).pow(power);
        if shape.left <= -1.0 || shape.right <= -1.0 {
            return Err(Error::NonIntegrable(format!(
                "integrand has endpoint exponents ({}, {})",
                shape.left, shape.right
            )));
        }
        let powered = if power == 1.0 {
            Some(spec.clone())
        } else {
            spec.powf(power)
        };
        if let Some(g) = powered.and_then(|s| closed_antiderivative(&s, interval)) {
            let total = g.eval(interval.b, interval);
            if total.is_finite() {
                return Ok(Self {
                    kind: PrimKind::Closed(g, *interval),
                    total,
                    rel_error: 4.0 * f64::EPSILON,
                    shape,
                });
            }
        }
        let f = |x: f64| spec.eval(x, interval).powf(power);
        let table = quad::cumulative_with_tol(&f, &shape, interval, TABLE_POINTS, acc.tol_for(&shape))?;
        let total = table.total();
        let rel_error = if total > 0.0 {
            // Knot values carry the quadrature error; interpolation adds a
            // comparable share between knots.
            2.0 * table.abs_error_estimate / total + 1e-9
        } else {
            0.0
        };
        Ok(Self {
            kind: PrimKind::Table(table),
            total,
            rel_error,
            shape,
        })
    }

    /// `∫_a^x`
    pub fn head(&self, x: f64) -> f64 {
        let v = match &self.kind {
            PrimKind::Closed(g, iv) => g.eval(x, iv),
            PrimKind::Table(t) => t.eval(x),
        };
        v.clamp(0.0, self.total)
    }

    /// `∫_x^b`
    pub fn tail(&self, x: f64) -> f64 {
        (self.total - self.head(x)).max(0.0)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn running(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::Left => self.head(x),
            Side::Right => self.tail(x),
        }
    }

    /// Shape of the running integral on `side`.
    pub fn running_shape(&self, side: Side) -> Shape {
        let s = match side {
            Side::Left => Shape::new(self.shape.left + 1.0, 0.0),
            Side::Right => Shape::new(0.0, self.shape.right + 1.0),
        };
        s.with_breaks(&self.shape.breaks)
    }

    /// Shape of the weight tail `R(x,b)` (left side) or head `R(a,x)`.
    pub fn weight_shape(&self, side: Side) -> Shape {
        self.running_shape(match side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        })
    }

    /// `R(x, b)` for left-sided theorems, `R(a, x)` for right-sided ones.
    pub fn weight(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::Left => self.tail(x),
            Side::Right => self.head(x),
        }
    }
}

fn check_point(x: f64, interval: &Interval) -> Result<()> {
    if interval.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain {
            x,
            a: interval.a,
            b: interval.b,
        })
    }
}

/// `R(x, b) = ∫_x^b r`.
pub fn r_tail(r: &FunctionSpec, x: f64, interval: &Interval) -> Result<f64> {
    check_point(x, interval)?;
    Ok(Primitive::of(r, 1.0, interval, &Accuracy::default())?.tail(x))
}

/// `R(a, x) = ∫_a^x r`.
pub fn r_head(r: &FunctionSpec, x: f64, interval: &Interval) -> Result<f64> {
    check_point(x, interval)?;
    Ok(Primitive::of(r, 1.0, interval, &Accuracy::default())?.head(x))
}

/// Rejects weights that vanish (or are not finite) somewhere inside the
/// interval.
pub fn check_positive_weight(spec: &FunctionSpec, interval: &Interval, name: &str) -> Result<()> {
    spec.validate(interval)?;
    let n = 257;
    let grid = (1..n).map(|i| interval.a + interval.len() * i as f64 / n as f64);
    let knots = spec
        .breakpoints(interval)
        .into_iter()
        .filter(|&x| x > interval.a && x < interval.b);
    for x in grid.chain(knots) {
        let v = spec.eval(x, interval);
        if !(v > 0.0 && v.is_finite()) {
            return Err(fail(format!(
                "{name} is positive on the open interval ({name}({x}) = {v})"
            )));
        }
    }
    Ok(())
}

fn integrate(acc: &Accuracy, f: &dyn Fn(f64) -> f64, shape: &Shape, interval: &Interval) -> Result<Estimate> {
    let r = acc.integrate(f, shape, interval)?;
    Ok(Estimate {
        value: r.value,
        rel_error: r.rel_error() + 4.0 * f64::EPSILON,
    })
}

fn weight_sup(prim: &Primitive, side: Side, interval: &Interval) -> Result<Estimate> {
    let sup = quad::sup_on_interval(&|x| prim.weight(side, x), interval, false, false)?;
    Ok(Estimate {
        value: sup.value,
        rel_error: prim.rel_error,
    })
}

/// `(∫ R^p r^{-e})^{1/p}` over the interval.
fn weight_power_norm(
    prim: &Primitive,
    r: &FunctionSpec,
    side: Side,
    p: f64,
    e: f64,
    interval: &Interval,
    acc: &Accuracy,
) -> Result<Estimate> {
    let shape = prim.weight_shape(side).pow(p).times(&Shape::of(r, interval).pow(-e));
    let f = |x: f64| {
        let rw = prim.weight(side, x).powf(p);
        if e == 0.0 {
            rw
        } else {
            rw * r.eval(x, interval).powf(-e)
        }
    };
    let i = integrate(acc, &f, &shape, interval)?;
    Ok(Estimate {
        value: i.value,
        rel_error: i.rel_error + p * prim.rel_error,
    }
    .powf(1.0 / p))
}

fn spec_power_integral(s: &FunctionSpec, e: f64, interval: &Interval, acc: &Accuracy) -> Result<Estimate> {
    let prim = Primitive::of(s, e, interval, acc)?;
    Ok(Estimate {
        value: prim.total(),
        rel_error: prim.rel_error,
    })
}

fn require_s(s: Option<&FunctionSpec>, id: TheoremId) -> Result<&FunctionSpec> {
    s.ok_or_else(|| fail(format!("{id} needs a weight s")))
}

/// Constant of theorem `id` for weights `r`, `s` on `interval`.
pub fn hardy_constant(
    id: TheoremId,
    r: &FunctionSpec,
    s: Option<&FunctionSpec>,
    e: &ExponentSet,
    interval: &Interval,
    mode: Mode,
) -> Result<ConstantBreakdown> {
    hardy_constant_with(id, r, s, e, interval, mode, &Accuracy::default())
}

pub fn hardy_constant_with(
    id: TheoremId,
    r: &FunctionSpec,
    s: Option<&FunctionSpec>,
    e: &ExponentSet,
    interval: &Interval,
    mode: Mode,
    acc: &Accuracy,
) -> Result<ConstantBreakdown> {
    interval.validate()?;
    let ex = resolve_exponents(id, e, mode)?;
    let Exponents { p, q, k } = ex;
    let len = interval.len();
    let side = id.side();
    let fam = id.family();
    let est = Estimate::exact;
    let named = |n: &str, v: Estimate| (n.to_string(), v);

    if fam == Family::Hardy {
        return ConstantBreakdown::build(mode, 1.0, vec![named("(p/(p-1))^p", est((p / (p - 1.0)).powf(p)))]);
    }

    check_positive_weight(r, interval, "r")?;
    if id.uses_s() {
        check_positive_weight(require_s(s, id)?, interval, "s")?;
    }
    let prim = Primitive::of(r, 1.0, interval, acc)?;

    let (prefactor, factors) = match fam {
        Family::CauchySchwarz => {
            let s = require_s(s, id)?;
            let shape = prim
                .weight_shape(side)
                .pow(2.0)
                .times(&Shape::of(s, interval).pow(-1.0));
            let f = |x: f64| prim.weight(side, x).powi(2) / s.eval(x, interval);
            let mut i = integrate(acc, &f, &shape, interval)?;
            i.rel_error += 2.0 * prim.rel_error;
            (1.0, vec![named("∫R²/s", i)])
        }
        Family::SupLength => (
            1.0,
            vec![
                named("(b-a)", est(len)),
                named("sup R", weight_sup(&prim, side, interval)?),
            ],
        ),
        Family::Beesack => {
            let s = require_s(s, id)?;
            (
                1.0,
                vec![
                    named("sup R", weight_sup(&prim, side, interval)?),
                    named("∫1/s", spec_power_integral(s, -1.0, interval, acc)?),
                ],
            )
        }
        Family::Maroni => {
            let s = require_s(s, id)?;
            (
                1.0,
                vec![
                    named("sup R", weight_sup(&prim, side, interval)?),
                    named(
                        "(∫s^(1-p))^(2/p)",
                        spec_power_integral(s, 1.0 - p, interval, acc)?.powf(2.0 / p),
                    ),
                ],
            )
        }
        Family::Yang => {
            let s = require_s(s, id)?;
            (1.0, vec![named("∫1/s", spec_power_integral(s, -1.0, interval, acc)?)])
        }
        Family::Hua => (
            1.0,
            vec![
                named("(b-a)^p", est(len.powf(p))),
                named("sup R", weight_sup(&prim, side, interval)?),
            ],
        ),
        Family::BoydWong => {
            let s = require_s(s, id)?;
            (1.0, vec![named("1/λ0", eigen::t2_13_constant(r, s, p, interval, acc)?)])
        }
        Family::Calvert => {
            let s = require_s(s, id)?;
            (
                1.0,
                vec![
                    named("sup R", weight_sup(&prim, side, interval)?),
                    named(
                        "(∫s^(-1/p))^p",
                        spec_power_integral(s, -1.0 / p, interval, acc)?.powf(p),
                    ),
                ],
            )
        }
        Family::YangPower => {
            let lead = match mode {
                Mode::AsPrinted => named("(p+1)^(1/p)", est((p + 1.0).powf(1.0 / p))),
                Mode::AsDerived => named("(1/(p+1))^(1/q)", est((1.0 / (p + 1.0)).powf(1.0 / q))),
            };
            (
                1.0,
                vec![
                    lead,
                    named("(b-a)^p", est(len.powf(p))),
                    named(
                        "(∫R^p)^(1/p)",
                        weight_power_norm(&prim, r, side, p, 0.0, interval, acc)?,
                    ),
                ],
            )
        }
        Family::Corollary => {
            let e = 1.0 / (p * (p + 1.0));
            (
                1.0,
                vec![
                    named("(p+1)^(1/(p(p+1)))", est((p + 1.0).powf(e))),
                    named("(b-a)^(p/(p+1))", est(len.powf(p / (p + 1.0)))),
                    named(
                        "(∫R^p)^(1/(p(p+1)))",
                        weight_power_norm(&prim, r, side, p, 0.0, interval, acc)?.powf(1.0 / (p + 1.0)),
                    ),
                ],
            )
        }
        Family::YangWeighted => (1.0, vec![named("(b-a)^p", est(len.powf(p)))]),
        Family::Boyd => {
            let params = special::BoydParams::new(p * q, q, k)?;
            let n = special::boyd_n(&params)?;
            let len_exp = match mode {
                Mode::AsPrinted => p,
                Mode::AsDerived => (p * q * (k - 1.0) + k - q) / (k * q),
            };
            (
                p + 1.0,
                vec![
                    named("N^(1/q)", n.powf(1.0 / q)),
                    named("(b-a)^e", est(len.powf(len_exp))),
                    named(
                        "(∫R^p)^(1/p)",
                        weight_power_norm(&prim, r, side, p, 0.0, interval, acc)?,
                    ),
                ],
            )
        }
        Family::BoydLimit => {
            let l = special::boyd_l_pq(p, q, mode)?;
            let len_exp = match mode {
                Mode::AsPrinted => p,
                Mode::AsDerived => p * (q - 1.0) / q,
            };
            (
                p + 1.0,
                vec![
                    named("L^(1/q)", est(l.powf(1.0 / q))),
                    named("(b-a)^e", est(len.powf(len_exp))),
                    named(
                        "(∫R^p)^(1/p)",
                        weight_power_norm(&prim, r, side, p, 0.0, interval, acc)?,
                    ),
                ],
            )
        }
        Family::BeesackDas => {
            let s = require_s(s, id)?;
            let (big_p, big_q) = (p * q, q);
            let r_exp = match (mode, side) {
                (Mode::AsPrinted, Side::Left) => (big_p + big_q) / p,
                _ => (big_p + big_q) / big_p,
            };
            let kernel = Nested {
                r_exp,
                s_exp: -big_q / big_p,
                inner_exp: -1.0 / (big_p + big_q - 1.0),
                inner_pow: big_p + big_q - 1.0,
                lead: (big_q / (big_p + big_q)).powf(big_q / (big_p + big_q)),
                outer: big_p / (big_p + big_q),
            };
            let kv = kernel.eval(r, s, interval, interval, side, acc)?;
            let e_exp = match mode {
                Mode::AsPrinted => 1.0 / q,
                Mode::AsDerived => p / q,
            };
            (
                p + 1.0,
                vec![
                    named("K^(1/q)", kv.powf(1.0 / q)),
                    named(
                        "(∫R^p/r^e)^(1/p)",
                        weight_power_norm(&prim, r, side, p, e_exp, interval, acc)?,
                    ),
                ],
            )
        }
        Family::BeesackK => {
            let s = require_s(s, id)?;
            let kv = beesack_kernel(p * q, q, k).eval(r, s, interval, interval, side, acc)?;
            (
                p + 1.0,
                vec![
                    named("K^(1/q)", kv.powf(1.0 / q)),
                    named(
                        "(∫R^p/r^(p/q))^(1/p)",
                        weight_power_norm(&prim, r, side, p, p / q, interval, acc)?,
                    ),
                ],
            )
        }
        Family::Hardy => unreachable!("handled above"),
    };
    ConstantBreakdown::build(mode, prefactor, factors)
}

/// `lead · (∫_sub r^{r_exp} s^{s_exp} Inner(x)^{inner_pow} dx)^{outer}` with
/// `Inner(x) = ∫ s^{inner_exp}` from the sub-interval's anchored end to `x`.
#[derive(Debug, Clone, Copy)]
struct Nested {
    r_exp: f64,
    s_exp: f64,
    inner_exp: f64,
    inner_pow: f64,
    lead: f64,
    outer: f64,
}

fn restrict(shape: &Shape, full: &Interval, sub: &Interval) -> Shape {
    Shape {
        left: if sub.a == full.a { shape.left } else { 0.0 },
        right: if sub.b == full.b { shape.right } else { 0.0 },
        breaks: shape
            .breaks
            .iter()
            .copied()
            .filter(|&x| x > sub.a && x < sub.b)
            .collect(),
    }
}

impl Nested {
    fn eval(
        &self,
        r: &FunctionSpec,
        s: &FunctionSpec,
        sub: &Interval,
        full: &Interval,
        side: Side,
        acc: &Accuracy,
    ) -> Result<Estimate> {
        full.validate()?;
        if !(sub.a >= full.a && sub.b <= full.b && sub.a <= sub.b) {
            return Err(Error::Domain {
                x: if sub.a < full.a { sub.a } else { sub.b },
                a: full.a,
                b: full.b,
            });
        }
        if sub.a == sub.b {
            return Ok(Estimate::exact(0.0));
        }
        let inner = Primitive::of(s, self.inner_exp, full, acc)?;
        let base = match side {
            Side::Left => inner.head(sub.a),
            Side::Right => inner.head(sub.b),
        };
        let running = |x: f64| match side {
            Side::Left => (inner.head(x) - base).max(0.0),
            Side::Right => (base - inner.head(x)).max(0.0),
        };
        let inner_shape = match side {
            Side::Left => Shape::new(if sub.a == full.a { inner.shape.left + 1.0 } else { 1.0 }, 0.0),
            Side::Right => Shape::new(0.0, if sub.b == full.b { inner.shape.right + 1.0 } else { 1.0 }),
        };
        let shape = Shape::of(r, full)
            .pow(self.r_exp)
            .times(&Shape::of(s, full).pow(self.s_exp))
            .times(&inner_shape.pow(self.inner_pow).with_breaks(&inner.shape.breaks));
        let shape = restrict(&shape, full, sub);
        let f = |x: f64| {
            let mut v = running(x).powf(self.inner_pow);
            if self.r_exp != 0.0 {
                v *= r.eval(x, full).powf(self.r_exp);
            }
            if self.s_exp != 0.0 {
                v *= s.eval(x, full).powf(self.s_exp);
            }
            v
        };
        let mut i = integrate(acc, &f, &shape, sub)?;
        i.rel_error += self.inner_pow.abs() * inner.rel_error;
        Ok(i.powf(self.outer).scale(self.lead))
    }
}

fn beesack_das_kernel(p: f64, q: f64) -> Nested {
    Nested {
        r_exp: (p + q) / p,
        s_exp: -q / p,
        inner_exp: -1.0 / (p + q - 1.0),
        inner_pow: p + q - 1.0,
        lead: (q / (p + q)).powf(q / (p + q)),
        outer: p / (p + q),
    }
}

fn beesack_kernel(p: f64, q: f64, k: f64) -> Nested {
    Nested {
        r_exp: k / (k - q),
        s_exp: -q / (k - q),
        inner_exp: -1.0 / (k - 1.0),
        inner_pow: p * (k - 1.0) / (k - q),
        lead: (q / (q + p)).powf(q / k),
        outer: (k - q) / k,
    }
}

fn beesack_das_exponents(e: &ExponentSet) -> Result<(f64, f64)> {
    let p = e.p;
    let q = e.q.ok_or_else(|| fail("exponent q is required"))?;
    if !(p > 0.0 && q > 0.0 && p + q > 1.0) {
        return Err(fail(format!("p, q > 0 and p + q > 1 (p = {p}, q = {q})")));
    }
    Ok((p, q))
}

/// `K₁(a, X, p, q)` on `sub = (a, X)` with weights living on `full`.
pub fn beesack_das_k1(
    e: &ExponentSet,
    r: &FunctionSpec,
    s: &FunctionSpec,
    sub: &Interval,
    full: &Interval,
) -> Result<Estimate> {
    let (p, q) = beesack_das_exponents(e)?;
    beesack_das_kernel(p, q).eval(r, s, sub, full, Side::Left, &Accuracy::default())
}

/// `K₂(X, b, p, q)`: mirror of [`beesack_das_k1`] with the inner integral
/// running to the right end of `sub`.
pub fn beesack_das_k2(
    e: &ExponentSet,
    r: &FunctionSpec,
    s: &FunctionSpec,
    sub: &Interval,
    full: &Interval,
) -> Result<Estimate> {
    let (p, q) = beesack_das_exponents(e)?;
    beesack_das_kernel(p, q).eval(r, s, sub, full, Side::Right, &Accuracy::default())
}

/// Solves `K₁(a, h) = K₂(h, b)` for `h` by bisection; returns `(h, K)`.
pub fn beesack_das_balance(
    e: &ExponentSet,
    r: &FunctionSpec,
    s: &FunctionSpec,
    interval: &Interval,
    tol: f64,
) -> Result<(f64, f64)> {
    interval.validate()?;
    let (p, q) = beesack_das_exponents(e)?;
    let kernel = beesack_das_kernel(p, q);
    let acc = Accuracy::fixed(1e-12);
    let k1 = |h: f64| kernel.eval(r, s, &Interval { a: interval.a, b: h }, interval, Side::Left, &acc);
    let k2 = |h: f64| kernel.eval(r, s, &Interval { a: h, b: interval.b }, interval, Side::Right, &acc);

    // Monotonicity audit on a coarse grid.
    let n = 9;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..n {
        let h = interval.a + interval.len() * i as f64 / n as f64;
        let (v1, v2) = (k1(h)?.value, k2(h)?.value);
        if let Some((p1, p2)) = prev {
            if v1 < p1 * (1.0 - 1e-9) || v2 > p2 * (1.0 + 1e-9) {
                return Err(Error::NoCrossing(format!(
                    "K1 must increase and K2 decrease in h (failed near h = {h})"
                )));
            }
        }
        prev = Some((v1, v2));
    }

    let (mut lo, mut hi) = (interval.a, interval.b);
    let mut best = (0.5 * (lo + hi), f64::NAN);
    for _ in 0..200 {
        let h = 0.5 * (lo + hi);
        let (v1, v2) = (k1(h)?.value, k2(h)?.value);
        best = (h, 0.5 * (v1 + v2));
        let diff = v1 - v2;
        if diff.abs() <= tol * v1.max(v2) && hi - lo <= 1e-12 * interval.len() {
            break;
        }
        if diff == 0.0 {
            break;
        }
        if diff < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        if hi - lo <= 4.0 * f64::EPSILON * interval.a.abs().max(interval.b.abs()) {
            break;
        }
    }
    let (h, kv) = best;
    let (v1, v2) = (k1(h)?.value, k2(h)?.value);
    if (v1 - v2).abs() > tol.max(1e-9) * v1.max(v2) {
        return Err(Error::NoCrossing(format!("K1 = {v1} and K2 = {v2} do not meet")));
    }
    Ok((h, kv))
}

/// Beesack's `K₁(p, q, k)` (left) or `K₂(p, q, k)` (right). With
/// `substituted` the first exponent is replaced by `pq`, as used for the
/// Hardy-type consequences.
pub fn beesack_k(
    e: &ExponentSet,
    r: &FunctionSpec,
    s: &FunctionSpec,
    interval: &Interval,
    side: Side,
    substituted: bool,
) -> Result<Estimate> {
    let q = e.q.ok_or_else(|| fail("exponent q is required"))?;
    let k = e.k.ok_or_else(|| fail("exponent k is required"))?;
    let p = if substituted { e.p * q } else { e.p };
    if !(k > 1.0) {
        return Err(fail(format!("k > 1 (got {k})")));
    }
    if !(p > 0.0) {
        return Err(fail(format!("p > 0 (got {p})")));
    }
    if !(q > 0.0 && q < k) {
        return Err(fail(format!("0 < q < k (q = {q}, k = {k})")));
    }
    beesack_kernel(p, q, k).eval(r, s, interval, interval, side, &Accuracy::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const UNIT: Interval = Interval { a: 0.0, b: 1.0 };

    fn one() -> FunctionSpec {
        FunctionSpec::constant(1.0)
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), *id);
            let json = serde_json::to_string(id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
        assert_eq!("T2_16".parse::<TheoremId>().unwrap(), TheoremId::T2_16);
        assert!("T2.24".parse::<TheoremId>().is_err());
        assert_eq!(TheoremId::ALL.len(), 32);
    }

    #[test]
    fn tails_and_heads() {
        assert_relative_eq!(r_tail(&one(), 0.0, &UNIT).unwrap(), 1.0);
        assert_eq!(r_tail(&one(), 1.0, &UNIT).unwrap(), 0.0);
        let r = FunctionSpec::power(2.0, 1.0);
        assert_relative_eq!(r_tail(&r, 0.5, &UNIT).unwrap(), 0.75, max_relative = 1e-14);
        assert_relative_eq!(r_head(&one(), 1.0, &UNIT).unwrap(), 1.0);
        assert_eq!(r_head(&one(), 0.0, &UNIT).unwrap(), 0.0);
        assert_relative_eq!(r_head(&r, 0.5, &UNIT).unwrap(), 0.25, max_relative = 1e-14);
        assert!(r_head(&r, 1.5, &UNIT).is_err());
    }

    #[test]
    fn catalog_examples() {
        let c = hardy_constant(
            TheoremId::T2_1,
            &one(),
            Some(&one()),
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap();
        assert_relative_eq!(c.value, 1.0 / 3.0, max_relative = 1e-10);
        assert_eq!(c.factors.len(), 1);
        assert_eq!(c.factors[0].0, "∫R²/s");

        let c = hardy_constant(
            TheoremId::T2_3,
            &one(),
            None,
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap();
        assert_relative_eq!(c.value, 1.0, max_relative = 1e-12);

        let c = hardy_constant(
            TheoremId::Hardy,
            &one(),
            None,
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap();
        assert_eq!(c.value, 4.0);

        let c = hardy_constant(
            TheoremId::T2_22,
            &one(),
            None,
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsDerived,
        )
        .unwrap();
        let expect = special::boyd_l(4.0, 2.0).unwrap().sqrt() * (1.0f64 / 3.0).sqrt();
        assert_relative_eq!(c.value, expect, max_relative = 1e-10);
        assert_eq!(c.prefactor, 3.0);
    }

    #[test]
    fn factor_product_identity() {
        let r = FunctionSpec::power(1.5, 0.7);
        let s = FunctionSpec::power(0.8, 0.3);
        for id in TheoremId::ALL {
            if *id == TheoremId::T2_13 {
                continue;
            }
            let c = hardy_constant(*id, &r, Some(&s), &id.default_exponents(), &UNIT, id.default_mode()).unwrap();
            let prod: f64 = c.factors.iter().map(|(_, v)| v).product();
            assert_relative_eq!(c.value, prod, max_relative = 1e-12);
            assert!(c.value > 0.0, "{id}");
        }
    }

    #[test]
    fn undiscrepant_modes_agree() {
        let r = FunctionSpec::power(1.2, 0.5);
        let s = FunctionSpec::power(0.9, 0.4);
        for id in TheoremId::ALL {
            if id.has_discrepancy() || *id == TheoremId::T2_13 {
                continue;
            }
            let e = id.default_exponents();
            let a = hardy_constant(*id, &r, Some(&s), &e, &UNIT, Mode::AsPrinted).unwrap();
            let b = hardy_constant(*id, &r, Some(&s), &e, &UNIT, Mode::AsDerived).unwrap();
            assert_eq!(a.value, b.value, "{id}");
        }
    }

    #[test]
    fn scaling_law() {
        let r = FunctionSpec::power(1.0, 1.0);
        let r3 = FunctionSpec::power(3.0, 1.0);
        let s = FunctionSpec::power(1.0, 0.5);
        let e = ExponentSet::new(2.0);
        let c = |id, r: &FunctionSpec| {
            hardy_constant(id, r, Some(&s), &e, &UNIT, Mode::AsPrinted)
                .unwrap()
                .value
        };
        assert_relative_eq!(
            c(TheoremId::T2_1, &r3),
            9.0 * c(TheoremId::T2_1, &r),
            max_relative = 1e-9
        );
        for id in [TheoremId::T2_3, TheoremId::T2_5, TheoremId::T2_11] {
            assert_relative_eq!(c(id, &r3), 3.0 * c(id, &r), max_relative = 1e-9);
        }
    }

    #[test]
    fn mirror_symmetry_for_symmetric_weights() {
        let r = FunctionSpec::piecewise_linear(&[(0.0, 1.0), (0.5, 2.0), (1.0, 1.0)]);
        let s = FunctionSpec::piecewise_linear(&[(0.0, 0.5), (0.3, 1.0), (0.7, 1.0), (1.0, 0.5)]);
        for id in TheoremId::ALL {
            let Some(m) = id.mirror() else { continue };
            let e = id.default_exponents();
            let mode = Mode::AsDerived;
            let a = hardy_constant(*id, &r, Some(&s), &e, &UNIT, mode);
            let b = hardy_constant(m, &r, Some(&s), &e, &UNIT, mode);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    // T2.27 printed differs from T2.28 printed; derived is symmetric.
                    assert_relative_eq!(a.value, b.value, max_relative = 1e-7)
                }
                (a, b) => panic!("{id}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn preconditions_are_named() {
        let e = hardy_constant(
            TheoremId::T2_11,
            &one(),
            None,
            &ExponentSet::new(1.5),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap_err();
        assert!(
            matches!(e, Error::PreconditionFailed(ref m) if m.contains("integer")),
            "{e}"
        );
        let e = hardy_constant(
            TheoremId::T2_7,
            &one(),
            Some(&one()),
            &ExponentSet::new(2.0).with_q(3.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap_err();
        assert!(matches!(e, Error::PreconditionFailed(ref m) if m.contains("1/p + 1/q")));
        let e = hardy_constant(
            TheoremId::T2_30,
            &one(),
            Some(&one()),
            &ExponentSet::new(2.0).with_k(3.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap_err();
        assert!(matches!(e, Error::PreconditionFailed(ref m) if m.contains("vacuous")));
        let zero_r = FunctionSpec::piecewise_linear(&[(0.0, 1.0), (0.5, 0.0), (1.0, 1.0)]);
        assert!(hardy_constant(
            TheoremId::T2_3,
            &zero_r,
            None,
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsPrinted
        )
        .is_err());
    }

    #[test]
    fn divergent_weight_integral_is_reported() {
        // ∫ 1/s diverges for s = x.
        let s = FunctionSpec::power(1.0, 1.0);
        let e = hardy_constant(
            TheoremId::T2_5,
            &one(),
            Some(&s),
            &ExponentSet::new(2.0),
            &UNIT,
            Mode::AsPrinted,
        )
        .unwrap_err();
        assert!(matches!(e, Error::NonIntegrable(_)), "{e:?}");
    }

    #[test]
    fn beesack_das_examples() {
        let e = ExponentSet::new(1.0).with_q(1.0);
        let k = beesack_das_k1(&e, &one(), &one(), &UNIT, &UNIT).unwrap();
        assert_relative_eq!(k.value, 0.5, max_relative = 1e-12);
        let two = Interval::new(0.0, 2.0).unwrap();
        let k = beesack_das_k1(&e, &one(), &one(), &two, &two).unwrap();
        assert_relative_eq!(k.value, 1.0, max_relative = 1e-12);
        let empty = Interval { a: 0.0, b: 0.0 };
        assert_eq!(beesack_das_k1(&e, &one(), &one(), &empty, &UNIT).unwrap().value, 0.0);
        let k2 = beesack_das_k2(&e, &one(), &one(), &UNIT, &UNIT).unwrap();
        assert_relative_eq!(k2.value, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn k2_mirrors_k1_on_reflected_weights() {
        let e = ExponentSet::new(1.5).with_q(0.8);
        let r = FunctionSpec::power(1.0, 0.7);
        let s = FunctionSpec::power(2.0, 0.4);
        let rr = FunctionSpec::shifted_power(1.0, 0.7);
        let sr = FunctionSpec::shifted_power(2.0, 0.4);
        let k1 = beesack_das_k1(&e, &r, &s, &UNIT, &UNIT).unwrap();
        let k2 = beesack_das_k2(&e, &rr, &sr, &UNIT, &UNIT).unwrap();
        assert_relative_eq!(k1.value, k2.value, max_relative = 1e-8);
    }

    #[test]
    fn balance_examples() {
        let e = ExponentSet::new(1.0).with_q(1.0);
        let (h, k) = beesack_das_balance(&e, &one(), &one(), &UNIT, 1e-10).unwrap();
        assert!((h - 0.5).abs() < 1e-8);
        assert!((k - 0.25).abs() < 1e-6);
        let two = Interval::new(0.0, 2.0).unwrap();
        let (h, _) = beesack_das_balance(&e, &one(), &one(), &two, 1e-10).unwrap();
        assert!((h - 1.0).abs() < 1e-8);
        let s = FunctionSpec::power(1.0, 1.0).clone();
        let s = FunctionSpec::Sum {
            terms: vec![s, FunctionSpec::constant(0.5)],
        };
        let (h, k) = beesack_das_balance(&e, &one(), &s, &UNIT, 1e-10).unwrap();
        let sub_l = Interval { a: 0.0, b: h };
        let sub_r = Interval { a: h, b: 1.0 };
        let k1 = beesack_das_k1(&e, &one(), &s, &sub_l, &UNIT).unwrap().value;
        let k2 = beesack_das_k2(&e, &one(), &s, &sub_r, &UNIT).unwrap().value;
        assert!((k1 - k2).abs() / k <= 1e-8);
    }

    #[test]
    fn beesack_k_examples() {
        let e = ExponentSet::new(1.0).with_q(1.0).with_k(2.0);
        let k = beesack_k(&e, &one(), &one(), &UNIT, Side::Left, false).unwrap();
        assert_relative_eq!(k.value, 0.5, max_relative = 1e-12);
        let at_k = ExponentSet::new(1.0).with_q(2.0).with_k(2.0);
        assert!(matches!(
            beesack_k(&at_k, &one(), &one(), &UNIT, Side::Left, false),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn sup_constants_grow_with_interval() {
        let r = FunctionSpec::power(1.0, 0.5);
        let e = ExponentSet::new(2.0);
        let mut last = 0.0;
        for b in [0.5, 1.0, 2.0] {
            let iv = Interval::new(0.0, b).unwrap();
            let c = hardy_constant(TheoremId::T2_3, &r, None, &e, &iv, Mode::AsPrinted)
                .unwrap()
                .value;
            assert!(c >= last);
            last = c;
        }
    }
}
