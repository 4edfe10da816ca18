//! Nonnegative functions on an interval: weights `r`, `s` and test functions
//! `f`, `y`.
//!
//! Functions come from a closed catalog ([`FunctionSpec`]) rather than
//! arbitrary callables. That lets the rest of the crate read off endpoint
//! power exponents (for singular quadrature), interior kinks (as panel
//! breakpoints) and, where they exist, exact antiderivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded open interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "interval endpoints must be finite, got ({a}, {b})"
            )));
        }
        if a >= b {
            return Err(Error::InvalidSpec(format!("interval requires a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    /// Image of `x` under the reflection `x -> a + b - x`.
    pub fn reflect(&self, x: f64) -> f64 {
        self.a + self.b - x
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.a, self.b).map(|_| ())
    }
}

fn default_true() -> bool {
    true
}

/// Catalog of nonnegative functions.
///
/// Power laws are anchored at an interval endpoint, so evaluation always
/// takes the interval as context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum FunctionSpec {
    /// `c (x - a)^alpha`
    PowerLaw {
        c: f64,
        alpha: f64,
    },
    /// `c (b - x)^alpha` (or `c (x - a)^alpha` when `from_right` is false)
    ShiftedPowerLaw {
        c: f64,
        alpha: f64,
        #[serde(default = "default_true")]
        from_right: bool,
    },
    /// `c exp(beta x)`
    Exponential {
        c: f64,
        beta: f64,
    },
    Constant {
        c: f64,
    },
    /// Linear interpolation through `(x, value)` knots.
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    Product {
        factors: Vec<FunctionSpec>,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn constant(c: f64) -> Self {
        Self::Constant { c }
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        Self::PowerLaw { c, alpha }
    }

    pub fn shifted_power(c: f64, alpha: f64) -> Self {
        Self::ShiftedPowerLaw {
            c,
            alpha,
            from_right: true,
        }
    }

    pub fn exponential(c: f64, beta: f64) -> Self {
        Self::Exponential { c, beta }
    }

    pub fn piecewise_linear(knots: &[(f64, f64)]) -> Self {
        Self::PiecewiseLinear {
            knots: knots.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    /// Checks the catalog invariants against `interval`.
    pub fn validate(&self, interval: &Interval) -> Result<()> {
        interval.validate()?;
        let nonneg_coeff = |c: f64, what: &str| {
            if c.is_finite() && c >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{what} coefficient must be finite and nonnegative, got {c}"
                )))
            }
        };
        match self {
            Self::PowerLaw { c, alpha } | Self::ShiftedPowerLaw { c, alpha, .. } => {
                nonneg_coeff(*c, "power law")?;
                if !alpha.is_finite() {
                    return Err(Error::InvalidSpec(format!("exponent {alpha} is not finite")));
                }
                Ok(())
            }
            Self::Exponential { c, beta } => {
                nonneg_coeff(*c, "exponential")?;
                if !beta.is_finite() {
                    return Err(Error::InvalidSpec(format!("rate {beta} is not finite")));
                }
                Ok(())
            }
            Self::Constant { c } => nonneg_coeff(*c, "constant"),
            Self::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidSpec(
                        "piecewise linear function needs at least two knots".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if !(w[1][0] > w[0][0]) {
                        return Err(Error::InvalidSpec(format!(
                            "knots must be strictly increasing in x ({} then {})",
                            w[0][0], w[1][0]
                        )));
                    }
                }
                if let Some(k) = knots.iter().find(|k| !(k[1].is_finite() && k[1] >= 0.0)) {
                    return Err(Error::InvalidSpec(format!(
                        "knot value {} at x = {} is negative or not finite",
                        k[1], k[0]
                    )));
                }
                let slack = 1e-12 * interval.len();
                if knots[0][0] > interval.a + slack || knots[knots.len() - 1][0] < interval.b - slack {
                    return Err(Error::InvalidSpec(format!(
                        "knots span [{}, {}] but must cover [{}, {}]",
                        knots[0][0],
                        knots[knots.len() - 1][0],
                        interval.a,
                        interval.b
                    )));
                }
                Ok(())
            }
            Self::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpec("empty product".into()));
                }
                factors.iter().try_for_each(|f| f.validate(interval))
            }
            Self::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("empty sum".into()));
                }
                terms.iter().try_for_each(|f| f.validate(interval))
            }
        }
    }

    /// Unchecked evaluation; callers validate once up front.
    pub fn eval(&self, x: f64, interval: &Interval) -> f64 {
        match self {
            Self::PowerLaw { c, alpha } => anchored_power(*c, *alpha, x - interval.a),
            Self::ShiftedPowerLaw { c, alpha, from_right } => {
                let d = if *from_right { interval.b - x } else { x - interval.a };
                anchored_power(*c, *alpha, d)
            }
            Self::Exponential { c, beta } => c * (beta * x).exp(),
            Self::Constant { c } => *c,
            Self::PiecewiseLinear { knots } => pwl_eval(knots, x),
            Self::Product { factors } => factors.iter().map(|f| f.eval(x, interval)).product(),
            Self::Sum { terms } => terms.iter().map(|f| f.eval(x, interval)).sum(),
        }
    }

    /// Leading power exponents `(left, right)` at the interval endpoints:
    /// the function behaves like `(x - a)^left` near `a` and `(b - x)^right`
    /// near `b`. Zero means bounded and nonvanishing (or not known to vanish).
    pub fn endpoint_exponents(&self, interval: &Interval) -> (f64, f64) {
        match self {
            Self::PowerLaw { c, alpha } => {
                if *c == 0.0 {
                    (0.0, 0.0)
                } else {
                    (*alpha, 0.0)
                }
            }
            Self::ShiftedPowerLaw { c, alpha, from_right } => {
                if *c == 0.0 {
                    (0.0, 0.0)
                } else if *from_right {
                    (0.0, *alpha)
                } else {
                    (*alpha, 0.0)
                }
            }
            Self::Exponential { .. } | Self::Constant { .. } => (0.0, 0.0),
            Self::PiecewiseLinear { knots } => {
                let left = if pwl_eval(knots, interval.a) == 0.0 { 1.0 } else { 0.0 };
                let right = if pwl_eval(knots, interval.b) == 0.0 { 1.0 } else { 0.0 };
                (left, right)
            }
            Self::Product { factors } => factors.iter().fold((0.0, 0.0), |acc, f| {
                let (l, r) = f.endpoint_exponents(interval);
                (acc.0 + l, acc.1 + r)
            }),
            Self::Sum { terms } => terms.iter().fold((f64::INFINITY, f64::INFINITY), |acc, f| {
                let (l, r) = f.endpoint_exponents(interval);
                (acc.0.min(l), acc.1.min(r))
            }),
        }
    }

    /// Interior points where the function (or a derivative) has a kink.
    pub fn breakpoints(&self, interval: &Interval) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breaks(interval, &mut out);
        out.sort_by(|x, y| x.total_cmp(y));
        out.dedup();
        out
    }

    fn collect_breaks(&self, interval: &Interval, out: &mut Vec<f64>) {
        match self {
            Self::PiecewiseLinear { knots } => {
                out.extend(knots.iter().map(|k| k[0]).filter(|&x| x > interval.a && x < interval.b))
            }
            Self::Product { factors } => factors.iter().for_each(|f| f.collect_breaks(interval, out)),
            Self::Sum { terms } => terms.iter().for_each(|f| f.collect_breaks(interval, out)),
            _ => {}
        }
    }

    /// `self^e` when it stays inside the catalog.
    pub fn powf(&self, e: f64) -> Option<FunctionSpec> {
        match self {
            Self::Constant { c } => Some(Self::Constant { c: c.powf(e) }),
            Self::PowerLaw { c, alpha } => Some(Self::PowerLaw {
                c: c.powf(e),
                alpha: alpha * e,
            }),
            Self::ShiftedPowerLaw { c, alpha, from_right } => Some(Self::ShiftedPowerLaw {
                c: c.powf(e),
                alpha: alpha * e,
                from_right: *from_right,
            }),
            Self::Exponential { c, beta } => Some(Self::Exponential {
                c: c.powf(e),
                beta: beta * e,
            }),
            Self::Product { factors } => factors
                .iter()
                .map(|f| f.powf(e))
                .collect::<Option<Vec<_>>>()
                .map(|factors| Self::Product { factors }),
            Self::PiecewiseLinear { .. } | Self::Sum { .. } => None,
        }
    }

    /// Whether the function has a kink in the open interval.
    pub fn has_interior_kink(&self, interval: &Interval) -> bool {
        match self {
            Self::PiecewiseLinear { knots } => knots.windows(3).any(|w| {
                let inside = w[1][0] > interval.a && w[1][0] < interval.b;
                let s0 = (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]);
                let s1 = (w[2][1] - w[1][1]) / (w[2][0] - w[1][0]);
                inside && (s1 - s0).abs() > 1e-14 * (s0.abs() + s1.abs() + 1.0)
            }),
            Self::Product { factors } => factors.iter().any(|f| f.has_interior_kink(interval)),
            Self::Sum { terms } => terms.iter().any(|f| f.has_interior_kink(interval)),
            _ => false,
        }
    }

    /// Exact a.e. derivative.
    pub fn derivative(&self) -> ClosedForm {
        match self {
            Self::Constant { .. } => ClosedForm::Spec(Self::Constant { c: 0.0 }),
            Self::PowerLaw { c, alpha } => {
                if *alpha == 0.0 {
                    ClosedForm::Spec(Self::Constant { c: 0.0 })
                } else {
                    ClosedForm::scaled(
                        *alpha,
                        ClosedForm::Spec(Self::PowerLaw {
                            c: *c,
                            alpha: alpha - 1.0,
                        }),
                    )
                }
            }
            Self::ShiftedPowerLaw { c, alpha, from_right } => {
                if *alpha == 0.0 {
                    return ClosedForm::Spec(Self::Constant { c: 0.0 });
                }
                let sign = if *from_right { -1.0 } else { 1.0 };
                ClosedForm::scaled(
                    sign * alpha,
                    ClosedForm::Spec(Self::ShiftedPowerLaw {
                        c: *c,
                        alpha: alpha - 1.0,
                        from_right: *from_right,
                    }),
                )
            }
            Self::Exponential { c, beta } => {
                ClosedForm::scaled(*beta, ClosedForm::Spec(Self::Exponential { c: *c, beta: *beta }))
            }
            Self::PiecewiseLinear { knots } => ClosedForm::Steps {
                knots: knots.iter().map(|k| k[0]).collect(),
                values: knots
                    .windows(2)
                    .map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]))
                    .collect(),
            },
            Self::Sum { terms } => ClosedForm::Sum(terms.iter().map(|t| t.derivative()).collect()),
            Self::Product { factors } => ClosedForm::Sum(
                (0..factors.len())
                    .map(|i| {
                        ClosedForm::Product(
                            factors
                                .iter()
                                .enumerate()
                                .map(|(j, f)| {
                                    if i == j {
                                        f.derivative()
                                    } else {
                                        ClosedForm::Spec(f.clone())
                                    }
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        }
    }
}

fn anchored_power(c: f64, alpha: f64, d: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if d <= 0.0 {
        return if alpha < 0.0 {
            f64::INFINITY
        } else if alpha == 0.0 {
            c
        } else {
            0.0
        };
    }
    c * d.powf(alpha)
}

fn pwl_eval(knots: &[[f64; 2]], x: f64) -> f64 {
    let n = knots.len();
    if x <= knots[0][0] {
        return knots[0][1];
    }
    if x >= knots[n - 1][0] {
        return knots[n - 1][1];
    }
    let i = knots.partition_point(|k| k[0] <= x).max(1) - 1;
    let [x0, y0] = knots[i];
    let [x1, y1] = knots[i + 1];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Checked evaluation of `spec` at `x`.
///
/// A power law with negative exponent evaluated at its anchor returns
/// `f64::INFINITY` rather than NaN.
pub fn evaluate(spec: &FunctionSpec, x: f64, interval: &Interval) -> Result<f64> {
    spec.validate(interval)?;
    if !interval.contains(x) {
        return Err(Error::Domain {
            x,
            a: interval.a,
            b: interval.b,
        });
    }
    Ok(spec.eval(x, interval))
}

/// Signed closed-form expressions produced by differentiating or integrating
/// catalog functions. Unlike [`FunctionSpec`] these may be negative.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    Spec(FunctionSpec),
    Scaled {
        scale: f64,
        inner: Box<ClosedForm>,
    },
    Offset {
        offset: f64,
        inner: Box<ClosedForm>,
    },
    Sum(Vec<ClosedForm>),
    Product(Vec<ClosedForm>),
    /// `base[i] + slope[i] (x - x_i) + curv[i] (x - x_i)^2` on `[x_i, x_{i+1}]`.
    PiecewiseQuadratic {
        knots: Vec<f64>,
        base: Vec<f64>,
        slope: Vec<f64>,
        curv: Vec<f64>,
    },
    /// Right-continuous step function with `values[i]` on `[x_i, x_{i+1})`.
    Steps {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl ClosedForm {
    fn scaled(scale: f64, inner: ClosedForm) -> Self {
        Self::Scaled {
            scale,
            inner: Box::new(inner),
        }
    }

    fn offset(offset: f64, inner: ClosedForm) -> Self {
        Self::Offset {
            offset,
            inner: Box::new(inner),
        }
    }

    pub fn eval(&self, x: f64, interval: &Interval) -> f64 {
        match self {
            Self::Spec(s) => s.eval(x, interval),
            Self::Scaled { scale, inner } => scale * inner.eval(x, interval),
            Self::Offset { offset, inner } => offset + inner.eval(x, interval),
            Self::Sum(terms) => terms.iter().map(|t| t.eval(x, interval)).sum(),
            Self::Product(factors) => factors.iter().map(|t| t.eval(x, interval)).product(),
            Self::PiecewiseQuadratic {
                knots,
                base,
                slope,
                curv,
            } => {
                let n = base.len();
                let i = knots.partition_point(|&k| k <= x).clamp(1, n) - 1;
                let d = x - knots[i];
                base[i] + d * (slope[i] + d * curv[i])
            }
            Self::Steps { knots, values } => {
                let n = values.len();
                let i = knots.partition_point(|&k| k <= x).clamp(1, n) - 1;
                values[i]
            }
        }
    }
}

/// Exact antiderivative `G` with `G(a) = 0` where that is finite.
///
/// Returns `None` for products and for `PowerLaw` with exponent -1.
pub fn closed_antiderivative(spec: &FunctionSpec, interval: &Interval) -> Option<ClosedForm> {
    let Interval { a, b } = *interval;
    match spec {
        FunctionSpec::Constant { c } => Some(ClosedForm::Spec(FunctionSpec::PowerLaw { c: *c, alpha: 1.0 })),
        FunctionSpec::PowerLaw { c, alpha }
        | FunctionSpec::ShiftedPowerLaw {
            c,
            alpha,
            from_right: false,
        } => {
            if *alpha == -1.0 {
                None
            } else if *alpha > -1.0 {
                Some(ClosedForm::Spec(FunctionSpec::PowerLaw {
                    c: c / (alpha + 1.0),
                    alpha: alpha + 1.0,
                }))
            } else {
                Some(ClosedForm::scaled(
                    1.0 / (alpha + 1.0),
                    ClosedForm::Spec(FunctionSpec::PowerLaw {
                        c: *c,
                        alpha: alpha + 1.0,
                    }),
                ))
            }
        }
        FunctionSpec::ShiftedPowerLaw {
            c,
            alpha,
            from_right: true,
        } => {
            if *alpha == -1.0 {
                return None;
            }
            let e = alpha + 1.0;
            Some(ClosedForm::offset(
                c * (b - a).powf(e) / e,
                ClosedForm::scaled(-1.0 / e, ClosedForm::Spec(FunctionSpec::shifted_power(*c, e))),
            ))
        }
        FunctionSpec::Exponential { c, beta } => {
            if *beta == 0.0 {
                Some(ClosedForm::Spec(FunctionSpec::PowerLaw { c: *c, alpha: 1.0 }))
            } else {
                Some(ClosedForm::offset(
                    -(c / beta) * (beta * a).exp(),
                    ClosedForm::scaled(1.0 / beta, ClosedForm::Spec(spec.clone())),
                ))
            }
        }
        FunctionSpec::PiecewiseLinear { knots } => {
            let n = knots.len();
            let mut xs = Vec::with_capacity(n);
            let mut base = Vec::with_capacity(n - 1);
            let mut slope = Vec::with_capacity(n - 1);
            let mut curv = Vec::with_capacity(n - 1);
            let mut acc = 0.0;
            for w in knots.windows(2) {
                let [x0, y0] = w[0];
                let [x1, y1] = w[1];
                xs.push(x0);
                base.push(acc);
                slope.push(y0);
                curv.push(0.5 * (y1 - y0) / (x1 - x0));
                acc += 0.5 * (y0 + y1) * (x1 - x0);
            }
            xs.push(knots[n - 1][0]);
            let raw = ClosedForm::PiecewiseQuadratic {
                knots: xs,
                base,
                slope,
                curv,
            };
            let at_a = raw.eval(a, interval);
            Some(if at_a == 0.0 {
                raw
            } else {
                ClosedForm::offset(-at_a, raw)
            })
        }
        FunctionSpec::Sum { terms } => terms
            .iter()
            .map(|t| closed_antiderivative(t, interval))
            .collect::<Option<Vec<_>>>()
            .map(ClosedForm::Sum),
        FunctionSpec::Product { .. } => None,
    }
}

/// Which endpoints a generated piecewise-linear member must vanish at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinZero {
    #[default]
    None,
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    RandomPiecewiseLinear {
        n_knots: usize,
        value_range: (f64, f64),
        #[serde(default)]
        pin_zero: PinZero,
    },
    RandomPowerLaw {
        alpha_range: (f64, f64),
        c_range: (f64, f64),
    },
    GridPowerLaw {
        alphas: Vec<f64>,
    },
}

/// A seeded generator of [`FunctionSpec`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    fn validate(&self) -> Result<()> {
        let range = |(lo, hi): (f64, f64), what: &str| {
            if lo.is_finite() && hi.is_finite() && lo <= hi {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("empty {what} range [{lo}, {hi}]")))
            }
        };
        match &self.kind {
            FamilyKind::RandomPiecewiseLinear {
                n_knots, value_range, ..
            } => {
                if *n_knots < 2 {
                    return Err(Error::InvalidSpec("need at least two knots".into()));
                }
                range(*value_range, "value")?;
                if value_range.0 < 0.0 || value_range.1 <= 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "value range {value_range:?} must be nonnegative with positive upper end"
                    )));
                }
                Ok(())
            }
            FamilyKind::RandomPowerLaw { alpha_range, c_range } => {
                range(*alpha_range, "exponent")?;
                range(*c_range, "coefficient")?;
                if c_range.0 < 0.0 {
                    return Err(Error::InvalidSpec("coefficients must be nonnegative".into()));
                }
                Ok(())
            }
            FamilyKind::GridPowerLaw { alphas } => {
                if alphas.is_empty() {
                    Err(Error::InvalidSpec("empty exponent grid".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Endless deterministic stream of members; `sample_family` takes a prefix.
    pub fn sampler(&self, interval: Interval) -> Result<FamilySampler> {
        self.validate()?;
        interval.validate()?;
        Ok(FamilySampler {
            kind: self.kind.clone(),
            interval,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            index: 0,
        })
    }
}

pub struct FamilySampler {
    kind: FamilyKind,
    interval: Interval,
    rng: ChaCha8Rng,
    index: usize,
}

impl FamilySampler {
    /// Exposes the stream's generator for callers that draw auxiliary values
    /// in lockstep with members.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Iterator for FamilySampler {
    type Item = FunctionSpec;

    fn next(&mut self) -> Option<FunctionSpec> {
        let Interval { a, b } = self.interval;
        let rng = &mut self.rng;
        let spec = match &self.kind {
            FamilyKind::RandomPiecewiseLinear {
                n_knots,
                value_range: (lo, hi),
                pin_zero,
            } => {
                let min_gap = 1e-3 * (b - a) / *n_knots as f64;
                let mut xs: Vec<f64>;
                loop {
                    xs = (0..n_knots - 2).map(|_| rng.gen_range(a..b)).collect();
                    xs.push(a);
                    xs.push(b);
                    xs.sort_by(|p, q| p.total_cmp(q));
                    if xs.windows(2).all(|w| w[1] - w[0] > min_gap) {
                        break;
                    }
                }
                let last = xs.len() - 1;
                let knots = xs
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let pinned = match pin_zero {
                            PinZero::None => false,
                            PinZero::Left => i == 0,
                            PinZero::Right => i == last,
                            PinZero::Both => i == 0 || i == last,
                        };
                        let y = if pinned {
                            0.0
                        } else if i == 0 || i == last {
                            loop {
                                let y = rng.gen_range(*lo..=*hi);
                                if y > 0.0 {
                                    break y;
                                }
                            }
                        } else {
                            rng.gen_range(*lo..=*hi)
                        };
                        [x, y]
                    })
                    .collect();
                FunctionSpec::PiecewiseLinear { knots }
            }
            FamilyKind::RandomPowerLaw {
                alpha_range: (alo, ahi),
                c_range: (clo, chi),
            } => FunctionSpec::PowerLaw {
                alpha: rng.gen_range(*alo..=*ahi),
                c: rng.gen_range(*clo..=*chi),
            },
            FamilyKind::GridPowerLaw { alphas } => FunctionSpec::PowerLaw {
                c: 1.0,
                alpha: alphas[self.index % alphas.len()],
            },
        };
        self.index += 1;
        Some(spec)
    }
}

/// First `count` members of a seeded family on `interval`.
pub fn sample_family(family: &FamilySpec, count: usize, interval: Interval) -> Result<Vec<FunctionSpec>> {
    if count == 0 {
        return Err(Error::InvalidSpec("count must be at least 1".into()));
    }
    Ok(family.sampler(interval)?.take(count).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const UNIT: Interval = Interval { a: 0.0, b: 1.0 };

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&FunctionSpec::constant(1.0), 0.5, &UNIT).unwrap(), 1.0);
        assert_eq!(evaluate(&FunctionSpec::power(1.0, 2.0), 0.5, &UNIT).unwrap(), 0.25);
        let hat = FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        assert_eq!(evaluate(&hat, 0.25, &UNIT).unwrap(), 0.5);
    }

    #[test]
    fn singular_power_at_anchor_is_infinite() {
        let v = evaluate(&FunctionSpec::power(2.0, -0.5), 0.0, &UNIT).unwrap();
        assert!(v.is_infinite() && v > 0.0);
        let v = evaluate(&FunctionSpec::shifted_power(1.0, -0.3), 1.0, &UNIT).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn evaluate_rejects_outside_points_and_bad_specs() {
        assert!(matches!(
            evaluate(&FunctionSpec::constant(1.0), 1.5, &UNIT),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            evaluate(&FunctionSpec::constant(-1.0), 0.5, &UNIT),
            Err(Error::InvalidSpec(_))
        ));
        let unsorted = FunctionSpec::piecewise_linear(&[(0.0, 1.0), (0.6, 1.0), (0.5, 1.0), (1.0, 0.0)]);
        assert!(matches!(unsorted.validate(&UNIT), Err(Error::InvalidSpec(_))));
        let short = FunctionSpec::piecewise_linear(&[(0.0, 1.0), (0.5, 1.0)]);
        assert!(short.validate(&UNIT).is_err());
        assert!(FunctionSpec::Product { factors: vec![] }.validate(&UNIT).is_err());
    }

    #[test]
    fn antiderivative_examples() {
        let g = closed_antiderivative(&FunctionSpec::constant(3.0), &UNIT).unwrap();
        assert_relative_eq!(g.eval(0.4, &UNIT), 1.2, max_relative = 1e-15);
        let g = closed_antiderivative(&FunctionSpec::power(1.0, 2.5), &UNIT).unwrap();
        assert_relative_eq!(g.eval(0.7, &UNIT), 0.7f64.powf(3.5) / 3.5, max_relative = 1e-14);
        let prod = FunctionSpec::Product {
            factors: vec![FunctionSpec::power(1.0, 1.0), FunctionSpec::power(1.0, 2.0)],
        };
        assert!(closed_antiderivative(&prod, &UNIT).is_none());
        assert!(closed_antiderivative(&FunctionSpec::power(1.0, -1.0), &UNIT).is_none());
    }

    #[test]
    fn pwl_antiderivative_is_triangle_area() {
        let hat = FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]);
        let g = closed_antiderivative(&hat, &UNIT).unwrap();
        assert_relative_eq!(g.eval(1.0, &UNIT), 0.25, max_relative = 1e-15);
        assert_relative_eq!(g.eval(0.5, &UNIT), 0.125, max_relative = 1e-15);
        assert_eq!(g.eval(0.0, &UNIT), 0.0);
    }

    #[test]
    fn pwl_antiderivative_anchors_at_interval_start() {
        let iv = Interval::new(0.5, 2.0).unwrap();
        let f = FunctionSpec::piecewise_linear(&[(0.0, 1.0), (1.0, 3.0), (2.0, 3.0)]);
        let g = closed_antiderivative(&f, &iv).unwrap();
        assert_eq!(g.eval(0.5, &iv), 0.0);
        // ∫_{0.5}^{1} (1 + 2x) dx + ∫_1^2 3 dx = 1.25 + 3
        assert_relative_eq!(g.eval(2.0, &iv), 4.25, max_relative = 1e-14);
    }

    #[test]
    fn derivative_of_hat_is_signed_steps() {
        let hat = FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        let d = hat.derivative();
        assert_eq!(d.eval(0.2, &UNIT), 2.0);
        assert_eq!(d.eval(0.7, &UNIT), -2.0);
        assert!(hat.has_interior_kink(&UNIT));
        let line = FunctionSpec::piecewise_linear(&[(0.0, 0.0), (1.0, 2.0)]);
        assert!(!line.has_interior_kink(&UNIT));
    }

    #[test]
    fn product_rule_derivative() {
        // x (1 - x)
        let f = FunctionSpec::Product {
            factors: vec![FunctionSpec::power(1.0, 1.0), FunctionSpec::shifted_power(1.0, 1.0)],
        };
        let d = f.derivative();
        for &x in &[0.1, 0.5, 0.9] {
            assert_relative_eq!(d.eval(x, &UNIT), 1.0 - 2.0 * x, epsilon = 1e-15);
        }
    }

    #[test]
    fn endpoint_exponents_and_breaks() {
        let f = FunctionSpec::Product {
            factors: vec![FunctionSpec::power(1.0, -0.5), FunctionSpec::shifted_power(2.0, 1.5)],
        };
        assert_eq!(f.endpoint_exponents(&UNIT), (-0.5, 1.5));
        let hat = FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.3, 1.0), (0.8, 0.5), (1.0, 0.2)]);
        assert_eq!(hat.endpoint_exponents(&UNIT), (1.0, 0.0));
        assert_eq!(hat.breakpoints(&UNIT), vec![0.3, 0.8]);
    }

    #[test]
    fn serde_discriminator() {
        let spec = FunctionSpec::power(2.0, -0.25);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"variant\":\"PowerLaw\""), "{json}");
        let back: FunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let sp: FunctionSpec = serde_json::from_str(r#"{"variant":"ShiftedPowerLaw","c":1.0,"alpha":2.0}"#).unwrap();
        assert_eq!(sp, FunctionSpec::shifted_power(1.0, 2.0));
    }

    #[test]
    fn sample_family_examples() {
        let fam = FamilySpec::new(
            FamilyKind::RandomPiecewiseLinear {
                n_knots: 4,
                value_range: (0.0, 1.0),
                pin_zero: PinZero::None,
            },
            7,
        );
        let a = sample_family(&fam, 3, UNIT).unwrap();
        let b = sample_family(&fam, 3, UNIT).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_ne!(a[1], a[2]);
        for s in &a {
            s.validate(&UNIT).unwrap();
            assert!(s.eval(0.0, &UNIT) > 0.0 && s.eval(1.0, &UNIT) > 0.0);
        }

        let grid = FamilySpec::new(
            FamilyKind::GridPowerLaw {
                alphas: vec![0.0, 1.0, 2.0],
            },
            0,
        );
        let g = sample_family(&grid, 3, UNIT).unwrap();
        assert_eq!(
            g,
            vec![
                FunctionSpec::power(1.0, 0.0),
                FunctionSpec::power(1.0, 1.0),
                FunctionSpec::power(1.0, 2.0)
            ]
        );

        let ten_a = sample_family(&fam, 10, UNIT).unwrap();
        let ten_b = sample_family(&fam, 10, UNIT).unwrap();
        assert_eq!(ten_a, ten_b);
    }

    #[test]
    fn pinned_members_vanish() {
        let fam = FamilySpec::new(
            FamilyKind::RandomPiecewiseLinear {
                n_knots: 5,
                value_range: (0.0, 2.0),
                pin_zero: PinZero::Both,
            },
            11,
        );
        for s in sample_family(&fam, 20, UNIT).unwrap() {
            assert_eq!(s.eval(0.0, &UNIT), 0.0);
            assert_eq!(s.eval(1.0, &UNIT), 0.0);
        }
    }

    #[test]
    fn sample_family_rejects_empty_ranges() {
        let bad = FamilySpec::new(
            FamilyKind::RandomPowerLaw {
                alpha_range: (2.0, 1.0),
                c_range: (1.0, 1.0),
            },
            1,
        );
        assert!(matches!(sample_family(&bad, 2, UNIT), Err(Error::InvalidSpec(_))));
        let empty = FamilySpec::new(FamilyKind::GridPowerLaw { alphas: vec![] }, 1);
        assert!(sample_family(&empty, 1, UNIT).is_err());
        let ok = FamilySpec::new(FamilyKind::GridPowerLaw { alphas: vec![1.0] }, 1);
        assert!(sample_family(&ok, 0, UNIT).is_err());
    }
}
