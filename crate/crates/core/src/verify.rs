//! Theorem verification: both sides of each inequality, seeded sweeps over
//! function families, and a derivative-free worst-case search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    hardy_constant_with, inequality_form, resolve_exponents, ConstantBreakdown, ExponentSet, InequalityForm, Lhs,
    Primitive, RhsWeight, TheoremId,
};
use crate::error::{Error, Result};
use crate::funcspace::{FamilySpec, FunctionSpec, Interval};
use crate::opial::{verify_variant_with, LemmaInstance, OpialVariant, TestPath};
use crate::quad::{Accuracy, QuadResult, Shape};
use crate::{Estimate, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Violated,
    Inconclusive,
}

/// `Holds` if `ratio ≤ 1 + budget`, `Violated` if `ratio > 1 + 10·budget`.
pub fn classify(ratio: f64, budget: f64) -> Status {
    if !ratio.is_finite() || ratio < 0.0 || !budget.is_finite() {
        Status::Inconclusive
    } else if ratio <= 1.0 + budget {
        Status::Holds
    } else if ratio > 1.0 + 10.0 * budget {
        Status::Violated
    } else {
        Status::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremInstance {
    pub id: TheoremId,
    pub r: FunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<FunctionSpec>,
    pub f: FunctionSpec,
    pub exponents: ExponentSet,
    pub interval: Interval,
    pub mode: Mode,
}

impl TheoremInstance {
    pub fn new(id: TheoremId, r: FunctionSpec, f: FunctionSpec, interval: Interval) -> Self {
        Self {
            id,
            r,
            s: None,
            f,
            exponents: id.default_exponents(),
            interval,
            mode: id.default_mode(),
        }
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

    fn validate(&self) -> Result<()> {
        self.interval.validate()?;
        self.f.validate(&self.interval)?;
        if self.id.uses_r() {
            self.r.validate(&self.interval)?;
        }
        match (&self.s, self.id.uses_s()) {
            (Some(s), true) => s.validate(&self.interval),
            (None, true) => Err(Error::PreconditionFailed(format!("{} needs a weight s", self.id))),
            (Some(_), false) => Err(Error::PreconditionFailed(format!("{} takes no weight s", self.id))),
            (None, false) => Ok(()),
        }
    }
}

/// Outcome of re-running a violated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triage {
    pub tight_ratio: Option<f64>,
    pub tight_status: Status,
    pub alternate_mode: Mode,
    pub alternate_ratio: Option<f64>,
    pub alternate_status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: TheoremInstance,
    pub lhs: f64,
    /// Right-hand side integral with the displayed outer power.
    pub rhs_core: f64,
    pub constant: f64,
    /// Scalar in front of the constant (e.g. `p + 1`).
    pub prefactor: f64,
    pub ratio: f64,
    pub status: Status,
    pub error_budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<ConstantBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triage: Option<Triage>,
}

impl VerificationReport {
    fn inconclusive(instance: TheoremInstance, reason: String) -> Self {
        Self {
            instance,
            lhs: f64::NAN,
            rhs_core: f64::NAN,
            constant: f64::NAN,
            prefactor: f64::NAN,
            ratio: f64::NAN,
            status: Status::Inconclusive,
            error_budget: f64::NAN,
            breakdown: None,
            reason: Some(reason),
            triage: None,
        }
    }
}

fn lhs_estimate(inst: &TheoremInstance, form: &InequalityForm, acc: &Accuracy) -> Result<Estimate> {
    let iv = inst.interval;
    let side = inst.id.side();
    let fp = Primitive::of(&inst.f, 1.0, &iv, acc)?;
    let phi_shape = fp.running_shape(side);
    let r = &inst.r;
    let r_shape = Shape::of(r, &iv);
    let outer = |m: f64| -> Result<Estimate> {
        let shape = r_shape.times(&phi_shape.pow(m));
        let g = |x: f64| {
            let phi = fp.running(side, x);
            if phi == 0.0 {
                0.0
            } else {
                r.eval(x, &iv) * phi.powf(m)
            }
        };
        let q = acc.integrate(&g, &shape, &iv)?;
        Ok(Estimate {
            value: q.value,
            rel_error: q.rel_error() + m * fp.rel_error,
        })
    };
    Ok(match form.lhs {
        Lhs::SquaredIntegral => outer(1.0)?.powf(2.0),
        Lhs::Power { m } => outer(m)?,
        Lhs::Root { m } => outer(m)?.powf(1.0 / m),
        Lhs::HardyMean { p } => {
            let shape = phi_shape.times(&Shape::new(-1.0, 0.0)).pow(p);
            let g = |x: f64| {
                let d = x - iv.a;
                if d <= 0.0 {
                    return 0.0;
                }
                (fp.running(side, x) / d).powf(p)
            };
            let q = acc.integrate(&g, &shape, &iv)?;
            Estimate {
                value: q.value,
                rel_error: q.rel_error() + p * fp.rel_error,
            }
        }
    })
}

fn rhs_estimate(inst: &TheoremInstance, form: &InequalityForm, acc: &Accuracy) -> Result<Estimate> {
    let iv = inst.interval;
    let side = inst.id.side();
    let k = form.f_power;
    let f = &inst.f;
    let mut shape = Shape::of(f, &iv).pow(k);
    let rp = match form.weight {
        RhsWeight::R | RhsWeight::RS => Some(Primitive::of(&inst.r, 1.0, &iv, acc)?),
        _ => None,
    };
    let s = inst.s.as_ref();
    match form.weight {
        RhsWeight::One => {}
        RhsWeight::S => shape = shape.times(&Shape::of(s.expect("validated"), &iv)),
        RhsWeight::R => shape = shape.times(&rp.as_ref().expect("built").weight_shape(side)),
        RhsWeight::RS => {
            shape = shape
                .times(&rp.as_ref().expect("built").weight_shape(side))
                .times(&Shape::of(s.expect("validated"), &iv))
        }
    }
    let g = |x: f64| {
        let fv = f.eval(x, &iv);
        if fv == 0.0 {
            return 0.0;
        }
        let w = match form.weight {
            RhsWeight::One => 1.0,
            RhsWeight::S => s.expect("validated").eval(x, &iv),
            RhsWeight::R => rp.as_ref().expect("built").weight(side, x),
            RhsWeight::RS => rp.as_ref().expect("built").weight(side, x) * s.expect("validated").eval(x, &iv),
        };
        w * fv.powf(k)
    };
    let q = acc.integrate(&g, &shape, &iv)?;
    let extra = rp.as_ref().map_or(0.0, |p| p.rel_error);
    Ok(Estimate {
        value: q.value,
        rel_error: q.rel_error() + extra,
    }
    .powf(form.outer))
}

fn to_quad(e: Estimate) -> QuadResult {
    QuadResult {
        value: e.value,
        abs_error_estimate: e.abs_error(),
        subdivisions: 0,
    }
}

fn form_of(inst: &TheoremInstance) -> Result<InequalityForm> {
    let ex = resolve_exponents(inst.id, &inst.exponents, inst.mode)?;
    Ok(inequality_form(inst.id, &ex, inst.mode))
}

/// Left-hand side of the theorem, with its displayed outer power.
pub fn assemble_lhs(inst: &TheoremInstance) -> Result<QuadResult> {
    inst.validate()?;
    Ok(to_quad(lhs_estimate(inst, &form_of(inst)?, &Accuracy::default())?))
}

/// Right-hand side integral (without the constant), with its outer power.
pub fn assemble_rhs(inst: &TheoremInstance) -> Result<QuadResult> {
    inst.validate()?;
    Ok(to_quad(rhs_estimate(inst, &form_of(inst)?, &Accuracy::default())?))
}

fn is_structural(e: &Error) -> bool {
    matches!(
        e,
        Error::PreconditionFailed(_) | Error::InvalidSpec(_) | Error::UnknownId(_) | Error::Domain { .. }
    )
}

fn evaluate(inst: &TheoremInstance, acc: &Accuracy, constant: Option<ConstantBreakdown>) -> Result<VerificationReport> {
    inst.validate()?;
    let form = form_of(inst)?;
    let constant = match constant {
        Some(c) => c,
        None => match hardy_constant_with(
            inst.id,
            &inst.r,
            inst.s.as_ref(),
            &inst.exponents,
            &inst.interval,
            inst.mode,
            acc,
        ) {
            Ok(c) => c,
            Err(e) if is_structural(&e) => return Err(e),
            Err(e) => return Ok(VerificationReport::inconclusive(inst.clone(), format!("constant: {e}"))),
        },
    };
    let sides = lhs_estimate(inst, &form, acc).and_then(|l| Ok((l, rhs_estimate(inst, &form, acc)?)));
    let (lhs, rhs) = match sides {
        Ok(v) => v,
        Err(e) if is_structural(&e) => return Err(e),
        Err(e) => {
            let mut rep = VerificationReport::inconclusive(inst.clone(), format!("quadrature: {e}"));
            rep.constant = constant.value;
            rep.prefactor = constant.prefactor;
            rep.breakdown = Some(constant);
            return Ok(rep);
        }
    };
    let bound = constant.prefactor * constant.value * rhs.value;
    let ratio = if lhs.value == 0.0 { 0.0 } else { lhs.value / bound };
    let budget = (lhs.rel_error + rhs.rel_error + constant.error_estimate).max(1e-12);
    Ok(VerificationReport {
        instance: inst.clone(),
        lhs: lhs.value,
        rhs_core: rhs.value,
        constant: constant.value,
        prefactor: constant.prefactor,
        ratio,
        status: classify(ratio, budget),
        error_budget: budget,
        breakdown: Some(constant),
        reason: None,
        triage: None,
    })
}

/// Checks one instance. Violations are re-run at a 10× tighter tolerance
/// (whose status is reported) and in the alternate mode (recorded).
pub fn verify(inst: &TheoremInstance) -> Result<VerificationReport> {
    verify_with(inst, &Accuracy::default())
}

pub fn verify_with(inst: &TheoremInstance, acc: &Accuracy) -> Result<VerificationReport> {
    let rep = evaluate(inst, acc, None)?;
    Ok(triage(rep, acc))
}

fn triage(mut rep: VerificationReport, acc: &Accuracy) -> VerificationReport {
    if rep.status != Status::Violated {
        return rep;
    }
    let inst = rep.instance.clone();
    let tight = evaluate(&inst, &acc.tighter(10.0), None).ok();
    let alt_mode = inst.mode.other();
    let alt = evaluate(&inst.clone().with_mode(alt_mode), acc, None).ok();
    let t = Triage {
        tight_ratio: tight.as_ref().map(|r| r.ratio).filter(|r| r.is_finite()),
        tight_status: tight.as_ref().map_or(Status::Inconclusive, |r| r.status),
        alternate_mode: alt_mode,
        alternate_ratio: alt.as_ref().map(|r| r.ratio).filter(|r| r.is_finite()),
        alternate_status: alt.as_ref().map_or(Status::Inconclusive, |r| r.status),
    };
    if let Some(tr) = tight {
        if tr.status != Status::Inconclusive || tr.reason.is_none() {
            rep.ratio = tr.ratio;
            rep.lhs = tr.lhs;
            rep.rhs_core = tr.rhs_core;
            rep.error_budget = tr.error_budget;
            rep.status = tr.status;
        }
    }
    rep.triage = Some(t);
    rep
}

/// The intermediate Hölder step of T2.1/T2.2:
/// `∫ r Φ ≤ (∫ R²/s)^{1/2} (∫ s f²)^{1/2}`. Returns `(lhs, bound)`.
pub fn holder_intermediate(inst: &TheoremInstance) -> Result<(f64, f64)> {
    if !matches!(inst.id, TheoremId::T2_1 | TheoremId::T2_2) {
        return Err(Error::PreconditionFailed("the Hölder step belongs to T2.1/T2.2".into()));
    }
    inst.validate()?;
    let acc = Accuracy::default();
    let iv = inst.interval;
    let mut linear = form_of(inst)?;
    linear.lhs = Lhs::Power { m: 1.0 };
    let lhs = lhs_estimate(inst, &linear, &acc)?;
    let c = hardy_constant_with(inst.id, &inst.r, inst.s.as_ref(), &inst.exponents, &iv, inst.mode, &acc)?;
    let rhs = rhs_estimate(inst, &form_of(inst)?, &acc)?;
    Ok((lhs.value, (c.value * rhs.value).sqrt()))
}

/// Where sweep weights come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightPlan {
    Fixed {
        r: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
    },
    /// Fresh `c (x - a)^α` weights per instance; weights violating the
    /// theorem's integrability hypotheses are redrawn.
    RandomPowerLaw {
        alpha_range: (f64, f64),
        c_range: (f64, f64),
        seed: u64,
    },
}

impl WeightPlan {
    pub fn unit() -> Self {
        WeightPlan::Fixed {
            r: FunctionSpec::constant(1.0),
            s: Some(FunctionSpec::constant(1.0)),
        }
    }

    /// `α ∈ [0, 2]`, `c ∈ [0.5, 2]`.
    pub fn random_power_law(seed: u64) -> Self {
        WeightPlan::RandomPowerLaw {
            alpha_range: (0.0, 2.0),
            c_range: (0.5, 2.0),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub id: TheoremId,
    pub family: FamilySpec,
    pub weights: WeightPlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub interval: Interval,
    pub count: usize,
    #[serde(default)]
    pub accuracy: Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub id: TheoremId,
    pub mode: Mode,
    pub reports: Vec<VerificationReport>,
    /// Largest finite ratio (0 when none is finite).
    pub max_ratio: f64,
    pub argmax: Option<usize>,
    pub violated: Vec<usize>,
    pub inconclusive: usize,
    pub rejected_weights: usize,
}

const MAX_WEIGHT_DRAWS: usize = 64;

fn instance_seed(seed: u64, i: usize) -> u64 {
    // SplitMix64 step so neighbouring instances get unrelated streams.
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hypothesis_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NonIntegrable(_)
            | Error::PreconditionFailed(_)
            | Error::NonDifferentiableWeight(_)
            | Error::SingularCoefficient(_)
    )
}

fn sweep_one(
    cfg: &SweepConfig,
    mode: Mode,
    exponents: &ExponentSet,
    f: FunctionSpec,
    i: usize,
) -> (VerificationReport, usize) {
    let id = cfg.id;
    let mk = |r: FunctionSpec, s: Option<FunctionSpec>| TheoremInstance {
        id,
        r,
        s: if id.uses_s() { s } else { None },
        f: f.clone(),
        exponents: *exponents,
        interval: cfg.interval,
        mode,
    };
    let finish = |inst: TheoremInstance, c: Option<ConstantBreakdown>| match evaluate(&inst, &cfg.accuracy, c) {
        Ok(rep) => triage(rep, &cfg.accuracy),
        Err(e) => VerificationReport::inconclusive(inst, e.to_string()),
    };
    match &cfg.weights {
        WeightPlan::Fixed { r, s } => {
            let s = s.clone().or_else(|| id.uses_s().then(|| r.clone()));
            (finish(mk(r.clone(), s), None), 0)
        }
        WeightPlan::RandomPowerLaw {
            alpha_range,
            c_range,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(*seed, i));
            let mut draw = || FunctionSpec::PowerLaw {
                alpha: rng.gen_range(alpha_range.0..=alpha_range.1),
                c: rng.gen_range(c_range.0..=c_range.1),
            };
            let mut rejected = 0;
            loop {
                let r = draw();
                let s = draw();
                let inst = mk(r, Some(s));
                if !id.uses_r() {
                    return (finish(inst, None), rejected);
                }
                match hardy_constant_with(
                    id,
                    &inst.r,
                    inst.s.as_ref(),
                    &inst.exponents,
                    &inst.interval,
                    mode,
                    &cfg.accuracy,
                ) {
                    Ok(c) => return (finish(inst, Some(c)), rejected),
                    Err(e) if hypothesis_failure(&e) && rejected + 1 < MAX_WEIGHT_DRAWS => rejected += 1,
                    Err(e) => {
                        return (
                            VerificationReport::inconclusive(inst, format!("constant: {e}")),
                            rejected,
                        );
                    }
                }
            }
        }
    }
}

/// Seeded sweep of `count` instances; reports come back in index order.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.count == 0 {
        return Err(Error::PreconditionFailed("count >= 1".into()));
    }
    cfg.interval.validate()?;
    let mode = cfg.mode.unwrap_or_else(|| cfg.id.default_mode());
    let exponents = cfg.exponents.unwrap_or_else(|| cfg.id.default_exponents());
    resolve_exponents(cfg.id, &exponents, mode)?;
    if let WeightPlan::RandomPowerLaw {
        alpha_range, c_range, ..
    } = &cfg.weights
    {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(*alpha_range) || !ok(*c_range) || c_range.0 <= 0.0 {
            return Err(Error::InvalidSpec("weight ranges must be nonempty with c > 0".into()));
        }
    }
    let fs: Vec<FunctionSpec> = cfg.family.sampler(cfg.interval)?.take(cfg.count).collect();
    let results: Vec<(VerificationReport, usize)> = fs
        .into_par_iter()
        .enumerate()
        .map(|(i, f)| sweep_one(cfg, mode, &exponents, f, i))
        .collect();
    let rejected_weights = results.iter().map(|r| r.1).sum();
    let reports: Vec<VerificationReport> = results.into_iter().map(|r| r.0).collect();
    let mut max_ratio = 0.0;
    let mut argmax = None;
    for (i, r) in reports.iter().enumerate() {
        if r.ratio.is_finite() && (argmax.is_none() || r.ratio > max_ratio) {
            max_ratio = r.ratio;
            argmax = Some(i);
        }
    }
    let violated = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.status == Status::Violated)
        .map(|(i, _)| i)
        .collect();
    let inconclusive = reports.iter().filter(|r| r.status == Status::Inconclusive).count();
    Ok(SweepReport {
        id: cfg.id,
        mode,
        reports,
        max_ratio,
        argmax,
        violated,
        inconclusive,
        rejected_weights,
    })
}

/// Parametric families with at most three real parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamFamily {
    /// No parameters: the constant 1.
    Constant,
    /// `(x - a)^α`
    PowerLaw { alpha_range: (f64, f64) },
    /// `(b - x)^α`
    ShiftedPowerLaw { alpha_range: (f64, f64) },
    /// `exp(β x)`
    Exponential { beta_range: (f64, f64) },
    /// Tent vanishing at both ends with apex at `a + t (b - a)`.
    Tent { peak_range: (f64, f64) },
    /// `(x - a)^α₁ + w (x - a)^α₂`
    PowerSum {
        alpha_range: (f64, f64),
        weight_range: (f64, f64),
    },
}

impl ParamFamily {
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            ParamFamily::Constant => vec![],
            ParamFamily::PowerLaw { alpha_range } | ParamFamily::ShiftedPowerLaw { alpha_range } => vec![*alpha_range],
            ParamFamily::Exponential { beta_range } => vec![*beta_range],
            ParamFamily::Tent { peak_range } => vec![*peak_range],
            ParamFamily::PowerSum {
                alpha_range,
                weight_range,
            } => vec![*alpha_range, *alpha_range, *weight_range],
        }
    }

    pub fn build(&self, params: &[f64], iv: &Interval) -> FunctionSpec {
        match self {
            ParamFamily::Constant => FunctionSpec::constant(1.0),
            ParamFamily::PowerLaw { .. } => FunctionSpec::power(1.0, params[0]),
            ParamFamily::ShiftedPowerLaw { .. } => FunctionSpec::shifted_power(1.0, params[0]),
            ParamFamily::Exponential { .. } => FunctionSpec::exponential(1.0, params[0]),
            ParamFamily::Tent { .. } => {
                let x = iv.a + params[0] * iv.len();
                FunctionSpec::piecewise_linear(&[(iv.a, 0.0), (x, 1.0), (iv.b, 0.0)])
            }
            ParamFamily::PowerSum { .. } => FunctionSpec::Sum {
                terms: vec![
                    FunctionSpec::power(1.0, params[0]),
                    FunctionSpec::power(params[2], params[1]),
                ],
            },
        }
    }
}

/// What the search maximizes the ratio of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum SearchTarget {
    /// The family supplies `f`.
    Theorem {
        id: TheoremId,
        r: FunctionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
    /// The family supplies the path `y`.
    Lemma {
        variant: OpialVariant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<FunctionSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<ExponentSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<Mode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    #[serde(flatten)]
    pub target: SearchTarget,
    pub family: ParamFamily,
    pub interval: Interval,
    /// Maximum number of ratio evaluations.
    pub budget: usize,
    #[serde(default)]
    pub accuracy: Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub params: Vec<f64>,
    pub ratio: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub best_ratio: f64,
    pub best_params: Vec<f64>,
    pub evaluations: usize,
    /// Evaluations skipped because the ratio was not finite.
    pub skipped: usize,
    /// Whether the best point was re-verified at a tighter tolerance.
    pub reverified: bool,
    pub status: Status,
    /// Every finite evaluation in order.
    pub trace: Vec<SearchPoint>,
}

/// Interior margin keeping parameters off the (often singular) box edges.
const BOX_MARGIN: f64 = 1e-3;

fn ratio_at(cfg: &SharpnessConfig, params: &[f64], acc: &Accuracy) -> Result<(f64, f64)> {
    let iv = cfg.interval;
    let spec = cfg.family.build(params, &iv);
    match &cfg.target {
        SearchTarget::Theorem {
            id,
            r,
            s,
            exponents,
            mode,
        } => {
            let inst = TheoremInstance {
                id: *id,
                r: r.clone(),
                s: s.clone(),
                f: spec,
                exponents: exponents.unwrap_or_else(|| id.default_exponents()),
                interval: iv,
                mode: mode.unwrap_or_else(|| id.default_mode()),
            };
            let rep = evaluate(&inst, acc, None)?;
            if let Some(reason) = rep.reason {
                return Err(Error::NonIntegrable(reason));
            }
            Ok((rep.ratio, rep.error_budget))
        }
        SearchTarget::Lemma {
            variant,
            r,
            s,
            exponents,
            mode,
        } => {
            let path = TestPath::new(spec, iv)?;
            let mut inst = LemmaInstance::new(*variant, path)
                .with_exponents(exponents.unwrap_or_else(|| variant.default_exponents()))
                .with_mode(mode.unwrap_or(Mode::AsPrinted));
            inst.r = r.clone();
            inst.s = s.clone();
            let rec = verify_variant_with(&inst, acc)?;
            Ok((rec.ratio, rec.budget))
        }
    }
}

/// Maximizes the ratio over the family's parameter box with a coarse grid
/// followed by Nelder–Mead. Ratios above `1 + budget` are re-verified at a
/// 10× tighter tolerance before being reported.
pub fn sharpness_search(cfg: &SharpnessConfig) -> Result<SharpnessResult> {
    if cfg.budget < 50 {
        return Err(Error::PreconditionFailed(format!("budget >= 50 (got {})", cfg.budget)));
    }
    cfg.interval.validate()?;
    let bounds: Vec<(f64, f64)> = cfg
        .family
        .bounds()
        .into_iter()
        .map(|(lo, hi)| {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                Err(Error::InvalidSpec(format!("empty parameter range [{lo}, {hi}]")))
            } else {
                let m = BOX_MARGIN * (hi - lo);
                Ok((lo + m, hi - m))
            }
        })
        .collect::<Result<_>>()?;
    if bounds.len() > 3 {
        return Err(Error::InvalidSpec("at most three parameters".into()));
    }
    let clamp = |x: &mut Vec<f64>| {
        for (v, (lo, hi)) in x.iter_mut().zip(&bounds) {
            *v = v.clamp(*lo, *hi);
        }
    };
    let mut trace = Vec::new();
    let skipped = std::cell::Cell::new(0usize);
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64], trace: &mut Vec<SearchPoint>| -> f64 {
        evals.set(evals.get() + 1);
        match ratio_at(cfg, x, &cfg.accuracy) {
            Ok((r, b)) if r.is_finite() => {
                trace.push(SearchPoint {
                    params: x.to_vec(),
                    ratio: r,
                    budget: b,
                });
                r
            }
            _ => {
                skipped.set(skipped.get() + 1);
                f64::NEG_INFINITY
            }
        }
    };

    let dims = bounds.len();
    if dims == 0 {
        eval(&[], &mut trace);
    } else {
        // Coarse grid.
        let per_dim: usize = match dims {
            1 => 9,
            2 => 5,
            _ => 3,
        };
        let mut grid_best: Option<(Vec<f64>, f64)> = None;
        let total = per_dim.pow(dims as u32);
        for idx in 0..total {
            let mut x = Vec::with_capacity(dims);
            let mut rem = idx;
            for (lo, hi) in &bounds {
                let t = (rem % per_dim) as f64 / (per_dim - 1) as f64;
                rem /= per_dim;
                x.push(lo + t * (hi - lo));
            }
            let v = eval(&x, &mut trace);
            if grid_best.as_ref().is_none_or(|(_, b)| v > *b) {
                grid_best = Some((x, v));
            }
        }
        // Nelder–Mead from the best grid point.
        let (x0, f0) = grid_best.expect("grid is nonempty");
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), f0)];
        for d in 0..dims {
            let mut x = x0.clone();
            let (lo, hi) = bounds[d];
            let step = 0.1 * (hi - lo);
            x[d] = if x[d] + step <= hi { x[d] + step } else { x[d] - step };
            let v = eval(&x, &mut trace);
            simplex.push((x, v));
        }
        while evals.get() + dims + 2 <= cfg.budget {
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let spread = simplex
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .zip(&bounds)
                        .map(|((a, b), (lo, hi))| (a - b).abs() / (hi - lo))
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread < 1e-9 {
                break;
            }
            let n = simplex.len();
            let centroid: Vec<f64> = (0..dims)
                .map(|d| simplex[..n - 1].iter().map(|(x, _)| x[d]).sum::<f64>() / (n - 1) as f64)
                .collect();
            let worst = simplex[n - 1].clone();
            let along = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
                clamp(&mut x);
                x
            };
            let xr = along(1.0);
            let fr = eval(&xr, &mut trace);
            if fr > simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe, &mut trace);
                simplex[n - 1] = if fe > fr { (xe, fe) } else { (xr, fr) };
            } else if fr > simplex[n - 2].1 {
                simplex[n - 1] = (xr, fr);
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut trace);
                if fc > worst.1 {
                    simplex[n - 1] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for item in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = item.0.iter().zip(&best).map(|(v, b)| b + 0.5 * (v - b)).collect();
                        clamp(&mut x);
                        let v = eval(&x, &mut trace);
                        *item = (x, v);
                    }
                }
            }
        }
    }

    let best = trace
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio).then(b.0.cmp(&a.0)))
        .map(|(_, p)| p.clone());
    let Some(mut best) = best else {
        return Ok(SharpnessResult {
            best_ratio: f64::NAN,
            best_params: vec![],
            evaluations: evals.get(),
            skipped: skipped.get(),
            reverified: false,
            status: Status::Inconclusive,
            trace,
        });
    };
    let mut reverified = false;
    if best.ratio > 1.0 + best.budget {
        reverified = true;
        if let Ok((r, b)) = ratio_at(cfg, &best.params, &cfg.accuracy.tighter(10.0)) {
            best.ratio = r;
            best.budget = b;
        }
    }
    Ok(SharpnessResult {
        best_ratio: best.ratio,
        best_params: best.params,
        evaluations: evals.get(),
        skipped: skipped.get(),
        reverified,
        status: classify(best.ratio, best.budget),
        trace,
    })
}
