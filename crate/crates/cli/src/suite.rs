//! Bundled corpus of runs that are expected to hold. `suite` exits 0 on a
//! healthy build; any other exit code points at a regression.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use hopial::constants::{ExponentSet, TheoremId};
use hopial::funcspace::{FunctionSpec, Interval};
use hopial::opial::OpialVariant;
use hopial::verify::{ParamFamily, SearchTarget};
use hopial::Mode;

use crate::config::{Job, RunConfig, WeightChoice};
use crate::report::{Report, Summary};
use crate::run::{execute, Outcome};

pub const SUITE_JSON: &str = "suite.json";
pub const DEFAULT_DIR: &str = "hopial-suite";

const SWEEP_COUNT: usize = 40;

fn one() -> FunctionSpec {
    FunctionSpec::constant(1.0)
}

fn hat() -> FunctionSpec {
    FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)])
}

fn line() -> FunctionSpec {
    FunctionSpec::power(1.0, 1.0)
}

fn sweep(theorem: TheoremId, both_modes: bool) -> Job {
    Job::Sweep {
        theorem,
        count: SWEEP_COUNT,
        family: None,
        weights: None,
        exponents: None,
        mode: None,
        both_modes,
    }
}

fn lemma(variant: OpialVariant, y: FunctionSpec, exponents: Option<ExponentSet>) -> Job {
    Job::Lemma {
        variant,
        y,
        r: None,
        s: None,
        exponents,
        mode: None,
        split: None,
    }
}

/// `(name, job)` pairs, all on the unit interval.
pub fn corpus() -> Vec<(&'static str, Job)> {
    vec![
        (
            "constant-t2.1",
            Job::Constant {
                theorem: TheoremId::T2_1,
                r: one(),
                s: Some(one()),
                exponents: None,
                mode: None,
            },
        ),
        (
            "verify-hardy",
            Job::Verify {
                theorem: TheoremId::Hardy,
                r: one(),
                s: None,
                f: FunctionSpec::power(1.0, -0.49),
                exponents: Some(ExponentSet::new(2.0)),
                mode: None,
            },
        ),
        (
            "verify-t2.1",
            Job::Verify {
                theorem: TheoremId::T2_1,
                r: one(),
                s: Some(one()),
                f: hat(),
                exponents: None,
                mode: None,
            },
        ),
        ("lemma-opial-hat", lemma(OpialVariant::Opial, hat(), None)),
        ("lemma-b1-line", lemma(OpialVariant::B1, line(), None)),
        (
            "lemma-h1-line",
            lemma(OpialVariant::H1, line(), Some(ExponentSet::new(2.0))),
        ),
        ("sweep-t2.1", sweep(TheoremId::T2_1, false)),
        ("sweep-t2.2", sweep(TheoremId::T2_2, false)),
        ("sweep-t2.16", sweep(TheoremId::T2_16, true)),
        (
            "sweep-hardy-unit",
            Job::Sweep {
                theorem: TheoremId::Hardy,
                count: SWEEP_COUNT,
                family: None,
                weights: Some(WeightChoice::Unit),
                exponents: None,
                mode: Some(Mode::AsPrinted),
                both_modes: false,
            },
        ),
        (
            "sharpness-hardy",
            Job::Sharpness {
                target: SearchTarget::Theorem {
                    id: TheoremId::Hardy,
                    r: one(),
                    s: None,
                    exponents: Some(ExponentSet::new(2.0)),
                    mode: None,
                },
                family: ParamFamily::PowerLaw {
                    alpha_range: (-0.5, -0.05),
                },
                budget: 60,
            },
        ),
    ]
}

/// Runs every corpus item with the suite's seed and tolerance (the corpus
/// fixes its own interval). Item reports
/// become companions of the suite report; plots are returned as extras.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let mut report = Report::new("suite");
    report.seed = Some(cfg.seed());
    let mut summary = Summary::default();
    let mut text = String::new();
    let mut extra = Vec::new();
    for (name, job) in corpus() {
        let item = RunConfig {
            job,
            interval: Interval::unit(),
            tol: cfg.tol,
            seed: cfg.seed,
            output: Default::default(),
        };
        let out = execute(&item).with_context(|| format!("suite item {name}"))?;
        summary.add(out.report.summary);
        let s = out.report.summary;
        let _ = writeln!(
            text,
            "{:<18} {:>3} holds {:>3} violated {:>3} inconclusive  max ratio {}",
            name,
            s.holds,
            s.violated,
            s.inconclusive,
            out.report.max_ratio.map_or("-".to_string(), |r| format!("{r:.6}"))
        );
        if let Some(svg) = out.svg {
            extra.push((format!("{name}.svg"), svg));
        }
        report.companions.push(out.report);
    }
    report.summary = summary;
    let _ = writeln!(
        text,
        "suite: {} holds, {} violated, {} inconclusive",
        summary.holds, summary.violated, summary.inconclusive
    );
    Ok(Outcome {
        report,
        text,
        svg: None,
        extra,
    })
}
