//! Executes a [`RunConfig`] and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hopial::constants::{hardy_constant_with, ConstantBreakdown};
use hopial::funcspace::FamilySpec;
use hopial::opial::{verify_variant_with, LemmaInstance, TestPath};
use hopial::quad::Accuracy;
use hopial::verify::{
    classify, sharpness_search, sweep, verify_with, SearchTarget, SharpnessConfig, SweepConfig, SweepReport,
    TheoremInstance,
};
use hopial::Mode;

use crate::config::{default_family, Job, RunConfig};
use crate::plot::{self, Series};
use crate::report::{ConstantJson, InstanceJson, Report, SearchJson, Summary};
use crate::suite;

/// Everything a run produced, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Human-readable summary for the terminal.
    pub text: String,
    pub svg: Option<String>,
    /// Extra files keyed by name (suite plots).
    pub extra: Vec<(String, String)>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.report.summary.exit_code()
    }
}

pub fn accuracy(cfg: &RunConfig) -> Accuracy {
    cfg.tol.map(Accuracy::fixed).unwrap_or_default()
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Runs the job. The report carries no timestamp; callers add one.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let acc = accuracy(cfg);
    let iv = cfg.interval;
    match &cfg.job {
        Job::Constant {
            theorem,
            r,
            s,
            exponents,
            mode,
        } => {
            let e = exponents.unwrap_or_else(|| theorem.default_exponents());
            let mode = mode.unwrap_or_else(|| theorem.default_mode());
            let c = hardy_constant_with(*theorem, r, s.as_ref(), &e, &iv, mode, &acc)
                .with_context(|| format!("constant of {theorem}"))?;
            let mut report = Report::new("constant");
            report.theorem = Some(theorem.to_string());
            report.mode = Some(mode);
            report.constant = Some(ConstantJson::from(&c));
            let report = report.finish();
            let text = constant_text(&theorem.to_string(), &c);
            Ok(Outcome {
                report,
                text,
                svg: None,
                extra: vec![],
            })
        }
        Job::Verify {
            theorem,
            r,
            s,
            f,
            exponents,
            mode,
        } => {
            let mut inst = TheoremInstance::new(*theorem, r.clone(), f.clone(), iv);
            if let Some(s) = s {
                inst = inst.with_s(s.clone());
            }
            if let Some(e) = exponents {
                inst = inst.with_exponents(*e);
            }
            if let Some(m) = mode {
                inst = inst.with_mode(*m);
            }
            let rep = verify_with(&inst, &acc).with_context(|| format!("verifying {theorem}"))?;
            let mut report = Report::new("verify");
            report.theorem = Some(theorem.to_string());
            report.mode = Some(inst.mode);
            report.constant = rep.breakdown.as_ref().map(ConstantJson::from);
            report.instances.push(InstanceJson::from_verification(0, &rep));
            let report = report.finish();
            let mut text = String::new();
            if let Some(c) = &rep.breakdown {
                text.push_str(&constant_text(&theorem.to_string(), c));
            }
            let _ = writeln!(text, "lhs   = {:.10e}", rep.lhs);
            let _ = writeln!(text, "rhs   = {:.10e}", rep.rhs_core);
            let _ = writeln!(
                text,
                "ratio = {:.6}  ({:?}, budget {:.1e})",
                rep.ratio, rep.status, rep.error_budget
            );
            if let Some(reason) = &rep.reason {
                let _ = writeln!(text, "reason: {reason}");
            }
            if let Some(t) = &rep.triage {
                let _ = writeln!(
                    text,
                    "triage: tight {:?}, {} {:?}",
                    t.tight_status,
                    t.alternate_mode.as_str(),
                    t.alternate_status
                );
            }
            Ok(Outcome {
                report,
                text,
                svg: None,
                extra: vec![],
            })
        }
        Job::Sweep {
            theorem,
            count,
            family,
            weights,
            exponents,
            mode,
            both_modes,
        } => {
            let seed = cfg.seed();
            let sc = SweepConfig {
                id: *theorem,
                family: FamilySpec::new(family.clone().unwrap_or_else(default_family), seed),
                weights: weights.clone().unwrap_or_default().plan(seed),
                exponents: *exponents,
                mode: *mode,
                interval: iv,
                count: *count,
                accuracy: acc,
            };
            let primary = sweep(&sc).with_context(|| format!("sweeping {theorem}"))?;
            let mut report = sweep_report(&primary, seed);
            let mut text = sweep_text(&primary);
            if *both_modes {
                let alt = SweepConfig {
                    mode: Some(primary.mode.other()),
                    ..sc
                };
                match sweep(&alt) {
                    Ok(other) => {
                        text.push_str(&sweep_text(&other));
                        report.companions.push(sweep_report(&other, seed));
                    }
                    Err(e) => {
                        let _ = writeln!(
                            text,
                            "{} {}: not evaluated ({e})",
                            theorem,
                            primary.mode.other().as_str()
                        );
                    }
                }
            }
            let svg = plot::render(&Series {
                title: format!("{theorem} sweep ({})", primary.mode.as_str()),
                x_label: "instance".into(),
                points: primary
                    .reports
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i as f64, r.ratio))
                    .collect(),
            });
            Ok(Outcome {
                report,
                text,
                svg,
                extra: vec![],
            })
        }
        Job::Sharpness { target, family, budget } => {
            let sc = SharpnessConfig {
                target: target.clone(),
                family: family.clone(),
                interval: iv,
                budget: *budget,
                accuracy: acc,
            };
            let res = sharpness_search(&sc).context("sharpness search")?;
            let (name, mode) = match target {
                SearchTarget::Theorem { id, mode, .. } => (id.to_string(), mode.unwrap_or_else(|| id.default_mode())),
                SearchTarget::Lemma { variant, mode, .. } => (variant.to_string(), mode.unwrap_or(Mode::AsPrinted)),
            };
            let mut report = Report::new("sharpness");
            report.theorem = Some(name.clone());
            report.mode = Some(mode);
            report.instances = res
                .trace
                .iter()
                .enumerate()
                .map(|(i, p)| InstanceJson {
                    index: i,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    constant: f64::NAN,
                    ratio: p.ratio,
                    status: classify(p.ratio, p.budget),
                    budget: p.budget,
                    reason: None,
                    params: Some(p.params.clone()),
                    triage: None,
                    witness: None,
                })
                .collect();
            let mut report = report.finish();
            // The verdict is the (possibly re-verified) best point, not the trace.
            report.summary = Summary::of([&res.status]);
            report.max_ratio = Some(res.best_ratio).filter(|r| r.is_finite());
            report.search = Some(SearchJson {
                best_ratio: res.best_ratio,
                best_params: res.best_params.clone(),
                evaluations: res.evaluations,
                skipped: res.skipped,
                reverified: res.reverified,
            });
            let mut text = String::new();
            let _ = writeln!(
                text,
                "{name} sharpness: best ratio {:.6} at {:?} ({:?}; {} evaluations, {} skipped{})",
                res.best_ratio,
                res.best_params,
                res.status,
                res.evaluations,
                res.skipped,
                if res.reverified { ", re-verified" } else { "" }
            );
            let one_dim = res.trace.iter().all(|p| !p.params.is_empty());
            let svg = plot::render(&Series {
                title: format!("{name} sharpness search"),
                x_label: if one_dim {
                    "parameter 1".into()
                } else {
                    "evaluation".into()
                },
                points: res
                    .trace
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (if one_dim { p.params[0] } else { i as f64 }, p.ratio))
                    .collect(),
            });
            Ok(Outcome {
                report,
                text,
                svg,
                extra: vec![],
            })
        }
        Job::Lemma {
            variant,
            y,
            r,
            s,
            exponents,
            mode,
            split,
        } => {
            let path = TestPath::new(y.clone(), iv).context("test path y")?;
            let mut inst = LemmaInstance::new(*variant, path);
            inst.r = r.clone();
            inst.s = s.clone();
            inst.split = *split;
            if let Some(e) = exponents {
                inst = inst.with_exponents(*e);
            }
            if let Some(m) = mode {
                inst = inst.with_mode(*m);
            }
            let rec = verify_variant_with(&inst, &acc).with_context(|| format!("checking {variant}"))?;
            let mut report = Report::new("lemma");
            report.theorem = Some(variant.to_string());
            report.mode = Some(rec.mode);
            report.instances.push(InstanceJson::from_lemma(0, &rec));
            let report = report.finish();
            let text = format!(
                "{variant} ({}): lhs {:.10e}, C {:.10e}, rhs {:.10e}\nratio = {:.10}  ({:?}, budget {:.1e})\n",
                rec.mode.as_str(),
                rec.lhs,
                rec.constant,
                rec.rhs,
                rec.ratio,
                rec.status,
                rec.budget
            );
            Ok(Outcome {
                report,
                text,
                svg: None,
                extra: vec![],
            })
        }
        Job::Suite => suite::run(cfg),
    }
}

fn constant_text(name: &str, c: &ConstantBreakdown) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{name} constant ({})", c.mode.as_str());
    let _ = writeln!(t, "  C = {:.12}  (rel. error ≤ {:.1e})", c.value, c.error_estimate);
    if c.prefactor != 1.0 {
        let _ = writeln!(t, "  prefactor = {}", c.prefactor);
    }
    let width = c
        .factors
        .iter()
        .map(|(n, _)| n.chars().count())
        .max()
        .unwrap_or(6)
        .max(6);
    let _ = writeln!(t, "  {:<width$}  value", "factor");
    for (n, v) in &c.factors {
        let _ = writeln!(t, "  {n:<width$}  {v:.12}");
    }
    t
}

pub(crate) fn sweep_report(s: &SweepReport, seed: u64) -> Report {
    let mut report = Report::new("sweep");
    report.theorem = Some(s.id.to_string());
    report.mode = Some(s.mode);
    report.seed = Some(seed);
    report.rejected_weights = Some(s.rejected_weights);
    report.instances = s
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| InstanceJson::from_verification(i, r))
        .collect();
    report.finish()
}

fn sweep_text(s: &SweepReport) -> String {
    let n = s.reports.len();
    let mut t = format!(
        "{} {}: {} instances, {} violated, {} inconclusive, max ratio {:.6}",
        s.id,
        s.mode.as_str(),
        n,
        s.violated.len(),
        s.inconclusive,
        s.max_ratio
    );
    if let Some(i) = s.argmax {
        let _ = write!(t, " (instance {i})");
    }
    t.push('\n');
    for &i in s.violated.iter().take(5) {
        let _ = writeln!(t, "  violated #{i}: ratio {:.6}", s.reports[i].ratio);
    }
    t
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .with_context(|| format!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    f.write_all(contents.as_bytes())
        .and_then(|_| f.sync_all())
        .with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Writes the requested JSON, CSV and SVG files. A JSON path of `-` means
/// standard output.
pub fn write_outputs(cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    let out = &cfg.output;
    if matches!(cfg.job, Job::Suite) {
        let dir = out.dir.clone().unwrap_or_else(|| suite::DEFAULT_DIR.into());
        write_atomic(&dir.join(suite::SUITE_JSON), &outcome.report.to_json())?;
        for (name, body) in &outcome.extra {
            write_atomic(&dir.join(name), body)?;
        }
    }
    if let Some(p) = &out.json {
        if p.as_os_str() != "-" {
            write_atomic(p, &outcome.report.to_json())?;
        }
    }
    if let Some(p) = &out.csv {
        write_atomic(p, &outcome.report.to_csv())?;
    }
    if let Some(p) = &out.svg {
        match &outcome.svg {
            Some(svg) => write_atomic(p, svg)?,
            None => bail!("{}: nothing to plot for `{}`", p.display(), cfg.job.name()),
        }
    }
    Ok(())
}
