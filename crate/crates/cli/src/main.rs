use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hopial::constants::{ExponentSet, TheoremId};
use hopial::funcspace::{FamilyKind, FunctionSpec, Interval};
use hopial::opial::OpialVariant;
use hopial::verify::{ParamFamily, SearchTarget};
use hopial::Mode;
use hopial_cli::config::{Job, Outputs, RunConfig, WeightChoice, DEFAULT_BUDGET, DEFAULT_COUNT};
use hopial_cli::{parse, run};

/// Constants, verifications and sharpness probes for weighted Hardy- and
/// Opial-type inequalities.
///
/// Functions use the mini-syntax `const:C`, `pow:ALPHA[,C]`, `spow:ALPHA[,C]`,
/// `exp:BETA[,C]`, `pwl:x0,y0;x1,y1;...`, a JSON object, or `@file.json`.
///
/// Exit status: 0 all hold, 2 something is violated, 3 inconclusive without
/// violations, 1 usage or input error.
#[derive(Debug, Parser)]
#[command(name = "hopial", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// Interval `A,B`.
    #[arg(long, default_value = "0,1", value_parser = parse::interval, allow_hyphen_values = true)]
    interval: Interval,
    /// Fixed relative quadrature tolerance (default: chosen per integrand).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here (`-` prints it instead of the summary).
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print the equivalent `run --config` file and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Args)]
struct Exps {
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Skip the Hölder-conjugate check on p and q.
    #[arg(long)]
    unchecked: bool,
}

impl Exps {
    fn over(&self, base: ExponentSet) -> Option<ExponentSet> {
        if self.p.is_none() && self.q.is_none() && self.k.is_none() && !self.unchecked {
            return None;
        }
        let mut e = base;
        if let Some(p) = self.p {
            e.p = p;
        }
        e.q = self.q.or(e.q);
        e.k = self.k.or(e.k);
        if self.unchecked {
            e = e.unchecked();
        }
        Some(e)
    }
}

#[derive(Debug, Args)]
struct Weights {
    #[arg(long, value_parser = parse::function, allow_hyphen_values = true)]
    r: Option<FunctionSpec>,
    #[arg(long, value_parser = parse::function, allow_hyphen_values = true)]
    s: Option<FunctionSpec>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightKind {
    /// Random `c (x - a)^α` per instance.
    Random,
    /// r = s = 1.
    Unit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SearchFamily {
    Constant,
    Power,
    Spower,
    Exp,
    Tent,
    PowerSum,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute a theorem constant and its factors.
    Constant {
        #[arg(long)]
        theorem: TheoremId,
        #[command(flatten)]
        w: Weights,
        #[command(flatten)]
        e: Exps,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        c: Common,
    },
    /// Check one inequality on one function.
    Verify {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long, value_parser = parse::function, allow_hyphen_values = true)]
        f: FunctionSpec,
        #[command(flatten)]
        w: Weights,
        #[command(flatten)]
        e: Exps,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        c: Common,
    },
    /// Seeded random sweep of one inequality.
    Sweep {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        /// Test-function family as JSON (default: random piecewise linear).
        #[arg(long, value_parser = family)]
        family: Option<FamilyKind>,
        #[arg(long, value_enum)]
        weights: Option<WeightKind>,
        /// Fixed weights (overrides --weights).
        #[command(flatten)]
        w: Weights,
        /// Exponent range of random weights.
        #[arg(long, allow_hyphen_values = true)]
        alpha_range: Option<String>,
        /// Scale range of random weights.
        #[arg(long)]
        c_range: Option<String>,
        #[command(flatten)]
        e: Exps,
        #[arg(long)]
        mode: Option<Mode>,
        /// Also sweep the alternate mode.
        #[arg(long)]
        both_modes: bool,
        #[command(flatten)]
        c: Common,
    },
    /// Maximize the ratio over a parametric family.
    Sharpness {
        #[arg(long, conflicts_with = "lemma", required_unless_present = "lemma")]
        theorem: Option<TheoremId>,
        #[arg(long)]
        lemma: Option<OpialVariant>,
        #[arg(long, value_enum)]
        family: SearchFamily,
        /// Parameter range `LO,HI` (exponent, rate or apex position).
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Range of the second coefficient for `power-sum`.
        #[arg(long, allow_hyphen_values = true)]
        weight_range: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        w: Weights,
        #[command(flatten)]
        e: Exps,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        c: Common,
    },
    /// Check an Opial-type lemma on a path y.
    Lemma {
        #[arg(long)]
        variant: OpialVariant,
        #[arg(long, value_parser = parse::function, allow_hyphen_values = true)]
        y: FunctionSpec,
        #[command(flatten)]
        w: Weights,
        #[command(flatten)]
        e: Exps,
        #[arg(long)]
        mode: Option<Mode>,
        /// Split point X for Z1/Z4.
        #[arg(long)]
        split: Option<f64>,
        #[command(flatten)]
        c: Common,
    },
    /// Run the bundled corpus and write its reports and plots.
    Suite {
        /// Output directory.
        #[arg(long, default_value = hopial_cli::suite::DEFAULT_DIR)]
        out_dir: PathBuf,
        #[command(flatten)]
        c: Common,
    },
    /// Run a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn family(s: &str) -> Result<FamilyKind> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => s.to_string(),
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| anyhow::anyhow!("family at `{}`: {}", e.path(), e.inner()))
}

fn opt_range(s: &Option<String>, what: &str, default: (f64, f64)) -> Result<(f64, f64)> {
    s.as_deref().map_or(Ok(default), |s| parse::range(s, what))
}

fn with_common(job: Job, c: Common) -> RunConfig {
    RunConfig {
        job,
        interval: c.interval,
        tol: c.tol,
        seed: c.seed,
        output: Outputs {
            json: c.json,
            csv: c.csv,
            svg: c.svg,
            dir: None,
        },
    }
}

fn build(cmd: Cmd) -> Result<(RunConfig, bool)> {
    Ok(match cmd {
        Cmd::Constant { theorem, w, e, mode, c } => {
            let print = c.print_config;
            let job = Job::Constant {
                theorem,
                r: w.r.unwrap_or_else(|| FunctionSpec::constant(1.0)),
                s: w.s,
                exponents: e.over(theorem.default_exponents()),
                mode,
            };
            (with_common(job, c), print)
        }
        Cmd::Verify {
            theorem,
            f,
            w,
            e,
            mode,
            c,
        } => {
            let print = c.print_config;
            let job = Job::Verify {
                theorem,
                r: w.r.unwrap_or_else(|| FunctionSpec::constant(1.0)),
                s: w.s,
                f,
                exponents: e.over(theorem.default_exponents()),
                mode,
            };
            (with_common(job, c), print)
        }
        Cmd::Sweep {
            theorem,
            count,
            family,
            weights,
            w,
            alpha_range,
            c_range,
            e,
            mode,
            both_modes,
            c,
        } => {
            let print = c.print_config;
            let weights = match (w.r, weights) {
                (Some(r), _) => Some(WeightChoice::Fixed { r, s: w.s }),
                (None, Some(WeightKind::Unit)) => Some(WeightChoice::Unit),
                (None, _) if alpha_range.is_some() || c_range.is_some() => Some(WeightChoice::RandomPowerLaw {
                    alpha_range: opt_range(&alpha_range, "alpha-range", (0.0, 2.0))?,
                    c_range: opt_range(&c_range, "c-range", (0.5, 2.0))?,
                }),
                (None, _) => {
                    if w.s.is_some() {
                        bail!("--s needs --r for fixed sweep weights");
                    }
                    None
                }
            };
            let job = Job::Sweep {
                theorem,
                count,
                family,
                weights,
                exponents: e.over(theorem.default_exponents()),
                mode,
                both_modes,
            };
            (with_common(job, c), print)
        }
        Cmd::Sharpness {
            theorem,
            lemma,
            family,
            range,
            weight_range,
            budget,
            w,
            e,
            mode,
            c,
        } => {
            let print = c.print_config;
            let target = match (theorem, lemma) {
                (Some(id), _) => SearchTarget::Theorem {
                    id,
                    r: w.r.unwrap_or_else(|| FunctionSpec::constant(1.0)),
                    s: w.s,
                    exponents: e.over(id.default_exponents()),
                    mode,
                },
                (None, Some(variant)) => SearchTarget::Lemma {
                    variant,
                    r: w.r,
                    s: w.s,
                    exponents: e.over(variant.default_exponents()),
                    mode,
                },
                (None, None) => bail!("--theorem or --lemma is required"),
            };
            let family = match family {
                SearchFamily::Constant => ParamFamily::Constant,
                SearchFamily::Power => ParamFamily::PowerLaw {
                    alpha_range: opt_range(&range, "range", (-0.9, 2.0))?,
                },
                SearchFamily::Spower => ParamFamily::ShiftedPowerLaw {
                    alpha_range: opt_range(&range, "range", (-0.9, 2.0))?,
                },
                SearchFamily::Exp => ParamFamily::Exponential {
                    beta_range: opt_range(&range, "range", (-5.0, 5.0))?,
                },
                SearchFamily::Tent => ParamFamily::Tent {
                    peak_range: opt_range(&range, "range", (0.0, 1.0))?,
                },
                SearchFamily::PowerSum => ParamFamily::PowerSum {
                    alpha_range: opt_range(&range, "range", (-0.9, 2.0))?,
                    weight_range: opt_range(&weight_range, "weight-range", (0.0, 1.0))?,
                },
            };
            (with_common(Job::Sharpness { target, family, budget }, c), print)
        }
        Cmd::Lemma {
            variant,
            y,
            w,
            e,
            mode,
            split,
            c,
        } => {
            let print = c.print_config;
            let job = Job::Lemma {
                variant,
                y,
                r: w.r,
                s: w.s,
                exponents: e.over(variant.default_exponents()),
                mode,
                split,
            };
            (with_common(job, c), print)
        }
        Cmd::Suite { out_dir, c } => {
            let print = c.print_config;
            let mut cfg = with_common(Job::Suite, c);
            cfg.output.dir = Some(out_dir);
            (cfg, print)
        }
        Cmd::Run { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = RunConfig::from_json(&text).with_context(|| format!("in {}", config.display()))?;
            (cfg, false)
        }
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HOPIAL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .with_context(|| format!("HOPIAL_THREADS: `{v}` is not a positive integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let prepared = configure_threads()
        .and_then(|_| build(cli.cmd))
        .and_then(|(cfg, print)| {
            cfg.validate()?;
            Ok((cfg, print))
        });
    let (cfg, print) = match prepared {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if print {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    let mut outcome = match run::execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    outcome.report.timestamp = Some(run::timestamp());
    if cfg.output.json.as_deref().is_some_and(|p| p.as_os_str() == "-") {
        print!("{}", outcome.report.to_json());
    } else {
        print!("{}", outcome.text);
    }
    if let Err(e) = run::write_outputs(&cfg, &outcome) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.exit_code())
}
