//! JSON and CSV report shapes.

use hopial::constants::ConstantBreakdown;
use hopial::opial::LemmaRecord;
use hopial::verify::{Status, Triage, VerificationReport};
use hopial::Mode;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "theorem,mode,lhs,rhs,constant,ratio,status,budget";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantJson {
    pub value: f64,
    pub factors: Vec<Factor>,
    pub prefactor: f64,
    pub error_estimate: f64,
}

impl From<&ConstantBreakdown> for ConstantJson {
    fn from(c: &ConstantBreakdown) -> Self {
        Self {
            value: c.value,
            factors: c
                .factors
                .iter()
                .map(|(name, value)| Factor {
                    name: name.clone(),
                    value: *value,
                })
                .collect(),
            prefactor: c.prefactor,
            error_estimate: c.error_estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceJson {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Full multiplier of the right-hand side (prefactor · C).
    pub constant: f64,
    pub ratio: f64,
    pub status: Status,
    pub budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triage: Option<Triage>,
    /// The full instance, attached to violations so they can be replayed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl InstanceJson {
    pub fn from_verification(index: usize, r: &VerificationReport) -> Self {
        Self {
            index,
            lhs: r.lhs,
            rhs: r.rhs_core,
            constant: r.prefactor * r.constant,
            ratio: r.ratio,
            status: r.status,
            budget: r.error_budget,
            reason: r.reason.clone(),
            params: None,
            triage: r.triage.clone(),
            witness: (r.status == Status::Violated)
                .then(|| serde_json::to_value(&r.instance).expect("instance serializes")),
        }
    }

    pub fn from_lemma(index: usize, r: &LemmaRecord) -> Self {
        Self {
            index,
            lhs: r.lhs,
            rhs: r.rhs,
            constant: r.constant,
            ratio: r.ratio,
            status: r.status,
            budget: r.budget,
            reason: None,
            params: None,
            triage: None,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
}

impl Summary {
    pub fn of<'a>(statuses: impl IntoIterator<Item = &'a Status>) -> Self {
        let mut s = Summary::default();
        for st in statuses {
            match st {
                Status::Holds => s.holds += 1,
                Status::Violated => s.violated += 1,
                Status::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    pub fn add(&mut self, other: Summary) {
        self.holds += other.holds;
        self.violated += other.violated;
        self.inconclusive += other.inconclusive;
    }

    /// 0 all hold, 2 any violated, 3 inconclusive without violations.
    pub fn exit_code(&self) -> u8 {
        if self.violated > 0 {
            2
        } else if self.inconclusive > 0 {
            3
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchJson {
    pub best_ratio: f64,
    pub best_params: Vec<f64>,
    pub evaluations: usize,
    pub skipped: usize,
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub theorem: Option<String>,
    pub mode: Option<Mode>,
    pub constant: Option<ConstantJson>,
    pub instances: Vec<InstanceJson>,
    pub max_ratio: Option<f64>,
    pub seed: Option<u64>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_weights: Option<usize>,
    /// Same run in the alternate mode (sweeps with `both_modes`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub companions: Vec<Report>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            timestamp: None,
            theorem: None,
            mode: None,
            constant: None,
            instances: Vec::new(),
            max_ratio: None,
            seed: None,
            summary: Summary::default(),
            search: None,
            rejected_weights: None,
            companions: Vec::new(),
        }
    }

    /// Recomputes the summary and maximum ratio from the instances.
    pub fn finish(mut self) -> Self {
        self.summary = Summary::of(self.instances.iter().map(|i| &i.status));
        self.max_ratio = self
            .instances
            .iter()
            .map(|i| i.ratio)
            .filter(|r| r.is_finite())
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per instance, companions included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        self.csv_rows(&mut out);
        out
    }

    fn csv_rows(&self, out: &mut String) {
        let theorem = self.theorem.as_deref().unwrap_or("");
        let mode = self.mode.map(|m| m.as_str()).unwrap_or("");
        for i in &self.instances {
            out.push_str(&format!(
                "{theorem},{mode},{},{},{},{},{:?},{}\n",
                num(i.lhs),
                num(i.rhs),
                num(i.constant),
                num(i.ratio),
                i.status,
                num(i.budget)
            ));
        }
        for c in &self.companions {
            c.csv_rows(out);
        }
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let s = Summary::of(&[Status::Holds, Status::Holds]);
        assert_eq!(s.exit_code(), 0);
        assert_eq!(Summary::of(&[Status::Holds, Status::Inconclusive]).exit_code(), 3);
        assert_eq!(Summary::of(&[Status::Inconclusive, Status::Violated]).exit_code(), 2);
    }

    #[test]
    fn csv_has_fixed_header() {
        let mut r = Report::new("verify");
        r.theorem = Some("T2.1".into());
        r.mode = Some(Mode::AsPrinted);
        r.instances.push(InstanceJson {
            index: 0,
            lhs: 0.25,
            rhs: 1.0,
            constant: 1.0 / 3.0,
            ratio: 0.75,
            status: Status::Holds,
            budget: 1e-12,
            reason: None,
            params: None,
            triage: None,
            witness: None,
        });
        let csv = r.finish().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("T2.1,as_printed,2.5e-1,1e0,"));
    }
}
