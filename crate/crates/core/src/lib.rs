//! Numerical verification of Opial-type integral inequalities.
//!
//! The crate evaluates the constants of a catalog of weighted Opial-type
//! inequalities, integrates both sides for concrete weights and test
//! functions, and reports whether each instance holds within a propagated
//! numerical error budget.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature and Lanczos tables keep their published digits.
#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

pub mod constants;
pub mod eigen;
pub mod error;
pub mod funcspace;
pub mod opial;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use funcspace::{FunctionSpec, Interval};

/// Which reading of a formula to use when the printed form and the form
/// obtained by redoing the derivation disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    AsPrinted,
    AsDerived,
}

impl Mode {
    pub fn other(self) -> Self {
        match self {
            Mode::AsPrinted => Mode::AsDerived,
            Mode::AsDerived => Mode::AsPrinted,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::AsPrinted => "as_printed",
            Mode::AsDerived => "as_derived",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as_printed" | "printed" => Ok(Mode::AsPrinted),
            "as_derived" | "derived" => Ok(Mode::AsDerived),
            _ => Err(Error::UnknownId(s.to_string())),
        }
    }
}

/// A value with a first-order relative error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub rel_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, rel_error: 0.0 }
    }

    pub fn from_quad(r: &quad::QuadResult) -> Self {
        Self {
            value: r.value,
            rel_error: r.rel_error(),
        }
    }

    pub fn powf(self, e: f64) -> Self {
        Self {
            value: self.value.powf(e),
            rel_error: e.abs() * self.rel_error,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            rel_error: self.rel_error,
        }
    }

    pub fn abs_error(&self) -> f64 {
        self.value.abs() * self.rel_error
    }
}

impl std::ops::Mul for Estimate {
    type Output = Estimate;

    fn mul(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value * other.value,
            rel_error: self.rel_error + other.rel_error,
        }
    }
}

impl std::ops::Div for Estimate {
    type Output = Estimate;

    fn div(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value / other.value,
            rel_error: self.rel_error + other.rel_error,
        }
    }
}
