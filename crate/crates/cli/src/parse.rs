//! Inline mini-syntax for functions, intervals and parameter boxes.
//!
//! ```text
//! const:C            constant
//! pow:ALPHA[,C]      C (x - a)^ALPHA
//! spow:ALPHA[,C]     C (b - x)^ALPHA
//! exp:BETA[,C]       C exp(BETA x)
//! pwl:x0,y0;x1,y1    piecewise linear through the knots
//! {...}              full JSON form
//! @path              JSON form read from a file
//! ```

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use hopial::funcspace::{FunctionSpec, Interval};

fn number(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("{what}: `{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("{what}: `{s}` is not finite");
    }
    Ok(v)
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| number(t, what)).collect()
}

fn exponent_and_scale(body: &str, what: &str) -> Result<(f64, f64)> {
    match numbers(body, what)?.as_slice() {
        [e] => Ok((*e, 1.0)),
        [e, c] => Ok((*e, *c)),
        _ => bail!("{what}: expected EXPONENT[,SCALE], got `{body}`"),
    }
}

/// Parses a function given in the mini-syntax, as JSON, or as `@file`.
pub fn function(s: &str) -> Result<FunctionSpec> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return json_function(&text).with_context(|| format!("parsing {path}"));
    }
    if s.starts_with('{') {
        return json_function(s);
    }
    let (head, body) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("`{s}`: expected KIND:ARGS (const, pow, spow, exp, pwl) or JSON"))?;
    Ok(match head {
        "const" => FunctionSpec::constant(number(body, "const")?),
        "pow" => {
            let (alpha, c) = exponent_and_scale(body, "pow")?;
            FunctionSpec::power(c, alpha)
        }
        "spow" => {
            let (alpha, c) = exponent_and_scale(body, "spow")?;
            FunctionSpec::shifted_power(c, alpha)
        }
        "exp" => {
            let (beta, c) = exponent_and_scale(body, "exp")?;
            FunctionSpec::exponential(c, beta)
        }
        "pwl" => {
            let knots = body
                .split(';')
                .filter(|k| !k.trim().is_empty())
                .map(|k| match numbers(k, "pwl")?.as_slice() {
                    [x, y] => Ok((*x, *y)),
                    _ => bail!("pwl: knot `{k}` is not X,Y"),
                })
                .collect::<Result<Vec<_>>>()?;
            if knots.len() < 2 {
                bail!("pwl: need at least two knots");
            }
            FunctionSpec::piecewise_linear(&knots)
        }
        other => bail!("unknown function kind `{other}` (const, pow, spow, exp, pwl)"),
    })
}

fn json_function(text: &str) -> Result<FunctionSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| anyhow!("at `{}`: {}", e.path(), e.inner()))
}

/// `A,B` with `A < B`.
pub fn interval(s: &str) -> Result<Interval> {
    match numbers(s, "interval")?.as_slice() {
        [a, b] => Interval::new(*a, *b).map_err(|e| anyhow!("interval: {e}")),
        _ => bail!("interval: expected A,B, got `{s}`"),
    }
}

/// `LO,HI` with `LO <= HI`.
pub fn range(s: &str, what: &str) -> Result<(f64, f64)> {
    match numbers(s, what)?.as_slice() {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        [_, _] => bail!("{what}: empty range `{s}`"),
        _ => bail!("{what}: expected LO,HI, got `{s}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mini_syntax() {
        assert_eq!(function("const:1").unwrap(), FunctionSpec::constant(1.0));
        assert_eq!(function("pow:-0.49").unwrap(), FunctionSpec::power(1.0, -0.49));
        assert_eq!(function("pow:2,3").unwrap(), FunctionSpec::power(3.0, 2.0));
        assert_eq!(function("spow:0.5").unwrap(), FunctionSpec::shifted_power(1.0, 0.5));
        assert_eq!(function("exp:-1,2").unwrap(), FunctionSpec::exponential(2.0, -1.0));
        assert_eq!(
            function("pwl:0,0;0.5,0.5;1,0").unwrap(),
            FunctionSpec::piecewise_linear(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)])
        );
        let json = r#"{"variant":"PowerLaw","c":1.0,"alpha":0.5}"#;
        assert_eq!(function(json).unwrap(), FunctionSpec::power(1.0, 0.5));
    }

    #[test]
    fn bad_input_names_the_problem() {
        assert!(function("sin:1").unwrap_err().to_string().contains("sin"));
        assert!(function("pow:x").unwrap_err().to_string().contains("pow"));
        assert!(function("pwl:0,0").is_err());
        let e = function(r#"{"variant":"PowerLaw","c":"x","alpha":1}"#).unwrap_err();
        assert!(e.to_string().contains('c'), "{e}");
        assert!(interval("1,0").is_err());
        assert!(interval("0,1,2").is_err());
        assert_eq!(range("-0.5,-0.05", "alpha").unwrap(), (-0.5, -0.05));
    }
}
