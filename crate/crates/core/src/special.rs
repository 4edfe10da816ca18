//! Gamma function and the constants of Boyd's inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::Interval;
use crate::quad::{self, Shape};
use crate::{Estimate, Mode};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            x,
            a: 0.0,
            b: f64::INFINITY,
        });
    }
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let ln = 0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln();
    Ok(ln.exp())
}

/// Parameters `(ν, η, s)` of Boyd's inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoydParams {
    pub nu: f64,
    pub eta: f64,
    pub s: f64,
}

impl BoydParams {
    pub fn new(nu: f64, eta: f64, s: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::PreconditionFailed(format!("need nu > 0, got {nu}")));
        }
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::PreconditionFailed(format!("need s > 1, got {s}")));
        }
        if !(eta >= 0.0 && eta < s) {
            return Err(Error::PreconditionFailed(format!(
                "need 0 <= eta < s, got eta = {eta}, s = {s}"
            )));
        }
        Ok(Self { nu, eta, s })
    }
}

pub fn boyd_sigma(p: &BoydParams) -> f64 {
    let BoydParams { nu, eta, s } = *p;
    ((nu * (s - 1.0) + (s - eta)) / ((s - 1.0) * (nu + eta))).powf(1.0 / s)
}

/// The integral `I(ν, η, s)`.
///
/// For `η = 0` the first bracket vanishes at `t = 1` and the integrand
/// behaves like `(1 - t)^{-1/s}`, which is treated as an integrable
/// endpoint singularity.
pub fn boyd_i(p: &BoydParams, tol: f64) -> Result<Estimate> {
    let BoydParams { nu, eta, s } = *p;
    let k = s * (eta - 1.0) / (s - eta);
    let e = -(nu + eta + s * nu) / (s * nu);
    let f = move |t: f64| {
        let base = if eta == 0.0 { 1.0 - t } else { 1.0 + k * t };
        base.powf(e) * (1.0 + (eta - 1.0) * t) * t.powf(1.0 / nu - 1.0)
    };
    let shape = Shape::new(1.0 / nu - 1.0, if eta == 0.0 { -1.0 / s } else { 0.0 });
    let r = quad::integrate(&f, &shape, &Interval::unit(), tol)?;
    Ok(Estimate::from_quad(&r))
}

/// `N(ν, η, s)`; the relative error is inherited from `I`.
pub fn boyd_n(p: &BoydParams) -> Result<Estimate> {
    let BoydParams { nu, eta, s } = *p;
    let sigma = boyd_sigma(p);
    let i = boyd_i(p, 1e-12)?;
    let value = (s - eta) * nu.powf(nu) * sigma.powf(nu + eta - s) / ((s - 1.0) * (nu + eta) * i.value.powf(nu));
    Ok(Estimate {
        value,
        rel_error: nu * i.rel_error + 8.0 * f64::EPSILON,
    })
}

/// `L(ν, η)` of the limiting case `η = s` of Boyd's inequality.
pub fn boyd_l(nu: f64, eta: f64) -> Result<f64> {
    if !(nu > 0.0) || !(eta >= 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "L(nu, eta) needs nu > 0 and eta >= 1, got ({nu}, {eta})"
        )));
    }
    let ratio = gamma((eta + 1.0) / eta + 1.0 / nu)? / (gamma((eta + 1.0) / eta)? * gamma(1.0 / nu)?);
    Ok(eta * nu.powf(eta) / (nu + eta) * (nu / (nu + eta)).powf(nu / eta) * ratio.powf(nu))
}

/// `L(pq, q)`. The printed closed form drops the outer power `ν = pq` on
/// the Gamma ratio; `Mode::AsDerived` keeps it and agrees with [`boyd_l`].
pub fn boyd_l_pq(p: f64, q: f64, mode: Mode) -> Result<f64> {
    match mode {
        Mode::AsDerived => boyd_l(p * q, q),
        Mode::AsPrinted => {
            if !(p > 0.0) || !(q >= 1.0) {
                return Err(Error::PreconditionFailed(format!(
                    "L(pq, q) needs p > 0 and q >= 1, got ({p}, {q})"
                )));
            }
            let ratio = gamma((q + 1.0) / q + 1.0 / (p * q))? / (gamma((q + 1.0) / q)? * gamma(1.0 / (p * q))?);
            Ok((p * q).powf(q) / (p + 1.0) * (p / (p + 1.0)).powf(p) * ratio)
        }
    }
}
