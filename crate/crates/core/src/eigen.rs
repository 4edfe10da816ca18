//! Smallest eigenvalue of `-(R (u')^p)' = λ m u^p` with Dirichlet
//! conditions, by finite differences (p = 1) and shooting (any p ≥ 1).
//!
//! An end where `R` vanishes cannot carry a Dirichlet condition; there the
//! bounded (natural) solution is selected instead.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::Primitive;
use crate::error::{Error, Result};
use crate::funcspace::{FunctionSpec, Interval};
use crate::quad::Accuracy;
use crate::Estimate;

pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    LeftZero,
    RightZero,
    Both,
}

pub const DEFAULT_BRACKET: (f64, f64) = (1e-8, 1e8);
pub const DEFAULT_FD_POINTS: usize = 2048;
const SHOOT_DELTAS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

#[derive(Clone)]
pub struct EigenProblem {
    pub weight_r: Coefficient,
    pub weight_m: Coefficient,
    /// Any antiderivative of `weight_m`; used for lumped masses.
    pub mass: Coefficient,
    pub p: f64,
    pub interval: Interval,
    pub boundary: Boundary,
    pub bracket: (f64, f64),
    pub fd_points: usize,
}

impl fmt::Debug for EigenProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenProblem")
            .field("p", &self.p)
            .field("interval", &self.interval)
            .field("boundary", &self.boundary)
            .field("bracket", &self.bracket)
            .finish_non_exhaustive()
    }
}

impl EigenProblem {
    pub fn new(
        weight_r: Coefficient,
        weight_m: Coefficient,
        mass: Coefficient,
        p: f64,
        interval: Interval,
        boundary: Boundary,
    ) -> Self {
        Self {
            weight_r,
            weight_m,
            mass,
            p,
            interval,
            boundary,
            bracket: DEFAULT_BRACKET,
            fd_points: DEFAULT_FD_POINTS,
        }
    }

    /// Problem with coefficient `r` and density `m` given as specs.
    pub fn from_specs(
        r: &FunctionSpec,
        m: &FunctionSpec,
        p: f64,
        interval: Interval,
        boundary: Boundary,
    ) -> Result<Self> {
        r.validate(&interval)?;
        let mass = Primitive::of(m, 1.0, &interval, &Accuracy::default())?;
        let (r, m) = (r.clone(), m.clone());
        Ok(Self::new(
            Arc::new(move |x| r.eval(x, &interval)),
            Arc::new(move |x| m.eval(x, &interval)),
            Arc::new(move |x| mass.head(x)),
            p,
            interval,
            boundary,
        ))
    }

    /// Same problem with the density multiplied by `c > 0`.
    pub fn scaled_density(&self, c: f64) -> Self {
        let (m, mass) = (self.weight_m.clone(), self.mass.clone());
        Self {
            weight_m: Arc::new(move |x| c * m(x)),
            mass: Arc::new(move |x| c * mass(x)),
            ..self.clone()
        }
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.bracket = (lo, hi);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Dirichlet,
    Natural,
}

#[derive(Debug, Clone, Copy)]
struct Ends {
    left: End,
    right: End,
    left_singular: bool,
    right_singular: bool,
}

fn classify(prob: &EigenProblem) -> Result<Ends> {
    let iv = prob.interval;
    iv.validate()?;
    if !(prob.p >= 1.0 && prob.p.is_finite()) {
        return Err(Error::PreconditionFailed(format!("p >= 1 (got {})", prob.p)));
    }
    let n = 1024;
    let mut rmax = 0.0f64;
    let mut mass_seen = false;
    for i in 1..n {
        let x = iv.a + iv.len() * i as f64 / n as f64;
        let r = (prob.weight_r)(x);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::SingularCoefficient(x));
        }
        rmax = rmax.max(r);
        let m = (prob.weight_m)(x);
        if m < 0.0 || m.is_nan() {
            return Err(Error::PreconditionFailed(format!(
                "density is nonnegative (m({x}) = {m})"
            )));
        }
        mass_seen |= m > 0.0;
    }
    if !mass_seen {
        return Err(Error::PreconditionFailed("density does not vanish identically".into()));
    }
    let vanishes = |x: f64| (prob.weight_r)(x).abs() <= 1e-14 * rmax;
    let left_singular = vanishes(iv.a);
    let right_singular = vanishes(iv.b);
    let wants_left = matches!(prob.boundary, Boundary::LeftZero | Boundary::Both);
    let wants_right = matches!(prob.boundary, Boundary::RightZero | Boundary::Both);
    let left = if wants_left && !left_singular {
        End::Dirichlet
    } else {
        End::Natural
    };
    let right = if wants_right && !right_singular {
        End::Dirichlet
    } else {
        End::Natural
    };
    if left == End::Natural && right == End::Natural {
        return Err(Error::PreconditionFailed(
            "a Dirichlet condition at an end where R does not vanish".into(),
        ));
    }
    Ok(Ends {
        left,
        right,
        left_singular,
        right_singular,
    })
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub lambda: f64,
    /// Richardson-extrapolated finite-difference value (p = 1 only).
    pub finite_difference: Option<f64>,
    pub shooting: f64,
    pub rel_error: f64,
}

/// λ₀ of the problem.
pub fn smallest_eigenvalue(prob: &EigenProblem, tol: f64) -> Result<f64> {
    Ok(solve(prob, tol)?.lambda)
}

pub fn solve(prob: &EigenProblem, tol: f64) -> Result<EigenSolution> {
    let ends = classify(prob)?;
    let (lo, hi) = prob.bracket;
    let (shoot, shoot_err) = shooting(prob, &ends, tol)?;
    if prob.p != 1.0 {
        return Ok(EigenSolution {
            lambda: shoot,
            finite_difference: None,
            shooting: shoot,
            rel_error: shoot_err.max(tol),
        });
    }
    let (fd, fd_err) = finite_difference(prob, &ends, prob.fd_points)?;
    if !(fd >= lo && fd <= hi) {
        return Err(Error::NoEigenvalueInBracket { lo, hi });
    }
    let gap = (fd - shoot).abs() / fd;
    if gap > tol.max(1e-6) {
        return Err(Error::EigenMismatch { fd, shooting: shoot });
    }
    Ok(EigenSolution {
        lambda: fd,
        finite_difference: Some(fd),
        shooting: shoot,
        rel_error: gap.max(fd_err).max(4.0 * f64::EPSILON),
    })
}

/// Lumped-mass linear elements on `n` cells; returns the smallest eigenvalue
/// of the discrete pencil.
pub fn finite_difference_raw(prob: &EigenProblem, n: usize) -> Result<f64> {
    let ends = classify(prob)?;
    fd_single(prob, &ends, n)
}

fn fd_single(prob: &EigenProblem, ends: &Ends, n: usize) -> Result<f64> {
    if n < 8 {
        return Err(Error::PreconditionFailed(format!("at least 8 cells (got {n})")));
    }
    let iv = prob.interval;
    let h = iv.len() / n as f64;
    let x = |i: usize| if i == n { iv.b } else { iv.a + i as f64 * h };
    let first = if ends.left == End::Dirichlet { 1 } else { 0 };
    let last = if ends.right == End::Dirichlet { n - 1 } else { n };
    // Element stiffness k[j] for the cell (x_{j-1}, x_j), j = 1..=n.
    let k: Vec<f64> = (0..=n + 1)
        .map(|j| {
            if j == 0 || j > n {
                0.0
            } else {
                (prob.weight_r)(iv.a + (j as f64 - 0.5) * h) / h
            }
        })
        .collect();
    let m_at = |t: f64| (prob.mass)(t.clamp(iv.a, iv.b));
    let size = last + 1 - first;
    let mut diag = Vec::with_capacity(size);
    let mut off = Vec::with_capacity(size.saturating_sub(1));
    let mut scale = Vec::with_capacity(size);
    for i in first..=last {
        let lo = if i == 0 { iv.a } else { x(i) - 0.5 * h };
        let hi = if i == n { iv.b } else { x(i) + 0.5 * h };
        let mi = m_at(hi) - m_at(lo);
        if !(mi > 0.0) || !mi.is_finite() {
            return Err(Error::PreconditionFailed(format!(
                "density has positive mass near every node (node {} has {mi})",
                x(i)
            )));
        }
        scale.push(1.0 / mi.sqrt());
        diag.push(k[i] + k[i + 1]);
    }
    for (idx, i) in (first..last).enumerate() {
        off.push(-k[i + 1] * scale[idx] * scale[idx + 1]);
    }
    for (d, s) in diag.iter_mut().zip(&scale) {
        *d *= s * s;
    }
    Ok(smallest_tridiagonal(&diag, &off))
}

/// Number of eigenvalues below `x` (Sturm count via LDLᵀ pivots).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::MIN_POSITIVE;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_tridiagonal(diag: &[f64], off: &[f64]) -> f64 {
    let mut hi = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = off.get(i).map_or(0.0, |e| e.abs());
            d + l + r
        })
        .fold(f64::MIN, f64::max);
    let mut lo = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = off.get(i).map_or(0.0, |e| e.abs());
            d - l - r
        })
        .fold(f64::MAX, f64::min)
        .min(0.0);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn finite_difference(prob: &EigenProblem, ends: &Ends, n: usize) -> Result<(f64, f64)> {
    let coarse = fd_single(prob, ends, n / 2)?;
    let fine = fd_single(prob, ends, n)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok((extrapolated, ((fine - coarse) / 3.0).abs() / extrapolated))
}

fn phi(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else {
        v.signum() * v.abs().powf(p)
    }
}

fn phi_inv(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else {
        v.signum() * v.abs().powf(1.0 / p)
    }
}

struct Shot {
    /// Whether `u` reached zero before the target end.
    overshoot: bool,
}

/// Integration plan: start end, direction and start offset.
struct Plan {
    start: f64,
    dir: f64,
    length: f64,
    start_natural: bool,
}

fn plan(prob: &EigenProblem, ends: &Ends) -> Plan {
    let iv = prob.interval;
    if ends.right == End::Natural {
        Plan {
            start: iv.b,
            dir: -1.0,
            length: iv.len(),
            start_natural: true,
        }
    } else {
        Plan {
            start: iv.a,
            dir: 1.0,
            length: iv.len(),
            start_natural: ends.left == End::Natural,
        }
    }
}

fn shoot_once(
    prob: &EigenProblem,
    plan: &Plan,
    lambda: f64,
    offset: f64,
    record: Option<&mut Vec<(f64, f64)>>,
    h_max: f64,
) -> Result<Shot> {
    let p = prob.p;
    let x_of = |t: f64| plan.start + plan.dir * t;
    let y0 = if plan.start_natural {
        // Bounded solution: u ≈ 1, flux from the mass of the sliver.
        let x1 = x_of(offset);
        let sliver = ((prob.mass)(plan.start) - (prob.mass)(x1)).abs();
        let w = lambda * sliver;
        let r = (prob.weight_r)(x1);
        let du = phi_inv(w / r, p);
        [1.0 - offset * du, w]
    } else {
        let r = (prob.weight_r)(x_of(offset));
        [offset * phi_inv(1.0 / r, p), 1.0]
    };
    // Travelling frame with t the distance from the start; y[1] is the
    // flux magnitude |R φ(u')|, which grows from a natural start and decays
    // from a Dirichlet start.
    let sign_u = if plan.start_natural { -1.0 } else { 1.0 };
    let rhs = |t: f64, y: [f64; 2]| -> [f64; 2] {
        let x = x_of(t);
        let r = (prob.weight_r)(x);
        let m = (prob.weight_m)(x);
        if plan.start_natural {
            // y[1] ≥ 0 is the accumulated mass flux; u decreases.
            [sign_u * phi_inv(y[1] / r, p), lambda * m * phi(y[0], p)]
        } else {
            [phi_inv(y[1] / r, p), -lambda * m * phi(y[0], p)]
        }
    };
    let t_end = plan.length - 1e-10 * plan.length;
    let out = dopri(
        &rhs,
        offset,
        y0,
        t_end,
        h_max,
        record.map(|v| (v, plan.start, plan.dir)),
    )?;
    if out.stopped {
        return Ok(Shot { overshoot: true });
    }
    let du = rhs(out.t, out.y)[0];
    let u_end = out.y[0] + du * (plan.length - out.t);
    Ok(Shot {
        overshoot: u_end <= 0.0,
    })
}

struct DopriOut {
    t: f64,
    y: [f64; 2],
    /// `u` crossed zero before `t_end`.
    stopped: bool,
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_BS: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RTOL: f64 = 1e-11;
const ATOL: f64 = 1e-14;
const MAX_STEPS: usize = 200_000;

/// Trajectory sink plus the start point and direction of the sweep.
type Recorder<'a> = (&'a mut Vec<(f64, f64)>, f64, f64);

/// Dormand–Prince 5(4) from `t0` to `t1`, stopping early when `u ≤ 0`.
fn dopri(
    f: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    h_max: f64,
    mut record: Option<Recorder<'_>>,
) -> Result<DopriOut> {
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t1 - t0) * 1e-4).min(h_max);
    if let Some((v, start, dir)) = record.as_mut() {
        v.push((*start + *dir * t, y[0]));
    }
    for _ in 0..MAX_STEPS {
        if t >= t1 {
            break;
        }
        h = h.min(t1 - t);
        let mut k = [[0.0f64; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for j in 0..s {
                for c in 0..2 {
                    ys[c] += h * DP_A[s][j] * k[j][c];
                }
            }
            k[s] = f(t + DP_C[s] * h, ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += DP_B[s] * k[s][c];
                lo += DP_BS[s] * k[s][c];
            }
            y_new[c] = y[c] + h * hi;
            let sc = ATOL + RTOL * y[c].abs().max(y_new[c].abs());
            err = err.max((h * (hi - lo)).abs() / sc);
        }
        if !y_new[0].is_finite() || !y_new[1].is_finite() || err.is_nan() {
            // A stage stepped past a zero of u into a region where the
            // flux is undefined; shrink and retry.
            if h <= 1e-15 * (t1 - t0) {
                return Err(Error::NonFinite(t));
            }
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            if let Some((v, start, dir)) = record.as_mut() {
                v.push((*start + *dir * t, y[0]));
            }
            if y[0] <= 0.0 {
                return Ok(DopriOut { t, y, stopped: true });
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(h_max);
        if h <= 1e-16 * (t1 - t0).max(1.0) {
            return Err(Error::NonFinite(t));
        }
    }
    if t < t1 {
        return Err(Error::BudgetExceeded {
            panels: MAX_STEPS,
            value: t,
            error: t1 - t,
        });
    }
    Ok(DopriOut { t, y, stopped: false })
}

fn bisect_lambda(prob: &EigenProblem, plan: &Plan, offset: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = prob.bracket;
    let h_max = plan.length / 16.0;
    let over = |l: f64| -> Result<bool> { Ok(shoot_once(prob, plan, l, offset, None, h_max)?.overshoot) };
    if over(lo)? || !over(hi)? {
        return Err(Error::NoEigenvalueInBracket { lo, hi });
    }
    while hi / lo > 2.0 {
        let mid = (lo * hi).sqrt();
        if over(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let target = (tol * 1e-3).max(1e-13);
    while (hi - lo) > target * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if over(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn shooting(prob: &EigenProblem, ends: &Ends, tol: f64) -> Result<(f64, f64)> {
    let plan = plan(prob, ends);
    let singular_start = if plan.dir > 0.0 {
        ends.left_singular
    } else {
        ends.right_singular
    };
    if !singular_start {
        let lambda = bisect_lambda(prob, &plan, 1e-12 * plan.length, tol)?;
        return Ok((lambda, 1e-9));
    }
    let l: Vec<f64> = SHOOT_DELTAS
        .iter()
        .map(|d| bisect_lambda(prob, &plan, d * plan.length, tol))
        .collect::<Result<_>>()?;
    // Eliminate the O(δ) and O(δ²) terms.
    let r1 = 2.0 * l[1] - l[0];
    let r2 = 2.0 * l[2] - l[1];
    let lambda = (4.0 * r2 - r1) / 3.0;
    Ok((lambda, ((r2 - r1) / 3.0).abs() / lambda + 1e-9))
}

/// The shooting solution at `lambda`, sampled on `n` uniform points and
/// normalized to unit maximum.
pub fn eigenfunction(prob: &EigenProblem, lambda: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let ends = classify(prob)?;
    let plan = plan(prob, &ends);
    let singular_start = if plan.dir > 0.0 {
        ends.left_singular
    } else {
        ends.right_singular
    };
    let offset = if singular_start { SHOOT_DELTAS[2] } else { 1e-12 } * plan.length;
    let mut raw = Vec::new();
    shoot_once(prob, &plan, lambda, offset, Some(&mut raw), plan.length / n as f64)?;
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let iv = prob.interval;
    let peak = raw.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    let out = (0..n)
        .map(|i| {
            let x = iv.a + iv.len() * i as f64 / (n - 1) as f64;
            let j = raw.partition_point(|v| v.0 < x).clamp(1, raw.len() - 1);
            let (x0, u0) = raw[j - 1];
            let (x1, u1) = raw[j];
            let u = if x1 > x0 {
                u0 + (u1 - u0) * (x - x0) / (x1 - x0)
            } else {
                u1
            };
            (x, u / peak)
        })
        .collect();
    Ok(out)
}

/// `1/λ₀` for `-(R(x,b) (u')^p)' = λ s'(x) u^p`, `u(a) = 0`, bounded at `b`.
pub fn t2_13_constant(
    r: &FunctionSpec,
    s: &FunctionSpec,
    p: f64,
    interval: &Interval,
    acc: &Accuracy,
) -> Result<Estimate> {
    s.validate(interval)?;
    if s.has_interior_kink(interval) {
        return Err(Error::NonDifferentiableWeight(
            "s has an interior kink, so s' is discontinuous".into(),
        ));
    }
    let iv = *interval;
    let ds = s.derivative();
    let tail = Arc::new(Primitive::of(r, 1.0, interval, acc)?);
    let (s_owned, tail_r) = (s.clone(), tail.clone());
    let prob = EigenProblem::new(
        Arc::new(move |x| tail_r.tail(x)),
        Arc::new(move |x| ds.eval(x, &iv)),
        Arc::new(move |x| s_owned.eval(x, &iv)),
        p,
        iv,
        Boundary::Both,
    );
    let mass_total = s.eval(iv.b, &iv) - s.eval(iv.a, &iv);
    if !(mass_total > 0.0) {
        return Err(Error::PreconditionFailed(
            "s' > 0 (s constant or decreasing gives a degenerate density)".into(),
        ));
    }
    let tol = acc.tol_for(&crate::quad::Shape::smooth()).max(1e-9);
    let sol = solve(&prob, tol)?;
    Ok(Estimate {
        value: 1.0 / sol.lambda,
        rel_error: sol.rel_error + tail.rel_error,
    })
}

/// λ₀ of Boyd–Wong's problem `(r (u')^p)' = λ s' u^p` with `u(a) = 0` and
/// the natural condition `r(b) u'(b)^p = λ s(b) u(b)^p`, i.e. the infimum of
/// `∫ r |u'|^{p+1} / ((p+1) ∫ s |u|^p |u'|)` over `u(a) = 0`.
pub fn boyd_wong_eigenvalue(r: &FunctionSpec, s: &FunctionSpec, p: f64, interval: &Interval) -> Result<Estimate> {
    let iv = *interval;
    iv.validate()?;
    r.validate(&iv)?;
    s.validate(&iv)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::PreconditionFailed(format!("p > 0 (got {p})")));
    }
    if s.has_interior_kink(&iv) {
        return Err(Error::NonDifferentiableWeight(
            "s has an interior kink, so s' is discontinuous".into(),
        ));
    }
    let r_a = r.eval(iv.a, &iv);
    if !(r_a > 0.0 && r_a.is_finite()) {
        return Err(Error::PreconditionFailed(format!("r(a) > 0 (got {r_a})")));
    }
    for i in 1..1024 {
        let x = iv.a + iv.len() * i as f64 / 1024.0;
        if !(r.eval(x, &iv) > 0.0) {
            return Err(Error::SingularCoefficient(x));
        }
    }
    let ds = s.derivative();
    let s_b = s.eval(iv.b, &iv);
    let len = iv.len();
    let offset = 1e-12 * len;
    // Residual of the condition at b; positive below λ₀.
    let residual = |lambda: f64| -> Result<f64> {
        let rhs = |t: f64, y: [f64; 2]| -> [f64; 2] {
            let x = iv.a + t;
            [
                phi_inv(y[1] / r.eval(x, &iv), p),
                lambda * ds.eval(x, &iv) * phi(y[0].max(0.0), p),
            ]
        };
        let y0 = [offset * phi_inv(1.0 / r_a, p), 1.0];
        let out = dopri(&rhs, offset, y0, len, len / 16.0, None)?;
        Ok(out.y[1] - lambda * s_b * phi(out.y[0], p))
    };
    let (mut lo, mut hi) = DEFAULT_BRACKET;
    if residual(lo)? <= 0.0 {
        return Err(Error::NoEigenvalueInBracket { lo, hi });
    }
    let mut probe = lo;
    loop {
        let next = probe * 2.0;
        if next > hi {
            return Err(Error::NoEigenvalueInBracket { lo, hi });
        }
        if residual(next)? <= 0.0 {
            lo = probe;
            hi = next;
            break;
        }
        probe = next;
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Estimate {
        value: 0.5 * (lo + hi),
        rel_error: 1e-9,
    })
}
