use approx::assert_relative_eq;
use hopial::eigen::{eigenfunction, smallest_eigenvalue, solve, t2_13_constant, Boundary, EigenProblem};
use hopial::funcspace::{FunctionSpec, Interval};
use hopial::quad::Accuracy;
use nalgebra::{DMatrix, SymmetricEigen};

/// Dense three-point discretization of `-(R u')' = λ m u` with Dirichlet
/// ends, solved as the symmetric problem `M^{-1/2} A M^{-1/2}`.
fn dense_oracle(r: impl Fn(f64) -> f64, m: impl Fn(f64) -> f64, iv: Interval, n: usize) -> f64 {
    let h = iv.len() / n as f64;
    let k = n - 1;
    let x = |j: usize| iv.a + j as f64 * h;
    let mut b = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let j = i + 1;
        let (rl, rr) = (r(x(j) - 0.5 * h), r(x(j) + 0.5 * h));
        b[(i, i)] = (rl + rr) / (h * h * m(x(j)));
        if i + 1 < k {
            let off = -rr / (h * h * (m(x(j)) * m(x(j + 1))).sqrt());
            b[(i, i + 1)] = off;
            b[(i + 1, i)] = off;
        }
    }
    SymmetricEigen::new(b)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn grid() -> Vec<(FunctionSpec, FunctionSpec, Interval)> {
    let unit = Interval::unit();
    let wide = Interval::new(0.5, 2.0).unwrap();
    vec![
        (FunctionSpec::constant(1.0), FunctionSpec::constant(1.0), unit),
        (FunctionSpec::constant(2.0), FunctionSpec::constant(1.0), unit),
        (FunctionSpec::exponential(1.0, 1.0), FunctionSpec::constant(1.0), unit),
        (FunctionSpec::constant(1.0), FunctionSpec::exponential(1.0, -1.0), unit),
        (FunctionSpec::shifted_power(1.0, 0.0), FunctionSpec::constant(3.0), unit),
        (
            FunctionSpec::exponential(2.0, 0.5),
            FunctionSpec::exponential(0.5, 0.3),
            unit,
        ),
        (FunctionSpec::constant(1.0), FunctionSpec::constant(1.0), wide),
        (
            FunctionSpec::exponential(1.0, -0.7),
            FunctionSpec::exponential(1.5, 0.2),
            wide,
        ),
        (
            FunctionSpec::Sum {
                terms: vec![FunctionSpec::constant(1.0), FunctionSpec::exponential(0.5, 1.0)],
            },
            FunctionSpec::constant(1.0),
            unit,
        ),
        (
            FunctionSpec::constant(1.0),
            FunctionSpec::Sum {
                terms: vec![FunctionSpec::constant(0.5), FunctionSpec::exponential(1.0, 0.8)],
            },
            wide,
        ),
    ]
}

#[test]
fn shooting_and_finite_differences_agree_on_the_grid() {
    for (i, (r, m, iv)) in grid().into_iter().enumerate() {
        let prob = EigenProblem::from_specs(&r, &m, 1.0, iv, Boundary::Both).unwrap();
        let sol = solve(&prob, 1e-9).unwrap();
        let fd = sol.finite_difference.unwrap();
        assert!(
            (fd - sol.shooting).abs() / fd <= 1e-6,
            "case {i}: fd {fd} vs shooting {}",
            sol.shooting
        );
        let oracle = dense_oracle(|x| r.eval(x, &iv), |x| m.eval(x, &iv), iv, 600);
        assert_relative_eq!(sol.lambda, oracle, max_relative = 1e-4);
    }
}

#[test]
fn linear_sanity_case() {
    let one = FunctionSpec::constant(1.0);
    let prob = EigenProblem::from_specs(&one, &one, 1.0, Interval::unit(), Boundary::Both).unwrap();
    let lambda = smallest_eigenvalue(&prob, 1e-10).unwrap();
    assert_relative_eq!(lambda, std::f64::consts::PI.powi(2), epsilon = 1e-6);
}

#[test]
fn density_scaling_divides_lambda() {
    let r = FunctionSpec::exponential(1.0, 0.4);
    let m = FunctionSpec::exponential(1.0, -0.2);
    let prob = EigenProblem::from_specs(&r, &m, 1.0, Interval::unit(), Boundary::Both).unwrap();
    let l1 = smallest_eigenvalue(&prob, 1e-10).unwrap();
    let l3 = smallest_eigenvalue(&prob.scaled_density(3.0), 1e-10).unwrap();
    assert_relative_eq!(l1, 3.0 * l3, max_relative = 1e-8);
}

#[test]
fn shrinking_the_interval_raises_lambda() {
    let r = FunctionSpec::exponential(1.0, 0.4);
    let m = FunctionSpec::constant(1.0);
    let mut last = 0.0;
    for b in [2.0, 1.5, 1.0, 0.7] {
        let iv = Interval::new(0.0, b).unwrap();
        let prob = EigenProblem::from_specs(&r, &m, 1.0, iv, Boundary::Both).unwrap();
        let l = smallest_eigenvalue(&prob, 1e-9).unwrap();
        assert!(l > last, "λ({b}) = {l} not above {last}");
        last = l;
    }
}

#[test]
fn quasilinear_problem_has_a_positive_ground_state() {
    let r = FunctionSpec::exponential(1.0, 0.3);
    let m = FunctionSpec::constant(1.0);
    let iv = Interval::unit();
    let prob = EigenProblem::from_specs(&r, &m, 2.0, iv, Boundary::Both).unwrap();
    let l = smallest_eigenvalue(&prob, 1e-8).unwrap();
    assert!(l > 0.0);
    let u = eigenfunction(&prob, l, 1024).unwrap();
    assert!(u[1..u.len() - 1].iter().all(|&(_, v)| v > 0.0));
}

#[test]
fn singular_right_end_is_natural() {
    // -((1-x) u')' = λ u, u(0) = 0, bounded at 1: u = J0(2√(λ(1-x))) and
    // λ₀ = j₀₁²/4 with j₀₁ the first zero of J0.
    let r = FunctionSpec::shifted_power(1.0, 1.0);
    let m = FunctionSpec::constant(1.0);
    let prob = EigenProblem::from_specs(&r, &m, 1.0, Interval::unit(), Boundary::LeftZero).unwrap();
    let j01 = 2.404_825_557_695_773;
    let l = smallest_eigenvalue(&prob, 1e-9).unwrap();
    assert_relative_eq!(l, j01 * j01 / 4.0, max_relative = 1e-5);
}

#[test]
fn theorem_constant_cancels_density_scaling() {
    let r = FunctionSpec::constant(1.0);
    let s = FunctionSpec::power(1.0, 1.0);
    let s3 = FunctionSpec::power(3.0, 1.0);
    let iv = Interval::unit();
    let acc = Accuracy::default();
    let c1 = t2_13_constant(&r, &s, 1.0, &iv, &acc).unwrap();
    let c3 = t2_13_constant(&r, &s3, 1.0, &iv, &acc).unwrap();
    assert_relative_eq!(c3.value, 3.0 * c1.value, max_relative = 1e-8);
}
