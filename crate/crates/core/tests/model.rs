use mtem_core::experiments::{build_example, ExampleName};
use mtem_core::linalg::Matrix;
use mtem_core::model::poly::PolynomialCoefficients;
use mtem_core::model::{
    stability_margin, validate_problem, CoefficientSet, DelayFunction, InitialHistory, SddeProblem,
    Severity, StructuralConstants, DEFAULT_TIMES,
};
use mtem_core::{MtemError, TruncationPolicy};
use proptest::prelude::*;

fn example1() -> SddeProblem {
    build_example(ExampleName::Example1).unwrap().problem
}

fn constants(lambda1: f64, lambda2: f64) -> StructuralConstants {
    StructuralConstants {
        k: 0.0,
        lambda0: 1.0,
        lambda1,
        lambda2,
    }
}

#[test]
fn example1_passes_validation() {
    let report = validate_problem(&example1(), 100.0, 200);
    for f in &report.findings {
        assert!(f.passed, "{f:?}");
    }
    assert!(report.passed());
}

#[test]
fn example2_passes_validation() {
    let p = build_example(ExampleName::Example2).unwrap().problem;
    assert!(validate_problem(&p, 100.0, 200).passed());
}

#[test]
fn steep_delay_fails_slope_finding() {
    let base = example1();
    let delay = DelayFunction::new(|t| 2.0 * t, 0.0, 0.5, None).unwrap();
    let p = SddeProblem::new(
        base.coefficients().clone(),
        delay,
        InitialHistory::point(vec![1.0]).unwrap(),
    )
    .unwrap();
    let report = validate_problem(&p, 10.0, 50);
    let f = report.finding("delay slope exceeds eta").unwrap();
    assert!(!f.passed);
    assert!((f.worst - 1.5).abs() < 1e-6, "slope excess {}", f.worst);
    assert!(!report.passed());
}

#[test]
fn nonzero_origin_fails_trivial_solution() {
    let coeffs = CoefficientSet::new(
        1,
        1,
        |x, _y, _t| vec![1.0 - x[0]],
        |_x, _y, _t| Matrix::column(vec![0.0]),
        |_r, _t| 1.0,
        constants(1.0, 0.0),
    )
    .unwrap();
    let p = SddeProblem::new(
        coeffs,
        DelayFunction::constant(1.0).unwrap(),
        InitialHistory::constant(vec![0.0], 1.0).unwrap(),
    )
    .unwrap();
    let report = validate_problem(&p, 10.0, 10);
    let f = report.finding("trivial solution").unwrap();
    assert!(!f.passed);
    assert_eq!(f.worst, 1.0);
}

#[test]
fn non_finite_coefficients_are_findings() {
    let coeffs = CoefficientSet::new(
        1,
        1,
        |x, _y, _t| vec![if x[0] > 4.0 { f64::INFINITY } else { -x[0] }],
        |_x, _y, _t| Matrix::column(vec![0.0]),
        |_r, _t| 1.0,
        constants(1.0, 0.0),
    )
    .unwrap();
    let p = SddeProblem::new(
        coeffs,
        DelayFunction::constant(0.0).unwrap(),
        InitialHistory::point(vec![1.0]).unwrap(),
    )
    .unwrap();
    let report = validate_problem(&p, 1.0, 1);
    assert!(!report.finding("non-finite coefficient").unwrap().passed);
}

#[test]
fn mis_declared_constants_are_falsified() {
    // λ1 = 5 overstates the true dissipation of the example coefficients.
    let mut poly = PolynomialCoefficients::worked_example(1.0);
    poly.constants.lambda1 = 5.0;
    let p = example1()
        .with_history(InitialHistory::constant(vec![2.0], 1.0).unwrap())
        .unwrap();
    let p = SddeProblem::new(
        poly.to_coefficient_set().unwrap(),
        p.delay().clone(),
        p.history().clone(),
    )
    .unwrap();
    let report = validate_problem(&p, 10.0, 10);
    assert!(!report.finding("khasminskii bound").unwrap().passed);
}

#[test]
fn negative_margin_is_a_warning() {
    let mut poly = PolynomialCoefficients::worked_example(1.0);
    poly.constants.lambda1 = 1.0;
    let p = SddeProblem::new(
        poly.to_coefficient_set().unwrap(),
        DelayFunction::constant(1.0).unwrap(),
        InitialHistory::constant(vec![1.0], 1.0).unwrap(),
    )
    .unwrap();
    let report = validate_problem(&p, 10.0, 10);
    let f = report.finding("stability margin non-positive").unwrap();
    assert!(!f.passed);
    assert_eq!(f.severity, Severity::Warning);
}

#[test]
fn mismatched_history_is_rejected() {
    let p = example1();
    assert!(SddeProblem::new(
        p.coefficients().clone(),
        p.delay().clone(),
        InitialHistory::constant(vec![2.0], 0.5).unwrap()
    )
    .is_err());
}

#[test]
fn khasminskii_point_examples() {
    let p = example1();
    let r = p.check_khasminskii(&[(vec![1.0], vec![1.0], 0.0)]).unwrap();
    assert!(r.abs() < 1e-15, "residual {r}");

    // Origin with K > 0: residual is -K (1+t)^{-λ0} / (1+t).
    let mut poly = PolynomialCoefficients::worked_example(0.5);
    poly.constants.k = 3.0;
    let q = SddeProblem::new(
        poly.to_coefficient_set().unwrap(),
        p.delay().clone(),
        p.history().clone(),
    )
    .unwrap();
    let r = q.check_khasminskii(&[(vec![0.0], vec![0.0], 5.0)]).unwrap();
    assert!((r + 3.0 * 6f64.powf(-0.5) / 6.0).abs() < 1e-15);
}

#[test]
fn khasminskii_grid_is_nonpositive() {
    let p = example1();
    let axis: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
    let mut points = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for t in [0.0, 1.0, 10.0] {
                points.push((vec![x], vec![y], t));
            }
        }
    }
    let r = p.check_khasminskii(&points).unwrap();
    assert!(r <= 1e-12, "residual {r}");
}

#[test]
fn khasminskii_reports_overflow() {
    let coeffs = CoefficientSet::new(
        1,
        1,
        |_x, _y, _t| vec![f64::NAN],
        |_x, _y, _t| Matrix::column(vec![0.0]),
        |_r, _t| 1.0,
        constants(1.0, 0.0),
    )
    .unwrap();
    let p = SddeProblem::new(
        coeffs,
        DelayFunction::constant(0.0).unwrap(),
        InitialHistory::point(vec![0.0]).unwrap(),
    )
    .unwrap();
    assert!(matches!(
        p.check_khasminskii(&[(vec![1.0], vec![1.0], 0.0)]),
        Err(MtemError::CoefficientOverflow { .. })
    ));
    assert!(p.check_khasminskii(&[]).is_err());
}

#[test]
fn example1_margin() {
    assert_eq!(example1().stability_margin(), 0.5);
    assert_eq!(stability_margin(7.0 / 2.0, 1.0, 0.5), 0.5);
    assert_eq!(stability_margin(0.8, 0.0, 0.0), 0.8);
    assert_eq!(stability_margin(1.0, 1.0, 0.9), -10.0);
}

#[test]
fn margin_ignores_coefficient_scaling() {
    // Scaling drift and diffusion while keeping the declared λ's leaves the margin unchanged.
    let base = example1();
    let c = *base.coefficients().constants();
    let scaled = CoefficientSet::new(
        1,
        1,
        |x, y, t| vec![0.5 * (-2.0 * x[0] + 0.5 * y[0]) / (1.0 + t)],
        |_x, y, t| Matrix::column(vec![0.5 * y[0] / (1.0 + t).sqrt()]),
        |r, t| 5.0 * (r.powi(4) + 2.0) / (1.0 + t),
        c,
    )
    .unwrap();
    let p = SddeProblem::new(scaled, base.delay().clone(), base.history().clone()).unwrap();
    assert_eq!(p.stability_margin(), base.stability_margin());
}

#[test]
fn truncation_compatibility_example1() {
    let p = example1();
    let policy = TruncationPolicy::power(1.0 / 9.0).unwrap();
    let report = p
        .check_truncation_compatibility(&policy, &[10.0, 100.0, 1000.0], &DEFAULT_TIMES)
        .unwrap();
    // s(R) = 25 (R^4 + 2)^2 / R^9, attained at t = 0.
    let expected = [2.5010001, 0.2500000100000001, 0.0250000000001];
    for (got, want) in report.values.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }
    assert!(report.strictly_decreasing);

    let report = p
        .check_truncation_compatibility(&policy, &[10.0, 1e2, 1e3, 1e4], &DEFAULT_TIMES)
        .unwrap();
    assert!(report.strictly_decreasing);
    assert!(report.decreasing);
}

#[test]
fn truncation_compatibility_counterexample_and_constant_envelope() {
    let base = example1();
    let policy = TruncationPolicy::power(1.0 / 9.0).unwrap();
    let grid = [10.0, 100.0, 1000.0, 1e4];

    let steep = base.coefficients().clone();
    let steep = CoefficientSet::new(
        1,
        1,
        move |x, y, t| steep.drift(x, y, t),
        |x, y, t| Matrix::column(vec![0.0 * (x[0] + y[0] + t)]),
        |r, _t| r.powi(5),
        *base.coefficients().constants(),
    )
    .unwrap();
    let p = SddeProblem::new(steep, base.delay().clone(), base.history().clone()).unwrap();
    let r = p
        .check_truncation_compatibility(&policy, &grid, &[0.0])
        .unwrap();
    for (s, radius) in r.values.iter().zip(grid) {
        assert!((s - radius).abs() <= 1e-9 * radius);
    }
    assert!(!r.decreasing);

    let flat = CoefficientSet::new(
        1,
        1,
        |x, _y, _t| vec![-x[0]],
        |_x, _y, _t| Matrix::column(vec![0.0]),
        |_r, _t| 2.0,
        *base.coefficients().constants(),
    )
    .unwrap();
    let p = SddeProblem::new(flat, base.delay().clone(), base.history().clone()).unwrap();
    let r = p
        .check_truncation_compatibility(&policy, &grid, &[0.0])
        .unwrap();
    assert!(r.decreasing);
    assert!((r.values[0] - 4.0e-9).abs() < 1e-20);
}

#[test]
fn truncation_compatibility_needs_inverse() {
    let p = example1();
    let policy = TruncationPolicy::custom(|dt| dt.powf(-0.5), None, 1.0).unwrap();
    assert_eq!(
        p.check_truncation_compatibility(&policy, &[10.0], &[0.0]),
        Err(MtemError::PolicyInverseUnavailable)
    );
    let ok_policy = TruncationPolicy::power(0.5).unwrap();
    assert!(p
        .check_truncation_compatibility(&ok_policy, &[10.0, 5.0], &[0.0])
        .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Any point inside the validated box of a validated problem satisfies the growth bound.
    #[test]
    fn validated_box_satisfies_growth_bound(x in -5.0f64..5.0, y in -5.0f64..5.0, t in 0.0f64..100.0) {
        let p = example1();
        let r = p.check_khasminskii(&[(vec![x], vec![y], t)]).unwrap();
        prop_assert!(r <= 1e-9);
    }

    // Admissible saturating delays pass the delay findings.
    #[test]
    fn admissible_delays_validate(tau in 0.0f64..3.0, c in 0.0f64..0.95) {
        let eta = c;
        let delay = DelayFunction::new(move |t| tau + c * (1.0 - (-t).exp()), tau, eta, Some(tau + c)).unwrap();
        let p = SddeProblem::new(
            example1().coefficients().clone(),
            delay,
            InitialHistory::constant(vec![1.0], tau).unwrap(),
        ).unwrap();
        let report = validate_problem(&p, 20.0, 40);
        for name in ["delay at origin", "delay slope exceeds eta", "delay nonnegative", "delay bound"] {
            prop_assert!(report.finding(name).unwrap().passed, "{}", name);
        }
    }
}
