use mtem_core::experiments::{
    build_example, median, run_reproduction, run_reproduction_with, write_plot_data, ExampleName,
    ExpectedCheck, DEFAULT_SEEDS,
};
use mtem_core::model::DEFAULT_TIMES;
use mtem_core::{validate_problem, MtemError, Regime};

#[test]
fn names_parse() {
    assert_eq!(
        "example1".parse::<ExampleName>().unwrap(),
        ExampleName::Example1
    );
    assert_eq!(ExampleName::Example2.to_string(), "example2");
    assert_eq!(
        "example3".parse::<ExampleName>(),
        Err(MtemError::UnknownExample("example3".into()))
    );
}

#[test]
fn example_configurations() {
    let e1 = build_example(ExampleName::Example1).unwrap();
    assert_eq!(e1.regime, Regime::Bounded);
    assert_eq!((e1.grid.dt, e1.grid.m, e1.grid.n_steps), (0.1, 10, 5000));
    assert_eq!(e1.problem.stability_margin(), 0.5);
    assert_eq!(e1.default_epsilon().unwrap(), 0.0625);
    assert_eq!(e1.problem.delay().eval(0.0), 1.0);

    let e2 = build_example(ExampleName::Example2).unwrap();
    assert_eq!(e2.regime, Regime::Unbounded);
    assert_eq!((e2.grid.dt, e2.grid.m, e2.grid.n_steps), (0.05, 0, 1000));
    assert!(!e2.problem.delay().is_bounded());
    assert_eq!(e2.problem.history().eval(0.0), vec![3.0]);
}

#[test]
fn certificates() {
    let e1 = build_example(ExampleName::Example1).unwrap();
    let c = e1.rate_certificate(0.0625).unwrap();
    assert!((c.c_tilde0 - 0.07647565193886884).abs() < 1e-10);
    let x = e1.exact_certificate().unwrap();
    assert_eq!(x.gamma_star, 1.0);
    assert!((x.gamma0.unwrap() - 1.201003972920787).abs() < 1e-10);

    let e2 = build_example(ExampleName::Example2).unwrap();
    for eps in [0.01, 0.05, 0.1] {
        assert_eq!(e2.rate_certificate(eps).unwrap().c_tilde0, 0.5 - 4.0 * eps);
    }
    assert_eq!(e2.exact_certificate().unwrap().gamma_star, 1.0);
}

#[test]
fn examples_validate_and_are_compatible() {
    for name in [ExampleName::Example1, ExampleName::Example2] {
        let e = build_example(name).unwrap();
        assert!(validate_problem(&e.problem, 100.0, 200).passed());
        let r = e
            .problem
            .check_truncation_compatibility(&e.policy, &[10.0, 1e2, 1e3, 1e4], &DEFAULT_TIMES)
            .unwrap();
        assert!(r.decreasing);
    }
}

#[test]
fn median_values() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    assert!(median(&[]).is_nan());
}

#[test]
fn example1_reproduction() {
    let e1 = build_example(ExampleName::Example1).unwrap();
    let report = run_reproduction(&e1, 2024, DEFAULT_SEEDS).unwrap();
    assert_eq!(report.per_seed.len(), 10);
    assert_eq!(report.verdicts.len(), 3);
    assert!(report.passed(), "{}", report.summary());
    assert!(report.median_final_as() <= -1.0);
    assert_eq!(report.statistics.len(), 10);
    assert_eq!(report.rate_certificate.epsilon, 0.0625);
}

#[test]
fn example2_reproduction() {
    let e2 = build_example(ExampleName::Example2).unwrap();
    let report = run_reproduction_with(&e2, 7, DEFAULT_SEEDS, Some(0.1)).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert_eq!(report.rate_certificate.c_tilde0, 0.5 - 0.4);
    assert!(run_reproduction_with(&e2, 7, 3, Some(0.2)).is_err());
    assert!(run_reproduction(&e2, 7, 0).is_err());
}

#[test]
fn reproduction_is_deterministic() {
    let e2 = build_example(ExampleName::Example2).unwrap();
    let mut a = run_reproduction(&e2, 99, 4).unwrap().to_json();
    let mut b = run_reproduction(&e2, 99, 4).unwrap().to_json();
    a["runtime_seconds"] = 0.into();
    b["runtime_seconds"] = 0.into();
    assert_eq!(a, b);
    assert_eq!(a["experiment"], "example2");
    assert!(a["passed"].is_boolean());
}

#[test]
fn failing_check_is_reported() {
    let mut e2 = build_example(ExampleName::Example2).unwrap();
    e2.expected = vec![ExpectedCheck::MedianFinalAsAtMost { threshold: -100.0 }];
    let report = run_reproduction(&e2, 1, 3).unwrap();
    assert!(!report.passed());
    assert!(report.summary().contains("[FAIL]"));
}

#[test]
fn plot_data_layout() {
    let e2 = build_example(ExampleName::Example2).unwrap();
    let report = run_reproduction(&e2, 1, 1).unwrap();
    let mut out = Vec::new();
    write_plot_data(&report.statistics[0], &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,t,as_statistic,exp_statistic");
    assert_eq!(lines.len(), 1001);
    assert!(lines[1].starts_with("1,0.05,"));
}
