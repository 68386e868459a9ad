//! Sampled falsification of the declared problem structure.

use serde::Serialize;

use crate::linalg::{all_finite, norm};
use crate::model::SddeProblem;

/// Default state-axis sampling: 41 points over `[-5, 5]`.
pub const STATE_AXIS_POINTS: usize = 41;
pub const STATE_AXIS_HALF_WIDTH: f64 = 5.0;
/// Default time samples for coefficient checks.
pub const DEFAULT_TIMES: [f64; 7] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0];

const SLOPE_STEP: f64 = 1e-5;
const SLOPE_TOLERANCE: f64 = 1e-8;
const GROWTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub name: String,
    pub passed: bool,
    pub severity: Severity,
    /// Worst observed value of the checked quantity (its meaning is per finding).
    pub worst: f64,
    /// Where the worst value was observed.
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    /// True when no error-severity finding failed. Warnings do not count.
    pub fn passed(&self) -> bool {
        self.findings
            .iter()
            .all(|f| f.passed || f.severity == Severity::Warning)
    }

    pub fn finding(&self, name: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| !f.passed)
    }

    fn push(&mut self, name: &str, passed: bool, worst: f64, witness: String) {
        self.push_with(name, Severity::Error, passed, worst, witness);
    }

    fn push_with(
        &mut self,
        name: &str,
        severity: Severity,
        passed: bool,
        worst: f64,
        witness: String,
    ) {
        self.findings.push(Finding {
            name: name.to_string(),
            passed,
            severity,
            worst,
            witness,
        });
    }
}

/// Tracks the maximum of a sampled quantity and where it occurred.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: "none".into(),
        }
    }

    fn observe(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.at = at();
        }
    }
}

/// State samples: the full 41-point axis for scalar problems; for `n > 1`,
/// the axis scaled along each unit vector and along the normalized diagonal.
pub fn state_samples(n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..STATE_AXIS_POINTS)
        .map(|i| {
            -STATE_AXIS_HALF_WIDTH
                + 2.0 * STATE_AXIS_HALF_WIDTH * i as f64 / (STATE_AXIS_POINTS - 1) as f64
        })
        .collect();
    if n == 1 {
        return axis.iter().map(|&s| vec![s]).collect();
    }
    let mut out = Vec::with_capacity(axis.len() * (n + 1));
    let diag = 1.0 / (n as f64).sqrt();
    for &s in &axis {
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = s;
            out.push(v);
        }
        out.push(vec![s * diag; n]);
    }
    out
}

fn time_samples(t_max: f64, samples: usize) -> Vec<f64> {
    let mut times: Vec<f64> = (0..=samples)
        .map(|i| t_max * i as f64 / samples as f64)
        .collect();
    times.extend(DEFAULT_TIMES.iter().filter(|&&t| t <= t_max));
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// Runs every sampled invariant of the delay, coefficients and history.
/// Violations are findings, never errors.
pub fn validate_problem(problem: &SddeProblem, t_max: f64, samples: usize) -> ValidationReport {
    let samples = samples.max(1);
    let t_max = if t_max > 0.0 { t_max } else { 1.0 };
    let times = time_samples(t_max, samples);
    let mut report = ValidationReport::default();

    check_delay(problem, &times, &mut report);
    check_coefficients(problem, &mut report);
    check_history(problem, samples, &mut report);

    let margin = problem.stability_margin();
    report.push_with(
        "stability margin non-positive",
        Severity::Warning,
        margin > 0.0,
        margin,
        format!("lambda1 - lambda2 * M with eta = {}", problem.delay().eta()),
    );
    report
}

fn check_delay(problem: &SddeProblem, times: &[f64], report: &mut ValidationReport) {
    let delay = problem.delay();
    let origin_gap = (delay.eval(0.0) - delay.tau()).abs();
    report.push(
        "delay at origin",
        origin_gap <= 1e-12,
        origin_gap,
        format!("delta(0) = {}, tau = {}", delay.eval(0.0), delay.tau()),
    );

    let mut slope = Worst::new();
    let mut negative = Worst::new();
    let mut above_bound = Worst::new();
    for &t in times {
        let v = delay.eval(t);
        let s = (delay.eval(t + SLOPE_STEP) - v) / SLOPE_STEP;
        slope.observe(s - delay.eta(), || format!("t = {t}, slope = {s}"));
        negative.observe(-v, || format!("t = {t}, delta = {v}"));
        if let Some(b) = delay.bound() {
            above_bound.observe(v - b, || format!("t = {t}, delta = {v}, bound = {b}"));
        }
    }
    report.push(
        "delay slope exceeds eta",
        slope.value <= SLOPE_TOLERANCE,
        slope.value,
        slope.at,
    );
    report.push(
        "delay nonnegative",
        negative.value <= 0.0,
        negative.value,
        negative.at,
    );
    if delay.is_bounded() {
        report.push(
            "delay bound",
            above_bound.value <= 1e-12,
            above_bound.value,
            above_bound.at,
        );
    }
}

fn check_coefficients(problem: &SddeProblem, report: &mut ValidationReport) {
    let coeffs = problem.coefficients();
    let n = coeffs.dim();
    let zero = vec![0.0; n];

    let mut trivial = Worst::new();
    for &t in &DEFAULT_TIMES {
        let f = norm(&coeffs.drift(&zero, &zero, t));
        let g = coeffs.diffusion(&zero, &zero, t).frobenius();
        let v = f.max(g);
        trivial.observe(if v.is_nan() { f64::INFINITY } else { v }, || {
            format!("t = {t}, |f(0,0,t)| = {f}, |g(0,0,t)| = {g}")
        });
    }
    report.push(
        "trivial solution",
        trivial.value == 0.0,
        trivial.value,
        trivial.at,
    );

    let states = state_samples(n);
    let constants = *coeffs.constants();
    let mut non_finite: Option<String> = None;
    let mut growth = Worst::new();
    for &t in &DEFAULT_TIMES {
        for x in &states {
            for y in &states {
                let f = coeffs.drift(x, y, t);
                let g = coeffs.diffusion(x, y, t);
                if f.len() != n || g.rows() != n || g.cols() != coeffs.noise_dim() {
                    non_finite.get_or_insert_with(|| {
                        format!("shape mismatch at x = {x:?}, y = {y:?}, t = {t}")
                    });
                    continue;
                }
                if !all_finite(&f) || !g.is_finite() {
                    non_finite.get_or_insert_with(|| format!("x = {x:?}, y = {y:?}, t = {t}"));
                    continue;
                }
                let gf = g.frobenius();
                let lhs = 2.0 * crate::linalg::dot(x, &f) + gf * gf;
                let r = lhs - constants.growth_bound(x, y, t);
                growth.observe(r, || format!("x = {x:?}, y = {y:?}, t = {t}"));
            }
        }
    }
    report.push(
        "non-finite coefficient",
        non_finite.is_none(),
        if non_finite.is_some() {
            f64::INFINITY
        } else {
            0.0
        },
        non_finite.unwrap_or_else(|| "none".into()),
    );
    report.push(
        "khasminskii bound",
        growth.value <= GROWTH_TOLERANCE,
        growth.value,
        growth.at,
    );

    let mut drop = Worst::new();
    let radii: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    for &t in &DEFAULT_TIMES {
        for w in radii.windows(2) {
            let (l0, l1) = (coeffs.lipschitz(w[0], t), coeffs.lipschitz(w[1], t));
            drop.observe(l0 - l1, || format!("R = {} -> {}, t = {t}", w[0], w[1]));
        }
    }
    report.push(
        "lipschitz envelope nondecreasing",
        drop.value <= 0.0,
        drop.value,
        drop.at,
    );
}

fn check_history(problem: &SddeProblem, samples: usize, report: &mut ValidationReport) {
    let history = problem.history();
    let mut bad: Option<String> = None;
    let mut sup = 0.0f64;
    for theta in history.sample_points(samples) {
        let v = history.eval(theta);
        if v.len() != history.dim() || !all_finite(&v) {
            bad.get_or_insert_with(|| format!("theta = {theta}, xi = {v:?}"));
        } else {
            sup = sup.max(norm(&v));
        }
    }
    report.push(
        "history finite",
        bad.is_none(),
        sup,
        bad.unwrap_or_else(|| format!("sup norm = {sup}")),
    );
}
