//! The two worked examples as parameter-locked experiments, plus a runner
//! that simulates several seeds and grades the observed decay statistics.
//!
//! Both examples share the scalar coefficients
//! `f = (-2x + y/2 - x^3 - x y^4)/(1+t)`,
//! `g = sqrt((2 x^2 y^4 + y^2/2 + 2 x^4)/(1+t))` with `λ1 = 7/2`, `λ2 = 1`,
//! `K = 0` and truncation `h(Δ) = Δ^{-1/9}`.
//!
//! * `example1`: `δ(t) = τ + 1/2 - e^{-t}/2`, `τ = 1`, `ξ ≡ 2`, `Δ = 0.1`, 5000 steps.
//! * `example2`: pantograph `δ(t) = t - q t`, `q = 1/2`, `x(0) = 3`, `Δ = 0.05`, 1000 steps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{MtemError, Result};
use crate::integrator::{format_float, simulate_ensemble, SimulationGrid};
use crate::model::poly::PolynomialCoefficients;
use crate::model::{DelayFunction, InitialHistory, SddeProblem};
use crate::stability::{
    c_tilde_unbounded, decay_statistics, gamma_star_unbounded, solve_c_tilde_bounded,
    solve_gamma0_exact, window_midpoint, DecayStatistics, ExactRateCertificate, RateCertificate,
    Regime,
};
use crate::truncation::TruncationPolicy;

/// `K = 0` leaves `λ0` free; any positive value is admissible.
pub const EXAMPLE_LAMBDA0: f64 = 1.0;
pub const TRUNCATION_EXPONENT: f64 = 1.0 / 9.0;
pub const DEFAULT_SEEDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    Example1,
    Example2,
}

impl ExampleName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleName::Example1 => "example1",
            ExampleName::Example2 => "example2",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = MtemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ExampleName::Example1),
            "example2" => Ok(ExampleName::Example2),
            other => Err(MtemError::UnknownExample(other.to_string())),
        }
    }
}

/// A graded observation on the final-step statistics of all seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedCheck {
    /// Median over seeds of `log|X_N| / log(1 + NΔ)` is at most `threshold`.
    MedianFinalAsAtMost { threshold: f64 },
    /// At least `min_fraction` of the seeds have a final statistic `<= threshold`.
    FractionFinalAsAtMost { threshold: f64, min_fraction: f64 },
    /// Every seed has `|log|X_N|| / (NΔ) <= threshold`.
    AllFinalExpAbsAtMost { threshold: f64 },
}

impl ExpectedCheck {
    pub fn name(&self) -> String {
        match self {
            ExpectedCheck::MedianFinalAsAtMost { threshold } => {
                format!("median final as_statistic <= {threshold}")
            }
            ExpectedCheck::FractionFinalAsAtMost {
                threshold,
                min_fraction,
            } => format!(
                "fraction of seeds with final as_statistic <= {threshold} >= {min_fraction}"
            ),
            ExpectedCheck::AllFinalExpAbsAtMost { threshold } => {
                format!("all seeds |final exp_statistic| <= {threshold}")
            }
        }
    }

    fn grade(&self, seeds: &[SeedStatistics]) -> Verdict {
        let finals: Vec<f64> = seeds.iter().map(|s| s.final_as).collect();
        let (measured, passed) = match *self {
            ExpectedCheck::MedianFinalAsAtMost { threshold } => {
                let m = median(&finals);
                (m, m <= threshold)
            }
            ExpectedCheck::FractionFinalAsAtMost {
                threshold,
                min_fraction,
            } => {
                let hits = finals.iter().filter(|&&v| v <= threshold).count();
                let frac = hits as f64 / finals.len() as f64;
                (frac, frac >= min_fraction)
            }
            ExpectedCheck::AllFinalExpAbsAtMost { threshold } => {
                let worst = seeds.iter().map(|s| s.final_exp.abs()).fold(0.0, f64::max);
                (worst, worst <= threshold)
            }
        };
        Verdict {
            name: self.name(),
            check: self.clone(),
            measured,
            passed,
        }
    }
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone)]
pub struct NamedExperiment {
    pub name: ExampleName,
    pub problem: SddeProblem,
    pub policy: TruncationPolicy,
    pub grid: SimulationGrid,
    pub regime: Regime,
    pub expected: Vec<ExpectedCheck>,
}

impl NamedExperiment {
    /// Midpoint of the admissible `ε` window for this experiment's regime.
    pub fn default_epsilon(&self) -> Result<f64> {
        let c = self.problem.coefficients().constants();
        window_midpoint(
            c.lambda1,
            c.lambda2,
            self.problem.delay().eta(),
            self.regime,
        )
    }

    /// Discrete-scheme rate certificate at `epsilon`.
    pub fn rate_certificate(&self, epsilon: f64) -> Result<RateCertificate> {
        let c = self.problem.coefficients().constants();
        let eta = self.problem.delay().eta();
        match self.regime {
            Regime::Bounded => solve_c_tilde_bounded(
                c.lambda1,
                c.lambda2,
                eta,
                self.problem.tau(),
                epsilon,
                c.lambda0,
            ),
            Regime::Unbounded => c_tilde_unbounded(c.lambda1, c.lambda2, eta, epsilon, c.lambda0),
        }
    }

    /// Exact-solution rate certificate.
    pub fn exact_certificate(&self) -> Result<ExactRateCertificate> {
        let c = self.problem.coefficients().constants();
        let eta = self.problem.delay().eta();
        match self.regime {
            Regime::Bounded => {
                solve_gamma0_exact(c.lambda1, c.lambda2, eta, self.problem.tau(), c.lambda0)
            }
            Regime::Unbounded => gamma_star_unbounded(c.lambda1, c.lambda2, eta, c.lambda0),
        }
    }
}

pub fn build_example(name: ExampleName) -> Result<NamedExperiment> {
    let coefficients =
        PolynomialCoefficients::worked_example(EXAMPLE_LAMBDA0).to_coefficient_set()?;
    let policy = TruncationPolicy::power(TRUNCATION_EXPONENT)?;
    match name {
        ExampleName::Example1 => {
            let tau = 1.0;
            let problem = SddeProblem::new(
                coefficients,
                DelayFunction::saturating(tau, 0.5)?,
                InitialHistory::constant(vec![2.0], tau)?,
            )?;
            Ok(NamedExperiment {
                name,
                problem,
                policy,
                grid: SimulationGrid::new(0.1, tau, 5000)?,
                regime: Regime::Bounded,
                expected: vec![
                    ExpectedCheck::MedianFinalAsAtMost { threshold: -1.0 },
                    ExpectedCheck::FractionFinalAsAtMost {
                        threshold: -0.5,
                        min_fraction: 0.8,
                    },
                    ExpectedCheck::AllFinalExpAbsAtMost { threshold: 0.05 },
                ],
            })
        }
        ExampleName::Example2 => {
            let problem = SddeProblem::new(
                coefficients,
                DelayFunction::pantograph(0.5)?,
                InitialHistory::point(vec![3.0])?,
            )?;
            Ok(NamedExperiment {
                name,
                problem,
                policy,
                grid: SimulationGrid::new(0.05, 0.0, 1000)?,
                regime: Regime::Unbounded,
                expected: vec![ExpectedCheck::MedianFinalAsAtMost { threshold: -1.0 }],
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedStatistics {
    pub path_index: u64,
    pub final_as: f64,
    pub final_exp: f64,
    pub tail_limsup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub check: ExpectedCheck,
    pub measured: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub experiment: ExampleName,
    pub master_seed: u64,
    pub n_seeds: usize,
    pub grid: SimulationGrid,
    pub truncation_level: f64,
    pub per_seed: Vec<SeedStatistics>,
    pub verdicts: Vec<Verdict>,
    pub rate_certificate: RateCertificate,
    pub exact_certificate: ExactRateCertificate,
    pub runtime_seconds: f64,
    #[serde(skip)]
    pub statistics: Vec<DecayStatistics>,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn median_final_as(&self) -> f64 {
        median(&self.per_seed.iter().map(|s| s.final_as).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["passed"] = serde_json::Value::Bool(self.passed());
        v
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} seed(s) from master seed {}, dt = {}, {} steps, h(dt) = {:.6}\n",
            self.experiment,
            self.n_seeds,
            self.master_seed,
            self.grid.dt,
            self.grid.n_steps,
            self.truncation_level
        );
        for seed in &self.per_seed {
            s.push_str(&format!(
                "  path {:>3}: log|X|/log(1+t) = {:>9.5}  log|X|/t = {:>9.5}\n",
                seed.path_index, seed.final_as, seed.final_exp
            ));
        }
        s.push_str(&format!(
            "  rate certificate ({:?}): eps = {}, C0 = {:.10}, C = {:.10}, residual = {:.3e}\n",
            self.rate_certificate.regime,
            self.rate_certificate.epsilon,
            self.rate_certificate.c_tilde0,
            self.rate_certificate.c_tilde,
            self.rate_certificate.residual
        ));
        s.push_str(&format!(
            "  exact-solution rate: gamma* = {:.10}\n",
            self.exact_certificate.gamma_star
        ));
        for v in &self.verdicts {
            s.push_str(&format!(
                "  [{}] {} (measured {:.6})\n",
                if v.passed { "PASS" } else { "FAIL" },
                v.name,
                v.measured
            ));
        }
        s.push_str(&format!(
            "  verdict: {} ({:.3} s)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.runtime_seconds
        ));
        s
    }
}

/// Simulates `n_seeds` paths (path indices `0..n_seeds`) and grades the
/// experiment's expected checks. `epsilon` defaults to the window midpoint.
pub fn run_reproduction(
    experiment: &NamedExperiment,
    master_seed: u64,
    n_seeds: usize,
) -> Result<ReproductionReport> {
    run_reproduction_with(experiment, master_seed, n_seeds, None)
}

pub fn run_reproduction_with(
    experiment: &NamedExperiment,
    master_seed: u64,
    n_seeds: usize,
    epsilon: Option<f64>,
) -> Result<ReproductionReport> {
    if n_seeds == 0 {
        return Err(MtemError::InvalidArgument("n_seeds must be >= 1".into()));
    }
    let start = Instant::now();
    let epsilon = match epsilon {
        Some(e) => e,
        None => experiment.default_epsilon()?,
    };
    let rate_certificate = experiment.rate_certificate(epsilon)?;
    let exact_certificate = experiment.exact_certificate()?;

    let paths = simulate_ensemble(
        &experiment.problem,
        &experiment.policy,
        &experiment.grid,
        master_seed,
        n_seeds,
    )?;
    let truncation_level = paths[0].truncation_level;
    let statistics = paths
        .iter()
        .map(decay_statistics)
        .collect::<Result<Vec<_>>>()?;
    let per_seed: Vec<SeedStatistics> = paths
        .iter()
        .zip(&statistics)
        .map(|(p, s)| SeedStatistics {
            path_index: p.path_index,
            final_as: s.final_as(),
            final_exp: s.final_exp(),
            tail_limsup: s.tail_limsup(),
        })
        .collect();
    let verdicts = experiment
        .expected
        .iter()
        .map(|c| c.grade(&per_seed))
        .collect();

    Ok(ReproductionReport {
        experiment: experiment.name,
        master_seed,
        n_seeds,
        grid: experiment.grid,
        truncation_level,
        per_seed,
        verdicts,
        rate_certificate,
        exact_certificate,
        runtime_seconds: start.elapsed().as_secs_f64(),
        statistics,
    })
}

/// Plot data: `k,t,as_statistic,exp_statistic`, one line per step.
pub fn write_plot_data<W: Write>(stats: &DecayStatistics, mut writer: W) -> Result<()> {
    writeln!(writer, "k,t,as_statistic,exp_statistic")?;
    for (k, t, a, e) in stats.rows() {
        writeln!(
            writer,
            "{k},{},{},{}",
            format_float(t),
            format_float(a),
            format_float(e)
        )?;
    }
    Ok(())
}
