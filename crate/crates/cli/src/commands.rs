use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mtem_core::experiments::{build_example, run_reproduction_with, NamedExperiment};
use mtem_core::integrator::{ensemble_to_json, format_float, write_ensemble_csv};
use mtem_core::model::{stability_margin, DEFAULT_TIMES};
use mtem_core::stability::gamma_star_unbounded;
use mtem_core::{
    c_tilde_unbounded, counting_check, decay_statistics, mean_square_statistic, simulate_ensemble,
    solve_c_tilde_bounded, solve_gamma0_exact, validate_problem, DecayStatistics, MtemError,
    PathRecord, Regime,
};
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::error::CliError;

const COMPATIBILITY_RADII: [f64; 4] = [10.0, 1e2, 1e3, 1e4];
const VALIDATION_HORIZON: f64 = 100.0;
const VALIDATION_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Certify,
    Reproduce,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Certify => "certify",
            Command::Reproduce => "reproduce",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

/// Exit status as a function of the verdicts.
pub fn exit_status(passed: bool) -> u8 {
    if passed {
        0
    } else {
        1
    }
}

pub fn run(command: Command, r: &Resolved) -> Result<Outcome, CliError> {
    fs::create_dir_all(&r.out_dir).map_err(|e| CliError::io(r.out_dir.display(), e))?;
    let mut out = match command {
        Command::Simulate => simulate(r)?,
        Command::Certify => certify(r)?,
        Command::Reproduce => reproduce(r)?,
        Command::Check => check(r)?,
    };
    let metadata = json!({
        "schema": crate::config::SCHEMA,
        "tool": { "name": "mtem", "version": env!("CARGO_PKG_VERSION") },
        "command": command.name(),
        "config": r.config,
        "master_seed": r.seed,
        "warnings": warnings(r),
        "passed": out.passed,
    });
    let path = write_json(&r.out_dir, "metadata.json", &metadata)?;
    out.artifacts.push(path);
    Ok(out)
}

/// Failed validation findings, echoed into the metadata of every run.
fn warnings(r: &Resolved) -> Vec<Value> {
    validate_problem(&r.problem, VALIDATION_HORIZON, VALIDATION_SAMPLES)
        .failures()
        .map(|f| json!({ "name": f.name, "severity": f.severity, "worst": f.worst }))
        .collect()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(path.display(), e))?;
    Ok((path, BufWriter::new(file)))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path.display(), e))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    write_file(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

/// Creates `dir/name` and fills it with `body`.
fn write_file<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    body(&mut w).map_err(|e| CliError::io(path.display(), e))?;
    finish(&path, w)?;
    Ok(path)
}

fn write_statistics_csv(
    dir: &Path,
    name: &str,
    paths: &[PathRecord],
    stats: &[DecayStatistics],
) -> Result<PathBuf, CliError> {
    write_file(dir, name, |w| {
        writeln!(w, "path_index,k,t,as_statistic,exp_statistic")?;
        for (p, s) in paths.iter().zip(stats) {
            for (k, t, a, e) in s.rows() {
                writeln!(
                    w,
                    "{},{k},{},{},{}",
                    p.path_index,
                    format_float(t),
                    format_float(a),
                    format_float(e)
                )?;
            }
        }
        Ok(())
    })
}

fn final_statistics(paths: &[PathRecord], stats: &[DecayStatistics]) -> Vec<Value> {
    paths
        .iter()
        .zip(stats)
        .map(|(p, s)| {
            json!({
                "path_index": p.path_index,
                "final_as": s.final_as(),
                "final_exp": s.final_exp(),
                "tail_limsup": s.tail_limsup(),
            })
        })
        .collect()
}

fn simulate(r: &Resolved) -> Result<Outcome, CliError> {
    let paths = simulate_ensemble(&r.problem, &r.policy, &r.grid, r.seed, r.n_paths)?;
    let stats = if r.grid.n_steps >= 2 {
        paths
            .iter()
            .map(decay_statistics)
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let curves = r
        .c_values
        .iter()
        .map(|&c| mean_square_statistic(&paths, c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut artifacts = Vec::new();
    if r.format.csv() {
        let (path, mut w) = create(&r.out_dir, "paths.csv")?;
        write_ensemble_csv(&paths, &mut w)?;
        finish(&path, w)?;
        artifacts.push(path);
        if !stats.is_empty() {
            artifacts.push(write_statistics_csv(
                &r.out_dir,
                "statistics.csv",
                &paths,
                &stats,
            )?);
        }
        if !curves.is_empty() {
            let header: Vec<String> = r
                .c_values
                .iter()
                .map(|c| format!("C={}", format_float(*c)))
                .collect();
            artifacts.push(write_file(&r.out_dir, "mean_square.csv", |w| {
                writeln!(w, "k,t,{}", header.join(","))?;
                for k in 0..=r.grid.n_steps {
                    let row: Vec<String> = curves.iter().map(|c| format_float(c[k])).collect();
                    writeln!(
                        w,
                        "{k},{},{}",
                        format_float(r.grid.time(k as i64)),
                        row.join(",")
                    )?;
                }
                Ok(())
            })?);
        }
    }
    if r.format.json() {
        let mean_square: Vec<Value> = r
            .c_values
            .iter()
            .zip(&curves)
            .map(|(c, v)| json!({ "c": c, "values": v }))
            .collect();
        let doc = json!({
            "config": r.config,
            "master_seed": r.seed,
            "truncation_level": paths[0].truncation_level,
            "final_statistics": final_statistics(&paths, &stats),
            "mean_square": mean_square,
            "paths": ensemble_to_json(&paths),
        });
        artifacts.push(write_json(&r.out_dir, "simulation.json", &doc)?);
    }

    let mut summary = format!(
        "simulated {} path(s) x {} steps (dt = {}, h(dt) = {:.6}, seed {})\n",
        r.n_paths, r.grid.n_steps, r.grid.dt, paths[0].truncation_level, r.seed
    );
    if let Some(first) = stats.first() {
        summary.push_str(&format!(
            "path 0 final log|X|/log(1+t) = {:.5}\n",
            first.final_as()
        ));
    }
    Ok(Outcome {
        passed: true,
        artifacts,
        summary,
    })
}

fn certify(r: &Resolved) -> Result<Outcome, CliError> {
    let c = r.problem.coefficients().constants();
    let eta = r.problem.delay().eta();
    let epsilon = r.epsilon.ok_or(MtemError::MarginNonPositive {
        margin: stability_margin(c.lambda1, c.lambda2, eta),
    })?;
    let (rate, exact) = match r.regime {
        Regime::Bounded => (
            solve_c_tilde_bounded(
                c.lambda1,
                c.lambda2,
                eta,
                r.problem.tau(),
                epsilon,
                c.lambda0,
            )?,
            solve_gamma0_exact(c.lambda1, c.lambda2, eta, r.problem.tau(), c.lambda0)?,
        ),
        Regime::Unbounded => (
            c_tilde_unbounded(c.lambda1, c.lambda2, eta, epsilon, c.lambda0)?,
            gamma_star_unbounded(c.lambda1, c.lambda2, eta, c.lambda0)?,
        ),
    };
    let doc = json!({
        "config": r.config,
        "rate_certificate": rate,
        "exact_certificate": exact,
    });
    let path = write_json(&r.out_dir, "certificate.json", &doc)?;
    let summary = format!(
        "{:?} delay, eps = {} in ({}, {}): C0 = {:.12}, C = {:.12}, residual = {:.3e}; gamma* = {:.12}\n",
        rate.regime,
        rate.epsilon,
        rate.window[0],
        rate.window[1],
        rate.c_tilde0,
        rate.c_tilde,
        rate.residual,
        exact.gamma_star
    );
    Ok(Outcome {
        passed: true,
        artifacts: vec![path],
        summary,
    })
}

fn reproduce(r: &Resolved) -> Result<Outcome, CliError> {
    let name = r.config.example.ok_or_else(|| {
        CliError::Usage("reproduce needs a named example (example1 or example2)".into())
    })?;
    let experiment = NamedExperiment {
        grid: r.grid,
        ..build_example(name)?
    };
    let report = run_reproduction_with(&experiment, r.seed, r.n_paths, r.epsilon)?;

    let mut artifacts = Vec::new();
    if r.format.json() {
        let mut doc = report.to_json();
        doc["config"] = serde_json::to_value(&r.config).expect("config serializes");
        artifacts.push(write_json(&r.out_dir, "report.json", &doc)?);
    }
    if r.format.csv() {
        artifacts.push(write_file(&r.out_dir, "seeds.csv", |w| {
            writeln!(w, "path_index,final_as,final_exp,tail_limsup")?;
            for s in &report.per_seed {
                writeln!(
                    w,
                    "{},{},{},{}",
                    s.path_index,
                    format_float(s.final_as),
                    format_float(s.final_exp),
                    format_float(s.tail_limsup)
                )?;
            }
            Ok(())
        })?);
        artifacts.push(write_file(&r.out_dir, "plot_data.csv", |w| {
            writeln!(w, "path_index,k,t,as_statistic,exp_statistic")?;
            for (s, stats) in report.per_seed.iter().zip(&report.statistics) {
                for (k, t, a, e) in stats.rows() {
                    writeln!(
                        w,
                        "{},{k},{},{},{}",
                        s.path_index,
                        format_float(t),
                        format_float(a),
                        format_float(e)
                    )?;
                }
            }
            Ok(())
        })?);
    }
    Ok(Outcome {
        passed: report.passed(),
        artifacts,
        summary: report.summary(),
    })
}

fn check(r: &Resolved) -> Result<Outcome, CliError> {
    let validation = validate_problem(&r.problem, VALIDATION_HORIZON, VALIDATION_SAMPLES);
    let counting = counting_check(r.problem.delay(), &r.grid, r.grid.n_steps)?;
    let compatibility = r.problem.check_truncation_compatibility(
        &r.policy,
        &COMPATIBILITY_RADII,
        &DEFAULT_TIMES,
    )?;
    let verdicts = [
        ("validation", validation.passed()),
        ("delayed-index counting bound", counting.holds),
        ("truncation compatibility", compatibility.decreasing),
    ];
    let passed = verdicts.iter().all(|v| v.1);
    let doc = json!({
        "config": r.config,
        "validation": validation,
        "counting": counting,
        "compatibility": compatibility,
        "verdicts": verdicts
            .iter()
            .map(|(name, ok)| json!({ "name": name, "passed": ok }))
            .collect::<Vec<_>>(),
        "passed": passed,
    });
    let path = write_json(&r.out_dir, "check.json", &doc)?;

    let mut summary = String::new();
    for f in &validation.findings {
        summary.push_str(&format!(
            "  [{}] {} ({:?}, worst {:.3e})\n",
            if f.passed { "ok" } else { "!!" },
            f.name,
            f.severity,
            f.worst
        ));
    }
    for (name, ok) in verdicts {
        summary.push_str(&format!("[{}] {name}\n", if ok { "PASS" } else { "FAIL" }));
    }
    Ok(Outcome {
        passed,
        artifacts: vec![path],
        summary,
    })
}
