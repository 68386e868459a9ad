use mtem_cli::config::{EpsilonKeyword, EpsilonSpec, OutputFormat};
use mtem_cli::{parse_config, CliError, Overrides, RunConfig};
use mtem_core::experiments::ExampleName;
use mtem_core::MtemError;

const INLINE: &str = r#"{
  "schema": "mtem/1",
  "inline": {
    "coefficients": {
      "drift": [{"c": -2, "x": 1}, {"c": 0.5, "y": 1}, {"c": -1, "x": 3}, {"c": -1, "x": 1, "y": 4}],
      "diffusion_sq": [{"c": 2, "x": 2, "y": 4}, {"c": 0.5, "y": 2}, {"c": 2, "x": 4}],
      "lipschitz": [{"c": 5, "p": 4}, {"c": 10, "p": 0}],
      "K": 0, "lambda0": 1, "lambda1": 1, "lambda2": 1
    },
    "delay": {"kind": "saturating", "tau": 1, "c": 0.5},
    "history": [2.0]
  },
  "grid": {"dt": 0.1, "steps": 50},
  "analysis": {"epsilon": 0.01, "c_values": [0.1]}
}"#;

#[test]
fn named_passthrough() {
    let c = parse_config(r#"{"example":"example1","seeds":10,"out":"run1"}"#).unwrap();
    assert_eq!(c.example, Some(ExampleName::Example1));
    assert_eq!(c.schema, "mtem/1");
    let r = c.resolve().unwrap();
    assert_eq!((r.grid.dt, r.grid.m, r.grid.n_steps), (0.1, 10, 5000));
    assert_eq!(r.n_paths, 10);
    assert_eq!(r.epsilon, Some(0.0625));
    assert_eq!(r.out_dir.to_str(), Some("run1"));
    assert_eq!(r.format, OutputFormat::Both);
}

#[test]
fn inadmissible_step_suggests_alternatives() {
    let c = parse_config(r#"{"example":"example1","grid":{"dt":0.3}}"#).unwrap();
    match c.resolve() {
        Err(CliError::Core(MtemError::GridNotAdmissible { suggestions, .. })) => {
            assert_eq!(suggestions, vec![0.25, 0.2, 0.125, 0.1]);
        }
        other => panic!("unexpected {:?}", other.map(|r| r.config)),
    }
}

#[test]
fn negative_margin_still_resolves() {
    let r = parse_config(INLINE).unwrap().resolve().unwrap();
    assert_eq!(r.problem.stability_margin(), -2.0);
    assert_eq!(r.epsilon, Some(0.01));

    let mut c = parse_config(INLINE).unwrap();
    c.analysis = None;
    let r = c.resolve().unwrap();
    assert_eq!(r.epsilon, None);
    assert_eq!(
        r.config.analysis.unwrap().epsilon,
        Some(EpsilonSpec::Keyword(EpsilonKeyword::Midpoint))
    );
}

#[test]
fn syntax_errors_carry_position() {
    let err = parse_config("{\n  \"example\": \"example1\",\n  oops\n}").unwrap_err();
    match err {
        CliError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 3)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_config("{"), Err(CliError::Syntax { .. })));
}

#[test]
fn unknown_keys_are_rejected() {
    for (text, key) in [
        (
            r#"{"example":"example1","grid":{"dt":0.1,"stpes":3}}"#,
            "stpes",
        ),
        (r#"{"example":"example1","colour":1}"#, "colour"),
        (
            r#"{"example":"example1","ensemble":{"seed":1,"workers":2}}"#,
            "workers",
        ),
    ] {
        match parse_config(text) {
            Err(CliError::UnknownKey { key: k, .. }) => assert_eq!(k, key),
            other => panic!("{text}: {other:?}"),
        }
    }
    let inline_typo = INLINE.replace("\"history\"", "\"histroy\"");
    assert!(matches!(
        parse_config(&inline_typo),
        Err(CliError::UnknownKey { .. })
    ));
}

#[test]
fn invariants_are_named() {
    let cases = [
        (r#"{}"#, "exactly one of example, inline"),
        (
            r#"{"schema":"mtem/2","example":"example1"}"#,
            "schema is mtem/1",
        ),
        (r#"{"example":"example1","grid":{"dt":-0.1}}"#, "dt > 0"),
        (r#"{"example":"example1","grid":{"steps":0}}"#, "steps >= 1"),
        (
            r#"{"example":"example1","ensemble":{"paths":0}}"#,
            "n_paths >= 1",
        ),
        (
            r#"{"example":"example1","seeds":3,"ensemble":{"paths":4}}"#,
            "seeds agrees with ensemble.paths",
        ),
        (
            r#"{"example":"example1","analysis":{"c_values":[-1]}}"#,
            "C >= 0",
        ),
    ];
    for (text, invariant) in cases {
        match parse_config(text) {
            Err(CliError::Invalid { invariant: got, .. }) => assert_eq!(got, invariant, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    let both = INLINE.replacen('{', r#"{"example":"example2","#, 1);
    assert!(matches!(parse_config(&both), Err(CliError::Invalid { .. })));
}

#[test]
fn round_trip() {
    let configs = [
        parse_config(INLINE).unwrap(),
        parse_config(
            r#"{"example":"example2","seeds":4,"out":"x","analysis":{"epsilon":"midpoint"}}"#,
        )
        .unwrap(),
        RunConfig::for_example(ExampleName::Example1),
    ];
    for c in configs {
        assert_eq!(parse_config(&c.to_json_string()).unwrap(), c);
        let resolved = c.resolve().unwrap().config;
        let again = parse_config(&resolved.to_json_string()).unwrap();
        assert_eq!(again, resolved);
        assert_eq!(again.resolve().unwrap().config, resolved);
    }
}

#[test]
fn overrides_take_precedence() {
    let mut c = parse_config(r#"{"example":"example1","seeds":3,"out":"a"}"#).unwrap();
    c.apply(&Overrides {
        dt: Some(0.05),
        steps: Some(40),
        paths: Some(5),
        seed: Some(9),
        epsilon: Some(EpsilonSpec::Value(0.1)),
        out: Some("b".into()),
        format: Some(OutputFormat::Csv),
        ..Overrides::default()
    })
    .unwrap();
    let r = c.resolve().unwrap();
    assert_eq!((r.grid.dt, r.grid.m, r.grid.n_steps), (0.05, 20, 40));
    assert_eq!((r.n_paths, r.seed, r.epsilon), (5, 9, Some(0.1)));
    assert_eq!(r.out_dir.to_str(), Some("b"));
    assert_eq!(r.format, OutputFormat::Csv);

    let mut inline = parse_config(INLINE).unwrap();
    assert!(inline
        .apply(&Overrides {
            example: Some(ExampleName::Example1),
            ..Overrides::default()
        })
        .is_err());
}

#[test]
fn epsilon_flag_parsing() {
    assert_eq!("0.05".parse::<EpsilonSpec>(), Ok(EpsilonSpec::Value(0.05)));
    assert_eq!(
        "midpoint".parse::<EpsilonSpec>(),
        Ok(EpsilonSpec::Keyword(EpsilonKeyword::Midpoint))
    );
    assert!("middle".parse::<EpsilonSpec>().is_err());
}

#[test]
fn error_records_are_json() {
    let err = parse_config(r#"{"example":"example1","x":1}"#).unwrap_err();
    let rec = err.record();
    assert_eq!(rec["error"]["kind"], "unknown key");
    assert_eq!(rec["error"]["key"], "x");
    assert_eq!(rec["error"]["line"], 1);
}
