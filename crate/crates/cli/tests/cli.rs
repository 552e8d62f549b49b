use std::process::Command as Process;

use dce_cli::commands::{cmd_alloc, cmd_nmse, failures, verify_with};
use dce_cli::config::{ExperimentConfig, Format};
use dce_cli::table::{without_footer, Cell};
use dce_cli::{run, CliError, Command};
use dce_core::alloc::gp::{theta_exponents, GpState};
use dce_core::analytic::JensenVariant;
use dce_core::{Error, Scheme, SystemParams};
use proptest::prelude::*;

fn dce(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_dce"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let lists = (
        prop::collection::vec(0.001f64..1.0, 1..4),
        prop::collection::vec(-10.0f64..40.0, 1..6),
        prop::collection::vec(2usize..20, 0..4),
    );
    let scalars = (
        any::<bool>(),
        0.1f64..10.0,
        0.1f64..10.0,
        any::<u64>(),
        prop::option::of(1usize..100_000),
    );
    let rest = (
        prop::option::of(2usize..9),
        any::<bool>(),
        any::<bool>(),
        prop_oneof![Just(4usize), Just(16), Just(64)],
    );
    (lists, scalars, rest).prop_map(
        |((gamma, pave_db, tau_f), (rec, var_g, pbar, seed, trials), (tau_0, json, s2, qam))| {
            ExperimentConfig {
                scheme: if rec {
                    Scheme::Reciprocal
                } else {
                    Scheme::NonReciprocal
                },
                var_g,
                pbar_t_db: pbar,
                gamma,
                pave_db,
                tau_f,
                seed,
                trials,
                tau_0,
                format: if json { Format::Json } else { Format::Csv },
                jensen_variant: if s2 {
                    JensenVariant::SigmaSquared
                } else {
                    JensenVariant::Printed
                },
                qam,
                out: if json {
                    Some("out dir/table.json".into())
                } else {
                    None
                },
                ..ExperimentConfig::default()
            }
        },
    )
}

proptest! {
    #[test]
    fn config_text_round_trips(c in config()) {
        let text = c.to_config_string();
        prop_assert_eq!(ExperimentConfig::parse_str(&text).unwrap(), c);
    }
}

#[test]
fn reciprocal_alloc_schema_and_zero_powers() {
    let t = cmd_alloc(&ExperimentConfig::default()).unwrap();
    let names: Vec<&str> = t.columns.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["p_ave_db", "gamma", "er_db", "ef_db", "an_db", "nmse_l", "nmse_u"]
    );
    assert_eq!(t.rows.len(), 10);
    let row = t
        .rows
        .iter()
        .find(|r| r[0] == Cell::Float(10.0) && r[1] == Cell::Float(0.03))
        .unwrap();
    assert_eq!(row[2], Cell::Float(f64::NEG_INFINITY));
    assert_eq!(row[4], Cell::Float(f64::NEG_INFINITY));
    let mut csv = Vec::new();
    t.write_csv(&mut csv, "0").unwrap();
    assert!(String::from_utf8(csv)
        .unwrap()
        .contains("1.0000000000000000e1,2.9999999999999999e-2,-inf,"));
}

#[test]
fn nmse_rows_bound_and_floor() {
    let cfg = ExperimentConfig {
        trials: Some(2000),
        ..ExperimentConfig::default()
    };
    let t = cmd_nmse(&cfg).unwrap();
    let lb = t.floats("lower_bound");
    let gamma = t.floats("gamma");
    // rows are γ-major, so each γ block repeats the P_ave sweep
    for block in lb.chunks(cfg.pave_db.len()) {
        assert!(block.windows(2).all(|w| w[1] < w[0]), "{block:?}");
    }
    for ((u, hw), g) in t
        .floats("nmse_u_empirical")
        .iter()
        .zip(t.floats("nmse_u_half_width"))
        .zip(gamma)
    {
        assert!(*u >= g - hw, "{u} ± {hw} vs {g}");
    }
}

#[test]
fn tau_sweep_is_non_decreasing() {
    let cfg = ExperimentConfig {
        tau_f: vec![4, 6, 8, 12, 16],
        pave_db: vec![20.0],
        trials: Some(200),
        ..Default::default()
    };
    let t = cmd_nmse(&cfg).unwrap();
    for block in t.floats("nmse_l").chunks(5) {
        assert!(block.windows(2).all(|w| w[1] >= w[0]));
    }
    let non_rec = ExperimentConfig {
        scheme: Scheme::NonReciprocal,
        ..cfg
    };
    assert!(matches!(cmd_nmse(&non_rec), Err(CliError::Config(_))));
}

fn swapped_theta(p: &SystemParams<f64>, s: &GpState<f64>) -> [f64; 5] {
    let th = theta_exponents(p, s);
    [th[0], th[2], th[1], th[3], th[4]]
}

#[test]
fn wrong_exponents_fail_the_tangency_rows() {
    let cfg = ExperimentConfig {
        pave_db: vec![20.0],
        gamma: vec![0.1],
        trials: Some(1000),
        ..Default::default()
    };
    let good = verify_with(&cfg, theta_exponents).unwrap();
    assert_eq!(failures(&good), 0);
    let bad = verify_with(&cfg, swapped_theta).unwrap();
    assert_eq!(failures(&bad), 1);
    let suite = bad.column("suite");
    let passed = bad.column("passed");
    let failing: Vec<_> = suite
        .iter()
        .zip(&passed)
        .filter(|(_, p)| ***p == Cell::Bool(false))
        .collect();
    assert_eq!(*failing[0].0, &Cell::Text("tangency".into()));
    assert_eq!(CliError::Verification(1).exit_code(), 5);
}

#[test]
fn jensen_row_names_the_closer_variant() {
    let cfg = ExperimentConfig {
        pave_db: vec![20.0],
        gamma: vec![0.1],
        trials: Some(10_000),
        ..Default::default()
    };
    let t = run(Command::Verify, &cfg).unwrap();
    let i = t
        .column("suite")
        .iter()
        .position(|s| **s == Cell::Text("jensen".into()))
        .unwrap();
    let Cell::Text(note) = &t.rows[i][5] else {
        panic!()
    };
    assert!(note.starts_with("closer="), "{note}");
}

#[test]
fn exit_codes() {
    assert_eq!(dce(&["alloc", "--pave-db", "20", "--gamma", "0.1"]).0, 0);
    assert_eq!(dce(&["alloc", "--colour", "red"]).0, 2);
    assert_eq!(dce(&["alloc", "--pave-db", "x"]).0, 2);
    assert_eq!(dce(&["ser", "--trials", "0"]).0, 2);
    assert_eq!(dce(&["alloc", "--gamma", "1.5"]).0, 3);
    assert_eq!(dce(&["ser", "--n-t", "3", "--trials", "10"]).0, 4);
    assert_eq!(
        CliError::Core(Error::Infeasible { margin: 0.1 }).exit_code(),
        3
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "scheme = non-reciprocal\npave-db = 15:25:5\ngamma = 0.1\n",
    )
    .unwrap();
    let (code, out) = dce(&[
        "alloc",
        "--config",
        path.to_str().unwrap(),
        "--pave-db",
        "20",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("p_ave_db,gamma,e0_db,"));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 2);
    std::fs::write(&path, "sheme = reciprocal\n").unwrap();
    assert_eq!(dce(&["alloc", "--config", path.to_str().unwrap()]).0, 2);
}

#[test]
fn same_seed_same_bytes() {
    for args in [
        vec!["alloc"],
        vec![
            "nmse",
            "--trials",
            "300",
            "--pave-db",
            "15,25",
            "--scheme",
            "non-reciprocal",
        ],
        vec!["ser", "--trials", "200", "--pave-db", "20"],
        vec![
            "verify",
            "--pave-db",
            "20",
            "--gamma",
            "0.1",
            "--trials",
            "500",
        ],
        vec!["alloc", "--format", "json"],
    ] {
        let (c1, a) = dce(&args);
        let (c2, b) = dce(&args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(without_footer(&a), without_footer(&b), "{args:?}");
    }
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let (code, out) = dce(&[
        "alloc",
        "--pave-db",
        "20",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}
