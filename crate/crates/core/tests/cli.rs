//! End-to-end runs of the command-line tool.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn superhet(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_superhet"));
    cmd.args(args).env("RUST_LOG", "warn");
    match workers {
        Some(n) => cmd.env("SUPERHET_WORKERS", n),
        None => cmd.env_remove("SUPERHET_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
[sweep]
lengths_mm = [11.0, 12.0, 13.0, 14.0, 15.0]
seeds = 2
n_avg = 1000
section_width_hz = 500.0

[grid]
start_hz = 50000.0
stop_hz = 60000.0
step_hz = 10.0
"#;

#[test]
fn table_commands_print_csv_headers() {
    let cases: [(&[&str], &str); 6] = [
        (&["specfun", "--points", "5"], "phi,si,ci,f,g"),
        (
            &["psd", "--points", "4"],
            "f_hz,phi,psd_closed,psd_quadrature,in_band_amplitude,out_of_band_amplitude",
        ),
        (&["eit", "--l-mm", "10"], "detuning_hz,transmission"),
        (&["atcal"], "l_mm,splitting_hz,correction_db,corrected_splitting_hz"),
        (&["sensitivity"], "l_mm,n_a_db,p_s_dbm,p_na_dbm,snr_db,min_rabi_rad_s"),
        (&["scaling", "--ideal"], "series,regime,slope,intercept,r2"),
    ];
    for (args, header) in cases {
        let out = superhet(args, None);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        assert_eq!(text.lines().next(), Some(header), "{args:?}");
        assert!(text.lines().count() > 1, "{args:?}");
    }
}

#[test]
fn specfun_rows_match_the_requested_count() {
    let out = superhet(
        &["specfun", "--phi-min", "0.1", "--phi-max", "10", "--points", "7"],
        None,
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 8);
}

#[test]
fn synth_and_fit_use_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = superhet(
        &["--config", &cfg, "--seed", "9", "synth", "--l-mm", "12", "--kind", "ni"],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("f_hz,p_dbm,flagged"));
    assert_eq!(text.lines().count(), 21);

    let target = dir.path().join("fits.csv");
    let out = superhet(
        &[
            "--config",
            &cfg,
            "--out",
            target.to_str().unwrap(),
            "fit",
            "--free-kappa",
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("f_hz,a_linear,p_n0_linear,kappa,"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_value = write(dir.path(), "a.toml", "[transit]\nomega = -1.0\n");
    let out = superhet(&["--config", &bad_value, "atcal"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("transit.omega"));

    let unknown = write(dir.path(), "b.toml", "[sweep]\nseeds = 2\nbogus = 1\n");
    let out = superhet(&["--config", &unknown, "atcal"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = superhet(&["campaign"], Some("zero"));
    assert_eq!(code(&out), 2);
}

#[test]
fn numerical_errors_exit_with_3() {
    let out = superhet(&["specfun", "--phi-min=-1"], None);
    assert_eq!(code(&out), 3);
    let out = superhet(&["synth", "--l-mm=-2"], None);
    assert_eq!(code(&out), 3);

    // one length cannot support a power-law fit
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.toml",
        &SMALL.replace("[11.0, 12.0, 13.0, 14.0, 15.0]", "[12.0]"),
    );
    let out = superhet(&["--config", &cfg, "fit"], None);
    assert_eq!(code(&out), 3);
}

#[test]
fn io_errors_exit_with_4() {
    let out = superhet(&["--config", "/nonexistent/superhet.toml", "atcal"], None);
    assert_eq!(code(&out), 4);
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.csv");
    let out = superhet(&["--out", target.to_str().unwrap(), "atcal"], None);
    assert_eq!(code(&out), 4);
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn campaign_output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let run_dir = dir.path().join("run");
    let run = run_dir.to_str().unwrap();

    let out = superhet(&["--config", &cfg, "--out", run, "campaign"], Some("1"));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let first = tree(&run_dir);
    fs::remove_dir_all(&run_dir).unwrap();
    let out = superhet(&["--config", &cfg, "--out", run, "campaign"], Some("4"));
    assert_eq!(code(&out), 0);
    let second = tree(&run_dir);
    assert_eq!(first, second);

    for name in [
        "manifest.json",
        "config.toml",
        "eit/summary.csv",
        "atcal/calibration.csv",
        "scaling/sensitivity.csv",
        "scaling/summary.csv",
        "fits/fits_s1.csv",
        "fits/free_kappa.csv",
        "nps/ni_l12.000mm_s2.csv",
    ] {
        assert!(first.contains_key(name), "missing {name}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&first["manifest.json"]).unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([1, 2]));
    assert_eq!(manifest["files"].as_object().unwrap().len(), first.len() - 1);
}

#[test]
fn campaign_seed_flag_shifts_the_seed_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let run_dir = dir.path().join("run");
    let out = superhet(
        &[
            "--config",
            &cfg,
            "--out",
            run_dir.to_str().unwrap(),
            "--seed",
            "40",
            "campaign",
        ],
        Some("2"),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run_dir.join("fits/fits_s40.csv").exists());
    assert!(run_dir.join("fits/fits_s41.csv").exists());
}
