use std::process::Command;

fn qsl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsl"))
}

const SMALL: [&str; 8] = ["--channel", "ad", "--lambda", "0.2", "--mu", "0,0.5,1", "--tau-d", "0.1:2:5"];

#[test]
fn sweep_writes_csv_with_metadata() {
    let out = qsl().arg("sweep").args(SMALL).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# qsl-core"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("family,mu,tau,tau_d,f,ml_avg,mt_avg,tau_qsl,active_bound,frozen,quad_error"));
    assert_eq!(rows.len(), 1 + 3 * 5);
    assert!(rows[1].starts_with("ad,0,1,0.1,"));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let status = qsl().arg("sweep").args(SMALL).arg("--out").arg(p).status().unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn json_output_is_an_array_of_records() {
    let out = qsl()
        .args(["sweep", "--channel", "dephasing", "--nu", "1", "--mu", "1", "--tau-d", "0.5", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert_eq!(row["family"], "dephasing");
    assert_eq!(row["frozen"], true);
}

#[test]
fn inset_sweeps_initial_time() {
    let out = qsl()
        .args(["inset", "--channel", "sgad", "--n", "1", "--m", "1", "--mu", "0", "--tau", "0:2:3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let taus: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("sgad,"))
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(taus, ["0", "1", "2"]);
}

#[test]
fn config_errors_exit_with_one() {
    for args in [
        vec!["sweep", "--channel", "ad"],
        vec!["sweep", "--channel", "dephasing", "--nu", "1", "--mu", "1.5"],
        vec!["sweep", "--preset", "fig9"],
        vec!["sweep", "--channel", "sgad", "--n", "0", "--m", "2"],
        vec!["sweep", "--channel", "ad", "--lambda", "1", "--tau-d", "1:2"],
    ] {
        let out = qsl().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn fd_derivative_flag_is_accepted() {
    let out = qsl()
        .args(["sweep", "--channel", "ad", "--lambda", "2", "--mu", "0", "--tau-d", "1", "--deriv", "fd", "--fd-step", "1e-5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"mode\":\"fd\""));
}
