//! End-to-end checks of the binary: CSV schemas, determinism, exit codes,
//! and the validate negative control.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cvclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvclone"))
        .args(args)
        .env_remove("CVCLONE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cvclone-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn sweep_schema_and_peak() {
    let out = cvclone(&[
        "sweep",
        "--protocol",
        "irreversible",
        "--resource",
        "tmsv",
        "--r-steps",
        "101",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "protocol,resource,input,r,epsilon,clone_index,fidelity,var_x,var_p,q,zeta,eln,ggm"
    );
    // every row has the full column count
    let mut best = (0.0f64, 0.0f64);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 13, "bad row: {line}");
        let r: f64 = cols[3].parse().unwrap();
        let f: f64 = cols[6].parse().unwrap();
        if f > best.1 {
            best = (r, f);
        }
    }
    // fidelity peaks at the 0.88 grid point with 2/3
    assert!((best.0 - 0.88).abs() < 1e-9, "peak at r = {}", best.0);
    assert!((best.1 - 2.0 / 3.0).abs() < 1e-4, "peak value {}", best.1);
}

#[test]
fn sweep_is_byte_deterministic() {
    let args = [
        "sweep",
        "--resource",
        "ps:1,1",
        "--protocol",
        "reversible",
        "--r-min",
        "0.1",
        "--r-max",
        "0.5",
        "--r-steps",
        "9",
        "--seed",
        "7",
    ];
    let a = cvclone(&args);
    let b = cvclone(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // thread count must not change the bytes
    let c = Command::new(env!("CARGO_BIN_EXE_cvclone"))
        .args(args)
        .env("CVCLONE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn ps11_dominates_tmsv_in_reversible_sweep() {
    let run = |resource: &str| -> Vec<f64> {
        let out = cvclone(&[
            "sweep",
            "--protocol",
            "reversible",
            "--resource",
            resource,
            "--r-min",
            "0.1",
            "--r-max",
            "1.0",
            "--r-steps",
            "10",
        ]);
        assert!(out.status.success());
        stdout(&out)
            .lines()
            .skip(1)
            .filter(|l| l.split(',').nth(5) == Some("1"))
            .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
            .collect()
    };
    let ps = run("ps:1,1");
    let tmsv = run("tmsv");
    assert_eq!(ps.len(), tmsv.len());
    for (a, b) in ps.iter().zip(&tmsv) {
        assert!(a > b, "PS-1,1 {a} vs TMSV {b}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["sweep", "--resource", "bogus"],
        vec!["sweep", "--resource", "ps:0,0"],
        vec!["sweep", "--input", "squeezed:-1"],
        vec!["figure", "fig99"],
        vec!["network", "--taus", "1.5"],
        vec!["optimize", "--target", "epsilon"], // missing --r
    ] {
        let out = cvclone(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?} gave {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    // unwritable output is an I/O failure, not a usage error
    let out = cvclone(&["sweep", "--r-steps", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_finds_the_known_optimum() {
    let out = cvclone(&["optimize", "--target", "r", "--resource", "tmsv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let loc: f64 = text
        .split_whitespace()
        .find_map(|t| t.strip_prefix("location="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((loc - 0.8814).abs() < 1e-3, "location {loc}");
    assert!(text.contains("degenerate=false"));
}

#[test]
fn network_discrepancy_is_tiny() {
    let out = cvclone(&[
        "network",
        "--taus",
        "0.5,0.05,0.125,0.1",
        "--r-min",
        "0.0",
        "--r-max",
        "2.0",
        "--r-steps",
        "21",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "r,clone_index,f_closed,f_sim,q_closed,q_sim,max_discrepancy"
    );
    for line in text.lines().skip(1) {
        let disc: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(disc < 1e-9, "row {line}");
    }
    // 21 grid points x 4 clones
    assert_eq!(text.lines().count(), 1 + 21 * 4);
}

#[test]
fn figure_fig2_bundle() {
    let dir = tmpdir("fig2");
    let out = cvclone(&["figure", "fig2", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("fig2.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,fidelity,eln,ggm");
    assert_eq!(csv.lines().count(), 202);
    let plt = std::fs::read_to_string(dir.join("fig2.plt")).unwrap();
    assert!(plt.contains("fig2.csv"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn figure_fig6_bundle() {
    let dir = tmpdir("fig6");
    let out = cvclone(&["figure", "fig6", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("fig6.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("r,q_irreversible_c1,f_irreversible_c1"));
    assert_eq!(header.split(',').count(), 17);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn sweep_skips_unphysical_grid_points() {
    // photon subtraction does not exist at r = 0; the point is skipped
    let out = cvclone(&["sweep", "--resource", "ps:1,1", "--r-steps", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 4 * 2); // header + 4 surviving points x 2 clones
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipping r = 0"));
}

#[test]
fn asymmetric_sweep_labels_and_clone_count() {
    let out = cvclone(&[
        "sweep",
        "--protocol",
        "asymmetric",
        "--taus",
        "0.5,0.05,0.125,0.1",
        "--r-steps",
        "3",
        "--r-max",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "protocol,resource,input,r,epsilon,clone_index,fidelity,var_x,var_p,q,zeta"
    );
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("asymmetric,asym:0.5;0.05;0.125;0.1"));
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn figure_fig3_and_fig4_bundles() {
    let dir = tmpdir("fig34");
    for id in ["fig3", "fig4"] {
        let out = cvclone(&["figure", id, "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{id} failed");
        let csv = std::fs::read_to_string(dir.join(format!("{id}_vs_r.csv"))).unwrap();
        // r plus (q, f) per resource per protocol
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 1 + 2 * 5 * 2);
    }
    let eps = std::fs::read_to_string(dir.join("fig4_vs_eps.csv")).unwrap();
    assert_eq!(eps.lines().next().unwrap().split(',').count(), 1 + 5 * 2);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tmpdir("config");
    let cfg_path = dir.join("run.conf");
    std::fs::write(
        &cfg_path,
        "# sweep configuration\nresource = tmsv\nprotocol = reversible\nr-steps = 3\nr-max = 0.4\n",
    )
    .unwrap();
    let out = cvclone(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("reversible,tmsv"));
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    // flags win over the file
    let out = cvclone(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--protocol",
        "irreversible",
    ]);
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("irreversible,tmsv"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn validate_filtered_deterministic_and_injectable() {
    let args = ["validate", "--only", "11", "--seed", "9"];
    let a = cvclone(&args);
    let b = cvclone(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("criterion 11a"));

    let out = cvclone(&[
        "validate",
        "--only",
        "13a",
        "--inject",
        "overlap-prefactor",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"));
    assert!(text.contains("13a"), "purity check named in: {text}");
}
