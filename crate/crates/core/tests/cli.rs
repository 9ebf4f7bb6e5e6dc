use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use conftree::nvb::dump::MeshDump;

fn conftree(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conftree"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--target", "u1", "--alg", "both", "--iters", "300"];
    let a = conftree(dir.path(), &[&args[..], &["--out", "a"]].concat());
    let b = conftree(dir.path(), &[&args[..], &["--out", "b"]].concat());
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&b), 0);
    for alg in ["alg1", "alg2"] {
        for kind in ["trace.csv", "convergence.csv", "mesh.txt", "patches.txt"] {
            let name = format!("u1_{alg}_{kind}");
            let x = fs::read(dir.path().join("a").join(&name)).unwrap();
            let y = fs::read(dir.path().join("b").join(&name)).unwrap();
            assert_eq!(x, y, "{name}");
        }
    }
    let conv = fs::read_to_string(dir.path().join("a/u1_alg1_convergence.csv")).unwrap();
    assert!(conv.starts_with("cards,err_sqrt\n6,"));
    assert_eq!(conv.lines().count(), 1 + 31);
    let trace = fs::read_to_string(dir.path().join("a/u1_alg1_trace.csv")).unwrap();
    assert!(trace.starts_with("n,marked_cell,patch_size,t_n,err_global,leaves,complexity\n"));
    assert_eq!(trace.lines().count(), 1 + 301);
    // final mesh has as many cells as the last row reports leaves
    let last = trace.lines().last().unwrap().split(',').collect::<Vec<_>>();
    let mesh = MeshDump::parse(&fs::read_to_string(dir.path().join("a/u1_alg1_mesh.txt")).unwrap()).unwrap();
    assert_eq!(mesh.cells.len().to_string(), last[5]);
    assert!(mesh.has_no_hanging_vertices().unwrap());
}

#[test]
fn affine_target_stops_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let o = conftree(dir.path(), &["run", "--target", "affine", "--alg", "alg1", "--stop", "indicator_zero"]);
    assert_eq!(code(&o), 0);
    let trace = fs::read_to_string(dir.path().join("out/affine_alg1_trace.csv")).unwrap();
    assert_eq!(trace.lines().nth(1).unwrap(), "0,,0,0,0,4,0");
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn iteration_cap_flags_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = conftree(dir.path(), &["run", "--target", "u2", "--alg", "alg2", "--stop", "indicator_zero", "--cap", "5"]);
    assert_eq!(code(&o), 2);
    let status = fs::read_to_string(dir.path().join("out/u2_alg2_status.txt")).unwrap();
    assert!(status.starts_with("partial"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.conf"), "# test\ntarget = u2\nalg = alg2\niters = 7\nout = res\n").unwrap();
    let o = conftree(dir.path(), &["run", "--config", "exp.conf", "--iters", "12"]);
    assert_eq!(code(&o), 0);
    let trace = fs::read_to_string(dir.path().join("res/u2_alg2_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 13);

    fs::write(dir.path().join("bad.conf"), "target = u2\nspeed = fast\n").unwrap();
    let o = conftree(dir.path(), &["run", "--config", "bad.conf"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&conftree(dir.path(), &["run", "--target", "u9"])), 1);
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pass = conftree(dir.path(), &["certify", "--target", "u2", "--oracle-depth", "6"]);
    assert_eq!(code(&pass), 0, "{}", String::from_utf8_lossy(&pass.stdout));
    let sigma = fs::read_to_string(dir.path().join("out/u2_sigma.csv")).unwrap();
    assert!(sigma.starts_with("n,sigma_n,argmin_leaves\n"));
    let report = fs::read_to_string(dir.path().join("out/u2_alg1_certify.csv")).unwrap();
    assert!(report.starts_with("N,best_n,bound,err,ratio,pass\n"));

    let fail = conftree(dir.path(), &["certify", "--target", "u2", "--oracle-depth", "6", "--scale-errors", "10"]);
    assert_eq!(code(&fail), 1);
    let capped = conftree(dir.path(), &["certify", "--target", "u1", "--oracle-depth", "8", "--state-cap", "50"]);
    assert_eq!(code(&capped), 2);
}

#[test]
fn slope_of_a_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("cards,err_sqrt\n");
    for k in 1..=10 {
        let c = 100 * k;
        csv += &format!("{c},{}\n", 2.0 * (c as f64).powf(-0.5));
    }
    fs::write(dir.path().join("c.csv"), csv).unwrap();
    let o = conftree(dir.path(), &["slope", "c.csv"]);
    assert_eq!(code(&o), 0);
    let s: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((s + 0.5).abs() < 1e-12);
    let few = conftree(dir.path(), &["slope", "c.csv", "--from", "100", "--to", "300"]);
    assert_eq!(code(&few), 1);
}

#[test]
fn dump_mesh_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = conftree(dir.path(), &["dump-mesh", "--target", "u2", "--alg", "alg1", "--iteration", "0"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("out/u2_alg1_0_mesh.txt")).unwrap();
    let mesh = MeshDump::parse(&text).unwrap();
    assert_eq!(mesh.cells.len(), 4);
    assert_eq!(mesh.to_text(), text);

    for it in [10, 40, 90] {
        let it_s = it.to_string();
        let o = conftree(dir.path(), &["dump-mesh", "--target", "u1", "--alg", "alg2", "--iteration", &it_s]);
        assert_eq!(code(&o), 0);
        let text = fs::read_to_string(dir.path().join(format!("out/u1_alg2_{it}_mesh.txt"))).unwrap();
        let mesh = MeshDump::parse(&text).unwrap();
        assert!(mesh.has_no_hanging_vertices().unwrap());
        assert!((mesh.area() - 0.75).abs() < 1e-12);
        let patches = fs::read_to_string(dir.path().join(format!("out/u1_alg2_{it}_patches.txt"))).unwrap();
        assert_eq!(patches.lines().filter(|l| !l.starts_with('#')).count(), it);
    }

    let o = conftree(dir.path(), &["dump-mesh", "--target", "affine", "--iteration", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration 3"));
}

#[test]
fn validate_quadrature_passes() {
    let dir = tempfile::tempdir().unwrap();
    for q in ["adaptive", "plain"] {
        let o = conftree(dir.path(), &["validate-quadrature", "--quadrature", q]);
        assert_eq!(code(&o), 0);
        assert!(String::from_utf8_lossy(&o.stdout).trim_end().ends_with("pass"));
    }
}
