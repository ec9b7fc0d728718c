use std::path::Path;
use std::process::{Command, Output};

use paramexpmv::problems::{gen_advdiff2, load_problem};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramexpmv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramexpmv"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const ADV: [&str; 8] = ["--problem", "advdiff1", "--n", "200", "--a", "3e-4", "--t", "0.5"];

#[test]
fn solve_reaches_tolerance_with_one_row_per_target() {
    let mut args = vec!["solve"];
    args.extend(ADV);
    args.extend(["--eps", "1e-3,1.5e-2,3e-2", "--tol", "1e-8"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("t,eps,p_used,aposteriori_estimate,apriori_total\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    for (row, eps) in r.iter().zip([1e-3, 1.5e-2, 3e-2]) {
        assert_eq!(num(&row[0]), 0.5);
        assert_eq!(num(&row[1]), eps);
        assert!(row[2].parse::<usize>().unwrap() <= 200);
        assert!(num(&row[3]) <= 1e-8);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let mut args = vec!["solve"];
    args.extend(ADV);
    args.extend(["--eps", "1e-3,-2e-2,3e-2", "--p", "20"]);
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let conv = ["convergence", "--problem", "advdiff1", "--n", "40", "--t", "0.5", "--eps", "0,1e-2", "--p-max", "12"];
    assert_eq!(run(&conv).stdout, run(&conv).stdout);
}

#[test]
fn missing_time_is_a_usage_error() {
    let o = run(&["solve", "--problem", "advdiff1", "--eps", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--t"));
}

#[test]
fn bad_inputs_exit_with_two() {
    assert_eq!(run(&["solve", "--problem", "advdiff1", "--t", "1", "--eps", "x"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--problem", "advdiff1", "--t", "1", "--eps", "0", "--p", "0"]).status.code(), Some(2));
    let o = run(&["solve", "--problem", "advdiff1", "--n", "1", "--t", "1", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
    // both sources at once
    let o = run(&["solve", "--problem", "wave", "--manifest", "m.json", "--t", "1", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreached_tolerance_exits_with_three_but_still_reports() {
    let mut args = vec!["solve"];
    args.extend(ADV);
    args.extend(["--eps", "3e-2", "--tol", "1e-30", "--p-max", "6", "--check-interval", "2"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(3));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][2], "6");
    assert!(stderr(&o).contains("tolerance"));
}

#[test]
fn complex_parameters_use_complex_arithmetic() {
    let o = run(&["solve", "--problem", "advdiff1", "--n", "30", "--t", "0.5", "--eps", "1e-2+1e-2i", "--p", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert_eq!(r[0][1], "1.0000000000000000e-2+1.0000000000000000e-2i");
}

#[test]
fn generate_writes_files_that_load_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("adv2");
    let o = run(&["generate", "--problem", "advdiff2", "--n", "200", "--a", "3e-4", "--b", "2e2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["A0.mtx", "A1.mtx", "A2.mtx", "manifest.json", "u0.mtx"]);
    let (m, poly, u0) = load_problem::<f64>(&out.join("manifest.json")).unwrap();
    let (p2, v2) = gen_advdiff2(200, 3e-4, 2e2).unwrap();
    assert_eq!(m.name, "advdiff2");
    assert_eq!(poly.coeffs(), p2.coeffs());
    assert_eq!(u0, v2);
}

#[test]
fn generate_wave_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["generate", "--problem", "wave", "--points", "15", "--gamma1", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (_, poly, u0) = load_problem::<f64>(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(poly.degree(), 1);
    assert_eq!(poly.dim(), 2 * 15 * 15 * 15);
    assert_eq!(u0.len(), 6750);
}

#[test]
fn generate_to_unwritable_path_exits_with_two() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let below_file = file.path().join("sub");
    let o = run(&["generate", "--problem", "advdiff1", "--n", "10", "--out", below_file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_and_builtin_sources_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(run(&["generate", "--problem", "advdiff1", "--n", "60", "--out", d]).status.code(), Some(0));
    let manifest = dir.path().join("manifest.json");
    let tail = ["--t", "0.5,1", "--eps", "0,1e-2", "--p", "25"];
    let mut a = vec!["solve", "--problem", "advdiff1", "--n", "60"];
    a.extend(tail);
    let mut b = vec!["solve", "--manifest", manifest.to_str().unwrap()];
    b.extend(tail);
    let (oa, ob) = (run(&a), run(&b));
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(oa.stdout, ob.stdout);
    // t-major ordering
    let r = rows(&stdout(&oa));
    let order: Vec<(f64, f64)> = r.iter().map(|x| (num(&x[0]), num(&x[1]))).collect();
    assert_eq!(order, [(0.5, 0.0), (0.5, 1e-2), (1.0, 0.0), (1.0, 1e-2)]);
}

#[test]
fn broken_manifest_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"name":"x","n":3,"paths":["A0.mtx","u0.mtx"]}"#).unwrap();
    let o = run(&["solve", "--manifest", m.to_str().unwrap(), "--t", "1", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A0.mtx"));
}

#[test]
fn solution_vectors_match_rows() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("u");
    let o = run(&[
        "solve", "--problem", "advdiff1", "--n", "20", "--t", "0.5", "--eps", "0,1e-2", "--p", "15",
        "--solutions", sol.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for i in 0..2 {
        let v = paramexpmv::linalg::mmio::read_vector::<f64>(sol.join(format!("u{i:04}.mtx"))).unwrap();
        assert_eq!(v.len(), 20);
    }
}

fn convergence_table(extra: &[&str], out: &Path) -> Vec<Vec<String>> {
    let mut args = vec!["convergence", "--problem", "advdiff1", "--n", "100", "--t", "0.5", "--eps", "1e-3,3e-2", "--p-max", "30"];
    args.extend(extra);
    args.extend(["--out", out.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("p,eps,true_error,aposteriori_estimate,apriori_total"));
    rows(&csv)
}

#[test]
fn convergence_table_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let r = convergence_table(&[], &out);
    assert_eq!(r.len(), 60);
    let script = std::fs::read_to_string(dir.path().join("conv.gp")).unwrap();
    assert!(script.contains("set logscale y"));
    assert!(script.contains("conv.csv"));
    for series in r.chunks(30) {
        assert_eq!(series[0][0], "1");
        assert_eq!(series[29][0], "30");
        let first = num(&series[0][2]);
        let last = num(&series[29][2]);
        assert!(last < 1e-9 * first, "{first} -> {last}");
    }

    // self-reference agrees with the dense reference until round-off
    let self_ref = convergence_table(&["--self-reference"], &dir.path().join("self.csv"));
    for (a, b) in r.iter().zip(&self_ref) {
        let (ea, eb) = (num(&a[2]), num(&b[2]));
        if ea > 1e-10 {
            assert!((ea - eb).abs() <= 1e-3 * ea, "{ea} vs {eb}");
        }
    }
}

#[test]
fn gamma_list_gives_one_block_per_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let r = convergence_table(&["--gamma", "0.25*,*,4*"], &out);
    assert_eq!(r.len(), 3 * 60);
    let gammas: Vec<f64> = r.chunks(60).map(|b| num(&b[0][5])).collect();
    assert!((gammas[0] * 4.0 - gammas[1]).abs() < 1e-9 * gammas[1]);
    assert!((gammas[2] / 4.0 - gammas[1]).abs() < 1e-9 * gammas[1]);
}

#[test]
fn dense_reference_respects_cap() {
    let args = ["convergence", "--problem", "advdiff1", "--n", "50", "--t", "0.5", "--eps", "0", "--p-max", "5"];
    let o = run_env(&args, "PARAMEXPMV_DENSE_CAP", "10");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--self-reference"));
    let mut with_self = args.to_vec();
    with_self.push("--self-reference");
    assert_eq!(run_env(&with_self, "PARAMEXPMV_DENSE_CAP", "10").status.code(), Some(0));
}
