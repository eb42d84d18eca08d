use std::process::{Command, Output};

fn rbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbm"))
        .args(args)
        .output()
        .expect("rbm binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and first data row as a column lookup.
fn first_row(csv: &str) -> impl Fn(&str) -> String {
    let mut lines = csv.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let row: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    move |col: &str| {
        let i = header
            .iter()
            .position(|h| h == col)
            .unwrap_or_else(|| panic!("no column {col}"));
        row[i].clone()
    }
}

const P0: [&str; 6] = ["--mu1", "-1", "--mu2", "-1", "--r", "0"];

fn with_p0<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&P0);
    v.extend_from_slice(extra);
    v
}

#[test]
fn inspect_reports_pole_and_thresholds() {
    let out = rbm(&with_p0("inspect", &[]));
    assert!(out.status.success());
    let col = first_row(&stdout(&out));
    let num = |c: &str| col(c).parse::<f64>().unwrap();
    assert!((num("theta1p") - 2.0).abs() < 1e-12);
    assert!((num("alpha0") - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!((num("alpha1") - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn interior_transform_value() {
    let out = rbm(&with_p0("f", &["--theta1", "1", "--theta2", "0"]));
    assert!(out.status.success());
    let col = first_row(&stdout(&out));
    assert!((col("value").parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn non_transient_parameters_exit_two() {
    let out = rbm(&["inspect", "--mu1", "1", "--mu2", "-1", "--r", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("transience"), "stderr: {err}");
}

#[test]
fn degrees_and_malformed_flags_are_rejected() {
    assert_eq!(
        rbm(&with_p0("law", &["--alpha", "90"])).status.code(),
        Some(2)
    );
    assert_eq!(
        rbm(&with_p0("law", &["--alpha", "abc"])).status.code(),
        Some(2)
    );
    assert_eq!(rbm(&["bogus"]).status.code(), Some(2));
}

#[test]
fn density_ray_columns_and_ratio() {
    let out = rbm(&with_p0(
        "density",
        &[
            "--alpha",
            "1.5707963267948966",
            "--rho",
            "10,20",
            "--tol",
            "0",
            "--rel-tol",
            "1e-10",
        ],
    ));
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "rho,alpha,value,abs_err,regime,law_value,ratio"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "10.0");
    assert_eq!(rows[1][0], "20.0");
    for row in &rows {
        assert_eq!(row[4], "Saddle");
        let ratio: f64 = row[6].parse().unwrap();
        assert!((ratio - 1.0).abs() < 0.15, "ratio {ratio}");
    }
}

#[test]
fn csv_numbers_round_trip() {
    let out = rbm(&with_p0("law", &["--grid", "7"]));
    assert!(out.status.success());
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let alpha: f64 = cells[0].parse().unwrap();
        // printed value must reparse to exactly what the grid generator produced
        let k = (alpha / std::f64::consts::PI * 8.0).round();
        assert_eq!(alpha, std::f64::consts::PI * k / 8.0);
        let rate: f64 = cells[4].parse().unwrap();
        assert_eq!(rate.to_string().parse::<f64>().unwrap(), rate);
    }
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn json_lines_keep_column_order() {
    let out = rbm(&with_p0("g", &["--theta1", "1", "--format", "json"]));
    assert!(out.status.success());
    let line = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert!((v["g_re"].as_f64().unwrap() - (1.0 + std::f64::consts::SQRT_2)).abs() < 1e-12);
    assert!(line.find("theta1_re").unwrap() < line.find("g_re").unwrap());
}

#[test]
fn tail_reports_both_directions() {
    let out = rbm(&with_p0("tail", &[]));
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("plus,density,1.0,0.0,2.0,false,ok"));
    assert!(text.contains("minus,tail,,,,,"));
}

#[test]
fn martin_limit_at_vertical_is_e() {
    let out = rbm(&with_p0(
        "martin",
        &["--alpha", "1.5707963267948966", "--at1", "1", "--at2", "0"],
    ));
    assert!(out.status.success());
    let col = first_row(&stdout(&out));
    assert!((col("limit").parse::<f64>().unwrap() - std::f64::consts::E).abs() < 1e-10);
    assert_eq!(col("family"), "saddle");
}

#[test]
fn simulate_is_deterministic_and_reports_errors() {
    let args = with_p0(
        "simulate",
        &[
            "--paths",
            "64",
            "--step",
            "0.01",
            "--seed",
            "7",
            "--mgf",
            "f",
            "--theta1",
            "1",
            "--box",
            "-0.5,0.5,0,1",
        ],
    );
    let a = rbm(&args);
    let b = rbm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("functional,value,std_error,paths,truncation_fraction,flagged\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn simulate_outside_convergence_domain_is_invalid() {
    let out = rbm(&with_p0(
        "simulate",
        &["--paths", "8", "--mgf", "f", "--theta1", "3"],
    ));
    assert_eq!(out.status.code(), Some(2));
}
