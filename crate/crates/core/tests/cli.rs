use std::process::{Command, Output};

fn groupweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupweyl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn lemma_check_passes_and_prints_a_row_per_irrep() {
    let o = groupweyl(&["lemma-check", "--group", "su2", "--op", "mult(cos(x3))", "--lambda-max", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,dim,lhs_re,lhs_im,rhs_re,rhs_im,residual"));
    // 2l = 0, 1, 2, 3 have mu = l(l+1) <= 4
    assert_eq!(lines.count(), 4);
    assert!(stderr(&o).contains("pass"));
}

#[test]
fn weyl_scan_of_a_multiplication_reports_its_mean() {
    let o = groupweyl(&[
        "weyl-scan", "--group", "t1", "--op", "mult(3+cos(x1))", "--lambda-max", "10", "--steps", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let avg: f64 = row[3].parse().unwrap();
        assert!((avg - 3.0).abs() < 1e-12);
        assert_eq!(row[4], "3");
    }
    assert_eq!(rows[0][..2], ["2", "5"]);
}

#[test]
fn json_output_has_meta_rows_and_summary() {
    let o = groupweyl(&[
        "weyl-scan", "--group", "t2", "--op", "prod(mult(1+cos(x1)), spec(t^2/(1+t^2)))",
        "--lambda-max", "5", "--steps", "2", "--f-inf", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["group"], "t2");
    assert_eq!(v["meta"]["command"], "weyl-scan");
    assert_eq!(v["meta"]["operator"], "prod(mult(1+cos(x1)), spec(t^2/(1+t^2)))");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["summary"]["reference_kind"], "product");
    assert_eq!(v["summary"]["reference"], 1.0);
}

#[test]
fn limit_seq_lists_irreps_in_order() {
    let o = groupweyl(&["limit-seq", "--group", "su2", "--op", "spec(1/(1+t^2))", "--lambda-max", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(labels, ["l=0", "l=1/2", "l=1"]);
}

#[test]
fn growth_beyond_the_declared_order_fails_the_verdict() {
    let o = groupweyl(&[
        "growth", "--group", "t1", "--op", "sym(t^3, I)", "--order", "1", "--lambda-min", "10",
        "--lambda-max", "100", "--steps", "20",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("VIOLATED"));
}

#[test]
fn negative_symbols_are_rejected_as_numeric_failures() {
    let o = groupweyl(&["growth", "--group", "t1", "--op", "sym(-1*t^1, I)", "--order", "1", "--lambda-max", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn syntax_errors_point_at_the_offending_byte() {
    let o = groupweyl(&["weyl-scan", "--group", "t1", "--op", "mult(cos(x1)", "--lambda-max", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("byte 12"), "{err}");
    assert!(err.contains("            ^"), "{err}");
}

#[test]
fn typing_errors_exit_with_config_code() {
    for op in ["mult(t*x1)", "spec(x1)", "mult(x1^(1/2))"] {
        let o = groupweyl(&["weyl-scan", "--group", "t2", "--op", op, "--lambda-max", "5"]);
        assert_eq!(o.status.code(), Some(2), "{op}");
    }
    let o = groupweyl(&["weyl-scan", "--group", "t1", "--op", "mult(cos(x2))", "--lambda-max", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_configuration_exits_with_config_code() {
    let cases: [&[&str]; 4] = [
        &["weyl-scan", "--group", "t1", "--op", "mult(1)", "--lambda-max", "-1"],
        &["weyl-scan", "--group", "t1", "--op", "mult(1)", "--lambda-max", "5", "--steps", "0"],
        &["growth", "--group", "t1", "--op", "sym(t, I)", "--lambda-max", "5"],
        &["weyl-scan", "--group", "so3", "--op", "mult(1)", "--lambda-max", "5"],
    ];
    for args in cases {
        assert_eq!(groupweyl(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_file_and_unwritable_paths() {
    let dir = std::env::temp_dir().join(format!("groupweyl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.csv");
    let o = groupweyl(&[
        "weyl-scan", "--group", "t1", "--op", "mult(1)", "--lambda-max", "3", "--steps", "3",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, "lambda,N,T,avg,ref,abs_err\n1,3,3,1,1,0\n2,5,5,1,1,0\n3,7,7,1,1,0\n");
    std::fs::remove_dir_all(&dir).unwrap();

    let o = groupweyl(&[
        "weyl-scan", "--group", "t1", "--op", "mult(1)", "--lambda-max", "3", "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}
