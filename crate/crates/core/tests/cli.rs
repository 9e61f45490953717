use hyspectra::cli::{run, EXIT_BUDGET, EXIT_OK, EXIT_USAGE};

fn hyspectra(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hyspectra").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn charpoly_text_n2() {
    let (code, out, _) = hyspectra(&["charpoly", "--n", "2", "--variant", "gamma", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "λ^4 - 2λ^2");
}

#[test]
fn charpoly_methods_agree() {
    let (code, out, _) = hyspectra(&["charpoly", "--n", "4", "--variant", "gamma-prime", "--method", "both", "--format", "json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_object());
}

#[test]
fn spectrum_csv_n3() {
    let (code, out, _) = hyspectra(&["spectrum", "--n", "3", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# schema: hyspectra.spectrum.v1"));
    assert_eq!(lines.next(), Some("r,q,eigenvalue_float,multiplicity"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    let total: u64 = rows.iter().map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 8);
    assert!(rows.contains(&"1,2,1.2246467991473532e-16,2"));
}

#[test]
fn staircase_jump_is_exact() {
    let (code, out, _) = hyspectra(&["staircase", "--x", "1/3", "--mode", "jump", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exact"], "2/7");
}

#[test]
fn eigvec_n2_interior() {
    let (code, out, _) = hyspectra(&["eigvec", "--n", "2", "--key", "1/2", "--class", "interior", "--ell", "0", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coefficients"]["10"]["sign"], 1);
    assert_eq!(v["coefficients"]["01"]["sign"], -1);
    assert!(v["coefficients"].get("00").is_none());
}

#[test]
fn stationary_n2() {
    let (code, out, _) = hyspectra(&["stationary", "--n", "2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let x: Vec<f64> = v["vector"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().parse().unwrap()).collect();
    for (a, b) in x.iter().zip([1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn dist_csv_shape() {
    let (code, out, _) = hyspectra(&["dist", "--n", "6", "--points", "33", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "# schema: hyspectra.dist.v1");
    assert_eq!(lines[1], "x,F_N,F_limit,diff,flagged");
    assert_eq!(lines.len(), 2 + 33);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--n", "4", "--replications", "50", "--seed", "9", "--format", "csv"];
    let (c1, a, _) = hyspectra(&args);
    let (c2, b, _) = hyspectra(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let (_, c, _) = hyspectra(&["simulate", "--n", "4", "--replications", "50", "--seed", "10", "--format", "csv"]);
    assert_ne!(a, c);
}

#[test]
fn verify_structure_passes() {
    let (code, out, _) = hyspectra(&["verify", "--suite", "structure", "--n-max", "3", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("0 failed"));
}

#[test]
fn usage_errors() {
    let (code, _, err) = hyspectra(&["charpoly", "--bogus"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error[usage]:"));
    let (code, _, _) = hyspectra(&["staircase", "--x", "0.5", "--mode", "jump"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn budget_errors() {
    let (code, _, err) = hyspectra(&["charpoly", "--n", "40"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.starts_with("error[budget]:"), "{err}");
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = hyspectra(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("spectrum"));
}
