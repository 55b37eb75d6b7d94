use airy_core::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["airy"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn simulate_warns_near_quarter_pi() {
    let (code, out, err) = call(&[
        "simulate", "--alpha0", "0", "--gamma0", "1", "--zeta0", "1", "--t-end", "0.7",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("blow-up at t = 0.785398163"), "{err}");
    let header = out.lines().next().unwrap();
    assert!(header.starts_with("t,alpha,gamma,zeta,omega,beta,K0,K1,K2,alpha_cf"));
    let rows = csv_rows(&out);
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 0.7);
    let dev: f64 = last.last().unwrap().parse().unwrap();
    assert!(dev < 1e-8, "{dev}");
}

#[test]
fn empty_horizon_gives_one_row() {
    let (code, out, _) = call(&["simulate", "--t-end", "0"]);
    assert_eq!(code, 0);
    assert_eq!(csv_rows(&out).len(), 1);
}

#[test]
fn linear_simulation_matches_closed_form() {
    let (code, out, _) = call(&[
        "simulate", "--linear", "--alpha0", "0.3", "--zeta0", "1", "--omega0", "0.2", "--beta0", "-0.5", "--t-end",
        "2", "--tol", "1e-12",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t,alpha,zeta,omega,beta,Hl1,Hl2,Hl3,alpha_cf"));
    for r in csv_rows(&out) {
        assert!(r.last().unwrap().parse::<f64>().unwrap() < 1e-8);
    }
}

#[test]
fn invalid_input_is_a_usage_error() {
    assert_eq!(call(&["simulate", "--alpha0", "nan"]).0, 2);
    assert_eq!(call(&["simulate", "--t-end", "-1"]).0, 2);
    assert_eq!(call(&["simulate", "--linear", "--gamma0", "1"]).0, 2);
    assert_eq!(call(&["nonsense"]).0, 2);
    assert_eq!(call(&["verify", "--format", "xml"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = call(&["verify", "--points", "30", "--seed", "9"]);
    let b = call(&["verify", "--points", "30", "--seed", "9"]);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a.1, b.1);
    let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    assert!(v["checks"][0]["tolerance"].is_number());
}

#[test]
fn wrong_f_fails_only_jacobi_entries() {
    let (code, out, _) = call(&["verify", "--points", "30", "--inject-wrong-f"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mut failed = 0;
    for c in v["checks"].as_array().unwrap() {
        let name = c["name"].as_str().unwrap();
        if name.contains("dK") {
            assert_eq!(c["passed"], true, "{name}");
        }
        if c["passed"] == false {
            failed += 1;
            assert!(name.starts_with("jacobi P_f"), "{name}");
            assert!(!c["failing_points"].as_array().unwrap().is_empty());
        }
    }
    assert!(failed > 0);
}

#[test]
fn zero_points_is_a_vacuous_pass() {
    let (code, _, err) = call(&["verify", "--points", "0"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("traj.csv");
    std::fs::write(&cfg, r#"{"gamma0": 1.0, "zeta0": 1.0, "t_end": 0.5, "format": "json"}"#).unwrap();
    let (code, stdout, _) = call(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--t-end",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.last().unwrap()["t"], 0.1);
    assert_eq!(rows[0]["gamma"], 1.0);

    std::fs::write(&cfg, r#"{"gamma": 1.0}"#).unwrap();
    assert_eq!(call(&["simulate", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn closed_form_table() {
    let (code, out, _) = call(&["closed-form", "--t-end", "0.5", "--dt", "0.1"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    // K₀ stays at its initial value 4 for (0, −1, 1, 0, 0).
    for r in &rows {
        assert!((r[6].parse::<f64>().unwrap() - 4.0).abs() < 1e-12);
    }
    // Rows stop at the blow-up time.
    let (_, out, err) = call(&["closed-form", "--gamma0", "1", "--t-end", "1", "--dt", "0.1"]);
    assert_eq!(csv_rows(&out).len(), 8);
    assert!(err.contains("inside the horizon"));
}

#[test]
fn pde_compare_errors_decrease() {
    let (code, out, _) = call(&["pde-compare", "--cells", "100,200,400"]);
    assert_eq!(code, 0);
    let linf: Vec<f64> = csv_rows(&out).iter().map(|r| r[7].parse().unwrap()).collect();
    assert_eq!(linf.len(), 3);
    assert!(linf[0] > linf[1] && linf[1] > linf[2], "{linf:?}");
}

#[test]
fn series_first_order_reproduces_parabola() {
    let (code, out, err) = call(&["series", "--order", "1", "--t-end", "0.8", "--tol", "1e-12"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t,eta0,eta1,u0,u1\n"));
    let dev: f64 = err.rsplit(": ").next().unwrap().trim().parse().unwrap();
    assert!(dev <= 1e-9, "{dev}");
    assert_eq!(call(&["series", "--omega0", "0.3"]).0, 2);
}

#[test]
fn rarefaction_report() {
    let (code, out, _) = call(&["rarefaction", "--points", "200"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["checks"][0]["max_residual"].as_f64().unwrap() <= 1e-14);
}
