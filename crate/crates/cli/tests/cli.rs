use std::path::Path;
use std::process::{Command, Output};

fn hsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsurf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV (comment lines and the column header dropped) with the
/// column names.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let cols = lines.next().unwrap().split(',').map(String::from).collect();
    (cols, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(cols: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = cols.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_passes() {
    let o = hsurf(&["check"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# hsurf "));
    assert!(text.contains("R1212/L=0.75"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn rotsurf_figure_two() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("fig2");
    let o = hsurf(&["rotsurf", "--figure", "2", "--samples-u", "16", "--samples-v", "40", "--out", stem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let obj = std::fs::read_to_string(dir.path().join("fig2.obj")).unwrap();
    assert!(obj.starts_with("# hsurf ") && obj.contains("config-sha256="));
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 16 * 39);
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 8);
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16 * 40 + 8 * 40);
    let csv = std::fs::read_to_string(dir.path().join("fig2_profile.csv")).unwrap();
    let (cols, rows) = table(&csv);
    assert_eq!(cols, ["t", "r", "dr_dt", "theta", "c", "A"]);
    let (t, r) = (column(&cols, &rows, "t"), column(&cols, &rows, "r"));
    assert!(t[0] > 0.25);
    for (t, r) in t.iter().zip(&r) {
        assert!((r - t.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn profile_column_a_carries_the_curvature() {
    let dir = tempfile::tempdir().unwrap();
    for (fig, k) in [("1", 1.0), ("2", 0.0), ("3", -1.0)] {
        let stem = dir.path().join(format!("f{fig}"));
        let o = hsurf(&["rotsurf", "--figure", fig, "--samples-u", "8", "--samples-v", "400", "--out", stem.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let (cols, rows) = table(&std::fs::read_to_string(dir.path().join(format!("f{fig}_profile.csv"))).unwrap());
        let (t, a) = (column(&cols, &rows, "t"), column(&cols, &rows, "A"));
        let n = t.len();
        for i in n / 10..9 * n / 10 {
            let da = (a[i + 1] - a[i - 1]) / (t[i + 1] - t[i - 1]);
            let got = -da - a[i] * a[i];
            assert!((got - k).abs() < 1e-3, "figure {fig} row {i}: {got}");
        }
    }
}

#[test]
fn rotsurf_domain_violation_cites_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("x");
    let o = hsurf(&["rotsurf", "--kinf", "1", "--r0", "1", "--v-range", "-1", "1.34", "--out", stem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.33247886"));
    assert!(!dir.path().join("x.obj").exists());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for stem in [&a, &b] {
        let o = hsurf(&["rotsurf", "--figure", "3", "--samples-u", "12", "--samples-v", "30", "--out", stem.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for ext in [".obj", "_profile.csv"] {
        let read = |s: &Path| std::fs::read(format!("{}{ext}", s.display())).unwrap();
        assert_eq!(read(&a), read(&b));
    }
    let c1 = stdout(&hsurf(&["curvature", "--preset", "paraboloid", "--nu", "5", "--nv", "5"]));
    let c2 = stdout(&hsurf(&["curvature", "--preset", "paraboloid", "--nu", "5", "--nv", "5"]));
    assert_eq!(c1, c2);
}

#[test]
fn curvature_plane_row() {
    let o = hsurf(&["curvature", "--preset", "plane", "--nu", "3", "--nv", "3", "--l", "1,100"]);
    assert_eq!(o.status.code(), Some(0));
    let (cols, rows) = table(&stdout(&o));
    let row = rows.iter().position(|r| r[0].parse::<f64>().unwrap() == 1.0 && r[1].parse::<f64>().unwrap() == 0.0).unwrap();
    let at = |name: &str| column(&cols, &rows, name)[row];
    assert!((at("K_inf") + 2.0).abs() < 1e-6);
    assert!((at("K_dv") - 4.0).abs() < 1e-5);
    assert!((at("K_L(L=1)") + 0.56).abs() < 1e-6);
    // the origin is characteristic and flagged, not fatal
    assert!(rows.iter().any(|r| r.last().unwrap() == "characteristic"));
}

#[test]
fn curvature_cylinder_is_flat_in_the_limit() {
    let o = hsurf(&["curvature", "--preset", "cylinder", "--nu", "6", "--nv", "4"]);
    let (cols, rows) = table(&stdout(&o));
    assert!(column(&cols, &rows, "K_inf").iter().all(|&k| k == 0.0));
}

#[test]
fn graph_of_zero_matches_the_plane() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"type": "graph", "h": "0*u", "u": [0, 2], "v": [-1, 1]}, "grid": {"nu": 3, "nv": 3}}"#);
    let g = stdout(&hsurf(&["curvature", "--config", &cfg]));
    let p = stdout(&hsurf(&["curvature", "--preset", "plane", "--nu", "3", "--nv", "3"]));
    let (cols, gr) = table(&g);
    let (_, pr) = table(&p);
    for name in ["A", "K_inf", "K_dv"] {
        for (x, y) in column(&cols, &gr, name).iter().zip(column(&cols, &pr, name)) {
            assert!((x - y).abs() < 1e-9 || (x.is_nan() && y.is_nan()));
        }
    }
}

#[test]
fn all_characteristic_grid_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"type": "plane", "u": [0, 1], "v": [0, 1]}, "grid": {"nu": 1, "nv": 1}}"#);
    assert_eq!(hsurf(&["curvature", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(hsurf(&["frames", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn gauss_bonnet_reports() {
    let o = hsurf(&["gauss-bonnet", "--preset", "plane-annulus"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["residual"].as_f64().unwrap().abs() < 1e-8);
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((doc["area_integral"].as_f64().unwrap() + two_pi).abs() < 1e-9);
    assert_eq!(doc["config_sha256"].as_str().unwrap().len(), 64);
    let o = hsurf(&["gauss-bonnet", "--preset", "plane-annulus", "--threshold", "1e-15"]);
    assert_eq!(o.status.code(), Some(3));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["pass"], false);
    let o = hsurf(&["gauss-bonnet", "--preset", "family-negative"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gauss_bonnet_needs_transverse_edges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"surface": {"type": "plane_polar", "radii": [1, 2]}, "region": {"u": [0, 1], "v": [1, 2]}}"#);
    assert_eq!(hsurf(&["gauss-bonnet", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn converge_slopes() {
    let o = hsurf(&["converge", "--preset", "plane", "--point", "1", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (cols, rows) = table(&text);
    assert_eq!(rows.len(), 5);
    let ls = column(&cols, &rows, "L");
    let gap = column(&cols, &rows, "abs_K_L_minus_K_inf");
    let slope = (gap[4] / gap[0]).ln() / (ls[4] / ls[0]).ln();
    assert!((slope + 1.0).abs() < 0.05);
    let footer = text.lines().last().unwrap();
    assert!(footer.starts_with("# slopes "));
    let field = |name: &str| -> String { footer.split_whitespace().find_map(|w| w.strip_prefix(&format!("{name}="))).unwrap().to_string() };
    assert!((field("area_density_L").parse::<f64>().unwrap() - 0.5).abs() < 0.02);
    // A = 0 on the cylinder: the gaps vanish identically
    let text = stdout(&hsurf(&["converge", "--preset", "cylinder", "--point", "0.3", "0"]));
    let (cols, rows) = table(&text);
    assert!(column(&cols, &rows, "abs_K_L_minus_K_inf").iter().all(|&x| x == 0.0));
    assert!(text.contains("abs_K_L_minus_K_inf=zero"));
}

#[test]
fn converge_rejects_unsorted_l() {
    assert_eq!(hsurf(&["converge", "--l", "100,10"]).status.code(), Some(1));
}

#[test]
fn frames_are_adapted() {
    let o = hsurf(&["frames", "--preset", "paraboloid", "--nu", "4", "--nv", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let (cols, rows) = table(&stdout(&o));
    assert!(column(&cols, &rows, "f2_3").iter().all(|&x| x == 0.0));
    assert!(column(&cols, &rows, "f1_3").iter().all(|&x| x == 0.0));
    assert!(column(&cols, &rows, "f3_3").iter().all(|&x| x == 1.0));
    assert!(column(&cols, &rows, "density").iter().all(|&x| x > 0.0));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        r#"{"unknown": 1}"#,
        r#"{"ls": [1, -1]}"#,
        r#"{"surface": {"type": "graph", "h": "u +* v", "u": [0, 1], "v": [0, 1]}}"#,
        r#"{"surface": {"type": "cylinder", "radius": 0, "v": [0, 1]}}"#,
        "not json",
    ] {
        let cfg = write_config(dir.path(), bad);
        assert_eq!(hsurf(&["curvature", "--config", &cfg]).status.code(), Some(1), "{bad}");
    }
    assert_eq!(hsurf(&["rotsurf", "--figure", "2"]).status.code(), Some(1));
    assert_eq!(hsurf(&["rotsurf", "--preset", "plane", "--out", "x"]).status.code(), Some(1));
    assert_eq!(hsurf(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let o = hsurf(&["curvature", "--preset", "cylinder", "--nu", "2", "--nv", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("# hsurf "));
}
