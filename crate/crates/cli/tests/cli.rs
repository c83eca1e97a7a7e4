//! End-to-end tests of the command-line interface: flag handling, exit
//! codes, output formats, manifests, and determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bicgrate"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bicgrate-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn thresholds_at_normal_incidence() {
    let out = bin()
        .args(["thresholds", "--kx", "0", "--nmax", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let pi = std::f64::consts::PI;
    let want = [0.0, 4.0 * pi * pi, 4.0 * pi * pi, 16.0 * pi * pi, 16.0 * pi * pi];
    assert_eq!(values.len(), want.len());
    for (v, w) in values.iter().zip(&want) {
        assert!((v - w).abs() < 1e-10 * (1.0 + w));
    }
}

#[test]
fn thresholds_include_first_order_value() {
    let out = bin()
        .args(["thresholds", "--kx", "0.6283185307179586", "--nmax", "1"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let e_m1: f64 = text
        .lines()
        .find(|l| l.starts_with("E-1"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let want = (9.0 * std::f64::consts::PI / 5.0).powi(2);
    assert!((e_m1 - want).abs() < 1e-9);
}

#[test]
fn bound_search_below_always_has_k_plus() {
    let out = bin()
        .args([
            "bound-search", "--region", "below", "--a", "0.3", "--kx", "1.0", "--R", "0.1",
            "--eps", "1.5", "--h", "2.0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = v["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert_eq!(records[0]["family"], "Plus");
    let k = records[0]["k"].as_f64().unwrap();
    assert!(k > 0.0 && k < 1.0);
}

#[test]
fn bound_search_c1_writes_records_and_manifest() {
    let dir = tmpdir("c1");
    let out_path = dir.join("records.json");
    let out = bin()
        .args([
            "bound-search", "--region", "c1", "--a", "0", "--kx", "0", "--R", "0.1", "--eps",
            "1.5", "--nmax", "4", "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(&out_path)).unwrap();
    let records = v["records"].as_array().unwrap();
    // n = 2 is genuinely absent at kx = 0 for this radius
    let ns: Vec<u64> = records
        .iter()
        .map(|r| r["indices"][0].as_u64().unwrap())
        .collect();
    assert_eq!(ns, vec![1, 3, 4]);
    for r in records {
        let n = r["indices"][0].as_u64().unwrap() as f64;
        let h = r["h"].as_f64().unwrap();
        assert!((h - 0.25122 * n).abs() / (0.25122 * n) < 1e-2);
    }
    // manifest sidecar references the same run
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.join("records.json.manifest.json"))).unwrap();
    assert_eq!(manifest["schema"], "v1");
    assert!(manifest["input_hash"].as_str().unwrap().len() == 64);
    assert_eq!(manifest["config"]["radius"], 0.1);
}

#[test]
fn bound_search_gate_failure_exit_code() {
    // fat, strong cylinders near the zone edge: the continuum-I gate fails
    let out = bin()
        .args([
            "bound-search", "--region", "c1", "--a", "0", "--kx", "3.1", "--R", "0.26", "--eps",
            "12.0", "--nmax", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bound_search_c2_includes_3_4_at_half_shift() {
    let out = bin()
        .args([
            "bound-search", "--region", "c2", "--a", "0.5", "--R", "0.1", "--eps", "1.5",
            "--nmax", "3", "--lmax", "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rec = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["indices"][0] == 3 && r["indices"][1] == 4)
        .expect("(3,4) record");
    let kx = rec["kx"].as_f64().unwrap();
    assert!((kx - 1.2483).abs() / 1.2483 < 0.02, "kx = {kx}");
}

#[test]
fn scatter_sweep_flux_and_determinism() {
    let dir = tmpdir("sweep");
    let (p1, p2) = (dir.join("a.csv"), dir.join("b.csv"));
    for p in [&p1, &p2] {
        let out = bin()
            .args([
                "scatter-sweep", "--a", "0", "--kx", "0.6283185307179586", "--R", "0.1", "--eps",
                "1.5", "--h-range", "0.2:0.4", "--k-range", "3.0:5.0", "--grid", "6x6", "--out",
            ])
            .arg(p)
            .env("BICGRATE_THREADS", "2")
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    // identical flags give byte-identical CSV
    assert_eq!(read(&p1), read(&p2));
    let text = read(&p1);
    assert!(text.starts_with("h,k,r0_squared,flux_error\n"));
    assert_eq!(text.lines().count(), 1 + 36);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[2] == "NaN" {
            continue;
        }
        let r0: f64 = cols[2].parse().unwrap();
        let fe: f64 = cols[3].parse().unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&r0));
        assert!(fe < 1e-10, "flux error {fe}");
    }
}

#[test]
fn scatter_sweep_shows_resonant_strips_with_gap_at_bic() {
    // Near the n=1 bound state at kx = π/5 (h₁ ≈ 0.2805, k₁ ≈ 5.6348): the
    // rows away from h₁ carry a bright |R₀|² strip, while at h ≈ h₁ the
    // resonance width has collapsed and the strip disappears from the grid.
    let out = bin()
        .args([
            "scatter-sweep", "--a", "0", "--kx", "0.6283185307179586", "--R", "0.1", "--eps",
            "1.5", "--h-range", "0.26:0.30", "--k-range", "5.60:5.64", "--grid", "3x401",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut max_by_h: std::collections::BTreeMap<u64, f64> = Default::default();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[2] == "NaN" {
            continue;
        }
        let h: f64 = cols[0].parse().unwrap();
        let r0: f64 = cols[2].parse().unwrap();
        let key = (h * 1e6).round() as u64;
        let e = max_by_h.entry(key).or_insert(0.0);
        *e = e.max(r0);
    }
    let maxima: Vec<f64> = max_by_h.values().copied().collect();
    assert_eq!(maxima.len(), 3);
    assert!(maxima[0] > 0.8, "lower strip missing: {maxima:?}");
    assert!(maxima[2] > 0.8, "upper strip missing: {maxima:?}");
    assert!(
        maxima[1] < 0.1,
        "no gap at the bound state: {maxima:?}"
    );
}

#[test]
fn scatter_sweep_singular_only_exit_code() {
    // a 1×1 grid placed exactly on the n=1 bound state: every cell singular
    let out = bin()
        .args([
            "scatter-sweep", "--a", "0", "--kx", "0", "--R", "0.1", "--eps", "1.5", "--h-range",
            "0.2531037096824318:0.2531037096824318", "--k-range",
            "6.20613711575294:6.20613711575294", "--grid", "1x1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn field_map_from_record_file() {
    let dir = tmpdir("field");
    let records = dir.join("records.json");
    let status = bin()
        .args([
            "bound-search", "--region", "c1", "--a", "0", "--kx", "0", "--R", "0.1", "--eps",
            "1.5", "--nmax", "1", "--out",
        ])
        .arg(&records)
        .status()
        .unwrap();
    assert!(status.success());
    let map = dir.join("field.csv");
    let out = bin()
        .args([
            "field-map", "--record-file",
        ])
        .arg(&records)
        .args([
            "--a", "0", "--kx", "0", "--R", "0.1", "--eps", "1.5", "--x-range", "0:2",
            "--z-range=-1:1", "--nx", "33", "--nz", "17", "--out",
        ])
        .arg(&map)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = read(&map);
    assert!(text.starts_with("x,z,re,im,abs\n"));
    assert_eq!(text.lines().count(), 1 + 33 * 17);
    // inside-scatterer sentinels present (grid crosses the cylinders)
    let nan_rows = text.lines().filter(|l| l.ends_with("NaN,NaN,NaN")).count();
    assert!(nan_rows > 0);
    // sidecar carries the Bloch residual for this 2-period grid
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.join("field.csv.manifest.json"))).unwrap();
    let bloch = manifest["provenance"]["bloch_residual"].as_f64().unwrap();
    assert!(bloch < 1e-9, "bloch residual {bloch}");
    assert_eq!(
        manifest["provenance"]["inside_scatterer_samples"].as_u64().unwrap(),
        nan_rows as u64
    );
}

#[test]
fn diophantine_includes_known_tuples_and_excludes_degenerate() {
    let out = bin()
        .args(["diophantine", "--channels", "3", "--bound", "3", "--R", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("3+2+1,")));
    assert!(text.lines().any(|l| l.starts_with("3+1+1,")));
    // consistent triples carry a finite curve constant and an eps_c at R
    let row311: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("3+1+1,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(row311[5], "true");
    assert!(row311[7] != "NaN");
    assert!(row311[9] != "NaN");
    // (3,2,1) is enumerated but has no consistent phase pattern
    let row321: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("3+2+1,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(row321[5], "false");
    assert_eq!(row321[7], "NaN");

    let out4 = bin()
        .args(["diophantine", "--channels", "4", "--bound", "2"])
        .output()
        .unwrap();
    let text4 = String::from_utf8(out4.stdout).unwrap();
    assert!(text4.lines().any(|l| l.starts_with("2+2+1+1,")));
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().args(["bound-search", "--region", "nowhere"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["scatter-sweep", "--kx", "1", "--h-range", "bad"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
