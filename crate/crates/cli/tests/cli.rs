use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gridjunta::io::{read_junta, read_map, read_table};
use gridjunta::{l1_distance, Metric};
use tempfile::TempDir;

fn gridjunta(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridjunta"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GRIDJUNTA_BUDGET")
        .output()
        .expect("run gridjunta")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(out: &Path, args: &[&str]) -> PathBuf {
    let o = gridjunta(out, &[&["gen"], args].concat());
    assert!(o.status.success(), "gen failed: {}", String::from_utf8_lossy(&o.stderr));
    PathBuf::from(stdout(&o).trim())
}

fn csv_record(text: &str) -> Vec<(String, String)> {
    let mut lines = text.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let row: Vec<_> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    header.into_iter().zip(row).collect()
}

fn field<'a>(rec: &'a [(String, String)], key: &str) -> &'a str {
    &rec.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1
}

#[test]
fn gen_writes_table_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["tribes", "--k", "4", "--s", "1", "--t", "1"]);
    let f = read_table(&path).unwrap();
    assert_eq!((f.shape().k, f.shape().n), (4, 4));
    assert_eq!(f.support_size(), 7 * 256 / 16);
    let sidecar: serde_json::Value = serde_json::from_slice(&fs::read(path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(sidecar["generator"], "tribes");
    assert_eq!(sidecar["params"]["s"], 1);
}

#[test]
fn gen_is_byte_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["--seed", "11", "gen", "random", "--k", "4", "--n", "3", "--p", "0.3"];
    let pa = PathBuf::from(stdout(&gridjunta(a.path(), &args)).trim());
    let pb = PathBuf::from(stdout(&gridjunta(b.path(), &args)).trim());
    assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
    assert_eq!(fs::read(pa.with_extension("json")).unwrap(), fs::read(pb.with_extension("json")).unwrap());

    let other = TempDir::new().unwrap();
    let pc = PathBuf::from(stdout(&gridjunta(other.path(), &["--seed", "12", "gen", "random", "--k", "4", "--n", "3", "--p", "0.3"])).trim());
    assert_ne!(fs::read(&pa).unwrap(), fs::read(&pc).unwrap());
}

#[test]
fn boundary_of_half_slab() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["cuboid", "--a", "2", "--s", "1", "--k", "4", "--n", "2"]);
    let o = gridjunta(dir.path(), &["boundary", path.to_str().unwrap()]);
    assert!(o.status.success());
    let rec = csv_record(&stdout(&o));
    assert_eq!(field(&rec, "boundary"), "4");
    assert_eq!(field(&rec, "size"), "8");

    let o = gridjunta(dir.path(), &["boundary", path.to_str().unwrap(), "--mode", "torus", "--direction", "1"]);
    let rec = csv_record(&stdout(&o));
    assert_eq!(field(&rec, "boundary"), "8");
    assert_eq!(field(&rec, "direction"), "1");
}

#[test]
fn influence_lists_bits_and_transfer_bound() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["cuboid", "--a", "2", "--s", "1", "--k", "4", "--n", "2"]);
    let o = gridjunta(dir.path(), &["influence", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    // only the high bit of the first coordinate matters
    assert!(text.contains(",bit2,1,1,1.000000000"), "{text}");
    assert!(text.contains(",total,0,1,"), "{text}");
    assert!(text.contains(",transfer-bound,0,2,"), "{text}");
}

#[test]
fn extract_writes_junta_within_eps() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["tribes", "--k", "4", "--s", "1", "--t", "1"]);
    for (method, mode) in [("main", "grid"), ("refined", "grid"), ("main", "torus")] {
        let o = gridjunta(dir.path(), &["extract", path.to_str().unwrap(), "--eps", "0.1", "--method", method, "--mode", mode]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let rec = csv_record(&stdout(&o));
        assert_eq!(field(&rec, "k"), "4");
        let tag = if mode == "torus" { "torus" } else { method };
        assert_eq!(field(&rec, "method"), tag);
        let g = read_junta(&dir.path().join(format!("tribes-k4-s1-t1-{tag}.gjj"))).unwrap();
        let f = read_table(&path).unwrap();
        let d = l1_distance(&f, &g.to_grid_function().unwrap(), Metric::Absolute).unwrap();
        assert!(d.within(0.1), "{tag}: distance {}", d.value());
        assert_eq!(field(&rec, "junta_size"), g.size().to_string());
        assert!(dir.path().join(format!("tribes-k4-s1-t1-{tag}.csv")).exists());
    }
}

#[test]
fn lipschitz_emits_json_and_rows() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["map-dictator", "--k", "4", "--n", "2", "--l", "3", "--picks", "2,1"]);
    let map = read_map(&path).unwrap();
    assert_eq!(map.m(), 2);
    let o = gridjunta(dir.path(), &["lipschitz", path.to_str().unwrap(), "--delta", "0.3", "--eps", "0.3", "--mode", "grid"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(json["alpha"].is_string());
    assert_eq!(json["selected"], serde_json::json!([1, 2]));
    for i in ["1", "2"] {
        let entry = &json["per_i"][i];
        assert_eq!(entry["J_i"].as_array().unwrap().len(), 1);
        assert!(entry["B_i"].is_string());
        assert!(entry["eps_spent"].is_number());
        assert!(entry["distance"].is_string());
    }
    assert_eq!(json["per_i"]["1"]["J_i"], serde_json::json!([2]));
    let csv_path = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).find(|p| p.to_string_lossy().ends_with("-grid-lipschitz.csv"));
    let csv = fs::read_to_string(csv_path.expect("lipschitz csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("map,mode,coordinate,stage"));
    assert!(csv.lines().any(|l| l.contains(",merge,")));
}

#[test]
fn verify_suite_passes_and_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let o = gridjunta(dir.path(), &["verify", "normrel"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS normrel"));
    for name in ["verify.csv", "failures.csv", "failures.json", "summary.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let failures: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("failures.json")).unwrap()).unwrap();
    assert_eq!(failures.as_array().unwrap().len(), 0);
}

#[test]
fn verify_output_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        assert!(gridjunta(d.path(), &["--workers", "2", "verify", "pipelines"]).status.success());
    }
    for name in ["verify.csv", "extractions.csv", "summary.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        if name == "summary.json" {
            // the output directory is part of the recorded config
            let strip = |v: Vec<u8>| {
                let mut j: serde_json::Value = serde_json::from_slice(&v).unwrap();
                j["config"]["out"] = serde_json::Value::Null;
                j
            };
            assert_eq!(strip(x), strip(y));
        } else {
            assert_eq!(x, y, "{name} differs between runs");
        }
    }
}

#[test]
fn verify_rejects_corrupted_table() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), &["tribes", "--k", "4", "--s", "1", "--t", "1"]);
    let mut bytes = fs::read(&path).unwrap();
    // flip one membership value in the payload, keeping the file decodable
    let last = bytes.len() - 2;
    bytes[last] ^= 1;
    fs::write(&path, &bytes).unwrap();

    let out = dir.path().join("v");
    let o = gridjunta(&out, &["verify", "all", "--input", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let text = stdout(&o);
    assert!(text.contains("FAIL inputs"), "{text}");
    assert!(text.contains("input:tribes-k4-s1-t1.gjt"), "{text}");

    let failures = fs::read_to_string(out.join("failures.csv")).unwrap();
    let row = failures.lines().nth(1).expect("a failure row");
    assert!(row.contains("input:tribes-k4-s1-t1.gjt,sidecar-replay"), "{row}");
    let embedded = hex::decode(row.rsplit(',').next().unwrap()).unwrap();
    assert_eq!(embedded, bytes);
    let artifacts: Vec<_> = fs::read_dir(out.join("failures")).unwrap().collect();
    assert!(!artifacts.is_empty());
}

#[test]
fn verify_unknown_suite_is_an_error() {
    let dir = TempDir::new().unwrap();
    let o = gridjunta(dir.path(), &["verify", "nonsense"]);
    assert!(!o.status.success());
}

#[test]
fn budget_env_limits_materialisation() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gridjunta"))
        .arg("--out")
        .arg(dir.path())
        .args(["gen", "parity", "--k", "4", "--n", "6"])
        .env("GRIDJUNTA_BUDGET", "100")
        .output()
        .unwrap();
    assert!(!o.status.success());
    let o = gridjunta(dir.path(), &["--budget", "100000", "gen", "parity", "--k", "4", "--n", "6"]);
    assert!(o.status.success());
}

#[test]
fn config_file_and_set_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 5\nlipschitz_maps = 2\n").unwrap();
    let out = dir.path().join("o");
    let o = gridjunta(&out, &["--config", cfg.to_str().unwrap(), "--set", "tree_seeds=2", "verify", "lipschitz"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], 5);
    assert_eq!(summary["config"]["lipschitz_maps"], 2);
    assert_eq!(summary["config"]["tree_seeds"], 2);

    fs::write(&cfg, "[section]\nseed = 5\n").unwrap();
    assert!(!gridjunta(&out, &["--config", cfg.to_str().unwrap(), "verify", "normrel"]).status.success());
}
