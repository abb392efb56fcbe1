use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use biharm::Mesh;

fn biharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharm")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exponent_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["exponent", "--theta-deg", "30,90,160", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "exponent.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "theta_deg,alpha,beta,zero_ratio,extremum_value_ratio");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].contains(" 3.73959"));
    let manifest = read(dir.path(), "manifest.toml");
    assert!(manifest.contains("status = \"ok\""));
    assert!(manifest.contains("exponent.csv"));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = biharm(&["square", "--h1", "0.3", "--rho1", "1e-4", "--seed", "7", "--out", path(d.path())]);
        assert!(matches!(code(&o), 0 | 4), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["eigen.csv", "zeros.csv", "ratios.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (d, t) in [(&a, "1"), (&b, "3")] {
        let o = biharm(&[
            "sector", "--theta-deg", "60,120", "--h1", "0.4,0.3,0.2", "--rho1", "1e-4", "--threads", t, "--out",
            path(d.path()),
        ]);
        assert!(matches!(code(&o), 0 | 4), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read(a.path(), "sectors.csv"), read(b.path(), "sectors.csv"));
    assert_eq!(read(a.path(), "sector_60/eigen.csv"), read(b.path(), "sector_60/eigen.csv"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&biharm(&["converge", "--h1", "0.1", "--out", out])), 2);
    assert_eq!(code(&biharm(&["square", "--h1", "1.5", "--out", out])), 2);
    assert_eq!(code(&biharm(&["dumbbell", "--grid", "7x4", "--out", out])), 2);
    assert_eq!(code(&biharm(&["sector", "--frobnicate"])), 2);
    assert_eq!(code(&biharm(&["mesh", "--domain", "sector", "--variant", "middle"])), 2);
}

#[test]
fn numerical_failure_exits_with_three_and_records_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["square", "--h1", "0.4", "--rho1", "1e-3", "--max-iter", "1", "--out", path(dir.path())]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let err = read(dir.path(), "error.toml");
    assert!(err.contains("exit_code = 3") && err.contains("kind = \"numerical\""), "{err}");
}

#[test]
fn identical_levels_give_zero_differences() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["converge", "--h1", "0.4,0.4,0.4", "--rho1", "1e-3", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "order.csv");
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(4).unwrap(), " 0.00000000000e+000", "{line}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "experiment = \"square\"\nh1 = [0.4]\nrho1 = 1e-2\nseed = 3\n").unwrap();
    let out = dir.path().join("out");
    let o = biharm(&["square", "--config", path(&cfg), "--rho1", "1e-3", "--out", path(&out)]);
    assert!(matches!(code(&o), 0 | 4), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = read(&out, "manifest.toml");
    assert!(manifest.contains("rho1 = 0.001"), "{manifest}");
    assert!(manifest.contains("seed = 3"));
    assert!(manifest.contains("h1 = [0.4]"));

    fs::write(&cfg, "experiment = \"converge\"\n").unwrap();
    assert_eq!(code(&biharm(&["square", "--config", path(&cfg), "--out", path(&out)])), 2);
}

#[test]
fn mesh_subcommand_writes_readable_text() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sector.mesh");
    let o = biharm(&["mesh", "--domain", "sector", "--theta-deg", "60", "--h1", "0.3", "--rho1", "1e-3", "--out", path(&file)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mesh = Mesh::read_text(std::io::BufReader::new(fs::File::open(&file).unwrap())).unwrap();
    mesh.validate().unwrap();

    let o = biharm(&["mesh", "--domain", "dumbbell", "--c", "0.5", "--nx", "8", "--ny", "4"]);
    assert_eq!(code(&o), 0);
    let mesh = Mesh::read_text(o.stdout.as_slice()).unwrap();
    assert!(mesh.n_triangles() > 0);
}

#[test]
fn dumbbell_accepts_lists_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["dumbbell", "--c", "1.0,0.5", "--grid", "12x4,16x6,20x8", "--out", path(dir.path())]);
    assert!(matches!(code(&o), 0 | 4), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path(), "parity.csv").lines().count(), 3);
    assert_eq!(read(dir.path(), "discrepancy.csv").lines().count(), 1 + 2 * 2);
}

#[test]
fn matrices_can_be_dumped() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    let o = biharm(&["square", "--h1", "0.4", "--rho1", "1e-2", "--dump-matrices", path(&dump), "--out", path(dir.path())]);
    assert!(matches!(code(&o), 0 | 4), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> = fs::read_dir(&dump).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.len() >= 4, "{names:?}");
}
