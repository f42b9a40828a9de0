use std::path::Path;
use std::process::{Command, Output};

use rotorfsi::harness;
use rotorfsi::io::config::{presets, to_toml};
use rotorfsi::io::probe::{sample_tip, tip_node, CSV_HEADER, PROGRESS_HEADER};
use rotorfsi::io::vtk::VtkSnapshot;
use rotorfsi::io::{load_config, read_checkpoint, RunConfig};
use rotorfsi::linsolve::mmio::read_matrix_market;
use rotorfsi::mesh::Subdomain;
use rotorfsi::rotation::rotational_displacement_at;

fn structure_only() -> RunConfig {
    let mut cfg = load_config(presets::TABLE1).unwrap();
    cfg.with_fluid = false;
    cfg
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotorfsi")).args(args).output().unwrap()
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, to_toml(cfg)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn snapshots_follow_the_output_cadence() {
    let cfg = structure_only();
    assert_eq!((cfg.loop_cfg.dt, cfg.loop_cfg.t_end, cfg.output.vtk_interval), (0.01, 1.0, 0.1));
    let dir = tempfile::tempdir().unwrap();
    let out = harness::run(&cfg, dir.path(), None, None).unwrap();
    assert_eq!(out.reports.len(), 100);
    assert_eq!(out.vtk_files.len(), 11);
    for (k, f) in out.vtk_files.iter().enumerate() {
        assert_eq!(f.file_name().unwrap().to_str().unwrap(), format!("snapshot_{:05}.vtk", 10 * k));
    }
    let last = VtkSnapshot::read(out.vtk_files.last().unwrap()).unwrap();
    let mesh = harness::build_mesh(&cfg).unwrap();
    let mut moved = mesh.clone();
    moved.current = read_checkpoint(&dir.path().join("checkpoint.rfsi")).unwrap().current;
    assert_eq!(last, VtkSnapshot::from_state(&moved, &out.final_state));
}

#[test]
fn run_writes_probe_log_and_checkpoint() {
    let cfg = structure_only();
    let dir = tempfile::tempdir().unwrap();
    let out = harness::run(&cfg, dir.path(), Some(5), None).unwrap();

    let csv = std::fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 6);
    assert!(lines[1].split(',').count() == 5);

    let log = std::fs::read_to_string(dir.path().join("progress.log")).unwrap();
    let mut log_lines = log.lines();
    assert!(log_lines.next().unwrap().starts_with("# dt 0.01 relax 0.7"));
    assert_eq!(log_lines.next().unwrap(), PROGRESS_HEADER);
    assert_eq!(log_lines.count(), 5);

    let cp = read_checkpoint(&dir.path().join("checkpoint.rfsi")).unwrap();
    assert_eq!(cp.state, out.final_state);
    assert_eq!(cp.state.step, 5);
}

#[test]
fn matrices_are_dumped_on_request() {
    let mut cfg = load_config(presets::TABLE1).unwrap();
    cfg.output.dump_matrices = true;
    cfg.output.vtk_interval = 0.0;
    let dir = tempfile::tempdir().unwrap();
    let out = harness::run(&cfg, dir.path(), Some(0), None).unwrap();
    assert!(out.vtk_files.is_empty());
    let a = read_matrix_market(&dir.path().join("A.mtx")).unwrap();
    let b = read_matrix_market(&dir.path().join("B.mtx")).unwrap();
    let c = read_matrix_market(&dir.path().join("C.mtx")).unwrap();
    assert_eq!(a.nrows(), a.ncols());
    assert_eq!(b.ncols(), a.nrows());
    assert_eq!((c.nrows(), c.ncols()), (b.nrows(), b.nrows()));
}

#[test]
fn rigid_motion_leaves_the_probe_at_zero() {
    let cfg = load_config(presets::TABLE1).unwrap();
    let mesh = harness::build_mesh(&cfg).unwrap();
    let spec = cfg.rotation_spec();
    let tip = tip_node(&mesh, 0.5 * cfg.geometry.cross_width).unwrap();
    let structure = mesh.node_mask(Subdomain::Structure);
    for k in 0..=700 {
        let t = 0.01 * k as f64;
        let theta = spec.theta(t);
        let u: Vec<_> = (0..mesh.num_nodes())
            .map(|v| if structure[v] { rotational_displacement_at(mesh.reference[v], mesh.center, theta) } else { [0.0; 2] })
            .collect();
        assert!(sample_tip(&mesh, &u, tip, theta, t).magnitude() <= 1e-12, "t = {t}");
    }
}

#[test]
fn sweep_runs_every_modulus() {
    let mut cfg = load_config(presets::SWEEP).unwrap();
    assert_eq!(cfg.sweep_e.len(), 6);
    cfg.with_fluid = false;
    cfg.sweep_e = vec![2.5e5, 2.5e7];
    let dir = tempfile::tempdir().unwrap();
    let out = harness::sweep(&cfg, dir.path(), Some(3)).unwrap();
    assert_eq!(out.failures(), 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert!(dir.path().join("E_2.5e5").join("probe.csv").exists());
}

#[test]
fn unknown_subcommand_exits_with_usage() {
    let out = cli(&["spin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_exits_cleanly() {
    let out = cli(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["run", "sweep", "mesh-only", "check"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(sub));
    }
}

#[test]
fn configuration_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert_eq!(cli(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cli(&["run"]).status.code(), Some(2));

    let mut cfg = load_config(presets::TABLE1).unwrap();
    cfg.materials.nu = 0.5;
    let path = write_config(dir.path(), &cfg);
    let out = cli(&["run", "--config", &path, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("materials.nu"));

    let garbled = dir.path().join("garbled.cfg");
    std::fs::write(&garbled, "[loop]\ndt = = 1\n").unwrap();
    let out = cli(&["mesh-only", "--config", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn mesh_only_and_short_run_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &load_config(presets::TABLE1).unwrap());
    let mesh_dir = dir.path().join("mesh");
    let out = cli(&["mesh-only", "--config", &path, "--out", mesh_dir.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("conformity defects 0"));
    assert!(mesh_dir.join("mesh.vtk").exists() && mesh_dir.join("mesh_quality.txt").exists());

    let run_dir = dir.path().join("run");
    let out = cli(&["run", "--config", &path, "--out", run_dir.to_str().unwrap(), "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["progress.log", "probe.csv", "checkpoint.rfsi", "snapshot_00000.vtk"] {
        assert!(run_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn runtime_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load_config(presets::TABLE1).unwrap();
    // a single sweep cannot settle the interface
    cfg.loop_cfg.max_sweeps = 1;
    let path = write_config(dir.path(), &cfg);
    let out = cli(&["run", "--config", &path, "--out", dir.path().join("o").to_str().unwrap(), "--steps", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
