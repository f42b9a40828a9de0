//! Run drivers behind the command-line tool: a single run with all of its
//! output files, the stiffness sweep, and mesh generation alone.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::assembly::{ActiveParts, StepParams};
use crate::error::{Error, IoError, StepError};
use crate::io::checkpoint::{write_checkpoint, Checkpoint};
use crate::io::probe::{progress_line, sample_tip, tip_node, ProbeSeries, CSV_HEADER, PROGRESS_HEADER};
use crate::io::vtk::{snapshot_steps, VtkSnapshot};
use crate::io::RunConfig;
use crate::linsolve::mmio::write_matrix_market;
use crate::mesh::{boundary_loop_count, build_rotor_channel_mesh_with, euler_characteristic, validate_conformity, Mesh, Subdomain};
use crate::timeloop::{Simulation, State, StepReport};

pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh, Error> {
    Ok(build_rotor_channel_mesh_with(&cfg.geometry, &cfg.mesh_options())?)
}

/// Simulation for `cfg` on `mesh`, optionally with a different Young's
/// modulus.
pub fn simulation(cfg: &RunConfig, mesh: Mesh, e: Option<f64>) -> Result<Simulation, Error> {
    let mut material = cfg.materials;
    if let Some(e) = e {
        material.e = e;
    }
    let mut params = StepParams::new(material, cfg.loop_cfg.dt);
    params.disc = cfg.discretization;
    params.linearization = cfg.linearization;
    let parts = if cfg.with_fluid { ActiveParts::ALL } else { ActiveParts::STRUCTURE };
    Ok(Simulation::new(mesh, cfg.rotation_spec(), params, cfg.loop_cfg, cfg.solver, cfg.inflow(), parts)?)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub probe: ProbeSeries,
    pub reports: Vec<StepReport>,
    pub final_state: State,
    pub vtk_files: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|e| IoError::io(path, e))
}

fn put(w: &mut impl Write, path: &Path, text: &str) -> Result<(), IoError> {
    w.write_all(text.as_bytes()).map_err(|e| IoError::io(path, e))
}

/// Run `cfg` for `steps` steps (default: up to `t_end`) with the given
/// Young's modulus, writing into `out`:
/// `progress.log`, `probe.csv`, `snapshot_NNNNN.vtk`, `checkpoint.rfsi`
/// and, when requested, the first step's matrices.
pub fn run(cfg: &RunConfig, out: &Path, steps: Option<usize>, e: Option<f64>) -> Result<RunOutcome, Error> {
    std::fs::create_dir_all(out).map_err(|err| IoError::io(out, err))?;
    let mesh = build_mesh(cfg)?;
    let mut sim = simulation(cfg, mesh, e)?;
    let n_steps = steps.unwrap_or_else(|| cfg.loop_cfg.num_steps());
    let half_width = 0.5 * cfg.geometry.cross_width;
    let tip = tip_node(&sim.mesh, half_width).ok_or_else(|| StepError::Mesh(crate::error::MeshError::InvalidGeometry("no structure node on the +x arm".into())))?;
    let mut probe = ProbeSeries {
        node: tip,
        e: sim.params.material.e,
        samples: Vec::new(),
    };
    let due = snapshot_steps(cfg.loop_cfg.dt, cfg.loop_cfg.dt * n_steps as f64, cfg.output.vtk_interval);
    let mut vtk_files = Vec::new();
    let snapshot = |sim: &Simulation, st: &State, files: &mut Vec<PathBuf>| -> Result<(), IoError> {
        if due.binary_search(&st.step).is_ok() {
            let path = out.join(format!("snapshot_{:05}.vtk", st.step));
            VtkSnapshot::from_state(&sim.mesh, st).write(&path)?;
            files.push(path);
        }
        Ok(())
    };

    let log_path = out.join("progress.log");
    let mut log = create(&log_path)?;
    let lc = &cfg.loop_cfg;
    let header = format!(
        "# dt {:?} relax {:?} fp_tol {:?} (relative max-norm change of the interface displacement) newton_tol {:?} linearization {:?}\n{PROGRESS_HEADER}\n",
        lc.dt, lc.relax, lc.fp_tol, lc.newton_tol, cfg.linearization
    );
    put(&mut log, &log_path, &header)?;
    let mut state = sim.initial_state()?;
    snapshot(&sim, &state, &mut vtk_files)?;
    if cfg.output.dump_matrices {
        let (_, sys) = sim.linear_system(&state)?;
        for (name, m) in [("A", &sys.a), ("B", &sys.b), ("C", &sys.c)] {
            write_matrix_market(m, &out.join(format!("{name}.mtx")))?;
        }
    }
    let mut reports = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let (next, report) = sim.advance(&state)?;
        state = next;
        probe.push(sample_tip(&sim.mesh, &state.u_s, tip, sim.rotation.theta(state.t), state.t));
        put(&mut log, &log_path, &format!("{}\n", progress_line(&report)))?;
        snapshot(&sim, &state, &mut vtk_files)?;
        reports.push(report);
    }
    log.flush().map_err(|err| IoError::io(&log_path, err))?;

    let csv_path = out.join("probe.csv");
    std::fs::write(&csv_path, format!("{CSV_HEADER}\n{}", probe.csv_rows())).map_err(|err| IoError::io(&csv_path, err))?;
    write_checkpoint(
        &Checkpoint {
            state: state.clone(),
            current: sim.mesh.current.clone(),
        },
        &out.join("checkpoint.rfsi"),
    )?;
    Ok(RunOutcome {
        probe,
        reports,
        final_state: state,
        vtk_files,
    })
}

#[derive(Debug)]
pub struct SweepOutcome {
    /// One entry per modulus, in the configured order.
    pub runs: Vec<(f64, Result<ProbeSeries, Error>)>,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|(_, r)| r.is_err()).count()
    }
}

/// One run per entry of `cfg.sweep_e` on the same mesh and time grid; each
/// run writes into `out/E_<value>/`, and `out/sweep.csv` collects all
/// probe rows. A failed run is recorded and the sweep moves on.
pub fn sweep(cfg: &RunConfig, out: &Path, steps: Option<usize>) -> Result<SweepOutcome, Error> {
    std::fs::create_dir_all(out).map_err(|err| IoError::io(out, err))?;
    let mut runs = Vec::new();
    let mut csv = format!("{CSV_HEADER}\n");
    for &e in &cfg.sweep_e {
        let dir = out.join(format!("E_{e:e}"));
        let result = run(cfg, &dir, steps, Some(e)).map(|o| o.probe);
        if let Ok(p) = &result {
            csv += &p.csv_rows();
        }
        runs.push((e, result));
    }
    let path = out.join("sweep.csv");
    std::fs::write(&path, csv).map_err(|err| IoError::io(&path, err))?;
    Ok(SweepOutcome { runs })
}

pub fn quality_report(mesh: &Mesh) -> String {
    let mut s = String::new();
    let q = mesh.quality();
    s += &format!("nodes {}\ntriangles {}\n", mesh.num_nodes(), mesh.num_triangles());
    s += &format!("ring nodes {}\n", mesh.ring_size());
    s += &format!("euler characteristic {}\nboundary loops {}\n", euler_characteristic(mesh), boundary_loop_count(mesh));
    s += &format!("min angle {:.6}\nmax angle {:.6}\narea ratio {:.6e}\nmax aspect {:.6}\ninverted {}\n", q.min_angle_deg, q.max_angle_deg, q.area_ratio, q.max_aspect_ratio, q.inverted);
    for sub in [Subdomain::Structure, Subdomain::RotFluid, Subdomain::StatFluid] {
        let q = mesh.quality_of(Some(sub));
        s += &format!("min angle {:?} {:.6}\n", sub, q.min_angle_deg);
    }
    let defects = validate_conformity(mesh);
    s += &format!("conformity defects {}\n", defects.len());
    for d in defects.iter().take(20) {
        s += &format!("  {d}\n");
    }
    s
}

/// Write `mesh.vtk` and `mesh_quality.txt` into `out`; returns the report.
pub fn mesh_only(cfg: &RunConfig, out: &Path) -> Result<String, Error> {
    std::fs::create_dir_all(out).map_err(|err| IoError::io(out, err))?;
    let mesh = build_mesh(cfg)?;
    let n = mesh.num_nodes();
    let rest = State {
        step: 0,
        t: 0.0,
        v_f: vec![[0.0; 2]; n],
        v_s: vec![[0.0; 2]; n],
        p: vec![0.0; n],
        u_s: vec![[0.0; 2]; n],
        ale: crate::ale::AleState::rest(&mesh),
    };
    VtkSnapshot::from_state(&mesh, &rest).write(&out.join("mesh.vtk"))?;
    let report = quality_report(&mesh);
    let path = out.join("mesh_quality.txt");
    std::fs::write(&path, &report).map_err(|err| IoError::io(&path, err))?;
    Ok(report)
}
