//! Headless property and consistency suite: exactness of the rotation
//! treatment, sliding-mesh conformity, convergence order, solver agreement
//! and reproducibility. Each study returns raw numbers; [`run_suite`]
//! turns them into pass/fail lines.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::ale::{apply_matching, commit, match_sliding_interface, AleMotion, AleState};
use crate::assembly::stvk::linearization_errors;
use crate::assembly::{assemble, structure_stiffness, ActiveParts, ConflictPolicy, Constraint, ConstraintKind, DofMap, FluidInputs, MaterialParams, StepParams, StructureInputs};
use crate::error::{Error, SolveError};
use crate::harness;
use crate::io::RunConfig;
use crate::linsolve::{solve_saddle, SaddleSolverConfig, SolverKind};
use crate::mesh::{p1_gradients, unit_square_mesh, validate_conformity, BoundaryTag, Mesh, Subdomain};
use crate::rotation::{rotation_matrix, mat_vec, rotational_displacement_at, Mat2, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn result(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn max_length(v: &[Vec2]) -> f64 {
    v.iter().map(|x| x[0].hypot(x[1])).fold(0.0, f64::max)
}

/// Stationary structure solve with the rotated axis prescribed. Returns
/// the relative nodal error against the rigid rotation and the runtime.
pub fn static_rotation(mesh: &Mesh, theta: f64, material: &MaterialParams, solver: &SaddleSolverConfig) -> Result<(f64, Duration), Error> {
    let start = Instant::now();
    let c = mesh.center;
    let cons: Vec<Constraint> = mesh
        .tagged_nodes(BoundaryTag::AxisGammaIn)
        .into_iter()
        .map(|node| Constraint {
            node,
            value: rotational_displacement_at(mesh.reference[node], c, theta),
            kind: ConstraintKind::Axis,
        })
        .collect();
    let dofs = DofMap::build(mesh, ActiveParts::STRUCTURE, &cons, ConflictPolicy::Strict, None)?;
    let mut params = StepParams::new(*material, 1.0);
    params.transient = false;
    let zero = vec![[0.0; 2]; mesh.num_nodes()];
    let inp = StructureInputs {
        v_prev: &zero,
        u_prev: &zero,
        theta,
    };
    let sys = assemble(mesh, &dofs, &params, None, Some(&inp))?;
    let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, solver)?;
    let u = dofs.scatter_velocity(&sol.v);
    let structure = mesh.node_mask(Subdomain::Structure);
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for v in 0..mesh.num_nodes() {
        if structure[v] {
            let exact = rotational_displacement_at(mesh.reference[v], c, theta);
            err = err.max((u[v][0] - exact[0]).abs()).max((u[v][1] - exact[1]).abs());
            scale = scale.max(exact[0].abs()).max(exact[1].abs());
        }
    }
    Ok((err / scale, start.elapsed()))
}

/// Largest entrywise difference, relative to the largest entry, between the
/// rotation-aware stiffness on the reference mesh and plain elasticity on
/// the mesh rotated about the center.
pub fn frame_equivalence(mesh: &Mesh, theta: f64, material: &MaterialParams) -> f64 {
    let r = rotation_matrix(theta);
    let c = mesh.center;
    let rotated: Vec<Vec2> = mesh
        .reference
        .iter()
        .map(|x| {
            let d = mat_vec(&r, [x[0] - c[0], x[1] - c[1]]);
            [c[0] + d[0], c[1] + d[1]]
        })
        .collect();
    let k_rot = structure_stiffness(mesh, &mesh.reference, theta, material);
    let k_plain = structure_stiffness(mesh, &rotated, 0.0, material);
    k_rot.add_scaled(-1.0, &k_plain).max_abs() / k_rot.max_abs()
}

/// Random 2×2 matrix of Frobenius norm `norm`.
pub fn random_gradient(rng: &mut StdRng, norm: f64) -> Mat2 {
    let mut h = [[0.0; 2]; 2];
    for row in h.iter_mut() {
        for x in row.iter_mut() {
            *x = rng.random_range(-1.0..1.0);
        }
    }
    let n = h.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    h.map(|row| row.map(|x| x * norm / n))
}

/// Halving ratios `e(H) / e(H/2)` of the linearized Piola stress for
/// `count` random gradients of norm `norm` and random frame angles.
pub fn linearization_ratios(seed: u64, count: usize, norm: f64, material: &MaterialParams) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let h = random_gradient(&mut rng, norm);
            let theta = rng.random_range(0.0..2.0 * PI);
            let (e1, e2) = linearization_errors(&h, theta, material.lambda_s(), material.mu_s());
            e1 / e2
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionReport {
    pub steps: usize,
    /// Steps at which the conformity check found defects.
    pub nonconforming_steps: Vec<usize>,
    pub min_angle_initial: f64,
    pub min_angle_lowest: f64,
    /// Largest `|min angle(t) − min angle(0)|` in degrees.
    pub max_angle_deviation: f64,
    /// Largest matching displacement relative to the ring spacing.
    pub max_match_ratio: f64,
}

/// Mesh motion alone over `steps` steps at angular velocity `omega`, with
/// the structure in rigid rotation.
pub fn revolution(mesh: &mut Mesh, omega: f64, dt: f64, steps: usize) -> Result<RevolutionReport, Error> {
    let motion = AleMotion::new(mesh)?;
    let structure = mesh.node_mask(Subdomain::Structure);
    let c = mesh.center;
    let rigid = |mesh: &Mesh, theta: f64| -> Vec<Vec2> {
        (0..mesh.num_nodes())
            .map(|v| if structure[v] { rotational_displacement_at(mesh.reference[v], c, theta) } else { [0.0; 2] })
            .collect()
    };
    let ring = &mesh.ring_stationary;
    let spacing = (0..ring.len())
        .map(|i| {
            let (a, b) = (mesh.reference[ring[i]], mesh.reference[ring[(i + 1) % ring.len()]]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(f64::INFINITY, f64::min);
    let q0 = mesh.quality().min_angle_deg;
    let mut report = RevolutionReport {
        steps,
        nonconforming_steps: Vec::new(),
        min_angle_initial: q0,
        min_angle_lowest: q0,
        max_angle_deviation: 0.0,
        max_match_ratio: 0.0,
    };
    let mut prev = AleState::rest(mesh);
    for k in 1..=steps {
        let theta = omega * k as f64 * dt;
        let matching = match_sliding_interface(mesh, theta)?;
        apply_matching(mesh, &matching);
        let u = rigid(mesh, theta);
        let state = motion.displacement(mesh, &u, theta, &prev.a_u, dt)?;
        commit(mesh, &state, &structure, &u)?;
        if !validate_conformity(mesh).is_empty() {
            report.nonconforming_steps.push(k);
        }
        let q = mesh.quality().min_angle_deg;
        report.min_angle_lowest = report.min_angle_lowest.min(q);
        report.max_angle_deviation = report.max_angle_deviation.max((q - q0).abs());
        report.max_match_ratio = report.max_match_ratio.max(max_length(&state.matching.u_m) / spacing);
        prev = state;
    }
    Ok(report)
}

/// Manufactured Stokes solution on the unit square, zero on the boundary.
pub mod mms {
    use super::*;

    pub fn velocity(x: Vec2) -> Vec2 {
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [PI * sx * sx * (2.0 * PI * x[1]).sin(), -PI * (2.0 * PI * x[0]).sin() * sy * sy]
    }

    /// `grad[c][d] = ∂_d u_c`.
    pub fn velocity_gradient(x: Vec2) -> Mat2 {
        let (s2x, s2y) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        let pi2 = PI * PI;
        [
            [pi2 * s2x * s2y, 2.0 * pi2 * sx * sx * (2.0 * PI * x[1]).cos()],
            [-2.0 * pi2 * (2.0 * PI * x[0]).cos() * sy * sy, -pi2 * s2x * s2y],
        ]
    }

    pub fn pressure(x: Vec2) -> f64 {
        (PI * x[0]).cos() * (PI * x[1]).cos()
    }

    /// `−μΔu + ∇p`.
    pub fn force(x: Vec2, mu: f64) -> Vec2 {
        let pi3 = PI * PI * PI;
        let lap = [
            2.0 * pi3 * (2.0 * PI * x[1]).sin() * (2.0 * (2.0 * PI * x[0]).cos() - 1.0),
            -2.0 * pi3 * (2.0 * PI * x[0]).sin() * (2.0 * (2.0 * PI * x[1]).cos() - 1.0),
        ];
        let gp = [-PI * (PI * x[0]).sin() * (PI * x[1]).cos(), -PI * (PI * x[0]).cos() * (PI * x[1]).sin()];
        [-mu * lap[0] + gp[0], -mu * lap[1] + gp[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLevel {
    pub n: usize,
    pub h: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
}

/// Stabilized P1–P1 Stokes on an `n × n` square grid, errors against the
/// manufactured solution. The pressure is fixed at one corner node.
pub fn stokes_mms_level(n: usize, solver: &SaddleSolverConfig) -> Result<MmsLevel, Error> {
    let mesh = unit_square_mesh(n, Subdomain::StatFluid);
    let material = MaterialParams::default();
    let mu = material.mu_f;
    let cons: Vec<Constraint> = mesh
        .tagged_nodes(BoundaryTag::Wall)
        .into_iter()
        .map(|node| Constraint {
            node,
            value: mms::velocity(mesh.reference[node]),
            kind: ConstraintKind::Wall,
        })
        .collect();
    let dofs = DofMap::build(&mesh, ActiveParts::FLUID, &cons, ConflictPolicy::Strict, Some((0, mms::pressure(mesh.reference[0]))))?;
    let mut params = StepParams::new(material, 1.0);
    params.transient = false;
    params.convection = false;
    let zero = vec![[0.0; 2]; mesh.num_nodes()];
    let force = move |x: Vec2| mms::force(x, mu);
    let inp = FluidInputs {
        v_prev: &zero,
        z: &zero,
        w: &zero,
        body_force: Some(&force),
    };
    let sys = assemble(&mesh, &dofs, &params, Some(&inp), None)?;
    let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, solver)?;
    let v = dofs.scatter_velocity(&sol.v);
    let p = dofs.scatter_pressure(&sol.p);

    // the discrete pressure is compared after removing the mean difference
    let quad = crate::assembly::element::QUAD3;
    let mut mean_diff = 0.0;
    for tri in &mesh.triangles {
        let x = [mesh.reference[tri[0]], mesh.reference[tri[1]], mesh.reference[tri[2]]];
        let (area, _) = p1_gradients(x);
        for l in &quad {
            let q = crate::assembly::element::interp(l, &x);
            let ph: f64 = (0..3).map(|a| l[a] * p[tri[a]]).sum();
            mean_diff += area / 3.0 * (ph - mms::pressure(q));
        }
    }
    let (mut eu, mut ep) = (0.0, 0.0);
    for tri in &mesh.triangles {
        let x = [mesh.reference[tri[0]], mesh.reference[tri[1]], mesh.reference[tri[2]]];
        let (area, g) = p1_gradients(x);
        let mut gh = [[0.0; 2]; 2];
        for a in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    gh[c][d] += v[tri[a]][c] * g[a][d];
                }
            }
        }
        for l in &quad {
            let q = crate::assembly::element::interp(l, &x);
            let ge = mms::velocity_gradient(q);
            for c in 0..2 {
                for d in 0..2 {
                    eu += area / 3.0 * (gh[c][d] - ge[c][d]).powi(2);
                }
            }
            let ph: f64 = (0..3).map(|a| l[a] * p[tri[a]]).sum();
            ep += area / 3.0 * (ph - mean_diff - mms::pressure(q)).powi(2);
        }
    }
    Ok(MmsLevel {
        n,
        h: 1.0 / n as f64,
        velocity_h1: eu.sqrt(),
        pressure_l2: ep.sqrt(),
    })
}

/// Observed orders between consecutive levels.
pub fn rates(levels: &[MmsLevel]) -> (Vec<f64>, Vec<f64>) {
    let rate = |a: f64, b: f64, ha: f64, hb: f64| (a / b).ln() / (ha / hb).ln();
    let w = levels.windows(2);
    (
        w.clone().map(|p| rate(p[0].velocity_h1, p[1].velocity_h1, p[0].h, p[1].h)).collect(),
        w.map(|p| rate(p[0].pressure_l2, p[1].pressure_l2, p[0].h, p[1].h)).collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverComparison {
    pub unknowns: usize,
    pub relative_difference: f64,
    pub preconditioned_iterations: usize,
    pub unpreconditioned_iterations: usize,
}

fn outer_iterations(r: Result<crate::linsolve::SaddleSolution, SolveError>) -> Result<usize, SolveError> {
    match r {
        Ok(s) => Ok(s.outer_iterations),
        Err(SolveError::MaxIterations { iterations, .. }) | Err(SolveError::Stagnation { iterations, .. }) => Ok(iterations),
        Err(e) => Err(e),
    }
}

/// Simulation after `warmup` steps, ready to assemble the next system.
fn warmed_up(cfg: &RunConfig, e: f64, dt: f64, warmup: usize) -> Result<(crate::timeloop::Simulation, crate::timeloop::State), Error> {
    let mut cfg = cfg.clone();
    cfg.loop_cfg.dt = dt;
    let mesh = harness::build_mesh(&cfg)?;
    let mut sim = harness::simulation(&cfg, mesh, Some(e))?;
    let mut state = sim.initial_state()?;
    for _ in 0..warmup {
        state = sim.advance(&state)?.0;
    }
    Ok((sim, state))
}

/// FGMRES with the block preconditioner, plain GMRES and the direct
/// solver on one assembled step.
pub fn solver_comparison(cfg: &RunConfig, warmup: usize) -> Result<SolverComparison, Error> {
    let (mut sim, state) = warmed_up(cfg, cfg.materials.e, cfg.loop_cfg.dt, warmup)?;
    let (_, sys) = sim.linear_system(&state)?;
    let mut sc = cfg.solver;
    sc.outer.tol = 1e-10;
    sc.kind = SolverKind::Direct;
    let lu = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &sc)?;
    sc.kind = SolverKind::Fgmres;
    let it = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &sc)?;
    sc.kind = SolverKind::Unpreconditioned;
    let plain = outer_iterations(solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &sc))?;
    let x_lu: Vec<f64> = lu.v.iter().chain(&lu.p).copied().collect();
    let x_it: Vec<f64> = it.v.iter().chain(&it.p).copied().collect();
    let num = x_lu.iter().zip(&x_it).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den = x_lu.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(SolverComparison {
        unknowns: x_lu.len(),
        relative_difference: num / den,
        preconditioned_iterations: it.outer_iterations,
        unpreconditioned_iterations: plain,
    })
}

/// Preconditioned outer iterations for each `(E, Δt)` pair.
pub fn robustness_grid(cfg: &RunConfig, es: &[f64], dts: &[f64], warmup: usize) -> Result<Vec<(f64, f64, usize)>, Error> {
    let mut out = Vec::new();
    for &e in es {
        for &dt in dts {
            let (mut sim, state) = warmed_up(cfg, e, dt, warmup)?;
            let (_, sys) = sim.linear_system(&state)?;
            let mut sc = cfg.solver;
            sc.kind = SolverKind::Fgmres;
            let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &sc)?;
            out.push((e, dt, sol.outer_iterations));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub steps: usize,
    /// Steps where fluid and structure velocities differ on Γ in any bit.
    pub mismatched_steps: Vec<usize>,
    /// Largest axis displacement error over the axis radius.
    pub max_axis_error: f64,
}

pub fn interface_coupling(cfg: &RunConfig, steps: usize) -> Result<CouplingReport, Error> {
    let mesh = harness::build_mesh(cfg)?;
    let mut sim = harness::simulation(cfg, mesh, None)?;
    let gamma = sim.interface_nodes().to_vec();
    let axis = sim.axis_nodes().to_vec();
    let mut state = sim.initial_state()?;
    let mut report = CouplingReport {
        steps,
        mismatched_steps: Vec::new(),
        max_axis_error: 0.0,
    };
    for _ in 0..steps {
        state = sim.advance(&state)?.0;
        let same = gamma
            .iter()
            .all(|&v| state.v_f[v][0].to_bits() == state.v_s[v][0].to_bits() && state.v_f[v][1].to_bits() == state.v_s[v][1].to_bits());
        if !same {
            report.mismatched_steps.push(state.step);
        }
        let theta = sim.rotation.theta(state.t);
        for &v in &axis {
            let exact = rotational_displacement_at(sim.mesh.reference[v], sim.mesh.center, theta);
            let err = (state.u_s[v][0] - exact[0]).hypot(state.u_s[v][1] - exact[1]);
            report.max_axis_error = report.max_axis_error.max(err / cfg.geometry.axis_radius);
        }
    }
    Ok(report)
}

/// Two identical runs; true when probe CSVs and progress logs match byte
/// for byte.
pub fn determinism(cfg: &RunConfig, steps: usize, scratch: &Path) -> Result<bool, Error> {
    let (a, b) = (scratch.join("run_a"), scratch.join("run_b"));
    harness::run(cfg, &a, Some(steps), None)?;
    harness::run(cfg, &b, Some(steps), None)?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| crate::error::IoError::io(p, e));
    let same = read(&a.join("probe.csv"))? == read(&b.join("probe.csv"))? && read(&a.join("progress.log"))? == read(&b.join("progress.log"))?;
    Ok(same)
}

/// Tip deformation magnitude at `t_end` for every modulus of the sweep.
pub fn sweep_endpoints(cfg: &RunConfig, scratch: &Path) -> Result<Vec<(f64, f64)>, Error> {
    let outcome = harness::sweep(cfg, scratch, None)?;
    let t_end = cfg.loop_cfg.dt * cfg.loop_cfg.num_steps() as f64;
    let mut out = Vec::new();
    for (e, run) in outcome.runs {
        let series = run?;
        let s = series.at(t_end).ok_or_else(|| crate::error::IoError::Format {
            what: "probe series",
            line: 0,
            message: format!("no sample at t = {t_end}"),
        })?;
        out.push((e, s.magnitude()));
    }
    Ok(out)
}

/// Settings of the suite; the defaults reproduce the full acceptance runs.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub revolution_steps: usize,
    pub coupling_steps: usize,
    pub determinism_steps: usize,
    pub sweep: Option<RunConfig>,
    pub mms_levels: Vec<usize>,
    /// Bulk mesh size of the solver comparison, about 3k unknowns.
    pub solver_study_h: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            revolution_steps: (2.0 * PI / 0.01).ceil() as usize,
            coupling_steps: 20,
            determinism_steps: 5,
            sweep: None,
            mms_levels: vec![8, 16, 32, 64],
            solver_study_h: 0.016,
        }
    }
}

/// Run every study of the suite on `cfg` (the reference scenario) and
/// report one line per property. Studies that error are reported as
/// failures with the error text.
pub fn run_suite(cfg: &RunConfig, opts: &SuiteOptions, scratch: &Path) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut record = |name: &str, r: Result<CheckResult, Error>| {
        out.push(r.unwrap_or_else(|e| result(name, false, format!("error: {e}"))));
    };
    let direct = SaddleSolverConfig {
        kind: SolverKind::Direct,
        ..Default::default()
    };

    record("static rotation exactness", (|| {
        let mesh = harness::build_mesh(cfg)?;
        let mut worst: f64 = 0.0;
        let mut slowest = Duration::ZERO;
        for deg in [10.0f64, 90.0, 250.0] {
            let (err, dt) = static_rotation(&mesh, deg.to_radians(), &cfg.materials, &direct)?;
            worst = worst.max(err);
            slowest = slowest.max(dt);
        }
        Ok(result("static rotation exactness", worst <= 1e-8 && slowest < Duration::from_secs(5), format!("max relative error {worst:.2e}, slowest {slowest:.2?} on {} nodes", mesh.num_nodes())))
    })());

    record("frame equivalence", (|| {
        let mesh = harness::build_mesh(cfg)?;
        let mut rng = StdRng::seed_from_u64(1);
        let worst = (0..5).map(|_| frame_equivalence(&mesh, rng.random_range(0.0..2.0 * PI), &cfg.materials)).fold(0.0, f64::max);
        Ok(result("frame equivalence", worst <= 1e-12, format!("max entry difference / max entry {worst:.2e}")))
    })());

    record("linearization order", {
        let ratios = linearization_ratios(2, 20, 1e-2, &cfg.materials);
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
        Ok(result("linearization order", lo >= 3.5 && hi <= 4.5, format!("halving ratios in [{lo:.4}, {hi:.4}]")))
    });

    record("sliding interface over a revolution", (|| {
        let mut mesh = harness::build_mesh(cfg)?;
        let r = revolution(&mut mesh, 1.0, 0.01, opts.revolution_steps)?;
        let ok = r.nonconforming_steps.is_empty() && r.max_angle_deviation < 1e-9;
        Ok(result(
            "sliding interface over a revolution",
            ok,
            format!(
                "{} steps, {} nonconforming, min angle {:.4}° → lowest {:.4}° (deviation {:.3e}°), max |u_m| / spacing {:.3}",
                r.steps,
                r.nonconforming_steps.len(),
                r.min_angle_initial,
                r.min_angle_lowest,
                r.max_angle_deviation,
                r.max_match_ratio
            ),
        ))
    })());

    if let Some(sweep_cfg) = &opts.sweep {
        record("stiffness sweep trend", (|| {
            let start = Instant::now();
            let ends = sweep_endpoints(sweep_cfg, &scratch.join("sweep"))?;
            let monotone = ends.windows(2).all(|w| w[1].1 < w[0].1);
            let ratio = ends.last().unwrap().1 / ends[0].1;
            let list: Vec<String> = ends.iter().map(|(e, u)| format!("{e:.1e}:{u:.3e}")).collect();
            Ok(result(
                "stiffness sweep trend",
                monotone && ratio <= 1e-2 && start.elapsed() < Duration::from_secs(1800),
                format!("|ud| at end {} ratio {ratio:.2e} in {:.1?}", list.join(" "), start.elapsed()),
            ))
        })());
    }

    record("manufactured Stokes convergence", (|| {
        let levels = opts.mms_levels.iter().map(|&n| stokes_mms_level(n, &direct)).collect::<Result<Vec<_>, _>>()?;
        let (ru, rp) = rates(&levels);
        let ok = ru.iter().all(|r| *r >= 0.9) && rp.iter().all(|r| *r >= 0.9);
        Ok(result("manufactured Stokes convergence", ok, format!("velocity H1 rates {ru:.3?}, pressure L2 rates {rp:.3?}")))
    })());

    record("solver equivalence", (|| {
        let mut fine = cfg.clone();
        fine.mesh.h = opts.solver_study_h;
        let c = solver_comparison(&fine, 3)?;
        let ok = c.relative_difference <= 1e-8 && c.preconditioned_iterations < 60 && c.preconditioned_iterations < c.unpreconditioned_iterations;
        Ok(result(
            "solver equivalence",
            ok,
            format!(
                "{} unknowns, difference {:.2e}, outer iterations {} vs {} unpreconditioned",
                c.unknowns, c.relative_difference, c.preconditioned_iterations, c.unpreconditioned_iterations
            ),
        ))
    })());

    record("preconditioner robustness", (|| {
        let grid = robustness_grid(cfg, &[2.5e4, 2.5e6, 2.5e9], &[0.02, 0.01, 0.005], 2)?;
        let min = grid.iter().map(|g| g.2).min().unwrap_or(0);
        let max = grid.iter().map(|g| g.2).max().unwrap_or(0);
        let counts: Vec<usize> = grid.iter().map(|g| g.2).collect();
        Ok(result("preconditioner robustness", max <= 3 * min, format!("outer iterations {counts:?}, max/min {max}/{min}")))
    })());

    record("interface coupling", (|| {
        let r = interface_coupling(cfg, opts.coupling_steps)?;
        let ok = r.mismatched_steps.is_empty() && r.max_axis_error <= 1e-10;
        Ok(result(
            "interface coupling",
            ok,
            format!("{} steps, {} with velocity mismatch, axis error / r_in {:.2e}", r.steps, r.mismatched_steps.len(), r.max_axis_error),
        ))
    })());

    record("determinism", (|| {
        let same = determinism(cfg, opts.determinism_steps, &scratch.join("determinism"))?;
        Ok(result("determinism", same, format!("{} steps twice, outputs {}", opts.determinism_steps, if same { "identical" } else { "differ" })))
    })());
    out
}
