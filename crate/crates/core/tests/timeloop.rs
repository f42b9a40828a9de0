use rotorfsi::assembly::{assemble, ActiveParts, ConflictPolicy, Constraint, ConstraintKind, DofMap, FluidInputs, Linearization, MaterialParams, StepParams};
use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::{load_config, RunConfig};
use rotorfsi::linsolve::{solve_saddle, SaddleSolverConfig, SolverKind};
use rotorfsi::mesh::{unit_square_mesh, BoundaryTag, Subdomain};
use rotorfsi::rotation::{rotational_displacement_at, OmegaSegment, Vec2};
use rotorfsi::timeloop::{Simulation, State, StepReport};

fn table1() -> RunConfig {
    load_config(presets::TABLE1).unwrap()
}

fn start(cfg: &RunConfig) -> (Simulation, State) {
    let mesh = harness::build_mesh(cfg).unwrap();
    let mut sim = harness::simulation(cfg, mesh, None).unwrap();
    let st = sim.initial_state().unwrap();
    (sim, st)
}

fn march(cfg: &RunConfig, steps: usize) -> (Simulation, State, Vec<StepReport>) {
    let (mut sim, mut st) = start(cfg);
    let mut reports = Vec::new();
    for _ in 0..steps {
        let (next, r) = sim.advance(&st).unwrap();
        st = next;
        reports.push(r);
    }
    (sim, st, reports)
}

#[test]
fn rest_state_is_a_fixed_point() {
    let mut cfg = table1();
    cfg.rotation.schedule = vec![OmegaSegment { start: 0.0, omega: 0.0 }];
    cfg.inflow.peak = 0.0;
    let (mut sim, s0) = start(&cfg);
    let (s1, report) = sim.advance(&s0).unwrap();
    assert_eq!(report.sweeps, 1);
    assert_eq!((s1.step, s1.t), (1, cfg.loop_cfg.dt));
    assert_eq!(s1.v_f, s0.v_f);
    assert_eq!(s1.v_s, s0.v_s);
    assert_eq!(s1.p, s0.p);
    assert_eq!(s1.u_s, s0.u_s);
    assert_eq!(s1.ale.a_u, s0.ale.a_u);
}

#[test]
fn stiff_structure_alone_follows_the_rigid_rotation() {
    let mut cfg = table1();
    cfg.with_fluid = false;
    cfg.materials.e = 2.5e9;
    let (mut sim, mut st) = start(&cfg);
    let l_c = cfg.geometry.cross_length;
    let structure = sim.mesh.node_mask(Subdomain::Structure);
    for _ in 0..60 {
        st = sim.advance(&st).unwrap().0;
        let theta = sim.rotation.theta(st.t);
        for v in (0..sim.mesh.num_nodes()).filter(|&v| structure[v]) {
            let r = rotational_displacement_at(sim.mesh.reference[v], sim.mesh.center, theta);
            let d = (st.u_s[v][0] - r[0]).hypot(st.u_s[v][1] - r[1]);
            assert!(d <= 1e-6 * l_c, "node {v} at t = {}: {d:e}", st.t);
        }
    }
}

#[test]
fn reference_run_converges_within_budget() {
    let cfg = table1();
    let (sim, _, reports) = march(&cfg, 8);
    for r in &reports {
        if r.step > 3 {
            assert!(r.sweeps <= 25, "step {} took {} sweeps", r.step, r.sweeps);
        }
        assert!(r.newton_iterations.iter().all(|&k| k <= 6), "step {}: {:?}", r.step, r.newton_iterations);
        assert!(r.fp_history.last().unwrap() <= &cfg.loop_cfg.fp_tol);
    }
    assert!(sim.mesh.quality().inverted == 0);
}

#[test]
fn creeping_flow_needs_one_solve_per_sweep() {
    let mut cfg = table1();
    cfg.materials.rho_f = 0.0;
    let (_, _, reports) = march(&cfg, 3);
    for r in &reports {
        assert!(r.newton_iterations.iter().all(|&k| k == 1), "{:?}", r.newton_iterations);
    }
}

#[test]
fn relaxation_factor_does_not_change_the_answer() {
    let plain = {
        let mut cfg = table1();
        cfg.loop_cfg.relax = 1.0;
        march(&cfg, 4).1
    };
    let cfg = table1();
    let relaxed = march(&cfg, 4).1;
    let mut diff: f64 = 0.0;
    let mut mag: f64 = 1.0;
    for (a, b) in plain.u_s.iter().zip(&relaxed.u_s) {
        diff = diff.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        mag = mag.max(b[0].abs()).max(b[1].abs());
    }
    assert!(diff / mag <= 10.0 * cfg.loop_cfg.fp_tol, "{:e}", diff / mag);
}

/// Steady driven cavity at moderate Reynolds number; returns the solution
/// and the size of each velocity update.
fn cavity(linearization: Linearization, iterations: usize) -> (Vec<Vec2>, Vec<f64>) {
    let mesh = unit_square_mesh(12, Subdomain::StatFluid);
    let cons: Vec<Constraint> = mesh
        .tagged_nodes(BoundaryTag::Wall)
        .into_iter()
        .map(|node| {
            let p = mesh.reference[node];
            let lid = p[1] > 1.0 - 1e-12 && p[0] > 1e-12 && p[0] < 1.0 - 1e-12;
            Constraint {
                node,
                value: if lid { [1.0, 0.0] } else { [0.0, 0.0] },
                kind: ConstraintKind::Wall,
            }
        })
        .collect();
    let dofs = DofMap::build(&mesh, ActiveParts::FLUID, &cons, ConflictPolicy::Strict, Some((0, 0.0))).unwrap();
    let material = MaterialParams { rho_f: 100.0, ..Default::default() };
    let mut params = StepParams::new(material, 1.0);
    params.transient = false;
    params.linearization = linearization;
    let solver = SaddleSolverConfig {
        kind: SolverKind::Direct,
        ..Default::default()
    };
    let zero = vec![[0.0; 2]; mesh.num_nodes()];
    let mut z = dofs.scatter_velocity(&dofs.gather_velocity(&zero));
    let mut history = Vec::new();
    for _ in 0..iterations {
        let inp = FluidInputs {
            v_prev: &zero,
            z: &z,
            w: &zero,
            body_force: None,
        };
        let sys = assemble(&mesh, &dofs, &params, Some(&inp), None).unwrap();
        let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &solver).unwrap();
        let next = dofs.scatter_velocity(&sol.v);
        history.push(next.iter().zip(&z).map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs())).fold(0.0, f64::max));
        z = next;
    }
    (z, history)
}

#[test]
fn newton_converges_quadratically_and_matches_picard() {
    let (v_newton, h) = cavity(Linearization::Newton, 7);
    println!("newton updates {h:?}");
    // quadratic: each update is bounded by a fixed multiple of the square of
    // the one before, until round-off takes over
    for k in 1..h.len() {
        if h[k - 1] > 1e-7 {
            assert!(h[k] <= 10.0 * h[k - 1] * h[k - 1], "{h:?}");
        }
    }
    let (v_picard, hp) = cavity(Linearization::Picard, 80);
    assert!(hp.last().unwrap() <= &1e-10, "{hp:?}");
    let diff = v_newton
        .iter()
        .zip(&v_picard)
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
        .fold(0.0, f64::max);
    assert!(diff <= 1e-8, "{diff:e}");
}
