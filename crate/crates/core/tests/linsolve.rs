use nalgebra::{DMatrix, DVector};

use rotorfsi::assembly::MonolithicSystem;
use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;
use rotorfsi::linsolve::{solve_saddle, SaddleSolverConfig, SmootherKind, SolverKind};

/// One coupled step of the reference scenario on a coarse mesh.
fn coupled_system() -> MonolithicSystem {
    let mut cfg = load_config(presets::TABLE1).unwrap();
    cfg.mesh.h = 0.04;
    let mesh = harness::build_mesh(&cfg).unwrap();
    let mut sim = harness::simulation(&cfg, mesh, None).unwrap();
    let mut st = sim.initial_state().unwrap();
    st = sim.advance(&st).unwrap().0;
    sim.linear_system(&st).unwrap().1
}

fn dense_solution(sys: &MonolithicSystem) -> Vec<f64> {
    let (m, rhs) = sys.full();
    let rows = m.to_dense();
    let n = rows.len();
    let dm = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    dm.lu().solve(&DVector::from_vec(rhs)).expect("singular saddle matrix").iter().copied().collect()
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    num / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}

#[test]
fn every_solver_agrees_with_dense_lu() {
    let sys = coupled_system();
    let exact = dense_solution(&sys);
    let base = SaddleSolverConfig::default();
    let mut configs = vec![SaddleSolverConfig { kind: SolverKind::Direct, ..base }];
    for (a, s) in [(SmootherKind::Ilu0, SmootherKind::GaussSeidel), (SmootherKind::GaussSeidel, SmootherKind::Ilu0)] {
        let mut c = base;
        c.outer.tol = 1e-11;
        c.inner.velocity_smoother = a;
        c.inner.schur_smoother = s;
        configs.push(c);
    }
    for cfg in configs {
        let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &cfg).unwrap();
        let x: Vec<f64> = sol.v.iter().chain(&sol.p).copied().collect();
        let err = relative(&x, &exact);
        assert!(err <= 1e-8, "{:?}: {err:e}", cfg.kind);
    }
}

#[test]
fn solution_has_small_true_residual() {
    let sys = coupled_system();
    let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &SaddleSolverConfig::default()).unwrap();
    let (rv, rp) = sys.residual(&sol.v, &sol.p);
    let r: f64 = rv.iter().chain(&rp).map(|x| x * x).sum::<f64>().sqrt();
    let b: f64 = sys.f.iter().chain(&sys.g).map(|x| x * x).sum::<f64>().sqrt();
    assert!(r / b <= 1e-8, "{:e}", r / b);
    assert!(sol.true_residual <= 1e-8);
}
