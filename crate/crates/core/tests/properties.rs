use std::f64::consts::TAU;

use proptest::prelude::*;

use rotorfsi::ale::{match_rings, AleState, MatchRule};
use rotorfsi::assembly::{ActiveParts, ConflictPolicy, Constraint, ConstraintKind, DofMap};
use rotorfsi::io::checkpoint::{decode, encode};
use rotorfsi::io::config::presets;
use rotorfsi::io::vtk::parse_vtk;
use rotorfsi::io::{load_config, to_toml, Checkpoint, VtkSnapshot};
use rotorfsi::mesh::{unit_square_mesh, BoundaryTag, Subdomain};
use rotorfsi::rotation::{decompose_displacement, mat_mul, recompose_displacement, rotation_matrix, OmegaSegment, Vec2};
use rotorfsi::timeloop::{relax_interface, trapezoid_update, State};

fn vec2() -> impl Strategy<Value = Vec2> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| [a, b])
}

fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
    (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
}

fn angle(p: Vec2, c: Vec2) -> f64 {
    (p[1] - c[1]).atan2(p[0] - c[0]).rem_euclid(TAU)
}

proptest! {
    #[test]
    fn decomposition_round_trips(theta in -20.0..20.0f64, pts in prop::collection::vec((vec2(), vec2()), 1..30), c in vec2()) {
        let (x, u): (Vec<Vec2>, Vec<Vec2>) = pts.into_iter().unzip();
        let d = decompose_displacement(&u, &x, c, theta);
        let back = recompose_displacement(&d, &x, c, theta);
        for (a, b) in u.iter().zip(&back) {
            prop_assert!(close(*a, *b, 1e-13));
        }
        // rigid motion has no deformation part
        let rigid = recompose_displacement(&vec![[0.0; 2]; x.len()], &x, c, theta);
        for d in decompose_displacement(&rigid, &x, c, theta) {
            prop_assert!(close(d, [0.0, 0.0], 1e-13));
        }
    }

    #[test]
    fn rotations_compose(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let ab = mat_mul(&rotation_matrix(a), &rotation_matrix(b));
        let r = rotation_matrix(a + b);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((ab[i][j] - r[i][j]).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn forward_matching_is_a_bounded_cyclic_shift(
        m in 8usize..48,
        jitter in prop::collection::vec(-0.3..0.3f64, 48),
        theta in -15.0..15.0f64,
        r in 0.05..2.0f64,
    ) {
        let c = [0.3, -0.2];
        let pts: Vec<Vec2> = (0..m)
            .map(|i| {
                let a = TAU * (i as f64 + jitter[i]) / m as f64;
                [c[0] + r * a.cos(), c[1] + r * a.sin()]
            })
            .collect();
        let got = match_rings(c, &pts, &pts, theta, MatchRule::Forward).unwrap();
        let k = got.shift.rem_euclid(m as i64) as usize;
        for (i, &t) in got.target.iter().enumerate() {
            prop_assert_eq!(t, (i + k) % m);
        }
        let edge = (0..m)
            .map(|j| {
                let (a, b) = (pts[j], pts[(j + 1) % m]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .fold(0.0, f64::max);
        for u in &got.u_m {
            prop_assert!(u[0].hypot(u[1]) <= 1.5 * edge);
        }
        // the node ahead of each rotated node is never skipped
        let phi0 = angle(pts[0], c) + theta;
        let gap = (angle(pts[got.target[0]], c) - phi0 + 1e-9).rem_euclid(TAU);
        for j in 0..m {
            prop_assert!((angle(pts[j], c) - phi0 + 1e-9).rem_euclid(TAU) >= gap);
        }
    }

    #[test]
    fn dof_gather_scatter_round_trip(fixed in prop::collection::vec(any::<bool>(), 64), seed in prop::collection::vec(-5.0..5.0f64, 400)) {
        let mesh = unit_square_mesh(6, Subdomain::StatFluid);
        let cons: Vec<Constraint> = mesh
            .tagged_nodes(BoundaryTag::Wall)
            .into_iter()
            .enumerate()
            .filter(|(k, _)| fixed[k % fixed.len()])
            .map(|(k, node)| Constraint { node, value: [k as f64, -(k as f64)], kind: ConstraintKind::Wall })
            .collect();
        let dofs = DofMap::build(&mesh, ActiveParts::FLUID, &cons, ConflictPolicy::Strict, None).unwrap();
        let x: Vec<f64> = (0..dofs.n_v()).map(|i| seed[i % seed.len()]).collect();
        let v = dofs.scatter_velocity(&x);
        prop_assert_eq!(dofs.gather_velocity(&v), x);
        for c in &cons {
            prop_assert_eq!(v[c.node], c.value);
        }
        let p: Vec<f64> = (0..dofs.n_p()).map(|i| seed[(i + 7) % seed.len()]).collect();
        prop_assert_eq!(dofs.gather_pressure(&dofs.scatter_pressure(&p)), p);
    }

    #[test]
    fn config_round_trips(
        dt in 1e-4..0.1f64,
        relax in 0.05..1.0f64,
        e in 1e3..1e10f64,
        nu in 0.01..0.49f64,
        h in 0.01..0.05f64,
        omegas in prop::collection::vec(-3.0..3.0f64, 1..4),
        fluid in any::<bool>(),
    ) {
        let mut cfg = load_config(presets::TABLE1).unwrap();
        cfg.loop_cfg.dt = dt;
        cfg.loop_cfg.relax = relax;
        cfg.materials.e = e;
        cfg.materials.nu = nu;
        cfg.mesh.h = h;
        cfg.with_fluid = fluid;
        cfg.rotation.schedule = omegas.iter().enumerate().map(|(k, &w)| OmegaSegment { start: 0.25 * k as f64, omega: w }).collect();
        let text = to_toml(&cfg);
        let back = load_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(to_toml(&back), text);
    }

    #[test]
    fn snapshot_text_round_trips(values in prop::collection::vec(-1e6..1e6f64, 200), step in 0usize..100000) {
        let mesh = unit_square_mesh(4, Subdomain::StatFluid);
        let n = mesh.num_nodes();
        let at = |k: usize| values[k % values.len()];
        let field = |o: usize| (0..n).map(|i| [at(2 * i + o), at(2 * i + o + 1)]).collect::<Vec<Vec2>>();
        let mut ale = AleState::rest(&mesh);
        ale.a_u = field(3);
        let state = State {
            step,
            t: at(1),
            v_f: field(0),
            v_s: field(1),
            p: (0..n).map(|i| at(i + 5)).collect(),
            u_s: field(2),
            ale,
        };
        let snap = VtkSnapshot::from_state(&mesh, &state);
        prop_assert_eq!(parse_vtk(&snap.to_vtk()).unwrap(), snap);
        let cp = Checkpoint { state: state.clone(), current: field(4) };
        prop_assert_eq!(decode(&encode(&cp)).unwrap(), cp);
    }

    #[test]
    fn trapezoid_is_exact_for_affine_velocity(a in -5.0..5.0f64, b in -5.0..5.0f64, t0 in 0.0..2.0f64, dt in 1e-3..0.5f64) {
        let t1 = t0 + dt;
        let u = trapezoid_update(&[[0.0, 0.0]], &[[a + b * t1, 0.0]], &[[a + b * t0, 0.0]], dt);
        let exact = a * dt + 0.5 * b * (t1 * t1 - t0 * t0);
        prop_assert!((u[0][0] - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn relaxed_interface_lies_between(prev in vec2(), new in vec2(), w in 0.01..1.0f64) {
        let r = relax_interface(&[prev], &[new], w)[0];
        for d in 0..2 {
            let (lo, hi) = (prev[d].min(new[d]), prev[d].max(new[d]));
            prop_assert!(r[d] >= lo - 1e-15 && r[d] <= hi + 1e-15);
        }
    }
}
