use std::f64::consts::TAU;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rotorfsi::ale::{apply_matching, match_rings, match_sliding_interface, update_fluid_mesh, AleMotion, HarmonicExtension, MatchRule, Matching};
use rotorfsi::error::AleError;
use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;
use rotorfsi::mesh::{validate_conformity, Defect, Mesh, Subdomain};
use rotorfsi::rotation::{rotational_displacement_at, Vec2};

fn mesh() -> Mesh {
    harness::build_mesh(&load_config(presets::TABLE1).unwrap()).unwrap()
}

fn ring(m: usize, r: f64, c: Vec2) -> Vec<Vec2> {
    (0..m)
        .map(|i| {
            let a = TAU * i as f64 / m as f64;
            [c[0] + r * a.cos(), c[1] + r * a.sin()]
        })
        .collect()
}

fn angle(p: Vec2, c: Vec2) -> f64 {
    (p[1] - c[1]).atan2(p[0] - c[0]).rem_euclid(TAU)
}

/// Forward target by exhaustive search: the stationary node with the
/// smallest nonnegative angular gap ahead of the rotated node.
fn brute_forward(c: Vec2, rot: &[Vec2], stat: &[Vec2], theta: f64) -> Vec<usize> {
    rot.iter()
        .map(|&p| {
            let phi = angle(p, c) + theta;
            (0..stat.len())
                .min_by(|&a, &b| {
                    let ga = (angle(stat[a], c) - phi + 1e-9).rem_euclid(TAU);
                    let gb = (angle(stat[b], c) - phi + 1e-9).rem_euclid(TAU);
                    ga.total_cmp(&gb)
                })
                .unwrap()
        })
        .collect()
}

fn length(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

#[test]
fn affine_boundary_data_is_reproduced() {
    let mesh = mesh();
    let ext = HarmonicExtension::new(&mesh).unwrap();
    let f = |p: Vec2| [0.3 + 2.0 * p[0] - 0.7 * p[1], -1.1 + 0.4 * p[0] + 1.9 * p[1]];
    let bc: Vec<Vec2> = mesh.reference.iter().map(|&p| f(p)).collect();
    let out = ext.solve(&bc);
    assert!(!ext.interior_nodes().is_empty());
    for &v in ext.interior_nodes() {
        let e = f(mesh.reference[v]);
        assert!(length([out[v][0] - e[0], out[v][1] - e[1]]) <= 1e-10, "node {v}");
    }
    assert!(ext.residual(&out) <= 1e-10);
}

#[test]
fn maximum_principle_holds_on_nonobtuse_buffer() {
    let mesh = mesh();
    let ext = HarmonicExtension::new(&mesh).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let bc: Vec<Vec2> = (0..mesh.num_nodes()).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-3.0..2.0)]).collect();
    let out = ext.solve(&bc);
    if !ext.has_nonpositive_couplings() {
        // without the sign condition only the solve itself is checked
        assert!(ext.residual(&out) <= 1e-10);
        return;
    }
    for d in 0..2 {
        let lo = ext.boundary_nodes().iter().map(|&v| bc[v][d]).fold(f64::INFINITY, f64::min);
        let hi = ext.boundary_nodes().iter().map(|&v| bc[v][d]).fold(f64::NEG_INFINITY, f64::max);
        for &v in ext.interior_nodes() {
            assert!(out[v][d] >= lo - 1e-12 && out[v][d] <= hi + 1e-12);
        }
    }
}

#[test]
fn sixteen_node_ring_at_one_and_a_half_spacings() {
    let (m, r, c) = (16, 0.4, [0.2, -0.1]);
    let rot = ring(m, r, c);
    let theta = 1.5 * TAU / m as f64;
    let got = match_rings(c, &rot, &rot, theta, MatchRule::Forward).unwrap();
    assert_eq!(got.shift, 2);
    assert_eq!(got.target, brute_forward(c, &rot, &rot, theta));
    let expected = 2.0 * r * (0.25 * TAU / m as f64).sin();
    for u in &got.u_m {
        assert!((length(*u) - expected).abs() <= 1e-12);
    }
}

#[test]
fn forward_matching_agrees_with_exhaustive_search() {
    let mesh = mesh();
    let rot: Vec<Vec2> = mesh.ring_rotating.iter().map(|&v| mesh.reference[v]).collect();
    let stat: Vec<Vec2> = mesh.ring_stationary.iter().map(|&v| mesh.reference[v]).collect();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let theta = rng.random_range(0.0..3.0 * TAU);
        let got = match_sliding_interface(&mesh, theta).unwrap();
        assert_eq!(got.target, brute_forward(mesh.center, &rot, &stat, theta), "theta {theta}");
    }
}

#[test]
fn shift_is_monotone_and_gains_m_per_turn() {
    let mesh = mesh();
    let m = mesh.ring_size() as i64;
    let mut last = i64::MIN;
    for k in 0..=700 {
        let theta = 0.01 * k as f64;
        let s = match_sliding_interface(&mesh, theta).unwrap().shift;
        assert!(s >= last);
        last = s;
        let turned = match_sliding_interface(&mesh, theta + TAU).unwrap().shift;
        assert_eq!(turned, s + m, "theta {theta}");
    }
}

#[test]
fn matching_displacement_stays_within_one_and_a_half_edges() {
    let mesh = mesh();
    let stat: Vec<Vec2> = mesh.ring_stationary.iter().map(|&v| mesh.reference[v]).collect();
    let m = stat.len();
    let edge = (0..m)
        .map(|j| {
            let (a, b) = (stat[j], stat[(j + 1) % m]);
            length([a[0] - b[0], a[1] - b[1]])
        })
        .fold(0.0, f64::max);
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..200 {
        let theta = rng.random_range(-TAU..TAU);
        let got = match_sliding_interface(&mesh, theta).unwrap();
        for u in &got.u_m {
            assert!(length(*u) <= 1.5 * edge);
        }
    }
}

/// Move the rotating side of `mesh` rigidly by `theta` and bend the buffer
/// zone so that each rotating ring node lands on its matched partner.
fn place(mesh: &mut Mesh, theta: f64, matching: &Matching) {
    let ext = HarmonicExtension::new(mesh).unwrap();
    let mut bc = vec![[0.0; 2]; mesh.num_nodes()];
    for (i, &v) in mesh.ring_rotating.iter().enumerate() {
        bc[v] = matching.u_m[i];
    }
    let a_d = ext.solve(&bc);
    let rot_fluid = mesh.node_mask(Subdomain::RotFluid);
    let structure = mesh.node_mask(Subdomain::Structure);
    for v in 0..mesh.num_nodes() {
        if rot_fluid[v] || structure[v] {
            let u = rotational_displacement_at(mesh.reference[v], mesh.center, theta);
            let d = if rot_fluid[v] { a_d[v] } else { [0.0; 2] };
            mesh.current[v] = [mesh.reference[v][0] + u[0] + d[0], mesh.reference[v][1] + u[1] + d[1]];
        }
    }
    apply_matching(mesh, matching);
}

#[test]
fn nearest_rule_breaks_conformity_on_uneven_ring() {
    let mut mesh = mesh();
    let m = mesh.ring_size();
    let spacing = TAU / m as f64;
    let c = mesh.center;
    // uneven rings (both sides alike): every third node pushed ahead, the
    // next pulled back, so two rotated nodes share a nearest neighbour
    let pairs: Vec<(usize, usize)> = mesh.ring_stationary.iter().copied().zip(mesh.ring_rotating.iter().copied()).collect();
    for (j, (a, b)) in pairs.into_iter().enumerate() {
        let delta = [0.0, 0.2, -0.2][j % 3] * spacing;
        let p = mesh.reference[a];
        let (s, co) = delta.sin_cos();
        let d = [p[0] - c[0], p[1] - c[1]];
        let q = [c[0] + co * d[0] - s * d[1], c[1] + s * d[0] + co * d[1]];
        for v in [a, b] {
            mesh.reference[v] = q;
            mesh.current[v] = q;
        }
    }
    assert!(validate_conformity(&mesh).is_empty());
    let theta = 0.5 * spacing;
    let rot: Vec<Vec2> = mesh.ring_rotating.iter().map(|&v| mesh.reference[v]).collect();
    let stat: Vec<Vec2> = mesh.ring_stationary.iter().map(|&v| mesh.reference[v]).collect();

    let nearest = match_rings(c, &rot, &stat, theta, MatchRule::Nearest).unwrap();
    let mut taken = nearest.target.clone();
    taken.sort_unstable();
    taken.dedup();
    assert!(taken.len() < m, "nearest rule happened to be bijective");
    let mut broken = mesh.clone();
    place(&mut broken, theta, &nearest);
    let defects = validate_conformity(&broken);
    assert!(
        defects.iter().any(|d| matches!(d, Defect::DegenerateTriangle { .. } | Defect::OverSharedEdge { .. } | Defect::UntaggedBoundaryEdge { .. })),
        "{defects:?}"
    );

    let forward = match_rings(c, &rot, &stat, theta, MatchRule::Forward).unwrap();
    place(&mut mesh, theta, &forward);
    assert_eq!(validate_conformity(&mesh), Vec::new());
}

#[test]
fn stale_matching_under_large_rotation_is_reported_as_inversion() {
    let mut mesh = mesh();
    let n = mesh.num_nodes();
    let theta = 60f64.to_radians();
    let rot_fluid = mesh.node_mask(Subdomain::RotFluid);
    let ring: Vec<bool> = {
        let mut r = vec![false; n];
        for &v in &mesh.ring_rotating {
            r[v] = true;
        }
        r
    };
    // the ring keeps its old position while the inside turns by 60°
    let a_u: Vec<Vec2> = (0..n)
        .map(|v| {
            if rot_fluid[v] && !ring[v] {
                rotational_displacement_at(mesh.reference[v], mesh.center, theta)
            } else {
                [0.0; 2]
            }
        })
        .collect();
    let before = mesh.current.clone();
    let zero = vec![[0.0; 2]; n];
    match update_fluid_mesh(&mut mesh, &a_u, &zero, 0.01) {
        Err(AleError::MeshInversion { area, .. }) => assert!(area <= 0.0),
        other => panic!("expected an inversion, got {other:?}"),
    }
    assert_eq!(mesh.current, before);
}

fn turn_structure(mesh: &mut Mesh, theta: f64) {
    let structure = mesh.node_mask(Subdomain::Structure);
    for v in 0..mesh.num_nodes() {
        if structure[v] {
            let u = rotational_displacement_at(mesh.reference[v], mesh.center, theta);
            mesh.current[v] = [mesh.reference[v][0] + u[0], mesh.reference[v][1] + u[1]];
        }
    }
}

#[test]
fn unchanged_displacement_gives_zero_mesh_velocity() {
    let mut mesh = mesh();
    turn_structure(&mut mesh, 0.3);
    let motion = AleMotion::new(&mesh).unwrap();
    let n = mesh.num_nodes();
    let theta = 0.3;
    let u_gamma: Vec<Vec2> = mesh.reference.iter().map(|&p| rotational_displacement_at(p, mesh.center, theta)).collect();
    let st = motion.displacement(&mesh, &u_gamma, theta, &vec![[0.0; 2]; n], 0.01).unwrap();
    let w = update_fluid_mesh(&mut mesh, &st.a_u, &st.a_u, 0.01).unwrap();
    assert!(w.iter().all(|v| *v == [0.0, 0.0]));
}

#[test]
fn rigid_increment_preserves_element_areas() {
    let mut mesh = mesh();
    let n = mesh.num_nodes();
    let theta = 0.37;
    turn_structure(&mut mesh, theta);
    let rot_fluid = mesh.node_mask(Subdomain::RotFluid);
    let a_u: Vec<Vec2> = (0..n)
        .map(|v| if rot_fluid[v] { rotational_displacement_at(mesh.reference[v], mesh.center, theta) } else { [0.0; 2] })
        .collect();
    let before: Vec<f64> = (0..mesh.num_triangles()).map(|t| mesh.area(t, false)).collect();
    update_fluid_mesh(&mut mesh, &a_u, &vec![[0.0; 2]; n], 0.01).unwrap();
    for (t, a) in before.iter().enumerate() {
        if mesh.subdomains[t] == Subdomain::RotFluid {
            assert!((mesh.area(t, true) - a).abs() <= 1e-13 * a.max(1.0), "triangle {t}: {} vs {a}", mesh.area(t, true));
        }
    }
}

#[test]
fn full_turn_returns_to_the_start() {
    let mesh = mesh();
    let a = match_sliding_interface(&mesh, 0.4).unwrap();
    let b = match_sliding_interface(&mesh, 0.4 + 2.0 * TAU).unwrap();
    assert_eq!(a.target, b.target);
    for (x, y) in a.u_m.iter().zip(&b.u_m) {
        assert!(length([x[0] - y[0], x[1] - y[1]]) <= 1e-12);
    }
}
