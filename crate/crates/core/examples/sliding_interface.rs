//! Rotate the buffer zone through one revolution and watch the sliding
//! interface re-match: shift, largest matching displacement and mesh
//! conformity at a few angles.

use std::f64::consts::TAU;

use rotorfsi::ale::{apply_matching, AleMotion};
use rotorfsi::mesh::{build_rotor_channel_mesh, validate_conformity, ChannelRotorGeometry, Subdomain};
use rotorfsi::rotation::rotational_displacement_at;

fn main() {
    let geom = ChannelRotorGeometry::default();
    let mut mesh = build_rotor_channel_mesh(&geom, 0.02).expect("mesh");
    let motion = AleMotion::new(&mesh).expect("buffer zone");
    let structure = mesh.node_mask(Subdomain::Structure);
    let n = mesh.num_nodes();
    println!("ring of {} nodes", mesh.ring_size());
    println!("{:>8} {:>6} {:>12} {:>9} {:>8}", "theta", "shift", "max |u_m|", "min angle", "defects");
    let mut a_u = vec![[0.0; 2]; n];
    for k in 0..=12 {
        let theta = TAU * k as f64 / 12.0 + 0.013;
        let u: Vec<_> = (0..n)
            .map(|v| if structure[v] { rotational_displacement_at(mesh.reference[v], mesh.center, theta) } else { [0.0; 2] })
            .collect();
        let st = motion.displacement(&mesh, &u, theta, &a_u, 0.01).expect("extension");
        for v in 0..n {
            if structure[v] || motion.is_rot_fluid(v) {
                let d = if motion.is_rot_fluid(v) { st.a_u[v] } else { u[v] };
                mesh.current[v] = [mesh.reference[v][0] + d[0], mesh.reference[v][1] + d[1]];
            }
        }
        apply_matching(&mut mesh, &st.matching);
        let um = st.matching.u_m.iter().map(|u| u[0].hypot(u[1])).fold(0.0, f64::max);
        println!(
            "{theta:>8.4} {:>6} {um:>12.4e} {:>9.3} {:>8}",
            st.matching.shift,
            mesh.quality().min_angle_deg,
            validate_conformity(&mesh).len()
        );
        a_u = st.a_u;
    }
}
