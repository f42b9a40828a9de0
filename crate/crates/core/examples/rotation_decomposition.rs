//! Split a displacement field into its rigid rotation and the deformation
//! carried in the rotor frame, then put it back together.

use rotorfsi::rotation::{decompose_displacement, recompose_displacement, rotational_displacement_at};

fn main() {
    let center = [0.15, 0.1];
    let theta = 1.2;
    let x_ref = [[0.2, 0.1], [0.15, 0.15], [0.1, 0.1]];
    // rigid rotation plus a small radial stretch of the first node
    let mut u: Vec<_> = x_ref.iter().map(|&x| rotational_displacement_at(x, center, theta)).collect();
    u[0][0] += 1e-3 * theta.cos();
    u[0][1] += 1e-3 * theta.sin();

    let ud = decompose_displacement(&u, &x_ref, center, theta);
    for (x, d) in x_ref.iter().zip(&ud) {
        println!("node at {x:?}: deformation in rotor frame [{:+.3e}, {:+.3e}]", d[0], d[1]);
    }
    let back = recompose_displacement(&ud, &x_ref, center, theta);
    let err = u.iter().zip(&back).map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs())).fold(0.0, f64::max);
    println!("round trip error {err:.1e}");
}
