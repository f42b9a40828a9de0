//! Manufactured Stokes solution on refined unit squares: errors and
//! observed convergence rates of the stabilized equal-order pair.

use rotorfsi::checks::{rates, stokes_mms_level};
use rotorfsi::linsolve::{SaddleSolverConfig, SolverKind};

fn main() {
    let solver = SaddleSolverConfig {
        kind: SolverKind::Direct,
        ..Default::default()
    };
    let levels: Vec<_> = [8, 16, 32, 64].iter().map(|&n| stokes_mms_level(n, &solver).expect("solve")).collect();
    for l in &levels {
        println!("n {:>3} h {:.4}: |u - u_h|_1 {:.4e}  |p - p_h|_0 {:.4e}", l.n, l.h, l.velocity_h1, l.pressure_l2);
    }
    let (ru, rp) = rates(&levels);
    println!("velocity rates {ru:.3?}");
    println!("pressure rates {rp:.3?}");
}
