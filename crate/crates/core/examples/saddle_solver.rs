//! Assemble one monolithic step of the reference scenario and solve it
//! three ways: block-preconditioned FGMRES, plain GMRES and sparse LU.

use rotorfsi::checks::solver_comparison;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;

fn main() {
    let mut cfg = load_config(presets::TABLE1).expect("preset");
    if let Some(h) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.mesh.h = h;
    }
    let c = solver_comparison(&cfg, 2).expect("solve");
    println!("{} unknowns", c.unknowns);
    println!("|x_fgmres - x_lu| / |x_lu| = {:.2e}", c.relative_difference);
    println!("outer iterations: {} preconditioned, {} without", c.preconditioned_iterations, c.unpreconditioned_iterations);
}
