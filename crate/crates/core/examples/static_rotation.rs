//! Rotate the rotor statically and compare the computed displacement with
//! the exact rigid rotation, for the direct and the iterative solver.

use rotorfsi::checks::static_rotation;
use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;
use rotorfsi::linsolve::{SaddleSolverConfig, SolverKind};

fn main() {
    let cfg = load_config(presets::TABLE1).expect("preset");
    let mesh = harness::build_mesh(&cfg).expect("mesh");
    for kind in [SolverKind::Direct, SolverKind::Fgmres] {
        let solver = SaddleSolverConfig { kind, ..cfg.solver };
        for deg in [10.0f64, 90.0, 250.0] {
            let (err, took) = static_rotation(&mesh, deg.to_radians(), &cfg.materials, &solver).expect("solve");
            println!("{kind:?} {deg:>5}°: relative error {err:.2e} in {took:.1?}");
        }
    }
}
