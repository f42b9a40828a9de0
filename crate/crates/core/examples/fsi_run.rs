//! A few steps of the reference scenario with per-step solver statistics
//! and the tip deformation.
//!
//! `cargo run --release --example fsi_run -- [steps] [out dir]`

use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;

fn main() {
    let mut args = std::env::args().skip(1);
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let out = args.next().unwrap_or_else(|| "out_fsi_run".into());
    let cfg = load_config(presets::TABLE1).expect("preset");
    let run = harness::run(&cfg, out.as_ref(), Some(steps), None).unwrap_or_else(|e| panic!("{e}"));
    for (r, s) in run.reports.iter().zip(&run.probe.samples) {
        println!(
            "step {:>4} t {:.3}: sweeps {:>2} newton {:?} krylov {:>4} min angle {:.2}° tip |ud| {:.4e}",
            r.step, r.t, r.sweeps, r.newton_iterations, r.krylov_iterations, r.min_angle_deg, s.magnitude()
        );
    }
    println!("output in {out}");
}
