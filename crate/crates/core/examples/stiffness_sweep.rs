//! Tip deformation against Young's modulus. The default is a short
//! structure-only sweep; pass `full` for the coupled sweep preset.

use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::load_config;

fn main() {
    let full = std::env::args().nth(1).as_deref() == Some("full");
    let mut cfg = load_config(presets::SWEEP).expect("preset");
    let steps = if full {
        None
    } else {
        cfg.with_fluid = false;
        Some(20)
    };
    let out = harness::sweep(&cfg, "out_stiffness_sweep".as_ref(), steps).expect("sweep");
    for (e, r) in &out.runs {
        match r {
            Ok(series) => {
                let s = series.samples.last().expect("samples");
                println!("E {e:>9.2e}: t {:.2} |ud| {:.4e}", s.t, s.magnitude());
            }
            Err(err) => println!("E {e:>9.2e}: {err}"),
        }
    }
}
