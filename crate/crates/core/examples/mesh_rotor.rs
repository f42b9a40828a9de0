//! Generate the channel-and-rotor mesh and print its quality report.
//!
//! `cargo run --release --example mesh_rotor -- [h]`

use rotorfsi::harness::quality_report;
use rotorfsi::mesh::{build_rotor_channel_mesh, ChannelRotorGeometry};

fn main() {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let geom = ChannelRotorGeometry::default();
    let mesh = build_rotor_channel_mesh(&geom, h).expect("mesh generation failed");
    print!("{}", quality_report(&mesh));
}
