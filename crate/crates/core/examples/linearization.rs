//! Taylor test of the St. Venant–Kirchhoff stress linearization: halving
//! the perturbation should divide the remainder by four.

use rotorfsi::assembly::MaterialParams;
use rotorfsi::checks::linearization_ratios;

fn main() {
    let material = MaterialParams::default();
    for norm in [1e-1, 1e-2] {
        let r = linearization_ratios(7, 8, norm, &material);
        println!("|G| = {norm:e}: ratios {r:.4?}");
    }
}
