//! Closed-form St. Venant–Kirchhoff stress in a rotating frame and its
//! linearization about zero deformation gradient.

use crate::rotation::{mat_mul, rotation_matrix, transpose, Mat2};

fn add(a: &Mat2, b: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] + s * b[0][0], a[0][1] + s * b[0][1]], [a[1][0] + s * b[1][0], a[1][1] + s * b[1][1]]]
}

fn scaled(a: &Mat2, s: f64) -> Mat2 {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

const I: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// `P(H) = R (I + H) (λ/2 tr(H + Hᵀ + HᵀH) I + μ (H + Hᵀ + HᵀH))`.
pub fn piola_full(h: &Mat2, theta: f64, lambda: f64, mu: f64) -> Mat2 {
    let ht = transpose(h);
    let g = add(&add(h, &ht, 1.0), &mat_mul(&ht, h), 1.0);
    let tr = g[0][0] + g[1][1];
    let s = add(&scaled(&I, 0.5 * lambda * tr), &g, mu);
    mat_mul(&rotation_matrix(theta), &mat_mul(&add(&I, h, 1.0), &s))
}

/// `R (2μ ε + λ tr(ε) I)` with `ε = sym(H)`.
pub fn piola_linear(h: &Mat2, theta: f64, lambda: f64, mu: f64) -> Mat2 {
    let e = scaled(&add(h, &transpose(h), 1.0), 0.5);
    let tr = e[0][0] + e[1][1];
    let s = add(&scaled(&I, lambda * tr), &e, 2.0 * mu);
    mat_mul(&rotation_matrix(theta), &s)
}

pub fn frobenius(a: &Mat2) -> f64 {
    (a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2)).sqrt()
}

/// `‖P_full(sH) − P_lin(sH)‖` for `s = 1` and `s = ½`.
pub fn linearization_errors(h: &Mat2, theta: f64, lambda: f64, mu: f64) -> (f64, f64) {
    let err = |s: f64| {
        let hs = scaled(h, s);
        frobenius(&add(&piola_full(&hs, theta, lambda, mu), &piola_linear(&hs, theta, lambda, mu), -1.0))
    };
    (err(1.0), err(0.5))
}
