//! Element matrices for P1 triangles. Vector-valued element matrices are
//! 6×6 with local index `2a + c` (node `a`, component `c`).

use crate::rotation::{Mat2, Vec2};

pub type Mat3 = [[f64; 3]; 3];
pub type Mat6 = [[f64; 6]; 6];

/// Barycentric coordinates of the three-point rule, exact for quadratics.
/// Each point carries weight `area / 3`.
pub const QUAD3: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Interpolate nodal vectors at barycentric point `l`.
#[inline]
pub fn interp(l: &[f64; 3], v: &[Vec2; 3]) -> Vec2 {
    [
        l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
        l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
    ]
}

/// `∫ λ_a λ_b`.
pub fn mass(area: f64) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for l in &QUAD3 {
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += area / 3.0 * l[a] * l[b];
            }
        }
    }
    m
}

/// `∫ ∇λ_a · ∇λ_b`.
pub fn laplacian(area: f64, g: &[Vec2; 3]) -> Mat3 {
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = area * dot(g[a], g[b]);
        }
    }
    k
}

/// `coef · ∫ ε(u) : ε(φ)`.
pub fn strain_product(area: f64, g: &[Vec2; 3], coef: f64) -> Mat6 {
    let mut k = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let gg = dot(g[a], g[b]);
            for c in 0..2 {
                for d in 0..2 {
                    let diag = if c == d { gg } else { 0.0 };
                    k[2 * a + c][2 * b + d] = coef * area * 0.5 * (diag + g[a][d] * g[b][c]);
                }
            }
        }
    }
    k
}

/// Plane linear elasticity `∫ (2μ ε(u) + λ tr ε(u) I) : ε(φ)`.
pub fn elasticity(area: f64, g: &[Vec2; 3], lambda: f64, mu: f64) -> Mat6 {
    let mut k = strain_product(area, g, 2.0 * mu);
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    k[2 * a + c][2 * b + d] += lambda * area * g[a][c] * g[b][d];
                }
            }
        }
    }
    k
}

/// `Rb K Rbᵀ` with `Rb` block-diagonal copies of `r`: the matrix of the
/// form `(K Rᵀu, Rᵀφ)`.
pub fn rotate(k: &Mat6, r: &Mat2) -> Mat6 {
    let mut out = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    let mut s = 0.0;
                    for cp in 0..2 {
                        for dp in 0..2 {
                            s += r[c][cp] * k[2 * a + cp][2 * b + dp] * r[d][dp];
                        }
                    }
                    out[2 * a + c][2 * b + d] = s;
                }
            }
        }
    }
    out
}

/// `∫ σ : ε(Rᵀφ)` for a constant symmetric stress `sigma`.
pub fn stress_load(area: f64, g: &[Vec2; 3], sigma: &Mat2, r: &Mat2) -> [f64; 6] {
    let mut f = [0.0; 6];
    for a in 0..3 {
        for c in 0..2 {
            // Rᵀ e_c is row c of R
            let e = r[c];
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += sigma[i][j] * e[i] * g[a][j];
                }
            }
            f[2 * a + c] = area * s;
        }
    }
    f
}

/// `∫ (β·∇u_c) φ_c` for a P1 advection field `beta`, identical in each
/// component.
pub fn advection(area: f64, g: &[Vec2; 3], beta: &[Vec2; 3]) -> Mat3 {
    let mut k = [[0.0; 3]; 3];
    for l in &QUAD3 {
        let b = interp(l, beta);
        for a in 0..3 {
            for bb in 0..3 {
                k[a][bb] += area / 3.0 * l[a] * dot(b, g[bb]);
            }
        }
    }
    k
}

/// `∫ (u·∇z) · φ` for a P1 field `z` (constant gradient).
pub fn reaction(area: f64, grad_z: &Mat2) -> Mat6 {
    let m = mass(area);
    let mut k = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    k[2 * a + c][2 * b + d] = m[a][b] * grad_z[c][d];
                }
            }
        }
    }
    k
}

/// `∇z` with `grad[c][d] = ∂_d z_c`.
pub fn gradient(g: &[Vec2; 3], z: &[Vec2; 3]) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for a in 0..3 {
        for c in 0..2 {
            for d in 0..2 {
                out[c][d] += z[a][c] * g[a][d];
            }
        }
    }
    out
}

/// `∫ (β·∇u)(β·∇φ)` for a P1 advection field.
pub fn streamline_diffusion(area: f64, g: &[Vec2; 3], beta: &[Vec2; 3]) -> Mat3 {
    let mut k = [[0.0; 3]; 3];
    for l in &QUAD3 {
        let b = interp(l, beta);
        let s = [dot(b, g[0]), dot(b, g[1]), dot(b, g[2])];
        for a in 0..3 {
            for bb in 0..3 {
                k[a][bb] += area / 3.0 * s[a] * s[bb];
            }
        }
    }
    k
}

/// `∫ (∂_d λ_b) λ_j`: rows are pressure nodes, columns are `2b + d`.
pub fn divergence(area: f64, g: &[Vec2; 3]) -> [[f64; 6]; 3] {
    let mut b = [[0.0; 6]; 3];
    for row in b.iter_mut() {
        for a in 0..3 {
            for d in 0..2 {
                row[2 * a + d] = g[a][d] * area / 3.0;
            }
        }
    }
    b
}

/// Longest edge.
pub fn diameter(x: &[Vec2; 3]) -> f64 {
    let e = |i: usize, j: usize| (x[i][0] - x[j][0]).hypot(x[i][1] - x[j][1]);
    e(0, 1).max(e(1, 2)).max(e(2, 0))
}

/// Expand a scalar 3×3 matrix to the identity-coupled 6×6 form.
pub fn expand(k: &Mat3, coef: f64) -> Mat6 {
    let mut out = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..2 {
                out[2 * a + c][2 * b + c] = coef * k[a][b];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::p1_gradients;
    use crate::rotation::rotation_matrix;

    const UNIT: [Vec2; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    #[test]
    fn unit_triangle_laplacian() {
        let (area, g) = p1_gradients(UNIT);
        let k = laplacian(area, &g);
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((k[a][b] - expect[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn viscous_form_is_laplacian_plus_transpose_coupling() {
        // with coefficient 2: ∫ ∇u:∇φ + ∫ ∇u:∇φᵀ
        let (area, g) = p1_gradients(UNIT);
        let k = strain_product(area, &g, 2.0);
        let l = laplacian(area, &g);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..2 {
                    for d in 0..2 {
                        let lap = if c == d { l[a][b] } else { 0.0 };
                        let expect = lap + area * g[a][d] * g[b][c];
                        assert!((k[2 * a + c][2 * b + d] - expect).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn consistent_mass() {
        let m = mass(0.5);
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { 0.5 / 6.0 } else { 0.5 / 12.0 };
                assert!((m[a][b] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rigid_modes_are_stress_free() {
        let x = [[0.1, 0.2], [0.7, 0.3], [0.2, 0.9]];
        let (area, g) = p1_gradients(x);
        let k = elasticity(area, &g, 3.0, 2.0);
        let modes: [[f64; 6]; 3] = [
            [1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
            [-x[0][1], x[0][0], -x[1][1], x[1][0], -x[2][1], x[2][0]],
        ];
        for m in &modes {
            for row in &k {
                let s: f64 = row.iter().zip(m).map(|(a, b)| a * b).sum();
                assert!(s.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rotated_stiffness_matches_rotated_triangle() {
        let x = [[0.1, 0.2], [0.7, 0.3], [0.2, 0.9]];
        let r = rotation_matrix(0.83);
        let (area, g) = p1_gradients(x);
        let kr = rotate(&elasticity(area, &g, 3.0, 2.0), &r);
        let xr = x.map(|p| crate::rotation::mat_vec(&r, p));
        let (area2, g2) = p1_gradients(xr);
        let k2 = elasticity(area2, &g2, 3.0, 2.0);
        for i in 0..6 {
            for j in 0..6 {
                assert!((kr[i][j] - k2[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_field_is_exactly_divergence_free() {
        let x = [[0.1, 0.2], [0.7, 0.3], [0.2, 0.9]];
        let (area, g) = p1_gradients(x);
        let b = divergence(area, &g);
        let v: Vec<f64> = x.iter().flat_map(|p| [-(p[1] - 0.4), p[0] - 0.3]).collect();
        for row in &b {
            let s: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(s.abs() < 1e-15);
        }
    }
}
