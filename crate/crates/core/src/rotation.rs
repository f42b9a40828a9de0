//! Prescribed rotation and the rotation/deformation split of structure
//! displacements.

pub type Vec2 = [f64; 2];
/// Row-major 2×2 matrix.
pub type Mat2 = [[f64; 2]; 2];

pub fn rotation_matrix(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// dR/dθ.
pub fn rotation_matrix_derivative(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[-s, -c], [c, -s]]
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

#[inline]
pub fn mat_t_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[1][0] * v[1], m[0][1] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// One piece of a piecewise-constant angular-velocity schedule, active from
/// `start` until the next segment begins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSegment {
    pub start: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationSpec {
    pub center: Vec2,
    pub theta0: f64,
    /// Sorted by `start`; the first segment starts at 0.
    segments: Vec<OmegaSegment>,
}

impl RotationSpec {
    pub fn constant(center: Vec2, omega: f64) -> Self {
        Self {
            center,
            theta0: 0.0,
            segments: vec![OmegaSegment { start: 0.0, omega }],
        }
    }

    /// Segments must start at 0 with strictly increasing start times.
    pub fn piecewise(center: Vec2, theta0: f64, segments: Vec<OmegaSegment>) -> Option<Self> {
        if segments.is_empty() || segments[0].start != 0.0 {
            return None;
        }
        if segments.windows(2).any(|w| !(w[1].start > w[0].start)) {
            return None;
        }
        if segments.iter().any(|s| !s.omega.is_finite() || !s.start.is_finite()) {
            return None;
        }
        Some(Self {
            center,
            theta0,
            segments,
        })
    }

    pub fn segments(&self) -> &[OmegaSegment] {
        &self.segments
    }

    /// Angular velocity, taken from the right at breakpoints.
    pub fn omega(&self, t: f64) -> f64 {
        let k = self.segments.partition_point(|s| s.start <= t);
        self.segments[k.saturating_sub(1)].omega
    }

    /// Accumulated angle, exact for the piecewise-constant schedule and never
    /// reduced modulo 2π.
    pub fn theta(&self, t: f64) -> f64 {
        let mut theta = self.theta0;
        for (k, seg) in self.segments.iter().enumerate() {
            if t <= seg.start {
                break;
            }
            let end = self.segments.get(k + 1).map_or(t, |n| n.start.min(t));
            theta += seg.omega * (end - seg.start);
        }
        theta
    }

    pub fn matrix(&self, t: f64) -> Mat2 {
        rotation_matrix(self.theta(t))
    }
}

/// `(R − I)(x̂ − x̂₀)`.
pub fn rotational_displacement_at(x: Vec2, center: Vec2, theta: f64) -> Vec2 {
    let r = rotation_matrix(theta);
    let d = [x[0] - center[0], x[1] - center[1]];
    let rd = mat_vec(&r, d);
    [rd[0] - d[0], rd[1] - d[1]]
}

pub fn rotational_displacement(x: Vec2, spec: &RotationSpec, t: f64) -> Vec2 {
    rotational_displacement_at(x, spec.center, spec.theta(t))
}

/// `û_d = Rᵀ(û_s − û_θ)` for every node.
pub fn decompose_displacement(u_s: &[Vec2], x_ref: &[Vec2], center: Vec2, theta: f64) -> Vec<Vec2> {
    let r = rotation_matrix(theta);
    u_s.iter()
        .zip(x_ref)
        .map(|(u, &x)| {
            let ut = rotational_displacement_at(x, center, theta);
            mat_t_vec(&r, [u[0] - ut[0], u[1] - ut[1]])
        })
        .collect()
}

/// `û_s = û_θ + R û_d` for every node.
pub fn recompose_displacement(u_d: &[Vec2], x_ref: &[Vec2], center: Vec2, theta: f64) -> Vec<Vec2> {
    let r = rotation_matrix(theta);
    u_d.iter()
        .zip(x_ref)
        .map(|(d, &x)| {
            let ut = rotational_displacement_at(x, center, theta);
            let rd = mat_vec(&r, *d);
            [ut[0] + rd[0], ut[1] + rd[1]]
        })
        .collect()
}

/// `ω R'(θ)(x̂ − x̂₀)`, the time derivative of the rotational displacement.
pub fn axis_velocity(x: Vec2, spec: &RotationSpec, t: f64) -> Vec2 {
    let w = spec.omega(t);
    let dr = rotation_matrix_derivative(spec.theta(t));
    let v = mat_vec(&dr, [x[0] - spec.center[0], x[1] - spec.center[1]]);
    [w * v[0], w * v[1]]
}

/// Velocity boundary values for each node on the axis circle.
pub fn dirichlet_velocity_on_axis(axis_nodes: &[Vec2], spec: &RotationSpec, t: f64) -> Vec<Vec2> {
    axis_nodes.iter().map(|&x| axis_velocity(x, spec, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quarter_turn() {
        let r = rotation_matrix(PI / 2.0);
        assert!(r[0][0].abs() < 1e-16 && (r[0][1] + 1.0).abs() < 1e-16);
        let u = rotational_displacement_at([1.0, 0.0], [0.0, 0.0], PI / 2.0);
        assert!((u[0] + 1.0).abs() < 1e-15 && (u[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_integrates_exactly() {
        let spec = RotationSpec::piecewise(
            [0.0, 0.0],
            0.25,
            vec![
                OmegaSegment { start: 0.0, omega: 1.0 },
                OmegaSegment { start: 2.0, omega: -0.5 },
                OmegaSegment { start: 3.0, omega: 2.0 },
            ],
        )
        .unwrap();
        assert_eq!(spec.theta(1.0), 1.25);
        assert_eq!(spec.theta(2.5), 0.25 + 2.0 - 0.25);
        assert_eq!(spec.theta(4.0), 0.25 + 2.0 - 0.5 + 2.0);
        assert_eq!(spec.omega(2.0), -0.5);
    }

    #[test]
    fn theta_is_not_reduced() {
        let spec = RotationSpec::constant([0.0, 0.0], 1.0);
        assert!(spec.theta(100.0) > 2.0 * PI * 15.0);
    }

    #[test]
    fn rejects_unsorted_schedule() {
        let segs = vec![OmegaSegment { start: 0.0, omega: 1.0 }, OmegaSegment { start: 0.0, omega: 2.0 }];
        assert!(RotationSpec::piecewise([0.0, 0.0], 0.0, segs).is_none());
    }

    #[test]
    fn zero_omega_gives_zero_velocity() {
        let spec = RotationSpec::constant([0.1, 0.2], 0.0);
        assert_eq!(axis_velocity([0.3, 0.1], &spec, 0.7), [0.0, 0.0]);
    }
}
