//! Blade-tip probe, probe CSV and the per-step progress log.

use std::fmt::Write as _;

use crate::mesh::{Mesh, Subdomain};
use crate::rotation::{decompose_displacement, Vec2};
use crate::timeloop::StepReport;

pub const CSV_HEADER: &str = "E,t,ud_x,ud_y,|ud|";
pub const PROGRESS_HEADER: &str = "step,t,sweeps,newton,krylov,min_angle_deg";

/// Structure node farthest from the rotation center on the arm pointing
/// along +x in the reference configuration. Ties go to the lowest index.
pub fn tip_node(mesh: &Mesh, half_width: f64) -> Option<usize> {
    let c = mesh.center;
    let on_structure = mesh.node_mask(Subdomain::Structure);
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in mesh.reference.iter().enumerate() {
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        if !on_structure[i] || dx <= 0.0 || dy.abs() > half_width + 1e-12 {
            continue;
        }
        let r = dx.hypot(dy);
        if best.map_or(true, |(_, rb)| r > rb + 1e-12) {
            best = Some((i, r));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub t: f64,
    /// Deformation displacement with the rotation removed.
    pub ud: Vec2,
}

impl ProbeSample {
    pub fn magnitude(&self) -> f64 {
        self.ud[0].hypot(self.ud[1])
    }
}

/// Deformation displacement of `node` for structure displacement `u_s`
/// at angle `theta`.
pub fn sample_tip(mesh: &Mesh, u_s: &[Vec2], node: usize, theta: f64, t: f64) -> ProbeSample {
    let ud = decompose_displacement(&u_s[node..=node], &mesh.reference[node..=node], mesh.center, theta);
    ProbeSample { t, ud: ud[0] }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub node: usize,
    pub e: f64,
    pub samples: Vec<ProbeSample>,
}

impl ProbeSeries {
    pub fn push(&mut self, s: ProbeSample) {
        debug_assert!(self.samples.last().map_or(true, |l| s.t > l.t));
        self.samples.push(s);
    }

    /// Rows without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let _ = writeln!(out, "{:?},{:?},{:?},{:?},{:?}", self.e, s.t, s.ud[0], s.ud[1], s.magnitude());
        }
        out
    }

    pub fn at(&self, t: f64) -> Option<&ProbeSample> {
        self.samples.iter().find(|s| (s.t - t).abs() < 1e-9)
    }
}

pub fn progress_line(r: &StepReport) -> String {
    let newton: usize = r.newton_iterations.iter().sum();
    format!("{},{:?},{},{},{},{:.9}", r.step, r.t, r.sweeps, newton, r.krylov_iterations, r.min_angle_deg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_plain_decimal_points() {
        let mut s = ProbeSeries { node: 0, e: 2.5e6, samples: vec![] };
        s.push(ProbeSample { t: 0.01, ud: [3.0, 4.0] });
        assert_eq!(s.csv_rows(), "2500000.0,0.01,3.0,4.0,5.0\n");
        assert!(!s.csv_rows().contains(';'));
    }

    #[test]
    fn progress_columns() {
        let r = StepReport {
            step: 2,
            t: 0.02,
            sweeps: 3,
            newton_iterations: vec![2, 1, 1],
            krylov_iterations: 40,
            min_angle_deg: 21.5,
            fp_history: vec![],
        };
        assert_eq!(progress_line(&r), "2,0.02,3,4,40,21.500000000");
        assert_eq!(PROGRESS_HEADER.split(',').count(), progress_line(&r).split(',').count());
    }
}
