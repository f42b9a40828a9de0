//! Time stepping: relaxed fixed-point coupling of the monolithic solve with
//! the ALE mesh update, an inner Newton loop for convection, and the
//! trapezoidal displacement update.

use crate::ale::{apply_matching, commit, match_sliding_interface, AleMotion, AleState};
use crate::assembly::{assemble, ActiveParts, ConflictPolicy, Constraint, ConstraintKind, DofMap, FluidInputs, MonolithicSystem, StepParams, StructureInputs};
use crate::error::{FieldError, StepError};
use crate::linsolve::{solve_saddle, SaddleSolverConfig};
use crate::mesh::{BoundaryTag, Mesh, Subdomain};
use crate::rotation::{axis_velocity, decompose_displacement, recompose_displacement, rotational_displacement_at, RotationSpec, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Interface relaxation factor in (0, 1].
    pub relax: f64,
    /// Fixed-point tolerance on the relative interface displacement change.
    pub fp_tol: f64,
    /// Relative nonlinear residual tolerance of the Newton loop.
    pub newton_tol: f64,
    pub max_sweeps: usize,
    pub max_newton: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 1.0,
            relax: 0.7,
            fp_tol: 1e-6,
            newton_tol: 1e-8,
            max_sweeps: 50,
            max_newton: 12,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, name: &str, msg: String| {
            if !ok {
                errs.push(FieldError {
                    field: format!("{prefix}.{name}"),
                    message: msg,
                });
            }
        };
        check(self.dt.is_finite() && self.dt > 0.0, "dt", format!("must be positive, got {}", self.dt));
        check(self.t_end.is_finite() && self.t_end >= 0.0, "t_end", format!("must be nonnegative, got {}", self.t_end));
        check(self.relax > 0.0 && self.relax <= 1.0, "relax", format!("must satisfy 0 < relax ≤ 1, got {}", self.relax));
        check(self.fp_tol > 0.0, "fp_tol", format!("must be positive, got {}", self.fp_tol));
        check(self.newton_tol > 0.0, "newton_tol", format!("must be positive, got {}", self.newton_tol));
        check(self.max_sweeps > 0, "max_sweeps", "must be at least 1".into());
        check(self.max_newton > 0, "max_newton", "must be at least 1".into());
        errs
    }

    /// Number of steps to reach `t_end`.
    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Parabolic inflow profile ramped in smoothly from rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflow {
    pub peak: f64,
    pub ramp_time: f64,
    pub width: f64,
}

impl Inflow {
    pub fn ramp(&self, t: f64) -> f64 {
        if self.ramp_time <= 0.0 || t >= self.ramp_time {
            1.0
        } else {
            0.5 * (1.0 - (std::f64::consts::PI * t / self.ramp_time).cos())
        }
    }

    pub fn velocity(&self, y: f64, t: f64) -> f64 {
        4.0 * self.peak * y * (self.width - y) / (self.width * self.width) * self.ramp(t)
    }
}

/// `û_n = û_{n−1} + Δt/2 (v_n + v_{n−1})`.
pub fn trapezoid_update(u_prev: &[Vec2], v_new: &[Vec2], v_prev: &[Vec2], dt: f64) -> Vec<Vec2> {
    u_prev
        .iter()
        .zip(v_new.iter().zip(v_prev))
        .map(|(u, (a, b))| [u[0] + 0.5 * dt * (a[0] + b[0]), u[1] + 0.5 * dt * (a[1] + b[1])])
        .collect()
}

/// `(1 − ω) prev + ω new`.
pub fn relax_interface(prev: &[Vec2], new: &[Vec2], omega: f64) -> Vec<Vec2> {
    if omega == 1.0 {
        return new.to_vec();
    }
    prev.iter()
        .zip(new)
        .map(|(a, b)| [(1.0 - omega) * a[0] + omega * b[0], (1.0 - omega) * a[1] + omega * b[1]])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub step: usize,
    pub t: f64,
    /// Fluid velocity, zero off the fluid.
    pub v_f: Vec<Vec2>,
    /// Structure velocity, zero off the structure.
    pub v_s: Vec<Vec2>,
    pub p: Vec<f64>,
    pub u_s: Vec<Vec2>,
    pub ale: AleState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub t: f64,
    pub sweeps: usize,
    /// Newton solves per sweep.
    pub newton_iterations: Vec<usize>,
    pub krylov_iterations: usize,
    pub min_angle_deg: f64,
    pub fp_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub mesh: Mesh,
    pub rotation: RotationSpec,
    pub params: StepParams,
    pub loop_cfg: LoopConfig,
    pub solver: SaddleSolverConfig,
    pub inflow: Inflow,
    pub policy: ConflictPolicy,
    pub parts: ActiveParts,
    motion: Option<AleMotion>,
    structure: Vec<bool>,
    fluid: Vec<bool>,
    gamma: Vec<usize>,
    axis: Vec<usize>,
}

struct NewtonOutcome {
    v: Vec<Vec2>,
    p: Vec<f64>,
    iterations: usize,
    krylov: usize,
}

impl Simulation {
    pub fn new(
        mesh: Mesh,
        rotation: RotationSpec,
        params: StepParams,
        loop_cfg: LoopConfig,
        solver: SaddleSolverConfig,
        inflow: Inflow,
        parts: ActiveParts,
    ) -> Result<Self, StepError> {
        let motion = if parts.fluid && mesh.ring_size() > 0 {
            Some(AleMotion::new(&mesh)?)
        } else {
            None
        };
        let structure = mesh.node_mask(Subdomain::Structure);
        let fluid = mesh.fluid_node_mask();
        let gamma = mesh.tagged_nodes(BoundaryTag::InterfaceGamma);
        let axis = mesh.tagged_nodes(BoundaryTag::AxisGammaIn);
        Ok(Self {
            mesh,
            rotation,
            params,
            loop_cfg,
            solver,
            inflow,
            policy: ConflictPolicy::Priority,
            parts,
            motion,
            structure,
            fluid,
            gamma,
            axis,
        })
    }

    pub fn interface_nodes(&self) -> &[usize] {
        &self.gamma
    }

    pub fn axis_nodes(&self) -> &[usize] {
        &self.axis
    }

    pub fn structure_mask(&self) -> &[bool] {
        &self.structure
    }

    /// Fluid at rest, structure in rigid rotation.
    pub fn initial_state(&mut self) -> Result<State, StepError> {
        let n = self.mesh.num_nodes();
        let theta = self.rotation.theta(0.0);
        let mut v_s = vec![[0.0; 2]; n];
        let mut u_s = vec![[0.0; 2]; n];
        for v in 0..n {
            if self.structure[v] {
                v_s[v] = axis_velocity(self.mesh.reference[v], &self.rotation, 0.0);
                u_s[v] = rotational_displacement_at(self.mesh.reference[v], self.rotation.center, theta);
            }
        }
        let mut v_f = vec![[0.0; 2]; n];
        if self.parts.fluid {
            for &v in &self.gamma {
                v_f[v] = v_s[v];
            }
        }
        let mut ale = AleState::rest(&self.mesh);
        if let Some(motion) = &self.motion {
            ale = motion.displacement(&self.mesh, &u_s, theta, &ale.a_u, self.loop_cfg.dt)?;
            ale.w = vec![[0.0; 2]; n];
            commit(&mut self.mesh, &ale, &self.structure, &u_s)?;
        }
        Ok(State {
            step: 0,
            t: 0.0,
            v_f,
            v_s,
            p: vec![0.0; n],
            u_s,
            ale,
        })
    }

    fn constraints(&self, t: f64) -> Vec<Constraint> {
        let mut cs = Vec::new();
        if self.parts.fluid {
            for node in self.mesh.tagged_nodes(BoundaryTag::Wall) {
                cs.push(Constraint {
                    node,
                    value: [0.0, 0.0],
                    kind: ConstraintKind::Wall,
                });
            }
            for node in self.mesh.tagged_nodes(BoundaryTag::Inlet) {
                let y = self.mesh.reference[node][1];
                cs.push(Constraint {
                    node,
                    value: [self.inflow.velocity(y, t), 0.0],
                    kind: ConstraintKind::Inlet,
                });
            }
        }
        for &node in &self.axis {
            cs.push(Constraint {
                node,
                value: axis_velocity(self.mesh.reference[node], &self.rotation, t),
                kind: ConstraintKind::Axis,
            });
        }
        cs
    }

    fn is_linear(&self) -> bool {
        !self.parts.fluid || !self.params.convection || self.params.material.rho_f == 0.0
    }

    fn newton(&self, dofs: &DofMap, prev: &State, w: &[Vec2], theta: f64, z0: Vec<Vec2>, p0: Vec<f64>) -> Result<NewtonOutcome, StepError> {
        // refresh Dirichlet values and aliased nodes
        let mut z = dofs.scatter_velocity(&dofs.gather_velocity(&z0));
        let mut p = dofs.scatter_pressure(&dofs.gather_pressure(&p0));
        let mut history: Vec<f64> = Vec::new();
        let mut iterations = 0;
        let mut krylov = 0;
        let mut increases = 0;
        loop {
            let fin = FluidInputs {
                v_prev: &prev.v_f,
                z: &z,
                w,
                body_force: None,
            };
            let sin = StructureInputs {
                v_prev: &prev.v_s,
                u_prev: &prev.u_s,
                theta,
            };
            let sys = assemble(&self.mesh, dofs, &self.params, Some(&fin), Some(&sin))?;
            if !(self.is_linear() && iterations == 1) {
                let (rv, rp) = sys.residual(&dofs.gather_velocity(&z), &dofs.gather_pressure(&p));
                let num = rv.iter().chain(&rp).map(|x| x * x).sum::<f64>().sqrt();
                let den = sys.f.iter().chain(&sys.g).map(|x| x * x).sum::<f64>().sqrt();
                let res = if den > 0.0 { num / den } else { num };
                if let Some(&last) = history.last() {
                    increases = if res > last { increases + 1 } else { 0 };
                }
                history.push(res);
                if res <= self.loop_cfg.newton_tol {
                    break;
                }
                if increases >= 2 {
                    return Err(StepError::NewtonDivergence { history });
                }
                if iterations >= self.loop_cfg.max_newton {
                    return Err(StepError::NewtonMaxIterations { iterations, history });
                }
            } else {
                break;
            }
            let sol = solve_saddle(&sys.a, &sys.b, &sys.c, &sys.f, &sys.g, &self.solver)?;
            krylov += sol.outer_iterations;
            iterations += 1;
            z = dofs.scatter_velocity(&sol.v);
            p = dofs.scatter_pressure(&sol.p);
        }
        Ok(NewtonOutcome { v: z, p, iterations, krylov })
    }

    fn split_velocity(&self, v: &[Vec2]) -> (Vec<Vec2>, Vec<Vec2>) {
        let n = v.len();
        let mut v_f = vec![[0.0; 2]; n];
        let mut v_s = vec![[0.0; 2]; n];
        for i in 0..n {
            if self.fluid[i] && self.parts.fluid {
                v_f[i] = v[i];
            }
            if self.structure[i] {
                v_s[i] = v[i];
            }
        }
        (v_f, v_s)
    }

    fn structure_update(&self, prev: &State, v_s: &[Vec2], theta: f64) -> Vec<Vec2> {
        let mut u = trapezoid_update(&prev.u_s, v_s, &prev.v_s, self.loop_cfg.dt);
        for (i, x) in u.iter_mut().enumerate() {
            if !self.structure[i] {
                *x = [0.0; 2];
            }
        }
        for &node in &self.axis {
            u[node] = rotational_displacement_at(self.mesh.reference[node], self.rotation.center, theta);
        }
        u
    }

    fn interface_change(&self, a: &[Vec2], b: &[Vec2]) -> f64 {
        let mut diff: f64 = 0.0;
        let mut mag: f64 = 0.0;
        for &v in &self.gamma {
            diff = diff.max((a[v][0] - b[v][0]).abs()).max((a[v][1] - b[v][1]).abs());
            mag = mag.max(b[v][0].abs()).max(b[v][1].abs());
        }
        diff / mag.max(1.0)
    }

    /// The first Newton system of the step following `prev`, assembled on
    /// the current mesh with the matching of the new angle applied.
    pub fn linear_system(&mut self, prev: &State) -> Result<(DofMap, MonolithicSystem), StepError> {
        let t = (prev.step + 1) as f64 * self.loop_cfg.dt;
        let theta = self.rotation.theta(t);
        if self.motion.is_some() {
            let matching = match_sliding_interface(&self.mesh, theta)?;
            apply_matching(&mut self.mesh, &matching);
        }
        let dofs = DofMap::build(&self.mesh, self.parts, &self.constraints(t), self.policy, None)?;
        let z: Vec<Vec2> = (0..self.mesh.num_nodes())
            .map(|i| if self.structure[i] { prev.v_s[i] } else { prev.v_f[i] })
            .collect();
        let z = dofs.scatter_velocity(&dofs.gather_velocity(&z));
        let fin = FluidInputs {
            v_prev: &prev.v_f,
            z: &z,
            w: &prev.ale.w,
            body_force: None,
        };
        let sin = StructureInputs {
            v_prev: &prev.v_s,
            u_prev: &prev.u_s,
            theta,
        };
        let sys = assemble(&self.mesh, &dofs, &self.params, Some(&fin), Some(&sin))?;
        Ok((dofs, sys))
    }

    /// Advance one time step from `prev`.
    pub fn advance(&mut self, prev: &State) -> Result<(State, StepReport), StepError> {
        let dt = self.loop_cfg.dt;
        let step = prev.step + 1;
        let t = step as f64 * dt;
        let theta = self.rotation.theta(t);
        let theta_prev = self.rotation.theta(prev.t);
        let mut ale = prev.ale.clone();
        if self.motion.is_some() {
            let matching = match_sliding_interface(&self.mesh, theta)?;
            apply_matching(&mut self.mesh, &matching);
        }
        let dofs = DofMap::build(&self.mesh, self.parts, &self.constraints(t), self.policy, None)?;

        // predictor: carry the previous deformation along with the rotation
        let ud = decompose_displacement(&prev.u_s, &self.mesh.reference, self.rotation.center, theta_prev);
        let mut u_pred = recompose_displacement(&ud, &self.mesh.reference, self.rotation.center, theta);
        for (i, u) in u_pred.iter_mut().enumerate() {
            if !self.structure[i] {
                *u = [0.0; 2];
            }
        }
        if let Some(motion) = &self.motion {
            ale = motion.displacement(&self.mesh, &u_pred, theta, &prev.ale.a_u, dt)?;
            commit(&mut self.mesh, &ale, &self.structure, &u_pred)?;
        }

        let mut z: Vec<Vec2> = (0..self.mesh.num_nodes())
            .map(|i| if self.structure[i] { prev.v_s[i] } else { prev.v_f[i] })
            .collect();
        let mut p = prev.p.clone();
        let mut u_last = u_pred;
        let mut history = Vec::new();
        let mut newton_iterations = Vec::new();
        let mut krylov = 0;
        for sweep in 1..=self.loop_cfg.max_sweeps {
            let out = self.newton(&dofs, prev, &ale.w, theta, z, p)?;
            newton_iterations.push(out.iterations);
            krylov += out.krylov;
            z = out.v;
            p = out.p;
            let (v_f, v_s) = self.split_velocity(&z);
            let u_new = self.structure_update(prev, &v_s, theta);
            let change = self.interface_change(&u_last, &u_new);
            history.push(change);
            if change <= self.loop_cfg.fp_tol || self.motion.is_none() {
                let state = State {
                    step,
                    t,
                    v_f,
                    v_s,
                    p,
                    u_s: u_new,
                    ale,
                };
                let report = StepReport {
                    step,
                    t,
                    sweeps: sweep,
                    newton_iterations,
                    krylov_iterations: krylov,
                    min_angle_deg: self.mesh.quality().min_angle_deg,
                    fp_history: history,
                };
                return Ok((state, report));
            }
            let u_star = relax_interface(&u_last, &u_new, self.loop_cfg.relax);
            if let Some(motion) = &self.motion {
                ale = motion.displacement(&self.mesh, &u_star, theta, &prev.ale.a_u, dt)?;
                commit(&mut self.mesh, &ale, &self.structure, &u_new)?;
            }
            u_last = u_new;
        }
        Err(StepError::FixedPointDivergence {
            step,
            sweeps: self.loop_cfg.max_sweeps,
            history,
        })
    }
}
