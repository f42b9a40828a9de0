//! Run configuration: TOML text with fixed sections. Every field is
//! required unless marked optional in `docs/config.md`; unknown keys are
//! rejected and all problems are reported together.

use toml::{Table, Value};

use crate::assembly::{Discretization, Linearization, MaterialParams};
use crate::error::{ConfigError, FieldError};
use crate::linsolve::{GmresConfig, InnerConfig, SaddleSolverConfig, SmootherKind, SolverKind};
use crate::mesh::{ChannelRotorGeometry, MeshOptions};
use crate::rotation::{OmegaSegment, RotationSpec};
use crate::timeloop::{Inflow, LoopConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSettings {
    pub h: f64,
    pub h_structure: Option<f64>,
    pub ring_nodes: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationSettings {
    pub theta0: f64,
    /// `(start time, ω)` pairs; the first starts at 0.
    pub schedule: Vec<OmegaSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflowSettings {
    pub peak: f64,
    pub ramp_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: String,
    /// Simulated seconds between VTK snapshots; 0 disables them.
    pub vtk_interval: f64,
    /// Write the first step's matrices in Matrix Market format.
    pub dump_matrices: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: ChannelRotorGeometry,
    pub mesh: MeshSettings,
    pub materials: MaterialParams,
    pub rotation: RotationSettings,
    pub inflow: InflowSettings,
    pub loop_cfg: LoopConfig,
    pub discretization: Discretization,
    pub linearization: Linearization,
    /// Solve the fluid together with the structure; `false` runs the
    /// rotating structure alone.
    pub with_fluid: bool,
    pub solver: SaddleSolverConfig,
    pub output: OutputSettings,
    /// Young's moduli for the `sweep` subcommand.
    pub sweep_e: Vec<f64>,
}

impl RunConfig {
    pub fn mesh_options(&self) -> MeshOptions {
        let mut o = MeshOptions::new(self.mesh.h);
        o.h_structure = self.mesh.h_structure;
        o.ring_nodes = self.mesh.ring_nodes;
        o.seed = self.mesh.seed;
        o
    }

    pub fn rotation_spec(&self) -> RotationSpec {
        RotationSpec::piecewise(self.geometry.center, self.rotation.theta0, self.rotation.schedule.clone())
            .expect("schedule validated at load")
    }

    pub fn inflow(&self) -> Inflow {
        Inflow {
            peak: self.inflow.peak,
            ramp_time: self.inflow.ramp_time,
            width: self.geometry.width,
        }
    }

    fn validate(&self) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut push = |field: &str, message: String| {
            errs.push(FieldError {
                field: field.into(),
                message,
            })
        };
        for v in self.geometry.violations() {
            push("geometry", v);
        }
        if !(self.mesh.h > 0.0) {
            push("mesh.h", format!("must be positive, got {}", self.mesh.h));
        }
        if let Some(hs) = self.mesh.h_structure {
            if !(hs > 0.0) {
                push("mesh.h_structure", format!("must be positive, got {hs}"));
            }
        }
        if let Some(m) = self.mesh.ring_nodes {
            if m < 16 {
                push("mesh.ring_nodes", format!("must be at least 16, got {m}"));
            }
        }
        if !(self.rotation.theta0.is_finite()) {
            push("rotation.theta0", "must be finite".into());
        }
        let sched = &self.rotation.schedule;
        if sched.is_empty() || sched[0].start != 0.0 {
            push("rotation.schedule", "first segment must start at t = 0".into());
        }
        if sched.windows(2).any(|w| !(w[1].start > w[0].start)) {
            push("rotation.schedule", "segment start times must increase strictly".into());
        }
        if sched.iter().any(|s| !s.omega.is_finite()) {
            push("rotation.schedule", "ω must be finite".into());
        }
        if !(self.inflow.peak >= 0.0 && self.inflow.peak.is_finite()) {
            push("inflow.peak", format!("must be nonnegative, got {}", self.inflow.peak));
        }
        if !(self.inflow.ramp_time >= 0.0) {
            push("inflow.ramp_time", format!("must be nonnegative, got {}", self.inflow.ramp_time));
        }
        let d = &self.discretization;
        if !(d.delta0 > 0.0 && d.delta0 < 1.0) {
            push("discretization.delta0", format!("must satisfy 0 < δ₀ < 1, got {}", d.delta0));
        }
        if !(d.delta_supg >= 0.0) {
            push("discretization.delta_supg", format!("must be nonnegative, got {}", d.delta_supg));
        }
        if d.viscous_factor != 1.0 && d.viscous_factor != 2.0 {
            push("discretization.viscous_factor", format!("must be 1 or 2, got {}", d.viscous_factor));
        }
        let s = &self.solver;
        if !(s.outer.tol > 0.0) {
            push("solver.tol", format!("must be positive, got {}", s.outer.tol));
        }
        if s.outer.restart == 0 {
            push("solver.restart", "must be at least 1".into());
        }
        if s.outer.max_iter == 0 {
            push("solver.max_iter", "must be at least 1".into());
        }
        if !(s.inner.tol > 0.0 && s.inner.tol < 1.0) {
            push("solver.inner_tol", format!("must satisfy 0 < tol < 1, got {}", s.inner.tol));
        }
        if !(self.output.vtk_interval >= 0.0) {
            push("output.vtk_interval", format!("must be nonnegative, got {}", self.output.vtk_interval));
        }
        if self.sweep_e.iter().any(|e| !(*e > 0.0)) {
            push("sweep.e", "all entries must be positive".into());
        }
        if self.sweep_e.windows(2).any(|w| !(w[1] > w[0])) {
            push("sweep.e", "entries must be strictly ascending".into());
        }
        errs.extend(self.materials.validate("materials"));
        errs.extend(self.loop_cfg.validate("loop"));
        errs
    }
}

struct Reader {
    errs: Vec<FieldError>,
}

impl Reader {
    fn err(&mut self, field: String, message: impl Into<String>) {
        self.errs.push(FieldError {
            field,
            message: message.into(),
        });
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str, keys: &[&str]) -> Option<&'a Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                for k in t.keys() {
                    if !keys.contains(&k.as_str()) {
                        self.err(format!("{name}.{k}"), "unknown key");
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.err(name.into(), "must be a table");
                None
            }
        }
    }

    fn raw<'a>(&mut self, sec: Option<&'a Table>, sname: &str, key: &str, required: bool) -> Option<&'a Value> {
        let v = sec.and_then(|t| t.get(key));
        if v.is_none() && required {
            self.err(format!("{sname}.{key}"), "required field is missing");
        }
        v
    }

    fn as_f64(&mut self, v: &Value, field: String) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.err(field, "expected a number");
                None
            }
        }
    }

    fn f64(&mut self, sec: Option<&Table>, sname: &str, key: &str) -> f64 {
        match self.raw(sec, sname, key, true) {
            Some(v) => self.as_f64(v, format!("{sname}.{key}")).unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    fn opt_f64(&mut self, sec: Option<&Table>, sname: &str, key: &str) -> Option<f64> {
        let v = self.raw(sec, sname, key, false)?;
        self.as_f64(v, format!("{sname}.{key}"))
    }

    fn int(&mut self, sec: Option<&Table>, sname: &str, key: &str, required: bool) -> Option<u64> {
        match self.raw(sec, sname, key, required)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            _ => {
                self.err(format!("{sname}.{key}"), "expected a nonnegative integer");
                None
            }
        }
    }

    fn string(&mut self, sec: Option<&Table>, sname: &str, key: &str) -> Option<String> {
        match self.raw(sec, sname, key, true)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.err(format!("{sname}.{key}"), "expected a string");
                None
            }
        }
    }

    fn boolean(&mut self, sec: Option<&Table>, sname: &str, key: &str) -> bool {
        match self.raw(sec, sname, key, true) {
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.err(format!("{sname}.{key}"), "expected true or false");
                false
            }
            None => false,
        }
    }

    fn numbers(&mut self, v: &Value, field: &str) -> Vec<f64> {
        match v {
            Value::Array(a) => a
                .iter()
                .filter_map(|x| self.as_f64(x, field.to_string()))
                .collect(),
            _ => {
                self.err(field.into(), "expected an array of numbers");
                Vec::new()
            }
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn choice<T: Copy>(r: &mut Reader, s: Option<String>, field: &str, options: &[(&str, T)], fallback: T) -> T {
    let Some(s) = s else { return fallback };
    match options.iter().find(|(k, _)| *k == s) {
        Some((_, v)) => *v,
        None => {
            let names: Vec<&str> = options.iter().map(|(k, _)| *k).collect();
            r.err(field.into(), format!("unknown value {s:?}, expected one of {}", names.join(", ")));
            fallback
        }
    }
}

const SOLVERS: [(&str, SolverKind); 3] = [
    ("fgmres", SolverKind::Fgmres),
    ("direct", SolverKind::Direct),
    ("unpreconditioned", SolverKind::Unpreconditioned),
];
const SMOOTHERS: [(&str, SmootherKind); 2] = [("ilu0", SmootherKind::Ilu0), ("gauss-seidel", SmootherKind::GaussSeidel)];
const LINEARIZATIONS: [(&str, Linearization); 2] = [("newton", Linearization::Newton), ("picard", Linearization::Picard)];

fn name_of<T: PartialEq + Copy>(options: &[(&'static str, T)], v: T) -> &'static str {
    options.iter().find(|(_, x)| *x == v).map(|(k, _)| *k).unwrap_or("?")
}

const SECTIONS: [&str; 11] = [
    "geometry",
    "mesh",
    "materials",
    "rotation",
    "inflow",
    "loop",
    "discretization",
    "physics",
    "solver",
    "output",
    "sweep",
];

/// Parse and validate configuration text.
pub fn load_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut r = Reader { errs: Vec::new() };
    for k in root.keys() {
        if !SECTIONS.contains(&k.as_str()) {
            r.err(k.clone(), "unknown section");
        }
    }

    let g = r.section(&root, "geometry", &["length", "width", "cross_length", "cross_width", "buffer_radius", "axis_radius", "center"]);
    let center = match r.raw(g, "geometry", "center", true) {
        Some(v) => {
            let c = r.numbers(v, "geometry.center");
            if c.len() == 2 {
                [c[0], c[1]]
            } else {
                r.err("geometry.center".into(), "expected two numbers");
                [f64::NAN; 2]
            }
        }
        None => [f64::NAN; 2],
    };
    let geometry = ChannelRotorGeometry {
        length: r.f64(g, "geometry", "length"),
        width: r.f64(g, "geometry", "width"),
        cross_length: r.f64(g, "geometry", "cross_length"),
        cross_width: r.f64(g, "geometry", "cross_width"),
        buffer_radius: r.f64(g, "geometry", "buffer_radius"),
        axis_radius: r.f64(g, "geometry", "axis_radius"),
        center,
    };

    let m = r.section(&root, "mesh", &["h", "h_structure", "ring_nodes", "seed"]);
    let mesh = MeshSettings {
        h: r.f64(m, "mesh", "h"),
        h_structure: r.opt_f64(m, "mesh", "h_structure"),
        ring_nodes: r.int(m, "mesh", "ring_nodes", false).map(|x| x as usize),
        seed: r.int(m, "mesh", "seed", false).unwrap_or(0),
    };

    let mt = r.section(&root, "materials", &["rho_f", "mu_f", "rho_s", "e", "nu"]);
    let materials = MaterialParams {
        rho_f: r.f64(mt, "materials", "rho_f"),
        mu_f: r.f64(mt, "materials", "mu_f"),
        rho_s: r.f64(mt, "materials", "rho_s"),
        e: r.f64(mt, "materials", "e"),
        nu: r.f64(mt, "materials", "nu"),
    };

    let ro = r.section(&root, "rotation", &["theta0", "omega", "schedule"]);
    let theta0 = r.f64(ro, "rotation", "theta0");
    let omega = r.raw(ro, "rotation", "omega", false).cloned();
    let schedule_v = r.raw(ro, "rotation", "schedule", false).cloned();
    let schedule = match (omega, schedule_v) {
        (Some(w), None) => {
            let w = r.as_f64(&w, "rotation.omega".into()).unwrap_or(f64::NAN);
            vec![OmegaSegment { start: 0.0, omega: w }]
        }
        (None, Some(Value::Array(rows))) => {
            let mut segs = Vec::new();
            for row in &rows {
                let pair = r.numbers(row, "rotation.schedule");
                if pair.len() == 2 {
                    segs.push(OmegaSegment {
                        start: pair[0],
                        omega: pair[1],
                    });
                } else {
                    r.err("rotation.schedule".into(), "each entry must be [start, omega]");
                }
            }
            segs
        }
        (Some(_), Some(_)) => {
            r.err("rotation".into(), "give either omega or schedule, not both");
            vec![OmegaSegment { start: 0.0, omega: 0.0 }]
        }
        (None, Some(_)) => {
            r.err("rotation.schedule".into(), "expected an array of [start, omega] pairs");
            vec![OmegaSegment { start: 0.0, omega: 0.0 }]
        }
        (None, None) => {
            r.err("rotation.omega".into(), "required field is missing (or give rotation.schedule)");
            vec![OmegaSegment { start: 0.0, omega: 0.0 }]
        }
    };

    let inf = r.section(&root, "inflow", &["peak", "ramp_time"]);
    let inflow = InflowSettings {
        peak: r.f64(inf, "inflow", "peak"),
        ramp_time: r.f64(inf, "inflow", "ramp_time"),
    };

    let lp = r.section(&root, "loop", &["dt", "t_end", "relax", "fp_tol", "newton_tol", "max_sweeps", "max_newton"]);
    let loop_cfg = LoopConfig {
        dt: r.f64(lp, "loop", "dt"),
        t_end: r.f64(lp, "loop", "t_end"),
        relax: r.f64(lp, "loop", "relax"),
        fp_tol: r.f64(lp, "loop", "fp_tol"),
        newton_tol: r.f64(lp, "loop", "newton_tol"),
        max_sweeps: r.int(lp, "loop", "max_sweeps", true).unwrap_or(0) as usize,
        max_newton: r.int(lp, "loop", "max_newton", true).unwrap_or(0) as usize,
    };

    let ds = r.section(&root, "discretization", &["delta0", "delta_supg", "viscous_factor", "linearization"]);
    let discretization = Discretization {
        delta0: r.f64(ds, "discretization", "delta0"),
        delta_supg: r.f64(ds, "discretization", "delta_supg"),
        viscous_factor: r.f64(ds, "discretization", "viscous_factor"),
    };
    let lin = r.string(ds, "discretization", "linearization");
    let linearization = choice(&mut r, lin, "discretization.linearization", &LINEARIZATIONS, Linearization::Newton);

    let ph = r.section(&root, "physics", &["fluid"]);
    let with_fluid = r.boolean(ph, "physics", "fluid");

    let sv = r.section(
        &root,
        "solver",
        &["kind", "tol", "max_iter", "restart", "inner_tol", "inner_max_iter", "velocity_smoother", "schur_smoother"],
    );
    let kind_s = r.string(sv, "solver", "kind");
    let kind = choice(&mut r, kind_s, "solver.kind", &SOLVERS, SolverKind::Fgmres);
    let vs = r.string(sv, "solver", "velocity_smoother");
    let velocity_smoother = choice(&mut r, vs, "solver.velocity_smoother", &SMOOTHERS, SmootherKind::Ilu0);
    let ss = r.string(sv, "solver", "schur_smoother");
    let schur_smoother = choice(&mut r, ss, "solver.schur_smoother", &SMOOTHERS, SmootherKind::GaussSeidel);
    let solver = SaddleSolverConfig {
        kind,
        outer: GmresConfig {
            tol: r.f64(sv, "solver", "tol"),
            max_iter: r.int(sv, "solver", "max_iter", true).unwrap_or(0) as usize,
            restart: r.int(sv, "solver", "restart", true).unwrap_or(0) as usize,
        },
        inner: InnerConfig {
            tol: r.f64(sv, "solver", "inner_tol"),
            max_iter: r.int(sv, "solver", "inner_max_iter", true).unwrap_or(0) as usize,
            velocity_smoother,
            schur_smoother,
            gs_sweeps: 1,
        },
    };

    let out = r.section(&root, "output", &["dir", "vtk_interval", "dump_matrices"]);
    let output = OutputSettings {
        dir: r.string(out, "output", "dir").unwrap_or_default(),
        vtk_interval: r.f64(out, "output", "vtk_interval"),
        dump_matrices: r.boolean(out, "output", "dump_matrices"),
    };

    let sw = r.section(&root, "sweep", &["e"]);
    let sweep_e = match r.raw(sw, "sweep", "e", false) {
        Some(v) => {
            let v = v.clone();
            r.numbers(&v, "sweep.e")
        }
        None => Vec::new(),
    };

    let cfg = RunConfig {
        geometry,
        mesh,
        materials,
        rotation: RotationSettings { theta0, schedule },
        inflow,
        loop_cfg,
        discretization,
        linearization,
        with_fluid,
        solver,
        output,
        sweep_e,
    };
    // field-level checks only make sense once everything parsed
    if r.errs.is_empty() {
        r.errs = cfg.validate();
    }
    if r.errs.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(r.errs))
    }
}

/// Shipped scenario files.
pub mod presets {
    /// Reference parameter set.
    pub const TABLE1: &str = include_str!("../../presets/table1_2d.cfg");
    /// Reduced-inflow stiffness sweep.
    pub const SWEEP: &str = include_str!("../../presets/sweep_2d.cfg");
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Canonical text form; `load_config(&to_toml(c))` returns `c`.
pub fn to_toml(c: &RunConfig) -> String {
    let mut s = String::new();
    let g = &c.geometry;
    s += "[geometry]\n";
    s += &format!("length = {}\nwidth = {}\n", num(g.length), num(g.width));
    s += &format!("cross_length = {}\ncross_width = {}\n", num(g.cross_length), num(g.cross_width));
    s += &format!("buffer_radius = {}\naxis_radius = {}\n", num(g.buffer_radius), num(g.axis_radius));
    s += &format!("center = [{}, {}]\n\n", num(g.center[0]), num(g.center[1]));
    s += "[mesh]\n";
    s += &format!("h = {}\n", num(c.mesh.h));
    if let Some(hs) = c.mesh.h_structure {
        s += &format!("h_structure = {}\n", num(hs));
    }
    if let Some(m) = c.mesh.ring_nodes {
        s += &format!("ring_nodes = {m}\n");
    }
    s += &format!("seed = {}\n\n", c.mesh.seed);
    let m = &c.materials;
    s += "[materials]\n";
    s += &format!("rho_f = {}\nmu_f = {}\nrho_s = {}\ne = {}\nnu = {}\n\n", num(m.rho_f), num(m.mu_f), num(m.rho_s), num(m.e), num(m.nu));
    s += "[rotation]\n";
    s += &format!("theta0 = {}\n", num(c.rotation.theta0));
    if c.rotation.schedule.len() == 1 {
        s += &format!("omega = {}\n\n", num(c.rotation.schedule[0].omega));
    } else {
        let rows: Vec<String> = c
            .rotation
            .schedule
            .iter()
            .map(|seg| format!("[{}, {}]", num(seg.start), num(seg.omega)))
            .collect();
        s += &format!("schedule = [{}]\n\n", rows.join(", "));
    }
    s += "[inflow]\n";
    s += &format!("peak = {}\nramp_time = {}\n\n", num(c.inflow.peak), num(c.inflow.ramp_time));
    let l = &c.loop_cfg;
    s += "[loop]\n";
    s += &format!("dt = {}\nt_end = {}\nrelax = {}\n", num(l.dt), num(l.t_end), num(l.relax));
    s += &format!("fp_tol = {}\nnewton_tol = {}\n", num(l.fp_tol), num(l.newton_tol));
    s += &format!("max_sweeps = {}\nmax_newton = {}\n\n", l.max_sweeps, l.max_newton);
    let d = &c.discretization;
    s += "[discretization]\n";
    s += &format!("delta0 = {}\ndelta_supg = {}\nviscous_factor = {}\n", num(d.delta0), num(d.delta_supg), num(d.viscous_factor));
    s += &format!("linearization = \"{}\"\n\n", name_of(&LINEARIZATIONS, c.linearization));
    s += "[physics]\n";
    s += &format!("fluid = {}\n\n", c.with_fluid);
    let v = &c.solver;
    s += "[solver]\n";
    s += &format!("kind = \"{}\"\n", name_of(&SOLVERS, v.kind));
    s += &format!("tol = {}\nmax_iter = {}\nrestart = {}\n", num(v.outer.tol), v.outer.max_iter, v.outer.restart);
    s += &format!("inner_tol = {}\ninner_max_iter = {}\n", num(v.inner.tol), v.inner.max_iter);
    s += &format!("velocity_smoother = \"{}\"\n", name_of(&SMOOTHERS, v.inner.velocity_smoother));
    s += &format!("schur_smoother = \"{}\"\n\n", name_of(&SMOOTHERS, v.inner.schur_smoother));
    s += "[output]\n";
    s += &format!("dir = {:?}\nvtk_interval = {}\ndump_matrices = {}\n", c.output.dir, num(c.output.vtk_interval), c.output.dump_matrices);
    if !c.sweep_e.is_empty() {
        let es: Vec<String> = c.sweep_e.iter().map(|e| num(*e)).collect();
        s += &format!("\n[sweep]\ne = [{}]\n", es.join(", "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    use super::presets::TABLE1;

    #[test]
    fn preset_matches_table_values() {
        let c = load_config(TABLE1).unwrap();
        assert_eq!(c.materials, MaterialParams::default());
        assert_eq!(c.inflow.peak, 1.5);
        assert_eq!(c.rotation.schedule, vec![OmegaSegment { start: 0.0, omega: 1.0 }]);
        assert_eq!(c.loop_cfg.fp_tol, 1e-6);
        assert_eq!(c.geometry, ChannelRotorGeometry::default());
    }

    #[test]
    fn empty_file_lists_every_required_field() {
        let ConfigError::Validation(errs) = load_config("").unwrap_err() else {
            panic!("expected validation error")
        };
        let fields: Vec<&str> = errs.iter().map(|e| e.field.as_str()).collect();
        for f in ["geometry.length", "materials.nu", "loop.dt", "solver.kind", "output.dir", "rotation.omega", "physics.fluid"] {
            assert!(fields.contains(&f), "{f} missing from {fields:?}");
        }
        assert!(errs.len() >= 35);
    }

    #[test]
    fn incompressible_material_is_rejected() {
        let text = TABLE1.replace("nu = 0.384", "nu = 0.5");
        let ConfigError::Validation(errs) = load_config(&text).unwrap_err() else {
            panic!()
        };
        assert!(errs.iter().any(|e| e.field == "materials.nu" && e.message.contains("0 < ν < 0.5")));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = TABLE1.replace("[mesh]\n", "[mesh]\nfoo = 1\n");
        let ConfigError::Validation(errs) = load_config(&text).unwrap_err() else {
            panic!()
        };
        assert_eq!(errs[0].field, "mesh.foo");
    }

    #[test]
    fn parse_error_has_position() {
        let err = load_config("[mesh]\nh = = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn canonical_round_trip_is_idempotent() {
        let c = load_config(TABLE1).unwrap();
        let once = to_toml(&c);
        let c2 = load_config(&once).unwrap();
        assert_eq!(c, c2);
        assert_eq!(to_toml(&c2), once);
    }
}
