//! Monolithic fluid–structure system assembly.
//!
//! The reduced system is `[A, −Bᵀ; B, C] [v; p] = [f; g]` over the free
//! degrees of freedom of a [`DofMap`]. Fluid terms are integrated on the
//! current coordinates, structure terms on the reference coordinates.

use super::dofmap::{DofMap, Slot};
use super::element::{self, Mat3, Mat6};
use super::material::MaterialParams;
use crate::error::AssemblyError;
use crate::linsolve::{CsrMatrix, TripletBuilder};
use crate::mesh::{p1_gradients, Mesh, Subdomain};
use crate::rotation::{rotation_matrix, transpose, Mat2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    /// Pressure stabilization constant δ₀.
    pub delta0: f64,
    /// SUPG constant; zero disables the term.
    pub delta_supg: f64,
    /// Multiplier of μ_f in the viscous form `(μ ε(v), ε(φ))`.
    pub viscous_factor: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            delta0: 0.1,
            delta_supg: 1.0,
            viscous_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linearization {
    #[default]
    Newton,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub material: MaterialParams,
    pub disc: Discretization,
    pub dt: f64,
    /// Include the time-derivative terms. Without them the structure
    /// unknown is the displacement itself (stationary elasticity).
    pub transient: bool,
    pub convection: bool,
    pub linearization: Linearization,
}

impl StepParams {
    pub fn new(material: MaterialParams, dt: f64) -> Self {
        Self {
            material,
            disc: Discretization::default(),
            dt,
            transient: true,
            convection: true,
            linearization: Linearization::Newton,
        }
    }
}

pub type BodyForce<'a> = &'a dyn Fn(Vec2) -> Vec2;

/// Per-node fields (indexed by raw mesh node) for the fluid terms.
#[derive(Clone, Copy)]
pub struct FluidInputs<'a> {
    pub v_prev: &'a [Vec2],
    /// Previous Newton iterate, already scattered so aliased nodes hold
    /// their target's value.
    pub z: &'a [Vec2],
    pub w: &'a [Vec2],
    pub body_force: Option<BodyForce<'a>>,
}

/// Per-node fields for the structure terms.
#[derive(Debug, Clone, Copy)]
pub struct StructureInputs<'a> {
    pub v_prev: &'a [Vec2],
    pub u_prev: &'a [Vec2],
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct MonolithicSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub c: CsrMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// `max{1, μ_f, ρ_f/Δt, ρ_s/Δt, Δt μ_s, Δt λ_s}`.
    pub r: f64,
}

impl MonolithicSystem {
    pub fn n_v(&self) -> usize {
        self.f.len()
    }

    pub fn n_p(&self) -> usize {
        self.g.len()
    }

    /// `(f − A v + Bᵀ p, g − B v − C p)`.
    pub fn residual(&self, v: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let av = self.a.matvec(v);
        let btp = self.b.transpose_matvec(p);
        let rv = (0..v.len()).map(|i| self.f[i] - av[i] + btp[i]).collect();
        let bv = self.b.matvec(v);
        let cp = self.c.matvec(p);
        let rp = (0..p.len()).map(|i| self.g[i] - bv[i] - cp[i]).collect();
        (rv, rp)
    }

    /// Full saddle matrix `[A, −Bᵀ; B, C]` and right-hand side.
    pub fn full(&self) -> (CsrMatrix, Vec<f64>) {
        let mut bt = self.b.transpose();
        bt.scale(-1.0);
        let m = CsrMatrix::block_2x2(&self.a, &bt, &self.b, &self.c);
        let mut rhs = self.f.clone();
        rhs.extend_from_slice(&self.g);
        (m, rhs)
    }
}

struct Assembler<'d> {
    dofs: &'d DofMap,
    a: TripletBuilder,
    b: TripletBuilder,
    c: TripletBuilder,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl<'d> Assembler<'d> {
    fn new(dofs: &'d DofMap) -> Self {
        let (nv, np) = (dofs.n_v(), dofs.n_p());
        Self {
            dofs,
            a: TripletBuilder::new(nv, nv),
            b: TripletBuilder::new(np, nv),
            c: TripletBuilder::new(np, np),
            f: vec![0.0; nv],
            g: vec![0.0; np],
        }
    }

    fn vslots(&self, tri: &[usize; 3]) -> [Slot; 6] {
        let mut s = [Slot::Inactive; 6];
        for a in 0..3 {
            for c in 0..2 {
                s[2 * a + c] = self.dofs.velocity(tri[a], c);
            }
        }
        s
    }

    fn add_vv(&mut self, tri: &[usize; 3], k: &Mat6) {
        let s = self.vslots(tri);
        for i in 0..6 {
            let Slot::Free(r) = s[i] else { continue };
            for j in 0..6 {
                match s[j] {
                    Slot::Free(c) => self.a.add(r, c, k[i][j]),
                    Slot::Fixed(val) => self.f[r] -= k[i][j] * val,
                    Slot::Inactive => {}
                }
            }
        }
    }

    fn add_f(&mut self, tri: &[usize; 3], fe: &[f64; 6]) {
        let s = self.vslots(tri);
        for i in 0..6 {
            if let Slot::Free(r) = s[i] {
                self.f[r] += fe[i];
            }
        }
    }

    fn add_div(&mut self, tri: &[usize; 3], be: &[[f64; 6]; 3]) {
        let s = self.vslots(tri);
        for (a, row) in be.iter().enumerate() {
            match self.dofs.pressure(tri[a]) {
                Slot::Free(r) => {
                    for j in 0..6 {
                        match s[j] {
                            Slot::Free(c) => self.b.add(r, c, row[j]),
                            Slot::Fixed(val) => self.g[r] -= row[j] * val,
                            Slot::Inactive => {}
                        }
                    }
                }
                Slot::Fixed(pval) => {
                    // −Bᵀ p with known p moves to the momentum right-hand side
                    for j in 0..6 {
                        if let Slot::Free(c) = s[j] {
                            self.f[c] += row[j] * pval;
                        }
                    }
                }
                Slot::Inactive => {}
            }
        }
    }

    fn add_pp(&mut self, tri: &[usize; 3], k: &Mat3) {
        let s = tri.map(|v| self.dofs.pressure(v));
        for i in 0..3 {
            let Slot::Free(r) = s[i] else { continue };
            for j in 0..3 {
                match s[j] {
                    Slot::Free(c) => self.c.add(r, c, k[i][j]),
                    Slot::Fixed(val) => self.g[r] -= k[i][j] * val,
                    Slot::Inactive => {}
                }
            }
        }
    }
}

fn mat6_vec(k: &Mat6, x: &[f64; 6]) -> [f64; 6] {
    let mut y = [0.0; 6];
    for i in 0..6 {
        y[i] = (0..6).map(|j| k[i][j] * x[j]).sum();
    }
    y
}

fn flatten(v: &[Vec2; 3]) -> [f64; 6] {
    [v[0][0], v[0][1], v[1][0], v[1][1], v[2][0], v[2][1]]
}

fn add6(k: &mut Mat6, other: &Mat6, s: f64) {
    for i in 0..6 {
        for j in 0..6 {
            k[i][j] += s * other[i][j];
        }
    }
}

/// Stress of the affine field `(I − Rᵀ)(x̂ − x̂₀)`: `D sym(I − Rᵀ)`.
pub fn rotation_source_stress(theta: f64, material: &MaterialParams) -> Mat2 {
    let rt = transpose(&rotation_matrix(theta));
    let g = [[1.0 - rt[0][0], -rt[0][1]], [-rt[1][0], 1.0 - rt[1][1]]];
    let e = [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]];
    let (lam, mu) = (material.lambda_s(), material.mu_s());
    let tr = e[0][0] + e[1][1];
    [
        [2.0 * mu * e[0][0] + lam * tr, 2.0 * mu * e[0][1]],
        [2.0 * mu * e[1][0], 2.0 * mu * e[1][1] + lam * tr],
    ]
}

fn gather3(field: &[Vec2], tri: &[usize; 3]) -> [Vec2; 3] {
    [field[tri[0]], field[tri[1]], field[tri[2]]]
}

fn fluid_terms(asm: &mut Assembler, mesh: &Mesh, p: &StepParams, inp: &FluidInputs) -> Result<(), AssemblyError> {
    let m = &p.material;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if !mesh.subdomains[t].is_fluid() {
            continue;
        }
        let x = mesh.triangle_coords(t, true);
        let (area, g) = p1_gradients(x);
        if !(area > 0.0) {
            return Err(AssemblyError::QuadratureOnInvertedElement { triangle: t, area });
        }
        let mut k = element::strain_product(area, &g, p.disc.viscous_factor * m.mu_f);
        let mut fe = [0.0; 6];
        let mass = element::mass(area);
        if p.transient {
            let s = m.rho_f / p.dt;
            add6(&mut k, &element::expand(&mass, 1.0), s);
            let vp = flatten(&gather3(inp.v_prev, tri));
            let mv = mat6_vec(&element::expand(&mass, 1.0), &vp);
            for i in 0..6 {
                fe[i] += s * mv[i];
            }
        }
        if p.convection && m.rho_f > 0.0 {
            let z = gather3(inp.z, tri);
            let w = gather3(inp.w, tri);
            let beta: [Vec2; 3] = std::array::from_fn(|a| [z[a][0] - w[a][0], z[a][1] - w[a][1]]);
            add6(&mut k, &element::expand(&element::advection(area, &g, &beta), 1.0), m.rho_f);
            if p.linearization == Linearization::Newton {
                let gz = element::gradient(&g, &z);
                add6(&mut k, &element::reaction(area, &gz), m.rho_f);
                for a in 0..3 {
                    for b in 0..3 {
                        for c in 0..2 {
                            let zz = gz[c][0] * z[b][0] + gz[c][1] * z[b][1];
                            fe[2 * a + c] += m.rho_f * mass[a][b] * zz;
                        }
                    }
                }
            }
            if p.disc.delta_supg > 0.0 {
                // advection frozen at the previous time level so the term is
                // linear in the unknown and the Newton iteration stays exact
                let vp = gather3(inp.v_prev, tri);
                let beta_s: [Vec2; 3] = std::array::from_fn(|a| [vp[a][0] - w[a][0], vp[a][1] - w[a][1]]);
                let bmax = beta_s.iter().map(|b| b[0].hypot(b[1])).fold(0.0, f64::max);
                let h = element::diameter(&x);
                if bmax > 1e-12 && m.rho_f * bmax * h / (2.0 * m.mu_f) > 1.0 {
                    let tau = p.disc.delta_supg * h / bmax;
                    let sd = element::streamline_diffusion(area, &g, &beta_s);
                    add6(&mut k, &element::expand(&sd, 1.0), m.rho_f * tau);
                }
            }
        }
        if let Some(force) = inp.body_force {
            for l in &element::QUAD3 {
                let q = element::interp(l, &x);
                let fq = force(q);
                for a in 0..3 {
                    for c in 0..2 {
                        fe[2 * a + c] += area / 3.0 * l[a] * fq[c];
                    }
                }
            }
        }
        asm.add_vv(tri, &k);
        asm.add_f(tri, &fe);
        asm.add_div(tri, &element::divergence(area, &g));
        let h = element::diameter(&x);
        let mut cp = element::laplacian(area, &g);
        let s = p.disc.delta0 * h * h / m.mu_f;
        for row in cp.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        asm.add_pp(tri, &cp);
    }
    Ok(())
}

fn structure_terms(asm: &mut Assembler, mesh: &Mesh, p: &StepParams, inp: &StructureInputs) -> Result<(), AssemblyError> {
    let m = &p.material;
    let r = rotation_matrix(inp.theta);
    let sigma = rotation_source_stress(inp.theta, m);
    let (lam, mu) = (m.lambda_s(), m.mu_s());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if mesh.subdomains[t] != Subdomain::Structure {
            continue;
        }
        let x = mesh.triangle_coords(t, false);
        let (area, g) = p1_gradients(x);
        if !(area > 0.0) {
            return Err(AssemblyError::QuadratureOnInvertedElement { triangle: t, area });
        }
        let kr = element::rotate(&element::elasticity(area, &g, lam, mu), &r);
        let mut fe = element::stress_load(area, &g, &sigma, &r);
        let mut k = [[0.0; 6]; 6];
        if p.transient {
            let mass = element::expand(&element::mass(area), 1.0);
            let s = m.rho_s / p.dt;
            add6(&mut k, &mass, s);
            add6(&mut k, &kr, 0.5 * p.dt);
            let vp = flatten(&gather3(inp.v_prev, tri));
            let up = flatten(&gather3(inp.u_prev, tri));
            let mv = mat6_vec(&mass, &vp);
            let kv = mat6_vec(&kr, &vp);
            let ku = mat6_vec(&kr, &up);
            for i in 0..6 {
                fe[i] += s * mv[i] - 0.5 * p.dt * kv[i] - ku[i];
            }
        } else {
            k = kr;
        }
        asm.add_vv(tri, &k);
        asm.add_f(tri, &fe);
    }
    Ok(())
}

/// Assemble the reduced monolithic system. Either part may be omitted;
/// elements of parts absent from `dofs` are skipped.
pub fn assemble(
    mesh: &Mesh,
    dofs: &DofMap,
    params: &StepParams,
    fluid: Option<&FluidInputs>,
    structure: Option<&StructureInputs>,
) -> Result<MonolithicSystem, AssemblyError> {
    let mut asm = Assembler::new(dofs);
    if let (Some(inp), true) = (fluid, dofs.parts.fluid) {
        fluid_terms(&mut asm, mesh, params, inp)?;
    }
    if let (Some(inp), true) = (structure, dofs.parts.structure) {
        structure_terms(&mut asm, mesh, params, inp)?;
    }
    Ok(MonolithicSystem {
        a: asm.a.finalize(),
        b: asm.b.finalize(),
        c: asm.c.finalize(),
        f: asm.f,
        g: asm.g,
        r: params.material.scaling(params.dt),
    })
}

/// Unreduced structure stiffness over `2·num_nodes` raw unknowns, built
/// from `(D ε(Rᵀu), ε(Rᵀφ))` on the given coordinates.
pub fn structure_stiffness(mesh: &Mesh, coords: &[Vec2], theta: f64, material: &MaterialParams) -> CsrMatrix {
    let n = mesh.num_nodes();
    let r = rotation_matrix(theta);
    let mut tb = TripletBuilder::new(2 * n, 2 * n);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if mesh.subdomains[t] != Subdomain::Structure {
            continue;
        }
        let x = [coords[tri[0]], coords[tri[1]], coords[tri[2]]];
        let (area, g) = p1_gradients(x);
        let k = element::rotate(&element::elasticity(area, &g, material.lambda_s(), material.mu_s()), &r);
        for i in 0..6 {
            for j in 0..6 {
                tb.add(2 * tri[i / 2] + i % 2, 2 * tri[j / 2] + j % 2, k[i][j]);
            }
        }
    }
    tb.finalize()
}
