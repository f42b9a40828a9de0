//! Moving fluid mesh: sliding-ring re-matching, the harmonic extension of
//! the deformation part, and the coordinate and mesh-velocity update.
//!
//! The rotational fluid mesh moves by `A_u = û_θ + A_D`, where `A_D` solves
//! a P1 Laplace problem on the reference buffer zone with `A_D = û_s − û_θ`
//! on the rotor outline and `A_D = û_m` on the sliding ring.

use std::f64::consts::TAU;

use crate::error::AleError;
use crate::linsolve::{BandedLu, CsrMatrix, TripletBuilder};
use crate::mesh::{p1_gradients, signed_area, BoundaryTag, Mesh, Subdomain};
use crate::rotation::{mat_vec, rotation_matrix, rotational_displacement_at, Vec2};

/// Angular tolerance for deciding that a rotating node landed exactly on a
/// stationary node.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchRule {
    /// Every node moves forward in the rotation direction to the next
    /// stationary node (ties map onto the node itself).
    Forward,
    /// Each node independently snaps to its nearest stationary node. Kept
    /// only to demonstrate why a single direction is required.
    Nearest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Cyclic offset, unreduced: it grows by `m` per revolution.
    pub shift: i64,
    /// Target stationary ring position for each rotating ring position.
    pub target: Vec<usize>,
    /// Matching displacement per rotating ring position.
    pub u_m: Vec<Vec2>,
}

fn angle_of(p: Vec2, c: Vec2) -> f64 {
    let a = (p[1] - c[1]).atan2(p[0] - c[0]);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Match rotating ring nodes (reference positions, reference order) to
/// stationary ring nodes (counterclockwise order) after a rotation by
/// `theta`.
pub fn match_rings(center: Vec2, rot_ref: &[Vec2], stat: &[Vec2], theta: f64, rule: MatchRule) -> Result<Matching, AleError> {
    let m = rot_ref.len();
    if m != stat.len() || m == 0 {
        return Err(AleError::RingMismatch {
            rotating: m,
            stationary: stat.len(),
        });
    }
    let r = rotation_matrix(theta);
    let rotated: Vec<Vec2> = rot_ref
        .iter()
        .map(|p| {
            let d = mat_vec(&r, [p[0] - center[0], p[1] - center[1]]);
            [center[0] + d[0], center[1] + d[1]]
        })
        .collect();
    let a_st: Vec<f64> = stat.iter().map(|&p| angle_of(p, center)).collect();
    let a0 = a_st[0];
    // extended stationary angle, monotone in k over all integers
    let ext = |k: i64| {
        let j = k.rem_euclid(m as i64) as usize;
        let mut a = a_st[j];
        if a < a0 {
            a += TAU;
        }
        a + TAU * k.div_euclid(m as i64) as f64
    };
    let target_of = |shift: i64, i: usize| (shift + i as i64).rem_euclid(m as i64) as usize;
    match rule {
        MatchRule::Forward => {
            let phi0 = angle_of(rot_ref[0], center) + theta;
            let mut k = (((phi0 - a0) / TAU).floor() as i64) * m as i64 - 1;
            while ext(k) < phi0 - TIE_TOL {
                k += 1;
            }
            while ext(k - 1) >= phi0 - TIE_TOL {
                k -= 1;
            }
            let target: Vec<usize> = (0..m).map(|i| target_of(k, i)).collect();
            let u_m = (0..m)
                .map(|i| {
                    let s = stat[target[i]];
                    [s[0] - rotated[i][0], s[1] - rotated[i][1]]
                })
                .collect();
            Ok(Matching { shift: k, target, u_m })
        }
        MatchRule::Nearest => {
            let mut target = Vec::with_capacity(m);
            let mut u_m = Vec::with_capacity(m);
            for p in &rotated {
                let (j, _) = stat
                    .iter()
                    .enumerate()
                    .map(|(j, s)| (j, (s[0] - p[0]).hypot(s[1] - p[1])))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                target.push(j);
                u_m.push([stat[j][0] - p[0], stat[j][1] - p[1]]);
            }
            let shift = target[0] as i64;
            Ok(Matching { shift, target, u_m })
        }
    }
}

/// Forward matching of the mesh's two rings after rotation by `theta`.
pub fn match_sliding_interface(mesh: &Mesh, theta: f64) -> Result<Matching, AleError> {
    let rot: Vec<Vec2> = mesh.ring_rotating.iter().map(|&v| mesh.reference[v]).collect();
    let st: Vec<Vec2> = mesh.ring_stationary.iter().map(|&v| mesh.reference[v]).collect();
    match_rings(mesh.center, &rot, &st, theta, MatchRule::Forward)
}

/// Point each rotating ring node's alias at its matched stationary node.
pub fn apply_matching(mesh: &mut Mesh, matching: &Matching) {
    for (i, &v) in mesh.ring_rotating.iter().enumerate() {
        mesh.alias[v] = mesh.ring_stationary[matching.target[i]];
    }
}

/// Cached P1 Laplace solver on the reference buffer zone.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    interior: Vec<usize>,
    boundary: Vec<usize>,
    /// Node → position in `interior`, or `usize::MAX`.
    slot: Vec<usize>,
    /// Interior/boundary coupling, rows over interior, columns over nodes.
    k_ib: CsrMatrix,
    k_ii: CsrMatrix,
    lu: BandedLu,
}

impl HarmonicExtension {
    pub fn new(mesh: &Mesh) -> Result<Self, AleError> {
        let n = mesh.num_nodes();
        let in_rf = mesh.node_mask(Subdomain::RotFluid);
        let mut is_bc = vec![false; n];
        for e in &mesh.boundary_edges {
            if matches!(e.tag, BoundaryTag::InterfaceGamma | BoundaryTag::InterfaceGammaRs) {
                for v in e.nodes {
                    if in_rf[v] {
                        is_bc[v] = true;
                    }
                }
            }
        }
        let interior: Vec<usize> = (0..n).filter(|&v| in_rf[v] && !is_bc[v]).collect();
        let boundary: Vec<usize> = (0..n).filter(|&v| in_rf[v] && is_bc[v]).collect();
        let mut slot = vec![usize::MAX; n];
        for (k, &v) in interior.iter().enumerate() {
            slot[v] = k;
        }
        let ni = interior.len();
        let mut tii = TripletBuilder::new(ni, ni);
        let mut tib = TripletBuilder::new(ni, n);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            if mesh.subdomains[t] != Subdomain::RotFluid {
                continue;
            }
            let (area, g) = p1_gradients(mesh.triangle_coords(t, false));
            for a in 0..3 {
                let row = slot[tri[a]];
                if row == usize::MAX {
                    continue;
                }
                for b in 0..3 {
                    let k = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    let col = slot[tri[b]];
                    if col == usize::MAX {
                        tib.add(row, tri[b], k);
                    } else {
                        tii.add(row, col, k);
                    }
                }
            }
        }
        let k_ii = tii.finalize();
        let lu = if ni > 0 {
            BandedLu::factor(&k_ii)?
        } else {
            BandedLu::factor(&CsrMatrix::identity(1))?
        };
        Ok(Self {
            interior,
            boundary,
            slot,
            k_ib: tib.finalize(),
            k_ii,
            lu,
        })
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    /// True when every off-diagonal stiffness entry coupling interior nodes
    /// is nonpositive, the condition under which the discrete maximum
    /// principle holds.
    pub fn has_nonpositive_couplings(&self) -> bool {
        let tol = 1e-12 * self.k_ii.max_abs();
        let off_ii = (0..self.k_ii.nrows()).all(|i| {
            let (c, v) = self.k_ii.row(i);
            c.iter().zip(v).all(|(&j, &x)| j == i || x <= tol)
        });
        let off_ib = (0..self.k_ib.nrows()).all(|i| self.k_ib.row(i).1.iter().all(|&x| x <= tol));
        off_ii && off_ib
    }

    /// Harmonic extension of boundary values given per node (only entries
    /// at boundary nodes are read). Returns a per-node field that is zero
    /// outside the buffer zone.
    pub fn solve(&self, bc: &[Vec2]) -> Vec<Vec2> {
        let n = bc.len();
        let mut out = vec![[0.0; 2]; n];
        for &v in &self.boundary {
            out[v] = bc[v];
        }
        if self.interior.is_empty() {
            return out;
        }
        for d in 0..2 {
            let g: Vec<f64> = (0..n)
                .map(|v| if self.slot[v] == usize::MAX { bc[v][d] } else { 0.0 })
                .collect();
            let rhs: Vec<f64> = self.k_ib.matvec(&g).iter().map(|x| -x).collect();
            let x = self.lu.solve(&rhs);
            for (k, &v) in self.interior.iter().enumerate() {
                out[v][d] = x[k];
            }
        }
        out
    }

    /// Relative residual of the interior equations for a computed field.
    pub fn residual(&self, field: &[Vec2]) -> f64 {
        let n = field.len();
        let mut worst: f64 = 0.0;
        for d in 0..2 {
            let g: Vec<f64> = (0..n)
                .map(|v| if self.slot[v] == usize::MAX { field[v][d] } else { 0.0 })
                .collect();
            let xi: Vec<f64> = self.interior.iter().map(|&v| field[v][d]).collect();
            let a = self.k_ii.matvec(&xi);
            let b = self.k_ib.matvec(&g);
            let num: f64 = a.iter().zip(&b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
            let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
            if den > 0.0 {
                worst = worst.max(num / den);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AleState {
    pub theta: f64,
    /// Total buffer-zone mesh displacement, per node.
    pub a_u: Vec<Vec2>,
    pub a_d: Vec<Vec2>,
    pub u_theta: Vec<Vec2>,
    /// Mesh velocity, per node.
    pub w: Vec<Vec2>,
    pub matching: Matching,
}

impl AleState {
    pub fn rest(mesh: &Mesh) -> Self {
        let n = mesh.num_nodes();
        let m = mesh.ring_size();
        Self {
            theta: 0.0,
            a_u: vec![[0.0; 2]; n],
            a_d: vec![[0.0; 2]; n],
            u_theta: vec![[0.0; 2]; n],
            w: vec![[0.0; 2]; n],
            matching: Matching {
                shift: 0,
                target: (0..m).collect(),
                u_m: vec![[0.0; 2]; m],
            },
        }
    }
}

/// Everything needed to move the buffer zone mesh, built once per mesh.
#[derive(Debug, Clone)]
pub struct AleMotion {
    pub extension: HarmonicExtension,
    rot_fluid: Vec<bool>,
    gamma: Vec<bool>,
}

impl AleMotion {
    pub fn new(mesh: &Mesh) -> Result<Self, AleError> {
        let mut gamma = vec![false; mesh.num_nodes()];
        for v in mesh.tagged_nodes(BoundaryTag::InterfaceGamma) {
            gamma[v] = true;
        }
        Ok(Self {
            extension: HarmonicExtension::new(mesh)?,
            rot_fluid: mesh.node_mask(Subdomain::RotFluid),
            gamma,
        })
    }

    pub fn is_rot_fluid(&self, v: usize) -> bool {
        self.rot_fluid[v]
    }

    /// Buffer-zone displacement for rotation angle `theta` and interface
    /// displacement `u_gamma` (read at Γ nodes). `a_u_prev` is the accepted
    /// displacement of the previous step, used for the mesh velocity.
    pub fn displacement(&self, mesh: &Mesh, u_gamma: &[Vec2], theta: f64, a_u_prev: &[Vec2], dt: f64) -> Result<AleState, AleError> {
        let n = mesh.num_nodes();
        let matching = match_sliding_interface(mesh, theta)?;
        let mut u_theta = vec![[0.0; 2]; n];
        for v in 0..n {
            if self.rot_fluid[v] {
                u_theta[v] = rotational_displacement_at(mesh.reference[v], mesh.center, theta);
            }
        }
        let mut bc = vec![[0.0; 2]; n];
        for v in 0..n {
            if self.gamma[v] {
                bc[v] = [u_gamma[v][0] - u_theta[v][0], u_gamma[v][1] - u_theta[v][1]];
            }
        }
        for (i, &v) in mesh.ring_rotating.iter().enumerate() {
            bc[v] = matching.u_m[i];
        }
        let a_d = self.extension.solve(&bc);
        let mut a_u = vec![[0.0; 2]; n];
        let mut w = vec![[0.0; 2]; n];
        for v in 0..n {
            if self.rot_fluid[v] {
                a_u[v] = [u_theta[v][0] + a_d[v][0], u_theta[v][1] + a_d[v][1]];
                if self.gamma[v] {
                    // exact coincidence with the structure node
                    a_u[v] = u_gamma[v];
                }
                w[v] = [(a_u[v][0] - a_u_prev[v][0]) / dt, (a_u[v][1] - a_u_prev[v][1]) / dt];
            }
        }
        Ok(AleState {
            theta,
            a_u,
            a_d,
            u_theta,
            w,
            matching,
        })
    }
}

/// Mesh velocity `(A_u_new − A_u_old)/Δt`, zero off the buffer zone.
pub fn mesh_velocity(rot_fluid: &[bool], a_u_new: &[Vec2], a_u_old: &[Vec2], dt: f64) -> Vec<Vec2> {
    (0..a_u_new.len())
        .map(|v| {
            if rot_fluid[v] {
                [(a_u_new[v][0] - a_u_old[v][0]) / dt, (a_u_new[v][1] - a_u_old[v][1]) / dt]
            } else {
                [0.0, 0.0]
            }
        })
        .collect()
}

/// Move buffer-zone nodes to `x̂ + A_u_new` and return the mesh velocity.
/// The mesh is left untouched when any triangle would invert.
pub fn update_fluid_mesh(mesh: &mut Mesh, a_u_new: &[Vec2], a_u_old: &[Vec2], dt: f64) -> Result<Vec<Vec2>, AleError> {
    let rot_fluid = mesh.node_mask(Subdomain::RotFluid);
    let mut coords = mesh.current.clone();
    for v in 0..mesh.num_nodes() {
        if rot_fluid[v] {
            coords[v] = [mesh.reference[v][0] + a_u_new[v][0], mesh.reference[v][1] + a_u_new[v][1]];
        }
    }
    check_areas(mesh, &coords)?;
    mesh.current = coords;
    Ok(mesh_velocity(&rot_fluid, a_u_new, a_u_old, dt))
}

/// First triangle with non-positive signed area under `coords`.
pub fn check_areas(mesh: &Mesh, coords: &[Vec2]) -> Result<(), AleError> {
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = signed_area(coords[tri[0]], coords[tri[1]], coords[tri[2]]);
        if area <= 0.0 {
            return Err(AleError::MeshInversion { triangle: t, area });
        }
    }
    Ok(())
}

/// Apply a computed ALE state: coordinates of the buffer zone, ring
/// aliases, and structure-only nodes from `u_structure`.
pub fn commit(mesh: &mut Mesh, state: &AleState, structure: &[bool], u_structure: &[Vec2]) -> Result<(), AleError> {
    let rot_fluid = mesh.node_mask(Subdomain::RotFluid);
    let mut coords = mesh.current.clone();
    for v in 0..mesh.num_nodes() {
        // interface nodes follow the fluid mesh, which carries the
        // relaxed interface displacement
        if rot_fluid[v] {
            coords[v] = [mesh.reference[v][0] + state.a_u[v][0], mesh.reference[v][1] + state.a_u[v][1]];
        } else if structure[v] {
            coords[v] = [mesh.reference[v][0] + u_structure[v][0], mesh.reference[v][1] + u_structure[v][1]];
        }
    }
    check_areas(mesh, &coords)?;
    mesh.current = coords;
    apply_matching(mesh, &state.matching);
    Ok(())
}
