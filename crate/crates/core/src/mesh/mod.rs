//! Multi-subdomain triangulation with tagged boundaries and the two node
//! rings of the sliding interface.

pub mod delaunay;
pub mod generate;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

pub use generate::{build_rotor_channel_mesh, build_rotor_channel_mesh_with, ChannelRotorGeometry, MeshOptions};

use crate::error::MeshError;
use crate::rotation::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Structure,
    RotFluid,
    StatFluid,
}

impl Subdomain {
    pub fn id(self) -> i32 {
        match self {
            Subdomain::Structure => 0,
            Subdomain::RotFluid => 1,
            Subdomain::StatFluid => 2,
        }
    }

    pub fn is_fluid(self) -> bool {
        self != Subdomain::Structure
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Inlet,
    Outlet,
    Wall,
    AxisGammaIn,
    InterfaceGamma,
    InterfaceGammaRs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSide {
    Rotating,
    Stationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceRing {
    pub nodes: Vec<usize>,
    pub side: RingSide,
    /// Angle of each node about the rotation center, in [0, 2π).
    pub angles: Vec<f64>,
}

impl InterfaceRing {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub reference: Vec<Vec2>,
    pub current: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    pub subdomains: Vec<Subdomain>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Canonical node for every node. Rotating ring nodes point at the
    /// stationary ring node they currently coincide with; all other nodes
    /// point at themselves.
    pub alias: Vec<usize>,
    pub center: Vec2,
    /// Rotating-side ring nodes in reference angular order.
    pub ring_rotating: Vec<usize>,
    /// Stationary-side ring nodes in reference angular order.
    pub ring_stationary: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Defect {
    DuplicateNode { a: usize, b: usize },
    DegenerateTriangle { triangle: usize },
    OverSharedEdge { a: usize, b: usize, count: usize },
    UntaggedBoundaryEdge { a: usize, b: usize },
    InconsistentOrientation { a: usize, b: usize },
    AliasMismatch { node: usize },
}

impl std::fmt::Display for Defect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Defect::DuplicateNode { a, b } => write!(f, "duplicate node {a} / {b}"),
            Defect::DegenerateTriangle { triangle } => write!(f, "degenerate triangle {triangle}"),
            Defect::OverSharedEdge { a, b, count } => write!(f, "edge {a}-{b} shared by {count} triangles"),
            Defect::UntaggedBoundaryEdge { a, b } => write!(f, "untagged boundary edge {a}-{b}"),
            Defect::InconsistentOrientation { a, b } => write!(f, "edge {a}-{b} traversed twice in the same direction"),
            Defect::AliasMismatch { node } => write!(f, "node {node} does not coincide with its alias"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    /// min signed area / max signed area.
    pub area_ratio: f64,
    pub max_aspect_ratio: f64,
    pub inverted: usize,
}

pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Interior angles in radians.
pub fn triangle_angles(a: Vec2, b: Vec2, c: Vec2) -> [f64; 3] {
    let ang = |p: Vec2, q: Vec2, r: Vec2| {
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        cross.abs().atan2(dot)
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

/// Signed area and the constant gradients of the three P1 basis functions.
pub fn p1_gradients(x: [Vec2; 3]) -> (f64, [Vec2; 3]) {
    let area = signed_area(x[0], x[1], x[2]);
    let inv = 1.0 / (2.0 * area);
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let (b, c) = (x[(k + 1) % 3], x[(k + 2) % 3]);
        g[k] = [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv];
    }
    (area, g)
}

fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn angle_about(p: Vec2, center: Vec2) -> f64 {
    let a = (p[1] - center[1]).atan2(p[0] - center[0]);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

impl Mesh {
    /// Assemble a mesh from raw parts; `alias` is the identity and no rings
    /// are registered. Intended for small hand-built meshes.
    pub fn from_parts(coords: Vec<Vec2>, triangles: Vec<[usize; 3]>, subdomains: Vec<Subdomain>, boundary_edges: Vec<BoundaryEdge>, center: Vec2) -> Self {
        let n = coords.len();
        Self {
            reference: coords.clone(),
            current: coords,
            triangles,
            subdomains,
            boundary_edges,
            alias: (0..n).collect(),
            center,
            ring_rotating: Vec::new(),
            ring_stationary: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.reference.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_coords(&self, t: usize, current: bool) -> [Vec2; 3] {
        let x = if current { &self.current } else { &self.reference };
        let [a, b, c] = self.triangles[t];
        [x[a], x[b], x[c]]
    }

    pub fn area(&self, t: usize, current: bool) -> f64 {
        let [a, b, c] = self.triangle_coords(t, current);
        signed_area(a, b, c)
    }

    /// Diameter of the bounding box of the reference coordinates.
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.reference {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// Per-node flag: node belongs to at least one triangle of `sub`.
    pub fn node_mask(&self, sub: Subdomain) -> Vec<bool> {
        let mut m = vec![false; self.num_nodes()];
        for (t, tri) in self.triangles.iter().enumerate() {
            if self.subdomains[t] == sub {
                for &v in tri {
                    m[v] = true;
                }
            }
        }
        m
    }

    pub fn fluid_node_mask(&self) -> Vec<bool> {
        let mut m = self.node_mask(Subdomain::RotFluid);
        for (a, b) in m.iter_mut().zip(self.node_mask(Subdomain::StatFluid)) {
            *a |= b;
        }
        m
    }

    /// Sorted, deduplicated nodes carrying edges with `tag`.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .flat_map(|e| e.nodes)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn quality(&self) -> QualityReport {
        mesh_quality(self)
    }

    pub fn quality_of(&self, sub: Option<Subdomain>) -> QualityReport {
        quality_over(self, |t| sub.is_none_or(|s| self.subdomains[t] == s))
    }

    pub fn ring_size(&self) -> usize {
        self.ring_rotating.len()
    }
}

pub fn mesh_quality(mesh: &Mesh) -> QualityReport {
    quality_over(mesh, |_| true)
}

fn quality_over(mesh: &Mesh, keep: impl Fn(usize) -> bool) -> QualityReport {
    let mut min_angle = f64::INFINITY;
    let mut max_angle: f64 = 0.0;
    let (mut amin, mut amax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut aspect: f64 = 0.0;
    let mut inverted = 0;
    for t in 0..mesh.triangles.len() {
        if !keep(t) {
            continue;
        }
        let [a, b, c] = mesh.triangle_coords(t, true);
        let area = signed_area(a, b, c);
        if area <= 0.0 {
            inverted += 1;
        }
        amin = amin.min(area);
        amax = amax.max(area);
        for ang in triangle_angles(a, b, c) {
            min_angle = min_angle.min(ang);
            max_angle = max_angle.max(ang);
        }
        let (la, lb, lc) = (dist(b, c), dist(c, a), dist(a, b));
        let longest = la.max(lb).max(lc);
        // longest edge over the smallest altitude
        let alt = 2.0 * area.abs() / longest;
        aspect = aspect.max(if alt > 0.0 { longest / alt } else { f64::INFINITY });
    }
    QualityReport {
        min_angle_deg: min_angle.to_degrees(),
        max_angle_deg: max_angle.to_degrees(),
        area_ratio: if amax > 0.0 { amin / amax } else { 0.0 },
        max_aspect_ratio: aspect,
        inverted,
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Conformity defects of the merged mesh (rotating ring nodes identified
/// with their aliases). An empty list means the mesh is conforming.
pub fn validate_conformity(mesh: &Mesh) -> Vec<Defect> {
    let mut defects = Vec::new();
    let tol_dup = 1e-12 * mesh.diameter();
    let canon = |v: usize| mesh.alias[v];

    for (i, &a) in mesh.alias.iter().enumerate() {
        if a != i && dist(mesh.current[i], mesh.current[a]) > tol_dup {
            defects.push(Defect::AliasMismatch { node: i });
        }
    }

    // duplicate canonical nodes, via a hash grid
    let cell = (tol_dup * 4.0).max(f64::MIN_POSITIVE);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in mesh.current.iter().enumerate() {
        if canon(i) != i {
            continue;
        }
        let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(key.0 + dx, key.1 + dy)) {
                    for &j in list {
                        if dist(mesh.current[j], *p) <= tol_dup {
                            defects.push(Defect::DuplicateNode { a: j, b: i });
                        }
                    }
                }
            }
        }
        grid.entry(key).or_default().push(i);
    }

    let mut directed: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let c = [canon(tri[0]), canon(tri[1]), canon(tri[2])];
        if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] || mesh.area(t, true) <= 0.0 {
            defects.push(Defect::DegenerateTriangle { triangle: t });
        }
        for k in 0..3 {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            directed.entry(edge_key(a, b)).or_default().push((a, b));
        }
    }
    let outer: std::collections::HashSet<(usize, usize)> = mesh
        .boundary_edges
        .iter()
        .filter(|e| matches!(e.tag, BoundaryTag::Inlet | BoundaryTag::Outlet | BoundaryTag::Wall | BoundaryTag::AxisGammaIn))
        .map(|e| edge_key(canon(e.nodes[0]), canon(e.nodes[1])))
        .collect();
    for (&(a, b), uses) in &directed {
        match uses.len() {
            1 => {
                if !outer.contains(&(a, b)) {
                    defects.push(Defect::UntaggedBoundaryEdge { a, b });
                }
            }
            2 => {
                if uses[0] == uses[1] {
                    defects.push(Defect::InconsistentOrientation { a, b });
                }
            }
            count => defects.push(Defect::OverSharedEdge { a, b, count }),
        }
    }
    defects
}

/// Walk the edges tagged `tag` that belong to triangles on the given ring
/// side and return the closed loop ordered counterclockwise about the
/// mesh center, starting at the node with the smallest angle in [0, 2π).
pub fn extract_ring(mesh: &Mesh, tag: BoundaryTag, side: RingSide) -> Result<InterfaceRing, MeshError> {
    let side_sub = |s: Subdomain| match (tag, side) {
        (BoundaryTag::InterfaceGammaRs, RingSide::Rotating) => s == Subdomain::RotFluid,
        (BoundaryTag::InterfaceGammaRs, RingSide::Stationary) => s == Subdomain::StatFluid,
        _ => true,
    };
    let mut on_side: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if side_sub(mesh.subdomains[t]) {
            for k in 0..3 {
                on_side.insert(edge_key(tri[k], tri[(k + 1) % 3]));
            }
        }
    }
    let edges: Vec<(usize, usize)> = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == tag && on_side.contains(&edge_key(e.nodes[0], e.nodes[1])))
        .map(|e| (e.nodes[0], e.nodes[1]))
        .collect();
    ring_from_edges(mesh, &edges, tag, side)
}

/// Order a set of undirected edges into one closed loop.
pub fn ring_from_edges(mesh: &Mesh, edges: &[(usize, usize)], tag: BoundaryTag, side: RingSide) -> Result<InterfaceRing, MeshError> {
    if edges.len() < 3 {
        return Err(MeshError::OpenCurve(tag));
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|v| v.len() != 2) {
        return Err(MeshError::OpenCurve(tag));
    }
    let mut visited: BTreeMap<usize, bool> = adj.keys().map(|&k| (k, false)).collect();
    let mut loops: Vec<Vec<usize>> = Vec::new();
    for &s in adj.keys() {
        if visited[&s] {
            continue;
        }
        let mut lp = vec![s];
        visited.insert(s, true);
        let (mut prev, mut cur) = (s, adj[&s][0]);
        while cur != s {
            lp.push(cur);
            visited.insert(cur, true);
            let nb = &adj[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        loops.push(lp);
    }
    if loops.len() > 1 {
        return Err(MeshError::MultipleLoops { tag, loops: loops.len() });
    }
    let mut nodes = loops.pop().unwrap();
    let c = mesh.center;
    // orient counterclockwise about the center
    let mut twice_area = 0.0;
    for k in 0..nodes.len() {
        let p = mesh.current[nodes[k]];
        let q = mesh.current[nodes[(k + 1) % nodes.len()]];
        twice_area += (p[0] - c[0]) * (q[1] - c[1]) - (q[0] - c[0]) * (p[1] - c[1]);
    }
    if twice_area < 0.0 {
        nodes.reverse();
    }
    let angles: Vec<f64> = nodes.iter().map(|&v| angle_about(mesh.current[v], c)).collect();
    let first = (0..nodes.len())
        .min_by(|&a, &b| angles[a].total_cmp(&angles[b]))
        .unwrap();
    nodes.rotate_left(first);
    let mut angles = angles;
    angles.rotate_left(first);
    Ok(InterfaceRing { nodes, side, angles })
}

/// Number of closed boundary loops of the merged triangulation.
pub fn boundary_loop_count(mesh: &Mesh) -> usize {
    let canon = |v: usize| mesh.alias[v];
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            *count.entry(edge_key(canon(tri[k]), canon(tri[(k + 1) % 3]))).or_default() += 1;
        }
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(a, b), &c) in &count {
        if c == 1 {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    // connected components of the boundary graph
    let mut seen = std::collections::HashSet::new();
    let mut loops = 0;
    for &s in adj.keys() {
        if !seen.insert(s) {
            continue;
        }
        loops += 1;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[&u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
    }
    loops
}

/// `V − E + F` of the merged triangulation.
pub fn euler_characteristic(mesh: &Mesh) -> i64 {
    let canon = |v: usize| mesh.alias[v];
    let mut verts = std::collections::HashSet::new();
    let mut edges = std::collections::HashSet::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            verts.insert(canon(tri[k]));
            edges.insert(edge_key(canon(tri[k]), canon(tri[(k + 1) % 3])));
        }
    }
    verts.len() as i64 - edges.len() as i64 + mesh.triangles.len() as i64
}

/// Uniform right-triangle mesh of the unit square.
pub fn unit_square_mesh(n: usize, sub: Subdomain) -> Mesh {
    let mut coords = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            coords.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::new();
    for j in 0..n {
        for i in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push(BoundaryEdge { nodes: [id(i, 0), id(i + 1, 0)], tag: BoundaryTag::Wall });
        edges.push(BoundaryEdge { nodes: [id(n, i), id(n, i + 1)], tag: BoundaryTag::Wall });
        edges.push(BoundaryEdge { nodes: [id(i + 1, n), id(i, n)], tag: BoundaryTag::Wall });
        edges.push(BoundaryEdge { nodes: [id(0, i + 1), id(0, i)], tag: BoundaryTag::Wall });
    }
    let subs = vec![sub; tris.len()];
    Mesh::from_parts(coords, tris, subs, edges, [0.5, 0.5])
}
