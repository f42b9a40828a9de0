//! Channel-with-rotor mesh generator.
//!
//! Boundary curves are subdivided first (channel sides graded by a size
//! function, uniform cross and axis polygons, a uniform sliding ring with a
//! few structured node layers on each side). The remaining area is filled
//! by greedy Poisson-disk sampling of a fine lattice, which rejects any
//! candidate inside the diametral circle of a boundary segment so every
//! segment survives as a Delaunay edge. The stationary and the rotating
//! parts are triangulated separately and joined through the duplicated ring.

use std::f64::consts::PI;

use super::delaunay::triangulate;
use super::{BoundaryEdge, BoundaryTag, Mesh, Subdomain};
use crate::error::MeshError;
use crate::rotation::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRotorGeometry {
    pub length: f64,
    pub width: f64,
    /// Tip-to-tip span of each cross arm pair.
    pub cross_length: f64,
    pub cross_width: f64,
    pub buffer_radius: f64,
    pub center: Vec2,
    pub axis_radius: f64,
}

impl Default for ChannelRotorGeometry {
    fn default() -> Self {
        Self {
            length: 0.5,
            width: 0.2,
            cross_length: 0.1,
            cross_width: 0.015,
            buffer_radius: 0.08,
            center: [0.15, 0.1],
            axis_radius: 0.004,
        }
    }
}

impl ChannelRotorGeometry {
    pub fn tip_radius(&self) -> f64 {
        self.cross_length / 2.0
    }

    /// Distance from the center to a blade-tip corner.
    pub fn tip_corner_radius(&self) -> f64 {
        self.tip_radius().hypot(self.cross_width / 2.0)
    }

    pub fn inscribed_radius(&self) -> f64 {
        self.cross_width / 2.0
    }

    /// All nesting violations, empty when the geometry is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let vals = [
            ("length", self.length),
            ("width", self.width),
            ("cross_length", self.cross_length),
            ("cross_width", self.cross_width),
            ("buffer_radius", self.buffer_radius),
            ("axis_radius", self.axis_radius),
        ];
        for (name, x) in vals {
            if !(x.is_finite() && x > 0.0) {
                v.push(format!("{name} must be positive and finite"));
            }
        }
        if !v.is_empty() {
            return v;
        }
        if self.axis_radius >= self.inscribed_radius() {
            v.push("axis_radius must be smaller than the rotor inscribed radius cross_width/2".into());
        }
        if self.inscribed_radius() >= self.tip_radius() {
            v.push("cross_width must be smaller than cross_length".into());
        }
        if self.tip_corner_radius() >= self.buffer_radius {
            v.push("rotor must lie inside the buffer zone (tip corner radius >= buffer_radius)".into());
        }
        if self.buffer_radius >= self.width / 2.0 {
            v.push("buffer_radius must be smaller than width/2".into());
        }
        let [cx, cy] = self.center;
        let r = self.buffer_radius;
        if cx - r <= 0.0 || cx + r >= self.length || cy - r <= 0.0 || cy + r >= self.width {
            v.push("buffer zone must lie strictly inside the channel".into());
        }
        v
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MeshError::InvalidGeometry(v.join("; ")))
        }
    }

    /// Cross outline, counterclockwise, starting at the lower corner of the
    /// +x arm tip.
    pub fn cross_corners(&self) -> [Vec2; 12] {
        let (a, b) = (self.tip_radius(), self.inscribed_radius());
        let rel = [
            [a, -b],
            [a, b],
            [b, b],
            [b, a],
            [-b, a],
            [-b, b],
            [-a, b],
            [-a, -b],
            [-b, -b],
            [-b, -a],
            [b, -a],
            [b, -b],
        ];
        rel.map(|p| [self.center[0] + p[0], self.center[1] + p[1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Target edge length in the bulk fluid.
    pub h: f64,
    /// Edge length inside the rotor; defaults to `cross_width / 3`.
    pub h_structure: Option<f64>,
    /// Nodes on each side of the sliding ring; defaults to a multiple of 4
    /// giving an arc spacing of at most `0.4 h`.
    pub ring_nodes: Option<usize>,
    /// Nodes on the axis circle.
    pub axis_nodes: Option<usize>,
    /// Growth rate of the size function away from refined curves.
    pub grading: f64,
    /// Lattice offset salt; equal seeds give bit-identical meshes.
    pub seed: u64,
    /// Centroid smoothing passes over the fill points.
    pub smoothing_passes: usize,
}

impl MeshOptions {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            h_structure: None,
            ring_nodes: None,
            axis_nodes: None,
            grading: 0.35,
            seed: 0,
            smoothing_passes: 6,
        }
    }
}

/// Default ring node count for a given buffer radius and bulk size.
pub fn default_ring_nodes(buffer_radius: f64, h: f64) -> usize {
    4 * ((2.0 * PI * buffer_radius) / (4.0 * 0.4 * h)).ceil() as usize
}

pub fn build_rotor_channel_mesh(geom: &ChannelRotorGeometry, h: f64) -> Result<Mesh, MeshError> {
    build_rotor_channel_mesh_with(geom, &MeshOptions::new(h))
}

const ALPHA: f64 = 0.85;

struct Sizer {
    h: f64,
    hs: f64,
    s_ring: f64,
    s_axis: f64,
    g: f64,
    center: Vec2,
    r_buf: f64,
    r_in: f64,
    cross: Vec<Vec2>,
}

impl Sizer {
    fn size(&self, p: Vec2) -> f64 {
        let r = (p[0] - self.center[0]).hypot(p[1] - self.center[1]);
        let ring = self.s_ring + self.g * (r - self.r_buf).abs();
        let axis = self.s_axis + self.g * (r - self.r_in).max(0.0);
        if point_in_polygon(p, &self.cross) {
            return self.hs.min(axis);
        }
        let cross = self.hs + self.g * polygon_distance(p, &self.cross);
        self.h.min(ring).min(cross).min(axis)
    }
}

fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn polygon_distance(p: Vec2, poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

fn lerp(a: Vec2, b: Vec2, t: f64) -> Vec2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Points strictly between `a` and `b`, graded so spacing follows `size`.
fn graded_interior(a: Vec2, b: Vec2, sizer: &Sizer) -> Vec<Vec2> {
    let samples = 4000;
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let mut cum = vec![0.0; samples + 1];
    for k in 0..samples {
        let tm = (k as f64 + 0.5) / samples as f64;
        cum[k + 1] = cum[k] + len / samples as f64 / sizer.size(lerp(a, b, tm));
    }
    let total = cum[samples];
    let n = (total.round() as usize).max(1);
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut k = 0;
    for i in 1..n {
        let target = total * i as f64 / n as f64;
        while cum[k + 1] < target {
            k += 1;
        }
        let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
        out.push(lerp(a, b, (k as f64 + frac) / samples as f64));
    }
    out
}

fn uniform_interior(a: Vec2, b: Vec2, size: f64) -> Vec<Vec2> {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let n = ((len / size).ceil() as usize).max(1);
    (1..n).map(|i| lerp(a, b, i as f64 / n as f64)).collect()
}

fn circle_points(center: Vec2, r: f64, n: usize, phase: f64) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64 + phase;
            [center[0] + r * a.cos(), center[1] + r * a.sin()]
        })
        .collect()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn unit_from(x: u64) -> f64 {
    (splitmix(x) >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform-grid spatial index over points.
struct Grid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<usize>>,
}

impl Grid {
    fn new(lo: Vec2, hi: Vec2, cell: f64) -> Self {
        let nx = (((hi[0] - lo[0]) / cell).ceil() as usize).max(1) + 1;
        let ny = (((hi[1] - lo[1]) / cell).ceil() as usize).max(1) + 1;
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            bins: vec![Vec::new(); nx * ny],
        }
    }

    fn key(&self, p: Vec2) -> (i64, i64) {
        (
            ((p[0] - self.origin[0]) / self.cell).floor() as i64,
            ((p[1] - self.origin[1]) / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, p: Vec2, id: usize) {
        let (i, j) = self.key(p);
        let i = i.clamp(0, self.nx as i64 - 1) as usize;
        let j = j.clamp(0, self.ny as i64 - 1) as usize;
        self.bins[j * self.nx + i].push(id);
    }

    fn any_within(&self, p: Vec2, radius: f64, mut pred: impl FnMut(usize) -> bool) -> bool {
        let (ci, cj) = self.key(p);
        let r = (radius / self.cell).ceil() as i64;
        for j in (cj - r).max(0)..=(cj + r).min(self.ny as i64 - 1) {
            for i in (ci - r).max(0)..=(ci + r).min(self.nx as i64 - 1) {
                for &id in &self.bins[j as usize * self.nx + i as usize] {
                    if pred(id) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Stationary,
    Ring,
    Rotating,
}

pub fn build_rotor_channel_mesh_with(geom: &ChannelRotorGeometry, opts: &MeshOptions) -> Result<Mesh, MeshError> {
    geom.validate()?;
    if !(opts.h.is_finite() && opts.h > 0.0) {
        return Err(MeshError::InvalidGeometry("h must be positive".into()));
    }
    let h = opts.h;
    let hs = opts.h_structure.unwrap_or(geom.cross_width / 3.0).min(h);
    let m = opts.ring_nodes.unwrap_or_else(|| default_ring_nodes(geom.buffer_radius, h));
    if m < 16 {
        return Err(MeshError::MeshGenerationFailure(format!(
            "sliding ring would receive {m} nodes, at least 16 are required"
        )));
    }
    let c = geom.center;
    let r_buf = geom.buffer_radius;
    let r_in = geom.axis_radius;
    let n_axis = opts
        .axis_nodes
        .unwrap_or_else(|| ((2.0 * PI * r_in / (0.5 * hs)).ceil() as usize).max(12));
    let s_ring = 2.0 * PI * r_buf / m as f64;
    let s_axis = 2.0 * PI * r_in / n_axis as f64;
    let cross = geom.cross_corners().to_vec();
    let sizer = Sizer {
        h,
        hs,
        s_ring,
        s_axis,
        g: opts.grading,
        center: c,
        r_buf,
        r_in,
        cross: cross.clone(),
    };

    // points with their region, local spacing, and constraint segments
    let mut pts: Vec<Vec2> = Vec::new();
    let mut region: Vec<Region> = Vec::new();
    let mut spacing: Vec<f64> = Vec::new();
    let mut segments: Vec<(usize, usize, BoundaryTag)> = Vec::new();
    let push = |p: Vec2, r: Region, s: f64, pts: &mut Vec<Vec2>, region: &mut Vec<Region>, spacing: &mut Vec<f64>| {
        pts.push(p);
        region.push(r);
        spacing.push(s);
        pts.len() - 1
    };

    // channel outline, counterclockwise from the origin
    let (l, w) = (geom.length, geom.width);
    let corners = [[0.0, 0.0], [l, 0.0], [l, w], [0.0, w]];
    let side_tags = [BoundaryTag::Wall, BoundaryTag::Outlet, BoundaryTag::Wall, BoundaryTag::Inlet];
    let corner_ids: Vec<usize> = corners
        .iter()
        .map(|&p| push(p, Region::Stationary, sizer.size(p), &mut pts, &mut region, &mut spacing))
        .collect();
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let mut prev = corner_ids[k];
        for p in graded_interior(a, b, &sizer) {
            let id = push(p, Region::Stationary, sizer.size(p), &mut pts, &mut region, &mut spacing);
            segments.push((prev, id, side_tags[k]));
            prev = id;
        }
        segments.push((prev, corner_ids[(k + 1) % 4], side_tags[k]));
    }

    // sliding ring, one set of positions shared by both sides for now
    let ring_start = pts.len();
    for p in circle_points(c, r_buf, m, 0.0) {
        push(p, Region::Ring, s_ring, &mut pts, &mut region, &mut spacing);
    }
    for i in 0..m {
        segments.push((ring_start + i, ring_start + (i + 1) % m, BoundaryTag::InterfaceGammaRs));
    }

    // structured layers, staggered by half a spacing per layer
    let d_layer = s_ring * 3f64.sqrt() / 2.0;
    let wall_gap = |r: f64| (c[1] - r).min(w - c[1] - r).min(c[0] - r).min(l - c[0] - r);
    for k in 1..=2 {
        let r = r_buf + k as f64 * d_layer;
        let sk = 2.0 * PI * r / m as f64;
        if wall_gap(r) < 1.2 * sk {
            break;
        }
        let phase = if k % 2 == 1 { PI / m as f64 } else { 0.0 };
        for p in circle_points(c, r, m, phase) {
            push(p, Region::Stationary, sk, &mut pts, &mut region, &mut spacing);
        }
    }
    for k in 1..=3 {
        let r = r_buf - k as f64 * d_layer;
        let sk = 2.0 * PI * r / m as f64;
        if r - 1.5 * s_ring < geom.tip_corner_radius() {
            break;
        }
        let phase = if k % 2 == 1 { PI / m as f64 } else { 0.0 };
        for p in circle_points(c, r, m, phase) {
            push(p, Region::Rotating, sk, &mut pts, &mut region, &mut spacing);
        }
    }

    // rotor outline
    let mut cross_ids = Vec::new();
    for k in 0..12 {
        let (a, b) = (cross[k], cross[(k + 1) % 12]);
        cross_ids.push(push(a, Region::Rotating, hs, &mut pts, &mut region, &mut spacing));
        for p in uniform_interior(a, b, hs) {
            cross_ids.push(push(p, Region::Rotating, hs, &mut pts, &mut region, &mut spacing));
        }
    }
    for k in 0..cross_ids.len() {
        segments.push((cross_ids[k], cross_ids[(k + 1) % cross_ids.len()], BoundaryTag::InterfaceGamma));
    }
    // fan of three points around each convex corner, splitting the 270°
    // fluid wedge evenly so the corner never gets a sliver
    for k in 0..12 {
        let (a, p, b) = (cross[(k + 11) % 12], cross[k], cross[(k + 1) % 12]);
        if super::signed_area(a, p, b) <= 0.0 {
            continue;
        }
        let out = (b[1] - p[1]).atan2(b[0] - p[0]);
        for j in 1..=3 {
            let ang = out - j as f64 * 1.5 * PI / 4.0;
            let q = [p[0] + hs * ang.cos(), p[1] + hs * ang.sin()];
            push(q, Region::Rotating, hs, &mut pts, &mut region, &mut spacing);
        }
    }

    // axis circle
    let axis_start = pts.len();
    for p in circle_points(c, r_in, n_axis, 0.0) {
        push(p, Region::Rotating, s_axis, &mut pts, &mut region, &mut spacing);
    }
    for i in 0..n_axis {
        segments.push((axis_start + i, axis_start + (i + 1) % n_axis, BoundaryTag::AxisGammaIn));
    }

    // fill
    let s_min = s_axis.min(hs).min(s_ring);
    let delta = s_min / 3.0;
    let grid_cell = 2.0 * ALPHA * s_min;
    let mut grid = Grid::new([0.0, 0.0], [l, w], grid_cell);
    for (i, &p) in pts.iter().enumerate() {
        grid.insert(p, i);
    }
    let mut seg_grid = Grid::new([0.0, 0.0], [l, w], grid_cell);
    let mut max_half: f64 = 0.0;
    let seg_geo: Vec<(Vec2, f64)> = segments
        .iter()
        .map(|&(a, b, _)| {
            let (pa, pb) = (pts[a], pts[b]);
            let half = 0.5 * (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            ([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])], half)
        })
        .collect();
    for (k, &(mid, half)) in seg_geo.iter().enumerate() {
        seg_grid.insert(mid, k);
        max_half = max_half.max(half);
    }
    let ox = unit_from(opts.seed.wrapping_mul(2).wrapping_add(1)) * delta;
    let oy = unit_from(opts.seed.wrapping_mul(2).wrapping_add(2)) * delta;
    let dy = delta * 3f64.sqrt() / 2.0;
    let ny = (w / dy).ceil() as usize + 1;
    let nx = (l / delta).ceil() as usize + 2;
    let mut cands: Vec<(f64, usize, Vec2)> = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = oy + j as f64 * dy;
        if y <= 0.0 || y >= w {
            continue;
        }
        let shift = if j % 2 == 1 { delta / 2.0 } else { 0.0 };
        for i in 0..nx {
            let x = ox + shift + i as f64 * delta;
            if x <= 0.0 || x >= l {
                continue;
            }
            let p = [x, y];
            let r = (x - c[0]).hypot(y - c[1]);
            if r <= r_in {
                continue;
            }
            cands.push((sizer.size(p), j * nx + i, p));
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let fill_start = pts.len();
    for &(size, _, p) in &cands {
        let excl = ALPHA * size;
        if grid.any_within(p, excl, |id| {
            let q = pts[id];
            (q[0] - p[0]).hypot(q[1] - p[1]) < excl
        }) {
            continue;
        }
        if seg_grid.any_within(p, max_half, |k| {
            let (mid, half) = seg_geo[k];
            (mid[0] - p[0]).hypot(mid[1] - p[1]) <= half * 1.02
        }) {
            continue;
        }
        let r = (p[0] - c[0]).hypot(p[1] - c[1]);
        let reg = if r > r_buf { Region::Stationary } else { Region::Rotating };
        let id = pts.len();
        pts.push(p);
        region.push(reg);
        spacing.push(size);
        grid.insert(p, id);
    }

    let ring_poly: Vec<Vec2> = (0..m).map(|i| pts[ring_start + i]).collect();
    let axis_poly: Vec<Vec2> = (0..n_axis).map(|i| pts[axis_start + i]).collect();
    let shapes = Shapes {
        ring: ring_poly,
        cross,
        axis: axis_poly,
    };
    for _ in 0..opts.smoothing_passes {
        smooth_fill(&mut pts, &region, fill_start, &shapes, &seg_geo, r_buf, c)?;
    }
    assemble(geom, &pts, &region, &segments, ring_start, m)
}

struct Shapes {
    ring: Vec<Vec2>,
    cross: Vec<Vec2>,
    axis: Vec<Vec2>,
}

/// One pass of area-weighted centroid smoothing over the fill points. A
/// move is rejected when it would change the point's region or put it
/// inside the diametral circle of a boundary segment.
fn smooth_fill(
    pts: &mut [Vec2],
    region: &[Region],
    fill_start: usize,
    shapes: &Shapes,
    seg_geo: &[(Vec2, f64)],
    r_buf: f64,
    c: Vec2,
) -> Result<(), MeshError> {
    let n = pts.len();
    let mut acc = vec![[0.0f64; 3]; n];
    for stat in [true, false] {
        let local: Vec<usize> = (0..n)
            .filter(|&i| match region[i] {
                Region::Ring => true,
                Region::Stationary => stat,
                Region::Rotating => !stat,
            })
            .collect();
        let lp: Vec<Vec2> = local.iter().map(|&i| pts[i]).collect();
        let tris = triangulate(&lp).ok_or_else(|| MeshError::MeshGenerationFailure("Delaunay triangulation failed".into()))?;
        for t in &tris {
            let (a, b, cc) = (lp[t[0]], lp[t[1]], lp[t[2]]);
            let cen = [(a[0] + b[0] + cc[0]) / 3.0, (a[1] + b[1] + cc[1]) / 3.0];
            let in_ring = point_in_polygon(cen, &shapes.ring);
            if stat == in_ring || (!stat && point_in_polygon(cen, &shapes.axis)) {
                continue;
            }
            let area = super::signed_area(a, b, cc);
            for &v in t {
                let g = local[v];
                acc[g][0] += area * cen[0];
                acc[g][1] += area * cen[1];
                acc[g][2] += area;
            }
        }
    }
    let in_cross = |p: Vec2| point_in_polygon(p, &shapes.cross);
    for i in fill_start..n {
        if acc[i][2] <= 0.0 {
            continue;
        }
        let q = [acc[i][0] / acc[i][2], acc[i][1] / acc[i][2]];
        let p = pts[i];
        let rq = (q[0] - c[0]).hypot(q[1] - c[1]);
        let same_region = match region[i] {
            Region::Stationary => rq > r_buf,
            _ => rq < r_buf && !point_in_polygon(q, &shapes.axis) && in_cross(q) == in_cross(p),
        };
        let encroach = seg_geo
            .iter()
            .any(|&(mid, half)| (mid[0] - q[0]).hypot(mid[1] - q[1]) <= half * 1.02);
        if same_region && !encroach {
            pts[i] = q;
        }
    }
    Ok(())
}

fn assemble(
    geom: &ChannelRotorGeometry,
    pts: &[Vec2],
    region: &[Region],
    segments: &[(usize, usize, BoundaryTag)],
    ring_start: usize,
    m: usize,
) -> Result<Mesh, MeshError> {
    let fail = |msg: String| MeshError::MeshGenerationFailure(msg);
    let n = pts.len();
    // global numbering: stationary points, stationary ring, rotating ring,
    // rotating points
    let mut stat_ids = vec![usize::MAX; n];
    let mut rot_ids = vec![usize::MAX; n];
    let mut coords: Vec<Vec2> = Vec::new();
    for i in 0..n {
        if region[i] == Region::Stationary {
            stat_ids[i] = coords.len();
            coords.push(pts[i]);
        }
    }
    for i in ring_start..ring_start + m {
        stat_ids[i] = coords.len();
        coords.push(pts[i]);
    }
    for i in ring_start..ring_start + m {
        rot_ids[i] = coords.len();
        coords.push(pts[i]);
    }
    for i in 0..n {
        if region[i] == Region::Rotating {
            rot_ids[i] = coords.len();
            coords.push(pts[i]);
        }
    }
    let ring_poly: Vec<Vec2> = (0..m).map(|i| pts[ring_start + i]).collect();
    let cross_poly = geom.cross_corners().to_vec();
    let axis_poly: Vec<Vec2> = segments
        .iter()
        .filter(|s| s.2 == BoundaryTag::AxisGammaIn)
        .map(|s| pts[s.0])
        .collect();

    let mut triangles = Vec::new();
    let mut subdomains = Vec::new();
    for (ids, is_stat) in [(&stat_ids, true), (&rot_ids, false)] {
        let local: Vec<usize> = (0..n).filter(|&i| ids[i] != usize::MAX).collect();
        let lp: Vec<Vec2> = local.iter().map(|&i| pts[i]).collect();
        let tris = triangulate(&lp).ok_or_else(|| fail("Delaunay triangulation failed".into()))?;
        let mut edges = std::collections::HashSet::new();
        for t in &tris {
            let g = [ids[local[t[0]]], ids[local[t[1]]], ids[local[t[2]]]];
            for k in 0..3 {
                let (a, b) = (g[k], g[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
            let cen = [
                (lp[t[0]][0] + lp[t[1]][0] + lp[t[2]][0]) / 3.0,
                (lp[t[0]][1] + lp[t[1]][1] + lp[t[2]][1]) / 3.0,
            ];
            let in_ring = point_in_polygon(cen, &ring_poly);
            let sub = if is_stat {
                if in_ring {
                    continue;
                }
                Subdomain::StatFluid
            } else {
                if !in_ring {
                    return Err(fail("rotating triangle outside the sliding ring".into()));
                }
                if point_in_polygon(cen, &axis_poly) {
                    continue;
                }
                if point_in_polygon(cen, &cross_poly) {
                    Subdomain::Structure
                } else {
                    Subdomain::RotFluid
                }
            };
            triangles.push(g);
            subdomains.push(sub);
        }
        for &(a, b, tag) in segments {
            let relevant = match tag {
                BoundaryTag::InterfaceGammaRs => true,
                BoundaryTag::Inlet | BoundaryTag::Outlet | BoundaryTag::Wall => is_stat,
                _ => !is_stat,
            };
            if !relevant {
                continue;
            }
            let (ga, gb) = (ids[a], ids[b]);
            if !edges.contains(&(ga.min(gb), ga.max(gb))) {
                return Err(fail(format!("constraint segment {tag:?} missing from triangulation")));
            }
        }
    }

    let mut boundary_edges = Vec::new();
    for &(a, b, tag) in segments {
        match tag {
            BoundaryTag::InterfaceGammaRs => {
                boundary_edges.push(BoundaryEdge { nodes: [rot_ids[a], rot_ids[b]], tag });
                boundary_edges.push(BoundaryEdge { nodes: [stat_ids[a], stat_ids[b]], tag });
            }
            BoundaryTag::Inlet | BoundaryTag::Outlet | BoundaryTag::Wall => {
                boundary_edges.push(BoundaryEdge { nodes: [stat_ids[a], stat_ids[b]], tag });
            }
            _ => boundary_edges.push(BoundaryEdge { nodes: [rot_ids[a], rot_ids[b]], tag }),
        }
    }
    let ring_stationary: Vec<usize> = (0..m).map(|i| stat_ids[ring_start + i]).collect();
    let ring_rotating: Vec<usize> = (0..m).map(|i| rot_ids[ring_start + i]).collect();
    let mut alias: Vec<usize> = (0..coords.len()).collect();
    for i in 0..m {
        alias[ring_rotating[i]] = ring_stationary[i];
    }
    let mesh = Mesh {
        reference: coords.clone(),
        current: coords,
        triangles,
        subdomains,
        boundary_edges,
        alias,
        center: geom.center,
        ring_rotating,
        ring_stationary,
    };
    for t in 0..mesh.num_triangles() {
        if mesh.area(t, false) <= 0.0 {
            return Err(fail(format!("triangle {t} has non-positive area")));
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry_is_valid() {
        assert!(ChannelRotorGeometry::default().violations().is_empty());
    }

    #[test]
    fn oversized_buffer_rejected() {
        let g = ChannelRotorGeometry {
            buffer_radius: 0.11,
            ..Default::default()
        };
        assert!(matches!(build_rotor_channel_mesh(&g, 0.02), Err(MeshError::InvalidGeometry(_))));
    }

    #[test]
    fn default_ring_count() {
        assert_eq!(default_ring_nodes(0.08, 0.02), 64);
    }

    #[test]
    fn polygon_membership() {
        let g = ChannelRotorGeometry::default();
        let poly = g.cross_corners();
        assert!(point_in_polygon([0.15 + 0.04, 0.1], &poly));
        assert!(!point_in_polygon([0.15 + 0.02, 0.1 + 0.02], &poly));
    }
}
