//! Bowyer-Watson Delaunay triangulation with exact predicates.

use robust::{incircle, orient2d, Coord};

use crate::rotation::Vec2;

const NONE: usize = usize::MAX;

#[inline]
fn c(p: Vec2) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

pub fn orient(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    orient2d(c(a), c(b), c(p))
}

struct Tri {
    v: [usize; 3],
    /// `n[k]` is the neighbor across the edge opposite `v[k]`.
    n: [usize; 3],
    alive: bool,
}

/// Delaunay triangulation of `points`. Returns CCW triangles over point
/// indices, or `None` when the input is degenerate (duplicates, or fewer
/// than three non-collinear points).
pub fn triangulate(points: &[Vec2]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let big = 1e3 * span;
    let mut pts = points.to_vec();
    pts.push([mid[0] - big, mid[1] - big]);
    pts.push([mid[0] + big, mid[1] - big]);
    pts.push([mid[0], mid[1] + big]);
    let mut tris = vec![Tri {
        v: [n, n + 1, n + 2],
        n: [NONE; 3],
        alive: true,
    }];
    let mut last = 0usize;
    let mut cavity: Vec<usize> = Vec::new();
    let mut in_cavity: Vec<bool> = vec![false];
    let mut stack: Vec<usize> = Vec::new();
    let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
    for pi in 0..n {
        let p = pts[pi];
        let start = locate(&tris, &pts, last, p)?;
        // a point lying on a vertex is a duplicate
        if tris[start].v.iter().any(|&v| pts[v] == p) {
            return None;
        }
        cavity.clear();
        stack.clear();
        stack.push(start);
        in_cavity[start] = true;
        while let Some(t) = stack.pop() {
            cavity.push(t);
            for k in 0..3 {
                let nb = tris[t].n[k];
                if nb == NONE || in_cavity[nb] {
                    continue;
                }
                let [a, b, cc] = tris[nb].v;
                if incircle(c(pts[a]), c(pts[b]), c(pts[cc]), c(p)) > 0.0 {
                    in_cavity[nb] = true;
                    stack.push(nb);
                }
            }
        }
        boundary.clear();
        for &t in &cavity {
            for k in 0..3 {
                let nb = tris[t].n[k];
                if nb == NONE || !in_cavity[nb] {
                    let a = tris[t].v[(k + 1) % 3];
                    let b = tris[t].v[(k + 2) % 3];
                    boundary.push((a, b, nb));
                }
            }
        }
        for &t in &cavity {
            tris[t].alive = false;
            in_cavity[t] = false;
        }
        // star the cavity from p, reusing dead slots first
        let mut new_ids = Vec::with_capacity(boundary.len());
        let mut reuse = cavity.iter().copied();
        for &(a, b, nb) in &boundary {
            if orient(pts[a], pts[b], p) <= 0.0 {
                return None;
            }
            let tri = Tri {
                v: [a, b, pi],
                n: [NONE, NONE, nb],
                alive: true,
            };
            let id = match reuse.next() {
                Some(id) => {
                    tris[id] = tri;
                    id
                }
                None => {
                    tris.push(tri);
                    in_cavity.push(false);
                    tris.len() - 1
                }
            };
            if nb != NONE {
                for k in 0..3 {
                    let nv = tris[nb].v;
                    if nv[(k + 1) % 3] == b && nv[(k + 2) % 3] == a {
                        tris[nb].n[k] = id;
                    }
                }
            }
            new_ids.push(id);
        }
        // remaining dead slots stay dead
        for id in reuse {
            tris[id].alive = false;
        }
        // link new triangles around p: triangle (a,b,p) has edge (b,p)
        // opposite a and edge (p,a) opposite b
        let mut by_first: std::collections::HashMap<usize, usize> = std::collections::HashMap::with_capacity(new_ids.len());
        for &id in &new_ids {
            by_first.insert(tris[id].v[0], id);
        }
        for &id in &new_ids {
            let b = tris[id].v[1];
            let next = *by_first.get(&b)?;
            tris[id].n[0] = next;
            tris[next].n[1] = id;
        }
        last = new_ids[0];
    }
    let out: Vec<[usize; 3]> = tris
        .iter()
        .filter(|t| t.alive && t.v.iter().all(|&v| v < n))
        .map(|t| t.v)
        .collect();
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

fn locate(tris: &[Tri], pts: &[Vec2], start: usize, p: Vec2) -> Option<usize> {
    let mut t = if tris[start].alive {
        start
    } else {
        tris.iter().position(|t| t.alive)?
    };
    let mut steps = 0usize;
    'walk: loop {
        steps += 1;
        if steps > 4 * tris.len() + 16 {
            // fall back to exhaustive search
            return tris.iter().position(|tr| {
                tr.alive && (0..3).all(|k| orient(pts[tr.v[(k + 1) % 3]], pts[tr.v[(k + 2) % 3]], p) >= 0.0)
            });
        }
        let v = tris[t].v;
        for k in 0..3 {
            let a = pts[v[(k + 1) % 3]];
            let b = pts[v[(k + 2) % 3]];
            if orient(a, b, p) < 0.0 {
                let nb = tris[t].n[k];
                if nb == NONE {
                    return None;
                }
                t = nb;
                continue 'walk;
            }
        }
        return Some(t);
    }
}
