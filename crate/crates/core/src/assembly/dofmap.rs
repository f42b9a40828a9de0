//! Degree-of-freedom numbering with shared interface velocities and
//! Dirichlet elimination.
//!
//! Fluid and structure elements reference the same mesh node on Γ, so the
//! interface velocity is a single unknown. Nodes of the rotating sliding
//! ring are aliased to their matched stationary node and carry no
//! unknowns of their own.

use crate::error::AssemblyError;
use crate::mesh::{Mesh, Subdomain};
use crate::rotation::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Free(usize),
    Fixed(f64),
    Inactive,
}

/// Constraint origin. Declaration order is the priority order used to
/// resolve corner conflicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintKind {
    Wall,
    Inlet,
    Axis,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub node: usize,
    pub value: Vec2,
    pub kind: ConstraintKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictPolicy {
    /// Keep the higher-priority value and record the dropped one.
    #[default]
    Priority,
    /// Reject values that disagree by more than 1e-12.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroppedConstraint {
    pub node: usize,
    pub kept: ConstraintKind,
    pub dropped: ConstraintKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveParts {
    pub fluid: bool,
    pub structure: bool,
}

impl ActiveParts {
    pub const ALL: Self = Self {
        fluid: true,
        structure: true,
    };
    pub const FLUID: Self = Self {
        fluid: true,
        structure: false,
    };
    pub const STRUCTURE: Self = Self {
        fluid: false,
        structure: true,
    };

    pub fn includes(&self, sub: Subdomain) -> bool {
        if sub.is_fluid() {
            self.fluid
        } else {
            self.structure
        }
    }
}

#[derive(Debug, Clone)]
pub struct DofMap {
    alias: Vec<usize>,
    /// Indexed by canonical node.
    vel: Vec<[Slot; 2]>,
    pres: Vec<Slot>,
    n_v: usize,
    n_p: usize,
    pub parts: ActiveParts,
    pub dropped: Vec<DroppedConstraint>,
}

impl DofMap {
    pub fn build(
        mesh: &Mesh,
        parts: ActiveParts,
        constraints: &[Constraint],
        policy: ConflictPolicy,
        pressure_pin: Option<(usize, f64)>,
    ) -> Result<Self, AssemblyError> {
        let n = mesh.num_nodes();
        let alias = mesh.alias.clone();
        let mut has_v = vec![false; n];
        let mut has_p = vec![false; n];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let sub = mesh.subdomains[t];
            if !parts.includes(sub) {
                continue;
            }
            for &v in tri {
                has_v[alias[v]] = true;
                if sub.is_fluid() {
                    has_p[alias[v]] = true;
                }
            }
        }
        let mut fixed: Vec<Option<(Vec2, ConstraintKind)>> = vec![None; n];
        let mut dropped = Vec::new();
        let mut sorted: Vec<&Constraint> = constraints.iter().collect();
        sorted.sort_by_key(|c| (c.kind, c.node));
        for c in sorted {
            let node = alias[c.node];
            if !has_v[node] {
                continue;
            }
            match fixed[node] {
                None => fixed[node] = Some((c.value, c.kind)),
                Some((v, kind)) => {
                    let agree = (v[0] - c.value[0]).abs() <= 1e-12 && (v[1] - c.value[1]).abs() <= 1e-12;
                    if agree {
                        continue;
                    }
                    match policy {
                        ConflictPolicy::Strict => {
                            return Err(AssemblyError::InconsistentConstraint {
                                node,
                                first: v,
                                second: c.value,
                            })
                        }
                        ConflictPolicy::Priority => dropped.push(DroppedConstraint {
                            node,
                            kept: kind,
                            dropped: c.kind,
                        }),
                    }
                }
            }
        }
        let mut vel = vec![[Slot::Inactive; 2]; n];
        let mut n_v = 0;
        for v in 0..n {
            if !has_v[v] {
                continue;
            }
            for c in 0..2 {
                vel[v][c] = match fixed[v] {
                    Some((val, _)) => Slot::Fixed(val[c]),
                    None => {
                        n_v += 1;
                        Slot::Free(n_v - 1)
                    }
                };
            }
        }
        let pin = pressure_pin.map(|(node, val)| (alias[node], val));
        let mut pres = vec![Slot::Inactive; n];
        let mut n_p = 0;
        for v in 0..n {
            if !has_p[v] {
                continue;
            }
            pres[v] = match pin {
                Some((pn, val)) if pn == v => Slot::Fixed(val),
                _ => {
                    n_p += 1;
                    Slot::Free(n_p - 1)
                }
            };
        }
        Ok(Self {
            alias,
            vel,
            pres,
            n_v,
            n_p,
            parts,
            dropped,
        })
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn canonical(&self, node: usize) -> usize {
        self.alias[node]
    }

    pub fn velocity(&self, node: usize, c: usize) -> Slot {
        self.vel[self.alias[node]][c]
    }

    pub fn pressure(&self, node: usize) -> Slot {
        self.pres[self.alias[node]]
    }

    /// Per-node velocities from a reduced vector; fixed values are filled
    /// in and inactive entries are zero. Aliased nodes copy their target.
    pub fn scatter_velocity(&self, x: &[f64]) -> Vec<Vec2> {
        (0..self.alias.len())
            .map(|v| {
                let mut out = [0.0; 2];
                for (c, o) in out.iter_mut().enumerate() {
                    *o = match self.velocity(v, c) {
                        Slot::Free(i) => x[i],
                        Slot::Fixed(val) => val,
                        Slot::Inactive => 0.0,
                    };
                }
                out
            })
            .collect()
    }

    pub fn scatter_pressure(&self, x: &[f64]) -> Vec<f64> {
        (0..self.alias.len())
            .map(|v| match self.pressure(v) {
                Slot::Free(i) => x[i],
                Slot::Fixed(val) => val,
                Slot::Inactive => 0.0,
            })
            .collect()
    }

    /// Reduced vector from per-node velocities, read at canonical nodes.
    pub fn gather_velocity(&self, v: &[Vec2]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_v];
        for (node, slots) in self.vel.iter().enumerate() {
            for c in 0..2 {
                if let Slot::Free(i) = slots[c] {
                    x[i] = v[node][c];
                }
            }
        }
        x
    }

    pub fn gather_pressure(&self, p: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_p];
        for (node, s) in self.pres.iter().enumerate() {
            if let Slot::Free(i) = s {
                x[*i] = p[node];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryEdge, BoundaryTag};

    /// Two triangles sharing the edge 1–2: fluid (0,1,2), structure (1,3,2).
    fn toy() -> Mesh {
        let coords = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let tris = vec![[0, 1, 2], [1, 3, 2]];
        let subs = vec![Subdomain::StatFluid, Subdomain::Structure];
        let edges = vec![
            BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Wall },
            BoundaryEdge { nodes: [2, 0], tag: BoundaryTag::Inlet },
        ];
        Mesh::from_parts(coords, tris, subs, edges, [0.5, 0.5])
    }

    #[test]
    fn shared_edge_counts_once() {
        let m = toy();
        let d = DofMap::build(&m, ActiveParts::ALL, &[], ConflictPolicy::Strict, None).unwrap();
        // 3 fluid nodes + 3 structure nodes, minus 2 shared, times 2 components
        let mut union = std::collections::BTreeSet::new();
        for tri in &m.triangles {
            union.extend(tri.iter().copied());
        }
        assert_eq!(d.n_v(), 2 * (3 + 3) - 2 * 2);
        assert_eq!(d.n_v(), 2 * union.len());
        assert_eq!(d.n_p(), 3);
        assert_eq!(d.pressure(3), Slot::Inactive);
    }

    #[test]
    fn corner_conflict() {
        let m = toy();
        let cs = [
            Constraint { node: 0, value: [1.0, 0.0], kind: ConstraintKind::Inlet },
            Constraint { node: 0, value: [0.0, 0.0], kind: ConstraintKind::Wall },
        ];
        let err = DofMap::build(&m, ActiveParts::ALL, &cs, ConflictPolicy::Strict, None).unwrap_err();
        assert!(matches!(err, AssemblyError::InconsistentConstraint { node: 0, .. }));
        let d = DofMap::build(&m, ActiveParts::ALL, &cs, ConflictPolicy::Priority, None).unwrap();
        assert_eq!(d.velocity(0, 0), Slot::Fixed(0.0));
        assert_eq!(d.dropped.len(), 1);
        assert_eq!(d.dropped[0].kept, ConstraintKind::Wall);
        let agree = [
            Constraint { node: 0, value: [0.0, 0.0], kind: ConstraintKind::Inlet },
            Constraint { node: 0, value: [0.0, 1e-13], kind: ConstraintKind::Wall },
        ];
        assert!(DofMap::build(&m, ActiveParts::ALL, &agree, ConflictPolicy::Strict, None).is_ok());
    }

    #[test]
    fn gather_scatter_round_trip() {
        let m = toy();
        let cs = [Constraint { node: 3, value: [0.5, -0.5], kind: ConstraintKind::Axis }];
        let d = DofMap::build(&m, ActiveParts::ALL, &cs, ConflictPolicy::Strict, Some((0, 2.0))).unwrap();
        let x: Vec<f64> = (0..d.n_v()).map(|i| i as f64 + 0.25).collect();
        let v = d.scatter_velocity(&x);
        assert_eq!(v[3], [0.5, -0.5]);
        assert_eq!(d.gather_velocity(&v), x);
        let p = d.scatter_pressure(&[7.0, 8.0]);
        assert_eq!(p[0], 2.0);
        assert_eq!(d.gather_pressure(&p), vec![7.0, 8.0]);
    }
}
