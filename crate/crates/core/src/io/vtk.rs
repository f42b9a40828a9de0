//! Legacy ASCII VTK snapshots of the current mesh with nodal fields.
//! Floats use Rust's shortest round-trip formatting, so reading a file
//! back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::IoError;
use crate::mesh::{Mesh, Subdomain};
use crate::rotation::Vec2;
use crate::timeloop::State;

#[derive(Debug, Clone, PartialEq)]
pub struct VtkSnapshot {
    pub title: String,
    pub points: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    /// Per triangle.
    pub subdomain: Vec<i32>,
    pub velocity: Vec<Vec2>,
    pub pressure: Vec<f64>,
    pub displacement: Vec<Vec2>,
    /// Per node: lowest subdomain id among adjacent triangles.
    pub node_subdomain: Vec<i32>,
}

impl VtkSnapshot {
    /// Nodal fields of `state` on the current coordinates of `mesh`.
    /// Structure nodes report the structure velocity and displacement,
    /// rotating fluid nodes the mesh displacement.
    pub fn from_state(mesh: &Mesh, state: &State) -> Self {
        let n = mesh.num_nodes();
        let mut node_sub = vec![i32::MAX; n];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for &v in tri {
                node_sub[v] = node_sub[v].min(mesh.subdomains[t].id());
            }
        }
        let structure = Subdomain::Structure.id();
        let velocity = (0..n)
            .map(|v| if node_sub[v] == structure { state.v_s[v] } else { state.v_f[v] })
            .collect();
        let displacement = (0..n)
            .map(|v| if node_sub[v] == structure { state.u_s[v] } else { state.ale.a_u[v] })
            .collect();
        Self {
            title: format!("step {} t {:?}", state.step, state.t),
            points: mesh.current.clone(),
            triangles: mesh.triangles.clone(),
            subdomain: mesh.subdomains.iter().map(|s| s.id()).collect(),
            velocity,
            pressure: state.p.clone(),
            displacement,
            node_subdomain: node_sub,
        }
    }

    pub fn to_vtk(&self) -> String {
        let mut s = String::new();
        let n = self.points.len();
        let nt = self.triangles.len();
        s += "# vtk DataFile Version 3.0\n";
        s += &self.title.replace('\n', " ");
        s += "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
        let _ = writeln!(s, "POINTS {n} double");
        for p in &self.points {
            let _ = writeln!(s, "{:?} {:?} 0.0", p[0], p[1]);
        }
        let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "CELL_TYPES {nt}");
        for _ in 0..nt {
            s += "5\n";
        }
        let _ = writeln!(s, "CELL_DATA {nt}");
        s += "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
        for id in &self.subdomain {
            let _ = writeln!(s, "{id}");
        }
        let _ = writeln!(s, "POINT_DATA {n}");
        vectors(&mut s, "velocity", &self.velocity);
        s += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
        for p in &self.pressure {
            let _ = writeln!(s, "{p:?}");
        }
        vectors(&mut s, "displacement", &self.displacement);
        s += "SCALARS node_subdomain int 1\nLOOKUP_TABLE default\n";
        for id in &self.node_subdomain {
            let _ = writeln!(s, "{id}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        std::fs::write(path, self.to_vtk()).map_err(|e| IoError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        parse_vtk(&text)
    }
}

fn vectors(s: &mut String, name: &str, v: &[Vec2]) {
    let _ = writeln!(s, "VECTORS {name} double");
    for x in v {
        let _ = writeln!(s, "{:?} {:?} 0.0", x[0], x[1]);
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, IoError> {
        let (i, l) = self.inner.next().ok_or_else(|| fail(self.line + 1, "unexpected end of file"))?;
        self.line = i + 1;
        Ok(l)
    }

    fn header(&mut self, keyword: &str) -> Result<Vec<&'a str>, IoError> {
        let l = self.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&keyword) {
            return Err(fail(self.line, &format!("expected {keyword}, found {l:?}")));
        }
        Ok(parts)
    }

    fn numbers<T: std::str::FromStr>(&mut self, count: usize) -> Result<Vec<T>, IoError> {
        let l = self.next()?;
        let vals: Result<Vec<T>, _> = l.split_whitespace().map(str::parse).collect();
        match vals {
            Ok(v) if v.len() == count => Ok(v),
            _ => Err(fail(self.line, &format!("expected {count} numbers, found {l:?}"))),
        }
    }
}

fn fail(line: usize, message: &str) -> IoError {
    IoError::Format {
        what: "VTK file",
        line,
        message: message.into(),
    }
}

fn count(parts: &[&str], line: usize) -> Result<usize, IoError> {
    parts
        .get(1)
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| fail(line, "missing count"))
}

/// Read back a file produced by [`VtkSnapshot::to_vtk`].
pub fn parse_vtk(text: &str) -> Result<VtkSnapshot, IoError> {
    let mut ls = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if !ls.next()?.starts_with("# vtk DataFile Version 3.0") {
        return Err(fail(1, "not a legacy VTK 3.0 file"));
    }
    let title = ls.next()?.to_string();
    if ls.next()? != "ASCII" {
        return Err(fail(3, "only ASCII files are supported"));
    }
    ls.header("DATASET")?;
    let h = ls.header("POINTS")?;
    let n = count(&h, ls.line)?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let v: Vec<f64> = ls.numbers(3)?;
        points.push([v[0], v[1]]);
    }
    let h = ls.header("CELLS")?;
    let nt = count(&h, ls.line)?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let v: Vec<usize> = ls.numbers(4)?;
        if v[0] != 3 || v[1..].iter().any(|&i| i >= n) {
            return Err(fail(ls.line, "bad triangle"));
        }
        triangles.push([v[1], v[2], v[3]]);
    }
    ls.header("CELL_TYPES")?;
    for _ in 0..nt {
        ls.numbers::<i32>(1)?;
    }
    ls.header("CELL_DATA")?;
    ls.header("SCALARS")?;
    ls.header("LOOKUP_TABLE")?;
    let subdomain = (0..nt).map(|_| ls.numbers::<i32>(1).map(|v| v[0])).collect::<Result<_, _>>()?;
    ls.header("POINT_DATA")?;
    let read_vectors = |ls: &mut Lines| -> Result<Vec<Vec2>, IoError> {
        ls.header("VECTORS")?;
        (0..n).map(|_| ls.numbers::<f64>(3).map(|v| [v[0], v[1]])).collect()
    };
    let velocity = read_vectors(&mut ls)?;
    ls.header("SCALARS")?;
    ls.header("LOOKUP_TABLE")?;
    let pressure = (0..n).map(|_| ls.numbers::<f64>(1).map(|v| v[0])).collect::<Result<_, _>>()?;
    let displacement = read_vectors(&mut ls)?;
    ls.header("SCALARS")?;
    ls.header("LOOKUP_TABLE")?;
    let node_subdomain = (0..n).map(|_| ls.numbers::<i32>(1).map(|v| v[0])).collect::<Result<_, _>>()?;
    Ok(VtkSnapshot {
        title,
        points,
        triangles,
        subdomain,
        velocity,
        pressure,
        displacement,
        node_subdomain,
    })
}

/// Times at which snapshots are due for `t_end` and `interval`, `t = 0`
/// included. Empty when `interval` is zero.
pub fn snapshot_steps(dt: f64, t_end: f64, interval: f64) -> Vec<usize> {
    if interval <= 0.0 {
        return Vec::new();
    }
    let every = (interval / dt).round().max(1.0) as usize;
    let last = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    (0..=last).filter(|k| k % every == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VtkSnapshot {
        VtkSnapshot {
            title: "step 3 t 0.03".into(),
            points: vec![[0.0, 0.0], [1.0 / 3.0, 0.1], [0.2, std::f64::consts::PI]],
            triangles: vec![[0, 1, 2]],
            subdomain: vec![2],
            velocity: vec![[1e-300, -0.0], [2.5, 1.0 / 7.0], [0.0, 0.0]],
            pressure: vec![-12.5, 1e17, f64::MIN_POSITIVE],
            displacement: vec![[0.1 + 0.2, 0.0], [0.0, 3e-9], [1.0, -1.0]],
            node_subdomain: vec![2, 2, 1],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let s = sample();
        let back = parse_vtk(&s.to_vtk()).unwrap();
        assert_eq!(back, s);
        for (a, b) in s.velocity.iter().zip(&back.velocity) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = sample().to_vtk();
        let cut = &text[..text.len() / 2];
        assert!(matches!(parse_vtk(cut), Err(IoError::Format { .. })));
    }

    #[test]
    fn snapshot_cadence() {
        assert_eq!(snapshot_steps(0.01, 1.0, 0.1).len(), 11);
        assert_eq!(snapshot_steps(0.01, 1.0, 0.1)[10], 100);
        assert!(snapshot_steps(0.01, 1.0, 0.0).is_empty());
    }
}
