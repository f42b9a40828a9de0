//! Binary restart files: the magic `RFSI1`, then little-endian fields.
//! A checkpoint holds a [`State`] and the current mesh coordinates, which
//! is enough to continue a run on the same reference mesh.

use std::path::Path;

use crate::ale::{AleState, Matching};
use crate::error::IoError;
use crate::rotation::Vec2;
use crate::timeloop::State;

pub const MAGIC: &[u8; 5] = b"RFSI1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: State,
    pub current: Vec<Vec2>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn scalars(&mut self, v: &[f64]) {
        self.u64(v.len() as u64);
        v.iter().for_each(|x| self.f64(*x));
    }
    fn vectors(&mut self, v: &[Vec2]) {
        self.u64(v.len() as u64);
        for x in v {
            self.f64(x[0]);
            self.f64(x[1]);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], IoError> {
        if self.pos + n > self.bytes.len() {
            return Err(bad(self.pos, "truncated file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u64(&mut self) -> Result<u64, IoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, IoError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize, IoError> {
        let n = self.u64()? as usize;
        if n > (self.bytes.len() - self.pos) / 8 {
            return Err(bad(self.pos, "array length exceeds file size"));
        }
        Ok(n)
    }
    fn scalars(&mut self) -> Result<Vec<f64>, IoError> {
        let n = self.len()?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn vectors(&mut self) -> Result<Vec<Vec2>, IoError> {
        let n = self.len()?;
        (0..n).map(|_| Ok([self.f64()?, self.f64()?])).collect()
    }
}

/// `line` carries the byte offset for binary files.
fn bad(offset: usize, message: &str) -> IoError {
    IoError::Format {
        what: "checkpoint",
        line: offset,
        message: message.into(),
    }
}

pub fn encode(cp: &Checkpoint) -> Vec<u8> {
    let mut w = Writer(MAGIC.to_vec());
    let s = &cp.state;
    w.u64(s.step as u64);
    w.f64(s.t);
    w.vectors(&s.v_f);
    w.vectors(&s.v_s);
    w.scalars(&s.p);
    w.vectors(&s.u_s);
    w.f64(s.ale.theta);
    w.vectors(&s.ale.a_u);
    w.vectors(&s.ale.a_d);
    w.vectors(&s.ale.u_theta);
    w.vectors(&s.ale.w);
    w.u64(s.ale.matching.shift as u64);
    w.u64(s.ale.matching.target.len() as u64);
    s.ale.matching.target.iter().for_each(|t| w.u64(*t as u64));
    w.vectors(&s.ale.matching.u_m);
    w.vectors(&cp.current);
    w.0
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, IoError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(bad(0, "missing RFSI1 magic"));
    }
    let mut r = Reader {
        bytes,
        pos: MAGIC.len(),
    };
    let step = r.u64()? as usize;
    let t = r.f64()?;
    let v_f = r.vectors()?;
    let v_s = r.vectors()?;
    let p = r.scalars()?;
    let u_s = r.vectors()?;
    let theta = r.f64()?;
    let a_u = r.vectors()?;
    let a_d = r.vectors()?;
    let u_theta = r.vectors()?;
    let w = r.vectors()?;
    let shift = r.u64()? as i64;
    let m = r.len()?;
    let target = (0..m).map(|_| r.u64().map(|x| x as usize)).collect::<Result<_, _>>()?;
    let u_m = r.vectors()?;
    let current = r.vectors()?;
    if r.pos != bytes.len() {
        return Err(bad(r.pos, "trailing bytes"));
    }
    let n = current.len();
    if [v_f.len(), v_s.len(), p.len(), u_s.len(), a_u.len(), a_d.len(), u_theta.len(), w.len()]
        .iter()
        .any(|&k| k != n)
    {
        return Err(bad(r.pos, "field lengths disagree with the node count"));
    }
    Ok(Checkpoint {
        state: State {
            step,
            t,
            v_f,
            v_s,
            p,
            u_s,
            ale: AleState {
                theta,
                a_u,
                a_d,
                u_theta,
                w,
                matching: Matching { shift, target, u_m },
            },
        },
        current,
    })
}

pub fn write_checkpoint(cp: &Checkpoint, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, encode(cp)).map_err(|e| IoError::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, IoError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    decode(&bytes)
}
