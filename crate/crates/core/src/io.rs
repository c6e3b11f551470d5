// SPDX-License-Identifier: Apache-2.0

//! Binary containers for tables (`.gjt`), maps (`.gjm`) and juntas
//! (`.gjj`), and the JSON provenance sidecar.
//!
//! All integers are little-endian. Values are stored as `u16` in
//! mixed-radix index order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridShape};
use crate::junta::Junta;
use crate::lipschitz::TorusMap;

const GJT: &[u8; 4] = b"GJT1";
const GJM: &[u8; 4] = b"GJM1";
const GJJ: &[u8; 4] = b"GJJ1";

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != magic {
            return Err(Error::Format(format!("expected magic {}", String::from_utf8_lossy(magic))));
        }
        Ok(Self { bytes, pos: 4 })
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Format(format!("truncated: need {len} bytes at offset {}, file has {}", self.pos, self.bytes.len()))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u16s(&mut self, count: usize) -> Result<Vec<u16>> {
        let raw = self.take(count.checked_mul(2).ok_or_else(|| Error::Format("table too large".into()))?)?;
        Ok(raw.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect())
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_values(out: &mut Vec<u8>, values: impl Iterator<Item = u16>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn read_shape(r: &mut Reader<'_>) -> Result<GridShape> {
    let (k, n, l) = (r.u32()?, r.u32()?, r.u32()?);
    GridShape::new(k, n, l).map_err(|e| Error::Format(format!("bad header: {e}")))
}

pub fn encode_table(f: &GridFunction) -> Vec<u8> {
    let shape = f.shape();
    let mut out = Vec::with_capacity(16 + 2 * f.len());
    out.extend_from_slice(GJT);
    for v in [shape.k, shape.n, shape.l] {
        put_u32(&mut out, v);
    }
    put_values(&mut out, f.values());
    out
}

pub fn decode_table(bytes: &[u8]) -> Result<GridFunction> {
    let mut r = Reader::new(bytes, GJT)?;
    let shape = read_shape(&mut r)?;
    let values = r.u16s(shape.points())?;
    r.finish()?;
    GridFunction::from_values(shape, &values)
}

pub fn encode_map(f: &TorusMap) -> Vec<u8> {
    let shape = f.shape();
    let mut out = Vec::with_capacity(20 + 2 * shape.points() * f.m());
    out.extend_from_slice(GJM);
    for v in [shape.k, shape.n, shape.l, f.m() as u32] {
        put_u32(&mut out, v);
    }
    for c in f.components() {
        put_values(&mut out, c.values());
    }
    out
}

pub fn decode_map(bytes: &[u8]) -> Result<TorusMap> {
    let mut r = Reader::new(bytes, GJM)?;
    let shape = read_shape(&mut r)?;
    let m = r.u32()? as usize;
    let components = (0..m)
        .map(|_| GridFunction::from_values(shape, &r.u16s(shape.points())?))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    TorusMap::new(components)
}

pub fn encode_junta(g: &Junta) -> Vec<u8> {
    let shape = g.shape();
    let mut out = Vec::with_capacity(16 + 4 * g.size() + 2 * g.table().len());
    out.extend_from_slice(GJJ);
    for v in [shape.k, shape.n, g.size() as u32] {
        put_u32(&mut out, v);
    }
    for c in g.coords_one_based() {
        put_u32(&mut out, c);
    }
    put_values(&mut out, g.table().iter().copied());
    out
}

/// The container does not record the value range, so it is taken as
/// `max(2, largest value + 1)`.
pub fn decode_junta(bytes: &[u8]) -> Result<Junta> {
    let mut r = Reader::new(bytes, GJJ)?;
    let (k, n, size) = (r.u32()?, r.u32()?, r.u32()? as usize);
    if size > n as usize {
        return Err(Error::Format(format!("|J| = {size} exceeds n = {n}")));
    }
    let coords = (0..size)
        .map(|_| {
            let c = r.u32()?;
            if c == 0 || c > n {
                return Err(Error::Format(format!("coordinate {c} outside 1..={n}")));
            }
            Ok(c as usize - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = (k as usize)
        .checked_pow(size as u32)
        .ok_or_else(|| Error::Format("junta table too large".into()))?;
    let table = r.u16s(cells)?;
    r.finish()?;
    let l = table.iter().map(|&v| v as u32 + 1).max().unwrap_or(0).max(2);
    let shape = GridShape::new(k, n, l).map_err(|e| Error::Format(format!("bad header: {e}")))?;
    Junta::new(shape, coords, table)
}

/// Provenance record written next to every generated container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub generator: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    /// Name of the pseudorandom generator used with `seed`.
    pub prng: String,
}

impl Sidecar {
    pub fn new(generator: impl Into<String>, seed: Option<u64>) -> Self {
        Self { generator: generator.into(), params: BTreeMap::new(), seed, prng: "ChaCha8Rng::seed_from_u64".into() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_owned(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }
}

/// `dir/stem.gjt` becomes `dir/stem.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    fs::write(sidecar_path(path), serde_json::to_string_pretty(sidecar)? + "\n")?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_slice(&fs::read(sidecar_path(path))?)?)
}

pub fn write_table(path: &Path, f: &GridFunction) -> Result<()> {
    Ok(fs::write(path, encode_table(f))?)
}

pub fn read_table(path: &Path) -> Result<GridFunction> {
    decode_table(&fs::read(path)?)
}

pub fn write_map(path: &Path, f: &TorusMap) -> Result<()> {
    Ok(fs::write(path, encode_map(f))?)
}

pub fn read_map(path: &Path) -> Result<TorusMap> {
    decode_map(&fs::read(path)?)
}

pub fn write_junta(path: &Path, g: &Junta) -> Result<()> {
    Ok(fs::write(path, encode_junta(g))?)
}

pub fn read_junta(path: &Path) -> Result<Junta> {
    decode_junta(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cuboid, random_map};

    #[test]
    fn table_layout() {
        let f = cuboid(1, 1, 3, 1).unwrap();
        let bytes = encode_table(&f);
        assert_eq!(&bytes[..4], b"GJT1");
        assert_eq!(bytes[4..16], [3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(bytes[16..], [1, 0, 0, 0, 0, 0]);
        assert_eq!(decode_table(&bytes).unwrap(), f);
    }

    #[test]
    fn table_rejects_damage() {
        let mut bytes = encode_table(&cuboid(2, 2, 4, 2).unwrap());
        assert!(matches!(decode_table(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(decode_table(&longer), Err(Error::Format(_))));
        bytes[16] = 7;
        assert!(matches!(decode_table(&bytes), Err(Error::ValueOutOfRange { index: 0, value: 7, l: 2 })));
        bytes[0] = b'X';
        assert!(matches!(decode_table(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn map_and_junta_round_trip() {
        let f = random_map(4, 2, 3, 2, 11).unwrap();
        let bytes = encode_map(&f);
        assert_eq!(&bytes[4..20], [4, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(decode_map(&bytes).unwrap(), f);

        let shape = GridShape::boolean(3, 4).unwrap();
        let g = Junta::new(shape, vec![1, 3], (0..9).map(|i| (i % 2) as u16).collect()).unwrap();
        let bytes = encode_junta(&g);
        assert_eq!(bytes[12..24], [2, 0, 0, 0, 2, 0, 0, 0, 4, 0, 0, 0]);
        assert_eq!(decode_junta(&bytes).unwrap(), g);
    }

    #[test]
    fn sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tree.gjt");
        let s = Sidecar::new("tree", Some(7)).param("k", 4).param("d", 2);
        write_sidecar(&path, &s).unwrap();
        assert!(dir.path().join("tree.json").exists());
        assert_eq!(read_sidecar(&path).unwrap(), s);
    }
}
