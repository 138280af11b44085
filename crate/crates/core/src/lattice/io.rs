//! Field serialization.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! "MODC" | version u32 | d u32 | counts d*u64 | steps d*f64 | offsets d*f64
//!        | basis d*d f64 (row k = e_k) | values N*(re f64, im f64)
//!        | blocks*: tag [u8; 4] | length u64 | payload (UTF-8 JSON)
//! ```
//!
//! Readers skip blocks with unknown tags. Small fields also have a JSON mirror.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{OrderedBasis, SampledField, UniformGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MODC";
pub const VERSION: u32 = 1;

/// Tagged metadata block following the sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataBlock {
    pub tag: [u8; 4],
    pub payload: Vec<u8>,
}

impl MetadataBlock {
    pub fn json<T: Serialize>(tag: &[u8; 4], value: &T) -> Result<Self> {
        Ok(Self {
            tag: *tag,
            payload: serde_json::to_vec(value)?,
        })
    }

    pub fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        Ok(serde_json::from_slice(&self.payload)?)
    }
}

/// A field together with its metadata blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub field: SampledField,
    pub blocks: Vec<MetadataBlock>,
}

impl FieldFile {
    pub fn new(field: SampledField) -> Self {
        Self {
            field,
            blocks: Vec::new(),
        }
    }

    pub fn block(&self, tag: &[u8; 4]) -> Option<&MetadataBlock> {
        self.blocks.iter().find(|b| &b.tag == tag)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let grid = self.field.grid();
        let d = grid.dim();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(d as u32).to_le_bytes())?;
        for &n in grid.counts() {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for &h in grid.steps() {
            w.write_all(&h.to_le_bytes())?;
        }
        for &o in grid.offsets() {
            w.write_all(&o.to_le_bytes())?;
        }
        for e in grid.basis().vectors() {
            for &c in e {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        for v in self.field.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        for b in &self.blocks {
            w.write_all(&b.tag)?;
            w.write_all(&(b.payload.len() as u64).to_le_bytes())?;
            w.write_all(&b.payload)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let d = cur.u32()? as usize;
        if d == 0 || d > 16 {
            return Err(Error::Format(format!("implausible dimension {d}")));
        }
        let counts = (0..d)
            .map(|_| cur.u64().map(|n| n as usize))
            .collect::<Result<Vec<_>>>()?;
        let steps = (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let offsets = (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let basis = (0..d)
            .map(|_| (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let grid = UniformGrid::new(OrderedBasis::new(basis)?, counts, steps, offsets)?;
        let n = grid.len();
        if cur.remaining() < n * 16 {
            return Err(Error::Format("truncated sample block".into()));
        }
        let values = (0..n)
            .map(|_| Ok(Complex64::new(cur.f64()?, cur.f64()?)))
            .collect::<Result<Vec<_>>>()?;
        let field = SampledField::new(grid, values)?;
        let mut blocks = Vec::new();
        while cur.remaining() > 0 {
            let tag: [u8; 4] = cur.take(4)?.try_into().expect("4 bytes");
            let len = cur.u64()? as usize;
            let payload = cur.take(len)?.to_vec();
            blocks.push(MetadataBlock { tag, payload });
        }
        Ok(Self { field, blocks })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        Self::read_from(&mut f)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Format("unexpected end of data".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// JSON mirror of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub d: usize,
    pub counts: Vec<usize>,
    pub steps: Vec<f64>,
    pub offsets: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&SampledField> for FieldJson {
    fn from(f: &SampledField) -> Self {
        let g = f.grid();
        Self {
            d: g.dim(),
            counts: g.counts().to_vec(),
            steps: g.steps().to_vec(),
            offsets: g.offsets().to_vec(),
            basis: g.basis().vectors().to_vec(),
            re: f.values().iter().map(|v| v.re).collect(),
            im: f.values().iter().map(|v| v.im).collect(),
        }
    }
}

impl TryFrom<FieldJson> for SampledField {
    type Error = Error;

    fn try_from(j: FieldJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::Format("re and im lengths differ".into()));
        }
        if j.counts.len() != j.d {
            return Err(Error::Format("counts length differs from d".into()));
        }
        let grid = UniformGrid::new(OrderedBasis::new(j.basis)?, j.counts, j.steps, j.offsets)?;
        let values = j.re.iter().zip(&j.im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        SampledField::new(grid, values)
    }
}

pub fn field_to_json(f: &SampledField) -> Result<String> {
    Ok(serde_json::to_string(&FieldJson::from(f))?)
}

pub fn field_from_json(s: &str) -> Result<SampledField> {
    let j: FieldJson = serde_json::from_str(s)?;
    j.try_into()
}
