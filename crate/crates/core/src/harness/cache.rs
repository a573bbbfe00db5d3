//! Binary containers for compressed maps ("LRSM1") and phase-space fields
//! ("LRSF1"). All integers are u64 and all reals f64, little-endian.

use std::path::Path;

use crate::disc::{NodeRange, PhaseSpaceField};
use crate::error::{CacheError, Error, Result};
use crate::problem::Fingerprint;
use crate::rsvd::{LowRankMap, RsvdConfig};

use super::output::write_atomic;

pub const MAP_MAGIC: &[u8; 5] = b"LRSM1";
pub const FIELD_MAGIC: &[u8; 5] = b"LRSF1";
pub const FORMAT_VERSION: u32 = 1;

/// Compressed maps of every subdomain of one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MapCache {
    pub fingerprint: Fingerprint,
    pub rsvd: RsvdConfig,
    /// Index m - 1.
    pub maps: Vec<LowRankMap>,
}

impl MapCache {
    pub fn new(fingerprint: Fingerprint, rsvd: RsvdConfig, maps: Vec<LowRankMap>) -> Result<Self> {
        for (k, map) in maps.iter().enumerate() {
            if map.subdomain != k + 1 {
                return Err(Error::invalid(format!("map {} is stored in slot {}", map.subdomain, k + 1)));
            }
            if map.fingerprint != fingerprint {
                return Err(Error::StaleMap {
                    subdomain: map.subdomain,
                });
            }
        }
        Ok(Self {
            fingerprint,
            rsvd,
            maps,
        })
    }

    pub fn get(&self, subdomain: usize, fingerprint: &Fingerprint) -> Option<&LowRankMap> {
        self.maps
            .get(subdomain.checked_sub(1)?)
            .filter(|m| m.fingerprint == *fingerprint)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.header(MAP_MAGIC, &self.fingerprint);
        w.u64(self.rsvd.rank as u64);
        w.u64(self.rsvd.oversample as u64);
        w.u64(self.rsvd.seed);
        w.u64(self.maps.len() as u64);
        for map in &self.maps {
            w.u64(map.subdomain as u64);
            w.u64(map.core.first as u64);
            w.u64(map.core.last as u64);
            w.u64(map.n_v as u64);
            w.u64(map.numerical_rank as u64);
            w.u64(map.sigma.len() as u64);
            w.u64(map.boundary_weights.len() as u64);
            w.u64(map.interior_weights.len() as u64);
            w.f64s(&map.sigma);
            map.left.iter().for_each(|v| w.f64s(v));
            map.right.iter().for_each(|v| w.f64s(v));
            w.f64s(&map.boundary_weights);
            w.f64s(&map.interior_weights);
        }
        w.buf
    }

    /// Parse a container; `expected` rejects caches built for another problem.
    pub fn from_bytes(bytes: &[u8], expected: Option<&Fingerprint>) -> std::result::Result<Self, CacheError> {
        let mut r = Reader { bytes, pos: 0 };
        let fingerprint = r.header(MAP_MAGIC, expected)?;
        let rsvd = RsvdConfig::new(r.usize()?, r.usize()?, r.u64()?);
        let count = r.usize()?;
        let mut maps = Vec::new();
        for k in 0..count {
            let subdomain = r.usize()?;
            if subdomain != k + 1 {
                return Err(CacheError::Corrupt(format!("map {subdomain} stored in slot {}", k + 1)));
            }
            let (first, last) = (r.usize()?, r.usize()?);
            if last < first {
                return Err(CacheError::Corrupt(format!("empty core range {first}..{last}")));
            }
            let n_v = r.usize()?;
            let numerical_rank = r.usize()?;
            let rank = r.usize()?;
            let nb = r.usize()?;
            let ni = r.usize()?;
            let core = NodeRange::new(first, last);
            if ni != core.len() * n_v {
                return Err(CacheError::Corrupt(format!("interior length {ni} does not match the core range")));
            }
            let sigma = r.f64s(rank)?;
            let left = (0..rank).map(|_| r.f64s(ni)).collect::<std::result::Result<_, _>>()?;
            let right = (0..rank).map(|_| r.f64s(nb)).collect::<std::result::Result<_, _>>()?;
            let boundary_weights = r.f64s(nb)?;
            let interior_weights = r.f64s(ni)?;
            maps.push(LowRankMap {
                subdomain,
                fingerprint,
                core,
                n_v,
                sigma,
                left,
                right,
                boundary_weights,
                interior_weights,
                numerical_rank,
            });
        }
        r.finish()?;
        Ok(Self {
            fingerprint,
            rsvd,
            maps,
        })
    }
}

pub fn save_cache(path: &Path, cache: &MapCache) -> Result<()> {
    write_atomic(path, &cache.to_bytes())
}

pub fn load_cache(path: &Path, expected: Option<&Fingerprint>) -> std::result::Result<MapCache, CacheError> {
    MapCache::from_bytes(&read(path)?, expected)
}

/// A field tagged with the problem it solves and a caller-chosen key.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredField {
    pub fingerprint: Fingerprint,
    pub key: [u8; 32],
    pub field: PhaseSpaceField,
}

impl StoredField {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.header(FIELD_MAGIC, &self.fingerprint);
        w.buf.extend_from_slice(&self.key);
        let range = self.field.range();
        w.u64(range.first as u64);
        w.u64(range.last as u64);
        w.u64(self.field.n_v() as u64);
        w.f64s(self.field.data());
        w.buf
    }

    pub fn from_bytes(bytes: &[u8], expected: Option<&Fingerprint>) -> std::result::Result<Self, CacheError> {
        let mut r = Reader { bytes, pos: 0 };
        let fingerprint = r.header(FIELD_MAGIC, expected)?;
        let key: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let (first, last, n_v) = (r.usize()?, r.usize()?, r.usize()?);
        if last < first {
            return Err(CacheError::Corrupt(format!("empty node range {first}..{last}")));
        }
        let range = NodeRange::new(first, last);
        let data = r.f64s(range.len() * n_v)?;
        r.finish()?;
        let field = PhaseSpaceField::from_vec(range, n_v, data).map_err(|e| CacheError::Corrupt(e.to_string()))?;
        Ok(Self { fingerprint, key, field })
    }
}

pub fn save_field(path: &Path, field: &StoredField) -> Result<()> {
    write_atomic(path, &field.to_bytes())
}

pub fn load_field(path: &Path, expected: Option<&Fingerprint>) -> std::result::Result<StoredField, CacheError> {
    StoredField::from_bytes(&read(path)?, expected)
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, CacheError> {
    std::fs::read(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn header(&mut self, magic: &[u8; 5], fp: &Fingerprint) {
        self.buf.extend_from_slice(magic);
        self.buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        self.buf.extend_from_slice(&fp.0);
    }

    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn f64s(&mut self, xs: &[f64]) {
        for x in xs {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> std::result::Result<&[u8], CacheError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                CacheError::Corrupt(format!(
                    "truncated: wanted {n} bytes at offset {}, file has {}",
                    self.pos,
                    self.bytes.len()
                ))
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn header(&mut self, magic: &[u8; 5], expected: Option<&Fingerprint>) -> std::result::Result<Fingerprint, CacheError> {
        let found = &self.bytes[..self.bytes.len().min(magic.len())];
        if found != magic {
            return Err(CacheError::BadMagic {
                expected: String::from_utf8_lossy(magic).into_owned(),
                found: found.to_vec(),
            });
        }
        self.pos = magic.len();
        let version = u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(CacheError::UnsupportedVersion(version));
        }
        let fp = Fingerprint(self.take(32)?.try_into().expect("32 bytes"));
        if let Some(exp) = expected {
            if *exp != fp {
                return Err(CacheError::FingerprintMismatch {
                    expected: exp.short(),
                    found: fp.short(),
                });
            }
        }
        Ok(fp)
    }

    fn u64(&mut self) -> std::result::Result<u64, CacheError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> std::result::Result<usize, CacheError> {
        let x = self.u64()?;
        usize::try_from(x).map_err(|_| CacheError::Corrupt(format!("count {x} out of range")))
    }

    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, CacheError> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| CacheError::Corrupt(format!("length {n} out of range")))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn finish(&self) -> std::result::Result<(), CacheError> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(CacheError::Corrupt(format!(
                "{} trailing bytes after the last record",
                self.bytes.len() - self.pos
            )))
        }
    }
}
