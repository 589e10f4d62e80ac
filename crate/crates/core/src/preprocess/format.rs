//! Binary library container.
//!
//! All integers are little-endian; `varint` is unsigned LEB128. Configurations
//! are stored as lattice ranks (see [`Scenario::rank`]), so decoding needs the
//! scenario the library was built from.
//!
//! ```text
//! magic        8 bytes   "CTMPLIB\n"
//! version      u32       LIBRARY_FORMAT_VERSION
//! fingerprint  32 bytes  SHA-256 of the scenario's canonical JSON
//! seed         u64
//! dof          u32
//! home         dof x i32
//! regions      u32 count, then per region:
//!   id           u32 byte length + UTF-8
//!   entries      u32 count, then per entry:
//!     attractor        varint rank
//!     max_descent      u32
//!     members          varint count, varint first rank, varint gaps
//!     rep_paths        u32 count, then per path:
//!       states           varint count, varint rank per state
//!       cost             f64 bits
//!   excluded     varint count, varint first rank, varint gaps
//! checksum     32 bytes  SHA-256 of every preceding byte
//! ```
//!
//! Encoding is a pure function of the library value, so equal libraries
//! produce identical bytes.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{CoverEntry, Library, Neighborhood, RegionCover};
use crate::cspace::{Config, Scenario};
use crate::search::Path;

pub const LIBRARY_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"CTMPLIB\n";

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("library I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error(
        "library was built for a different scenario (fingerprint {found}, expected {expected})"
    )]
    FingerprintMismatch { expected: String, found: String },
    #[error("corrupt library: {0}")]
    CorruptLibrary(String),
    #[error("unsupported library format_version {0} (expected {LIBRARY_FORMAT_VERSION})")]
    UnsupportedVersion(u32),
}

fn corrupt(msg: impl Into<String>) -> LibraryError {
    LibraryError::CorruptLibrary(msg.into())
}

struct Encoder<'a> {
    buf: Vec<u8>,
    scenario: &'a Scenario,
}

impl Encoder<'_> {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn varint(&mut self, mut v: u64) {
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.buf.push(byte);
                return;
            }
            self.buf.push(byte | 0x80);
        }
    }

    fn rank(&mut self, c: &Config) {
        self.varint(self.scenario.rank(c));
    }

    fn sorted_set(&mut self, set: &BTreeSet<Config>) {
        self.varint(set.len() as u64);
        let mut prev = None;
        for c in set {
            let r = self.scenario.rank(c);
            self.varint(prev.map_or(r, |p| r - p));
            prev = Some(r);
        }
    }
}

/// Writes `library` in the binary container format. `scenario` supplies the
/// lattice dimensions used for rank encoding.
pub fn save_library(
    library: &Library,
    scenario: &Scenario,
    sink: &mut impl Write,
) -> Result<(), LibraryError> {
    sink.write_all(&encode(library, scenario))?;
    Ok(())
}

fn encode(library: &Library, scenario: &Scenario) -> Vec<u8> {
    let mut e = Encoder {
        buf: Vec::new(),
        scenario,
    };
    e.buf.extend_from_slice(MAGIC);
    e.u32(LIBRARY_FORMAT_VERSION);
    e.buf.extend_from_slice(&library.fingerprint);
    e.buf.extend_from_slice(&library.seed.to_le_bytes());
    e.u32(library.home.dof() as u32);
    for &c in library.home.coords() {
        e.buf.extend_from_slice(&c.to_le_bytes());
    }
    e.u32(library.regions.len() as u32);
    for region in &library.regions {
        e.u32(region.region_id.len() as u32);
        e.buf.extend_from_slice(region.region_id.as_bytes());
        e.u32(region.entries.len() as u32);
        for entry in &region.entries {
            let n = &entry.neighborhood;
            e.rank(&n.attractor);
            e.u32(n.max_descent_steps);
            e.sorted_set(&n.members);
            e.u32(entry.rep_paths.len() as u32);
            for p in &entry.rep_paths {
                e.varint(p.len() as u64);
                for c in p.configs() {
                    e.rank(c);
                }
                e.buf.extend_from_slice(&p.cost().to_bits().to_le_bytes());
            }
        }
        e.sorted_set(&region.excluded);
    }
    let digest = Sha256::digest(&e.buf);
    e.buf.extend_from_slice(digest.as_slice());
    e.buf
}

struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
    scenario: &'a Scenario,
}

impl Decoder<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], LibraryError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| corrupt("unexpected end of data"))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, LibraryError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, LibraryError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64, LibraryError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.take(1)?[0];
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(corrupt("varint overflow"))
    }

    fn count(&mut self, v: u64) -> Result<usize, LibraryError> {
        // every encoded element takes at least one byte
        if v as usize > self.data.len() - self.pos {
            return Err(corrupt("element count exceeds data"));
        }
        Ok(v as usize)
    }

    fn config(&mut self, rank: u64) -> Result<Config, LibraryError> {
        if rank >= self.scenario.num_states() {
            return Err(corrupt(format!("rank {rank} outside the lattice")));
        }
        Ok(self.scenario.unrank(rank))
    }

    fn sorted_set(&mut self) -> Result<BTreeSet<Config>, LibraryError> {
        let raw = self.varint()?;
        let n = self.count(raw)?;
        let mut out = BTreeSet::new();
        let mut prev: Option<u64> = None;
        for _ in 0..n {
            let v = self.varint()?;
            let r = match prev {
                None => v,
                Some(p) => p
                    .checked_add(v)
                    .filter(|_| v > 0)
                    .ok_or_else(|| corrupt("non-increasing rank sequence"))?,
            };
            out.insert(self.config(r)?);
            prev = Some(r);
        }
        Ok(out)
    }
}

/// Reads a library and checks it belongs to `scenario`.
pub fn load_library(source: &mut impl Read, scenario: &Scenario) -> Result<Library, LibraryError> {
    let mut data = Vec::new();
    source.read_to_end(&mut data)?;
    decode(&data, scenario)
}

fn decode(data: &[u8], scenario: &Scenario) -> Result<Library, LibraryError> {
    if data.len() < MAGIC.len() + 4 || &data[..MAGIC.len()] != MAGIC {
        return Err(corrupt("missing library header"));
    }
    let version = u32::from_le_bytes(data[8..12].try_into().unwrap());
    if version != LIBRARY_FORMAT_VERSION {
        return Err(LibraryError::UnsupportedVersion(version));
    }
    if data.len() < 12 + 32 + 32 {
        return Err(corrupt("truncated"));
    }
    let (body, checksum) = data.split_at(data.len() - 32);
    if Sha256::digest(body).as_slice() != checksum {
        return Err(corrupt("checksum mismatch"));
    }
    let mut d = Decoder {
        data: body,
        pos: 12,
        scenario,
    };
    let mut fingerprint = [0u8; 32];
    fingerprint.copy_from_slice(d.take(32)?);
    let expected = scenario.fingerprint();
    if fingerprint != expected {
        return Err(LibraryError::FingerprintMismatch {
            expected: hex::encode(expected),
            found: hex::encode(fingerprint),
        });
    }
    let seed = d.u64()?;
    let dof = d.u32()? as usize;
    if dof != scenario.dof() {
        return Err(corrupt("DOF does not match scenario"));
    }
    let mut home = Vec::with_capacity(dof);
    for _ in 0..dof {
        home.push(i32::from_le_bytes(d.take(4)?.try_into().unwrap()));
    }
    let n_regions = d.u32()? as usize;
    let n_regions = d.count(n_regions as u64)?;
    let mut regions = Vec::with_capacity(n_regions);
    for _ in 0..n_regions {
        let len = d.u32()? as usize;
        let region_id = String::from_utf8(d.take(len)?.to_vec())
            .map_err(|_| corrupt("region id is not UTF-8"))?;
        let n_entries = d.u32()?;
        let n_entries = d.count(n_entries as u64)?;
        let mut entries = Vec::with_capacity(n_entries);
        for _ in 0..n_entries {
            let r = d.varint()?;
            let attractor = d.config(r)?;
            let max_descent_steps = d.u32()?;
            let members = d.sorted_set()?;
            if !members.contains(&attractor) {
                return Err(corrupt("attractor missing from its neighborhood"));
            }
            let n_paths = d.u32()?;
            let n_paths = d.count(n_paths as u64)?;
            let mut rep_paths = Vec::with_capacity(n_paths);
            for _ in 0..n_paths {
                let raw = d.varint()?;
                let len = d.count(raw)?;
                let mut configs = Vec::with_capacity(len);
                for _ in 0..len {
                    let r = d.varint()?;
                    configs.push(d.config(r)?);
                }
                let cost = f64::from_bits(d.u64()?);
                let path = Path::new(scenario, configs)
                    .map_err(|e| corrupt(format!("representative path: {e}")))?;
                if path.cost().to_bits() != cost.to_bits() {
                    return Err(corrupt("representative path cost mismatch"));
                }
                rep_paths.push(path);
            }
            if rep_paths.is_empty() {
                return Err(corrupt("cover entry without representative path"));
            }
            entries.push(CoverEntry {
                neighborhood: Neighborhood {
                    attractor,
                    members,
                    max_descent_steps,
                },
                rep_paths,
            });
        }
        let excluded = d.sorted_set()?;
        regions.push(RegionCover {
            region_id,
            entries,
            excluded,
        });
    }
    if d.pos != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    Ok(Library {
        fingerprint,
        seed,
        home: Config::new(home),
        regions,
    })
}
