//! On-disk formats.
//!
//! A dictionary directory holds three files:
//!
//! - `atoms.bin`: a 32-byte header followed by the atoms as little-endian
//!   `(re, im)` f64 pairs, atom-major.
//! - `manifest.json`: prime, kind, counts, group sizes, generator, phase
//!   convention version, build timestamp and the SHA-256 of `atoms.bin`.
//! - `provenance.csv`: `atom,group,index,shift_tau,shift_w` per atom.
//!
//! Header layout: magic `OSCDICT\0`, format version (u32), kind code (u32,
//! `0` for a bare signal), prime (u64), vector count (u64).
//!
//! Signals use the same binary format with kind `0` and count `1`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dictionary::{
    line_directions, Atom, BuildStats, Dictionary, DictionaryKind, Provenance,
    PHASE_CONVENTION_VERSION,
};
use crate::error::{Error, Result};
use crate::ff::FpField;
use crate::linalg::{Signal, C64};
use crate::symplectic::TorusKind;

pub const MAGIC: &[u8; 8] = b"OSCDICT\0";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 32;
const SIGNAL_KIND: u32 = 0;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const BLOB_FILE: &str = "atoms.bin";
pub const PROVENANCE_FILE: &str = "provenance.csv";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub prime: u64,
    pub kind: DictionaryKind,
    pub atoms: u64,
    pub groups: u64,
    pub group_sizes: Vec<u64>,
    pub field_generator: u64,
    pub phase_convention_version: u32,
    pub format_version: u32,
    /// Seconds since the Unix epoch.
    pub build_timestamp: u64,
    pub blob_sha256: String,
    pub operations: BuildStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub kind_code: u32,
    pub prime: u64,
    pub count: u64,
}

fn encode(header: Header, vectors: impl Iterator<Item = Vec<C64>>, cap: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + cap * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&header.kind_code.to_le_bytes());
    out.extend_from_slice(&header.prime.to_le_bytes());
    out.extend_from_slice(&header.count.to_le_bytes());
    for v in vectors {
        for z in v {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn decode(bytes: &[u8]) -> Result<(Header, Vec<Vec<C64>>)> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::Corrupt("bad header".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    if u32_at(8) != FORMAT_VERSION {
        return Err(Error::Corrupt(format!("unsupported version {}", u32_at(8))));
    }
    let header = Header {
        kind_code: u32_at(12),
        prime: u64_at(16),
        count: u64_at(24),
    };
    let expected = (header.count as u128) * (header.prime as u128) * 16;
    if (bytes.len() - HEADER_LEN) as u128 != expected {
        return Err(Error::Corrupt(format!(
            "payload is {} bytes, header implies {expected}",
            bytes.len() - HEADER_LEN
        )));
    }
    let p = header.prime as usize;
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let vectors = (0..header.count as usize)
        .map(|k| {
            (0..p)
                .map(|t| {
                    let off = HEADER_LEN + (k * p + t) * 16;
                    C64::new(f64_at(off), f64_at(off + 8))
                })
                .collect()
        })
        .collect();
    Ok((header, vectors))
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn encode_blob(dict: &Dictionary) -> Vec<u8> {
    encode(
        Header {
            kind_code: dict.kind.code(),
            prime: dict.p(),
            count: dict.len() as u64,
        },
        dict.atoms.iter().map(|a| a.vector.entries().to_vec()),
        dict.len() * dict.p() as usize,
    )
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_for(dict: &Dictionary, blob: &[u8], operations: BuildStats) -> Manifest {
    Manifest {
        prime: dict.p(),
        kind: dict.kind,
        atoms: dict.len() as u64,
        groups: dict.groups.len() as u64,
        group_sizes: dict.groups.iter().map(|g| g.len() as u64).collect(),
        field_generator: dict.field.mult_generator().value(),
        phase_convention_version: PHASE_CONVENTION_VERSION,
        format_version: FORMAT_VERSION,
        build_timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        blob_sha256: sha256_hex(blob),
        operations,
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProvenanceRow {
    atom: usize,
    group: usize,
    index: usize,
    shift_tau: u64,
    shift_w: u64,
}

pub fn provenance_csv(dict: &Dictionary) -> Result<Vec<u8>> {
    let group = dict.group_of();
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, a) in dict.atoms.iter().enumerate() {
        let (shift_tau, shift_w) = a.provenance.shift();
        w.serialize(ProvenanceRow {
            atom: i,
            group: group[i],
            index: a.provenance.index(),
            shift_tau,
            shift_w,
        })?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Paths of the three files in a dictionary directory.
pub fn dictionary_paths(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (
        dir.join(MANIFEST_FILE),
        dir.join(BLOB_FILE),
        dir.join(PROVENANCE_FILE),
    )
}

/// Writes blob, provenance and manifest (last) into `dir`, creating it.
pub fn save_dictionary(dir: &Path, dict: &Dictionary, operations: BuildStats) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let (manifest_path, blob_path, prov_path) = dictionary_paths(dir);
    let blob = encode_blob(dict);
    let manifest = manifest_for(dict, &blob, operations);
    write_atomic(&blob_path, &blob)?;
    write_atomic(&prov_path, &provenance_csv(dict)?)?;
    write_atomic(&manifest_path, &serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}

fn provenance_for(
    kind: DictionaryKind,
    field: FpField,
    split_groups: usize,
    row: &ProvenanceRow,
) -> Result<Provenance> {
    let directions = || line_directions(field);
    Ok(match kind {
        DictionaryKind::Heisenberg => {
            let d = directions()
                .get(row.group)
                .copied()
                .ok_or_else(|| Error::Corrupt(format!("no line {}", row.group)))?;
            Provenance::Line {
                direction: (d.tau.value(), d.w.value()),
                index: row.index,
            }
        }
        DictionaryKind::OscillatorSplit => Provenance::Torus {
            kind: TorusKind::Split,
            torus: row.group,
            index: row.index,
        },
        DictionaryKind::OscillatorNonsplit => Provenance::Torus {
            kind: TorusKind::Nonsplit,
            torus: row.group,
            index: row.index,
        },
        DictionaryKind::Oscillator => {
            if row.group < split_groups {
                Provenance::Torus {
                    kind: TorusKind::Split,
                    torus: row.group,
                    index: row.index,
                }
            } else {
                Provenance::Torus {
                    kind: TorusKind::Nonsplit,
                    torus: row.group - split_groups,
                    index: row.index,
                }
            }
        }
        DictionaryKind::Extended => Provenance::Shift {
            base: row.index,
            tau: row.shift_tau,
            w: row.shift_w,
        },
    })
}

/// Loads and verifies a dictionary directory.
pub fn load_dictionary(dir: &Path) -> Result<(Dictionary, Manifest)> {
    let (manifest_path, blob_path, prov_path) = dictionary_paths(dir);
    let manifest: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?)
        .map_err(|e| Error::Corrupt(format!("manifest: {e}")))?;
    let blob = fs::read(&blob_path)?;
    if sha256_hex(&blob) != manifest.blob_sha256 {
        return Err(Error::Corrupt("blob digest does not match manifest".into()));
    }
    let (header, vectors) = decode(&blob)?;
    if header.prime != manifest.prime
        || header.count != manifest.atoms
        || DictionaryKind::from_code(header.kind_code) != Some(manifest.kind)
    {
        return Err(Error::Corrupt("blob header disagrees with manifest".into()));
    }
    let field = FpField::new(manifest.prime).map_err(|_| Error::Corrupt("bad prime".into()))?;
    if manifest.group_sizes.iter().sum::<u64>() != manifest.atoms
        || manifest.group_sizes.len() as u64 != manifest.groups
    {
        return Err(Error::Corrupt("group sizes do not add up".into()));
    }
    let mut groups = Vec::with_capacity(manifest.group_sizes.len());
    let mut start = 0usize;
    for &s in &manifest.group_sizes {
        groups.push(start..start + s as usize);
        start += s as usize;
    }
    let p = manifest.prime;
    let split_groups = (p * (p + 1) / 2) as usize;
    let prov_bytes = fs::read(&prov_path)?;
    let mut reader = csv::Reader::from_reader(prov_bytes.as_slice());
    let mut atoms = Vec::with_capacity(vectors.len());
    let mut vectors = vectors.into_iter();
    for row in reader.deserialize::<ProvenanceRow>() {
        let row = row.map_err(|e| Error::Corrupt(format!("provenance: {e}")))?;
        let vector = vectors
            .next()
            .ok_or_else(|| Error::Corrupt("more provenance rows than atoms".into()))?;
        if row.atom != atoms.len() {
            return Err(Error::Corrupt(format!("provenance row {} out of order", row.atom)));
        }
        atoms.push(Atom {
            vector: Signal::new(vector),
            provenance: provenance_for(manifest.kind, field, split_groups, &row)?,
        });
    }
    if atoms.len() as u64 != manifest.atoms {
        return Err(Error::Corrupt("provenance rows do not match atom count".into()));
    }
    Ok((
        Dictionary {
            kind: manifest.kind,
            field,
            atoms,
            groups,
        },
        manifest,
    ))
}

pub fn encode_signal(f: &Signal) -> Vec<u8> {
    encode(
        Header {
            kind_code: SIGNAL_KIND,
            prime: f.len() as u64,
            count: 1,
        },
        std::iter::once(f.entries().to_vec()),
        f.len(),
    )
}

pub fn write_signal(path: &Path, f: &Signal) -> Result<()> {
    write_atomic(path, &encode_signal(f))
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let (header, mut vectors) = decode(&fs::read(path)?)?;
    if header.kind_code != SIGNAL_KIND || header.count != 1 {
        return Err(Error::Corrupt("not a signal file".into()));
    }
    Ok(Signal::new(vectors.pop().expect("count is 1")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::build;
    use proptest::prelude::*;

    #[test]
    fn dictionary_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let k = FpField::new(5).unwrap();
        for kind in [
            DictionaryKind::Heisenberg,
            DictionaryKind::Oscillator,
            DictionaryKind::Extended,
        ] {
            let (d, stats) = build(k, kind).unwrap();
            let path = dir.path().join(kind.name());
            let m = save_dictionary(&path, &d, stats).unwrap();
            assert_eq!(m.atoms, d.len() as u64);
            let (back, m2) = load_dictionary(&path).unwrap();
            assert_eq!(back, d);
            assert_eq!(m2, m);
        }
    }

    #[test]
    fn header_layout() {
        let f = Signal::delta(5, 2);
        let bytes = encode_signal(&f);
        assert_eq!(bytes.len(), HEADER_LEN + 5 * 16);
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(bytes[24..32].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(bytes[32 + 32..32 + 40].try_into().unwrap()), 1.0);
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let k = FpField::new(5).unwrap();
        let (d, stats) = build(k, DictionaryKind::Heisenberg).unwrap();
        save_dictionary(dir.path(), &d, stats).unwrap();
        let blob = dir.path().join(BLOB_FILE);
        let bytes = fs::read(&blob).unwrap();
        fs::write(&blob, &bytes[..bytes.len() - 16]).unwrap();
        assert!(matches!(load_dictionary(dir.path()), Err(Error::Corrupt(_))));
        let mut flipped = bytes.clone();
        flipped[100] ^= 1;
        fs::write(&blob, &flipped).unwrap();
        assert!(matches!(load_dictionary(dir.path()), Err(Error::Corrupt(_))));
        assert!(matches!(decode(&bytes[..bytes.len() - 1]), Err(Error::Corrupt(_))));
        assert!(matches!(
            load_dictionary(&dir.path().join("missing")),
            Err(Error::Io(_))
        ));
    }

    proptest! {
        #[test]
        fn signal_round_trip(values in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..40)) {
            let f = Signal::new(values.iter().map(|&(a, b)| C64::new(a, b)).collect());
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("s.bin");
            write_signal(&path, &f).unwrap();
            prop_assert_eq!(read_signal(&path).unwrap(), f);
        }
    }
}
