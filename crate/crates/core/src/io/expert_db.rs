//! Binary expert-trajectory library, little endian:
//!
//! | field | type |
//! |---|---|
//! | magic `XTDB` | 4 bytes |
//! | format version | u32 |
//! | config hash, ASCII, zero padded | 16 bytes |
//! | entry count | u32 |
//! | points per trajectory (origin included) | u32 |
//! | bin sizes `(v, a, kappa)` | 3 x f64 |
//!
//! Then per entry: bin key (3 x i64), initial state (3 x f64), maneuver
//! and source indices (u8 each), and the points as `(t, x, y, heading, v)`
//! f64 quintuples.

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::samplers::{DbEntry, ExpertTrajectoryDb};
use crate::time::HORIZON_STEPS;
use crate::types::{Maneuver, Source, Trajectory, Waypoint};

pub const DB_MAGIC: &[u8; 4] = b"XTDB";
pub const DB_FORMAT_VERSION: u32 = 1;

pub const HASH_BYTES: usize = 16;

pub fn write_expert_db(db: &ExpertTrajectoryDb, config_hash: &str, out: &mut impl Write) -> Result<()> {
    out.write_all(DB_MAGIC)?;
    out.write_u32::<LE>(DB_FORMAT_VERSION)?;
    let mut hash = [0u8; HASH_BYTES];
    let n = config_hash.len().min(HASH_BYTES);
    hash[..n].copy_from_slice(&config_hash.as_bytes()[..n]);
    out.write_all(&hash)?;
    out.write_u32::<LE>(db.entries.len() as u32)?;
    out.write_u32::<LE>(HORIZON_STEPS as u32 + 1)?;
    for b in db.bin_sizes {
        out.write_f64::<LE>(b)?;
    }
    for e in &db.entries {
        for k in e.key {
            out.write_i64::<LE>(k)?;
        }
        for s in e.state {
            out.write_f64::<LE>(s)?;
        }
        let t = &e.trajectory;
        out.write_u8(Maneuver::ALL.iter().position(|m| *m == t.maneuver).expect("listed") as u8)?;
        out.write_u8(Source::ALL.iter().position(|s| *s == t.source).expect("listed") as u8)?;
        for w in t.points() {
            for v in [w.t, w.x, w.y, w.heading, w.v] {
                out.write_f64::<LE>(v)?;
            }
        }
    }
    Ok(())
}

/// Reads a database and the config hash stored with it.
pub fn read_expert_db(input: &mut impl Read) -> Result<(ExpertTrajectoryDb, String)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != DB_MAGIC {
        return Err(Error::Format("not an expert trajectory database (bad magic)".into()));
    }
    let version = input.read_u32::<LE>()?;
    if version != DB_FORMAT_VERSION {
        return Err(Error::Format(format!("expert database version {version} is not supported")));
    }
    let mut hash = [0u8; HASH_BYTES];
    input.read_exact(&mut hash)?;
    let config_hash = String::from_utf8_lossy(&hash).trim_end_matches('\0').to_string();
    let count = input.read_u32::<LE>()? as usize;
    let points = input.read_u32::<LE>()? as usize;
    if points != HORIZON_STEPS + 1 {
        return Err(Error::Format(format!("expected {} points per trajectory, found {points}", HORIZON_STEPS + 1)));
    }
    let mut bin_sizes = [0.0; 3];
    for b in &mut bin_sizes {
        *b = input.read_f64::<LE>()?;
    }
    let mut entries = Vec::with_capacity(count.min(1 << 20));
    for i in 0..count {
        let mut key = [0i64; 3];
        for k in &mut key {
            *k = input.read_i64::<LE>()?;
        }
        let mut state = [0.0; 3];
        for s in &mut state {
            *s = input.read_f64::<LE>()?;
        }
        let maneuver = *Maneuver::ALL
            .get(input.read_u8()? as usize)
            .ok_or_else(|| Error::Format(format!("entry {i}: unknown maneuver")))?;
        let source = *Source::ALL
            .get(input.read_u8()? as usize)
            .ok_or_else(|| Error::Format(format!("entry {i}: unknown source")))?;
        let mut samples = Vec::with_capacity(points);
        for _ in 0..points {
            let mut f = [0.0; 5];
            for v in &mut f {
                *v = input.read_f64::<LE>()?;
            }
            samples.push(Waypoint { t: f[0], x: f[1], y: f[2], heading: f[3], v: f[4] });
        }
        let trajectory = Trajectory::from_samples(samples, maneuver, source);
        if !trajectory.is_valid() {
            return Err(Error::Format(format!("entry {i}: {:?}", trajectory.violations())));
        }
        entries.push(DbEntry { key, state, trajectory });
    }
    Ok((ExpertTrajectoryDb::from_entries(bin_sizes, entries), config_hash))
}

pub fn save_expert_db(db: &ExpertTrajectoryDb, config_hash: &str, path: &std::path::Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_expert_db(db, config_hash, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_expert_db(path: &std::path::Path) -> Result<(ExpertTrajectoryDb, String)> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read expert database {}: {e}", path.display())))?;
    read_expert_db(&mut std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{build_expert_db, synthetic_expert_trajectories, ExpertDbConfig};

    #[test]
    fn round_trip_is_exact() {
        let raw = synthetic_expert_trajectories(6, 5, 3);
        let db = build_expert_db(&raw, &ExpertDbConfig::default()).unwrap();
        let mut bytes = Vec::new();
        write_expert_db(&db, "0123456789abcdef", &mut bytes).unwrap();
        assert_eq!(&bytes[..4], DB_MAGIC);
        let (back, hash) = read_expert_db(&mut bytes.as_slice()).unwrap();
        assert_eq!(hash, "0123456789abcdef");
        assert_eq!(back.bin_sizes, db.bin_sizes);
        assert_eq!(back.entries, db.entries);
    }

    #[test]
    fn bad_magic_is_rejected() {
        assert!(matches!(read_expert_db(&mut &b"NOPE\x01\0\0\0"[..]), Err(Error::Format(_))));
    }

    #[test]
    fn truncation_is_an_error() {
        let raw = synthetic_expert_trajectories(2, 3, 1);
        let db = build_expert_db(&raw, &ExpertDbConfig::default()).unwrap();
        let mut bytes = Vec::new();
        write_expert_db(&db, "h", &mut bytes).unwrap();
        bytes.truncate(bytes.len() - 9);
        assert!(read_expert_db(&mut bytes.as_slice()).is_err());
    }
}
