//! On-disk cache of the coefficient tables for one `(N, m_max)` pair.
//!
//! The format is line-based text:
//!
//! ```text
//! ipsf-tables v1
//! sha256 <hex digest of every following byte>
//! order 4
//! m_max 10
//! mask -3 -1/16
//! ...
//! connection exact 0 -20/9
//! ...
//! moment 0 -5 -1.4829...e-7
//! ...
//! ```
//!
//! Rationals are stored exactly; floats with 17 significant digits, which
//! round-trips every `f64` bit for bit. Writes go to a temporary file in the
//! same directory and are renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num::{BigInt, BigRational};
use sha2::{Digest, Sha256};

use crate::cascade::{eval_phi_dyadic, DyadicSamples};
use crate::connection::{compute_connection, ConnectionTable};
use crate::error::{Error, Result};
use crate::mask::{build_mask, RefinementMask, ScaleOrder};
use crate::moments::{compute_moments, MomentTable};

pub const FORMAT_VERSION: u32 = 1;

/// Overrides the default cache directory.
pub const CACHE_DIR_ENV: &str = "IPSF_CACHE_DIR";

const MAGIC: &str = "ipsf-tables";

/// Everything the assembly needs for one scaling-function order.
#[derive(Debug, Clone, PartialEq)]
pub struct TableBundle {
    pub mask: RefinementMask,
    pub connection: ConnectionTable,
    pub moments: MomentTable,
}

impl TableBundle {
    pub fn compute(order: ScaleOrder, m_max: usize) -> Result<Self> {
        let mask = build_mask(order);
        let connection = compute_connection(&mask)?;
        let moments = compute_moments(&mask, m_max)?;
        Ok(TableBundle {
            mask,
            connection,
            moments,
        })
    }

    pub fn order(&self) -> ScaleOrder {
        self.mask.order()
    }

    pub fn m_max(&self) -> usize {
        self.moments.m_max()
    }

    /// Scaling function on the dyadic grid of the given depth.
    pub fn samples(&self, depth: u32) -> DyadicSamples {
        eval_phi_dyadic(&self.mask, depth)
    }

    fn payload(&self) -> Result<String> {
        let order = self.order();
        let mut out = format!("order {}\nm_max {}\n", order.get(), self.m_max());
        for (k, a) in self.mask.iter_exact() {
            out += &format!("mask {k} {a}\n");
        }
        match self.connection.half_exact() {
            Some(exact) => {
                for (k, l) in exact.iter().enumerate() {
                    out += &format!("connection exact {k} {l}\n");
                }
            }
            None => {
                for (k, l) in self.connection.half_values().iter().enumerate() {
                    out += &format!("connection float {k} {}\n", float(*l, "connection coefficient")?);
                }
            }
        }
        let kmax = order.overlap_radius();
        for m in 0..=self.m_max() {
            for (k, h) in (-kmax..=kmax).zip(self.moments.row(m)) {
                out += &format!("moment {m} {k} {}\n", float(*h, "moment")?);
            }
        }
        Ok(out)
    }
}

fn float(v: f64, what: &'static str) -> Result<String> {
    if !v.is_finite() {
        return Err(Error::NonFinite(what));
    }
    Ok(format!("{v:.16e}"))
}

fn digest(payload: &str) -> String {
    Sha256::digest(payload.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn store(bundle: &TableBundle, path: &Path) -> Result<()> {
    let payload = bundle.payload()?;
    let text = format!("{MAGIC} v{FORMAT_VERSION}\nsha256 {}\n{payload}", digest(&payload));
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile_in(dir, path)?;
    tmp.1.write_all(text.as_bytes())?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    fs::rename(&tmp.0, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp.0);
    })?;
    Ok(())
}

fn tempfile_in(dir: &Path, target: &Path) -> Result<(PathBuf, fs::File)> {
    let stem = target.file_name().and_then(|s| s.to_str()).unwrap_or("tables");
    for attempt in 0u32.. {
        let p = dir.join(format!(".{stem}.{}.{attempt}.tmp", std::process::id()));
        match fs::OpenOptions::new().write(true).create_new(true).open(&p) {
            Ok(f) => return Ok((p, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists && attempt < 1000 => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!()
}

pub fn load(path: &Path) -> Result<TableBundle> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFile(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    let integrity = |reason: String| Error::Integrity {
        path: path.to_path_buf(),
        reason,
    };

    let (header, rest) = text.split_once('\n').ok_or_else(|| integrity("empty file".into()))?;
    let version = header
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| integrity(format!("not a table bundle: `{header}`")))?;
    if version != format!("v{FORMAT_VERSION}") {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: version.to_string(),
        });
    }
    let (sum, payload) = rest
        .split_once('\n')
        .ok_or_else(|| integrity("missing checksum".into()))?;
    let expected = sum
        .strip_prefix("sha256 ")
        .ok_or_else(|| integrity("missing checksum".into()))?;
    if digest(payload) != expected.trim() {
        return Err(integrity("checksum mismatch".into()));
    }

    parse_payload(payload).map_err(integrity)
}

fn parse_payload(payload: &str) -> std::result::Result<TableBundle, String> {
    let mut order = None;
    let mut m_max = None;
    let mut mask = Vec::new();
    let mut exact_l = Vec::new();
    let mut float_l = Vec::new();
    let mut moments: Vec<Vec<f64>> = Vec::new();

    // indices must appear in the order `payload` writes them
    let at = |k: &str, want: i64| k.parse::<i64>().ok() == Some(want);
    let finite = |v: &str| v.parse::<f64>().ok().filter(|x| x.is_finite());
    for (n, line) in payload.lines().enumerate() {
        let bad = || format!("line {}: `{line}`", n + 3);
        let support = order.map_or(0, |o: ScaleOrder| o.support_radius());
        let overlap = order.map_or(0, |o: ScaleOrder| o.overlap_radius());
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            ["order", v] if order.is_none() => {
                let n = v.parse::<i64>().map_err(|_| bad())?;
                order = Some(ScaleOrder::new(n).map_err(|e| e.to_string())?);
            }
            ["m_max", v] if m_max.is_none() => m_max = Some(v.parse::<usize>().map_err(|_| bad())?),
            ["mask", k, q] if at(k, mask.len() as i64 - support) => mask.push(rational(q).ok_or_else(bad)?),
            ["connection", "exact", k, q] if at(k, exact_l.len() as i64) => exact_l.push(rational(q).ok_or_else(bad)?),
            ["connection", "float", k, v] if at(k, float_l.len() as i64) => float_l.push(finite(v).ok_or_else(bad)?),
            ["moment", m, k, v] => {
                let m: usize = m.parse().map_err(|_| bad())?;
                if m == moments.len() {
                    moments.push(Vec::new());
                }
                let row = moments.get_mut(m).ok_or_else(bad)?;
                if !at(k, row.len() as i64 - overlap) {
                    return Err(bad());
                }
                row.push(finite(v).ok_or_else(bad)?);
            }
            [] => {}
            _ => return Err(bad()),
        }
    }

    let order = order.ok_or("missing order")?;
    let m_max = m_max.ok_or("missing m_max")?;
    if moments.len() != m_max + 1 {
        return Err(format!("expected {} moment rows, found {}", m_max + 1, moments.len()));
    }
    let mask = RefinementMask::from_exact(order, mask).map_err(|e| e.to_string())?;
    let connection = match (exact_l.is_empty(), float_l.is_empty()) {
        (false, true) => ConnectionTable::from_exact(order, exact_l),
        (true, false) => ConnectionTable::from_values(order, float_l),
        _ => return Err("connection table must be entirely exact or entirely float".into()),
    }
    .map_err(|e| e.to_string())?;
    let moments = MomentTable::from_rows(order, moments).map_err(|e| e.to_string())?;
    Ok(TableBundle {
        mask,
        connection,
        moments,
    })
}

fn rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// `$IPSF_CACHE_DIR`, else `$XDG_CACHE_HOME/ipsf`, else `~/.cache/ipsf`,
/// else a directory under the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(dir).join("ipsf");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(home).join(".cache").join("ipsf");
    }
    std::env::temp_dir().join("ipsf")
}

pub fn bundle_path(dir: &Path, order: ScaleOrder, m_max: usize) -> PathBuf {
    dir.join(format!("tables-N{order}-m{m_max}.txt"))
}

/// How [`load_or_compute`] obtained its bundle.
#[derive(Debug, Clone, PartialEq)]
pub enum CacheStatus {
    Hit,
    /// Computed and written.
    Stored,
    /// The existing file was rejected, recomputed and overwritten.
    Replaced(String),
    /// Computed, but the cache could not be written.
    Unwritable(String),
}

pub fn load_or_compute(dir: &Path, order: ScaleOrder, m_max: usize) -> Result<(TableBundle, CacheStatus)> {
    let path = bundle_path(dir, order, m_max);
    let rejected = match load(&path) {
        Ok(b) if b.order() == order && b.m_max() == m_max => return Ok((b, CacheStatus::Hit)),
        Ok(_) => Some("bundle parameters do not match file name".to_string()),
        Err(Error::MissingFile(_)) => None,
        Err(e @ (Error::Integrity { .. } | Error::Version { .. })) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    let bundle = TableBundle::compute(order, m_max)?;
    let status = match (store(&bundle, &path), rejected) {
        (Err(e), _) => CacheStatus::Unwritable(e.to_string()),
        (Ok(()), Some(reason)) => CacheStatus::Replaced(reason),
        (Ok(()), None) => CacheStatus::Stored,
    };
    Ok((bundle, status))
}
