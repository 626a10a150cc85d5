//! Binary eigensystem cache keyed by the operator reference string
//! (domain name, operator kind, spacing, dimensions).

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::EigenSystem;

const MAGIC: &[u8; 4] = b"HLEV";
const VERSION: u32 = 1;

pub fn cache_key(op_ref: &str) -> String {
    let digest = Sha256::digest(op_ref.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_path(dir: &Path, op_ref: &str) -> PathBuf {
    dir.join(format!("{}.eig", cache_key(op_ref)))
}

pub fn save(eig: &EigenSystem, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, &eig.op_ref);
    let tmp = path.with_extension("eig.tmp");
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        f.write_all(MAGIC)?;
        f.write_all(&VERSION.to_le_bytes())?;
        let refb = eig.op_ref.as_bytes();
        f.write_all(&(refb.len() as u64).to_le_bytes())?;
        f.write_all(refb)?;
        f.write_all(&(eig.n as u64).to_le_bytes())?;
        f.write_all(&(eig.m as u64).to_le_bytes())?;
        for &v in &eig.eigenvalues {
            f.write_all(&v.to_le_bytes())?;
        }
        for &v in &eig.weights {
            f.write_all(&v.to_le_bytes())?;
        }
        for &v in eig.raw_vectors() {
            f.write_all(&v.to_le_bytes())?;
        }
    }
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

pub fn load(dir: &Path, op_ref: &str) -> Result<Option<EigenSystem>> {
    let path = cache_path(dir, op_ref);
    if !path.exists() {
        return Ok(None);
    }
    let mut f = std::io::BufReader::new(std::fs::File::open(&path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("{}: bad magic", path.display())));
    }
    let mut u32b = [0u8; 4];
    f.read_exact(&mut u32b)?;
    if u32::from_le_bytes(u32b) != VERSION {
        return Err(Error::Cache(format!(
            "{}: unsupported version",
            path.display()
        )));
    }
    let mut u64b = [0u8; 8];
    f.read_exact(&mut u64b)?;
    let ref_len = u64::from_le_bytes(u64b) as usize;
    let mut refb = vec![0u8; ref_len];
    f.read_exact(&mut refb)?;
    let stored_ref = String::from_utf8(refb)
        .map_err(|_| Error::Cache(format!("{}: non-utf8 reference", path.display())))?;
    if stored_ref != op_ref {
        return Err(Error::Cache(format!(
            "{}: key collision ({} != {})",
            path.display(),
            stored_ref,
            op_ref
        )));
    }
    f.read_exact(&mut u64b)?;
    let n = u64::from_le_bytes(u64b) as usize;
    f.read_exact(&mut u64b)?;
    let m = u64::from_le_bytes(u64b) as usize;
    let mut read_f64s = |count: usize| -> Result<Vec<f64>> {
        let mut out = vec![0.0f64; count];
        let mut buf = [0u8; 8];
        for v in out.iter_mut() {
            f.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(out)
    };
    let eigenvalues = read_f64s(m)?;
    let weights = read_f64s(n)?;
    let vectors = read_f64s(n * m)?;
    Ok(Some(EigenSystem::from_parts(
        eigenvalues,
        vectors,
        weights,
        n,
        m,
        stored_ref,
    )))
}

pub fn clear(dir: &Path) -> Result<usize> {
    if !dir.exists() {
        return Ok(0);
    }
    let mut removed = 0;
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.path().extension().is_some_and(|e| e == "eig") {
            std::fs::remove_file(entry.path())?;
            removed += 1;
        }
    }
    Ok(removed)
}
