use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use ptmat::parity::{parity_from_matrix, ParityDescriptor, ParitySpec};
use ptmat::SquareMatrix;
use serde::Serialize;

/// Reads a whole file, or stdin for `-`.
pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Opens a file for writing, or stdout for `-`.
pub fn open_output(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Box::new(io::BufWriter::new(f)))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Accepts a bare matrix or the output of `build` (its `"H"` field).
pub fn read_matrix(path: &Path) -> Result<SquareMatrix> {
    let text = read_input(path)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing matrix JSON from {}", path.display()))?;
    if let Some(h) = value.get_mut("H") {
        value = h.take();
    }
    serde_json::from_value(value).with_context(|| format!("matrix in {}", path.display()))
}

/// A parity file holds either a tagged parity description (`"kind": ...`)
/// or a bare matrix in the canonical encoding. Output of `parity` and
/// `build` is also accepted.
pub fn read_parity(path: &Path, tol: f64) -> Result<ParityDescriptor> {
    let text = read_input(path)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing parity JSON from {}", path.display()))?;
    for key in ["parity", "matrix"] {
        if value.get("kind").is_some() {
            break;
        }
        if let Some(inner) = value.get_mut(key) {
            value = inner.take();
            break;
        }
    }
    let descriptor = if value.get("kind").is_some() {
        let spec: ParitySpec = serde_json::from_value(value).context("parity description")?;
        spec.realize(tol)?
    } else {
        let m: SquareMatrix = serde_json::from_value(value).context("parity matrix")?;
        parity_from_matrix(&m, tol)?
    };
    Ok(descriptor)
}
