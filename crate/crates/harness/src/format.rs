//! Grid-function files: a JSON header next to raw little-endian `f64`
//! values and an optional one-byte-per-cell mask.
//!
//! ```json
//! {"dim": 1, "shape": [4], "spacing": 0.5, "origin": [0], "c": 1,
//!  "data": "f.f64", "mask": "full"}
//! ```
//!
//! Paths are relative to the header's directory. Values are stored in
//! row-major order with the last axis fastest.

use std::fs;
use std::path::{Path, PathBuf};

use oscillation_core::GridFunction;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },
    #[error("malformed header {path}: {message}")]
    Header { path: PathBuf, message: String },
    #[error("{path}: data holds {bytes} bytes, not a whole number of f64 values")]
    Ragged { path: PathBuf, bytes: usize },
    #[error("mask {path}: byte {index} is {value}, expected 0 or 1")]
    MaskByte { path: PathBuf, index: usize, value: u8 },
    #[error(transparent)]
    Grid(#[from] oscillation_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    pub shape: Vec<usize>,
    /// Kept as raw JSON so anisotropic (array) spacings get a clear error.
    pub spacing: Value,
    pub origin: Vec<f64>,
    #[serde(default = "one")]
    pub c: f64,
    pub data: String,
    #[serde(default = "full")]
    pub mask: String,
}

fn one() -> f64 {
    1.0
}

fn full() -> String {
    "full".into()
}

/// A grid together with the measure constant from its header.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGrid {
    pub grid: GridFunction,
    pub c: f64,
}

fn read(path: &Path) -> Result<Vec<u8>, FormatError> {
    fs::read(path).map_err(|cause| FormatError::Io { path: path.to_owned(), cause })
}

pub fn load_grid_function(path: &Path) -> Result<LoadedGrid, FormatError> {
    let header_err = |message: String| FormatError::Header { path: path.to_owned(), message };
    let header: GridHeader = serde_json::from_slice(&read(path)?).map_err(|e| header_err(e.to_string()))?;
    let spacing = match &header.spacing {
        Value::Number(n) => n.as_f64().ok_or_else(|| header_err("spacing is not a number".into()))?,
        Value::Array(_) => return Err(header_err("anisotropic spacing is not supported".into())),
        _ => return Err(header_err("spacing must be a number".into())),
    };
    if header.shape.len() != header.dim {
        return Err(header_err(format!("dim is {} but shape has {} axes", header.dim, header.shape.len())));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let data_path = base.join(&header.data);
    let bytes = read(&data_path)?;
    if bytes.len() % 8 != 0 {
        return Err(FormatError::Ragged { path: data_path, bytes: bytes.len() });
    }
    let values: Vec<f64> = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    let mask = if header.mask == "full" {
        None
    } else {
        let mask_path = base.join(&header.mask);
        let raw = read(&mask_path)?;
        let mut mask = Vec::with_capacity(raw.len());
        for (index, &value) in raw.iter().enumerate() {
            match value {
                0 => mask.push(false),
                1 => mask.push(true),
                _ => return Err(FormatError::MaskByte { path: mask_path, index, value }),
            }
        }
        Some(mask)
    };
    let grid = GridFunction::new(header.shape, spacing, header.origin, values, mask)?;
    Ok(LoadedGrid { grid, c: header.c })
}

/// Writes `<stem>.json`, `<stem>.f64` and, unless every cell is masked,
/// `<stem>.mask` into `dir`. Returns the header path.
pub fn save_grid_function(dir: &Path, stem: &str, g: &GridFunction, c: f64) -> Result<PathBuf, FormatError> {
    let write = |path: PathBuf, bytes: &[u8]| {
        fs::write(&path, bytes).map_err(|cause| FormatError::Io { path: path.clone(), cause })
    };
    fs::create_dir_all(dir).map_err(|cause| FormatError::Io { path: dir.to_owned(), cause })?;
    let data = format!("{stem}.f64");
    let bytes: Vec<u8> = g.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    write(dir.join(&data), &bytes)?;
    let mask = if g.mask().iter().all(|&m| m) {
        "full".to_owned()
    } else {
        let name = format!("{stem}.mask");
        let bytes: Vec<u8> = g.mask().iter().map(|&m| m as u8).collect();
        write(dir.join(&name), &bytes)?;
        name
    };
    let header = GridHeader {
        dim: g.dim(),
        shape: g.shape().to_vec(),
        spacing: Value::from(g.spacing()),
        origin: g.origin().to_vec(),
        c,
        data,
        mask,
    };
    let path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&header).expect("header serializes");
    write(path.clone(), text.as_bytes())?;
    Ok(path)
}
