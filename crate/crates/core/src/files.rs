//! On-disk formats: initial-data descriptions, spectral caches, verification
//! reports, and result tables. All JSON; floats use Rust's shortest-roundtrip
//! formatting so cache round trips are bit-exact.

use crate::error::{Error, Result};
use crate::spectral::scattering::{InitialData, Profile};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Initial-data file: `{preset: "gaussian"|"sech2"|"table", ...params, x_min, x_max, n_samples}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialDataFile {
    #[serde(flatten)]
    pub profile: Profile,
    pub x_min: f64,
    pub x_max: f64,
    pub n_samples: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_tail_tol() -> f64 {
    1e-10
}

impl InitialDataFile {
    pub fn into_initial_data(self) -> Result<InitialData> {
        InitialData::new(
            self.profile,
            self.x_min,
            self.x_max,
            self.n_samples,
            self.tail_tol,
        )
    }
}

/// One spectral cache record.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CacheRecord {
    pub contour_id: String,
    pub k_re: f64,
    pub k_im: f64,
    pub r1_re: f64,
    pub r1_im: f64,
    pub r2_re: f64,
    pub r2_im: f64,
}

impl CacheRecord {
    pub fn new(contour_id: &str, k: C64, r1: C64, r2: C64) -> Self {
        CacheRecord {
            contour_id: contour_id.to_string(),
            k_re: k.re,
            k_im: k.im,
            r1_re: r1.re,
            r1_im: r1.im,
            r2_re: r2.re,
            r2_im: r2.im,
        }
    }
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parse JSON, reporting the byte offset of the failure.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let body =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&body).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let offset = byte_offset(&body, line, column);
        Error::Parse {
            offset,
            line,
            column,
            msg: e.to_string(),
        }
    })
}

fn byte_offset(body: &str, line: usize, column: usize) -> usize {
    let mut off = 0usize;
    for (i, l) in body.split('\n').enumerate() {
        if i + 1 == line {
            return off + column.saturating_sub(1);
        }
        off += l.len() + 1;
    }
    off
}
