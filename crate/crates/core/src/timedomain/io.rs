use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::real::Real;

use super::signal::SampledSignal;
use super::SimError;

/// JSON sidecar describing a raw little-endian `f64` record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordMetadata {
    pub sample_rate: f64,
    pub length: usize,
    pub dtype: String,
    pub scenario: String,
    pub channel: String,
    pub seed: u64,
}

impl RecordMetadata {
    pub fn new(scenario: &str, channel: &str, seed: u64) -> Self {
        Self {
            sample_rate: 0.0,
            length: 0,
            dtype: "f64le".into(),
            scenario: scenario.into(),
            channel: channel.into(),
            seed,
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `path` (raw samples) and `path.json`; returns both paths.
/// `length`, `sample_rate` and `dtype` in `meta` are filled from the record.
pub fn write_binary_record<T: Real>(
    path: &Path,
    sig: &SampledSignal<T>,
    meta: &RecordMetadata,
) -> Result<(PathBuf, PathBuf), SimError> {
    let mut bytes = Vec::with_capacity(8 * sig.len());
    for &v in sig.samples() {
        bytes.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    fs::write(path, bytes)?;
    let meta = RecordMetadata {
        sample_rate: sig.sample_rate().as_f64(),
        length: sig.len(),
        dtype: "f64le".into(),
        ..meta.clone()
    };
    let side = sidecar(path);
    fs::write(&side, serde_json::to_string_pretty(&meta)?)?;
    Ok((path.to_path_buf(), side))
}

pub fn read_binary_record(path: &Path) -> Result<(SampledSignal<f64>, RecordMetadata), SimError> {
    let meta: RecordMetadata = serde_json::from_str(&fs::read_to_string(sidecar(path))?)?;
    let bytes = fs::read(path)?;
    if bytes.len() != 8 * meta.length {
        return Err(SimError::LengthMismatch(bytes.len() / 8, meta.length));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((SampledSignal::new(samples, meta.sample_rate)?, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timedomain::gen_gaussian_white;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sig = gen_gaussian_white(257, 1e9f64, 1.0, 3).unwrap();
        let path = dir.path().join("x1_out.f64");
        let (_, side) =
            write_binary_record(&path, &sig, &RecordMetadata::new("vacuum", "x1_out", 3)).unwrap();
        assert!(side.ends_with("x1_out.f64.json"));
        let (back, meta) = read_binary_record(&path).unwrap();
        assert_eq!(back, sig);
        assert_eq!(meta.length, 257);
        assert_eq!(meta.sample_rate, 1e9);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 257 * 8);
    }

    #[test]
    fn truncated_file_detected() {
        let dir = tempfile::tempdir().unwrap();
        let sig = gen_gaussian_white(10, 1e9f64, 1.0, 3).unwrap();
        let path = dir.path().join("r.f64");
        write_binary_record(&path, &sig, &RecordMetadata::new("vacuum", "r", 0)).unwrap();
        std::fs::write(&path, [0u8; 16]).unwrap();
        assert!(read_binary_record(&path).is_err());
    }
}
