//! Output files and the hash manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    pub config_sha256: String,
    pub files: Vec<ManifestEntry>,
}

/// Writes files under one directory and remembers their hashes.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> io::Result<()> {
        let bytes = contents.as_ref();
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        self.entries.push(ManifestEntry {
            path: rel.to_owned(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Registers a file some other writer already put under the root.
    pub fn record_existing(&mut self, rel: &str) -> io::Result<()> {
        let bytes = fs::read(self.root.join(rel))?;
        self.entries.push(ManifestEntry {
            path: rel.to_owned(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Takes over the entries of a writer rooted in the subdirectory `prefix`.
    pub fn absorb(&mut self, prefix: &str, child: ArtifactWriter) {
        self.entries
            .extend(child.entries.into_iter().map(|e| ManifestEntry {
                path: format!("{prefix}/{}", e.path),
                ..e
            }));
    }

    pub fn finish(mut self, scenario: &str, seed: u64, config_text: &str) -> io::Result<Manifest> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            scenario: scenario.to_owned(),
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            files: self.entries,
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        fs::write(self.root.join(MANIFEST_NAME), json + "\n")?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_every_file_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::create(dir.path()).unwrap();
        w.write("b.csv", "1\n").unwrap();
        let mut child = ArtifactWriter::create(&dir.path().join("sub")).unwrap();
        child.write("a.csv", "2\n").unwrap();
        w.absorb("sub", child);
        let m = w.finish("vacuum", 1, "seed = 1").unwrap();
        let paths: Vec<&str> = m.files.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, ["b.csv", "sub/a.csv"]);
        for e in &m.files {
            let bytes = fs::read(dir.path().join(&e.path)).unwrap();
            assert_eq!(sha256_hex(&bytes), e.sha256);
        }
        assert!(dir.path().join(MANIFEST_NAME).exists());
    }
}
