//! Run manifest written next to every set of artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub offlang: String,
    pub checkpoint_format: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config_fingerprint: String,
    pub seed: u64,
    pub inputs: Vec<FileDigest>,
    pub artifacts: Vec<FileDigest>,
    pub versions: Versions,
    pub created_unix: u64,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects inputs and written artifacts for one subcommand run.
#[derive(Debug)]
pub struct RunRecorder {
    out_dir: PathBuf,
    manifest: Manifest,
}

impl RunRecorder {
    pub fn new(out_dir: &Path, subcommand: &str, config_fingerprint: String, seed: u64) -> io::Result<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(RunRecorder {
            out_dir: out_dir.to_path_buf(),
            manifest: Manifest {
                subcommand: subcommand.into(),
                config_fingerprint,
                seed,
                inputs: Vec::new(),
                artifacts: Vec::new(),
                versions: Versions {
                    offlang: env!("CARGO_PKG_VERSION").into(),
                    checkpoint_format: crate::encoder::CHECKPOINT_VERSION,
                },
                created_unix: 0,
            },
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn input(&mut self, path: &Path) -> io::Result<()> {
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    /// Records an input that does not live on disk, such as a bundled asset.
    pub fn embedded_input(&mut self, name: &str, content: &[u8]) {
        self.manifest.inputs.push(FileDigest {
            path: name.into(),
            sha256: sha256_bytes(content),
        });
    }

    pub fn write(&mut self, name: &str, content: impl AsRef<[u8]>) -> io::Result<PathBuf> {
        let path = self.out_dir.join(name);
        fs::write(&path, content.as_ref())?;
        self.manifest.artifacts.push(FileDigest {
            path: name.into(),
            sha256: sha256_bytes(content.as_ref()),
        });
        Ok(path)
    }

    /// Writes `manifest.json`. Artifacts listed by an earlier run in the
    /// same directory and not rewritten by this one are carried over.
    pub fn finish(mut self) -> io::Result<Manifest> {
        let path = self.out_dir.join("manifest.json");
        if let Some(previous) = fs::read_to_string(&path)
            .ok()
            .and_then(|s| serde_json::from_str::<Manifest>(&s).ok())
        {
            let mut kept: Vec<FileDigest> = previous
                .artifacts
                .into_iter()
                .filter(|a| !self.manifest.artifacts.iter().any(|b| b.path == a.path))
                .filter(|a| self.out_dir.join(&a.path).exists())
                .collect();
            kept.append(&mut self.manifest.artifacts);
            self.manifest.artifacts = kept;
        }
        self.manifest.created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(path, json)?;
        Ok(self.manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_artifacts_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = RunRecorder::new(dir.path(), "train", "f".into(), 1).unwrap();
        a.write("model.json", "{}").unwrap();
        a.finish().unwrap();
        let mut b = RunRecorder::new(dir.path(), "evaluate", "f".into(), 1).unwrap();
        b.write("report.json", "[]").unwrap();
        let m = b.finish().unwrap();
        let names: Vec<&str> = m.artifacts.iter().map(|a| a.path.as_str()).collect();
        assert_eq!(names, ["model.json", "report.json"]);
        assert_eq!(m.artifacts[1].sha256, sha256_bytes(b"[]"));
    }
}
