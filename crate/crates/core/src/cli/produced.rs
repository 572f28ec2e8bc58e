use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProducedFile {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything one command wrote, in path order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProducedManifest {
    pub command: String,
    pub files: Vec<ProducedFile>,
}

impl ProducedManifest {
    pub fn file_name(command: &str) -> String {
        format!("produced-{command}.json")
    }
}

/// Writes files under a root directory and records each one.
pub(crate) struct OutputDir {
    root: PathBuf,
    files: Vec<ProducedFile>,
}

impl OutputDir {
    pub(crate) fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub(crate) fn write(&mut self, rel: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        let digest = Sha256::digest(contents);
        self.files.push(ProducedFile {
            path: rel.to_string(),
            bytes: contents.len() as u64,
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(())
    }

    /// Write `produced-<command>.json` and return the manifest it contains.
    pub(crate) fn finish(mut self, command: &str) -> Result<ProducedManifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = ProducedManifest {
            command: command.to_string(),
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.root.join(ProducedManifest::file_name(command));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_sorted_files_with_digests() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("b.txt", b"abc").unwrap();
        out.write("sub/a.txt", b"").unwrap();
        let m = out.finish("test").unwrap();
        assert_eq!(
            m.files.iter().map(|f| f.path.as_str()).collect::<Vec<_>>(),
            vec!["b.txt", "sub/a.txt"]
        );
        assert_eq!(
            m.files[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(
            m.files[1].sha256,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let text = std::fs::read_to_string(dir.path().join("produced-test.json")).unwrap();
        assert!(text.contains("\"bytes\": 3"));
        assert!(dir.path().join("sub/a.txt").exists());
    }
}
