//! Run directories: config echo, seed list, CSVs and a hash manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::export::Table;

pub struct RunDir {
    root: PathBuf,
    files: BTreeMap<String, String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(RunDir {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.root.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        self.files.insert(name.to_owned(), hex::encode(Sha256::digest(text.as_bytes())));
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, t: &Table) -> Result<()> {
        self.write_text(name, &t.to_csv()?)
    }

    pub fn write_seeds(&mut self, seeds: &[u64]) -> Result<()> {
        let text: String = seeds.iter().map(|s| format!("{s}\n")).collect();
        self.write_text("seeds.txt", &text)
    }

    /// Writes `manifest.json` listing every file with its SHA-256.
    pub fn finish(self) -> Result<PathBuf> {
        let doc = serde_json::json!({ "files": self.files });
        let text = serde_json::to_string_pretty(&doc)? + "\n";
        let p = self.root.join("manifest.json");
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        Ok(self.root)
    }
}

/// File name to hash, as recorded in a run directory's manifest.
pub fn read_manifest(dir: &Path) -> Result<BTreeMap<String, String>> {
    let p = dir.join("manifest.json");
    let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let files = v
        .get("files")
        .and_then(|f| f.as_object())
        .ok_or_else(|| Error::Config(format!("{}: no file list", p.display())))?;
    Ok(files
        .iter()
        .map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_owned()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = RunDir::create(dir.path()).unwrap();
        r.write_text("a.csv", "x\n").unwrap();
        r.write_seeds(&[1, 2]).unwrap();
        r.finish().unwrap();
        let m = read_manifest(dir.path()).unwrap();
        assert_eq!(m.len(), 2);
        // sha256 of "x\n"
        assert_eq!(m["a.csv"], "73cb3858a687a8494ca3323053016282f3dad39d42cf62ca4e79dda2aac7d9ac");
        assert_eq!(std::fs::read_to_string(dir.path().join("seeds.txt")).unwrap(), "1\n2\n");
    }
}
