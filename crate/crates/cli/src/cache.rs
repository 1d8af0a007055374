//! Content-addressed store for integral homology tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kh_core::braid::BraidWord;
use kh_core::diagram::SignConvention;
use kh_core::homology::BigradedGroup;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// sha256 over letters, strands, theory, ring, sign convention and code version.
pub fn key(word: &BraidWord, convention: SignConvention) -> String {
    let letters: Vec<String> = word.letters().iter().map(i32::to_string).collect();
    let text = format!(
        "letters={};strands={};theory=KHOVANOV;ring=Z;convention={};version={}",
        letters.join(","),
        word.strands(),
        convention.as_str(),
        env!("CARGO_PKG_VERSION"),
    );
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn load(&self, key: &str) -> Option<BigradedGroup> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn store(&self, key: &str, z: &BigradedGroup) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(z)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kh_core::braid::parse_braid_word;

    #[test]
    fn round_trip_and_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let w = parse_braid_word("1 2 1 2", 3).unwrap();
        let k = key(&w, SignConvention::Standard);
        assert_eq!(k.len(), 64);
        assert_ne!(k, key(&w, SignConvention::Flipped));
        assert_ne!(k, key(&parse_braid_word("1 2 1 2", 4).unwrap(), SignConvention::Standard));
        assert!(cache.load(&k).is_none());
        let mut z = BigradedGroup::new();
        z.insert(0, 1, 1, vec![2]);
        cache.store(&k, &z).unwrap();
        assert_eq!(cache.load(&k), Some(z));
    }
}
