#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub struct CorpusProgram {
    pub name: String,
    pub path: PathBuf,
    pub source: String,
    /// Rendering after `% expect` in the file header.
    pub expect: String,
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn corpus() -> Vec<CorpusProgram> {
    let mut out: Vec<CorpusProgram> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "core"))
        .map(|path| {
            let source = std::fs::read_to_string(&path).unwrap();
            let expect = source
                .lines()
                .find_map(|l| l.strip_prefix("% expect "))
                .unwrap_or_else(|| panic!("{} has no expect line", path.display()))
                .trim()
                .to_string();
            CorpusProgram {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                path,
                source,
                expect,
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}
