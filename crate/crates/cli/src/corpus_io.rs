//! Streaming document sources: a directory of `.txt` files or a JSONL file.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stopwords_rmt_core::{tokenize, Document, TokenizerConfig};

use crate::config::InputFormat;
use crate::error::StageError;

#[derive(Debug, Clone)]
pub struct CorpusSource {
    path: PathBuf,
    format: InputFormat,
}

#[derive(Deserialize)]
struct JsonlRecord {
    id: String,
    text: String,
}

impl CorpusSource {
    pub fn new(path: impl Into<PathBuf>, format: InputFormat) -> Self {
        Self {
            path: path.into(),
            format,
        }
    }

    /// Tokenizes every document in a fixed order and hands it to `visit`.
    /// Returns the number of documents read.
    pub fn for_each_document(
        &self,
        tokenizer: &TokenizerConfig,
        mut visit: impl FnMut(Document),
    ) -> Result<usize, StageError> {
        match self.format {
            InputFormat::TxtDir => {
                let files = txt_files(&self.path)?;
                for file in &files {
                    let text = fs::read_to_string(file).map_err(|e| StageError::io(file, e))?;
                    let id = file
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    visit(tokenize(id, &text, tokenizer));
                }
                Ok(files.len())
            }
            InputFormat::Jsonl => {
                let file = File::open(&self.path).map_err(|e| StageError::io(&self.path, e))?;
                let mut count = 0;
                for (i, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|e| StageError::io(&self.path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let rec: JsonlRecord =
                        serde_json::from_str(&line).map_err(|e| StageError::Parse {
                            path: self.path.clone(),
                            line: i as u64 + 1,
                            message: e.to_string(),
                        })?;
                    visit(tokenize(rec.id, &rec.text, tokenizer));
                    count += 1;
                }
                Ok(count)
            }
        }
    }
}

fn txt_files(dir: &Path) -> Result<Vec<PathBuf>, StageError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| StageError::io(dir, e))? {
        let path = entry.map_err(|e| StageError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(src: &CorpusSource) -> Result<Vec<Document>, StageError> {
        let mut docs = Vec::new();
        src.for_each_document(&TokenizerConfig::default(), |d| docs.push(d))?;
        Ok(docs)
    }

    #[test]
    fn reads_txt_directory_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), "Second doc.").unwrap();
        fs::write(dir.path().join("a.txt"), "First. Doc!").unwrap();
        fs::write(dir.path().join("skip.md"), "ignored").unwrap();
        let docs = collect(&CorpusSource::new(dir.path(), InputFormat::TxtDir)).unwrap();
        let ids: Vec<_> = docs.iter().map(|d| d.article_id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(docs[0].sentences.len(), 2);
    }

    #[test]
    fn reads_jsonl_and_reports_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            "{\"id\":\"x\",\"text\":\"A b.\"}\n\n{\"id\":\"y\",\"text\":\"C\"}\n",
        )
        .unwrap();
        let docs = collect(&CorpusSource::new(&path, InputFormat::Jsonl)).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].article_id, "y");

        fs::write(&path, "{\"id\":\"x\",\"text\":\"A\"}\n{\"id\":3}\n").unwrap();
        let err = collect(&CorpusSource::new(&path, InputFormat::Jsonl)).unwrap_err();
        assert!(matches!(err, StageError::Parse { line: 2, .. }), "{err}");
    }
}
