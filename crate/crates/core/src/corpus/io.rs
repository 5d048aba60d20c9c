use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{ConceptLexicon, NamedStimulus, StimulusBounds, StimulusSet, TokenizedDocument};
use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

/// Writes one JSON object per stimulus, in stimulus order.
pub fn save_stimuli(set: &StimulusSet, path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        for rec in set.iter_named() {
            serde_json::to_writer(&mut *w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

pub fn load_stimuli(path: &Path) -> Result<StimulusSet> {
    load_stimuli_with(path, StimulusBounds::default())
}

pub fn load_stimuli_with(path: &Path, bounds: StimulusBounds) -> Result<StimulusSet> {
    let text = read_to_string(path)?;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: NamedStimulus =
            serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        records.push(rec);
        lines.push(i + 1);
    }
    StimulusSet::from_named(records, bounds).map_err(|e| match e {
        Error::InvalidStimulus { index, message } => Error::parse(path, lines[index], message),
        other => other,
    })
}

/// Loads documents from either a JSON-lines file of
/// `{"doc_id": .., "sentences": [[..], ..]}` records or a directory of
/// `*.txt` files (one sentence of whitespace-separated tokens per line,
/// document id = file stem, files in name order).
pub fn load_documents(path: &Path) -> Result<Vec<TokenizedDocument>> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        files
            .iter()
            .map(|f| {
                let text = read_to_string(f)?;
                let id = f
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                Ok(TokenizedDocument::from_lines(id, text.lines()))
            })
            .collect()
    } else {
        let text = read_to_string(path)?;
        let mut docs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut doc: TokenizedDocument =
                serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
            for sentence in &mut doc.sentences {
                for tok in sentence.iter_mut() {
                    if tok.chars().any(char::is_whitespace) || tok.is_empty() {
                        return Err(Error::parse(path, i + 1, format!("invalid token {tok:?}")));
                    }
                    *tok = tok.to_lowercase();
                }
            }
            doc.sentences.retain(|s| !s.is_empty());
            docs.push(doc);
        }
        Ok(docs)
    }
}

fn word_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_to_string(path)?
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

/// One concept surface form per line.
pub fn load_lexicon(path: &Path) -> Result<ConceptLexicon> {
    ConceptLexicon::new(word_lines(path)?)
}

/// One stopword per line.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    Ok(word_lines(path)?.into_iter().collect())
}
