//! TF-IDF scoring of comment terms against a reference corpus.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Lowercases and splits on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Reference documents with their document frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<CorpusDocument>,
    doc_frequency: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    /// Distinct terms over all documents.
    pub fn vocabulary_size(&self) -> usize {
        self.doc_frequency.len()
    }

    pub fn documents(&self) -> &[CorpusDocument] {
        &self.documents
    }

    /// Number of documents containing `term`, or `None` when the corpus never uses it.
    pub fn doc_frequency(&self, term: &str) -> Option<usize> {
        self.doc_frequency.get(term).copied()
    }

    /// `ln(|D| / df)`, with `df = 1` for terms outside the corpus.
    pub fn idf(&self, term: &str) -> f64 {
        let df = self.doc_frequency(term).unwrap_or(1);
        (self.document_count() as f64 / df as f64).ln()
    }

    // Highest within-document frequency of `term`; the non-default tf source.
    fn max_document_tf(&self, term: &str) -> f64 {
        self.documents
            .iter()
            .filter(|d| !d.tokens.is_empty())
            .map(|d| d.tokens.iter().filter(|t| *t == term).count() as f64 / d.tokens.len() as f64)
            .fold(0.0, f64::max)
    }
}

/// Builds a corpus from `(doc_id, text)` pairs.
pub fn build_corpus<I, S, T>(documents: I) -> Result<Corpus>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    let mut doc_frequency: BTreeMap<String, usize> = BTreeMap::new();
    for (id, text) in documents {
        let id = id.into();
        if !seen.insert(id.clone()) {
            return Err(contract(format!("duplicate document id `{id}`")));
        }
        let tokens = tokenize(text.as_ref());
        let distinct: HashSet<&String> = tokens.iter().collect();
        for term in distinct {
            *doc_frequency.entry(term.clone()).or_default() += 1;
        }
        docs.push(CorpusDocument { id, tokens });
    }
    if docs.is_empty() {
        return Err(contract("corpus needs at least one document"));
    }
    Ok(Corpus { documents: docs, doc_frequency })
}

/// Loads every `*.txt` file in `dir` (sorted by name); the file stem is the document id.
pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut docs = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        docs.push((id, std::fs::read_to_string(&path)?));
    }
    build_corpus(docs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub tf: f64,
    pub idf: f64,
    pub tfidf: f64,
}

/// Where the term frequency of a comment term is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfSource {
    /// Occurrences in the comment divided by the comment length.
    #[default]
    Comment,
    /// Highest within-document frequency across the corpus. Not the default.
    CorpusMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopLConfig {
    pub l: usize,
    #[serde(default)]
    pub tf_source: TfSource,
}

impl Default for TopLConfig {
    fn default() -> Self {
        TopLConfig { l: 3, tf_source: TfSource::Comment }
    }
}

/// Scores `term` within a tokenized comment.
pub fn tfidf_score(term: &str, comment_tokens: &[String], corpus: &Corpus) -> Result<TermScore> {
    if comment_tokens.is_empty() {
        return Err(contract("cannot score a term against an empty comment"));
    }
    let count = comment_tokens.iter().filter(|t| *t == term).count();
    let tf = count as f64 / comment_tokens.len() as f64;
    Ok(score(term, tf, corpus))
}

fn score(term: &str, tf: f64, corpus: &Corpus) -> TermScore {
    let idf = corpus.idf(term);
    TermScore { term: term.to_string(), tf, idf, tfidf: tf * idf }
}

/// Per-comment aggregate over the `l` best-scoring distinct terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentFeatures {
    pub max: f64,
    pub sum: f64,
    pub top_terms: Vec<TermScore>,
}

pub fn comment_features(comment: &str, corpus: &Corpus, cfg: &TopLConfig) -> Result<CommentFeatures> {
    if cfg.l == 0 {
        return Err(contract("top-l selection needs l >= 1"));
    }
    let tokens = tokenize(comment);
    if tokens.is_empty() {
        return Ok(CommentFeatures { max: 0.0, sum: 0.0, top_terms: Vec::new() });
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &tokens {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let mut scores: Vec<TermScore> = counts
        .into_iter()
        .map(|(term, count)| {
            let tf = match cfg.tf_source {
                TfSource::Comment => count as f64 / tokens.len() as f64,
                TfSource::CorpusMax => corpus.max_document_tf(term),
            };
            score(term, tf, corpus)
        })
        .collect();
    scores.sort_by(|a, b| b.tfidf.total_cmp(&a.tfidf).then_with(|| a.term.cmp(&b.term)));
    scores.truncate(cfg.l);
    let max = scores.first().map_or(0.0, |s| s.tfidf);
    let sum = scores.iter().map(|s| s.tfidf).sum();
    Ok(CommentFeatures { max, sum, top_terms: scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    fn small_corpus() -> Corpus {
        build_corpus([("d1", "a b a"), ("d2", "b c")]).unwrap()
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(toks("A posh cafe is over there!"), ["a", "posh", "cafe", "is", "over", "there"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("Tomato Ramen, tomato"), ["tomato", "ramen", "tomato"]);
    }

    #[test]
    fn corpus_counts_documents_not_occurrences() {
        let c = small_corpus();
        assert_eq!(c.document_count(), 2);
        assert_eq!(c.doc_frequency("a"), Some(1));
        assert_eq!(c.doc_frequency("b"), Some(2));
        assert_eq!(c.doc_frequency("c"), Some(1));
    }

    #[test]
    fn single_document_corpus() {
        let c = build_corpus([("only", "x y x z")]).unwrap();
        for t in ["x", "y", "z"] {
            assert_eq!(c.doc_frequency(t), Some(1));
        }
    }

    #[test]
    fn corpus_errors() {
        assert!(build_corpus(Vec::<(String, String)>::new()).is_err());
        assert!(build_corpus([("d", "a"), ("d", "b")]).is_err());
    }

    #[test]
    fn score_examples() {
        let c = small_corpus();
        let s = tfidf_score("a", &toks("a b a"), &c).unwrap();
        assert!((s.tf - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.idf - 2f64.ln()).abs() < 1e-15);
        assert!((s.tfidf - 0.462_098_120_373_296_9).abs() < 1e-12);

        let everywhere = tfidf_score("b", &toks("a b a"), &c).unwrap();
        assert_eq!(everywhere.idf, 0.0);
        assert_eq!(everywhere.tfidf, 0.0);

        let novel = tfidf_score("zz", &toks("zz q"), &c).unwrap();
        assert!((novel.tfidf - 0.346_573_590_279_972_6).abs() < 1e-12);

        assert!(tfidf_score("a", &[], &c).is_err());
    }

    #[test]
    fn comment_feature_examples() {
        let c = small_corpus();
        let cfg = TopLConfig::default();
        let empty = comment_features("", &c, &cfg).unwrap();
        assert_eq!((empty.max, empty.sum, empty.top_terms.len()), (0.0, 0.0, 0));

        let one = comment_features("c c", &c, &cfg).unwrap();
        assert_eq!(one.max, one.sum);
        assert_eq!(one.top_terms.len(), 1);

        let f = comment_features("a b a", &c, &cfg).unwrap();
        let a = tfidf_score("a", &toks("a b a"), &c).unwrap().tfidf;
        let b = tfidf_score("b", &toks("a b a"), &c).unwrap().tfidf;
        assert_eq!(f.max, a);
        assert_eq!(f.sum, a + b);
        assert_eq!(f.top_terms.iter().map(|t| t.term.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let c = build_corpus([("d1", "x"), ("d2", "y")]).unwrap();
        let f = comment_features("q p r s", &c, &TopLConfig { l: 2, ..Default::default() }).unwrap();
        assert_eq!(f.top_terms.iter().map(|t| t.term.as_str()).collect::<Vec<_>>(), ["p", "q"]);
    }

    #[test]
    fn corpus_max_tf_source() {
        let c = small_corpus();
        let cfg = TopLConfig { l: 3, tf_source: TfSource::CorpusMax };
        let f = comment_features("a", &c, &cfg).unwrap();
        assert!((f.top_terms[0].tf - 2.0 / 3.0).abs() < 1e-15);
        let novel = comment_features("zz", &c, &cfg).unwrap();
        assert_eq!(novel.max, 0.0);
    }

    #[test]
    fn loads_txt_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("kure.txt"), "harbor ships").unwrap();
        std::fs::write(dir.path().join("miyoshi.txt"), "river ships").unwrap();
        std::fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let c = load_corpus_dir(dir.path()).unwrap();
        assert_eq!(c.document_count(), 2);
        assert_eq!(c.documents()[0].id, "kure");
        assert_eq!(c.doc_frequency("ships"), Some(2));
    }
}
