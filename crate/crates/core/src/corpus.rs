//! Tokenization, vocabulary ranking and per-article spacing series.

use std::borrow::Borrow;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::Real;

pub const DEFAULT_TOP_N: usize = 10_000;
pub const DEFAULT_MIN_ARTICLES: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Characters that close a sentence.
    pub sentence_delimiters: Vec<char>,
    /// Keep numeric characters inside tokens instead of treating them as separators.
    pub keep_digits: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            sentence_delimiters: vec!['.', '!', '?', '\n'],
            keep_digits: false,
        }
    }
}

impl TokenizerConfig {
    fn is_token_char(&self, c: char) -> bool {
        c.is_alphabetic() || (self.keep_digits && c.is_numeric())
    }
}

/// A tokenized article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub article_id: String,
    pub sentences: Vec<Vec<String>>,
    pub length_words: usize,
}

impl Document {
    pub fn from_sentences(article_id: impl Into<String>, sentences: Vec<Vec<String>>) -> Self {
        let sentences: Vec<Vec<String>> = sentences.into_iter().filter(|s| !s.is_empty()).collect();
        let length_words = sentences.iter().map(Vec::len).sum();
        Self {
            article_id: article_id.into(),
            sentences,
            length_words,
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flatten().map(String::as_str)
    }
}

/// Splits `raw_text` into lowercase sentences of letter-only tokens.
///
/// Any character outside the token class ends the current token; sentence
/// delimiters additionally end the current sentence. Empty sentences are
/// dropped.
pub fn tokenize(
    article_id: impl Into<String>,
    raw_text: &str,
    config: &TokenizerConfig,
) -> Document {
    let mut sentences = Vec::new();
    let mut sentence: Vec<String> = Vec::new();
    let mut token = String::new();

    for c in raw_text.chars() {
        if config.is_token_char(c) {
            token.extend(c.to_lowercase());
            continue;
        }
        if !token.is_empty() {
            sentence.push(std::mem::take(&mut token));
        }
        if config.sentence_delimiters.contains(&c) && !sentence.is_empty() {
            sentences.push(std::mem::take(&mut sentence));
        }
    }
    if !token.is_empty() {
        sentence.push(token);
    }
    if !sentence.is_empty() {
        sentences.push(sentence);
    }
    Document::from_sentences(article_id, sentences)
}

/// Words ordered by corpus frequency, most frequent first, ties broken by
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedVocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
}

impl RankedVocabulary {
    /// Builds a vocabulary from raw `(word, count)` pairs, sorting them into rank order.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>, top_n: usize) -> Self {
        let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.dedup_by(|a, b| a.0 == b.0);
        entries.truncate(top_n);
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.clone(), i))
            .collect();
        Self { entries, index }
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based rank of `word` (1 is the most frequent), if it is in the vocabulary.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.position(word).map(|i| i + 1)
    }

    fn position(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }
}

/// Streaming word counter feeding [`RankedVocabulary`].
#[derive(Debug, Default, Clone)]
pub struct VocabularyCounter {
    counts: HashMap<String, u64>,
    documents: usize,
    tokens: u64,
}

impl VocabularyCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document(&mut self, doc: &Document) {
        self.documents += 1;
        for t in doc.tokens() {
            self.tokens += 1;
            match self.counts.get_mut(t) {
                Some(c) => *c += 1,
                None => {
                    self.counts.insert(t.to_owned(), 1);
                }
            }
        }
    }

    pub fn merge(&mut self, other: VocabularyCounter) {
        self.documents += other.documents;
        self.tokens += other.tokens;
        for (w, c) in other.counts {
            *self.counts.entry(w).or_insert(0) += c;
        }
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    pub fn finish(self, top_n: usize) -> Result<RankedVocabulary> {
        if top_n == 0 {
            return Err(Error::InvalidParameter("top_n must be at least 1".into()));
        }
        if self.documents == 0 || self.counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(RankedVocabulary::from_counts(self.counts, top_n))
    }
}

/// Ranks the `top_n` most frequent words of a document stream.
pub fn build_vocabulary<D: Borrow<Document>>(
    corpus: impl IntoIterator<Item = D>,
    top_n: usize,
) -> Result<RankedVocabulary> {
    let mut counter = VocabularyCounter::new();
    for doc in corpus {
        counter.add_document(doc.borrow());
    }
    counter.finish(top_n)
}

/// Whether consecutive occurrences may pair across sentence boundaries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum GapScope {
    #[default]
    Article,
    Sentence,
}

impl fmt::Display for GapScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapScope::Article => "article",
            GapScope::Sentence => "sentence",
        })
    }
}

impl FromStr for GapScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "article" => Ok(GapScope::Article),
            "sentence" => Ok(GapScope::Sentence),
            other => Err(Error::InvalidParameter(format!(
                "gap scope must be article or sentence, got {other:?}"
            ))),
        }
    }
}

/// Distances, in tokens, between consecutive occurrences of `word` in `doc`.
pub fn article_gaps(doc: &Document, word: &str, scope: GapScope) -> Vec<usize> {
    let mut gaps = Vec::new();
    let mut last: Option<usize> = None;
    let mut pos = 0;
    for sentence in &doc.sentences {
        if scope == GapScope::Sentence {
            last = None;
        }
        for t in sentence {
            if t == word {
                if let Some(prev) = last {
                    gaps.push(pos - prev);
                }
                last = Some(pos);
            }
            pos += 1;
        }
    }
    gaps
}

/// One article's contribution to a word's series.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSample<T> {
    pub avg_spacing: T,
    pub article_length: usize,
    pub article_id: String,
}

/// Per-article average spacings of one word.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSeries<T> {
    pub word: String,
    pub samples: Vec<SpacingSample<T>>,
}

impl<T> SpacingSeries<T> {
    pub fn new(word: impl Into<String>) -> Self {
        Self {
            word: word.into(),
            samples: Vec::new(),
        }
    }
}

#[derive(Clone, Copy)]
struct GapState {
    last: usize,
    sum: usize,
    count: usize,
    sentence: usize,
}

/// Accumulates spacing series for a fixed vocabulary, one document at a time.
///
/// Accumulators over disjoint document sets can be merged in any order; the
/// finished series are sorted by article id, so the result does not depend
/// on the order documents were seen.
#[derive(Debug, Clone)]
pub struct SeriesAccumulator<'v, T> {
    vocab: &'v RankedVocabulary,
    scope: GapScope,
    samples: Vec<Vec<SpacingSample<T>>>,
}

impl<'v, T: Real> SeriesAccumulator<'v, T> {
    pub fn new(vocab: &'v RankedVocabulary, scope: GapScope) -> Self {
        Self {
            vocab,
            scope,
            samples: vec![Vec::new(); vocab.len()],
        }
    }

    pub fn add_document(&mut self, doc: &Document) {
        let mut states: HashMap<usize, GapState> = HashMap::new();
        let mut pos = 0;
        for (sentence_idx, sentence) in doc.sentences.iter().enumerate() {
            for t in sentence {
                if let Some(rank) = self.vocab.position(t) {
                    match states.entry(rank) {
                        Entry::Vacant(e) => {
                            e.insert(GapState {
                                last: pos,
                                sum: 0,
                                count: 0,
                                sentence: sentence_idx,
                            });
                        }
                        Entry::Occupied(mut e) => {
                            let st = e.get_mut();
                            if self.scope == GapScope::Article || st.sentence == sentence_idx {
                                st.sum += pos - st.last;
                                st.count += 1;
                            }
                            st.last = pos;
                            st.sentence = sentence_idx;
                        }
                    }
                }
                pos += 1;
            }
        }
        for (rank, st) in states {
            if st.count > 0 {
                self.samples[rank].push(SpacingSample {
                    avg_spacing: T::from_count(st.sum) / T::from_count(st.count),
                    article_length: doc.length_words,
                    article_id: doc.article_id.clone(),
                });
            }
        }
    }

    pub fn merge(&mut self, other: Self) {
        for (mine, theirs) in self.samples.iter_mut().zip(other.samples) {
            mine.extend(theirs);
        }
    }

    /// Finished series in vocabulary rank order.
    pub fn finish(self) -> Vec<SpacingSeries<T>> {
        self.vocab
            .words()
            .zip(self.samples)
            .map(|(word, mut samples)| {
                samples.sort_by(|a, b| {
                    a.article_id
                        .cmp(&b.article_id)
                        .then(a.article_length.cmp(&b.article_length))
                        .then(
                            a.avg_spacing
                                .partial_cmp(&b.avg_spacing)
                                .unwrap_or(std::cmp::Ordering::Equal),
                        )
                });
                SpacingSeries {
                    word: word.to_owned(),
                    samples,
                }
            })
            .collect()
    }
}

/// Computes every vocabulary word's spacing series in a single pass.
pub fn build_series<T: Real, D: Borrow<Document>>(
    corpus: impl IntoIterator<Item = D>,
    vocab: &RankedVocabulary,
    scope: GapScope,
) -> BTreeMap<String, SpacingSeries<T>> {
    let mut acc = SeriesAccumulator::new(vocab, scope);
    for doc in corpus {
        acc.add_document(doc.borrow());
    }
    acc.finish()
        .into_iter()
        .map(|s| (s.word.clone(), s))
        .collect()
}
