//! Regenerates `tests/data/mini_corpus.jsonl`.
//!
//! ```text
//! cargo run -p stopwords-rmt --example gen_mini_corpus -- crates/cli/tests/data/mini_corpus.jsonl
//! ```
//!
//! Documents mix evenly spread function words, a long tail of content words
//! and a few topics whose words arrive in bursts.

use std::fs::File;
use std::io::{BufWriter, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0500;
const DOCUMENTS: usize = 500;
const CONTENT_WORDS: usize = 1500;
const TOPICS: usize = 12;
const WORDS_PER_TOPIC: usize = 12;

const FUNCTION_WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with", "be",
    "by", "on", "not", "he", "this", "are", "or", "his", "from", "at", "which", "but", "have",
    "an", "had", "they", "you", "were", "their", "one", "all", "we", "can", "her", "has", "there",
    "been", "if", "more", "when", "will", "would", "who", "so", "no", "she",
];

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "br", "tr", "st", "pl",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ea"];
const CODAS: &[&str] = &["", "", "n", "r", "s", "l", "m", "x", "nd", "rt"];

fn invent_word(rng: &mut ChaCha8Rng, taken: &mut std::collections::HashSet<String>) -> String {
    loop {
        let syllables = rng.random_range(2..=4);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            w.push_str(NUCLEI[rng.random_range(0..NUCLEI.len())]);
        }
        w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        if !FUNCTION_WORDS.contains(&w.as_str()) && taken.insert(w.clone()) {
            return w;
        }
    }
}

fn zipf(n: usize, s: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|k| (k as f64).powf(-s))).expect("positive weights")
}

fn main() -> std::io::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/cli/tests/data/mini_corpus.jsonl".into());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut taken = std::collections::HashSet::new();
    let content: Vec<String> = (0..CONTENT_WORDS)
        .map(|_| invent_word(&mut rng, &mut taken))
        .collect();
    let topics: Vec<Vec<String>> = (0..TOPICS)
        .map(|_| {
            (0..WORDS_PER_TOPIC)
                .map(|_| invent_word(&mut rng, &mut taken))
                .collect()
        })
        .collect();

    let function_dist = zipf(FUNCTION_WORDS.len(), 0.9);
    let content_dist = zipf(CONTENT_WORDS, 1.05);
    let topic_dist = zipf(WORDS_PER_TOPIC, 0.7);

    let mut out = BufWriter::new(File::create(&path)?);
    for doc in 0..DOCUMENTS {
        let length = rng.random_range(150..=600);
        let topic = &topics[rng.random_range(0..TOPICS)];
        let mut words: Vec<&str> = Vec::with_capacity(length);
        let mut burst: Option<(&str, usize)> = None;
        while words.len() < length {
            if let Some((w, left)) = burst.as_mut().filter(|(_, left)| *left > 0) {
                *left -= 1;
                if rng.random_bool(0.25) {
                    words.push(w);
                    continue;
                }
            }
            let roll: f64 = rng.random();
            let w = if roll < 0.45 {
                FUNCTION_WORDS[function_dist.sample(&mut rng)]
            } else if roll < 0.49 {
                let w = topic[topic_dist.sample(&mut rng)].as_str();
                burst = Some((w, rng.random_range(5..20)));
                w
            } else {
                content[content_dist.sample(&mut rng)].as_str()
            };
            words.push(w);
        }

        let mut text = String::new();
        let mut i = 0;
        while i < words.len() {
            let n = rng.random_range(8..=20).min(words.len() - i);
            let sentence = words[i..i + n].join(" ");
            let mut chars = sentence.chars();
            if let Some(first) = chars.next() {
                text.extend(first.to_uppercase());
                text.push_str(chars.as_str());
            }
            text.push_str(if rng.random_bool(0.1) { "? " } else { ". " });
            i += n;
        }
        let record = serde_json::json!({ "id": format!("doc{doc:03}"), "text": text.trim_end() });
        writeln!(out, "{record}")?;
    }
    out.flush()
}
