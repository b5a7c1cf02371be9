use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Document;
use crate::error::{Error, Result};

/// An artificial language: a private alphabet and a word-length range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthLanguage {
    pub name: String,
    /// Every character this language may use; alphabets of different
    /// languages must not overlap.
    pub alphabet: String,
    pub word_len_min: usize,
    pub word_len_max: usize,
}

/// How the languages of a generated document are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternKind {
    /// Every word from a single language.
    #[serde(rename = "monolingual")]
    Monolingual,
    /// Language switches every k sentences; the configured period is the
    /// nominal period in words, realized as whole sentences of 4-6 words.
    #[serde(rename = "alternating-sentences")]
    AlternatingSentences,
    /// Language switches every `period_words` words.
    #[serde(rename = "alternating-words")]
    AlternatingWords,
    /// Unpatterned mixing: language runs of 100-500 words, consecutive runs
    /// in different languages.
    #[serde(rename = "multilingual-other")]
    MultilingualOther,
}

impl PatternKind {
    fn slug(self) -> &'static str {
        match self {
            PatternKind::Monolingual => "mono",
            PatternKind::AlternatingSentences => "alts",
            PatternKind::AlternatingWords => "altw",
            PatternKind::MultilingualOther => "multi",
        }
    }
}

fn default_count() -> usize {
    1
}

/// A batch of documents sharing one pattern.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthDocSpec {
    pub pattern: PatternKind,
    /// Switch interval in words; required for the alternating patterns,
    /// forbidden otherwise.
    #[serde(default)]
    pub period_words: Option<usize>,
    pub length_words: usize,
    pub languages: Vec<String>,
    #[serde(default = "default_count")]
    pub count: usize,
}

/// Generator configuration; see the book's pipeline chapter for a worked
/// example.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub languages: Vec<SynthLanguage>,
    pub documents: Vec<SynthDocSpec>,
    /// Probability that a non-whitespace character is replaced by a random
    /// character from the union of all alphabets, imitating OCR damage.
    #[serde(default)]
    pub noise_rate: f64,
}

/// Ground truth attached to every generated document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternTag {
    pub pattern: PatternKind,
    pub period_words: Option<usize>,
    pub languages: Vec<String>,
}

impl SynthConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(json)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Err(Error::InvalidGeneratorSpec(reason));
        if self.languages.len() < 2 {
            return invalid("at least two languages are required".into());
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return invalid(format!("noise_rate {} outside [0, 1]", self.noise_rate));
        }
        let mut names = BTreeSet::new();
        for lang in &self.languages {
            if lang.name.is_empty() {
                return invalid("language with empty name".into());
            }
            if !names.insert(lang.name.as_str()) {
                return invalid(format!("duplicate language name {:?}", lang.name));
            }
            if lang.alphabet.is_empty() {
                return invalid(format!("language {:?} has an empty alphabet", lang.name));
            }
            let chars: BTreeSet<char> = lang.alphabet.chars().collect();
            if chars.len() != lang.alphabet.chars().count() {
                return invalid(format!("language {:?} repeats alphabet characters", lang.name));
            }
            if chars.iter().any(|c| c.is_whitespace()) {
                return invalid(format!("language {:?} has whitespace in its alphabet", lang.name));
            }
            if lang.word_len_min < 1 || lang.word_len_max < lang.word_len_min {
                return invalid(format!("language {:?} has an invalid word length range", lang.name));
            }
        }
        for (i, a) in self.languages.iter().enumerate() {
            let set_a: BTreeSet<char> = a.alphabet.chars().collect();
            for b in &self.languages[i + 1..] {
                if b.alphabet.chars().any(|c| set_a.contains(&c)) {
                    return Err(Error::OverlappingAlphabets(a.name.clone(), b.name.clone()));
                }
            }
        }
        for (i, spec) in self.documents.iter().enumerate() {
            let at = |reason: String| format!("documents[{i}]: {reason}");
            if spec.length_words < 1 {
                return invalid(at("length_words must be at least 1".into()));
            }
            let mut seen = BTreeSet::new();
            for name in &spec.languages {
                if !names.contains(name.as_str()) {
                    return invalid(at(format!("unknown language {name:?}")));
                }
                if !seen.insert(name.as_str()) {
                    return invalid(at(format!("language {name:?} listed twice")));
                }
            }
            match spec.pattern {
                PatternKind::Monolingual => {
                    if spec.languages.len() != 1 {
                        return invalid(at("monolingual takes exactly one language".into()));
                    }
                    if spec.period_words.is_some() {
                        return invalid(at("monolingual takes no period".into()));
                    }
                }
                PatternKind::AlternatingSentences | PatternKind::AlternatingWords => {
                    if spec.languages.len() < 2 {
                        return invalid(at("alternation needs at least two languages".into()));
                    }
                    if spec.period_words.is_none_or(|p| p < 1) {
                        return invalid(at("alternation needs period_words >= 1".into()));
                    }
                }
                PatternKind::MultilingualOther => {
                    if spec.languages.len() < 2 {
                        return invalid(at("multilingual-other needs at least two languages".into()));
                    }
                    if spec.period_words.is_some() {
                        return invalid(at("multilingual-other takes no period".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Minimum and maximum words in one run of [`PatternKind::MultilingualOther`].
const OTHER_RUN_WORDS: (usize, usize) = (100, 500);
/// Sentence lengths used by [`PatternKind::AlternatingSentences`].
const SENTENCE_WORDS: (usize, usize) = (4, 6);

struct Generator<'a> {
    by_name: HashMap<&'a str, &'a SynthLanguage>,
    union_alphabet: Vec<char>,
    noise_rate: f64,
    rng: ChaCha8Rng,
}

impl<'a> Generator<'a> {
    fn word(&mut self, lang: &SynthLanguage) -> String {
        let alphabet: Vec<char> = lang.alphabet.chars().collect();
        let len = self.rng.gen_range(lang.word_len_min..=lang.word_len_max);
        (0..len)
            .map(|_| alphabet[self.rng.gen_range(0..alphabet.len())])
            .collect()
    }

    fn lang(&self, name: &str) -> &'a SynthLanguage {
        self.by_name[name]
    }

    /// One word per entry; sentence-final words carry a trailing period.
    fn words(&mut self, spec: &SynthDocSpec) -> Vec<String> {
        let n = spec.length_words;
        match spec.pattern {
            PatternKind::Monolingual => {
                let lang = self.lang(&spec.languages[0]);
                (0..n).map(|_| self.word(lang)).collect()
            }
            PatternKind::AlternatingWords => {
                let k = spec.period_words.expect("validated");
                (0..n)
                    .map(|i| {
                        let lang = self.lang(&spec.languages[(i / k) % spec.languages.len()]);
                        self.word(lang)
                    })
                    .collect()
            }
            PatternKind::AlternatingSentences => {
                let nominal = spec.period_words.expect("validated") as f64;
                let mean_len = f64::from(SENTENCE_WORDS.0 as u32 + SENTENCE_WORDS.1 as u32) / 2.0;
                let per_block = ((nominal / mean_len).round() as usize).max(1);
                let mut words = Vec::with_capacity(n);
                let mut sentence = 0usize;
                while words.len() < n {
                    let lang =
                        self.lang(&spec.languages[(sentence / per_block) % spec.languages.len()]);
                    let len = self
                        .rng
                        .gen_range(SENTENCE_WORDS.0..=SENTENCE_WORDS.1)
                        .min(n - words.len());
                    for i in 0..len {
                        let mut word = self.word(lang);
                        if i + 1 == len {
                            word.push('.');
                        }
                        words.push(word);
                    }
                    sentence += 1;
                }
                words
            }
            PatternKind::MultilingualOther => {
                let mut words = Vec::with_capacity(n);
                let mut previous: Option<usize> = None;
                while words.len() < n {
                    let mut idx = self.rng.gen_range(0..spec.languages.len());
                    if let Some(p) = previous {
                        if idx == p {
                            idx = (idx + 1) % spec.languages.len();
                        }
                    }
                    previous = Some(idx);
                    let lang = self.lang(&spec.languages[idx]);
                    let run = self
                        .rng
                        .gen_range(OTHER_RUN_WORDS.0..=OTHER_RUN_WORDS.1)
                        .min(n - words.len());
                    for _ in 0..run {
                        words.push(self.word(lang));
                    }
                }
                words
            }
        }
    }

    fn corrupt(&mut self, text: &str) -> String {
        text.chars()
            .map(|c| {
                if !c.is_whitespace() && self.rng.gen_bool(self.noise_rate) {
                    self.union_alphabet[self.rng.gen_range(0..self.union_alphabet.len())]
                } else {
                    c
                }
            })
            .collect()
    }
}

/// Generates the configured documents with their ground-truth tags.
/// Byte-identical output for the same configuration and seed.
pub fn generate_synthetic_corpus(
    config: &SynthConfig,
    rng_seed: u64,
) -> Result<Vec<(Document, PatternTag)>> {
    config.validate()?;
    let mut generator = Generator {
        by_name: config
            .languages
            .iter()
            .map(|l| (l.name.as_str(), l))
            .collect(),
        union_alphabet: config
            .languages
            .iter()
            .flat_map(|l| l.alphabet.chars())
            .collect(),
        noise_rate: config.noise_rate,
        rng: ChaCha8Rng::seed_from_u64(rng_seed),
    };
    let mut corpus = Vec::new();
    for spec in &config.documents {
        for _ in 0..spec.count {
            let clean = generator.words(spec).join(" ");
            let text = generator.corrupt(&clean);
            let document = Document {
                id: format!("{}-{:04}", spec.pattern.slug(), corpus.len()),
                text,
                language_label: match spec.pattern {
                    PatternKind::Monolingual => Some(spec.languages[0].clone()),
                    _ => None,
                },
                year: None,
                source: "synthetic".into(),
            };
            let tag = PatternTag {
                pattern: spec.pattern,
                period_words: spec.period_words,
                languages: spec.languages.clone(),
            };
            corpus.push((document, tag));
        }
    }
    Ok(corpus)
}
