//! Text corpora as co-existence data: sentences are units, tokens are items.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cell::{validate_item_id, CellPopulation, CoexistenceUnit};
use crate::config::EvolutionConfig;
use crate::error::{Error, Result};
use crate::init::initialize_cells;
use crate::rng::{hash_display, KeyedStream, DOMAIN_BASE_VECTOR};

const MAX_LISTED_MISSING: usize = 20;

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits text into sentences.
///
/// A boundary is a run of `.`, `!` or `?` followed by whitespace or the end
/// of input (the run itself is dropped), or a blank line. Sentences are
/// trimmed and empty ones discarded, so `"v1.2 is out."` stays one sentence.
pub fn segment_sentences(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if is_terminator(c) {
            let mut j = i;
            while j < chars.len() && is_terminator(chars[j].1) {
                j += 1;
            }
            if j == chars.len() || chars[j].1.is_whitespace() {
                sentences.push(&text[start..pos]);
                start = chars.get(j).map_or(text.len(), |&(p, _)| p);
            }
            i = j;
            continue;
        }
        if c == '\n' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1 != '\n' && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == '\n' {
                sentences.push(&text[start..pos]);
                start = chars[j].0 + 1;
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    sentences.push(&text[start..]);
    sentences
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Whitespace tokenization with leading and trailing non-alphanumerics
/// stripped. Case and inner punctuation (`COVID-19`, `a_b`, `v1.2`) survive.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(ToString::to_string)
        .collect()
}

/// Token vectors of a single, uniform dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    /// Adds or replaces a vector; returns `true` if a previous entry was replaced.
    pub fn insert(&mut self, token: String, vector: Vec<f64>) -> Result<bool> {
        validate_item_id(&token)?;
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: format!("embedding for `{token}`"),
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { item: token });
        }
        Ok(self.vectors.insert(token, vector).is_some())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

/// Sentence units of a corpus, in document order, with stop words removed
/// and sentences left without tokens dropped.
pub fn corpus_units<S: AsRef<str>>(
    documents: &[S],
    stop_words: &BTreeSet<String>,
) -> Result<Vec<CoexistenceUnit<String>>> {
    let mut units = Vec::new();
    for doc in documents {
        for sentence in segment_sentences(doc.as_ref()) {
            let tokens: Vec<String> = tokenize(sentence)
                .into_iter()
                .filter(|t| !stop_words.contains(t))
                .collect();
            for t in &tokens {
                validate_item_id(t)?;
            }
            if !tokens.is_empty() {
                units.push(CoexistenceUnit::from_occurrences(units.len(), tokens));
            }
        }
    }
    Ok(units)
}

/// A deterministic unit-norm vector for `token`.
pub fn builtin_vector(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut stream = KeyedStream::new(seed, DOMAIN_BASE_VECTOR, hash_display(token), 0);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| stream.symmetric(1.0)).collect();
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random unit-norm base vectors for every token in `units`.
///
/// These vectors carry no co-occurrence information. They exist so the
/// pipeline can run without external embeddings; diversity rankings built
/// on them say nothing about meaning.
pub fn builtin_base_vectors(
    units: &[CoexistenceUnit<String>],
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable> {
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be positive".into()));
    }
    let vocab: BTreeSet<&String> = units.iter().flat_map(|u| u.members()).collect();
    let mut table = EmbeddingTable::new(dim);
    for token in vocab {
        table.insert(token.clone(), builtin_vector(token, dim, seed))?;
    }
    Ok(table)
}

/// What to do with corpus tokens that have no base vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingTokenPolicy {
    /// Drop the token from every unit (and drop units that become empty).
    Skip,
    #[default]
    Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextRunConfig {
    pub evolution: EvolutionConfig,
    pub missing: MissingTokenPolicy,
    pub stop_words: BTreeSet<String>,
}

/// Cells and units ready for evolution.
#[derive(Debug, Clone)]
pub struct TextRun {
    pub population: CellPopulation<String>,
    pub units: Vec<CoexistenceUnit<String>>,
    /// Tokens removed under [`MissingTokenPolicy::Skip`], sorted.
    pub skipped: Vec<String>,
}

impl TextRun {
    pub fn vocabulary(&self) -> impl Iterator<Item = &String> {
        self.population.items()
    }
}

/// Builds the population and sentence units for a corpus.
pub fn build_text_run<S: AsRef<str>>(
    documents: &[S],
    embeddings: &EmbeddingTable,
    config: &TextRunConfig,
) -> Result<TextRun> {
    let evolution = &config.evolution;
    evolution.validate()?;
    if embeddings.dim() != evolution.dim {
        return Err(Error::DimensionMismatch {
            context: "embedding table".into(),
            expected: evolution.dim,
            found: embeddings.dim(),
        });
    }
    let raw = corpus_units(documents, &config.stop_words)?;
    let missing: BTreeSet<&String> = raw
        .iter()
        .flat_map(|u| u.members())
        .filter(|t| !embeddings.contains(t))
        .collect();
    if !missing.is_empty() && config.missing == MissingTokenPolicy::Error {
        return Err(Error::MissingEmbeddings {
            missing: missing
                .iter()
                .take(MAX_LISTED_MISSING)
                .map(|s| (*s).clone())
                .collect(),
            total: missing.len(),
        });
    }
    let mut units = Vec::with_capacity(raw.len());
    for unit in &raw {
        let kept = unit
            .members()
            .iter()
            .filter(|t| !missing.contains(t))
            .cloned();
        let u = CoexistenceUnit::from_occurrences(units.len(), kept);
        if !u.is_empty() {
            units.push(u);
        }
    }
    let vocab: BTreeSet<&String> = units.iter().flat_map(|u| u.members()).collect();
    let population = initialize_cells(
        vocab
            .iter()
            .map(|t| (*t, embeddings.get(t).unwrap_or_default())),
        evolution,
    )?;
    Ok(TextRun {
        population,
        units,
        skipped: missing.into_iter().cloned().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn segmentation_examples() {
        assert_eq!(segment_sentences("A b. C d!"), vec!["A b", "C d"]);
        assert_eq!(segment_sentences("x\n\ny"), vec!["x", "y"]);
        assert_eq!(
            segment_sentences("v1.2 is out. Done."),
            vec!["v1.2 is out", "Done"]
        );
        assert_eq!(
            segment_sentences("Really?! Yes...\tno"),
            vec!["Really", "Yes", "no"]
        );
        assert_eq!(
            segment_sentences("one\r\n  \r\ntwo\nstill two"),
            vec!["one", "two\nstill two"]
        );
        assert!(segment_sentences("  . ! \n\n ").is_empty());
    }

    #[test]
    fn tokenization_examples() {
        assert_eq!(tokenize("COVID-19, spread."), vec!["COVID-19", "spread"]);
        assert_eq!(tokenize("Entropy entropy"), vec!["Entropy", "entropy"]);
        assert_eq!(tokenize("(a_b)"), vec!["a_b"]);
        assert_eq!(
            tokenize("Collect_connect_DLs_to_G inter-community -- \"quoted\""),
            vec!["Collect_connect_DLs_to_G", "inter-community", "quoted"]
        );
    }

    #[test]
    fn builtin_vectors_are_unit_norm_and_deterministic() {
        let a = builtin_vector("token", 50, 3);
        assert_eq!(a, builtin_vector("token", 50, 3));
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>();
        assert!((libm::sqrt(norm) - 1.0).abs() < 1e-9);
        assert_ne!(a, builtin_vector("token", 50, 4));
        assert_ne!(a, builtin_vector("tokens", 50, 3));
    }

    fn table(entries: &[(&str, &[f64])]) -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2);
        for (k, v) in entries {
            t.insert((*k).into(), v.to_vec()).unwrap();
        }
        t
    }

    fn cfg(missing: MissingTokenPolicy) -> TextRunConfig {
        TextRunConfig {
            evolution: EvolutionConfig {
                g: 2,
                dim: 2,
                ..Default::default()
            },
            missing,
            ..Default::default()
        }
    }

    fn members(units: &[CoexistenceUnit<String>]) -> Vec<Vec<&str>> {
        units
            .iter()
            .map(|u| u.members().iter().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn text_run_with_full_embeddings() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0]), ("c", &[1.0, 1.0])]);
        let run = build_text_run(&["a b. a c."], &t, &cfg(MissingTokenPolicy::Error)).unwrap();
        assert_eq!(run.vocabulary().collect::<Vec<_>>(), vec!["a", "b", "c"]);
        assert_eq!(members(&run.units), vec![vec!["a", "b"], vec!["a", "c"]]);
        assert!(run.skipped.is_empty());
    }

    #[test]
    fn text_run_missing_policies() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let run = build_text_run(&["a b. a c."], &t, &cfg(MissingTokenPolicy::Skip)).unwrap();
        assert_eq!(members(&run.units), vec![vec!["a", "b"], vec!["a"]]);
        assert_eq!(run.skipped, vec!["c"]);
        let err =
            build_text_run(&["a b. a c. d"], &t, &cfg(MissingTokenPolicy::Error)).unwrap_err();
        assert_eq!(
            err,
            Error::MissingEmbeddings {
                missing: vec!["c".into(), "d".into()],
                total: 2
            }
        );
    }

    #[test]
    fn missing_list_is_capped() {
        let t = table(&[]);
        let corpus: String = (0..30).map(|i| format!("w{i} ")).collect();
        match build_text_run(&[corpus], &t, &cfg(MissingTokenPolicy::Error)) {
            Err(Error::MissingEmbeddings { missing, total }) => {
                assert_eq!(missing.len(), 20);
                assert_eq!(total, 30);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stop_words_and_empty_sentences() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let mut c = cfg(MissingTokenPolicy::Error);
        c.stop_words.insert("the".into());
        let run = build_text_run(&["the a b. the. a a a!"], &t, &c).unwrap();
        assert_eq!(members(&run.units), vec![vec!["a", "b"], vec!["a"]]);
        assert_eq!(run.units[1].id(), 1);
    }

    #[test]
    fn default_scale_config_is_accepted() {
        let units = corpus_units(&["alpha beta. beta gamma delta."], &BTreeSet::new()).unwrap();
        let t = builtin_base_vectors(&units, 50, 1).unwrap();
        let c = TextRunConfig {
            evolution: EvolutionConfig {
                g: 5,
                dim: 50,
                rounds: 1,
                ..Default::default()
            },
            ..Default::default()
        };
        let run = build_text_run(&["alpha beta. beta gamma delta."], &t, &c).unwrap();
        assert_eq!(run.population.len(), 4);
        assert!(run
            .population
            .iter()
            .all(|cell| cell.g() == 5 && cell.dim() == 50));
    }
}
