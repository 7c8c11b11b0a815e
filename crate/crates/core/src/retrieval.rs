//! Text-embedding index over learned composites: cosine similarity, top-k with
//! one hit per name group, and the reuse threshold.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::optical_model::OpticalSetup;
use crate::toolbox::Composite;

pub const EMBEDDING_DIM: usize = 384;
/// Existing match iff the best similarity is strictly above this.
pub const MATCH_THRESHOLD: f64 = 0.80;
pub const DEFAULT_TOP_K: usize = 5;
const HASH_SEED: u64 = 0x5eed_0f_c0de;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    /// Normalizes `raw`; a zero vector becomes the canonical fallback.
    pub fn from_raw(raw: Vec<f64>) -> Option<Self> {
        if raw.len() != EMBEDDING_DIM || raw.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Some(Self::fallback());
        }
        Some(EmbeddingVector(raw.into_iter().map(|x| x / norm).collect()))
    }

    /// Unit vector on bucket 0, used for text with no tokens.
    pub fn fallback() -> Self {
        let mut v = vec![0.0; EMBEDDING_DIM];
        v[0] = 1.0;
        EmbeddingVector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn cosine(&self, other: &EmbeddingVector) -> f64 {
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        (dot / (self.norm() * other.norm())).clamp(-1.0, 1.0)
    }
}

pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> EmbeddingVector;
}

/// Group tags added next to the raw tokens, so that related vocabulary
/// ("entangled", "Bell") lands in a shared bucket.
const CONCEPTS: &[(&str, &[&str])] = &[
    ("entanglement", &["entangled", "entanglement", "bell", "epr", "ghz", "hyperentanglement", "hyperentangled", "teleportation", "chsh", "mermin", "concurrence"]),
    ("pair_source", &["spdc", "bbo", "ppln", "ppktp", "downconversion", "down", "pair", "pairs", "source", "generator", "sagnac"]),
    ("interferometer", &["interferometer", "interference", "mach", "zehnder", "michelson", "franson", "fringe", "fringes", "splitter"]),
    ("two_photon", &["hong", "ou", "mandel", "hom", "dip", "bunching", "indistinguishable"]),
    ("atomic", &["rubidium", "rb", "cesium", "vapor", "vapour", "cell", "atom", "atomic", "eit", "lambda", "transparency"]),
    ("key_distribution", &["bb84", "qkd", "key", "eavesdropper", "sifting", "qber"]),
    ("conversion", &["conversion", "upconversion", "sfg", "sum", "frequency", "telecom"]),
    ("sampling", &["boson", "sampling", "permanent", "network"]),
    ("eraser", &["eraser", "which", "path", "slit", "delayed"]),
];

/// Tokens are cut to this many characters, a crude stem so that
/// "teleport" meets "teleportation".
const STEM_CHARS: usize = 7;

/// Signed hashed bag of lowercase alphanumeric stems plus concept tags, with
/// sublinear term frequency 1 + ln(tf) so repeated labels do not dominate.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashedBagEmbedder;

impl HashedBagEmbedder {
    /// Bucket and sign; the sign bit makes collisions cancel on average.
    fn bucket(token: &str) -> (usize, f64) {
        let h = twox_hash::XxHash64::oneshot(HASH_SEED, token.as_bytes());
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        ((h % EMBEDDING_DIM as u64) as usize, sign)
    }
}

impl Embedder for HashedBagEmbedder {
    fn embed(&self, text: &str) -> EmbeddingVector {
        let lower = text.to_lowercase();
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
            let stem: String = token.chars().take(STEM_CHARS).collect();
            *counts.entry(stem).or_default() += 1;
            for (concept, words) in CONCEPTS {
                if words.contains(&token) {
                    *counts.entry(format!("#{concept}")).or_default() += 1;
                }
            }
        }
        let mut raw = vec![0.0; EMBEDDING_DIM];
        for (term, n) in counts {
            let (i, sign) = Self::bucket(&term);
            raw[i] += sign * (1.0 + f64::from(n).ln());
        }
        EmbeddingVector::from_raw(raw).expect("finite fixed-length vector")
    }
}

pub fn embed(text: &str) -> EmbeddingVector {
    HashedBagEmbedder.embed(text)
}

/// Copies of the title in the indexed text, so a name outweighs the longer
/// description.
const TITLE_WEIGHT: usize = 2;

/// Title (repeated), description and sorted component labels.
pub fn setup_text(setup: &OpticalSetup) -> String {
    let mut labels: Vec<&str> = setup.components.iter().map(|c| c.label.as_str()).collect();
    labels.sort_unstable();
    let title = vec![setup.title.as_str(); TITLE_WEIGHT].join(" ");
    format!("{title} {} {}", setup.description, labels.join(" "))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub name: String,
    pub version: u32,
    pub similarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReuseChoice {
    UseThis,
    AutoImprove,
    GenerateNew,
}

impl ReuseChoice {
    pub const ALL: [ReuseChoice; 3] = [ReuseChoice::UseThis, ReuseChoice::AutoImprove, ReuseChoice::GenerateNew];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MatchDecision {
    ExistingMatch { best: RetrievalHit, choices: [ReuseChoice; 3] },
    NoMatch,
}

pub fn decide_match(hits: &[RetrievalHit]) -> MatchDecision {
    match hits.first() {
        Some(best) if best.similarity > MATCH_THRESHOLD => MatchDecision::ExistingMatch {
            best: best.clone(),
            choices: ReuseChoice::ALL,
        },
        _ => MatchDecision::NoMatch,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub name: String,
    pub version: u32,
    pub vector: EmbeddingVector,
}

/// Queries take `&self` and can share a snapshot; additions need `&mut self`,
/// so callers sharing an index across threads wrap it in a `RwLock`.
pub struct RetrievalIndex {
    embedder: Box<dyn Embedder>,
    entries: Vec<IndexEntry>,
}

impl Default for RetrievalIndex {
    fn default() -> Self {
        Self::new(Box::new(HashedBagEmbedder))
    }
}

impl RetrievalIndex {
    pub fn new(embedder: Box<dyn Embedder>) -> Self {
        RetrievalIndex {
            embedder,
            entries: Vec::new(),
        }
    }

    pub fn from_composites<'a>(composites: impl IntoIterator<Item = &'a Composite>) -> Self {
        let mut index = Self::default();
        for c in composites {
            index.add(c);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn add(&mut self, composite: &Composite) {
        let vector = self.embedder.embed(&setup_text(&composite.setup));
        self.add_vector(&composite.name, composite.version, vector);
    }

    /// Replaces an earlier entry with the same name and version.
    pub fn add_vector(&mut self, name: &str, version: u32, vector: EmbeddingVector) {
        self.entries.retain(|e| !(e.name == name && e.version == version));
        self.entries.push(IndexEntry {
            name: name.to_string(),
            version,
            vector,
        });
    }

    pub fn query(&self, text: &str, k: usize) -> Vec<RetrievalHit> {
        self.query_vector(&self.embedder.embed(text), k)
    }

    /// Latest version per name, most similar first, ties by (name, version).
    pub fn query_vector(&self, q: &EmbeddingVector, k: usize) -> Vec<RetrievalHit> {
        let mut latest: BTreeMap<&str, &IndexEntry> = BTreeMap::new();
        for e in &self.entries {
            let slot = latest.entry(&e.name).or_insert(e);
            if e.version > slot.version {
                *slot = e;
            }
        }
        let mut hits: Vec<RetrievalHit> = latest
            .into_values()
            .map(|e| RetrievalHit {
                name: e.name.clone(),
                version: e.version,
                similarity: q.cosine(&e.vector),
            })
            .collect();
        hits.sort_by(hit_order);
        hits.truncate(k);
        hits
    }

    pub fn save_cache(&self, path: &Path) -> std::io::Result<()> {
        let mut bytes = serde_json::to_vec(&self.entries).expect("entries serialize");
        bytes.push(b'\n');
        std::fs::write(path, bytes)
    }

    /// Loads cached vectors; the cache is derivable, so a corrupt file is
    /// reported rather than repaired.
    pub fn load_cache(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        let entries: Vec<IndexEntry> = serde_json::from_slice(&bytes).map_err(std::io::Error::other)?;
        for e in entries {
            let v = &e.vector.0;
            if v.len() != EMBEDDING_DIM || v.iter().any(|x| !x.is_finite()) || (e.vector.norm() - 1.0).abs() > 1e-9 {
                return Err(std::io::Error::other(format!("bad cached vector for {} v{}", e.name, e.version)));
            }
            self.add_vector(&e.name, e.version, e.vector);
        }
        Ok(())
    }
}

pub fn hit_order(a: &RetrievalHit, b: &RetrievalHit) -> Ordering {
    b.similarity
        .total_cmp(&a.similarity)
        .then_with(|| a.name.cmp(&b.name))
        .then_with(|| a.version.cmp(&b.version))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_are_unit_and_deterministic() {
        let a = embed("Hong-Ou-Mandel dip");
        assert_eq!(a, embed("Hong-Ou-Mandel dip"));
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(embed(""), EmbeddingVector::fallback());
        assert_eq!(embed(" -- "), EmbeddingVector::fallback());
    }

    #[test]
    fn related_vocabulary_is_closer() {
        let q = embed("entangled photon source");
        assert!(q.cosine(&embed("Bell state generator")) > q.cosine(&embed("rubidium vapor cell")));
    }

    #[test]
    fn threshold_is_strict() {
        let hit = |s| RetrievalHit {
            name: "x".into(),
            version: 1,
            similarity: s,
        };
        assert!(matches!(decide_match(&[hit(0.95)]), MatchDecision::ExistingMatch { .. }));
        assert_eq!(decide_match(&[hit(0.80)]), MatchDecision::NoMatch);
        assert_eq!(decide_match(&[]), MatchDecision::NoMatch);
    }

    #[test]
    fn empty_index_has_no_hits() {
        assert!(RetrievalIndex::default().query("anything", 5).is_empty());
    }
}
