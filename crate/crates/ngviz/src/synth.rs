//! Deterministic synthetic corpora: tunnel-like names (high-entropy
//! encoded labels under one apex) and legitimate-like names (composed
//! from an embedded English word list), so experiments run hermetically
//! with no external domain lists or live tunnels.
//!
//! Generation is a pure function of the seed: ChaCha8 keyed by the
//! 64-bit seed drives all draws, and the dependency lockfile pins the
//! sampling code, so one seed always yields one byte-identical corpus.

use std::ops::RangeInclusive;
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::QueryName;
use crate::error::{Error, Result};

/// Payload encodings seen in real tunnels. Base32 matches Iodine-style
/// query payloads; the others exercise alphabet sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Base32,
    Base64Url,
    Hex,
}

impl Encoding {
    pub fn alphabet(self) -> &'static [u8] {
        match self {
            Encoding::Base32 => b"abcdefghijklmnopqrstuvwxyz234567",
            Encoding::Base64Url => {
                b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"
            }
            Encoding::Hex => b"0123456789abcdef",
        }
    }
}

/// Parameters for tunnel-corpus generation.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub count: usize,
    pub apex: String,
    pub encoding: Encoding,
    pub label_len: RangeInclusive<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            count: 1000,
            apex: "t.example.com".to_string(),
            encoding: Encoding::Base32,
            label_len: 12..=40,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<QueryName> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        let (lo, hi) = (*self.label_len.start(), *self.label_len.end());
        if lo == 0 || hi > 63 || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "label lengths must lie in [1, 63] with lo <= hi (got {lo}..={hi})"
            )));
        }
        let apex = QueryName::parse(&self.apex)
            .map_err(|e| Error::InvalidConfig(format!("bad apex {:?}: {e}", self.apex)))?;
        // worst case: two payload labels, two separating dots
        let worst = 2 * hi + 2 + apex.normalized().len();
        if worst > 253 {
            return Err(Error::InvalidConfig(format!(
                "apex too long: worst-case name would be {worst} bytes"
            )));
        }
        Ok(apex)
    }
}

/// Stream of tunnel-like names: one or two labels of uniform random
/// alphabet bytes under the configured apex.
pub fn gen_tunnel(config: &SynthConfig) -> Result<impl Iterator<Item = QueryName>> {
    let apex = config.validate()?;
    let alphabet = config.encoding.alphabet();
    let label_len = config.label_len.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let apex_text = String::from_utf8(apex.raw().to_vec()).expect("apex parsed from str");
    Ok((0..config.count).map(move |_| {
        let labels = rng.random_range(1..=2usize);
        let mut text = String::new();
        for _ in 0..labels {
            let len = rng.random_range(label_len.clone());
            for _ in 0..len {
                text.push(alphabet[rng.random_range(0..alphabet.len())] as char);
            }
            text.push('.');
        }
        text.push_str(&apex_text);
        QueryName::parse(&text).expect("generated name within validated bounds")
    }))
}

static WORDS: OnceLock<Vec<&'static str>> = OnceLock::new();

/// The embedded English word list backing [`gen_legit`].
pub fn words() -> &'static [&'static str] {
    WORDS.get_or_init(|| {
        include_str!("../data/words.txt")
            .lines()
            .filter(|l| !l.is_empty())
            .collect()
    })
}

const TLDS: [&str; 5] = ["com", "net", "org", "io", "co"];

/// Stream of legitimate-looking names composed from dictionary words:
/// `word.tld`, `www.wordword.tld`, `word-word.tld`, `cdnN.word.tld`.
pub fn gen_legit(seed: u64, count: usize) -> impl Iterator<Item = QueryName> {
    let words = words();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| {
        let word = |rng: &mut ChaCha8Rng| words[rng.random_range(0..words.len())];
        let tld = TLDS[rng.random_range(0..TLDS.len())];
        let text = match rng.random_range(0..4u8) {
            0 => format!("{}.{}", word(&mut rng), tld),
            1 => format!("www.{}{}.{}", word(&mut rng), word(&mut rng), tld),
            2 => format!("{}-{}.{}", word(&mut rng), word(&mut rng), tld),
            _ => format!("cdn{}.{}.{}", rng.random_range(0..10u8), word(&mut rng), tld),
        };
        QueryName::parse(&text).expect("patterns stay within name bounds")
    })
}
