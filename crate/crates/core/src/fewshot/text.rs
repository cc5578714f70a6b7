//! Tokenization and vocabulary.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub const NUM_TOKEN: &str = "<num>";

/// Lowercases and splits on every non-alphanumeric character. Any token
/// containing a digit becomes [`NUM_TOKEN`].
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t.chars().any(|c| c.is_numeric()) {
                NUM_TOKEN.to_string()
            } else {
                t.to_lowercase()
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabFile", into = "VocabFile")]
pub struct Vocabulary {
    tokens: Vec<String>,
    df: Vec<usize>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabFile {
    tokens: Vec<String>,
    df: Vec<usize>,
}

impl From<VocabFile> for Vocabulary {
    fn from(f: VocabFile) -> Self {
        Vocabulary::from_parts(f.tokens, f.df)
    }
}

impl From<Vocabulary> for VocabFile {
    fn from(v: Vocabulary) -> Self {
        VocabFile {
            tokens: v.tokens,
            df: v.df,
        }
    }
}

impl Vocabulary {
    fn from_parts(tokens: Vec<String>, df: Vec<usize>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, df, index }
    }

    /// Document frequency is counted per text (region). Tokens below
    /// `min_df` are dropped, the rest ordered by descending df then token
    /// and truncated to `max_vocab`.
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>, max_vocab: usize, min_df: usize) -> Self {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for text in texts {
            let unique: BTreeSet<String> = tokenize(text).into_iter().collect();
            for t in unique {
                *df.entry(t).or_default() += 1;
            }
        }
        let mut entries: Vec<(String, usize)> = df.into_iter().filter(|&(_, n)| n >= min_df).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(max_vocab);
        let (tokens, df) = entries.into_iter().unzip();
        Vocabulary::from_parts(tokens, df)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn df(&self) -> &[usize] {
        &self.df
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }
}
