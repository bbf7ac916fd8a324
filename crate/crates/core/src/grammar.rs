//! Rules and lexical entries over a context-free category backbone.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::atom::Atom;
use crate::avm::{FeatureStructure, FsList, Path};

/// Feature holding a constituent's syntactic category.
pub const CAT: &str = "CAT";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error("rule `{0}` has no daughters")]
    EmptyRule(String),
    #[error("`{0}` has no atomic {CAT} feature")]
    MissingCategory(String),
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
}

pub fn category_path() -> Path {
    Path(vec![CAT.to_string()])
}

/// The category atom of a structure, if it has one.
pub fn category(fs: &FeatureStructure) -> Option<&Atom> {
    fs.atom_at(&category_path())
}

/// A production `lhs -> rhs...`. Mother and daughters live in one arena so
/// reentrancy tags can link them.
#[derive(Debug, Clone)]
pub struct Rule {
    pub id: String,
    body: FsList,
}

impl Rule {
    /// `body` holds the mother first, then the daughters.
    pub fn new(id: impl Into<String>, body: FsList) -> Result<Rule, GrammarError> {
        let id = id.into();
        if body.len() < 2 {
            return Err(GrammarError::EmptyRule(id));
        }
        if category(&body.get(0)).is_none() {
            return Err(GrammarError::MissingCategory(format!("mother of rule {id}")));
        }
        Ok(Rule { id, body })
    }

    pub fn body(&self) -> &FsList {
        &self.body
    }

    pub fn lhs(&self) -> FeatureStructure {
        self.body.get(0)
    }

    pub fn rhs_len(&self) -> usize {
        self.body.len() - 1
    }

    pub fn rhs(&self, i: usize) -> FeatureStructure {
        self.body.get(i + 1)
    }

    pub fn category(&self) -> String {
        category(&self.lhs()).map(|a| a.best().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub start: String,
    pub rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(start: impl Into<String>, rules: Vec<Rule>) -> Result<Grammar, GrammarError> {
        let mut seen = std::collections::BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.id.clone()) {
                return Err(GrammarError::DuplicateRule(r.id.clone()));
            }
        }
        Ok(Grammar { start: start.into(), rules })
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }
}

#[derive(Debug, Clone)]
pub struct LexEntry {
    /// `word/CAT`, with `-2`, `-3`... on collision.
    pub id: String,
    pub word: String,
    pub fs: FeatureStructure,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    by_word: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    /// Adds an entry and returns its id.
    pub fn add(&mut self, word: impl Into<String>, fs: FeatureStructure) -> Result<&str, GrammarError> {
        let word = word.into();
        let cat = category(&fs)
            .ok_or_else(|| GrammarError::MissingCategory(format!("lexical entry for `{word}`")))?
            .best()
            .to_string();
        let base = format!("{word}/{cat}");
        let mut id = base.clone();
        let mut n = 1;
        while self.entries.iter().any(|e| e.id == id) {
            n += 1;
            id = format!("{base}-{n}");
        }
        self.by_word.entry(word.clone()).or_default().push(self.entries.len());
        self.entries.push(LexEntry { id, word, fs });
        Ok(&self.entries.last().unwrap().id)
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries_for(&self, word: &str) -> impl Iterator<Item = &LexEntry> {
        self.by_word.get(word).into_iter().flatten().map(|&i| &self.entries[i])
    }

    pub fn get(&self, id: &str) -> Option<&LexEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}
