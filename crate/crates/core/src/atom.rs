//! Weighted disjunctive atoms.
//!
//! An atom is a small confidence distribution over symbols. Weights are kept
//! normalized so that they always sum to one.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Absolute tolerance used for every weight and strength comparison.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtomError {
    #[error("an atom needs at least one disjunct")]
    Empty,
    #[error("weight {weight} for `{symbol}` is negative or not finite")]
    BadWeight { symbol: String, weight: f64 },
    #[error("all disjunct weights are zero")]
    ZeroMass,
}

/// A weighted disjunction of symbols.
///
/// Zero-weight disjuncts are dropped at construction, so two atoms with the
/// same distribution have the same disjunct set.
#[derive(Debug, Clone)]
pub struct Atom {
    disjuncts: BTreeMap<String, f64>,
}

impl Atom {
    /// Builds a normalized atom. Duplicate symbols are summed before
    /// normalization.
    pub fn new<I, S>(pairs: I) -> Result<Atom, AtomError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut raw: BTreeMap<String, f64> = BTreeMap::new();
        for (symbol, weight) in pairs {
            let symbol = symbol.into();
            if !weight.is_finite() || weight < 0.0 {
                return Err(AtomError::BadWeight { symbol, weight });
            }
            *raw.entry(symbol).or_insert(0.0) += weight;
        }
        if raw.is_empty() {
            return Err(AtomError::Empty);
        }
        let total: f64 = raw.values().sum();
        if total <= 0.0 {
            return Err(AtomError::ZeroMass);
        }
        let disjuncts = raw
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(s, w)| (s, w / total))
            .collect();
        Ok(Atom { disjuncts })
    }

    /// A "truly atomic" value: one symbol with all the mass.
    pub fn singleton(symbol: impl Into<String>) -> Atom {
        let mut disjuncts = BTreeMap::new();
        disjuncts.insert(symbol.into(), 1.0);
        Atom { disjuncts }
    }

    /// Weight of `symbol`, zero when absent.
    pub fn weight(&self, symbol: &str) -> f64 {
        self.disjuncts.get(symbol).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.disjuncts.contains_key(symbol)
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Disjuncts in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.disjuncts.iter().map(|(s, w)| (s.as_str(), *w))
    }

    /// Disjuncts sorted by weight descending, then by symbol.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// The most believed symbol (ties broken by name).
    pub fn best(&self) -> &str {
        self.ranked()[0].0
    }

    pub fn total_weight(&self) -> f64 {
        self.disjuncts.values().sum()
    }

    pub fn shares_disjunct(&self, other: &Atom) -> bool {
        self.disjuncts.keys().any(|k| other.disjuncts.contains_key(k))
    }

    /// Distribution equality within [`EPSILON`], absent symbols weighing zero.
    pub fn approx_eq(&self, other: &Atom) -> bool {
        self.disjuncts
            .keys()
            .chain(other.disjuncts.keys())
            .all(|k| (self.weight(k) - other.weight(k)).abs() <= EPSILON)
    }

    /// Atomic unification: union of disjuncts, each weight the mean of its
    /// weights in the two arguments.
    pub fn unify(&self, other: &Atom) -> Atom {
        let mut disjuncts = BTreeMap::new();
        for key in self.disjuncts.keys().chain(other.disjuncts.keys()) {
            disjuncts
                .entry(key.clone())
                .or_insert_with(|| (self.weight(key) + other.weight(key)) / 2.0);
        }
        Atom { disjuncts }
    }

    /// Atomic unification strength: total mass shared by both atoms.
    pub fn strength(&self, other: &Atom) -> f64 {
        let s: f64 = self
            .disjuncts
            .iter()
            .filter_map(|(k, w)| other.disjuncts.get(k).map(|v| w.min(*v)))
            .sum();
        s.clamp(0.0, 1.0)
    }
}

/// Renders `{sg:0.8, pl:0.2}`, or `{sg}` for a singleton.
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.len() == 1 {
            let (s, w) = self.iter().next().unwrap();
            if (w - 1.0).abs() <= EPSILON {
                return write!(f, "{{{}}}", s);
            }
        }
        f.write_str("{")?;
        for (i, (s, w)) in self.ranked().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", s, format_number(w))?;
        }
        f.write_str("}")
    }
}

/// Short decimal rendering that still round-trips within [`EPSILON`].
pub fn format_number(x: f64) -> String {
    let mut s = format!("{:.12}", x);
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    s
}
