//! Activation-scored chart parsing with graded unification.
//!
//! Every edge carries an activation in `[0, 1]`. A new edge's activation is a
//! convex combination of the strength of the unification that licensed it and
//! the activations of the two edges (or edge and rule) it was built from.
//! Unifications weaker than the unification threshold fail; edges whose
//! activation falls below the activation threshold are suspended instead of
//! entering the chart. The agenda is best-first by activation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::atom::{Atom, EPSILON};
use crate::avm::{FeatureStructure, FsList};
use crate::grammar::{category, Grammar, Lexicon, Rule, CAT};
use crate::unify::{unify_member, UnifyError};

pub type EdgeId = usize;

/// Initial lexical activations keyed by `(token index, entry id)`.
pub type LexActivations = BTreeMap<(usize, String), f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Threshold { name: &'static str, value: f64 },
    #[error("activation weights must be non-negative and sum to 1, got {0:?}")]
    Weights([f64; 3]),
    #[error("max_agenda_steps must be positive")]
    Steps,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unknown word `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParserConfig {
    pub unification_threshold: f64,
    pub activation_threshold: f64,
    /// Weights of (unification strength, first parent, second parent).
    pub weights: [f64; 3],
    /// Overrides the grammar's start category when set.
    pub start_category: Option<String>,
    pub max_agenda_steps: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            unification_threshold: 0.7,
            activation_threshold: 0.6,
            weights: [0.5, 0.3, 0.2],
            start_category: None,
            max_agenda_steps: 100_000,
        }
    }
}

impl ParserConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("unification threshold", self.unification_threshold),
            ("activation threshold", self.activation_threshold),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Threshold { name, value });
            }
        }
        let w = self.weights;
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > EPSILON {
            return Err(ConfigError::Weights(w));
        }
        if self.max_agenda_steps == 0 {
            return Err(ConfigError::Steps);
        }
        Ok(())
    }

    fn admits(&self, activation: f64) -> bool {
        activation >= self.activation_threshold - EPSILON
    }
}

/// `w1·strength + w2·activ1 + w3·activ2`.
pub fn compute_activation(strength: f64, activ1: f64, activ2: f64, cfg: &ParserConfig) -> f64 {
    let [w1, w2, w3] = cfg.weights;
    (w1 * strength + w2 * activ1 + w3 * activ2).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum EdgeKind {
    Lexical,
    RuleInvoked,
    Extended,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub kind: EdgeKind,
    pub parents: Vec<EdgeId>,
    /// Strength of the licensing unification (1 for lexical edges).
    pub strength: f64,
    pub rule: Option<String>,
    pub entry: Option<String>,
}

/// An edge before it has been numbered.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub start: usize,
    pub end: usize,
    body: FsList,
    pub activation: f64,
    pub provenance: Provenance,
    pub daughters: Vec<EdgeId>,
    derivation: Arc<str>,
}

impl Candidate {
    fn number(self, id: EdgeId) -> Edge {
        Edge {
            id,
            start: self.start,
            end: self.end,
            body: self.body,
            activation: self.activation,
            provenance: self.provenance,
            daughters: self.daughters,
            derivation: self.derivation,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: EdgeId,
    pub start: usize,
    pub end: usize,
    /// Mother followed by the constituents still needed.
    body: FsList,
    pub activation: f64,
    pub provenance: Provenance,
    /// Inactive edges consumed so far, left to right.
    pub daughters: Vec<EdgeId>,
    derivation: Arc<str>,
}

impl Edge {
    pub fn mother(&self) -> FeatureStructure {
        self.body.get(0)
    }

    pub fn needed_len(&self) -> usize {
        self.body.len() - 1
    }

    pub fn needed(&self, i: usize) -> FeatureStructure {
        self.body.get(i + 1)
    }

    pub fn body(&self) -> &FsList {
        &self.body
    }

    pub fn is_active(&self) -> bool {
        self.needed_len() > 0
    }

    /// Category of the mother (its most believed CAT symbol).
    pub fn category(&self) -> String {
        category(&self.mother()).map(|a| a.best().to_string()).unwrap_or_default()
    }

    /// Canonical description of the derivation built so far.
    pub fn derivation(&self) -> &str {
        &self.derivation
    }

    fn closed_derivation(&self) -> String {
        match self.provenance.kind {
            EdgeKind::Lexical => self.derivation.to_string(),
            _ => format!("{})", self.derivation),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    #[serde(rename = "LEX-INIT")]
    LexInit,
    #[serde(rename = "GOAL-SEED")]
    GoalSeed,
    #[serde(rename = "EXTEND")]
    Extend,
    #[serde(rename = "INVOKE")]
    Invoke,
    #[serde(rename = "SUSPEND")]
    Suspend,
    #[serde(rename = "UNIFY-FAIL")]
    UnifyFail,
    #[serde(rename = "DEDUP-DROP")]
    DedupDrop,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::LexInit => "LEX-INIT",
            EventKind::GoalSeed => "GOAL-SEED",
            EventKind::Extend => "EXTEND",
            EventKind::Invoke => "INVOKE",
            EventKind::Suspend => "SUSPEND",
            EventKind::UnifyFail => "UNIFY-FAIL",
            EventKind::DedupDrop => "DEDUP-DROP",
        })
    }
}

/// One trace record. `edges` lists the new edge first, then its parents
/// (for UNIFY-FAIL only the parents; for DEDUP-DROP the dropped edge and the
/// one it duplicates).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub step: usize,
    pub kind: EventKind,
    pub edges: Vec<EdgeId>,
    pub strength: Option<f64>,
    pub activation: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Suspension {
    pub edge: EdgeId,
    pub reason: String,
}

/// Result of trying to build one edge.
#[derive(Debug, Clone)]
pub enum Outcome {
    Admit(Candidate),
    Suspend(Candidate),
    Fail(UnifyError),
    /// Categories disagree or the edges are not adjacent; nothing attempted.
    Mismatch,
}

fn categories_compatible(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    match (category(a), category(b)) {
        (Some(x), Some(y)) => x.shares_disjunct(y),
        _ => true,
    }
}

fn gate(candidate: Candidate, cfg: &ParserConfig) -> Outcome {
    if cfg.admits(candidate.activation) {
        Outcome::Admit(candidate)
    } else {
        Outcome::Suspend(candidate)
    }
}

/// Extends `active` with the adjacent inactive edge `inactive`.
pub fn extend_edge(active: &Edge, inactive: &Edge, cfg: &ParserConfig) -> Outcome {
    if !active.is_active() || inactive.is_active() || active.end != inactive.start {
        return Outcome::Mismatch;
    }
    let other = inactive.mother();
    if !categories_compatible(&active.needed(0), &other) {
        return Outcome::Mismatch;
    }
    let (body, strength) = match unify_member(&active.body, 1, &other, cfg.unification_threshold) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e),
    };
    let mut daughters = active.daughters.clone();
    daughters.push(inactive.id);
    let candidate = Candidate {
        start: active.start,
        end: inactive.end,
        body: body.without(1),
        activation: compute_activation(strength, active.activation, inactive.activation, cfg),
        provenance: Provenance {
            kind: EdgeKind::Extended,
            parents: vec![active.id, inactive.id],
            strength,
            rule: active.provenance.rule.clone(),
            entry: None,
        },
        daughters,
        derivation: format!("{} {}", active.derivation, inactive.closed_derivation()).into(),
    };
    gate(candidate, cfg)
}

/// Starts `rule` at `position` from a goal structure, with the given parent
/// activation. Shared by goal seeding and top-down invocation.
fn start_rule(
    rule: &Rule,
    goal: &FeatureStructure,
    position: usize,
    parent: Option<&Edge>,
    cfg: &ParserConfig,
) -> Outcome {
    if !categories_compatible(&rule.lhs(), goal) {
        return Outcome::Mismatch;
    }
    let (body, strength) = match unify_member(rule.body(), 0, goal, cfg.unification_threshold) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e),
    };
    let parent_activation = parent.map_or(1.0, |p| p.activation);
    let candidate = Candidate {
        start: position,
        end: position,
        body,
        // rule edges are pegged to 1.0
        activation: compute_activation(strength, parent_activation, 1.0, cfg),
        provenance: Provenance {
            kind: EdgeKind::RuleInvoked,
            parents: parent.map(|p| vec![p.id]).unwrap_or_default(),
            strength,
            rule: Some(rule.id.clone()),
            entry: None,
        },
        daughters: Vec::new(),
        derivation: format!("({}", rule.id).into(),
    };
    gate(candidate, cfg)
}

/// Top-down invocation: one outcome per rule whose mother was tried against
/// the first constituent `active` still needs.
pub fn invoke_rules<'r>(active: &Edge, rules: &'r [Rule], cfg: &ParserConfig) -> Vec<(&'r Rule, Outcome)> {
    if !active.is_active() {
        return Vec::new();
    }
    let goal = active.needed(0);
    rules
        .iter()
        .map(|r| (r, start_rule(r, &goal, active.end, Some(active), cfg)))
        .filter(|(_, o)| !matches!(o, Outcome::Mismatch))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AgendaItem {
    activation: f64,
    seq: u64,
    edge: EdgeId,
}

impl Eq for AgendaItem {}

impl Ord for AgendaItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.activation
            .total_cmp(&other.activation)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for AgendaItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Chart, agenda and trace of one parse run.
#[derive(Debug)]
pub struct Chart {
    tokens: Vec<String>,
    /// Every edge ever numbered, indexed by id.
    edges: Vec<Edge>,
    admitted: Vec<EdgeId>,
    /// Chart edges by (start, end, active).
    index: BTreeMap<(usize, usize, bool), Vec<EdgeId>>,
    active_by_end: BTreeMap<usize, Vec<EdgeId>>,
    inactive_by_start: BTreeMap<usize, Vec<EdgeId>>,
    suspended: Vec<Suspension>,
    agenda: BinaryHeap<AgendaItem>,
    seq: u64,
    step: usize,
    trace: Vec<TraceEvent>,
}

/// Builds the initial chart: one inactive edge per lexical entry of each
/// token, activated at 1.0 unless `lex_activations` says otherwise.
pub fn init_chart(
    tokens: &[&str],
    lexicon: &Lexicon,
    lex_activations: Option<&LexActivations>,
    cfg: &ParserConfig,
) -> Result<Chart, ParseError> {
    let mut chart = Chart {
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
        edges: Vec::new(),
        admitted: Vec::new(),
        index: BTreeMap::new(),
        active_by_end: BTreeMap::new(),
        inactive_by_start: BTreeMap::new(),
        suspended: Vec::new(),
        agenda: BinaryHeap::new(),
        seq: 0,
        step: 0,
        trace: Vec::new(),
    };
    for (position, token) in tokens.iter().enumerate() {
        let mut found = false;
        for entry in lexicon.entries_for(token) {
            found = true;
            let activation = lex_activations
                .and_then(|m| m.get(&(position, entry.id.clone())).copied())
                .unwrap_or(1.0);
            let edge = Candidate {
                start: position,
                end: position + 1,
                body: FsList::single(entry.fs.clone()),
                activation,
                provenance: Provenance {
                    kind: EdgeKind::Lexical,
                    parents: Vec::new(),
                    strength: 1.0,
                    rule: None,
                    entry: Some(entry.id.clone()),
                },
                daughters: Vec::new(),
                derivation: format!("{}@{}", entry.id, position).into(),
            }
            .number(chart.edges.len());
            let id = edge.id;
            chart.log(EventKind::LexInit, vec![id], None, Some(activation), entry.id.clone());
            let admit = cfg.admits(activation);
            chart.edges.push(edge);
            if admit {
                chart.admit(id);
            } else {
                chart.suspend(id);
            }
        }
        if !found {
            return Err(ParseError::UnknownToken { token: token.to_string(), position });
        }
    }
    Ok(chart)
}

impl Chart {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Ids of edges in the chart, in order of admission.
    pub fn chart_edges(&self) -> &[EdgeId] {
        &self.admitted
    }

    /// Chart edges over one span.
    pub fn edges_at(&self, start: usize, end: usize, active: bool) -> &[EdgeId] {
        self.index.get(&(start, end, active)).map_or(&[], Vec::as_slice)
    }

    pub fn suspended(&self) -> &[Suspension] {
        &self.suspended
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    fn log(&mut self, kind: EventKind, edges: Vec<EdgeId>, strength: Option<f64>, activation: Option<f64>, detail: String) {
        self.trace.push(TraceEvent { step: self.step, kind, edges, strength, activation, detail });
    }

    fn suspend(&mut self, id: EdgeId) {
        let activation = self.edges[id].activation;
        self.log(EventKind::Suspend, vec![id], None, Some(activation), String::new());
        self.suspended.push(Suspension { edge: id, reason: "activation below threshold".to_string() });
    }

    fn admit(&mut self, id: EdgeId) {
        let (start, end, active) = {
            let e = &self.edges[id];
            (e.start, e.end, e.is_active())
        };
        self.index.entry((start, end, active)).or_default().push(id);
        if active {
            self.active_by_end.entry(end).or_default().push(id);
        } else {
            self.inactive_by_start.entry(start).or_default().push(id);
        }
        self.admitted.push(id);
    }

    fn duplicate_of(&self, edge: &Edge) -> Option<EdgeId> {
        self.edges_at(edge.start, edge.end, edge.is_active()).iter().copied().find(|&other| {
            let o = &self.edges[other];
            o.id != edge.id
                && o.needed_len() == edge.needed_len()
                && (o.activation - edge.activation).abs() <= EPSILON
                && o.derivation == edge.derivation
                && o.body.fs_equal(&edge.body)
        })
    }

    fn offer(&mut self, outcome: Outcome, kind: EventKind, parents: Vec<EdgeId>, detail: String) {
        let (candidate, admit) = match outcome {
            Outcome::Mismatch => return,
            Outcome::Fail(e) => {
                self.log(EventKind::UnifyFail, parents, Some(e.strength()), None, detail);
                return;
            }
            Outcome::Admit(c) => (c, true),
            Outcome::Suspend(c) => (c, false),
        };
        let id = self.edges.len();
        let edge = candidate.number(id);
        let (strength, activation) = (edge.provenance.strength, edge.activation);
        let mut ids = vec![id];
        ids.extend(parents);
        self.log(kind, ids, Some(strength), Some(activation), detail);
        self.edges.push(edge);
        if !admit {
            self.suspend(id);
        } else if let Some(existing) = self.duplicate_of(&self.edges[id]) {
            self.log(EventKind::DedupDrop, vec![id, existing], None, Some(activation), String::new());
        } else {
            self.seq += 1;
            self.agenda.push(AgendaItem { activation, seq: self.seq, edge: id });
        }
    }

    /// Seeds the agenda with one goal edge at position 0 per rule whose
    /// mother unifies with the start category.
    pub fn seed(&mut self, grammar: &Grammar, cfg: &ParserConfig) {
        let start = cfg.start_category.clone().unwrap_or_else(|| grammar.start.clone());
        let goal = FeatureStructure::from_features([(CAT, FeatureStructure::atom(Atom::singleton(start)), None)])
            .expect("goal structure");
        for rule in &grammar.rules {
            let outcome = start_rule(rule, &goal, 0, None, cfg);
            self.offer(outcome, EventKind::GoalSeed, Vec::new(), rule.id.clone());
        }
    }

    /// Runs the agenda until it empties or the step limit is reached.
    /// Returns false when the run was cut short.
    pub fn run(&mut self, grammar: &Grammar, cfg: &ParserConfig) -> bool {
        loop {
            if self.agenda.is_empty() {
                return true;
            }
            if self.step >= cfg.max_agenda_steps {
                return false;
            }
            let item = self.agenda.pop().expect("non-empty agenda");
            self.step += 1;
            if let Some(existing) = self.duplicate_of(&self.edges[item.edge]) {
                self.log(EventKind::DedupDrop, vec![item.edge, existing], None, Some(item.activation), String::new());
                continue;
            }
            self.admit(item.edge);
            self.expand(item.edge, grammar, cfg);
        }
    }

    fn expand(&mut self, id: EdgeId, grammar: &Grammar, cfg: &ParserConfig) {
        let edge = self.edges[id].clone();
        if edge.is_active() {
            let outcomes: Vec<(String, Outcome)> = invoke_rules(&edge, &grammar.rules, cfg)
                .into_iter()
                .map(|(r, o)| (r.id.clone(), o))
                .collect();
            for (rule, outcome) in outcomes {
                self.offer(outcome, EventKind::Invoke, vec![id], rule);
            }
            let partners = self.inactive_by_start.get(&edge.end).cloned().unwrap_or_default();
            for other in partners {
                let outcome = extend_edge(&edge, &self.edges[other], cfg);
                let detail = edge.provenance.rule.clone().unwrap_or_default();
                self.offer(outcome, EventKind::Extend, vec![id, other], detail);
            }
        } else {
            let partners = self.active_by_end.get(&edge.start).cloned().unwrap_or_default();
            for other in partners {
                let outcome = extend_edge(&self.edges[other], &edge, cfg);
                let detail = self.edges[other].provenance.rule.clone().unwrap_or_default();
                self.offer(outcome, EventKind::Extend, vec![other, id], detail);
            }
        }
    }

    fn into_report(self, grammar: &Grammar, cfg: &ParserConfig, completed: bool) -> ParseReport {
        let start = cfg.start_category.clone().unwrap_or_else(|| grammar.start.clone());
        let n = self.tokens.len();
        let mut parses: Vec<EdgeId> = self
            .edges_at(0, n, false)
            .iter()
            .copied()
            .filter(|&id| category(&self.edges[id].mother()).is_some_and(|c| c.contains(&start)))
            .collect();
        parses.sort_by(|&a, &b| {
            self.edges[b].activation.total_cmp(&self.edges[a].activation).then(a.cmp(&b))
        });
        ParseReport {
            tokens: self.tokens,
            edges: self.edges,
            chart: self.admitted,
            parses,
            suspended: self.suspended,
            trace: self.trace,
            truncated: !completed,
            steps: self.step,
            config: cfg.clone(),
            start_category: start,
        }
    }
}

/// Everything a parse run produced.
#[derive(Debug, Clone)]
pub struct ParseReport {
    pub tokens: Vec<String>,
    /// Every edge created, indexed by id (chart, suspended and dropped).
    pub edges: Vec<Edge>,
    /// Ids of edges admitted to the chart, in admission order.
    pub chart: Vec<EdgeId>,
    /// Spanning edges of the start category, best first.
    pub parses: Vec<EdgeId>,
    pub suspended: Vec<Suspension>,
    pub trace: Vec<TraceEvent>,
    /// The step limit stopped the run with work left on the agenda.
    pub truncated: bool,
    pub steps: usize,
    pub config: ParserConfig,
    pub start_category: String,
}

impl ParseReport {
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Lexical edges underneath `id`, left to right.
    pub fn lexical_yield(&self, id: EdgeId) -> Vec<EdgeId> {
        let e = &self.edges[id];
        if e.provenance.kind == EdgeKind::Lexical {
            return vec![id];
        }
        e.daughters.iter().flat_map(|&d| self.lexical_yield(d)).collect()
    }

    pub fn tree(&self, id: EdgeId) -> ParseTree {
        let e = &self.edges[id];
        match e.provenance.kind {
            EdgeKind::Lexical => ParseTree::Leaf {
                word: self.tokens[e.start].clone(),
                entry: e.provenance.entry.clone().unwrap_or_default(),
                position: e.start,
            },
            _ => ParseTree::Node {
                rule: e.provenance.rule.clone().unwrap_or_default(),
                category: e.category(),
                start: e.start,
                end: e.end,
                children: e.daughters.iter().map(|&d| self.tree(d)).collect(),
            },
        }
    }
}

/// Parses `tokens` from scratch.
pub fn run_parse(
    tokens: &[&str],
    grammar: &Grammar,
    lexicon: &Lexicon,
    cfg: &ParserConfig,
    lex_activations: Option<&LexActivations>,
) -> Result<ParseReport, ParseError> {
    cfg.validate()?;
    let mut chart = init_chart(tokens, lexicon, lex_activations, cfg)?;
    chart.seed(grammar, cfg);
    let completed = chart.run(grammar, cfg);
    Ok(chart.into_report(grammar, cfg, completed))
}

/// A derivation reconstructed from edge provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ParseTree {
    Leaf { word: String, entry: String, position: usize },
    Node { rule: String, category: String, start: usize, end: usize, children: Vec<ParseTree> },
}

impl ParseTree {
    /// True when any leaf uses `entry`.
    pub fn uses_entry(&self, entry: &str) -> bool {
        match self {
            ParseTree::Leaf { entry: e, .. } => e == entry,
            ParseTree::Node { children, .. } => children.iter().any(|c| c.uses_entry(entry)),
        }
    }

    pub fn uses_rule(&self, rule: &str) -> bool {
        match self {
            ParseTree::Leaf { .. } => false,
            ParseTree::Node { rule: r, children, .. } => r == rule || children.iter().any(|c| c.uses_rule(rule)),
        }
    }
}

/// `(rule child child)` with leaves written as lexical entry ids.
impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Leaf { entry, .. } => f.write_str(entry),
            ParseTree::Node { rule, children, .. } => {
                write!(f, "({rule}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Parse {
    pub edge: EdgeId,
    pub activation: f64,
    pub tree: ParseTree,
    pub fs: FeatureStructure,
}

/// The `n` best spanning analyses (all of them when fewer exist).
pub fn extract_parses(report: &ParseReport, n: usize) -> Vec<Parse> {
    report
        .parses
        .iter()
        .take(n)
        .map(|&id| Parse {
            edge: id,
            activation: report.edges[id].activation,
            tree: report.tree(id),
            fs: report.edges[id].mother(),
        })
        .collect()
}
