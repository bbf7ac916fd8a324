//! Bundled garden-path experiment: word frequency against animacy.
//!
//! `recognized` is ambiguous between a past tense verb (the main-clause
//! reading) and a past participle (the reduced-relative reading). The tag
//! likelihoods favour the past tense, but its subject must be animate, and
//! that constraint carries a high priority. With an inanimate subject the
//! participle reading overtakes; with an animate one both stay alive.

use std::fmt::Write as _;

use serde::Serialize;

use crate::chart::{run_parse, EdgeId, EdgeKind, ParseError, ParseReport, ParserConfig};
use crate::grammar::{Grammar, Lexicon};
use crate::io::{parse_grammar, parse_lexicon, parse_tagprobs, SyntaxError, TagProbFile};

pub const GRAMMAR: &str = include_str!("../assets/demo.gu");
pub const LEXICON: &str = include_str!("../assets/demo.gul");
pub const TAG_PROBS: &str = include_str!("../assets/demo.gup");

pub const VAN: &str = "the van recognized by the spy took off";
pub const MAN: &str = "the man recognized by the spy took off";

/// Token index of the ambiguous verb in both sentences.
pub const VERB_POSITION: usize = 2;
/// Token index just past `by the spy`.
pub const BY_PHRASE_END: usize = 6;

pub const MAIN_CLAUSE_ENTRY: &str = "recognized/vbd";
pub const REDUCED_RELATIVE_ENTRY: &str = "recognized/vbn";
pub const REDUCED_RELATIVE_RULE: &str = "reduced-relative";

pub const UNIFICATION_THRESHOLD: f64 = 0.3;
pub const ACTIVATION_THRESHOLD: f64 = 0.25;
pub const WEIGHTS: [f64; 3] = [0.5, 0.3, 0.2];

pub fn config() -> ParserConfig {
    ParserConfig {
        unification_threshold: UNIFICATION_THRESHOLD,
        activation_threshold: ACTIVATION_THRESHOLD,
        weights: WEIGHTS,
        ..ParserConfig::default()
    }
}

/// The bundled grammar, lexicon and tag likelihoods.
#[derive(Debug, Clone)]
pub struct Assets {
    pub grammar: Grammar,
    pub lexicon: Lexicon,
    pub tag_probs: TagProbFile,
}

pub fn assets() -> Result<Assets, SyntaxError> {
    Ok(Assets {
        grammar: parse_grammar(GRAMMAR)?,
        lexicon: parse_lexicon(LEXICON)?,
        tag_probs: parse_tagprobs(TAG_PROBS)?,
    })
}

/// How one reading of the verb fared.
#[derive(Debug, Clone, Serialize)]
pub struct Reading {
    pub name: &'static str,
    pub entry: &'static str,
    /// Activation the verb's lexical edge started with.
    pub lexical_activation: f64,
    /// Best edge that consumed the verb's lexical edge, if any entered the chart.
    pub incorporation_edge: Option<EdgeId>,
    pub incorporation_activation: Option<f64>,
    /// Some chart edge built on this reading ends after the by-phrase.
    pub survives_by_phrase: bool,
    /// Best spanning parse built on this reading.
    pub best_parse_activation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SentenceOutcome {
    pub sentence: String,
    pub readings: [Reading; 2],
    /// Name of the reading behind the top-ranked parse.
    pub winner: Option<&'static str>,
    pub top_activation: Option<f64>,
    /// Reading that leads right after the verb is incorporated.
    pub leader_at_verb: Option<&'static str>,
    /// Incorporation activation of the leader minus the other reading.
    pub margin_at_verb: Option<f64>,
    #[serde(skip)]
    pub report: ParseReport,
}

fn lexical_edge(report: &ParseReport, entry: &str) -> Option<EdgeId> {
    report.edges.iter().find_map(|e| {
        (e.provenance.kind == EdgeKind::Lexical
            && e.start == VERB_POSITION
            && e.provenance.entry.as_deref() == Some(entry))
        .then_some(e.id)
    })
}

fn reading(report: &ParseReport, name: &'static str, entry: &'static str) -> Reading {
    let lex = lexical_edge(report, entry);
    let lexical_activation = lex.map_or(0.0, |id| report.edges[id].activation);
    let marker = format!("{entry}@{VERB_POSITION}");
    let incorporation_edge = lex.and_then(|lex| {
        report
            .chart
            .iter()
            .copied()
            .filter(|&id| report.edges[id].provenance.parents.get(1) == Some(&lex))
            .max_by(|&a, &b| report.edges[a].activation.total_cmp(&report.edges[b].activation).then(b.cmp(&a)))
    });
    let survives_by_phrase = report.chart.iter().any(|&id| {
        let e = &report.edges[id];
        e.end >= BY_PHRASE_END && e.derivation().contains(&marker)
    });
    let best_parse_activation = report
        .parses
        .iter()
        .find(|&&id| report.tree(id).uses_entry(entry))
        .map(|&id| report.edges[id].activation);
    Reading {
        name,
        entry,
        lexical_activation,
        incorporation_edge,
        incorporation_activation: incorporation_edge.map(|id| report.edges[id].activation),
        survives_by_phrase,
        best_parse_activation,
    }
}

/// Parses one sentence under `cfg` and compares the two readings.
pub fn run_sentence(sentence: &str, assets: &Assets, cfg: &ParserConfig) -> Result<SentenceOutcome, ParseError> {
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    let activations = assets.tag_probs.activations();
    let report = run_parse(&tokens, &assets.grammar, &assets.lexicon, cfg, Some(&activations))?;
    let main = reading(&report, "main-clause", MAIN_CLAUSE_ENTRY);
    let rr = reading(&report, "reduced-relative", REDUCED_RELATIVE_ENTRY);
    let winner = report.parses.first().map(|&id| {
        if report.tree(id).uses_rule(REDUCED_RELATIVE_RULE) {
            rr.name
        } else {
            main.name
        }
    });
    let top_activation = report.parses.first().map(|&id| report.edges[id].activation);
    let (leader_at_verb, margin_at_verb) = match (main.incorporation_activation, rr.incorporation_activation) {
        (Some(m), Some(r)) if r > m => (Some(rr.name), Some(r - m)),
        (Some(m), Some(r)) => (Some(main.name), Some(m - r)),
        (Some(m), None) => (Some(main.name), Some(m)),
        (None, Some(r)) => (Some(rr.name), Some(r)),
        (None, None) => (None, None),
    };
    Ok(SentenceOutcome {
        sentence: sentence.to_string(),
        readings: [main, rr],
        winner,
        top_activation,
        leader_at_verb,
        margin_at_verb,
        report,
    })
}

/// Runs both sentences.
pub fn run(cfg: &ParserConfig) -> Result<Vec<SentenceOutcome>, DemoError> {
    let assets = assets()?;
    [VAN, MAN]
        .iter()
        .map(|s| run_sentence(s, &assets, cfg).map_err(DemoError::from))
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("bundled demo asset: {0}")]
    Asset(#[from] SyntaxError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Plain-text comparison table.
pub fn table(outcomes: &[SentenceOutcome], cfg: &ParserConfig) -> String {
    let mut out = String::new();
    let [w1, w2, w3] = cfg.weights;
    let _ = writeln!(
        out,
        "unification threshold {}  activation threshold {}  weights {w1},{w2},{w3}",
        cfg.unification_threshold, cfg.activation_threshold
    );
    for o in outcomes {
        let _ = writeln!(out, "\n{}", o.sentence);
        let _ = writeln!(out, "  {:<18} {:>8} {:>10} {:>10} {:>10}", "reading", "lexical", "at verb", "by-phrase", "parse");
        for r in &o.readings {
            let _ = writeln!(
                out,
                "  {:<18} {:>8.4} {:>10} {:>10} {:>10}",
                r.name,
                r.lexical_activation,
                opt(r.incorporation_activation),
                if r.survives_by_phrase { "alive" } else { "dead" },
                opt(r.best_parse_activation),
            );
        }
        let _ = writeln!(
            out,
            "  leader at verb: {} (margin {})",
            o.leader_at_verb.unwrap_or("none"),
            opt(o.margin_at_verb)
        );
        let _ = writeln!(out, "  winner: {} (activation {})", o.winner.unwrap_or("none"), opt(o.top_activation));
    }
    out
}
