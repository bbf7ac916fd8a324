//! Grammar (`.gu`), lexicon (`.gul`) and tag-likelihood (`.gup`) files.
//!
//! Grammar:
//!
//! ```text
//! % comments run from `%` to the end of the line
//! :start s
//! :rule s-np-vp
//!   s -> #1 np vp[SUBJ: #1]
//! :rule vp -> vbd np          % id defaults to rule-<n>
//! ```
//!
//! Lexicon, one entry per line: `van n[ANIMATE: {-}]` or
//! `van [CAT: {n}, ANIMATE: {-}]`.
//!
//! Tag likelihoods, one record per line: `2 recognized/vbd 0.7`.

use std::collections::BTreeMap;

use crate::grammar::{Grammar, Lexicon, Rule};
use crate::io::syntax::{Assembler, Cursor};
use crate::io::{Location, SyntaxError};

fn location_of(text: &str, offset: usize) -> Location {
    Cursor::new(text).location(offset)
}

fn err(text: &str, offset: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError { location: location_of(text, offset), message: message.into() }
}

/// Byte offset and contents of each line.
fn lines_with_offsets(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split_inclusive('\n').map(move |line| {
        let start = offset;
        offset += line.len();
        (start, line.trim_end_matches(['\n', '\r']))
    })
}

fn strip_comment(line: &str) -> &str {
    line.split('%').next().unwrap_or("")
}

pub fn parse_grammar(text: &str) -> Result<Grammar, SyntaxError> {
    // (directive, args offset, block end)
    let mut directives: Vec<(String, usize, usize)> = Vec::new();
    for (offset, line) in lines_with_offsets(text) {
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix(':') {
            let name: String = rest.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
            if let Some(last) = directives.last_mut() {
                last.2 = offset;
            }
            directives.push((name.clone(), offset + indent + 1 + name.len(), text.len()));
        } else if directives.is_empty() && !strip_comment(line).trim().is_empty() {
            return Err(err(text, offset + indent, "expected a `:start` or `:rule` directive"));
        }
    }

    let mut start: Option<String> = None;
    let mut rules: Vec<Rule> = Vec::new();
    for (name, args, end) in directives {
        let block = &text[args..end];
        match name.as_str() {
            "start" => {
                if start.is_some() {
                    return Err(err(text, args, "second `:start` directive"));
                }
                let mut cursor = Cursor::with_base(block, location_of(text, args));
                let sym = cursor.ident()?;
                if !cursor.at_end() {
                    return Err(cursor.error(cursor.pos(), "unexpected text after start category"));
                }
                start = Some(sym);
            }
            "rule" => {
                let first_line = strip_comment(block.lines().next().unwrap_or(""));
                let (id, body_offset) = if first_line.contains("->") || first_line.trim().is_empty() {
                    (format!("rule-{}", rules.len() + 1), args)
                } else {
                    let mut c = Cursor::with_base(first_line, location_of(text, args));
                    let id = c.ident()?;
                    if !c.at_end() {
                        return Err(c.error(c.pos(), "a rule id must be a single name"));
                    }
                    (id, args + block.lines().next().map_or(0, |l| l.len()))
                };
                if rules.iter().any(|r| r.id == id) {
                    return Err(err(text, args, format!("duplicate rule id `{id}`")));
                }
                let body_text = &text[body_offset..end];
                rules.push(parse_rule(id, body_text, location_of(text, body_offset))?);
            }
            other => return Err(err(text, args - other.len() - 1, format!("unknown directive `:{other}`"))),
        }
    }
    let start = start.ok_or_else(|| err(text, text.len(), "missing `:start` directive"))?;
    Grammar::new(start, rules).map_err(|e| err(text, 0, e.to_string()))
}

fn parse_rule(id: String, text: &str, base: Location) -> Result<Rule, SyntaxError> {
    let mut cursor = Cursor::with_base(text, base);
    let at = {
        cursor.skip_ws();
        cursor.pos()
    };
    let mut values = vec![cursor.constituent()?];
    if !cursor.eat_str("->") {
        return Err(cursor.error(cursor.pos(), format!("expected `->` in rule `{id}`")));
    }
    while !cursor.at_end() {
        values.push(cursor.constituent()?);
    }
    if values.len() < 2 {
        return Err(cursor.error(cursor.pos(), format!("rule `{id}` has no daughters")));
    }
    let mut asm = Assembler::new(&cursor, &values)?;
    let roots = values.iter().map(|v| asm.build(v)).collect::<Result<Vec<_>, _>>()?;
    let body = asm.finish(&roots, at)?;
    Rule::new(id, body).map_err(|e| cursor.error(at, e.to_string()))
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon, SyntaxError> {
    let mut lexicon = Lexicon::new();
    for (offset, line) in lines_with_offsets(text) {
        let content = strip_comment(line);
        if content.trim().is_empty() {
            continue;
        }
        let mut cursor = Cursor::with_base(content, location_of(text, offset));
        let word_at = {
            cursor.skip_ws();
            cursor.pos()
        };
        let word: String = content[word_at..].chars().take_while(|c| !c.is_whitespace()).collect();
        let rest_at = word_at + word.len();
        let mut cursor = Cursor::with_base(&content[rest_at..], location_of(text, offset + rest_at));
        if cursor.at_end() {
            return Err(cursor.error(0, format!("entry for `{word}` has no description")));
        }
        let value = cursor.constituent()?;
        if !cursor.at_end() {
            return Err(cursor.error(cursor.pos(), "unexpected text after entry"));
        }
        let mut asm = Assembler::new(&cursor, std::slice::from_ref(&value))?;
        let root = asm.build(&value)?;
        let fs = asm.finish(&[root], 0)?.get(0);
        lexicon.add(word, fs).map_err(|e| err(text, offset + word_at, e.to_string()))?;
    }
    Ok(lexicon)
}

/// One tag-likelihood record.
#[derive(Debug, Clone, PartialEq)]
pub struct TagProb {
    pub token: usize,
    pub entry: String,
    pub likelihood: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TagProbFile {
    pub records: Vec<TagProb>,
}

impl TagProbFile {
    /// Initial lexical activations keyed by `(token index, entry id)`.
    pub fn activations(&self) -> BTreeMap<(usize, String), f64> {
        self.records.iter().map(|r| ((r.token, r.entry.clone()), r.likelihood)).collect()
    }
}

pub fn parse_tagprobs(text: &str) -> Result<TagProbFile, SyntaxError> {
    let mut records: Vec<TagProb> = Vec::new();
    for (offset, line) in lines_with_offsets(text) {
        let content = strip_comment(line);
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let at = offset + content.len() - content.trim_start().len();
        let [token, entry, likelihood] = fields[..] else {
            return Err(err(text, at, "expected `<token index> <entry id> <likelihood>`"));
        };
        let token: usize = token.parse().map_err(|_| err(text, at, format!("bad token index `{token}`")))?;
        let likelihood: f64 = likelihood
            .parse()
            .map_err(|_| err(text, at, format!("bad likelihood `{likelihood}`")))?;
        if !(0.0..=1.0).contains(&likelihood) {
            return Err(err(text, at, format!("likelihood {likelihood} is outside [0, 1]")));
        }
        if records.iter().any(|r| r.token == token && r.entry == entry) {
            return Err(err(text, at, format!("duplicate record for token {token} entry `{entry}`")));
        }
        records.push(TagProb { token, entry: entry.to_string(), likelihood });
    }
    Ok(TagProbFile { records })
}
