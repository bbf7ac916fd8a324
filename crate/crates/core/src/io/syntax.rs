//! Textual AVM syntax.
//!
//! ```text
//! [SUBJ: #1 [NUM: {sg}!2.0], AGR: #1, CASE: {nom:0.7, acc:0.3}]
//! ```
//!
//! `[...]` is a complex node, `{...}` an atom (`{sg}` is `{sg:1.0}`), `!p`
//! after an atomic value sets its priority and `#n` declares or references a
//! shared node. Commas between features are optional.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::atom::{format_number, Atom};
use crate::avm::{FeatureStructure, FsBuilder, FsList, Node, NodeId, DEFAULT_PRIORITY};
use crate::grammar::CAT;
use crate::io::{Location, SyntaxError};

#[derive(Debug, Clone)]
pub(crate) struct Value {
    tag: Option<u32>,
    body: Option<Body>,
    at: usize,
}

#[derive(Debug, Clone)]
enum Body {
    Complex(Vec<Feature>),
    Atom(Vec<(String, f64)>),
}

#[derive(Debug, Clone)]
struct Feature {
    name: String,
    value: Value,
    priority: Option<f64>,
    at: usize,
}

/// Character-level recursive descent over one source text.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    /// Offset of `src` inside the whole file, for error locations.
    base: Location,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '_')
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Cursor<'a> {
        Cursor { src, pos: 0, base: Location { line: 1, column: 1 } }
    }

    pub fn with_base(src: &'a str, base: Location) -> Cursor<'a> {
        Cursor { src, pos: 0, base }
    }

    pub fn location(&self, at: usize) -> Location {
        let before = &self.src[..at.min(self.src.len())];
        let newlines = before.matches('\n').count();
        if newlines == 0 {
            Location { line: self.base.line, column: self.base.column + before.chars().count() }
        } else {
            let last = before.rsplit('\n').next().unwrap_or("");
            Location { line: self.base.line + newlines, column: last.chars().count() + 1 }
        }
    }

    pub fn error(&self, at: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError { location: self.location(at), message: message.into() }
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == '%' {
                // comment to end of line
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
            } else {
                break;
            }
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(self.pos, format!("expected `{c}`{}", self.found())))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!(", found `{c}`"),
            None => ", found end of input".to_string(),
        }
    }

    pub fn peek_ident(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_some_and(is_ident_char) && !self.src[self.pos..].starts_with("->")
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !is_ident_char(c) || self.src[self.pos..].starts_with("->") {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error(start, format!("expected a name{}", self.found())));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    pub fn number(&mut self) -> Result<f64, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.error(start, format!("expected a number, found `{text}`")))
    }

    fn tag(&mut self) -> Result<Option<u32>, SyntaxError> {
        if !self.eat('#') {
            return Ok(None);
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map(Some)
            .map_err(|_| self.error(start, "expected a tag number after `#`"))
    }

    fn priority(&mut self) -> Result<Option<f64>, SyntaxError> {
        if self.eat('!') {
            let at = self.pos;
            let p = self.number()?;
            if p <= 0.0 {
                return Err(self.error(at, format!("priority must be positive, got {p}")));
            }
            Ok(Some(p))
        } else {
            Ok(None)
        }
    }

    fn body(&mut self) -> Result<Option<Body>, SyntaxError> {
        self.skip_ws();
        if self.eat('[') {
            let mut features = Vec::new();
            loop {
                if self.eat(']') {
                    break;
                }
                self.skip_ws();
                let at = self.pos;
                let name = self.ident()?;
                self.expect(':')?;
                let value = self.value()?;
                let priority = self.priority()?;
                features.push(Feature { name, value, priority, at });
                self.eat(',');
            }
            Ok(Some(Body::Complex(features)))
        } else if self.eat('{') {
            let mut disjuncts = Vec::new();
            loop {
                let sym = self.ident()?;
                let weight = if self.eat(':') { self.number()? } else { 1.0 };
                disjuncts.push((sym, weight));
                if self.eat('}') {
                    break;
                }
                self.eat(',');
            }
            Ok(Some(Body::Atom(disjuncts)))
        } else {
            Ok(None)
        }
    }

    pub(crate) fn value(&mut self) -> Result<Value, SyntaxError> {
        self.skip_ws();
        let at = self.pos;
        let tag = self.tag()?;
        let body = self.body()?;
        if tag.is_none() && body.is_none() {
            return Err(self.error(self.pos, format!("expected a value{}", self.found())));
        }
        Ok(Value { tag, body, at })
    }

    /// A rule constituent or lexical description: an optional tag, an
    /// optional category symbol, and an optional AVM (at least one of the
    /// last two).
    pub(crate) fn constituent(&mut self) -> Result<Value, SyntaxError> {
        self.skip_ws();
        let at = self.pos;
        let tag = self.tag()?;
        self.skip_ws();
        let cat_at = self.pos;
        let category = if self.peek_ident() { Some(self.ident()?) } else { None };
        let body = self.body()?;
        let body = match (category, body) {
            (None, None) => {
                if tag.is_some() {
                    return Ok(Value { tag, body: None, at });
                }
                return Err(self.error(self.pos, format!("expected a category or an AVM{}", self.found())));
            }
            (None, Some(b)) => b,
            (Some(cat), body) => {
                let mut features = match body {
                    None => Vec::new(),
                    Some(Body::Complex(f)) => f,
                    Some(Body::Atom(_)) => return Err(self.error(cat_at, "a category cannot be followed by an atom")),
                };
                if features.iter().any(|f| f.name == CAT) {
                    return Err(self.error(cat_at, format!("category `{cat}` given twice (symbol and {CAT} feature)")));
                }
                let cat_value = Value { tag: None, body: Some(Body::Atom(vec![(cat, 1.0)])), at: cat_at };
                features.insert(0, Feature { name: CAT.to_string(), value: cat_value, priority: None, at: cat_at });
                Body::Complex(features)
            }
        };
        Ok(Value { tag, body: Some(body), at })
    }
}

/// Turns parsed values into one arena, resolving tags across all of them.
pub(crate) struct Assembler<'c, 'a> {
    cursor: &'c Cursor<'a>,
    defs: HashMap<u32, Value>,
    built: HashMap<u32, NodeId>,
    building: Vec<u32>,
    builder: FsBuilder,
}

impl<'c, 'a> Assembler<'c, 'a> {
    pub fn new(cursor: &'c Cursor<'a>, values: &[Value]) -> Result<Self, SyntaxError> {
        let mut defs = HashMap::new();
        fn collect(v: &Value, cursor: &Cursor, defs: &mut HashMap<u32, Value>) -> Result<(), SyntaxError> {
            if let (Some(t), Some(_)) = (v.tag, &v.body) {
                if defs.insert(t, v.clone()).is_some() {
                    return Err(cursor.error(v.at, format!("tag #{t} has two definitions")));
                }
            }
            if let Some(Body::Complex(fs)) = &v.body {
                for f in fs {
                    collect(&f.value, cursor, defs)?;
                }
            }
            Ok(())
        }
        for v in values {
            collect(v, cursor, &mut defs)?;
        }
        Ok(Assembler { cursor, defs, built: HashMap::new(), building: Vec::new(), builder: FsBuilder::new() })
    }

    pub fn build(&mut self, v: &Value) -> Result<NodeId, SyntaxError> {
        match v.tag {
            Some(t) => {
                if let Some(&id) = self.built.get(&t) {
                    return Ok(id);
                }
                if self.building.contains(&t) {
                    return Err(self.cursor.error(v.at, format!("tag #{t} makes the structure cyclic")));
                }
                let def = self.defs.get(&t).cloned();
                let id = match def.as_ref().and_then(|d| d.body.as_ref()) {
                    None => self.builder.complex(),
                    Some(body) => {
                        self.building.push(t);
                        let id = self.build_body(body, def.as_ref().unwrap().at)?;
                        self.building.pop();
                        id
                    }
                };
                self.built.insert(t, id);
                Ok(id)
            }
            None => self.build_body(v.body.as_ref().expect("untagged value has a body"), v.at),
        }
    }

    fn build_body(&mut self, body: &Body, at: usize) -> Result<NodeId, SyntaxError> {
        match body {
            Body::Atom(pairs) => {
                let atom = Atom::new(pairs.iter().cloned()).map_err(|e| self.cursor.error(at, e.to_string()))?;
                Ok(self.builder.atom(atom))
            }
            Body::Complex(features) => {
                let id = self.builder.complex();
                for f in features {
                    let child = self.build(&f.value)?;
                    self.builder
                        .link(id, f.name.clone(), child, f.priority)
                        .map_err(|e| self.cursor.error(f.at, e.to_string()))?;
                }
                Ok(id)
            }
        }
    }

    pub fn finish(self, roots: &[NodeId], at: usize) -> Result<FsList, SyntaxError> {
        let cursor = self.cursor;
        self.builder.build_list(roots).map_err(|e| cursor.error(at, e.to_string()))
    }
}

/// Parses one structure.
pub fn parse_fs(text: &str) -> Result<FeatureStructure, SyntaxError> {
    let list = parse_values(text, false)?;
    if list.len() != 1 {
        return Err(SyntaxError { location: Location { line: 1, column: 1 }, message: format!("expected one structure, found {}", list.len()) });
    }
    Ok(list.get(0))
}

/// Parses a whitespace-separated sequence of structures whose tags share one
/// scope.
pub fn parse_fs_list(text: &str) -> Result<FsList, SyntaxError> {
    parse_values(text, false)
}

fn parse_values(text: &str, constituents: bool) -> Result<FsList, SyntaxError> {
    let mut cursor = Cursor::new(text);
    let mut values = Vec::new();
    while !cursor.at_end() {
        values.push(if constituents { cursor.constituent()? } else { cursor.value()? });
    }
    if values.is_empty() {
        return Err(cursor.error(0, "expected a structure"));
    }
    let mut asm = Assembler::new(&cursor, &values)?;
    let roots = values.iter().map(|v| asm.build(v)).collect::<Result<Vec<_>, _>>()?;
    asm.finish(&roots, 0)
}

impl FromStr for FeatureStructure {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fs(s)
    }
}

// ---------------------------------------------------------------------------
// Rendering

struct Renderer<'n> {
    nodes: &'n [Node],
    shared: Vec<bool>,
    tags: BTreeMap<NodeId, usize>,
    out: String,
}

impl<'n> Renderer<'n> {
    fn new(nodes: &'n [Node], roots: &[NodeId]) -> Renderer<'n> {
        let mut refs = vec![0usize; nodes.len()];
        let mut seen = vec![false; nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        for &r in roots {
            refs[r] += 1;
        }
        while let Some(id) = stack.pop() {
            if seen[id] {
                continue;
            }
            seen[id] = true;
            if let Node::Complex(m) = &nodes[id] {
                for l in m.values() {
                    refs[l.target] += 1;
                    stack.push(l.target);
                }
            }
        }
        Renderer { nodes, shared: refs.iter().map(|&r| r > 1).collect(), tags: BTreeMap::new(), out: String::new() }
    }

    fn node(&mut self, id: NodeId) {
        if self.shared[id] {
            if let Some(t) = self.tags.get(&id) {
                let _ = write!(self.out, "#{t}");
                return;
            }
            let t = self.tags.len() + 1;
            self.tags.insert(id, t);
            let _ = write!(self.out, "#{t} ");
        }
        match &self.nodes[id] {
            Node::Atom(a) => {
                let _ = write!(self.out, "{a}");
            }
            Node::Complex(m) => {
                self.out.push('[');
                for (i, (f, l)) in m.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    let _ = write!(self.out, "{f}: ");
                    self.node(l.target);
                    let show = match &self.nodes[l.target] {
                        Node::Atom(_) => l.priority.filter(|p| (p - DEFAULT_PRIORITY).abs() > 0.0),
                        n if n.is_unconstrained() => l.priority,
                        _ => None,
                    };
                    if let Some(p) = show {
                        let _ = write!(self.out, "!{}", format_number(p));
                    }
                }
                self.out.push(']');
            }
        }
    }
}

/// Renders a structure in the syntax accepted by [`parse_fs`].
pub fn render_fs(fs: &FeatureStructure) -> String {
    let mut r = Renderer::new(fs.nodes(), &[fs.root()]);
    r.node(fs.root());
    r.out
}

/// Renders every member, tags shared across members.
pub fn render_fs_list(list: &FsList) -> String {
    let mut r = Renderer::new(list.nodes(), list.roots());
    for (i, &root) in list.roots().iter().enumerate() {
        if i > 0 {
            r.out.push(' ');
        }
        r.node(root);
    }
    r.out
}

impl std::fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_fs(self))
    }
}
