//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the library's unifier or parser: structures are
//! described by a small tree type `G` with its own reader and writer, and the
//! reference algorithms work on that type or on a pointer-based graph.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Structure descriptions

/// A feature structure description. Priorities sit on the feature link.
#[derive(Debug, Clone, PartialEq)]
pub enum G {
    Atom(Vec<(String, f64)>),
    Complex(Vec<(String, G, Option<f64>)>),
    Tagged(u32, Box<G>),
    Ref(u32),
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

impl G {
    pub fn atom(sym: &str) -> G {
        G::Atom(vec![(sym.to_string(), 1.0)])
    }

    pub fn render(&self) -> String {
        match self {
            G::Atom(ws) => {
                let parts: Vec<String> = ws.iter().map(|(s, w)| format!("{s}:{}", fmt_num(*w))).collect();
                format!("{{{}}}", parts.join(", "))
            }
            G::Complex(fs) => {
                let parts: Vec<String> = fs
                    .iter()
                    .map(|(f, v, p)| match p {
                        Some(p) => format!("{f}: {}!{}", v.render(), fmt_num(*p)),
                        None => format!("{f}: {}", v.render()),
                    })
                    .collect();
                format!("[{}]", parts.join(", "))
            }
            G::Tagged(n, inner) => format!("#{n} {}", inner.render()),
            G::Ref(n) => format!("#{n}"),
        }
    }

    fn collect_tags<'a>(&'a self, out: &mut HashMap<u32, &'a G>) {
        match self {
            G::Tagged(n, inner) => {
                out.insert(*n, inner);
                inner.collect_tags(out);
            }
            G::Complex(fs) => fs.iter().for_each(|(_, v, _)| v.collect_tags(out)),
            _ => {}
        }
    }

    /// The tree obtained by copying every shared node at each use.
    pub fn expand(&self) -> G {
        let mut tags = HashMap::new();
        self.collect_tags(&mut tags);
        self.expand_with(&tags)
    }

    fn expand_with(&self, tags: &HashMap<u32, &G>) -> G {
        match self {
            G::Atom(_) => self.clone(),
            G::Complex(fs) => G::Complex(fs.iter().map(|(f, v, p)| (f.clone(), v.expand_with(tags), *p)).collect()),
            G::Tagged(_, inner) => inner.expand_with(tags),
            G::Ref(n) => tags.get(n).map_or(G::Complex(vec![]), |g| g.expand_with(tags)),
        }
    }

    pub fn uses_refs(&self) -> bool {
        match self {
            G::Ref(_) => true,
            G::Tagged(_, inner) => inner.uses_refs(),
            G::Complex(fs) => fs.iter().any(|(_, v, _)| v.uses_refs()),
            G::Atom(_) => false,
        }
    }

    /// Value of the `CAT` feature, if it is a plain atom.
    pub fn cat(&self) -> Option<String> {
        match self {
            G::Complex(fs) => fs.iter().find(|(f, _, _)| f == "CAT").and_then(|(_, v, _)| match v {
                G::Atom(ws) => ws.iter().max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0))).map(|w| w.0.clone()),
                _ => None,
            }),
            G::Tagged(_, inner) => inner.cat(),
            _ => None,
        }
    }
}

/// Minimal reader for the same notation, written independently of the library.
pub struct Reader<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Reader<'a> {
    pub fn new(s: &'a str) -> Reader<'a> {
        Reader { s: s.as_bytes(), i: 0 }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && (self.s[self.i] as char).is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expect(&mut self, c: u8) {
        assert_eq!(self.peek(), Some(c), "oracle reader expected `{}` at {}", c as char, self.i);
        self.i += 1;
    }

    pub fn eat_arrow(&mut self) -> bool {
        self.ws();
        if self.s[self.i..].starts_with(b"->") {
            self.i += 2;
            true
        } else {
            false
        }
    }

    pub fn done(&mut self) -> bool {
        self.peek().is_none()
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() {
            let c = self.s[self.i] as char;
            if c.is_ascii_alphanumeric() || c == '_' || c == '+' || (c == '-' && self.s.get(self.i + 1) != Some(&b'>')) {
                self.i += 1;
            } else {
                break;
            }
        }
        assert!(self.i > start, "oracle reader expected a name at {}", start);
        String::from_utf8(self.s[start..self.i].to_vec()).unwrap()
    }

    fn num(&mut self) -> f64 {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b".eE-+".contains(&self.s[self.i])) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().unwrap()
    }

    pub fn value(&mut self) -> G {
        match self.peek() {
            Some(b'#') => {
                self.i += 1;
                let n = self.num() as u32;
                match self.peek() {
                    Some(b'[') | Some(b'{') => G::Tagged(n, Box::new(self.value())),
                    _ => G::Ref(n),
                }
            }
            Some(b'[') => {
                self.i += 1;
                let mut fs = Vec::new();
                while self.peek() != Some(b']') {
                    let f = self.word();
                    self.expect(b':');
                    let v = self.value();
                    let p = if self.peek() == Some(b'!') {
                        self.i += 1;
                        Some(self.num())
                    } else {
                        None
                    };
                    fs.push((f, v, p));
                    if self.peek() == Some(b',') {
                        self.i += 1;
                    }
                }
                self.i += 1;
                G::Complex(fs)
            }
            Some(b'{') => {
                self.i += 1;
                let mut ws = Vec::new();
                while self.peek() != Some(b'}') {
                    let s = self.word();
                    let w = if self.peek() == Some(b':') {
                        self.i += 1;
                        self.num()
                    } else {
                        1.0
                    };
                    ws.push((s, w));
                    if self.peek() == Some(b',') {
                        self.i += 1;
                    }
                }
                self.i += 1;
                G::Atom(ws)
            }
            other => panic!("oracle reader: unexpected {:?}", other.map(|c| c as char)),
        }
    }
}

pub fn read(s: &str) -> G {
    let mut r = Reader::new(s);
    let g = r.value();
    assert!(r.done());
    g
}

// ---------------------------------------------------------------------------
// Flattening and the compatibility sums

pub type Dist = BTreeMap<String, f64>;

pub fn normalize(ws: &[(String, f64)]) -> Dist {
    let mut d = Dist::new();
    for (s, w) in ws {
        *d.entry(s.clone()).or_insert(0.0) += w;
    }
    let total: f64 = d.values().sum();
    d.retain(|_, w| *w > 0.0);
    d.values_mut().for_each(|w| *w /= total);
    d
}

/// Atomic leaves by path, plus the paths of non-empty complex nodes.
#[derive(Debug, Clone, Default)]
pub struct Flat {
    pub atoms: BTreeMap<Vec<String>, (Dist, f64)>,
    pub complex: BTreeSet<Vec<String>>,
}

pub fn flatten(g: &G) -> Flat {
    fn go(g: &G, path: &mut Vec<String>, prio: f64, out: &mut Flat) {
        match g {
            G::Atom(ws) => {
                out.atoms.insert(path.clone(), (normalize(ws), prio));
            }
            G::Complex(fs) => {
                if !fs.is_empty() {
                    out.complex.insert(path.clone());
                }
                for (f, v, p) in fs {
                    path.push(f.clone());
                    go(v, path, p.unwrap_or(1.0), out);
                    path.pop();
                }
            }
            G::Tagged(..) | G::Ref(_) => unreachable!("flatten expects an expanded tree"),
        }
    }
    let mut out = Flat::default();
    go(&g.expand(), &mut Vec::new(), 1.0, &mut out);
    out
}

pub fn min_sum(a: &Dist, b: &Dist) -> f64 {
    a.iter().map(|(s, w)| w.min(b.get(s).copied().unwrap_or(0.0))).sum()
}

pub fn average(a: &Dist, b: &Dist) -> Dist {
    let mut out = Dist::new();
    for s in a.keys().chain(b.keys()) {
        let w = (a.get(s).copied().unwrap_or(0.0) + b.get(s).copied().unwrap_or(0.0)) / 2.0;
        if w > 0.0 {
            out.insert(s.clone(), w);
        }
    }
    out
}

/// One term per atomic path: (weight, score). `None` on a structural clash.
pub fn terms(a: &Flat, b: &Flat) -> Option<Vec<(Vec<String>, f64, f64, bool)>> {
    let blocked = |p: &Vec<String>, other: &Flat| {
        other.complex.contains(p) || (0..p.len()).any(|k| other.atoms.contains_key(&p[..k].to_vec()))
    };
    let mut out = Vec::new();
    for (p, (da, pa)) in &a.atoms {
        match b.atoms.get(p) {
            Some((db, pb)) => out.push((p.clone(), (pa + pb) / 2.0, min_sum(da, db), true)),
            None if blocked(p, b) => return None,
            None => out.push((p.clone(), *pa, 1.0, false)),
        }
    }
    for (p, (_, pb)) in &b.atoms {
        if a.atoms.contains_key(p) {
            continue;
        }
        if blocked(p, a) {
            return None;
        }
        out.push((p.clone(), *pb, 1.0, false));
    }
    Some(out)
}

/// Priority-weighted mean of per-path scores; `None` on a clash.
pub fn oracle_strength(a: &G, b: &G) -> Option<f64> {
    let t = terms(&flatten(a), &flatten(b))?;
    let total: f64 = t.iter().map(|x| x.1).sum();
    if total == 0.0 {
        return Some(1.0);
    }
    Some(t.iter().map(|x| x.1 * x.2).sum::<f64>() / total)
}

// ---------------------------------------------------------------------------
// Random structures

#[derive(Debug, Clone)]
pub struct GenOpts {
    pub max_depth: usize,
    pub max_features: usize,
    pub max_disjuncts: usize,
    pub features: &'static [&'static str],
    pub symbols: &'static [&'static str],
    pub singletons: bool,
    pub priorities: bool,
    pub sharing: bool,
    pub empty_prob: f64,
}

impl Default for GenOpts {
    fn default() -> Self {
        GenOpts {
            max_depth: 3,
            max_features: 5,
            max_disjuncts: 4,
            features: &["A", "B", "C", "D", "E"],
            symbols: &["a", "b", "c", "d", "e"],
            singletons: false,
            priorities: true,
            sharing: false,
            empty_prob: 0.05,
        }
    }
}

impl GenOpts {
    pub fn classical() -> GenOpts {
        GenOpts {
            max_depth: 3,
            max_features: 4,
            symbols: &["a", "b"],
            features: &["A", "B", "C", "D"],
            singletons: true,
            priorities: false,
            ..GenOpts::default()
        }
    }
}

pub fn gen_atom(rng: &mut ChaCha8Rng, o: &GenOpts) -> G {
    if o.singletons {
        return G::atom(o.symbols.choose(rng).unwrap());
    }
    let k = rng.gen_range(1..=o.max_disjuncts.min(o.symbols.len()));
    let mut syms: Vec<&str> = o.symbols.to_vec();
    syms.shuffle(rng);
    G::Atom(syms[..k].iter().map(|s| (s.to_string(), rng.gen_range(1..=10) as f64 / 10.0)).collect())
}

fn gen_priority(rng: &mut ChaCha8Rng, o: &GenOpts) -> Option<f64> {
    if !o.priorities || rng.gen_bool(0.4) {
        None
    } else {
        Some([0.5, 1.0, 1.5, 2.0, 3.0][rng.gen_range(0..5)])
    }
}

/// A complex root with up to `max_depth` levels of features.
pub fn gen_fs(rng: &mut ChaCha8Rng, o: &GenOpts) -> G {
    let mut st = GenState { next_tag: 1, done: Vec::new() };
    gen_complex(rng, o, 1, &mut st)
}

struct GenState {
    next_tag: u32,
    /// Finished tagged nodes: (tag, is atom).
    done: Vec<(u32, bool)>,
}

fn gen_complex(rng: &mut ChaCha8Rng, o: &GenOpts, depth: usize, st: &mut GenState) -> G {
    let n = rng.gen_range(0..=o.max_features.min(o.features.len()));
    let mut feats: Vec<&str> = o.features.to_vec();
    feats.shuffle(rng);
    let mut out = Vec::new();
    for f in &feats[..n] {
        if o.sharing && !st.done.is_empty() && rng.gen_bool(0.2) {
            let (tag, is_atom) = *st.done.choose(rng).unwrap();
            let p = if is_atom { gen_priority(rng, o) } else { None };
            out.push((f.to_string(), G::Ref(tag), p));
            continue;
        }
        let (v, is_atom) = if depth >= o.max_depth || rng.gen_bool(0.55) {
            (gen_atom(rng, o), true)
        } else if rng.gen_bool(o.empty_prob) {
            (G::Complex(vec![]), false)
        } else {
            (gen_complex(rng, o, depth + 1, st), false)
        };
        let p = if is_atom { gen_priority(rng, o) } else { None };
        let v = if o.sharing && rng.gen_bool(0.3) {
            let tag = st.next_tag;
            st.next_tag += 1;
            st.done.push((tag, is_atom));
            G::Tagged(tag, Box::new(v))
        } else {
            v
        };
        out.push((f.to_string(), v, p));
    }
    G::Complex(out)
}

/// Two structures drawn over one feature geometry, so they never clash
/// structurally and tend to share paths.
pub fn gen_aligned_pair(rng: &mut ChaCha8Rng, o: &GenOpts) -> (G, G) {
    let skeleton = gen_fs(rng, &GenOpts { sharing: false, empty_prob: 0.0, ..o.clone() });
    fn restrict(rng: &mut ChaCha8Rng, o: &GenOpts, g: &G) -> G {
        match g {
            G::Complex(fs) => {
                let mut out = Vec::new();
                for (f, v, _) in fs {
                    if !rng.gen_bool(0.75) {
                        continue;
                    }
                    out.push(match v {
                        G::Atom(_) => (f.clone(), gen_atom(rng, o), gen_priority(rng, o)),
                        _ => (f.clone(), restrict(rng, o, v), None),
                    });
                }
                G::Complex(out)
            }
            other => other.clone(),
        }
    }
    (restrict(rng, o, &skeleton), restrict(rng, o, &skeleton))
}

/// Scales the priority of `path` in `g` (a tree) by `factor`.
pub fn scale_priority(g: &G, path: &[String], factor: f64) -> G {
    match g {
        G::Complex(fs) => G::Complex(
            fs.iter()
                .map(|(f, v, p)| {
                    if path.len() == 1 && &path[0] == f {
                        (f.clone(), v.clone(), Some(p.unwrap_or(1.0) * factor))
                    } else if !path.is_empty() && &path[0] == f {
                        (f.clone(), scale_priority(v, &path[1..], factor), *p)
                    } else {
                        (f.clone(), v.clone(), *p)
                    }
                })
                .collect(),
        ),
        other => other.clone(),
    }
}

// ---------------------------------------------------------------------------
// Textbook destructive unification over a pointer graph

pub mod classical {
    use super::*;

    pub type CRef = Rc<RefCell<CNode>>;

    #[derive(Debug)]
    pub enum CNode {
        Atom(String),
        Complex(BTreeMap<String, CRef>),
        Fwd(CRef),
    }

    fn new(n: CNode) -> CRef {
        Rc::new(RefCell::new(n))
    }

    pub fn deref(r: &CRef) -> CRef {
        let mut cur = r.clone();
        loop {
            let next = match &*cur.borrow() {
                CNode::Fwd(t) => t.clone(),
                _ => break,
            };
            cur = next;
        }
        cur
    }

    /// Builds a graph from descriptions that share one tag namespace.
    pub fn build(gs: &[G]) -> Vec<CRef> {
        let mut tags: HashMap<u32, CRef> = HashMap::new();
        gs.iter().map(|g| build_one(g, &mut tags)).collect()
    }

    fn build_one(g: &G, tags: &mut HashMap<u32, CRef>) -> CRef {
        match g {
            G::Atom(ws) => {
                assert_eq!(ws.len(), 1, "classical structures use single symbols");
                new(CNode::Atom(ws[0].0.clone()))
            }
            G::Complex(fs) => {
                let mut m = BTreeMap::new();
                for (f, v, _) in fs {
                    let child = build_one(v, tags);
                    m.insert(f.clone(), child);
                }
                new(CNode::Complex(m))
            }
            G::Tagged(n, inner) => {
                let node = build_one(inner, tags);
                if let Some(existing) = tags.get(n) {
                    assert!(unify(existing, &node));
                    existing.clone()
                } else {
                    tags.insert(*n, node.clone());
                    node
                }
            }
            G::Ref(n) => tags.entry(*n).or_insert_with(|| new(CNode::Complex(BTreeMap::new()))).clone(),
        }
    }

    enum Kind {
        Empty,
        Atom(String),
        Complex(Vec<(String, CRef)>),
    }

    fn kind(r: &CRef) -> Kind {
        match &*r.borrow() {
            CNode::Atom(s) => Kind::Atom(s.clone()),
            CNode::Complex(m) if m.is_empty() => Kind::Empty,
            CNode::Complex(m) => Kind::Complex(m.iter().map(|(f, v)| (f.clone(), v.clone())).collect()),
            CNode::Fwd(_) => unreachable!(),
        }
    }

    /// Destructive unification; on failure the graph is garbage.
    pub fn unify(a: &CRef, b: &CRef) -> bool {
        let (a, b) = (deref(a), deref(b));
        if Rc::ptr_eq(&a, &b) {
            return true;
        }
        match (kind(&a), kind(&b)) {
            (Kind::Empty, _) => {
                *a.borrow_mut() = CNode::Fwd(b);
                true
            }
            (_, Kind::Empty) => {
                *b.borrow_mut() = CNode::Fwd(a);
                true
            }
            (Kind::Atom(x), Kind::Atom(y)) => {
                if x == y {
                    *a.borrow_mut() = CNode::Fwd(b);
                }
                x == y
            }
            (Kind::Complex(fa), Kind::Complex(_)) => {
                *a.borrow_mut() = CNode::Fwd(b.clone());
                for (f, va) in fa {
                    let target = deref(&b);
                    let existing = match &*target.borrow() {
                        CNode::Complex(m) => m.get(&f).cloned(),
                        _ => return false,
                    };
                    match existing {
                        Some(vb) => {
                            if !unify(&va, &vb) {
                                return false;
                            }
                        }
                        None => {
                            if let CNode::Complex(m) = &mut *target.borrow_mut() {
                                m.insert(f, va);
                            }
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }

    pub fn is_cyclic(r: &CRef) -> bool {
        fn go(r: &CRef, stack: &mut HashSet<*const RefCell<CNode>>, done: &mut HashSet<*const RefCell<CNode>>) -> bool {
            let r = deref(r);
            let key = Rc::as_ptr(&r);
            if stack.contains(&key) {
                return true;
            }
            if done.contains(&key) {
                return false;
            }
            stack.insert(key);
            let kids: Vec<CRef> = match &*r.borrow() {
                CNode::Complex(m) => m.values().cloned().collect(),
                _ => Vec::new(),
            };
            for k in kids {
                if go(&k, stack, done) {
                    return true;
                }
            }
            stack.remove(&key);
            done.insert(key);
            false
        }
        go(r, &mut HashSet::new(), &mut HashSet::new())
    }

    /// Notation with `#n` tags on nodes reached more than once.
    pub fn render(r: &CRef) -> String {
        fn count(r: &CRef, seen: &mut HashMap<*const RefCell<CNode>, usize>) {
            let r = deref(r);
            let c = seen.entry(Rc::as_ptr(&r)).or_insert(0);
            *c += 1;
            if *c > 1 {
                return;
            }
            let kids: Vec<CRef> = match &*r.borrow() {
                CNode::Complex(m) => m.values().cloned().collect(),
                _ => Vec::new(),
            };
            kids.iter().for_each(|k| count(k, seen));
        }
        fn go(
            r: &CRef,
            seen: &HashMap<*const RefCell<CNode>, usize>,
            tags: &mut HashMap<*const RefCell<CNode>, usize>,
            out: &mut String,
        ) {
            let r = deref(r);
            let key = Rc::as_ptr(&r);
            if let Some(t) = tags.get(&key) {
                out.push_str(&format!("#{t}"));
                return;
            }
            if seen[&key] > 1 {
                let t = tags.len() + 1;
                tags.insert(key, t);
                out.push_str(&format!("#{t} "));
            }
            let node = r.borrow();
            match &*node {
                CNode::Atom(s) => out.push_str(&format!("{{{s}}}")),
                CNode::Complex(m) => {
                    out.push('[');
                    for (i, (f, v)) in m.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(f);
                        out.push_str(": ");
                        go(v, seen, tags, out);
                    }
                    out.push(']');
                }
                CNode::Fwd(_) => unreachable!(),
            }
        }
        let mut seen = HashMap::new();
        count(r, &mut seen);
        let mut out = String::new();
        go(r, &seen, &mut HashMap::new(), &mut out);
        out
    }

    /// Unifies two descriptions; `Some(rendered result)` on success.
    pub fn unify_text(a: &G, b: &G) -> Option<String> {
        let x = build(std::slice::from_ref(a)).remove(0);
        let y = build(std::slice::from_ref(b)).remove(0);
        (unify(&x, &y) && !is_cyclic(&x)).then(|| render(&x))
    }
}

// ---------------------------------------------------------------------------
// Brute-force derivations over the category backbone

#[derive(Debug, Clone)]
pub struct ORule {
    pub id: String,
    pub source: String,
    pub body: Vec<G>,
}

#[derive(Debug, Clone)]
pub struct OEntry {
    pub id: String,
    pub word: String,
    pub source: String,
    pub fs: G,
}

#[derive(Debug, Clone)]
pub struct OracleGrammar {
    pub start: String,
    pub rules: Vec<ORule>,
    pub lexicon: Vec<OEntry>,
}

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf(usize),
    Node(usize, Vec<Tree>),
}

impl OracleGrammar {
    /// `rules` as `(id, "mother -> daughter ...")` with bracketed constituents;
    /// `lexicon` as `(word, avm)`.
    pub fn new(start: &str, rules: &[(&str, &str)], lexicon: &[(&str, &str)]) -> OracleGrammar {
        let rules = rules
            .iter()
            .map(|(id, src)| {
                let mut r = Reader::new(src);
                let mut body = vec![r.value()];
                assert!(r.eat_arrow());
                while !r.done() {
                    body.push(r.value());
                }
                ORule { id: id.to_string(), source: src.to_string(), body }
            })
            .collect();
        let mut entries: Vec<OEntry> = Vec::new();
        for (word, src) in lexicon {
            let fs = read(src);
            let base = format!("{word}/{}", fs.cat().expect("lexical CAT"));
            let mut id = base.clone();
            let mut n = 1;
            while entries.iter().any(|e| e.id == id) {
                n += 1;
                id = format!("{base}-{n}");
            }
            entries.push(OEntry { id, word: word.to_string(), source: src.to_string(), fs });
        }
        OracleGrammar { start: start.to_string(), rules, lexicon: entries }
    }

    pub fn grammar_text(&self) -> String {
        let mut out = format!(":start {}\n", self.start);
        for r in &self.rules {
            out.push_str(&format!(":rule {}\n  {}\n", r.id, r.source));
        }
        out
    }

    pub fn lexicon_text(&self) -> String {
        self.lexicon.iter().map(|e| format!("{} {}\n", e.word, e.source)).collect()
    }

    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<&str> = self.lexicon.iter().map(|e| e.word.as_str()).collect();
        w.dedup();
        w
    }

    /// Every backbone tree of `cat` over `tokens[i..j]`.
    pub fn trees(&self, tokens: &[&str], cat: &str, i: usize, j: usize) -> Vec<Tree> {
        let mut memo = HashMap::new();
        self.trees_memo(tokens, cat, i, j, &mut memo, &mut HashSet::new())
    }

    fn trees_memo(
        &self,
        tokens: &[&str],
        cat: &str,
        i: usize,
        j: usize,
        memo: &mut HashMap<(String, usize, usize), Vec<Tree>>,
        active: &mut HashSet<(String, usize, usize)>,
    ) -> Vec<Tree> {
        let key = (cat.to_string(), i, j);
        if let Some(t) = memo.get(&key) {
            return t.clone();
        }
        if !active.insert(key.clone()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        if j == i + 1 {
            for (k, e) in self.lexicon.iter().enumerate() {
                if e.word == tokens[i] && e.fs.cat().as_deref() == Some(cat) {
                    out.push(Tree::Leaf(k));
                }
            }
        }
        for (r, rule) in self.rules.iter().enumerate() {
            if rule.body[0].cat().as_deref() != Some(cat) {
                continue;
            }
            let cats: Vec<String> = rule.body[1..].iter().map(|d| d.cat().expect("daughter CAT")).collect();
            for split in compositions(j - i, cats.len()) {
                let mut at = i;
                let mut options: Vec<Vec<Tree>> = Vec::new();
                for (c, len) in cats.iter().zip(&split) {
                    options.push(self.trees_memo(tokens, c, at, at + len, memo, active));
                    at += len;
                }
                for combo in cartesian(&options) {
                    out.push(Tree::Node(r, combo));
                }
            }
        }
        active.remove(&key);
        memo.insert(key, out.clone());
        out
    }

    pub fn bracket(&self, t: &Tree) -> String {
        match t {
            Tree::Leaf(e) => self.lexicon[*e].id.clone(),
            Tree::Node(r, kids) => {
                let inner: Vec<String> = kids.iter().map(|k| self.bracket(k)).collect();
                format!("({} {})", self.rules[*r].id, inner.join(" "))
            }
        }
    }

    fn eval(&self, t: &Tree) -> Option<classical::CRef> {
        match t {
            Tree::Leaf(e) => Some(classical::build(std::slice::from_ref(&self.lexicon[*e].fs)).remove(0)),
            Tree::Node(r, kids) => {
                let members = classical::build(&self.rules[*r].body);
                for (k, kid) in kids.iter().enumerate() {
                    let sub = self.eval(kid)?;
                    if !classical::unify(&members[k + 1], &sub) {
                        return None;
                    }
                }
                Some(members[0].clone())
            }
        }
    }

    /// Spanning analyses: bracketing to rendered root structure.
    pub fn parses(&self, tokens: &[&str]) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if tokens.is_empty() {
            return out;
        }
        for t in self.trees(tokens, &self.start, 0, tokens.len()) {
            let Some(root) = self.eval(&t) else { continue };
            let goal = classical::build(&[read(&format!("[CAT: {{{}}}]", self.start))]).remove(0);
            if classical::unify(&root, &goal) && !classical::is_cyclic(&root) {
                out.insert(self.bracket(&t), classical::render(&root));
            }
        }
        out
    }

    /// A random sentence from the backbone, at most `max_len` tokens.
    pub fn sample(&self, rng: &mut ChaCha8Rng, max_len: usize) -> Option<Vec<String>> {
        fn expand(g: &OracleGrammar, rng: &mut ChaCha8Rng, cat: &str, depth: usize, out: &mut Vec<String>) -> bool {
            if out.len() > 12 || depth > 6 {
                return false;
            }
            let words: Vec<&OEntry> = g.lexicon.iter().filter(|e| e.fs.cat().as_deref() == Some(cat)).collect();
            if !words.is_empty() {
                out.push(words.choose(rng).unwrap().word.clone());
                return true;
            }
            let rules: Vec<&ORule> = g.rules.iter().filter(|r| r.body[0].cat().as_deref() == Some(cat)).collect();
            let Some(rule) = rules.choose(rng) else { return false };
            rule.body[1..].iter().all(|d| expand(g, rng, &d.cat().unwrap(), depth + 1, out))
        }
        let mut out = Vec::new();
        (expand(self, rng, &self.start, 0, &mut out) && out.len() <= max_len).then_some(out)
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn cartesian(options: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut acc: Vec<Vec<Tree>> = vec![vec![]];
    for opts in options {
        let mut next = Vec::new();
        for prefix in &acc {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

/// Twelve rules with agreement, case and subcategorization.
pub fn toy_grammar() -> OracleGrammar {
    OracleGrammar::new(
        "s",
        &[
            ("s-np-vp", "[CAT: {s}, AGR: #1] -> [CAT: {np}, AGR: #1, CASE: {nom}] [CAT: {vp}, AGR: #1]"),
            ("np-det-n", "[CAT: {np}, AGR: #1] -> [CAT: {det}, AGR: #1] [CAT: {n}, AGR: #1]"),
            ("np-det-nom", "[CAT: {np}, AGR: #1] -> [CAT: {det}, AGR: #1] [CAT: {nom}, AGR: #1]"),
            ("nom-adj-n", "[CAT: {nom}, AGR: #1] -> [CAT: {adj}] [CAT: {n}, AGR: #1]"),
            ("np-np-pp", "[CAT: {np}, AGR: #1] -> [CAT: {np}, AGR: #1] [CAT: {pp}]"),
            ("np-coord", "[CAT: {np}, AGR: [NUM: {pl}]] -> [CAT: {np}] [CAT: {conj}] [CAT: {np}]"),
            ("np-pron", "[CAT: {np}, AGR: #1, CASE: #2] -> [CAT: {pron}, AGR: #1, CASE: #2]"),
            ("vp-intrans", "[CAT: {vp}, AGR: #1] -> [CAT: {v}, AGR: #1, SUBCAT: {intrans}]"),
            ("vp-trans", "[CAT: {vp}, AGR: #1] -> [CAT: {v}, AGR: #1, SUBCAT: {trans}] [CAT: {np}, CASE: {acc}]"),
            (
                "vp-ditrans",
                "[CAT: {vp}, AGR: #1] -> [CAT: {v}, AGR: #1, SUBCAT: {ditrans}] [CAT: {np}, CASE: {acc}] [CAT: {np}, CASE: {acc}]",
            ),
            ("vp-vp-pp", "[CAT: {vp}, AGR: #1] -> [CAT: {vp}, AGR: #1] [CAT: {pp}]"),
            ("pp-p-np", "[CAT: {pp}] -> [CAT: {p}] [CAT: {np}, CASE: {acc}]"),
        ],
        &[
            ("the", "[CAT: {det}]"),
            ("a", "[CAT: {det}, AGR: [NUM: {sg}]]"),
            ("these", "[CAT: {det}, AGR: [NUM: {pl}]]"),
            ("dog", "[CAT: {n}, AGR: [NUM: {sg}, PER: {3}]]"),
            ("dogs", "[CAT: {n}, AGR: [NUM: {pl}, PER: {3}]]"),
            ("park", "[CAT: {n}, AGR: [NUM: {sg}, PER: {3}]]"),
            ("sheep", "[CAT: {n}, AGR: [NUM: {sg}, PER: {3}]]"),
            ("sheep", "[CAT: {n}, AGR: [NUM: {pl}, PER: {3}]]"),
            ("old", "[CAT: {adj}]"),
            ("and", "[CAT: {conj}]"),
            ("in", "[CAT: {p}]"),
            ("he", "[CAT: {pron}, AGR: [NUM: {sg}, PER: {3}], CASE: {nom}]"),
            ("him", "[CAT: {pron}, AGR: [NUM: {sg}, PER: {3}], CASE: {acc}]"),
            ("they", "[CAT: {pron}, AGR: [NUM: {pl}, PER: {3}], CASE: {nom}]"),
            ("them", "[CAT: {pron}, AGR: [NUM: {pl}, PER: {3}], CASE: {acc}]"),
            ("sees", "[CAT: {v}, AGR: [NUM: {sg}, PER: {3}], SUBCAT: {trans}]"),
            ("see", "[CAT: {v}, AGR: [NUM: {pl}], SUBCAT: {trans}]"),
            ("sleeps", "[CAT: {v}, AGR: [NUM: {sg}, PER: {3}], SUBCAT: {intrans}]"),
            ("sleep", "[CAT: {v}, AGR: [NUM: {pl}], SUBCAT: {intrans}]"),
            ("gives", "[CAT: {v}, AGR: [NUM: {sg}, PER: {3}], SUBCAT: {ditrans}]"),
            ("give", "[CAT: {v}, AGR: [NUM: {pl}], SUBCAT: {ditrans}]"),
        ],
    )
}

/// Random tokens over a vocabulary, for sentences the backbone may reject.
pub fn random_words(rng: &mut ChaCha8Rng, words: &[&str], max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| words.choose(rng).unwrap().to_string()).collect()
}
