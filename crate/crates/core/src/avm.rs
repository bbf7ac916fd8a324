//! Prioritized feature structures.
//!
//! Structures are immutable DAGs stored in a compact node arena. Every
//! atomic-valued feature carries a priority; sharing (reentrancy) is node
//! identity inside the arena. A [`FsList`] holds several roots over one arena
//! so that a rule's mother and daughters can share nodes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::atom::{Atom, EPSILON};

/// Priority used for an atomic feature that was never given one.
pub const DEFAULT_PRIORITY: f64 = 1.0;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AvmError {
    #[error("feature structure contains a cycle")]
    Cycle,
    #[error("node {0} is an atom and cannot carry features")]
    NotComplex(NodeId),
    #[error("feature `{0}` defined twice on one node")]
    DuplicateFeature(String),
    #[error("priority {0} is not a positive finite number")]
    BadPriority(f64),
    #[error("feature `{0}` has a priority but a complex value")]
    PriorityOnComplex(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Link {
    pub target: NodeId,
    pub priority: Option<f64>,
}

impl Link {
    pub fn effective_priority(&self) -> f64 {
        self.priority.unwrap_or(DEFAULT_PRIORITY)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Atom(Atom),
    Complex(BTreeMap<String, Link>),
}

impl Node {
    pub fn is_atom(&self) -> bool {
        matches!(self, Node::Atom(_))
    }

    /// An empty complex node is the unconstrained value.
    pub fn is_unconstrained(&self) -> bool {
        matches!(self, Node::Complex(m) if m.is_empty())
    }
}

/// An address into a feature structure: feature names from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<String>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn child(&self, feature: &str) -> Path {
        let mut v = self.0.clone();
        v.push(feature.to_string());
        Path(v)
    }
}

impl<S: Into<String>> FromIterator<S> for Path {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Path(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(" "))
    }
}

/// One atomic leaf seen through one path.
#[derive(Debug, Clone)]
pub struct AtomicPath<'a> {
    pub path: Path,
    pub atom: &'a Atom,
    pub priority: f64,
}

/// What a path runs into inside a structure.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Probe {
    Atom,
    /// The path ends on a node with features.
    Complex,
    /// Undefined, or ends on an unconstrained node.
    Open,
    /// A proper prefix of the path is an atom.
    ThroughAtom,
}

// ---------------------------------------------------------------------------
// Graph algorithms over a borrowed arena.

fn probe(nodes: &[Node], root: NodeId, path: &Path) -> Probe {
    let mut cur = root;
    for feat in path.iter() {
        match &nodes[cur] {
            Node::Atom(_) => return Probe::ThroughAtom,
            Node::Complex(m) => match m.get(feat) {
                Some(link) => cur = link.target,
                None => return Probe::Open,
            },
        }
    }
    match &nodes[cur] {
        Node::Atom(_) => Probe::Atom,
        n if n.is_unconstrained() => Probe::Open,
        _ => Probe::Complex,
    }
}

fn resolve(nodes: &[Node], root: NodeId, path: &Path) -> Option<NodeId> {
    let mut cur = root;
    for feat in path.iter() {
        match &nodes[cur] {
            Node::Complex(m) => cur = m.get(feat)?.target,
            Node::Atom(_) => return None,
        }
    }
    Some(cur)
}

fn atomic_paths_from(nodes: &[Node], root: NodeId) -> Vec<AtomicPath<'_>> {
    fn walk<'a>(
        nodes: &'a [Node],
        id: NodeId,
        prefix: &mut Vec<String>,
        priority: f64,
        out: &mut Vec<AtomicPath<'a>>,
    ) {
        match &nodes[id] {
            Node::Atom(a) => out.push(AtomicPath {
                path: Path(prefix.clone()),
                atom: a,
                priority,
            }),
            Node::Complex(m) => {
                for (feat, link) in m {
                    prefix.push(feat.clone());
                    walk(nodes, link.target, prefix, link.effective_priority(), out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(nodes, root, &mut Vec::new(), DEFAULT_PRIORITY, &mut out);
    out
}

/// Rooted-graph isomorphism that respects feature labels, atoms, priorities
/// on atomic features, and the sharing relation.
fn isomorphic(a: &[Node], a_roots: &[NodeId], b: &[Node], b_roots: &[NodeId]) -> bool {
    if a_roots.len() != b_roots.len() {
        return false;
    }
    let mut fwd: HashMap<NodeId, NodeId> = HashMap::new();
    let mut bwd: HashMap<NodeId, NodeId> = HashMap::new();
    let mut stack: Vec<(NodeId, NodeId)> = a_roots.iter().copied().zip(b_roots.iter().copied()).collect();
    while let Some((x, y)) = stack.pop() {
        match (fwd.get(&x), bwd.get(&y)) {
            (Some(&fy), Some(&bx)) if fy == y && bx == x => continue,
            (None, None) => {
                fwd.insert(x, y);
                bwd.insert(y, x);
            }
            _ => return false,
        }
        match (&a[x], &b[y]) {
            (Node::Atom(p), Node::Atom(q)) => {
                if !p.approx_eq(q) {
                    return false;
                }
            }
            (Node::Complex(p), Node::Complex(q)) => {
                if p.len() != q.len() {
                    return false;
                }
                for ((fp, lp), (fq, lq)) in p.iter().zip(q.iter()) {
                    if fp != fq {
                        return false;
                    }
                    if a[lp.target].is_atom()
                        && b[lq.target].is_atom()
                        && (lp.effective_priority() - lq.effective_priority()).abs() > EPSILON
                    {
                        return false;
                    }
                    stack.push((lp.target, lq.target));
                }
            }
            _ => return false,
        }
    }
    true
}

/// Copies the part of `nodes` reachable from `roots` into a fresh arena in
/// depth-first order, rejecting cycles.
pub(crate) fn compact(nodes: &[Node], roots: &[NodeId]) -> Result<(Vec<Node>, Vec<NodeId>), AvmError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unseen,
        Open,
        Done(NodeId),
    }
    fn visit(
        nodes: &[Node],
        id: NodeId,
        marks: &mut [Mark],
        out: &mut Vec<Node>,
    ) -> Result<NodeId, AvmError> {
        match marks.get(id).copied() {
            None => return Err(AvmError::UnknownNode(id)),
            Some(Mark::Done(new)) => return Ok(new),
            Some(Mark::Open) => return Err(AvmError::Cycle),
            Some(Mark::Unseen) => {}
        }
        marks[id] = Mark::Open;
        let new_id = out.len();
        out.push(Node::Complex(BTreeMap::new()));
        let node = match &nodes[id] {
            Node::Atom(a) => Node::Atom(a.clone()),
            Node::Complex(m) => {
                let mut links = BTreeMap::new();
                for (feat, link) in m {
                    let target = visit(nodes, link.target, marks, out)?;
                    links.insert(feat.clone(), Link { target, priority: link.priority });
                }
                Node::Complex(links)
            }
        };
        out[new_id] = node;
        marks[id] = Mark::Done(new_id);
        Ok(new_id)
    }
    let mut marks = vec![Mark::Unseen; nodes.len()];
    let mut out = Vec::new();
    let mut new_roots = Vec::with_capacity(roots.len());
    for &r in roots {
        new_roots.push(visit(nodes, r, &mut marks, &mut out)?);
    }
    Ok((out, new_roots))
}

// ---------------------------------------------------------------------------
// FeatureStructure

/// An acyclic attribute-value matrix with per-feature priorities.
#[derive(Debug, Clone)]
pub struct FeatureStructure {
    nodes: Vec<Node>,
    root: NodeId,
}

impl FeatureStructure {
    /// The unconstrained structure `[]`.
    pub fn empty() -> FeatureStructure {
        FeatureStructure { nodes: vec![Node::Complex(BTreeMap::new())], root: 0 }
    }

    pub fn atom(atom: Atom) -> FeatureStructure {
        FeatureStructure { nodes: vec![Node::Atom(atom)], root: 0 }
    }

    /// Builds a tree-shaped structure from named substructures. Substructures
    /// never share nodes with one another.
    pub fn from_features<I, S>(features: I) -> Result<FeatureStructure, AvmError>
    where
        I: IntoIterator<Item = (S, FeatureStructure, Option<f64>)>,
        S: Into<String>,
    {
        let mut b = FsBuilder::new();
        let root = b.complex();
        for (name, fs, priority) in features {
            let child = b.import(&fs);
            b.link(root, name, child, priority)?;
        }
        b.build(root)
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn root(&self) -> NodeId {
        self.root
    }

    pub fn is_atom(&self) -> bool {
        self.nodes[self.root].is_atom()
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match &self.nodes[self.root] {
            Node::Atom(a) => Some(a),
            Node::Complex(_) => None,
        }
    }

    /// True for `[]`.
    pub fn is_unconstrained(&self) -> bool {
        self.nodes[self.root].is_unconstrained()
    }

    /// Top-level feature names in order.
    pub fn features(&self) -> Vec<&str> {
        match &self.nodes[self.root] {
            Node::Complex(m) => m.keys().map(String::as_str).collect(),
            Node::Atom(_) => Vec::new(),
        }
    }

    /// Substructure at `path`, or `None` when any step is undefined.
    pub fn get_path(&self, path: &Path) -> Option<FeatureStructure> {
        let id = resolve(&self.nodes, self.root, path)?;
        let (nodes, roots) = compact(&self.nodes, &[id]).expect("substructure of an acyclic structure");
        Some(FeatureStructure { nodes, root: roots[0] })
    }

    /// The atom at `path`, if the path ends on one.
    pub fn atom_at(&self, path: &Path) -> Option<&Atom> {
        match &self.nodes[resolve(&self.nodes, self.root, path)?] {
            Node::Atom(a) => Some(a),
            Node::Complex(_) => None,
        }
    }

    /// Effective priority of the atomic feature at `path`.
    pub fn priority_at(&self, path: &Path) -> Option<f64> {
        self.atomic_paths().into_iter().find(|ap| &ap.path == path).map(|ap| ap.priority)
    }

    /// Every atomic leaf, once per distinct path, in lexicographic path order.
    pub fn atomic_paths(&self) -> Vec<AtomicPath<'_>> {
        atomic_paths_from(&self.nodes, self.root)
    }

    pub(crate) fn probe(&self, path: &Path) -> Probe {
        probe(&self.nodes, self.root, path)
    }

    /// Canonical equality: same paths, atoms, priorities and sharing.
    pub fn fs_equal(&self, other: &FeatureStructure) -> bool {
        isomorphic(&self.nodes, &[self.root], &other.nodes, &[other.root])
    }

    /// Pairs of distinct paths that lead to the same node.
    pub fn shared_paths(&self) -> Vec<(Path, Path)> {
        let mut seen: BTreeMap<NodeId, Vec<Path>> = BTreeMap::new();
        fn walk(nodes: &[Node], id: NodeId, prefix: Path, seen: &mut BTreeMap<NodeId, Vec<Path>>) {
            seen.entry(id).or_default().push(prefix.clone());
            if let Node::Complex(m) = &nodes[id] {
                for (f, l) in m {
                    walk(nodes, l.target, prefix.child(f), seen);
                }
            }
        }
        walk(&self.nodes, self.root, Path::root(), &mut seen);
        let mut out = Vec::new();
        for paths in seen.values() {
            for w in paths.windows(2) {
                out.push((w[0].clone(), w[1].clone()));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// FsList

/// Several feature structures over one arena, so nodes may be shared between
/// them. Rules and chart edges use this for their mother and daughters.
#[derive(Debug, Clone)]
pub struct FsList {
    nodes: Vec<Node>,
    roots: Vec<NodeId>,
}

impl FsList {
    pub(crate) fn from_parts(nodes: Vec<Node>, roots: Vec<NodeId>) -> FsList {
        FsList { nodes, roots }
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn single(fs: FeatureStructure) -> FsList {
        FsList { nodes: fs.nodes, roots: vec![fs.root] }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Standalone copy of member `i`; sharing with other members is lost.
    pub fn get(&self, i: usize) -> FeatureStructure {
        let (nodes, roots) = compact(&self.nodes, &[self.roots[i]]).expect("acyclic list");
        FeatureStructure { nodes, root: roots[0] }
    }

    /// Drops member `i`, keeping sharing among the rest.
    pub fn without(&self, i: usize) -> FsList {
        let keep: Vec<NodeId> = self
            .roots
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| *r)
            .collect();
        let (nodes, roots) = compact(&self.nodes, &keep).expect("acyclic list");
        FsList { nodes, roots }
    }

    /// Canonical equality across all members jointly.
    pub fn fs_equal(&self, other: &FsList) -> bool {
        isomorphic(&self.nodes, &self.roots, &other.nodes, &other.roots)
    }

    /// Pairs `(member, path)` that reach the same node as another pair.
    pub fn shares_between(&self, i: usize, j: usize) -> bool {
        fn reach(nodes: &[Node], id: NodeId, out: &mut Vec<NodeId>) {
            out.push(id);
            if let Node::Complex(m) = &nodes[id] {
                for l in m.values() {
                    reach(nodes, l.target, out);
                }
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        reach(&self.nodes, self.roots[i], &mut a);
        reach(&self.nodes, self.roots[j], &mut b);
        a.iter().any(|x| b.contains(x))
    }
}

// ---------------------------------------------------------------------------
// Builder

/// Incremental construction of structures with arbitrary sharing.
#[derive(Debug, Default)]
pub struct FsBuilder {
    nodes: Vec<Node>,
}

impl FsBuilder {
    pub fn new() -> FsBuilder {
        FsBuilder::default()
    }

    pub fn atom(&mut self, atom: Atom) -> NodeId {
        self.nodes.push(Node::Atom(atom));
        self.nodes.len() - 1
    }

    /// A fresh complex node with no features (unconstrained until linked).
    pub fn complex(&mut self) -> NodeId {
        self.nodes.push(Node::Complex(BTreeMap::new()));
        self.nodes.len() - 1
    }

    /// Replaces the contents of `id` with those of an atom.
    pub fn set_atom(&mut self, id: NodeId, atom: Atom) -> Result<(), AvmError> {
        let slot = self.nodes.get_mut(id).ok_or(AvmError::UnknownNode(id))?;
        *slot = Node::Atom(atom);
        Ok(())
    }

    pub fn link(
        &mut self,
        parent: NodeId,
        feature: impl Into<String>,
        target: NodeId,
        priority: Option<f64>,
    ) -> Result<(), AvmError> {
        let feature = feature.into();
        if target >= self.nodes.len() {
            return Err(AvmError::UnknownNode(target));
        }
        if let Some(p) = priority {
            if !p.is_finite() || p <= 0.0 {
                return Err(AvmError::BadPriority(p));
            }
        }
        match self.nodes.get_mut(parent) {
            None => Err(AvmError::UnknownNode(parent)),
            Some(Node::Atom(_)) => Err(AvmError::NotComplex(parent)),
            Some(Node::Complex(m)) => {
                if m.contains_key(&feature) {
                    return Err(AvmError::DuplicateFeature(feature));
                }
                m.insert(feature, Link { target, priority });
                Ok(())
            }
        }
    }

    /// Copies a whole structure into this builder and returns its new root.
    pub fn import(&mut self, fs: &FeatureStructure) -> NodeId {
        let offset = self.nodes.len();
        for node in &fs.nodes {
            self.nodes.push(shift(node, offset));
        }
        fs.root + offset
    }

    fn check_priorities(&self) -> Result<(), AvmError> {
        for node in &self.nodes {
            if let Node::Complex(m) = node {
                for (f, l) in m {
                    if l.priority.is_some() {
                        if let Node::Complex(t) = &self.nodes[l.target] {
                            if !t.is_empty() {
                                return Err(AvmError::PriorityOnComplex(f.clone()));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn build(self, root: NodeId) -> Result<FeatureStructure, AvmError> {
        self.check_priorities()?;
        let (nodes, roots) = compact(&self.nodes, &[root])?;
        Ok(FeatureStructure { nodes, root: roots[0] })
    }

    pub fn build_list(self, roots: &[NodeId]) -> Result<FsList, AvmError> {
        self.check_priorities()?;
        let (nodes, roots) = compact(&self.nodes, roots)?;
        Ok(FsList { nodes, roots })
    }
}

pub(crate) fn shift(node: &Node, offset: usize) -> Node {
    match node {
        Node::Atom(a) => Node::Atom(a.clone()),
        Node::Complex(m) => Node::Complex(
            m.iter()
                .map(|(f, l)| (f.clone(), Link { target: l.target + offset, priority: l.priority }))
                .collect(),
        ),
    }
}
