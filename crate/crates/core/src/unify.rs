//! Graded unification.
//!
//! Structure is combined exactly as in classical unification, except that two
//! atoms always combine (by averaging their disjunct weights). Alongside the
//! combined structure the operator reports a strength in `[0, 1]`: the ratio
//! between the actual and the perfect compatibility of the two arguments,
//! both being priority-weighted sums over their flattened atomic paths.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::atom::{Atom, EPSILON};
use crate::avm::{compact, shift, FeatureStructure, FsList, Link, Node, NodeId, Path, Probe};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnifyError {
    /// An atom met a complex value.
    #[error("structural clash{}", .path.as_ref().map(|p| format!(" at {p}")).unwrap_or_default())]
    Clash { path: Option<Path> },
    /// Reentrancy made the combined structure cyclic.
    #[error("unification would create a cyclic structure")]
    Cycle,
    #[error("unification strength {strength:.6} is below the threshold {threshold}")]
    BelowThreshold { strength: f64, threshold: f64 },
}

impl UnifyError {
    /// The strength carried by the failure; structural failures have none.
    pub fn strength(&self) -> f64 {
        match self {
            UnifyError::BelowThreshold { strength, .. } => *strength,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnifyResult {
    pub result: FeatureStructure,
    pub strength: f64,
}

/// Mixture of two atoms: union of disjuncts, weights averaged.
pub fn unify_atoms(a: &Atom, b: &Atom) -> Atom {
    a.unify(b)
}

/// Shared mass of two atoms, `Σ min(w_a, w_b)` over common disjuncts.
pub fn atom_strength(a: &Atom, b: &Atom) -> f64 {
    a.strength(b)
}

/// One term of the compatibility sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PathScore {
    pub path: Path,
    /// Mean priority when the path is shared, otherwise the owner's priority.
    pub weight: f64,
    /// Atomic strength when shared, 1 otherwise.
    pub score: f64,
    pub shared: bool,
}

/// Per-path contributions over every atomic path of `a` or `b`.
pub fn path_scores(a: &FeatureStructure, b: &FeatureStructure) -> Result<Vec<PathScore>, UnifyError> {
    let pa = a.atomic_paths();
    let pb = b.atomic_paths();
    let mut out = Vec::with_capacity(pa.len() + pb.len());
    let (mut i, mut j) = (0, 0);

    let unique = |path: &Path, priority: f64, other: &FeatureStructure| match other.probe(path) {
        Probe::Open => Ok(PathScore { path: path.clone(), weight: priority, score: 1.0, shared: false }),
        Probe::Complex | Probe::ThroughAtom | Probe::Atom => Err(UnifyError::Clash { path: Some(path.clone()) }),
    };

    while i < pa.len() || j < pb.len() {
        let order = match (pa.get(i), pb.get(j)) {
            (Some(x), Some(y)) => x.path.cmp(&y.path),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, _) => std::cmp::Ordering::Greater,
        };
        match order {
            std::cmp::Ordering::Equal => {
                let (x, y) = (&pa[i], &pb[j]);
                out.push(PathScore {
                    path: x.path.clone(),
                    weight: (x.priority + y.priority) / 2.0,
                    score: atom_strength(x.atom, y.atom),
                    shared: true,
                });
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(unique(&pa[i].path, pa[i].priority, b)?);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(unique(&pb[j].path, pb[j].priority, a)?);
                j += 1;
            }
        }
    }
    Ok(out)
}

pub fn actual_compatibility(a: &FeatureStructure, b: &FeatureStructure) -> Result<f64, UnifyError> {
    Ok(path_scores(a, b)?.iter().map(|s| s.weight * s.score).sum())
}

pub fn perfect_compatibility(a: &FeatureStructure, b: &FeatureStructure) -> Result<f64, UnifyError> {
    Ok(path_scores(a, b)?.iter().map(|s| s.weight).sum())
}

/// Unification strength without building the combined structure.
pub fn strength(a: &FeatureStructure, b: &FeatureStructure) -> Result<f64, UnifyError> {
    Ok(ratio(&path_scores(a, b)?))
}

fn ratio(scores: &[PathScore]) -> f64 {
    let perfect: f64 = scores.iter().map(|s| s.weight).sum();
    if perfect <= 0.0 {
        return 1.0;
    }
    let actual: f64 = scores.iter().map(|s| s.weight * s.score).sum();
    (actual / perfect).clamp(0.0, 1.0)
}

/// Graded unification of two standalone structures.
///
/// Fails on a structural clash, or when the strength is below `threshold`.
pub fn unify_graded(a: &FeatureStructure, b: &FeatureStructure, threshold: f64) -> Result<UnifyResult, UnifyError> {
    let (list, strength) = unify_member(&FsList::single(a.clone()), 0, b, threshold)?;
    Ok(UnifyResult { result: list.get(0), strength })
}

/// Unifies member `index` of `list` with `other`, keeping every other member
/// so that bindings made through shared nodes propagate to them.
pub fn unify_member(
    list: &FsList,
    index: usize,
    other: &FeatureStructure,
    threshold: f64,
) -> Result<(FsList, f64), UnifyError> {
    let strength = strength(&list.get(index), other)?;

    let offset = list.nodes().len();
    let mut merger = Merger::new(list.nodes().iter().cloned().chain(other.nodes().iter().map(|n| shift(n, offset))));
    merger.unify(list.roots()[index], other.root() + offset)?;

    if strength < threshold - EPSILON {
        return Err(UnifyError::BelowThreshold { strength, threshold });
    }
    let roots: Vec<NodeId> = list.roots().to_vec();
    let merged = merger.finish(&roots)?;
    Ok((merged, strength))
}

/// Union-find over a node arena.
struct Merger {
    nodes: Vec<Node>,
    parent: Vec<NodeId>,
}

impl Merger {
    fn new(nodes: impl Iterator<Item = Node>) -> Merger {
        let nodes: Vec<Node> = nodes.collect();
        let parent = (0..nodes.len()).collect();
        Merger { nodes, parent }
    }

    fn find(&mut self, mut x: NodeId) -> NodeId {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn is_atom(&mut self, x: NodeId) -> bool {
        let r = self.find(x);
        self.nodes[r].is_atom()
    }

    fn unify(&mut self, x: NodeId, y: NodeId) -> Result<(), UnifyError> {
        let x = self.find(x);
        let y = self.find(y);
        if x == y {
            return Ok(());
        }
        match (&self.nodes[x], &self.nodes[y]) {
            (Node::Atom(a), Node::Atom(b)) => {
                self.nodes[x] = Node::Atom(a.unify(b));
                self.parent[y] = x;
                Ok(())
            }
            (Node::Atom(_), n) if n.is_unconstrained() => {
                self.parent[y] = x;
                Ok(())
            }
            (n, Node::Atom(_)) if n.is_unconstrained() => {
                self.parent[x] = y;
                Ok(())
            }
            (Node::Complex(_), Node::Complex(_)) => {
                self.parent[y] = x;
                let links = match std::mem::replace(&mut self.nodes[y], Node::Complex(BTreeMap::new())) {
                    Node::Complex(m) => m,
                    Node::Atom(_) => unreachable!(),
                };
                for (feature, ly) in links {
                    let rx = self.find(x);
                    let lx = match &self.nodes[rx] {
                        Node::Complex(m) => m.get(&feature).copied(),
                        Node::Atom(_) => return Err(UnifyError::Cycle),
                    };
                    match lx {
                        None => {
                            if let Node::Complex(m) = &mut self.nodes[rx] {
                                m.insert(feature, ly);
                            }
                        }
                        Some(lx) => {
                            let both_atoms = self.is_atom(lx.target) && self.is_atom(ly.target);
                            let priority = merge_priority(lx.priority, ly.priority, both_atoms);
                            if let Node::Complex(m) = &mut self.nodes[rx] {
                                m.insert(feature, Link { target: lx.target, priority });
                            }
                            self.unify(lx.target, ly.target)?;
                        }
                    }
                }
                Ok(())
            }
            _ => Err(UnifyError::Clash { path: None }),
        }
    }

    fn finish(mut self, roots: &[NodeId]) -> Result<FsList, UnifyError> {
        let reps: Vec<NodeId> = (0..self.nodes.len()).map(|i| self.find(i)).collect();
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Atom(a) => Node::Atom(a.clone()),
                Node::Complex(m) => Node::Complex(
                    m.iter()
                        .map(|(f, l)| (f.clone(), Link { target: reps[l.target], priority: l.priority }))
                        .collect(),
                ),
            })
            .collect();
        let roots: Vec<NodeId> = roots.iter().map(|&r| reps[r]).collect();
        let (nodes, roots) = compact(&nodes, &roots).map_err(|_| UnifyError::Cycle)?;
        Ok(FsList::from_parts(nodes, roots))
    }
}

/// Priority of a feature present on both sides. Two atomic values average
/// their effective priorities; otherwise an explicit priority survives.
fn merge_priority(x: Option<f64>, y: Option<f64>, both_atoms: bool) -> Option<f64> {
    match (x, y) {
        (Some(p), Some(q)) => Some((p + q) / 2.0),
        (None, None) => None,
        (Some(p), None) | (None, Some(p)) => {
            if both_atoms {
                Some((p + crate::avm::DEFAULT_PRIORITY) / 2.0)
            } else {
                Some(p)
            }
        }
    }
}
