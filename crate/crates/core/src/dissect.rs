//! Irreducibility and recursive orthogonal-subspace dissection of product sets.
//!
//! A party can split a set of product states when the set falls into blocks
//! whose local parts on that party's side are mutually orthogonal across
//! blocks: measuring the projectors onto the blocks' spans then tells the
//! blocks apart without disturbing any member. The finest such split is given
//! by the connected components of the side's nonorthogonality graph.

use std::fmt;

use crate::error::{Error, Result};
use crate::numkit::{ComplexVector, Dims, Party};
use crate::qstate::{Ensemble, PureState};
use crate::quantify::{delta_s, Mode};
use crate::tol::TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductMember {
    pub probability: f64,
    pub a: ComplexVector,
    pub b: ComplexVector,
}

impl ProductMember {
    pub fn part(&self, side: Party) -> &ComplexVector {
        match side {
            Party::A => &self.a,
            Party::B => &self.b,
        }
    }
}

/// An orthogonal set of product states with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet {
    dims: Dims,
    members: Vec<ProductMember>,
}

impl ProductSet {
    pub fn new(dims: Dims, members: Vec<ProductMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::TrivialSet);
        }
        for m in &members {
            if m.a.len() != dims.a || m.b.len() != dims.b {
                return Err(Error::BadDims(format!("member parts do not match {dims}")));
            }
            for part in [&m.a, &m.b] {
                let n = part.norm();
                if (n - 1.0).abs() > TOL.norm {
                    return Err(Error::NotNormalized(n));
                }
            }
        }
        let total: f64 = members.iter().map(|m| m.probability).sum();
        if (total - 1.0).abs() > TOL.probability_sum || members.iter().any(|m| m.probability <= 0.0) {
            return Err(Error::BadProbabilities(format!("probabilities sum to {total}")));
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let overlap = members[i].a.inner(&members[j].a) * members[i].b.inner(&members[j].b);
                if overlap.norm() > TOL.orthogonal {
                    return Err(Error::NotOrthogonal(i, j));
                }
            }
        }
        Ok(ProductSet { dims, members })
    }

    /// Factors every member of a product ensemble.
    pub fn from_ensemble(e: &Ensemble) -> Result<Self> {
        let mut members = Vec::with_capacity(e.len());
        for (k, (p, s)) in e.members().iter().enumerate() {
            let (a, b) = s.factors().ok_or(Error::NotProductEnsemble(k))?;
            members.push(ProductMember { probability: *p, a, b });
        }
        Self::new(e.dims(), members)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ProductMember] {
        &self.members
    }

    pub fn to_ensemble(&self) -> Ensemble {
        self.sub_ensemble(&(0..self.len()).collect::<Vec<_>>())
    }

    /// The members at `indices` as an ensemble with renormalized weights.
    pub fn sub_ensemble(&self, indices: &[usize]) -> Ensemble {
        let mass: f64 = indices.iter().map(|&i| self.members[i].probability).sum();
        Ensemble::new(
            indices
                .iter()
                .map(|&i| {
                    let m = &self.members[i];
                    (
                        m.probability / mass,
                        PureState::product(&m.a, &m.b).expect("validated parts"),
                    )
                })
                .collect(),
        )
        .expect("validated set")
    }

    fn nonorthogonal(&self, side: Party, i: usize, j: usize) -> bool {
        self.members[i].part(side).inner(self.members[j].part(side)).norm() > TOL.orthogonal
    }

    /// Connected components of the nonorthogonality graph restricted to `indices`.
    pub fn components(&self, indices: &[usize], side: Party) -> Vec<Vec<usize>> {
        let n = indices.len();
        let mut label = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut stack = vec![start];
            let mut block = Vec::new();
            label[start] = id;
            while let Some(u) = stack.pop() {
                block.push(indices[u]);
                for v in 0..n {
                    if label[v] == usize::MAX && self.nonorthogonal(side, indices[u], indices[v]) {
                        label[v] = id;
                        stack.push(v);
                    }
                }
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks
    }
}

/// The finest split of `set` available to `side`, or `None` when the set is
/// irreducible from that side.
pub fn reducible_from(set: &ProductSet, side: Party) -> Result<Option<Vec<Vec<usize>>>> {
    if set.len() < 2 {
        return Err(Error::TrivialSet);
    }
    let all: Vec<usize> = (0..set.len()).collect();
    let blocks = set.components(&all, side);
    Ok((blocks.len() >= 2).then_some(blocks))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafStatus {
    Singleton,
    /// Neither party can split the node.
    IrreducibleBothSides,
    /// The only party allowed to act cannot split the node.
    IrreducibleFrom(Party),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Split {
        party: Party,
        children: Vec<DissectionTree>,
    },
    Leaf(LeafStatus),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissectionTree {
    pub members: Vec<usize>,
    pub kind: NodeKind,
}

impl DissectionTree {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }

    pub fn leaves(&self) -> Vec<&DissectionTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a DissectionTree>) {
        match &self.kind {
            NodeKind::Leaf(_) => out.push(self),
            NodeKind::Split { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Every member ends up alone in a leaf.
    pub fn is_complete(&self) -> bool {
        self.leaves()
            .iter()
            .all(|l| l.kind == NodeKind::Leaf(LeafStatus::Singleton))
    }

    /// Number of measurement levels on the deepest path.
    pub fn levels(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf(_) => 0,
            NodeKind::Split { children, .. } => 1 + children.iter().map(|c| c.levels()).max().unwrap_or(0),
        }
    }

    /// Changes of acting party along the deepest path.
    pub fn alternations(&self) -> usize {
        self.levels().saturating_sub(1)
    }

    pub fn root_party(&self) -> Option<Party> {
        match &self.kind {
            NodeKind::Split { party, .. } => Some(*party),
            NodeKind::Leaf(_) => None,
        }
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let members = self
            .members
            .iter()
            .map(|m| (m + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        match &self.kind {
            NodeKind::Split { party, children } => {
                out.push_str(&format!("{pad}split by {party}: {{{members}}}\n"));
                children.iter().for_each(|c| c.render_into(out, depth + 1));
            }
            NodeKind::Leaf(LeafStatus::Singleton) => out.push_str(&format!("{pad}leaf: singleton {{{members}}}\n")),
            NodeKind::Leaf(LeafStatus::IrreducibleBothSides) => {
                out.push_str(&format!("{pad}leaf: irreducible (both sides) {{{members}}}\n"))
            }
            NodeKind::Leaf(LeafStatus::IrreducibleFrom(p)) => {
                out.push_str(&format!("{pad}leaf: irreducible (from {p}) {{{members}}}\n"))
            }
        }
    }
}

/// Recursively splits `set` until every node is a singleton or cannot be
/// split by any party allowed to act.
///
/// With `first = Some(p)` only `p` may split the root; below the root either
/// party may act. A party never splits its own children again (they are
/// connected in its graph), so the acting party alternates level by level.
pub fn dissect(set: &ProductSet, first: Option<Party>) -> DissectionTree {
    let all: Vec<usize> = (0..set.len()).collect();
    let allowed: Vec<Party> = match first {
        Some(p) => vec![p],
        None => vec![Party::A, Party::B],
    };
    build(set, all, &allowed)
}

fn build(set: &ProductSet, members: Vec<usize>, allowed: &[Party]) -> DissectionTree {
    if members.len() == 1 {
        return DissectionTree {
            members,
            kind: NodeKind::Leaf(LeafStatus::Singleton),
        };
    }
    for &party in allowed {
        let blocks = set.components(&members, party);
        if blocks.len() >= 2 {
            let children = blocks
                .into_iter()
                .map(|b| build(set, b, &[Party::A, Party::B]))
                .collect();
            return DissectionTree {
                members,
                kind: NodeKind::Split { party, children },
            };
        }
    }
    let status = match allowed {
        [only] if set.components(&members, only.other()).len() >= 2 => LeafStatus::IrreducibleFrom(*only),
        _ => LeafStatus::IrreducibleBothSides,
    };
    DissectionTree {
        members,
        kind: NodeKind::Leaf(status),
    }
}

/// How a product set can be taken apart by orthogonal-subspace splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Either party can start, and one measurement by each party suffices.
    DissectibleEitherSide,
    /// Only this party can start a protocol that finishes in one round.
    DissectibleOneSide(Party),
    /// Full dissection exists but needs more than one round from both sides.
    DissectibleMultiround,
    NonDissectible,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::DissectibleEitherSide => f.write_str("dissectible-either-side"),
            Classification::DissectibleOneSide(p) => write!(f, "dissectible-one-side({p})"),
            Classification::DissectibleMultiround => f.write_str("dissectible-multiround"),
            Classification::NonDissectible => f.write_str("non-dissectible"),
        }
    }
}

/// One round is the starting party's measurement followed by the other
/// party's: at most two split levels.
pub const ONE_ROUND_LEVELS: usize = 2;

pub fn classify(set: &ProductSet) -> Classification {
    let from_a = dissect(set, Some(Party::A));
    let from_b = dissect(set, Some(Party::B));
    let one_round = |t: &DissectionTree| t.is_complete() && t.levels() <= ONE_ROUND_LEVELS;
    match (one_round(&from_a), one_round(&from_b)) {
        (true, true) => Classification::DissectibleEitherSide,
        (true, false) => Classification::DissectibleOneSide(Party::A),
        (false, true) => Classification::DissectibleOneSide(Party::B),
        (false, false) if from_a.is_complete() || from_b.is_complete() => Classification::DissectibleMultiround,
        (false, false) => Classification::NonDissectible,
    }
}

/// Sum over the non-singleton leaves of the dissection of
/// `(leaf mass) × (best-direction fixed-CNOT entanglement of the leaf)`.
pub fn weighted_nonlocal_entropy(set: &ProductSet, first: Option<Party>) -> f64 {
    let tree = dissect(set, first);
    tree.leaves()
        .into_iter()
        .filter(|leaf| leaf.members.len() >= 2)
        .map(|leaf| {
            let mass: f64 = leaf.members.iter().map(|&i| set.members[i].probability).sum();
            let sub = set.sub_ensemble(&leaf.members);
            let report = delta_s(&sub, &Mode::fixed()).expect("product members");
            mass * report.right.value.max(report.left.value)
        })
        .sum()
}
