//! The r-spaced sparse suffix tree.
//!
//! The tree is a compacted trie of the suffixes `T[r·j + 1..]`, one leaf per
//! ordinal `j`. Every explicit node other than the root carries a typed
//! suffix link: it points to the locus of the longest proper suffix
//! `l(v)[i+1..]` of its label that is itself represented in the tree, and
//! records the shift `i` as the link type.

mod build;
mod links;
mod suffix_array;

pub use build::build_tree;
pub use links::{
    compile_q, compute_r_suffix_links, compute_typed_suffix_links, locate_beta_loci, BetaStats,
};
pub use suffix_array::{build_suffix_array_r, SparseSuffixArray};

pub(crate) use suffix_array::boundary_lcp;

use crate::error::Result;
use crate::text::{Code, PackedText};

/// Index of an explicit node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A position in the tree: an explicit node, or `offset` characters down the
/// edge leading to `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Locus {
    pub anchor: NodeId,
    pub edge: Option<NodeId>,
    pub offset: usize,
}

impl Locus {
    pub const ROOT: Locus = Locus { anchor: NodeId::ROOT, edge: None, offset: 0 };

    pub fn node(id: NodeId) -> Self {
        Locus { anchor: id, edge: None, offset: 0 }
    }

    pub fn is_explicit(&self) -> bool {
        self.offset == 0
    }
}

/// Suffix link of an explicit node: target locus and type `i ∈ [1, r]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuffixLink {
    pub target: Locus,
    pub kind: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub(crate) parent: NodeId,
    /// Text position where the label of the incoming edge starts.
    pub(crate) label_start: usize,
    pub(crate) depth: usize,
    pub(crate) min_rank: usize,
    pub(crate) max_rank: usize,
    pub(crate) ordinal: Option<usize>,
    /// Children keyed by the first letter of their edge, in letter order.
    pub(crate) children: Vec<(Code, NodeId)>,
    pub(crate) link: Option<SuffixLink>,
}

/// `ST_r` together with `SA_r` and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSuffixTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) leaves: Vec<NodeId>,
    pub(crate) sa: SparseSuffixArray,
    pub(crate) block: usize,
}

impl SparseSuffixTree {
    /// Builds the tree with all typed suffix links.
    pub fn build(text: &PackedText) -> Result<Self> {
        let sa = build_suffix_array_r(text);
        let mut tree = build_tree(text, sa);
        let r_links = compute_r_suffix_links(&tree)?;
        let q = compile_q(&tree);
        compute_typed_suffix_links(&mut tree, text, &r_links, q)?;
        Ok(tree)
    }

    pub fn suffix_array(&self) -> &SparseSuffixArray {
        &self.sa
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    #[inline]
    pub(crate) fn get(&self, v: NodeId) -> &Node {
        &self.nodes[v.index()]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        (v != NodeId::ROOT).then(|| self.get(v).parent)
    }

    /// String depth `d(v)`.
    #[inline]
    pub fn depth(&self, v: NodeId) -> usize {
        self.get(v).depth
    }

    pub fn min_rank(&self, v: NodeId) -> usize {
        self.get(v).min_rank
    }

    pub fn max_rank(&self, v: NodeId) -> usize {
        self.get(v).max_rank
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.get(v).ordinal.is_some()
    }

    /// Ordinal of a leaf.
    pub fn ordinal(&self, v: NodeId) -> Option<usize> {
        self.get(v).ordinal
    }

    /// Leaf holding the suffix of ordinal `j`.
    pub fn leaf(&self, j: usize) -> NodeId {
        self.leaves[j]
    }

    pub fn children(&self, v: NodeId) -> &[(Code, NodeId)] {
        &self.get(v).children
    }

    /// Child of `v` whose edge starts with `a`.
    #[inline]
    pub fn child_by_letter(&self, v: NodeId, a: Code) -> Option<NodeId> {
        let children = &self.get(v).children;
        children
            .binary_search_by_key(&a, |&(c, _)| c)
            .ok()
            .map(|i| children[i].1)
    }

    /// Label of the edge into `v` as a text span `(start, len)`.
    #[inline]
    pub fn edge_span(&self, v: NodeId) -> (usize, usize) {
        let node = self.get(v);
        let parent_depth = if v == NodeId::ROOT { 0 } else { self.depth(node.parent) };
        (node.label_start, node.depth - parent_depth)
    }

    pub fn link(&self, v: NodeId) -> Option<SuffixLink> {
        self.get(v).link
    }

    pub fn locus_depth(&self, locus: &Locus) -> usize {
        self.depth(locus.anchor) + locus.offset
    }

    /// The locus itself when explicit, otherwise the node at the lower end of its edge.
    pub fn closest_explicit_descendant(&self, locus: &Locus) -> NodeId {
        match locus.edge {
            Some(child) if locus.offset > 0 => child,
            _ => locus.anchor,
        }
    }

    /// Label `l(v)` as text span `(start, len)`.
    pub fn label_span(&self, v: NodeId) -> (usize, usize) {
        let j = self.sa.ordinal(self.min_rank(v));
        (self.block * j + 1, self.depth(v))
    }

    /// Label of a locus as a text span `(start, len)`.
    pub fn locus_span(&self, locus: &Locus) -> (usize, usize) {
        let below = self.closest_explicit_descendant(locus);
        (self.label_span(below).0, self.locus_depth(locus))
    }

    /// Explicit nodes in depth-first, child-order sequence.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![NodeId::ROOT];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children(v).iter().rev().map(|&(_, c)| c));
        }
        out
    }
}
