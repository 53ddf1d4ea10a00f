//! Compacted trie of reversed blocks.
//!
//! Ordinal `j >= 1` is paired with the block that ends at boundary `j`,
//! `T[r(j-1)+1..rj]`, read right to left; ordinal 0 gets a virtual block of
//! `r` fillers. The final block of the text has no sampled suffix after it
//! and is left out.
//!
//! Each node `v` conceptually owns `Ord_v`, the ordinals whose reversed block
//! extends `l(v)`, ordered by the rank of the suffix that follows them.
//! Leaves store it. Internal nodes store only `ρ_v`, the next reversed-block
//! letter of every member of `Ord_v` packed `h` letters per entry, and the
//! cumulative per-letter counts `c_v` over whole entries. Together with the
//! Four-Russians table this maps an interval of `Ord_v` positions to the
//! matching interval of a child's positions in constant time.

use std::collections::VecDeque;

use crate::count_table::{build_count_table, FourRussiansTable};
use crate::error::{Error, Result};
use crate::interval::RankInterval;
use crate::sparse_tree::SparseSuffixArray;
use crate::text::{Code, PackedText};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrieNodeId(pub(crate) u32);

impl TrieNodeId {
    pub const ROOT: TrieNodeId = TrieNodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct TrieNode {
    pub(crate) depth: usize,
    /// Label of the incoming edge.
    pub(crate) label: Vec<Code>,
    pub(crate) children: Vec<(Code, TrieNodeId)>,
    /// `N(v)`.
    pub(crate) size: usize,
    pub(crate) rho: Vec<u64>,
    /// `c_v[b, w]` for `w >= 1`, stored at `b * rho.len() + w - 1`.
    pub(crate) counts: Vec<u32>,
    /// `Ord_v`; always present at leaves, at internal nodes only when retained.
    pub(crate) ord: Vec<u32>,
}

impl TrieNode {
    fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// `CT_r` with its per-node tables and the shared count table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTrie {
    pub(crate) nodes: Vec<TrieNode>,
    pub(crate) block: usize,
    pub(crate) base: usize,
    pub(crate) h: usize,
    pub(crate) table: FourRussiansTable,
    pub(crate) retained: bool,
    pub(crate) hi_skew: isize,
}

/// The `d`-th letter (0-based) of reversed block `τ_j`.
#[inline]
fn tau_letter(text: &PackedText, j: usize, d: usize) -> Code {
    if j == 0 {
        text.alphabet().filler()
    } else {
        text.code(text.block() * j - d)
    }
}

/// Builds the bare trie over `τ_0 .. τ_{n/r-1}`; equal blocks share a leaf.
pub fn build_block_trie(text: &PackedText) -> BlockTrie {
    let r = text.block();
    let mut taus: Vec<Vec<Code>> = (0..text.blocks())
        .map(|j| (0..r).map(|d| tau_letter(text, j, d)).collect())
        .collect();
    taus.sort_unstable();
    taus.dedup();

    let mut nodes = vec![TrieNode::default()];
    let mut rep = vec![0usize];
    let mut parent = vec![0usize];
    let mut kids: Vec<Vec<usize>> = vec![Vec::new()];
    let mut stack = vec![0usize];
    for (s, tau) in taus.iter().enumerate() {
        let l = if s == 0 {
            0
        } else {
            taus[s - 1].iter().zip(tau).take_while(|(a, b)| a == b).count()
        };
        let mut last = None;
        while nodes[*stack.last().unwrap()].depth > l {
            last = stack.pop();
        }
        let top = *stack.last().unwrap();
        let attach = if nodes[top].depth < l {
            let last = last.expect("a deeper node was popped");
            let split = nodes.len();
            nodes.push(TrieNode { depth: l, ..Default::default() });
            rep.push(s);
            parent.push(top);
            kids.push(vec![last]);
            kids[top].pop();
            kids[top].push(split);
            parent[last] = split;
            stack.push(split);
            split
        } else {
            top
        };
        let leaf = nodes.len();
        nodes.push(TrieNode { depth: r, ..Default::default() });
        rep.push(s);
        parent.push(attach);
        kids.push(Vec::new());
        kids[attach].push(leaf);
        stack.push(leaf);
    }
    for v in 1..nodes.len() {
        let from = nodes[parent[v]].depth;
        nodes[v].label = taus[rep[v]][from..nodes[v].depth].to_vec();
    }
    for v in 0..nodes.len() {
        nodes[v].children = kids[v]
            .iter()
            .map(|&c| (nodes[c].label[0], TrieNodeId(c as u32)))
            .collect();
    }
    let base = text.alphabet().base();
    let h = text.half_block();
    BlockTrie {
        nodes,
        block: r,
        base,
        h,
        table: FourRussiansTable::from_cells(base, h, None),
        retained: false,
        hi_skew: 0,
    }
}

impl BlockTrie {
    /// Builds the trie, its `Ord`/`ρ`/`c` annotations and the count table.
    pub fn build(
        text: &PackedText,
        sa: &SparseSuffixArray,
        table_budget: usize,
        retain_ord: bool,
    ) -> Result<Self> {
        let mut trie = build_block_trie(text);
        trie.annotate(text, sa, retain_ord)?;
        trie.table = build_count_table(text.alphabet().size(), text.half_block(), table_budget);
        Ok(trie)
    }

    /// Fills `Ord`, `ρ` and `c` level by level from the root, whose `Ord` is
    /// the suffix array. Each node's ordinals are dealt to its children by
    /// their `ρ` letter, preserving order; internal `Ord` sequences are
    /// dropped once dealt unless `retain_ord` is set.
    pub fn annotate(&mut self, text: &PackedText, sa: &SparseSuffixArray, retain_ord: bool) -> Result<()> {
        let filler = text.alphabet().filler();
        let root_ord: Vec<u32> = sa.order().iter().map(|&j| j as u32).collect();
        let mut queue = VecDeque::from([(TrieNodeId::ROOT, root_ord)]);
        while let Some((v, ord)) = queue.pop_front() {
            let node = &mut self.nodes[v.index()];
            node.size = ord.len();
            if node.is_leaf() {
                node.ord = ord;
                continue;
            }
            let d = node.depth;
            let letters: Vec<Code> = ord.iter().map(|&j| tau_letter(text, j as usize, d)).collect();
            let mut entries = Vec::with_capacity(letters.len().div_ceil(self.h));
            for chunk in letters.chunks(self.h) {
                let mut padded = chunk.to_vec();
                padded.resize(self.h, filler);
                entries.push(text.pack_halfblock(&padded)?);
            }
            let mut counts = vec![0u32; self.base * entries.len()];
            let mut running = vec![0u32; self.base];
            for (w, chunk) in letters.chunks(self.h).enumerate() {
                for &c in chunk {
                    running[c as usize] += 1;
                }
                for b in 0..self.base {
                    counts[b * entries.len() + w] = running[b];
                }
            }
            node.rho = entries;
            node.counts = counts;

            let children = node.children.clone();
            let mut dealt: Vec<Vec<u32>> = vec![Vec::new(); children.len()];
            for (&j, &c) in ord.iter().zip(&letters) {
                let slot = children.binary_search_by_key(&c, |&(a, _)| a).map_err(|_| {
                    Error::InternalInvariantViolation(format!(
                        "ordinal {j} has letter {c} at depth {d} but no matching child"
                    ))
                })?;
                dealt[slot].push(j);
            }
            if retain_ord {
                self.nodes[v.index()].ord = ord;
            }
            for ((_, child), ord) in children.into_iter().zip(dealt) {
                queue.push_back((child, ord));
            }
        }
        self.retained = retain_ord;
        Ok(())
    }

    pub fn table(&self) -> &FourRussiansTable {
        &self.table
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = TrieNodeId> {
        (0..self.nodes.len() as u32).map(TrieNodeId)
    }

    pub fn half_block(&self) -> usize {
        self.h
    }

    pub fn depth(&self, v: TrieNodeId) -> usize {
        self.nodes[v.index()].depth
    }

    /// `N(v)`.
    pub fn size(&self, v: TrieNodeId) -> usize {
        self.nodes[v.index()].size
    }

    pub fn is_leaf(&self, v: TrieNodeId) -> bool {
        self.nodes[v.index()].is_leaf()
    }

    pub fn edge_label(&self, v: TrieNodeId) -> &[Code] {
        &self.nodes[v.index()].label
    }

    pub fn children(&self, v: TrieNodeId) -> &[(Code, TrieNodeId)] {
        &self.nodes[v.index()].children
    }

    #[inline]
    pub fn child_by_letter(&self, v: TrieNodeId, a: Code) -> Option<TrieNodeId> {
        let children = &self.nodes[v.index()].children;
        children
            .binary_search_by_key(&a, |&(c, _)| c)
            .ok()
            .map(|i| children[i].1)
    }

    /// `Ord_v`, available for leaves always and for internal nodes only when
    /// the trie was annotated with `retain_ord`.
    pub fn ord(&self, v: TrieNodeId) -> Option<&[u32]> {
        let node = &self.nodes[v.index()];
        (node.is_leaf() || self.retained).then_some(node.ord.as_slice())
    }

    /// Packed entries of `ρ_v`.
    pub fn rho_entries(&self, v: TrieNodeId) -> &[u64] {
        &self.nodes[v.index()].rho
    }

    /// Unpacked letters of `ρ_v` (without entry padding).
    pub fn rho_letters(&self, v: TrieNodeId) -> Vec<Code> {
        let node = &self.nodes[v.index()];
        let mut out: Vec<Code> = node
            .rho
            .iter()
            .flat_map(|&u| crate::text::unpack_halfblock(u, self.base, self.h))
            .collect();
        out.truncate(node.size);
        out
    }

    /// Occurrences of `b` among the first `p` letters of `ρ_v`.
    pub fn count_prefix(&self, v: TrieNodeId, b: Code, p: usize) -> Result<usize> {
        let node = &self.nodes[v.index()];
        if node.is_leaf() || p > node.size {
            return Err(Error::OutOfRange { pos: p, len: 0, limit: node.size });
        }
        if b as usize >= self.base {
            return Err(Error::InvalidCode { code: b as u32 });
        }
        Ok(self.count_unchecked(node, b as usize, p))
    }

    #[inline]
    fn count_unchecked(&self, node: &TrieNode, b: usize, p: usize) -> usize {
        if p == 0 {
            return 0;
        }
        let w = p.div_ceil(self.h);
        let o = p - (w - 1) * self.h;
        let before = if w > 1 { node.counts[b * node.rho.len() + w - 2] as usize } else { 0 };
        before + self.table.count(node.rho[w - 1], b, o)
    }

    /// Maps positions `iv` of `Ord_v` to the positions in `Ord_u` of those
    /// members whose `ρ` letter is `a`, where `u` is the child of `v` by `a`.
    pub fn interval_step(
        &self,
        v: TrieNodeId,
        a: Code,
        iv: RankInterval,
    ) -> Result<(TrieNodeId, RankInterval)> {
        let child = self.child_by_letter(v, a).ok_or(Error::NoSuchChild { code: a })?;
        let node = &self.nodes[v.index()];
        if !iv.is_empty() && (iv.lo == 0 || iv.hi > node.size) {
            return Err(Error::OutOfRange { pos: iv.lo, len: iv.len(), limit: node.size });
        }
        Ok((child, self.step_unchecked(node, a, iv)))
    }

    #[inline]
    pub(crate) fn step_unchecked(&self, node: &TrieNode, a: Code, iv: RankInterval) -> RankInterval {
        if iv.is_empty() {
            return RankInterval::EMPTY;
        }
        let lo = self.count_unchecked(node, a as usize, iv.lo - 1) + 1;
        let hi = self.count_unchecked(node, a as usize, iv.hi);
        let hi = hi.saturating_add_signed(self.hi_skew);
        RankInterval::new(lo, hi)
    }

    pub(crate) fn node(&self, v: TrieNodeId) -> &TrieNode {
        &self.nodes[v.index()]
    }

    /// Skews every computed upper interval bound by `skew`. Only used to
    /// check that the differential harness notices a broken interval update.
    #[doc(hidden)]
    pub fn inject_interval_fault(&mut self, skew: isize) {
        self.hi_skew = skew;
    }

    /// Total letters stored across all `ρ_v`.
    pub fn rho_letter_total(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).map(|n| n.size).sum()
    }

    /// Total packed entries across all `ρ_v`.
    pub fn rho_entry_total(&self) -> usize {
        self.nodes.iter().map(|n| n.rho.len()).sum()
    }

    /// Total cells across all `c_v`.
    pub fn count_cell_total(&self) -> usize {
        self.nodes.iter().map(|n| n.counts.len()).sum()
    }

    /// Total ordinals stored at leaves.
    pub fn leaf_ord_total(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).map(|n| n.ord.len()).sum()
    }
}
