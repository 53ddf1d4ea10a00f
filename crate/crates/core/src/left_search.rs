//! Selection of the boundaries preceded by the pattern prefix `P[1..k]`.
//!
//! The search walks `P[k], P[k-1], .., P[1]` down the reversed-block trie,
//! carrying the interval of positions in `Ord_v` whose following suffix
//! starts with `P[k+1..]`. At the end of the walk the surviving interval is
//! pushed into every branch below, pruning branches whose interval empties.

use crate::block_trie::{BlockTrie, TrieNodeId};
use crate::interval::RankInterval;
use crate::text::PackedPattern;

/// Input of a left search: the offset `k >= 1` and the rank interval of
/// `P[k+1..]` found by the right search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeftQuery {
    pub k: usize,
    pub interval: RankInterval,
}

/// Work counters for one left search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LeftCounters {
    /// Explicit nodes entered while following `P[k]..P[1]`.
    pub descent_nodes: usize,
    /// Edge-label letters checked after the first one.
    pub label_checks: usize,
    /// Child intervals computed by the traversal.
    pub traverse_visits: usize,
}

impl LeftCounters {
    pub fn total(&self) -> usize {
        self.descent_nodes + self.label_checks + self.traverse_visits
    }
}

/// Ordinals `j` such that `P[k+1..]` starts at `r·j + 1` and `P[1..k]` ends at `r·j`.
pub fn left_search(
    trie: &BlockTrie,
    pat: &PackedPattern,
    q: LeftQuery,
    counters: &mut LeftCounters,
) -> Vec<usize> {
    let mut out = Vec::new();
    if q.interval.is_empty() || q.k == 0 {
        return out;
    }
    let mut v = TrieNodeId::ROOT;
    let mut iv = q.interval;
    let mut i = q.k;
    while i >= 1 {
        if trie.is_leaf(v) {
            // Leaves sit at depth r > k; unreachable for a valid query.
            return out;
        }
        let a = pat.at(i);
        let Some(child) = trie.child_by_letter(v, a) else {
            return out;
        };
        counters.descent_nodes += 1;
        iv = trie.step_unchecked(trie.node(v), a, iv);
        if iv.is_empty() {
            return out;
        }
        // Remaining label letters only need checking; the interval already
        // indexes the child's ordinals.
        let label = trie.edge_label(child);
        let take = label.len().min(i);
        for (t, &c) in label.iter().enumerate().take(take).skip(1) {
            counters.label_checks += 1;
            if pat.at(i - t) != c {
                return out;
            }
        }
        i -= take;
        v = child;
    }
    traverse(trie, v, iv, counters, &mut out);
    out
}

/// Reports the ordinals at positions `iv` of `Ord_v`, pushing the interval
/// into every branch below `v` and skipping branches where it empties.
pub fn traverse(
    trie: &BlockTrie,
    v: TrieNodeId,
    iv: RankInterval,
    counters: &mut LeftCounters,
    out: &mut Vec<usize>,
) {
    if iv.is_empty() {
        return;
    }
    if let Some(ord) = trie.ord(v).filter(|_| trie.is_leaf(v)) {
        out.extend(iv.iter().map(|x| ord[x - 1] as usize));
        return;
    }
    let node = trie.node(v);
    for &(a, u) in trie.children(v) {
        counters.traverse_visits += 1;
        let sub = trie.step_unchecked(node, a, iv);
        if sub.is_empty() {
            continue;
        }
        if trie.is_leaf(u) {
            let ord = trie.ord(u).expect("leaves store their ordinals");
            out.extend(sub.iter().map(|x| ord[x - 1] as usize));
        } else {
            traverse(trie, u, sub, counters, out);
        }
    }
}
