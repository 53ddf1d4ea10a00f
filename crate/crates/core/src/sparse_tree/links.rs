//! Typed suffix links.
//!
//! Links are computed in rounds `i = 1..=r`. Round `i` first locates, for
//! every ordinal `j`, the locus `β_j` of the longest prefix of `T[rj+i+1..]`
//! represented in the tree. A node whose fixed boundary occurrence is at
//! ordinal `j` gets a type-`i` link exactly when its label shifted by `i`
//! fits on the path to `β_j`; the target is read off that path with a binary
//! search over the stack of explicit ancestors.

use std::collections::VecDeque;

use super::{Locus, NodeId, SparseSuffixTree, SuffixLink};
use crate::error::{Error, Result};
use crate::text::PackedText;

/// Work done while locating the `β` loci of one round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BetaStats {
    /// Edges skipped by length only.
    pub skip_steps: usize,
    /// Packed comparisons made while extending a locus.
    pub extend_steps: usize,
}

/// Ancestor jump tables over explicit nodes.
struct Ancestors {
    up: Vec<Vec<NodeId>>,
}

impl Ancestors {
    fn new(tree: &SparseSuffixTree) -> Self {
        let n = tree.node_count();
        let mut up = vec![(0..n).map(|v| tree.get(NodeId(v as u32)).parent).collect::<Vec<_>>()];
        let levels = (usize::BITS - n.leading_zeros()) as usize;
        for k in 1..levels.max(1) {
            let prev = &up[k - 1];
            let next = prev.iter().map(|&p| prev[p.index()]).collect();
            up.push(next);
        }
        Self { up }
    }

    /// Locus at string depth `target` on the root path of `v`
    /// (`0 < target <= d(v)`).
    fn locus_at(&self, tree: &SparseSuffixTree, v: NodeId, target: usize) -> Locus {
        let mut x = v;
        for level in self.up.iter().rev() {
            let a = level[x.index()];
            if a != NodeId::ROOT && tree.depth(a) >= target {
                x = a;
            }
        }
        if tree.depth(x) == target {
            Locus::node(x)
        } else {
            let p = tree.get(x).parent;
            Locus { anchor: p, edge: Some(x), offset: target - tree.depth(p) }
        }
    }
}

/// For every explicit node `v`, the node representing `l(v)[r+1..]`
/// (the root when `d(v) <= r`). The target is always explicit.
pub fn compute_r_suffix_links(tree: &SparseSuffixTree) -> Result<Vec<NodeId>> {
    let r = tree.block;
    let anc = Ancestors::new(tree);
    tree.node_ids()
        .map(|v| {
            let d = tree.depth(v);
            if d <= r {
                return Ok(NodeId::ROOT);
            }
            let j = tree.sa.ordinal(tree.min_rank(v));
            let target = anc.locus_at(tree, tree.leaf(j + 1), d - r);
            if !target.is_explicit() {
                return Err(Error::InternalInvariantViolation(format!(
                    "r-suffix link of node {} (depth {d}) lands inside an edge",
                    v.index()
                )));
            }
            Ok(target.anchor)
        })
        .collect()
}

/// Per-ordinal lists of non-root explicit nodes, keyed by the leftmost
/// boundary occurrence of their label, each in increasing string depth.
pub fn compile_q(tree: &SparseSuffixTree) -> Vec<Vec<NodeId>> {
    let mut leftmost = vec![usize::MAX; tree.node_count()];
    for v in tree.preorder().into_iter().rev() {
        leftmost[v.index()] = match tree.ordinal(v) {
            Some(j) => j,
            None => tree.children(v).iter().map(|&(_, c)| leftmost[c.index()]).min().unwrap(),
        };
    }
    let mut q = vec![Vec::new(); tree.leaf_count()];
    // Nodes of one list all lie on the root path of the same leaf, so
    // breadth-first order is string-depth order.
    let mut queue = VecDeque::from([NodeId::ROOT]);
    while let Some(v) = queue.pop_front() {
        if v != NodeId::ROOT {
            q[leftmost[v.index()]].push(v);
        }
        queue.extend(tree.children(v).iter().map(|&(_, c)| c));
    }
    q
}

/// Moves down from explicit node `from` along the string starting at text
/// position `start` until string depth `target`, using edge lengths only.
/// The string must be represented to that depth.
fn skip_down(
    tree: &SparseSuffixTree,
    text: &PackedText,
    from: NodeId,
    start: usize,
    target: usize,
    stats: &mut BetaStats,
) -> Locus {
    let mut v = from;
    loop {
        let d = tree.depth(v);
        if d == target {
            return Locus::node(v);
        }
        stats.skip_steps += 1;
        let child = tree
            .child_by_letter(v, text.code(start + d))
            .expect("skipped string is represented");
        if tree.depth(child) <= target {
            v = child;
        } else {
            return Locus { anchor: v, edge: Some(child), offset: target - d };
        }
    }
}

/// Extends `locus` as far as the text string starting at `start` (running to
/// the end of `T`) keeps matching the tree.
fn extend(
    tree: &SparseSuffixTree,
    text: &PackedText,
    mut locus: Locus,
    start: usize,
    stats: &mut BetaStats,
) -> Locus {
    let n = text.len();
    let w = text.capacity();
    loop {
        let depth = tree.locus_depth(&locus);
        let remaining = (n + 1).saturating_sub(start + depth);
        if remaining == 0 {
            return locus;
        }
        let child = match locus.edge {
            Some(c) if locus.offset > 0 => c,
            _ => match tree.child_by_letter(locus.anchor, text.code(start + depth)) {
                Some(c) => c,
                None => return locus,
            },
        };
        let (es, el) = tree.edge_span(child);
        let len = w.min(el - locus.offset).min(remaining);
        stats.extend_steps += 1;
        let l = text.text_lcp(es + locus.offset, start + depth, len);
        let offset = locus.offset + l;
        locus = if offset == el {
            Locus::node(child)
        } else if offset == 0 {
            Locus::node(locus.anchor)
        } else {
            Locus { anchor: locus.anchor, edge: Some(child), offset }
        };
        if l < len {
            return locus;
        }
    }
}

/// Loci of `β_j`, the longest represented prefix of `T[rj+i+1..]`, for all `j`.
///
/// `β_{j+1}` is found from `β_j`: dropping the first `r` letters of a
/// represented string keeps it represented, so the walk restarts from the
/// r-suffix link of `β_j`'s anchor, skips down to the known depth and then
/// extends by packed comparisons.
pub fn locate_beta_loci(
    tree: &SparseSuffixTree,
    text: &PackedText,
    r_links: &[NodeId],
    i: usize,
) -> (Vec<Locus>, BetaStats) {
    let r = tree.block;
    let nb = tree.leaf_count();
    let mut stats = BetaStats::default();
    let mut beta = Vec::with_capacity(nb);
    let mut prev: Option<Locus> = None;
    for j in 0..nb {
        let start = r * j + i + 1;
        let known = prev.map_or(0, |b| tree.locus_depth(&b).saturating_sub(r));
        let from = match prev {
            Some(b) if known > 0 && tree.depth(b.anchor) > r => r_links[b.anchor.index()],
            _ => NodeId::ROOT,
        };
        let locus = skip_down(tree, text, from, start, known, &mut stats);
        let locus = extend(tree, text, locus, start, &mut stats);
        beta.push(locus);
        prev = Some(locus);
    }
    (beta, stats)
}

/// Locus at string depth `x` on the path from the root to `beta`, where
/// `path` holds the explicit ancestors of `beta.anchor` (inclusive) by depth.
fn locus_on_path(tree: &SparseSuffixTree, path: &[NodeId], beta: &Locus, x: usize) -> Locus {
    let idx = path.partition_point(|&u| tree.depth(u) <= x) - 1;
    let u = path[idx];
    let du = tree.depth(u);
    if du == x {
        return Locus::node(u);
    }
    let next = path.get(idx + 1).copied().or(beta.edge).expect("depth lies on the path");
    Locus { anchor: u, edge: Some(next), offset: x - du }
}

/// Sets the typed suffix link of every non-root explicit node.
pub fn compute_typed_suffix_links(
    tree: &mut SparseSuffixTree,
    text: &PackedText,
    r_links: &[NodeId],
    q: Vec<Vec<NodeId>>,
) -> Result<()> {
    let r = tree.block;
    let mut q: Vec<VecDeque<NodeId>> = q.into_iter().map(VecDeque::from).collect();
    let mut links: Vec<Option<SuffixLink>> = vec![None; tree.node_count()];
    let mut pending: usize = q.iter().map(VecDeque::len).sum();

    for i in 1..=r {
        if pending == 0 {
            break;
        }
        let (beta, _) = locate_beta_loci(tree, text, r_links, i);
        let mut at_anchor: Vec<Vec<usize>> = vec![Vec::new(); tree.node_count()];
        for (j, b) in beta.iter().enumerate() {
            if !q[j].is_empty() {
                at_anchor[b.anchor.index()].push(j);
            }
        }

        // Depth-first walk keeping the explicit root path in `path`.
        let mut path: Vec<NodeId> = Vec::new();
        let mut stack: Vec<(NodeId, usize)> = vec![(NodeId::ROOT, 0)];
        while let Some(&(u, step)) = stack.last() {
            if step == 0 {
                path.push(u);
                for &j in &at_anchor[u.index()] {
                    let b = &beta[j];
                    let reach = tree.locus_depth(b);
                    while let Some(&v) = q[j].front() {
                        let d = tree.depth(v);
                        if d < i {
                            return Err(Error::InternalInvariantViolation(format!(
                                "node {} missed its suffix link before round {i}",
                                v.index()
                            )));
                        }
                        if d - i > reach {
                            break;
                        }
                        let target = locus_on_path(tree, &path, b, d - i);
                        links[v.index()] = Some(SuffixLink { target, kind: i });
                        q[j].pop_front();
                        pending -= 1;
                    }
                }
            }
            let children = tree.children(u);
            if step < children.len() {
                stack.last_mut().unwrap().1 += 1;
                stack.push((children[step].1, 0));
            } else {
                stack.pop();
                path.pop();
            }
        }
    }

    if pending > 0 {
        return Err(Error::InternalInvariantViolation(format!(
            "{pending} nodes have no suffix link of type at most {r}"
        )));
    }
    for (node, link) in tree.nodes.iter_mut().zip(links) {
        node.link = link;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::AlphabetMode;

    fn sample() -> (PackedText, SparseSuffixTree) {
        let t = PackedText::encode(b"abaabaa", 2, AlphabetMode::Auto, None).unwrap();
        let sa = super::super::build_suffix_array_r(&t);
        let tree = super::super::build_tree(&t, sa);
        (t, tree)
    }

    #[test]
    fn sample_r_links() {
        let (_, tree) = sample();
        let links = compute_r_suffix_links(&tree).unwrap();
        assert_eq!(links[tree.leaf(0).index()], tree.leaf(1));
        assert_eq!(links[tree.leaf(2).index()], tree.leaf(3));
        let a = tree.child_by_letter(NodeId::ROOT, 1).unwrap();
        assert_eq!(links[a.index()], NodeId::ROOT);
    }

    #[test]
    fn sample_q_lists() {
        let (_, tree) = sample();
        let a = tree.child_by_letter(NodeId::ROOT, 1).unwrap();
        let q = compile_q(&tree);
        assert_eq!(q[0], vec![a, tree.leaf(0)]);
        assert_eq!(q[1], vec![tree.leaf(1)]);
        assert_eq!(q[2], vec![tree.leaf(2)]);
        assert_eq!(q[3], vec![tree.leaf(3)]);
    }

    #[test]
    fn sample_beta_round_one() {
        let (t, tree) = sample();
        let links = compute_r_suffix_links(&tree).unwrap();
        let (beta, _) = locate_beta_loci(&tree, &t, &links, 1);
        // T[2..] = "baabaa$" → "baa" on the root edge to leaf 2.
        assert_eq!(beta[0], Locus { anchor: NodeId::ROOT, edge: Some(tree.leaf(2)), offset: 3 });
        // T[4..] = "abaa$" → "abaa" on the edge from "a" to leaf 0.
        let a = tree.child_by_letter(NodeId::ROOT, 1).unwrap();
        assert_eq!(beta[1], Locus { anchor: a, edge: Some(tree.leaf(0)), offset: 3 });
        assert_eq!(tree.locus_depth(&beta[1]), 4);
        // T[8..] = "$" → root.
        assert_eq!(beta[3], Locus::ROOT);
    }
}
