use super::{boundary_lcp, Node, NodeId, SparseSuffixArray, SparseSuffixTree};
use crate::text::PackedText;

/// Builds the compacted trie of the block-aligned suffixes from their sorted
/// order and adjacent LCPs. Suffix links are left unset.
pub fn build_tree(text: &PackedText, sa: SparseSuffixArray) -> SparseSuffixTree {
    let r = text.block();
    let n = text.len();
    let nb = sa.len();
    let lcp = boundary_lcp(text, &sa);

    let mut draft = Draft::default();
    draft.add(0, NodeId::ROOT, 0, None);
    let mut leaves = vec![NodeId::ROOT; nb];

    let mut stack = vec![NodeId::ROOT];
    for rank in 1..=nb {
        let j = sa.ordinal(rank);
        let l = lcp[rank - 1];
        let mut last = None;
        while draft.depth[stack.last().unwrap().index()] > l {
            last = stack.pop();
        }
        let top = *stack.last().unwrap();
        let attach = if draft.depth[top.index()] < l {
            let last = last.expect("a deeper node was popped");
            let split = draft.add(l, top, j, None);
            let moved = draft.kids[top.index()].pop();
            debug_assert_eq!(moved, Some(last));
            draft.kids[top.index()].push(split);
            draft.kids[split.index()].push(last);
            draft.parent[last.index()] = split;
            stack.push(split);
            split
        } else {
            top
        };
        let leaf = draft.add(n - r * j, attach, j, Some(j));
        draft.kids[attach.index()].push(leaf);
        leaves[j] = leaf;
        stack.push(leaf);
    }
    let Draft { depth, parent, rep, ordinal, kids } = draft;

    // Every node keeps the ordinal of some boundary occurrence of its label;
    // split nodes take the suffix whose insertion created them.
    let mut nodes: Vec<Node> = (0..depth.len())
        .map(|v| {
            let p = parent[v];
            let label_start = if v == 0 { 0 } else { r * rep[v] + 1 + depth[p.index()] };
            Node {
                parent: p,
                label_start,
                depth: depth[v],
                min_rank: 0,
                max_rank: 0,
                ordinal: ordinal[v],
                children: Vec::new(),
                link: None,
            }
        })
        .collect();
    for v in 0..nodes.len() {
        nodes[v].children = kids[v]
            .iter()
            .map(|&c| (text.code(nodes[c.index()].label_start), c))
            .collect();
    }

    let mut tree = SparseSuffixTree { nodes, leaves, sa, block: r };
    for v in tree.preorder().into_iter().rev() {
        let node = &tree.nodes[v.index()];
        let (lo, hi) = match node.ordinal {
            Some(j) => (tree.sa.rank(j), tree.sa.rank(j)),
            None => {
                let first = node.children.first().expect("internal node has children").1;
                let last = node.children.last().unwrap().1;
                (tree.nodes[first.index()].min_rank, tree.nodes[last.index()].max_rank)
            }
        };
        tree.nodes[v.index()].min_rank = lo;
        tree.nodes[v.index()].max_rank = hi;
    }
    tree
}

#[derive(Default)]
struct Draft {
    depth: Vec<usize>,
    parent: Vec<NodeId>,
    rep: Vec<usize>,
    ordinal: Vec<Option<usize>>,
    kids: Vec<Vec<NodeId>>,
}

impl Draft {
    fn add(&mut self, depth: usize, parent: NodeId, rep: usize, ordinal: Option<usize>) -> NodeId {
        let id = NodeId(self.depth.len() as u32);
        self.depth.push(depth);
        self.parent.push(parent);
        self.rep.push(rep);
        self.ordinal.push(ordinal);
        self.kids.push(Vec::new());
        id
    }
}
