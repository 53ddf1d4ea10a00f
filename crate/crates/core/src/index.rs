use crate::block_trie::BlockTrie;
use crate::count_table::DEFAULT_TABLE_BUDGET;
use crate::error::{Error, Result};
use crate::left_search::{left_search, LeftCounters, LeftQuery};
use crate::right_search::{right_search, SearchCounters};
use crate::sparse_tree::SparseSuffixTree;
use crate::text::{AlphabetMode, Code, PackedPattern, PackedText};

/// Build-time options.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexConfig {
    /// Block size `r`.
    pub block: usize,
    /// Characters per word; defaults to `64 / bits_per_char`.
    pub word_capacity: Option<usize>,
    pub alphabet: AlphabetMode,
    /// Largest Four-Russians table (in cells) that will be built.
    pub table_budget: usize,
    /// Keep `Ord_v` for internal trie nodes (for testing).
    pub retain_ord: bool,
}

impl IndexConfig {
    pub fn new(block: usize) -> Self {
        Self {
            block,
            word_capacity: None,
            alphabet: AlphabetMode::Auto,
            table_budget: DEFAULT_TABLE_BUDGET,
            retain_ord: false,
        }
    }
}

/// An occurrence of the pattern: 1-based start position and its offset `k`
/// from the first block boundary at or after it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub pos: usize,
    pub k: usize,
}

/// Counters of one left search call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LeftCall {
    pub k: usize,
    pub found: usize,
    pub counters: LeftCounters,
}

/// Work done by one query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub right: SearchCounters,
    pub left_calls: Vec<LeftCall>,
    /// Packed comparisons of the short-pattern scan.
    pub scan_comparisons: usize,
    pub occurrences: usize,
}

impl QueryStats {
    pub fn left_total(&self) -> LeftCounters {
        self.left_calls.iter().fold(LeftCounters::default(), |acc, c| LeftCounters {
            descent_nodes: acc.descent_nodes + c.counters.descent_nodes,
            label_checks: acc.label_checks + c.counters.label_checks,
            traverse_visits: acc.traverse_visits + c.counters.traverse_visits,
        })
    }

    /// All instrumented work, including one unit per reported occurrence.
    pub fn total_work(&self) -> usize {
        self.right.total() + self.left_total().total() + self.scan_comparisons + self.occurrences
    }
}

/// Measured sizes of the index components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexStats {
    pub raw_len: usize,
    pub len: usize,
    pub block: usize,
    pub sigma: usize,
    pub word_capacity: usize,
    pub half_block: usize,
    pub bits_per_char: usize,
    /// The `n / r` yardstick.
    pub blocks: usize,
    pub text_words: usize,
    pub sa_words: usize,
    pub tree_nodes: usize,
    pub tree_leaves: usize,
    pub tree_words: usize,
    pub trie_nodes: usize,
    pub rho_letters: usize,
    pub rho_entries: usize,
    pub count_cells: usize,
    pub leaf_ordinals: usize,
    /// Cells of the Four-Russians table, `None` when disabled.
    pub table_cells: Option<usize>,
}

impl IndexStats {
    /// Whether all `ρ` arrays together hold at most `n + n/r` letters.
    pub fn rho_within_bound(&self) -> bool {
        self.rho_letters <= self.len + self.blocks
    }
}

/// The assembled index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Index {
    pub(crate) text: PackedText,
    pub(crate) tree: SparseSuffixTree,
    pub(crate) trie: BlockTrie,
}

impl Index {
    pub fn build(raw: &[u8], config: &IndexConfig) -> Result<Self> {
        let text = PackedText::encode(raw, config.block, config.alphabet, config.word_capacity)?;
        let tree = SparseSuffixTree::build(&text)?;
        let trie = BlockTrie::build(&text, tree.suffix_array(), config.table_budget, config.retain_ord)?;
        Ok(Self { text, tree, trie })
    }

    pub fn text(&self) -> &PackedText {
        &self.text
    }

    pub fn tree(&self) -> &SparseSuffixTree {
        &self.tree
    }

    pub fn trie(&self) -> &BlockTrie {
        &self.trie
    }

    #[doc(hidden)]
    pub fn trie_mut(&mut self) -> &mut BlockTrie {
        &mut self.trie
    }

    pub fn block(&self) -> usize {
        self.text.block()
    }

    /// All occurrences of `pattern`, sorted by position.
    pub fn find_all(&self, pattern: &[u8]) -> Result<Vec<Occurrence>> {
        self.find_all_with_stats(pattern).map(|(occ, _)| occ)
    }

    /// Like [`Index::find_all`], also returning the work counters.
    ///
    /// A pattern byte outside the text's alphabet cannot occur, so such a
    /// pattern simply has no occurrences.
    pub fn find_all_with_stats(&self, pattern: &[u8]) -> Result<(Vec<Occurrence>, QueryStats)> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        match self.text.alphabet().encode(pattern) {
            Ok(codes) => self.find_codes(&codes),
            Err(Error::InvalidCode { .. }) => Ok((Vec::new(), QueryStats::default())),
            Err(e) => Err(e),
        }
    }

    /// Occurrences of an already encoded pattern with codes in `1..=σ`.
    pub fn find_codes(&self, codes: &[Code]) -> Result<(Vec<Occurrence>, QueryStats)> {
        if codes.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let pat = self.text.pack_pattern(codes)?;
        let r = self.block();
        let m = pat.len();
        let mut stats = QueryStats::default();
        let mut occ = Vec::new();

        if m < r {
            let (positions, comparisons) = self.scan_short(&pat);
            stats.scan_comparisons = comparisons;
            occ.extend(positions.into_iter().map(|pos| Occurrence { pos, k: k_offset(pos, r) }));
        } else {
            let (hits, counters) = right_search(&self.tree, &self.text, &pat)?;
            stats.right = counters;
            let sa = self.tree.suffix_array();
            for hit in hits {
                if hit.k == 0 {
                    occ.extend(hit.interval.iter().map(|rank| Occurrence {
                        pos: r * sa.ordinal(rank) + 1,
                        k: 0,
                    }));
                    continue;
                }
                let mut counters = LeftCounters::default();
                let q = LeftQuery { k: hit.k, interval: hit.interval };
                let found = left_search(&self.trie, &pat, q, &mut counters);
                stats.left_calls.push(LeftCall { k: hit.k, found: found.len(), counters });
                occ.extend(found.into_iter().map(|j| Occurrence { pos: r * j + 1 - hit.k, k: hit.k }));
            }
            occ.sort_unstable();
        }

        debug_assert!(occ.windows(2).all(|w| w[0].pos < w[1].pos), "duplicate occurrence");
        debug_assert!(occ.iter().all(|o| o.pos >= 1 && o.pos + m - 1 <= self.text.raw_len()));
        stats.occurrences = occ.len();
        Ok((occ, stats))
    }

    /// Positions of a pattern shorter than the block size, by a packed scan
    /// of every text position.
    pub fn find_short(&self, pattern: &[u8]) -> Result<Vec<usize>> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let codes = match self.text.alphabet().encode(pattern) {
            Ok(codes) => codes,
            Err(_) => return Ok(Vec::new()),
        };
        if codes.len() >= self.block() {
            return Err(Error::BadLength { expected: self.block() - 1, got: codes.len() });
        }
        let pat = self.text.pack_pattern(&codes)?;
        Ok(self.scan_short(&pat).0)
    }

    fn scan_short(&self, pat: &PackedPattern) -> (Vec<usize>, usize) {
        let m = pat.len();
        let n_raw = self.text.raw_len();
        if m > n_raw {
            return (Vec::new(), 0);
        }
        let last = n_raw - m + 1;
        let found = (1..=last)
            .filter(|&pos| self.text.span_lcp(pos, pat, 1, m) == m)
            .collect();
        (found, last)
    }

    pub fn stats(&self) -> IndexStats {
        let text = &self.text;
        let tree = &self.tree;
        let trie = &self.trie;
        let child_entries: usize = tree.node_ids().map(|v| tree.children(v).len()).sum();
        let links = tree.node_ids().filter(|&v| tree.link(v).is_some()).count();
        IndexStats {
            raw_len: text.raw_len(),
            len: text.len(),
            block: text.block(),
            sigma: text.alphabet().size(),
            word_capacity: text.capacity(),
            half_block: text.half_block(),
            bits_per_char: text.bits_per_char(),
            blocks: text.blocks(),
            text_words: text.words().len(),
            sa_words: 2 * tree.suffix_array().len(),
            tree_nodes: tree.node_count(),
            tree_leaves: tree.leaf_count(),
            tree_words: TREE_NODE_WORDS * tree.node_count() + 2 * child_entries + TREE_LINK_WORDS * links,
            trie_nodes: trie.node_count(),
            rho_letters: trie.rho_letter_total(),
            rho_entries: trie.rho_entry_total(),
            count_cells: trie.count_cell_total(),
            leaf_ordinals: trie.leaf_ord_total(),
            table_cells: trie.table().is_enabled().then(|| trie.table().len()),
        }
    }
}

/// Words per tree node: parent, label start, depth, min rank, max rank, ordinal.
pub const TREE_NODE_WORDS: usize = 6;
/// Words per suffix link: anchor, edge, offset, type.
pub const TREE_LINK_WORDS: usize = 4;

/// Offset of an occurrence at `pos` from the next block boundary.
pub fn k_offset(pos: usize, r: usize) -> usize {
    (r - (pos - 1) % r) % r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Index {
        Index::build(b"abaabaa", &IndexConfig::new(2)).unwrap()
    }

    fn positions(index: &Index, p: &[u8]) -> Vec<usize> {
        index.find_all(p).unwrap().into_iter().map(|o| o.pos).collect()
    }

    #[test]
    fn sample_queries() {
        let index = sample();
        assert_eq!(
            index.find_all(b"aba").unwrap(),
            vec![Occurrence { pos: 1, k: 0 }, Occurrence { pos: 4, k: 1 }]
        );
        assert_eq!(positions(&index, b"ba"), vec![2, 5]);
        assert!(positions(&index, b"bb").is_empty());
        assert_eq!(positions(&index, b"a"), vec![1, 3, 4, 6, 7]);
        assert_eq!(positions(&index, b"b"), vec![2, 5]);
        assert_eq!(index.find_short(b"a").unwrap(), vec![1, 3, 4, 6, 7]);
        assert!(positions(&index, b"abc").is_empty());
        assert!(matches!(index.find_all(b""), Err(Error::EmptyPattern)));
    }

    #[test]
    fn k_offsets() {
        assert_eq!(k_offset(1, 2), 0);
        assert_eq!(k_offset(4, 2), 1);
        assert_eq!(k_offset(3, 4), 2);
        assert_eq!(k_offset(7, 1), 0);
    }

    #[test]
    fn unit_block_is_an_ordinary_suffix_tree() {
        let index = Index::build(b"mississippi", &IndexConfig::new(1)).unwrap();
        assert_eq!(index.tree().leaf_count(), 12);
        assert!(index.trie().node_ids().all(|v| index.trie().depth(v) <= 1));
        assert_eq!(positions(&index, b"ssi"), vec![3, 6]);
        assert_eq!(positions(&index, b"i"), vec![2, 5, 8, 11]);
    }

    #[test]
    fn block_too_large() {
        let mut config = IndexConfig::new(9);
        config.word_capacity = Some(8);
        assert!(matches!(Index::build(b"abc", &config), Err(Error::BlockTooLarge { .. })));
    }

    #[test]
    fn sample_stats() {
        let s = sample().stats();
        assert_eq!((s.len, s.block, s.sigma, s.blocks), (8, 2, 2, 4));
        assert_eq!(s.table_cells, Some(16));
        assert!(s.rho_within_bound());
    }
}
