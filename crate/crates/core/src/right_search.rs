//! Single-pass search for all pattern suffixes `P[k+1..]`, `0 <= k < r`,
//! that start at a block boundary.
//!
//! The cursor descends the sparse suffix tree comparing up to `r` letters at
//! a time. When the current suffix mismatches or is used up, the search
//! rewinds to the explicit ancestor of the cursor, follows its typed suffix
//! link and moves on to `k + type`; every skipped `k` is known not to occur
//! at a boundary.

use crate::error::{Error, Result};
use crate::interval::RankInterval;
use crate::sparse_tree::{Locus, NodeId, SparseSuffixTree};
use crate::text::{PackedPattern, PackedText};

/// Rank interval of `P[k+1..]` among the block-aligned suffixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuffixHit {
    pub k: usize,
    pub interval: RankInterval,
}

/// Work counters for one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchCounters {
    /// Full `r`-letter packed comparisons.
    pub word_comparisons: usize,
    /// Letters compared in shorter chunks.
    pub char_comparisons: usize,
    pub link_follows: usize,
}

impl SearchCounters {
    pub fn total(&self) -> usize {
        self.word_comparisons + self.char_comparisons + self.link_follows
    }
}

/// Finds the rank interval of every pattern suffix `P[k+1..]`, `0 <= k < r`,
/// that occurs at a block boundary. Requires `m >= r`.
pub fn right_search(
    tree: &SparseSuffixTree,
    text: &PackedText,
    pat: &PackedPattern,
) -> Result<(Vec<SuffixHit>, SearchCounters)> {
    let r = tree.block();
    let m = pat.len();
    if m < r {
        return Err(Error::PatternTooShort { m, block: r });
    }
    let filler = text.alphabet().filler();
    if let Some(&c) = pat.codes().iter().find(|&&c| c == 0 || c >= filler) {
        return Err(Error::InvalidCode { code: c as u32 });
    }

    let mut hits = Vec::new();
    let mut counters = SearchCounters::default();
    let mut k = 0;
    let mut locus = Locus::ROOT;
    // Next pattern position to compare; always k + 1 + depth(locus).
    let mut p = 1;
    while k < r {
        debug_assert_eq!(p, k + 1 + tree.locus_depth(&locus));
        while p <= m {
            let child = match locus.edge {
                Some(c) if locus.offset > 0 => c,
                _ => match tree.child_by_letter(locus.anchor, pat.at(p)) {
                    Some(c) => c,
                    None => break,
                },
            };
            let (start, len) = tree.edge_span(child);
            let chunk = r.min(len - locus.offset).min(m - p + 1);
            if chunk == r {
                counters.word_comparisons += 1;
            } else {
                counters.char_comparisons += chunk;
            }
            let matched = text.span_lcp(start + locus.offset, pat, p, chunk);
            p += matched;
            let offset = locus.offset + matched;
            locus = if offset == len {
                Locus::node(child)
            } else if offset == 0 {
                Locus::node(locus.anchor)
            } else {
                Locus { anchor: locus.anchor, edge: Some(child), offset }
            };
            if matched < chunk {
                break;
            }
        }

        if p > m {
            let below = tree.closest_explicit_descendant(&locus);
            hits.push(SuffixHit {
                k,
                interval: RankInterval::new(tree.min_rank(below), tree.max_rank(below)),
            });
        }

        p -= locus.offset;
        match tree.link(locus.anchor) {
            Some(link) => {
                counters.link_follows += 1;
                locus = link.target;
                k += link.kind;
            }
            None => {
                debug_assert_eq!(locus.anchor, NodeId::ROOT);
                locus = Locus::ROOT;
                k += 1;
                p = k + 1;
            }
        }
    }
    Ok((hits, counters))
}
