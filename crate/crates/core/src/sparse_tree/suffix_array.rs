use crate::text::PackedText;

/// The r-spaced suffix array: ranks of the block-aligned suffixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSuffixArray {
    /// `sa[i - 1]` is the ordinal of rank `i`.
    sa: Vec<usize>,
    /// `inv[j]` is the rank of ordinal `j`.
    inv: Vec<usize>,
}

impl SparseSuffixArray {
    /// Builds the array from a permutation of ordinals in rank order.
    ///
    /// Returns `None` unless `order` is a permutation of `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Option<Self> {
        let mut inv = vec![0; order.len()];
        for (i, &j) in order.iter().enumerate() {
            if j >= order.len() || inv[j] != 0 {
                return None;
            }
            inv[j] = i + 1;
        }
        Some(Self { sa: order, inv })
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// Ordinal with the given 1-based rank.
    #[inline]
    pub fn ordinal(&self, rank: usize) -> usize {
        self.sa[rank - 1]
    }

    /// 1-based rank of ordinal `j`.
    #[inline]
    pub fn rank(&self, j: usize) -> usize {
        self.inv[j]
    }

    /// Ordinals in rank order.
    pub fn order(&self) -> &[usize] {
        &self.sa
    }
}

/// Block-rank meta string: block `j` is replaced by its rank among distinct blocks.
fn meta_string(text: &PackedText) -> Vec<u32> {
    let r = text.block();
    let keys: Vec<u64> = (0..text.blocks()).map(|j| text.chunk(r * j + 1, r)).collect();
    let mut distinct = keys.clone();
    distinct.sort_unstable();
    distinct.dedup();
    keys.iter()
        .map(|k| distinct.binary_search(k).expect("key is present") as u32)
        .collect()
}

/// Prefix-doubling suffix sort of an integer string.
fn sort_suffixes(s: &[u32]) -> Vec<usize> {
    let n = s.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<usize> = s.iter().map(|&c| c as usize).collect();
    let mut next = vec![0usize; n];
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0]] = 0;
        for w in 1..n {
            next[sa[w]] = next[sa[w - 1]] + usize::from(key(sa[w - 1]) != key(sa[w]));
        }
        std::mem::swap(&mut rank, &mut next);
        if n == 0 || rank[sa[n - 1]] == n - 1 {
            return sa;
        }
        k *= 2;
    }
}

/// Sorts the block-aligned suffixes `T[r·j + 1..]`.
///
/// Block-aligned suffixes compare exactly like suffixes of the string of
/// block ranks, so sorting that string of length `n / r` is enough.
pub fn build_suffix_array_r(text: &PackedText) -> SparseSuffixArray {
    let order = sort_suffixes(&meta_string(text));
    SparseSuffixArray::from_order(order).expect("suffix sort yields a permutation")
}

/// Character-level LCP of each rank with its predecessor (`lcp[0] = 0`).
///
/// Kasai over the block-rank string gives the number of equal leading blocks;
/// one packed comparison of the first differing blocks finishes the count.
pub(crate) fn boundary_lcp(text: &PackedText, sa: &SparseSuffixArray) -> Vec<usize> {
    let meta = meta_string(text);
    let nb = meta.len();
    let r = text.block();
    let mut lcp = vec![0usize; nb];
    let mut h = 0usize;
    for j in 0..nb {
        let rank = sa.rank(j);
        if rank == 1 {
            h = 0;
            continue;
        }
        let prev = sa.ordinal(rank - 1);
        while j + h < nb && prev + h < nb && meta[j + h] == meta[prev + h] {
            h += 1;
        }
        // The suffixes differ inside block h of both; the unique final block
        // guarantees it exists.
        let extra = text.text_lcp(r * (j + h) + 1, r * (prev + h) + 1, r);
        lcp[rank - 1] = h * r + extra;
        h = h.saturating_sub(1);
    }
    lcp
}
