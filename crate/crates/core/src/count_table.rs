//! Four-Russians table of letter counts inside one packed half-block entry.

use crate::text::unpack_halfblock;

/// Default limit on the number of table cells.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 22;

/// `C[u, b, q]`: occurrences of code `b` among the first `q` letters of the
/// half-block whose packed value is `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourRussiansTable {
    base: usize,
    h: usize,
    cells: Option<Vec<u8>>,
}

/// Number of cells of a table over `base` codes and entries of `h` letters,
/// or `None` on overflow.
pub fn table_cells(base: usize, h: usize) -> Option<usize> {
    let h32 = u32::try_from(h).ok()?;
    base.checked_pow(h32.checked_add(1)?)?.checked_mul(h)
}

/// Builds the table, or a disabled one when it would exceed `budget` cells.
pub fn build_count_table(sigma: usize, h: usize, budget: usize) -> FourRussiansTable {
    let base = sigma + 2;
    let cells = match table_cells(base, h) {
        Some(c) if c <= budget => c,
        _ => return FourRussiansTable { base, h, cells: None },
    };
    let instances = cells / (base * h);
    let mut table = vec![0u8; cells];
    for u in 0..instances {
        let letters = unpack_halfblock(u as u64, base, h);
        let row = &mut table[u * base * h..(u + 1) * base * h];
        for (q, &c) in letters.iter().enumerate() {
            // Counts for prefix length q+1 start from those for length q.
            for b in 0..base {
                let prev = if q == 0 { 0 } else { row[b * h + q - 1] };
                row[b * h + q] = prev + u8::from(b == c as usize);
            }
        }
    }
    FourRussiansTable { base, h, cells: Some(table) }
}

impl FourRussiansTable {
    pub fn is_enabled(&self) -> bool {
        self.cells.is_some()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn half_block(&self) -> usize {
        self.h
    }

    /// Number of stored cells, 0 when disabled.
    pub fn len(&self) -> usize {
        self.cells.as_ref().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn cells(&self) -> Option<&[u8]> {
        self.cells.as_deref()
    }

    pub(crate) fn from_cells(base: usize, h: usize, cells: Option<Vec<u8>>) -> Self {
        Self { base, h, cells }
    }

    /// Occurrences of `b` among the first `q` letters (`1 <= q <= h`) of the
    /// entry `u`. Falls back to decoding the entry when the table is disabled.
    #[inline]
    pub fn count(&self, u: u64, b: usize, q: usize) -> usize {
        match &self.cells {
            Some(cells) => cells[(u as usize * self.base + b) * self.h + q - 1] as usize,
            None => {
                let mut value = u;
                let mut count = 0;
                // Letters sit most significant first; peel from the right.
                for pos in (0..self.h).rev() {
                    let c = (value % self.base as u64) as usize;
                    value /= self.base as u64;
                    if pos < q && c == b {
                        count += 1;
                    }
                }
                count
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_unit_half_block() {
        let t = build_count_table(2, 1, DEFAULT_TABLE_BUDGET);
        assert!(t.is_enabled());
        assert_eq!(t.len(), 16);
        for u in 0..4u64 {
            for b in 0..4 {
                assert_eq!(t.count(u, b, 1), usize::from(u as usize == b));
            }
        }
    }

    #[test]
    fn cell_count_formula() {
        // With the two reserved codes removed from the base this is σ^{h+1}·h.
        for (sigma, h) in [(2, 1), (2, 2), (4, 3), (16, 2)] {
            let t = build_count_table(sigma, h, usize::MAX);
            assert_eq!(t.len(), (sigma + 2).pow(h as u32 + 1) * h);
            assert_eq!(table_cells(sigma + 2, h), Some(t.len()));
        }
        assert_eq!(table_cells(4, 2), Some(4usize.pow(3) * 2));
    }

    #[test]
    fn budget_guard_disables() {
        let t = build_count_table(255, 8, 1 << 22);
        assert!(!t.is_enabled());
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn rows_sum_to_prefix_length_and_match_fallback() {
        let (sigma, h) = (3, 3);
        let on = build_count_table(sigma, h, usize::MAX);
        let off = build_count_table(sigma, h, 0);
        let base = sigma + 2;
        for u in 0..(base.pow(h as u32)) as u64 {
            for q in 1..=h {
                let total: usize = (0..base).map(|b| on.count(u, b, q)).sum();
                assert_eq!(total, q);
                for b in 0..base {
                    assert_eq!(on.count(u, b, q), off.count(u, b, q));
                }
            }
        }
    }
}
