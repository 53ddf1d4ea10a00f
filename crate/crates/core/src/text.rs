//! Packed text representation.
//!
//! Characters are mapped to integer codes and stored several per 64-bit
//! word, first character in the most significant bits. Code `0` is the
//! sentinel `$` (smallest), codes `1..=σ` are the input symbols and code
//! `σ+1` is the filler `#` (largest), which never occurs in a pattern.
//!
//! Positions are 1-based throughout, matching the way boundary ordinals
//! are turned into text positions (`r·j + 1`).

use crate::error::{Error, Result};

/// A character code. `0` is the sentinel, `σ+1` the filler.
pub type Code = u16;

/// The sentinel code, lexicographically smallest.
pub const SENTINEL: Code = 0;

/// Width of a storage word in bits.
pub const WORD_BITS: usize = 64;

/// How input bytes are mapped to codes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphabetMode {
    /// Only the bytes that occur in the text get a code, in byte order.
    #[default]
    Auto,
    /// Every byte value gets a code (`σ = 256`).
    Byte,
}

/// Bijection between input bytes and codes `1..=σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    codes: [Code; 256],
}

impl Alphabet {
    pub fn from_text(raw: &[u8], mode: AlphabetMode) -> Self {
        let symbols = match mode {
            AlphabetMode::Byte => (0..=255u8).collect(),
            AlphabetMode::Auto => {
                let mut seen = [false; 256];
                for &b in raw {
                    seen[b as usize] = true;
                }
                (0..=255u8).filter(|&b| seen[b as usize]).collect()
            }
        };
        Self::from_symbols(symbols).expect("symbols are sorted and distinct")
    }

    /// Rebuilds an alphabet from its symbol list, which must be strictly increasing.
    pub fn from_symbols(symbols: Vec<u8>) -> Option<Self> {
        if symbols.is_empty() || symbols.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        let mut codes = [0; 256];
        for (i, &b) in symbols.iter().enumerate() {
            codes[b as usize] = (i + 1) as Code;
        }
        Some(Self { symbols, codes })
    }

    /// Number of input symbols, σ.
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn filler(&self) -> Code {
        (self.symbols.len() + 1) as Code
    }

    /// Number of distinct codes including sentinel and filler, σ+2.
    pub fn base(&self) -> usize {
        self.symbols.len() + 2
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn code_of(&self, b: u8) -> Option<Code> {
        match self.codes[b as usize] {
            0 => None,
            c => Some(c),
        }
    }

    pub fn char_of(&self, code: Code) -> Option<u8> {
        if code == SENTINEL {
            return None;
        }
        self.symbols.get(code as usize - 1).copied()
    }

    /// Encodes a byte pattern, rejecting bytes that have no code.
    pub fn encode(&self, bytes: &[u8]) -> Result<Vec<Code>> {
        bytes
            .iter()
            .map(|&b| self.code_of(b).ok_or(Error::InvalidCode { code: b as u32 }))
            .collect()
    }
}

/// Bits needed to store any of the σ+2 codes.
pub fn bits_per_char(sigma: usize) -> usize {
    (usize::BITS - (sigma + 1).leading_zeros()) as usize
}

/// Reads `len` codes starting at 0-based index `start` of a packed word array
/// and returns them right-aligned, first code most significant.
#[inline]
fn extract(words: &[u64], capacity: usize, bits: usize, start: usize, len: usize) -> u64 {
    debug_assert!(len <= capacity);
    if len == 0 {
        return 0;
    }
    let w = start / capacity;
    let slot = start % capacity;
    let span = capacity * bits;
    let hi = words[w] as u128;
    let lo = words.get(w + 1).copied().unwrap_or(0) as u128;
    let pair = (hi << span) | lo;
    let shift = (2 * capacity - slot - len) * bits;
    let mask = if len * bits == 64 { u64::MAX } else { (1u64 << (len * bits)) - 1 };
    ((pair >> shift) as u64) & mask
}

fn pack(codes: impl ExactSizeIterator<Item = Code>, capacity: usize, bits: usize) -> Vec<u64> {
    let len = codes.len();
    let mut words = vec![0u64; len.div_ceil(capacity).max(1)];
    for (i, c) in codes.enumerate() {
        let shift = (capacity - 1 - i % capacity) * bits;
        words[i / capacity] |= (c as u64) << shift;
    }
    words
}

/// Longest common prefix of two packed chunks of `len` codes.
#[inline]
fn chunk_lcp(a: u64, b: u64, len: usize, bits: usize) -> usize {
    let x = a ^ b;
    if x == 0 {
        return len;
    }
    let used = len * bits;
    let lead = x.leading_zeros() as usize - (64 - used);
    lead / bits
}

/// The text `T[1..n]`, padded to a multiple of the block size and packed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedText {
    alphabet: Alphabet,
    n_raw: usize,
    n: usize,
    block: usize,
    capacity: usize,
    bits: usize,
    half_block: usize,
    words: Vec<u64>,
}

impl PackedText {
    /// Encodes `raw` with block size `block`.
    ///
    /// The padding is `raw · #^f · $` with `f` fillers chosen so that the
    /// length is a multiple of `block`; the sentinel is the unique last letter.
    pub fn encode(
        raw: &[u8],
        block: usize,
        mode: AlphabetMode,
        word_capacity: Option<usize>,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyText);
        }
        if block == 0 {
            return Err(Error::InvalidBlockSize);
        }
        let alphabet = Alphabet::from_text(raw, mode);
        let sigma = alphabet.size();
        let bits = bits_per_char(sigma);
        let capacity = word_capacity.unwrap_or(WORD_BITS / bits);
        if bits > WORD_BITS / 2 || capacity == 0 || capacity * bits > WORD_BITS {
            return Err(Error::AlphabetOverflow {
                sigma,
                bits_per_char: bits,
                capacity,
                word_bits: WORD_BITS,
            });
        }
        if block > capacity {
            return Err(Error::BlockTooLarge { block, capacity });
        }
        let n_raw = raw.len();
        let n = (n_raw + 1).div_ceil(block) * block;
        let filler = alphabet.filler();
        let codes = raw
            .iter()
            .map(|&b| alphabet.code_of(b).expect("alphabet covers the text"))
            .chain(std::iter::repeat_n(filler, n - n_raw - 1))
            .chain(std::iter::once(SENTINEL));
        let codes: Vec<Code> = codes.collect();
        let words = pack(codes.iter().copied(), capacity, bits);
        Ok(Self {
            alphabet,
            n_raw,
            n,
            block,
            capacity,
            bits,
            half_block: (block / 2).max(1),
            words,
        })
    }

    /// Reassembles a text from its serialized parts, validating the layout.
    pub(crate) fn from_parts(
        alphabet: Alphabet,
        n_raw: usize,
        n: usize,
        block: usize,
        capacity: usize,
        words: Vec<u64>,
    ) -> std::result::Result<Self, String> {
        let bits = bits_per_char(alphabet.size());
        if block == 0 || capacity == 0 || block > capacity || capacity * bits > WORD_BITS {
            return Err("inconsistent block size or word capacity".into());
        }
        if !n.is_multiple_of(block) || n <= n_raw || n > n_raw + block {
            return Err("inconsistent text length".into());
        }
        if words.len() != n.div_ceil(capacity).max(1) {
            return Err("word count does not match text length".into());
        }
        let text = Self {
            alphabet,
            n_raw,
            n,
            block,
            capacity,
            bits,
            half_block: (block / 2).max(1),
            words,
        };
        let filler = text.alphabet.filler();
        for p in 1..=n {
            let c = text.code(p);
            let ok = match p {
                p if p <= n_raw => (1..filler).contains(&c),
                p if p == n => c == SENTINEL,
                _ => c == filler,
            };
            if !ok {
                return Err(format!("unexpected code {c} at position {p}"));
            }
        }
        Ok(text)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Length of the original input.
    pub fn raw_len(&self) -> usize {
        self.n_raw
    }

    /// Padded length `n`, a multiple of the block size.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Block size `r`.
    pub fn block(&self) -> usize {
        self.block
    }

    /// Number of blocks, `n / r`.
    pub fn blocks(&self) -> usize {
        self.n / self.block
    }

    /// Characters per word, `W`.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn bits_per_char(&self) -> usize {
        self.bits
    }

    /// Letters per packed half-block entry, `max(1, ⌊r/2⌋)`.
    pub fn half_block(&self) -> usize {
        self.half_block
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn char_at(&self, p: usize) -> Result<Code> {
        if p == 0 || p > self.n {
            return Err(Error::OutOfRange { pos: p, len: 1, limit: self.n });
        }
        Ok(self.code(p))
    }

    /// Unchecked variant of [`PackedText::char_at`] for internal use.
    #[inline]
    pub(crate) fn code(&self, p: usize) -> Code {
        extract(&self.words, self.capacity, self.bits, p - 1, 1) as Code
    }

    /// All `n` codes, unpacked.
    pub fn codes(&self) -> Vec<Code> {
        (1..=self.n).map(|p| self.code(p)).collect()
    }

    /// The original input bytes.
    pub fn raw_bytes(&self) -> Vec<u8> {
        (1..=self.n_raw)
            .map(|p| self.alphabet.char_of(self.code(p)).expect("body holds symbol codes"))
            .collect()
    }

    /// `len` codes starting at position `p`, packed right-aligned.
    #[inline]
    pub(crate) fn chunk(&self, p: usize, len: usize) -> u64 {
        extract(&self.words, self.capacity, self.bits, p - 1, len)
    }

    /// Packs a pattern with this text's layout; codes must lie in `1..=σ`.
    pub fn pack_pattern(&self, codes: &[Code]) -> Result<PackedPattern> {
        let filler = self.alphabet.filler();
        if let Some(&c) = codes.iter().find(|&&c| c == SENTINEL || c >= filler) {
            return Err(Error::InvalidCode { code: c as u32 });
        }
        Ok(PackedPattern {
            words: pack(codes.iter().copied(), self.capacity, self.bits),
            codes: codes.to_vec(),
            capacity: self.capacity,
            bits: self.bits,
        })
    }

    /// Length of the longest common prefix of `T[text_pos..text_pos+len)` and
    /// `P[pat_pos..pat_pos+len)`, computed with one packed comparison.
    pub fn compare_span(
        &self,
        text_pos: usize,
        pat: &PackedPattern,
        pat_pos: usize,
        len: usize,
    ) -> Result<usize> {
        if len == 0 {
            return Ok(0);
        }
        if len > self.capacity {
            return Err(Error::BadLength { expected: self.capacity, got: len });
        }
        if text_pos == 0 || text_pos + len - 1 > self.n {
            return Err(Error::OutOfRange { pos: text_pos, len, limit: self.n });
        }
        if pat_pos == 0 || pat_pos + len - 1 > pat.len() {
            return Err(Error::OutOfRange { pos: pat_pos, len, limit: pat.len() });
        }
        Ok(self.span_lcp(text_pos, pat, pat_pos, len))
    }

    #[inline]
    pub(crate) fn span_lcp(&self, text_pos: usize, pat: &PackedPattern, pat_pos: usize, len: usize) -> usize {
        let a = self.chunk(text_pos, len);
        let b = pat.chunk(pat_pos, len);
        chunk_lcp(a, b, len, self.bits)
    }

    /// Longest common prefix of two text spans of at most `len <= W` codes.
    #[inline]
    pub(crate) fn text_lcp(&self, p1: usize, p2: usize, len: usize) -> usize {
        chunk_lcp(self.chunk(p1, len), self.chunk(p2, len), len, self.bits)
    }

    /// Encodes exactly `h` codes as one base-(σ+2) number, first letter most
    /// significant.
    pub fn pack_halfblock(&self, letters: &[Code]) -> Result<u64> {
        if letters.len() != self.half_block {
            return Err(Error::BadLength { expected: self.half_block, got: letters.len() });
        }
        let base = self.alphabet.base() as u64;
        letters.iter().try_fold(0u64, |acc, &c| {
            if c as u64 >= base {
                Err(Error::InvalidCode { code: c as u32 })
            } else {
                Ok(acc * base + c as u64)
            }
        })
    }
}

/// Inverse of [`PackedText::pack_halfblock`].
pub fn unpack_halfblock(mut value: u64, base: usize, h: usize) -> Vec<Code> {
    let mut out = vec![0; h];
    for slot in out.iter_mut().rev() {
        *slot = (value % base as u64) as Code;
        value /= base as u64;
    }
    out
}

/// A pattern `P[1..m]` packed with the text's word layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedPattern {
    codes: Vec<Code>,
    words: Vec<u64>,
    capacity: usize,
    bits: usize,
}

impl PackedPattern {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    /// Code at 1-based position `p`.
    #[inline]
    pub fn at(&self, p: usize) -> Code {
        self.codes[p - 1]
    }

    #[inline]
    fn chunk(&self, p: usize, len: usize) -> u64 {
        extract(&self.words, self.capacity, self.bits, p - 1, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PackedText {
        PackedText::encode(b"abaabaa", 2, AlphabetMode::Auto, None).unwrap()
    }

    #[test]
    fn sample_padding_and_codes() {
        let t = sample();
        assert_eq!(t.raw_len(), 7);
        assert_eq!(t.len(), 8);
        assert_eq!(t.codes(), vec![1, 2, 1, 1, 2, 1, 1, 0]);
        assert_eq!(t.char_at(1).unwrap(), 1);
        assert_eq!(t.char_at(8).unwrap(), SENTINEL);
        assert!(matches!(t.char_at(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.char_at(9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn fillers_precede_the_sentinel() {
        let t = PackedText::encode(b"a", 4, AlphabetMode::Auto, None).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.codes(), vec![1, 2, 2, 0]);
        // The last letter is unique.
        let codes = t.codes();
        assert_eq!(codes.iter().filter(|&&c| c == codes[3]).count(), 1);
    }

    #[test]
    fn unit_block() {
        let t = PackedText::encode(b"ab", 1, AlphabetMode::Auto, None).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.blocks(), 3);
        assert_eq!(t.half_block(), 1);
    }

    #[test]
    fn encode_errors() {
        assert!(matches!(
            PackedText::encode(b"", 2, AlphabetMode::Auto, None),
            Err(Error::EmptyText)
        ));
        assert!(matches!(
            PackedText::encode(b"ab", 0, AlphabetMode::Auto, None),
            Err(Error::InvalidBlockSize)
        ));
        // σ = 2 → 2 bits per char → 32 chars per word.
        assert!(matches!(
            PackedText::encode(b"ab", 33, AlphabetMode::Auto, None),
            Err(Error::BlockTooLarge { block: 33, capacity: 32 })
        ));
        assert!(matches!(
            PackedText::encode(b"ab", 2, AlphabetMode::Auto, Some(33)),
            Err(Error::AlphabetOverflow { .. })
        ));
        // Byte mode: 258 codes need 9 bits, so 7 characters per word.
        let t = PackedText::encode(b"ab", 7, AlphabetMode::Byte, None).unwrap();
        assert_eq!(t.bits_per_char(), 9);
        assert_eq!(t.capacity(), 7);
        assert!(matches!(
            PackedText::encode(b"ab", 8, AlphabetMode::Byte, None),
            Err(Error::BlockTooLarge { .. })
        ));
    }

    #[test]
    fn compare_span_examples() {
        let t = sample();
        let p = t.pack_pattern(&t.alphabet().encode(b"aba").unwrap()).unwrap();
        assert_eq!(t.compare_span(1, &p, 1, 2).unwrap(), 2);
        assert_eq!(t.compare_span(5, &p, 1, 2).unwrap(), 0);
        assert_eq!(t.compare_span(5, &p, 1, 0).unwrap(), 0);
        assert!(t.compare_span(8, &p, 1, 2).is_err());
        assert!(t.compare_span(1, &p, 3, 2).is_err());
    }

    #[test]
    fn pattern_codes_are_checked() {
        let t = sample();
        assert!(matches!(t.pack_pattern(&[1, 0]), Err(Error::InvalidCode { code: 0 })));
        assert!(matches!(t.pack_pattern(&[3]), Err(Error::InvalidCode { code: 3 })));
        assert!(matches!(t.alphabet().encode(b"abc"), Err(Error::InvalidCode { .. })));
    }

    #[test]
    fn halfblock_examples() {
        let t1 = PackedText::encode(b"ab", 2, AlphabetMode::Auto, None).unwrap();
        assert_eq!(t1.half_block(), 1);
        assert_eq!(t1.pack_halfblock(&[1]).unwrap(), 1);
        let t2 = PackedText::encode(b"abab", 4, AlphabetMode::Auto, None).unwrap();
        assert_eq!(t2.half_block(), 2);
        assert_eq!(t2.pack_halfblock(&[1, 2]).unwrap(), 6);
        assert_eq!(t2.pack_halfblock(&[0, 0]).unwrap(), 0);
        assert!(matches!(t2.pack_halfblock(&[1]), Err(Error::BadLength { .. })));
        assert!(matches!(t2.pack_halfblock(&[1, 4]), Err(Error::InvalidCode { .. })));
        assert_eq!(unpack_halfblock(6, 4, 2), vec![1, 2]);
    }

    #[test]
    fn alphabet_round_trip() {
        let a = Alphabet::from_text(b"hello", AlphabetMode::Auto);
        assert_eq!(a.size(), 4);
        for &b in b"ehlo" {
            assert_eq!(a.char_of(a.code_of(b).unwrap()), Some(b));
        }
        assert_eq!(a.code_of(b'z'), None);
        assert_eq!(a.char_of(SENTINEL), None);
        assert_eq!(a.char_of(a.filler()), None);
        let full = Alphabet::from_text(b"x", AlphabetMode::Byte);
        assert_eq!(full.size(), 256);
        assert_eq!(full.code_of(0), Some(1));
    }
}
