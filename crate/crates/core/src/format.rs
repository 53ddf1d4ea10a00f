//! Binary index file format.
//!
//! ```text
//! "PSI1" | version: u32 | section*
//! section = payload_len: u64 | payload | crc32(payload): u32
//! ```
//!
//! Sections appear in a fixed order: header, alphabet, text, suffix array,
//! tree, trie, count table. All integers are little-endian; lengths and
//! values inside payloads are `u64` unless noted.

use std::io::{Read, Write};

use crate::block_trie::{BlockTrie, TrieNode, TrieNodeId};
use crate::count_table::{build_count_table, table_cells, FourRussiansTable};
use crate::error::{Error, Result};
use crate::index::Index;
use crate::sparse_tree::{Locus, Node, NodeId, SparseSuffixArray, SparseSuffixTree, SuffixLink};
use crate::text::{bits_per_char, Alphabet, Code, PackedText};

pub const MAGIC: &[u8; 4] = b"PSI1";
pub const FORMAT_VERSION: u32 = 1;

/// Section names, in file order.
pub const SECTIONS: [&str; 7] = ["header", "alphabet", "text", "suffix_array", "tree", "trie", "count_table"];

const NONE: u64 = u64::MAX;

#[derive(Default)]
struct Buf(Vec<u8>);

impl Buf {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn opt(&mut self, v: Option<usize>) {
        self.u64(v.map_or(NONE, |x| x as u64));
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    section: &'static str,
}

impl<'a> Cursor<'a> {
    fn corrupt(&self, reason: impl Into<String>) -> Error {
        Error::CorruptSection { section: self.section, reason: reason.into() }
    }

    fn bytes(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.data.len() < len {
            return Err(self.corrupt("payload ends early"));
        }
        let (head, tail) = self.data.split_at(len);
        self.data = tail;
        Ok(head)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.corrupt("value does not fit in memory"))
    }

    /// A count of items of at least `item_bytes` each; bounded by what is left.
    fn len(&mut self, item_bytes: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(item_bytes.max(1)) > self.data.len() {
            return Err(self.corrupt("length exceeds payload"));
        }
        Ok(n)
    }

    /// A value below `limit`.
    fn index(&mut self, limit: usize) -> Result<usize> {
        let v = self.usize()?;
        if v >= limit {
            return Err(self.corrupt(format!("value {v} out of range (< {limit})")));
        }
        Ok(v)
    }

    fn opt(&mut self) -> Result<Option<usize>> {
        match self.u64()? {
            NONE => Ok(None),
            v => usize::try_from(v).map(Some).map_err(|_| self.corrupt("value does not fit")),
        }
    }

    fn code(&mut self, base: usize) -> Result<Code> {
        Ok(self.index(base)? as Code)
    }

    fn finish(&self) -> Result<()> {
        if self.data.is_empty() {
            Ok(())
        } else {
            Err(self.corrupt("trailing bytes in payload"))
        }
    }
}

fn check(cond: bool, section: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::CorruptSection { section, reason: reason.into() })
    }
}

/// Writes `index` to `sink`.
pub fn serialize(index: &Index, sink: &mut impl Write) -> Result<()> {
    sink.write_all(MAGIC)?;
    sink.write_all(&FORMAT_VERSION.to_le_bytes())?;
    for payload in payloads(index) {
        sink.write_all(&(payload.len() as u64).to_le_bytes())?;
        sink.write_all(&payload)?;
        sink.write_all(&crc32fast::hash(&payload).to_le_bytes())?;
    }
    Ok(())
}

/// Serializes into a byte vector.
pub fn to_bytes(index: &Index) -> Vec<u8> {
    let mut out = Vec::new();
    serialize(index, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// Bytes each section occupies on disk, including its length and checksum.
pub fn section_sizes(index: &Index) -> Vec<(&'static str, usize)> {
    SECTIONS.into_iter().zip(payloads(index)).map(|(name, p)| (name, p.len() + 12)).collect()
}

fn payloads(index: &Index) -> Vec<Vec<u8>> {
    let text = &index.text;
    let tree = &index.tree;
    let trie = &index.trie;

    let mut header = Buf::default();
    for v in [
        text.raw_len(),
        text.len(),
        text.block(),
        text.alphabet().size(),
        text.capacity(),
        text.half_block(),
        text.bits_per_char(),
    ] {
        header.usize(v);
    }

    let mut alphabet = Buf::default();
    alphabet.usize(text.alphabet().size());
    alphabet.0.extend_from_slice(text.alphabet().symbols());

    let mut words = Buf::default();
    words.usize(text.words().len());
    for &w in text.words() {
        words.u64(w);
    }

    let mut sa = Buf::default();
    let order = tree.suffix_array().order();
    sa.usize(order.len());
    for &j in order {
        sa.usize(j);
    }
    for j in 0..order.len() {
        sa.usize(tree.suffix_array().rank(j));
    }

    let mut nodes = Buf::default();
    nodes.usize(tree.node_count());
    for node in &tree.nodes {
        nodes.usize(node.parent.index());
        nodes.usize(node.label_start);
        nodes.usize(node.depth);
        nodes.usize(node.min_rank);
        nodes.usize(node.max_rank);
        nodes.opt(node.ordinal);
    }
    for node in &tree.nodes {
        nodes.usize(node.children.len());
        for &(c, id) in &node.children {
            nodes.usize(c as usize);
            nodes.usize(id.index());
        }
    }
    for node in &tree.nodes {
        match node.link {
            None => nodes.u64(NONE),
            Some(link) => {
                nodes.usize(link.target.anchor.index());
                let letter = link.target.edge.map(|e| tree.nodes[e.index()].label_start);
                nodes.opt(letter.map(|p| text.code(p) as usize));
                nodes.usize(link.target.offset);
                nodes.usize(link.kind);
            }
        }
    }

    let mut tr = Buf::default();
    tr.usize(trie.nodes.len());
    for node in &trie.nodes {
        tr.usize(node.depth);
        tr.usize(node.label.len());
        for &c in &node.label {
            tr.usize(c as usize);
        }
        tr.usize(node.children.len());
        for &(c, id) in &node.children {
            tr.usize(c as usize);
            tr.usize(id.index());
        }
        tr.usize(node.size);
        tr.usize(node.rho.len());
        for &e in &node.rho {
            tr.u64(e);
        }
        tr.usize(node.counts.len());
        for &c in &node.counts {
            tr.u64(c as u64);
        }
        let ord: &[u32] = if node.children.is_empty() { &node.ord } else { &[] };
        tr.usize(ord.len());
        for &j in ord {
            tr.u64(j as u64);
        }
    }

    let mut table = Buf::default();
    match trie.table.cells() {
        Some(cells) => {
            table.u64(1);
            table.usize(cells.len());
            table.0.extend_from_slice(cells);
        }
        None => table.u64(0),
    }

    vec![header.0, alphabet.0, words.0, sa.0, nodes.0, tr.0, table.0]
}

/// Reads an index from `source`, checking magic, version, per-section
/// checksums and structural invariants.
pub fn deserialize(source: &mut impl Read) -> Result<Index> {
    let mut data = Vec::new();
    source.read_to_end(&mut data)?;
    from_bytes(&data)
}

pub fn from_bytes(data: &[u8]) -> Result<Index> {
    if data.len() < 4 || &data[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = data
        .get(4..8)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or(Error::CorruptSection { section: "header", reason: "missing version".into() })?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let mut rest = &data[8..];
    let mut sections = Vec::with_capacity(SECTIONS.len());
    for name in SECTIONS {
        let corrupt = |reason: &str| Error::CorruptSection { section: name, reason: reason.into() };
        if rest.len() < 8 {
            return Err(corrupt("truncated before section length"));
        }
        let len = u64::from_le_bytes(rest[..8].try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| corrupt("section length overflows"))?;
        rest = &rest[8..];
        if rest.len() < len.saturating_add(4) {
            return Err(corrupt("truncated section"));
        }
        let payload = &rest[..len];
        let crc = u32::from_le_bytes(rest[len..len + 4].try_into().unwrap());
        if crc32fast::hash(payload) != crc {
            return Err(corrupt("checksum mismatch"));
        }
        sections.push(payload);
        rest = &rest[len + 4..];
    }
    if !rest.is_empty() {
        return Err(Error::CorruptSection { section: "count_table", reason: "trailing bytes after last section".into() });
    }

    let mut c = Cursor { data: sections[0], section: "header" };
    let mut fields = [0usize; 7];
    for f in &mut fields {
        *f = c.usize()?;
    }
    let [n_raw, n, block, sigma, capacity, h, bits] = fields;
    c.finish()?;
    check(bits == bits_per_char(sigma), "header", "bits per char do not match alphabet size")?;
    check(block >= 1 && h == (block / 2).max(1), "header", "inconsistent half-block size")?;

    let mut c = Cursor { data: sections[1], section: "alphabet" };
    let count = c.len(1)?;
    check(count == sigma, "alphabet", "symbol count differs from header")?;
    let symbols = c.bytes(count)?.to_vec();
    c.finish()?;
    let alphabet = Alphabet::from_symbols(symbols)
        .ok_or(Error::CorruptSection { section: "alphabet", reason: "symbols not strictly increasing".into() })?;

    let mut c = Cursor { data: sections[2], section: "text" };
    let count = c.len(8)?;
    let words = (0..count).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
    c.finish()?;
    let text = PackedText::from_parts(alphabet, n_raw, n, block, capacity, words)
        .map_err(|reason| Error::CorruptSection { section: "text", reason })?;
    let nb = text.blocks();
    let base = text.alphabet().base();

    let mut c = Cursor { data: sections[3], section: "suffix_array" };
    let count = c.len(16)?;
    check(count == nb, "suffix_array", "length differs from block count")?;
    let order = (0..nb).map(|_| c.index(nb)).collect::<Result<Vec<_>>>()?;
    let inv = (0..nb).map(|_| c.usize()).collect::<Result<Vec<_>>>()?;
    c.finish()?;
    let sa = SparseSuffixArray::from_order(order)
        .ok_or(Error::CorruptSection { section: "suffix_array", reason: "not a permutation".into() })?;
    check((0..nb).all(|j| sa.rank(j) == inv[j]), "suffix_array", "inverse does not match")?;

    let tree = read_tree(sections[4], &text, sa)?;
    let trie = read_trie(sections[5], &text, &tree, h, base)?;

    let mut c = Cursor { data: sections[6], section: "count_table" };
    let cells = match c.u64()? {
        0 => None,
        1 => {
            let len = c.len(1)?;
            check(Some(len) == table_cells(base, h), "count_table", "table size does not match")?;
            Some(c.bytes(len)?.to_vec())
        }
        _ => return Err(c.corrupt("bad presence flag")),
    };
    c.finish()?;
    let table = FourRussiansTable::from_cells(base, h, cells);
    if table.is_enabled() {
        let expected = build_count_table(text.alphabet().size(), h, usize::MAX);
        check(table == expected, "count_table", "table contents are wrong")?;
    }
    let mut trie = trie;
    trie.table = table;

    Ok(Index { text, tree, trie })
}

fn read_tree(payload: &[u8], text: &PackedText, sa: SparseSuffixArray) -> Result<SparseSuffixTree> {
    const S: &str = "tree";
    let mut c = Cursor { data: payload, section: S };
    let count = c.len(48)?;
    let nb = sa.len();
    let n = text.len();
    check(count > nb && count <= 2 * nb + 1, S, "implausible node count")?;
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let parent = NodeId(c.index(count)? as u32);
        let label_start = c.usize()?;
        let depth = c.usize()?;
        let min_rank = c.usize()?;
        let max_rank = c.usize()?;
        let ordinal = c.opt()?;
        nodes.push(Node { parent, label_start, depth, min_rank, max_rank, ordinal, children: Vec::new(), link: None });
    }
    for node in &mut nodes {
        let k = c.len(16)?;
        let mut children = Vec::with_capacity(k);
        for _ in 0..k {
            let letter = c.code(text.alphabet().base())?;
            let id = c.index(count)?;
            children.push((letter, NodeId(id as u32)));
        }
        node.children = children;
    }
    let mut raw_links = Vec::with_capacity(count);
    for _ in 0..count {
        let anchor = c.u64()?;
        if anchor == NONE {
            raw_links.push(None);
            continue;
        }
        let anchor = usize::try_from(anchor).ok().filter(|&a| a < count).ok_or_else(|| c.corrupt("bad link anchor"))?;
        let letter = c.opt()?;
        let offset = c.usize()?;
        let kind = c.usize()?;
        raw_links.push(Some((anchor, letter, offset, kind)));
    }
    c.finish()?;

    let mut leaves = vec![NodeId::ROOT; nb];
    let mut seen = vec![false; nb];
    let r = text.block();
    let root = &nodes[0];
    check(root.depth == 0 && root.min_rank == 1 && root.max_rank == nb, S, "bad root")?;
    for (v, node) in nodes.iter().enumerate() {
        if v != 0 {
            let p = &nodes[node.parent.index()];
            check(p.depth < node.depth, S, "depth does not increase")?;
            check(p.children.iter().any(|&(_, id)| id.index() == v), S, "parent does not list child")?;
            check(node.label_start >= 1 && node.label_start + (node.depth - p.depth) - 1 <= n, S, "edge label out of text")?;
        }
        check(1 <= node.min_rank && node.min_rank <= node.max_rank && node.max_rank <= nb, S, "bad rank interval")?;
        check(node.children.windows(2).all(|w| w[0].0 < w[1].0), S, "children not sorted by letter")?;
        for &(letter, id) in &node.children {
            check(id.index() != 0 && nodes[id.index()].parent.index() == v, S, "child has wrong parent")?;
            check(text.code(nodes[id.index()].label_start) == letter, S, "child letter does not match label")?;
        }
        match node.ordinal {
            Some(j) => {
                check(j < nb && !seen[j], S, "bad leaf ordinal")?;
                check(node.children.is_empty() && node.depth == n - r * j, S, "bad leaf")?;
                check(node.min_rank == sa.rank(j) && node.max_rank == sa.rank(j), S, "leaf rank mismatch")?;
                seen[j] = true;
                leaves[j] = NodeId(v as u32);
            }
            None => check(!node.children.is_empty(), S, "internal node without children")?,
        }
    }
    check(seen.iter().all(|&s| s), S, "missing leaves")?;

    let mut tree = SparseSuffixTree { nodes, leaves, sa, block: r };
    for (v, raw) in raw_links.into_iter().enumerate() {
        let link = match raw {
            None => {
                check(v == 0, S, "non-root node without suffix link")?;
                continue;
            }
            Some(l) => l,
        };
        check(v != 0, S, "root has a suffix link")?;
        let (anchor, letter, offset, kind) = link;
        let anchor = NodeId(anchor as u32);
        let edge = match letter {
            None => None,
            Some(l) => Some(
                tree.child_by_letter(anchor, u16::try_from(l).unwrap_or(u16::MAX))
                    .ok_or_else(|| Error::CorruptSection { section: S, reason: "link edge does not exist".into() })?,
            ),
        };
        let target = Locus { anchor, edge, offset };
        match edge {
            Some(e) => check(offset > 0 && offset < tree.edge_span(e).1, S, "link offset outside edge")?,
            None => check(offset == 0, S, "offset without edge")?,
        }
        let d = tree.depth(NodeId(v as u32));
        check(kind >= 1 && kind <= r && kind <= d && tree.locus_depth(&target) == d - kind, S, "bad link type")?;
        tree.nodes[v].link = Some(SuffixLink { target, kind });
    }
    Ok(tree)
}

fn read_trie(payload: &[u8], text: &PackedText, tree: &SparseSuffixTree, h: usize, base: usize) -> Result<BlockTrie> {
    const S: &str = "trie";
    let mut c = Cursor { data: payload, section: S };
    let count = c.len(64)?;
    let nb = tree.leaf_count();
    let r = text.block();
    check(count >= 2 && count <= 2 * nb + 1, S, "implausible node count")?;
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let depth = c.usize()?;
        let k = c.len(8)?;
        let label = (0..k).map(|_| c.code(base)).collect::<Result<Vec<_>>>()?;
        let k = c.len(16)?;
        let children = (0..k)
            .map(|_| Ok((c.code(base)?, TrieNodeId(c.index(count)? as u32))))
            .collect::<Result<Vec<_>>>()?;
        let size = c.usize()?;
        let k = c.len(8)?;
        let rho = (0..k).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
        let k = c.len(8)?;
        let counts = (0..k)
            .map(|_| u32::try_from(c.u64()?).map_err(|_| c.corrupt("count overflows")))
            .collect::<Result<Vec<_>>>()?;
        let k = c.len(8)?;
        let ord = (0..k).map(|_| Ok(c.index(nb)? as u32)).collect::<Result<Vec<_>>>()?;
        nodes.push(TrieNode { depth, label, children, size, rho, counts, ord });
    }
    c.finish()?;

    check(nodes[0].depth == 0 && nodes[0].size == nb, S, "bad root")?;
    let mut seen = vec![false; nb];
    let limit = (base as u64).pow(h as u32);
    for node in &nodes {
        check(node.depth <= r, S, "node deeper than a block")?;
        check(node.children.windows(2).all(|w| w[0].0 < w[1].0), S, "children not sorted")?;
        let mut child_sizes = 0;
        for &(letter, id) in &node.children {
            let child = nodes.get(id.index()).filter(|_| id.index() != 0).ok_or_else(|| c.corrupt("bad child"))?;
            check(child.label.first() == Some(&letter), S, "child letter does not match label")?;
            check(child.depth == node.depth + child.label.len(), S, "label length does not match depth")?;
            child_sizes += child.size;
        }
        if node.children.is_empty() {
            check(node.depth == r && node.ord.len() == node.size && node.rho.is_empty(), S, "bad leaf")?;
            for &j in &node.ord {
                check(!seen[j as usize], S, "ordinal stored twice")?;
                seen[j as usize] = true;
            }
        } else {
            check(child_sizes == node.size, S, "children do not partition the node")?;
            check(node.rho.len() == node.size.div_ceil(h), S, "rho length mismatch")?;
            check(node.counts.len() == base * node.rho.len(), S, "count table length mismatch")?;
            check(node.rho.iter().all(|&e| e < limit), S, "rho entry out of range")?;
            let entries = node.rho.len();
            let mut running = vec![0u32; base];
            for (w, &e) in node.rho.iter().enumerate() {
                for (slot, letter) in crate::text::unpack_halfblock(e, base, h).into_iter().enumerate() {
                    if w * h + slot < node.size {
                        running[letter as usize] += 1;
                    }
                }
                for (b, &run) in running.iter().enumerate() {
                    check(node.counts[b * entries + w] == run, S, "cumulative counts do not match rho")?;
                }
            }
        }
    }
    check(seen.iter().all(|&s| s), S, "leaves miss some ordinals")?;

    Ok(BlockTrie {
        nodes,
        block: r,
        base,
        h,
        table: FourRussiansTable::from_cells(base, h, None),
        retained: false,
        hi_skew: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::IndexConfig;

    fn sample() -> Index {
        Index::build(b"abaabaa", &IndexConfig::new(2)).unwrap()
    }

    #[test]
    fn round_trip() {
        let index = sample();
        let bytes = to_bytes(&index);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, index);
        assert_eq!(to_bytes(&back), bytes);
        assert_eq!(back.find_all(b"aba").unwrap(), index.find_all(b"aba").unwrap());
    }

    #[test]
    fn truncation_is_corruption() {
        let bytes = to_bytes(&sample());
        for cut in [9, 20, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(from_bytes(&bytes[..cut]), Err(Error::CorruptSection { .. })), "cut {cut}");
        }
    }

    #[test]
    fn foreign_magic_and_version() {
        let mut bytes = to_bytes(&sample());
        assert!(matches!(from_bytes(b"GIF89a"), Err(Error::BadMagic)));
        bytes[4] = 9;
        assert!(matches!(from_bytes(&bytes), Err(Error::VersionMismatch { found: 9, .. })));
    }

    #[test]
    fn flipped_byte_names_its_section() {
        let bytes = to_bytes(&sample());
        let mut offset = 8;
        for name in SECTIONS {
            let len = u64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap()) as usize;
            let mut bad = bytes.clone();
            bad[offset + 8 + len / 2] ^= 0x10;
            match from_bytes(&bad) {
                Err(Error::CorruptSection { section, .. }) => assert_eq!(section, name),
                other => panic!("{name}: {other:?}"),
            }
            offset += 8 + len + 4;
        }
    }
}
