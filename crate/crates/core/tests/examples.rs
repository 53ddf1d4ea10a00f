use psi_core::count_table::build_count_table;
use psi_core::index::k_offset;
use psi_core::{AlphabetMode, Error, Index, IndexConfig, PackedText};

const SAMPLE: &[u8] = b"abaabaa";

fn positions(index: &Index, pattern: &[u8]) -> Vec<usize> {
    index.find_all(pattern).unwrap().iter().map(|o| o.pos).collect()
}

#[test]
fn sample_queries() {
    let index = Index::build(SAMPLE, &IndexConfig::new(2)).unwrap();
    assert_eq!(positions(&index, b"aba"), vec![1, 4]);
    assert_eq!(positions(&index, b"a"), vec![1, 3, 4, 6, 7]);
    assert_eq!(positions(&index, b"abaabaa"), vec![1]);
    assert!(positions(&index, b"abaabaab").is_empty());
    assert!(positions(&index, b"xyz").is_empty());
    assert!(matches!(index.find_all(b""), Err(Error::EmptyPattern)));
}

#[test]
fn offsets_name_the_first_boundary() {
    let index = Index::build(SAMPLE, &IndexConfig::new(2)).unwrap();
    let occ = index.find_all(b"aba").unwrap();
    assert_eq!(occ.iter().map(|o| o.k).collect::<Vec<_>>(), vec![0, 1]);
    assert_eq!(k_offset(1, 4), 0);
    assert_eq!(k_offset(2, 4), 3);
    assert_eq!(k_offset(4, 4), 1);
}

#[test]
fn construction_errors() {
    assert!(matches!(Index::build(b"", &IndexConfig::new(2)), Err(Error::EmptyText)));
    assert!(matches!(Index::build(SAMPLE, &IndexConfig::new(0)), Err(Error::InvalidBlockSize)));
    assert!(matches!(Index::build(SAMPLE, &IndexConfig::new(40)), Err(Error::BlockTooLarge { .. })));
    let mut config = IndexConfig::new(2);
    config.word_capacity = Some(64);
    assert!(matches!(Index::build(SAMPLE, &config), Err(Error::AlphabetOverflow { .. })));
    assert!(matches!(
        PackedText::encode(SAMPLE, 8, AlphabetMode::Auto, Some(4)),
        Err(Error::BlockTooLarge { block: 8, capacity: 4 })
    ));
}

#[test]
fn byte_alphabet_gives_same_answers() {
    let text = b"the quick brown fox jumps over the lazy dog; the end";
    let mut config = IndexConfig::new(3);
    let auto = Index::build(text, &config).unwrap();
    config.alphabet = AlphabetMode::Byte;
    let byte = Index::build(text, &config).unwrap();
    assert_eq!(byte.text().alphabet().size(), 256);
    for pat in [&b"the"[..], b"he ", b"o", b"fox jumps", b"zz"] {
        assert_eq!(positions(&auto, pat), positions(&byte, pat));
    }
}

#[test]
fn count_table_size_and_budget() {
    let table = build_count_table(2, 1, 1 << 22);
    assert_eq!(table.len(), 16);
    assert!(!build_count_table(255, 8, 1 << 22).is_enabled());
}

#[test]
fn short_patterns_scan_the_text() {
    let index = Index::build(b"mississippi", &IndexConfig::new(4)).unwrap();
    assert_eq!(index.find_short(b"ss").unwrap(), vec![3, 6]);
    assert_eq!(index.find_short(b"i").unwrap(), vec![2, 5, 8, 11]);
    assert!(matches!(index.find_short(b"issi"), Err(Error::BadLength { .. })));
    assert_eq!(positions(&index, b"issi"), vec![2, 5]);
}
