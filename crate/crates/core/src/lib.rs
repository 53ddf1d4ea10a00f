//! A pattern-matching index for packed strings.
//!
//! The text is cut into blocks of `r` characters. Only the suffixes that
//! start at block boundaries are indexed, in a sparse suffix tree with typed
//! suffix links; a compacted trie of the reversed blocks checks the part of
//! an occurrence that lies before its first boundary. A query runs one pass
//! over the tree to find every pattern suffix `P[k+1..]` starting at a
//! boundary, then selects the boundaries preceded by `P[1..k]`.
//!
//! ```
//! use psi_core::{Index, IndexConfig};
//!
//! let index = Index::build(b"abaabaa", &IndexConfig::new(2)).unwrap();
//! let hits: Vec<usize> = index.find_all(b"aba").unwrap().iter().map(|o| o.pos).collect();
//! assert_eq!(hits, vec![1, 4]);
//! ```

pub mod block_trie;
pub mod count_table;
pub mod differential;
pub mod error;
pub mod format;
pub mod index;
pub mod interval;
pub mod left_search;
pub mod oracle;
pub mod right_search;
pub mod sparse_tree;
pub mod text;

pub use error::{Error, Result};
pub use index::{Index, IndexConfig, IndexStats, Occurrence, QueryStats};
pub use interval::RankInterval;
pub use text::{AlphabetMode, Code, PackedText};
