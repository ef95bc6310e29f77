//! Fingerprint index over a text.
//!
//! The fingerprint of a substring is its set of distinct characters. This
//! crate finds every fingerprint of a text together with its maximal
//! locations, stores them in a compact trie with a hash-driven bottom-up
//! view, and answers "is this set a fingerprint?" in time linear in the size
//! of the set.
//!
//! ```
//! use fpindex::fingerprint_index::{BuildOptions, FingerprintIndex};
//!
//! let index = FingerprintIndex::build(b"abaceabacd", BuildOptions::default()).unwrap();
//! assert_eq!(index.fingerprint_count(), 17);
//! assert!(index.exists(b"ca"));
//! assert!(!index.exists(b"bd"));
//! ```

pub mod error;
pub mod fingerprint_index;
pub mod naming;
pub mod online_builders;
pub mod oracle;
pub mod participation_tree;
pub mod polyhash;
pub mod seqcore;
pub mod set_equality;
pub mod suffix_tree;

pub use error::{Error, Result};
pub use fingerprint_index::{BuildOptions, BuilderKind, EqualityMethod, FingerprintIndex};
pub use seqcore::{normalize, Alphabet, Fingerprint, MaximalLocation, Rank, Sequence};
