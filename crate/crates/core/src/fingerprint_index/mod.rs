//! The query-time index: fingerprint trie, backtracking function and
//! per-fingerprint location lists, with three interchangeable builders.
//!
//! A query `f` is answered in four steps: hash `f`, peel it character by
//! character through the backtracking function to recover a candidate trie
//! string, check that the candidate is a permutation of `f`, and confirm it
//! by walking the trie.

pub mod backtrack;
pub mod report;
pub mod serialize;
pub mod trie;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::naming::name_fingerprints;
use crate::online_builders::{build_mc, build_names_randomized, Discovered};
use crate::participation_tree::{ParticipationTree, ROOT as PT_ROOT};
use crate::polyhash::add_mod;
use crate::seqcore::{normalize, Alphabet, Fingerprint, MaximalLocation, Rank, Sequence};
use crate::set_equality::{eq_bits, eq_hash, eq_partitioned, EqualityScratch};
use crate::suffix_tree::SuffixTree;

pub use backtrack::{build_backtrack, node_hashes, BacktrackFunction};
pub use report::{expand, ReportIndex};
pub use trie::{build_trie, build_trie_with_hints, FingerprintTrie, TRIE_ROOT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuilderKind {
    /// Participation tree plus naming.
    Exact,
    /// Streaming change lists named through per-level hash tables.
    Randomized,
    /// Streaming change lists named by hash value.
    Mc,
}

impl BuilderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BuilderKind::Exact => "exact",
            BuilderKind::Randomized => "randomized",
            BuilderKind::Mc => "mc",
        }
    }

    fn code(self) -> u8 {
        match self {
            BuilderKind::Exact => 0,
            BuilderKind::Randomized => 1,
            BuilderKind::Mc => 2,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(BuilderKind::Exact),
            1 => Ok(BuilderKind::Randomized),
            2 => Ok(BuilderKind::Mc),
            _ => Err(Error::Format(format!("unknown builder code {code}"))),
        }
    }
}

impl fmt::Display for BuilderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuilderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(BuilderKind::Exact),
            "randomized" => Ok(BuilderKind::Randomized),
            "mc" => Ok(BuilderKind::Mc),
            other => Err(format!(
                "unknown builder `{other}` (expected exact, randomized or mc)"
            )),
        }
    }
}

/// Set-equality method used in the third query step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualityMethod {
    Bits,
    Hash,
    Partitioned(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub builder: BuilderKind,
    pub seed: u64,
    /// Confidence exponent `c` of the Monte Carlo builder.
    pub mc_confidence: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            builder: BuilderKind::Exact,
            seed: 0,
            mc_confidence: 1,
        }
    }
}

impl BuildOptions {
    pub fn new(builder: BuilderKind, seed: u64) -> Self {
        BuildOptions {
            builder,
            seed,
            ..Default::default()
        }
    }
}

/// Per-caller working memory for queries.
#[derive(Clone, Debug)]
pub struct QueryScratch {
    eq: EqualityScratch,
    method: EqualityMethod,
}

impl QueryScratch {
    pub fn new(sigma: usize, method: EqualityMethod) -> Self {
        QueryScratch {
            eq: EqualityScratch::new(sigma),
            method,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.eq.is_clean()
    }
}

#[derive(Clone, Debug)]
pub struct FingerprintIndex {
    alphabet: Alphabet,
    seq: Sequence,
    trie: FingerprintTrie,
    backtrack: BacktrackFunction,
    report: ReportIndex,
    builder: BuilderKind,
    seed: u64,
    backtrack_attempts: usize,
}

impl FingerprintIndex {
    pub fn build(raw: &[u8], opts: BuildOptions) -> Result<Self> {
        let (seq, alphabet) = normalize(raw)?;
        Self::from_sequence(seq, alphabet, opts)
    }

    pub fn from_sequence(seq: Sequence, alphabet: Alphabet, opts: BuildOptions) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let (trie, report) = match opts.builder {
            BuilderKind::Exact => exact_parts(&seq),
            BuilderKind::Randomized => {
                let names = build_names_randomized(&seq);
                explicit_parts(seq.sigma(), &names.entries, names.supports)
            }
            BuilderKind::Mc => {
                let mc = build_mc(&seq, opts.mc_confidence, true, &mut rng)?;
                let supports = mc.supports.expect("locations requested");
                explicit_parts(seq.sigma(), &mc.entries, supports)
            }
        };
        let (backtrack, attempts) = build_backtrack(&trie, &mut rng)?;
        Ok(FingerprintIndex {
            alphabet,
            seq,
            trie,
            backtrack,
            report,
            builder: opts.builder,
            seed: opts.seed,
            backtrack_attempts: attempts,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }

    pub fn trie(&self) -> &FingerprintTrie {
        &self.trie
    }

    pub fn backtrack(&self) -> &BacktrackFunction {
        &self.backtrack
    }

    pub fn report_index(&self) -> &ReportIndex {
        &self.report
    }

    pub fn builder(&self) -> BuilderKind {
        self.builder
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Evaluation points tried before the backtracking hash was injective.
    pub fn backtrack_attempts(&self) -> usize {
        self.backtrack_attempts
    }

    pub fn fingerprint_count(&self) -> usize {
        self.trie.fingerprint_count()
    }

    pub fn location_count(&self) -> usize {
        self.report.location_count()
    }

    /// Every indexed fingerprint, in trie order.
    pub fn fingerprints(&self) -> Vec<Fingerprint> {
        (1..self.trie.len())
            .map(|v| self.trie.fingerprint(v))
            .collect()
    }

    pub fn scratch(&self) -> QueryScratch {
        QueryScratch::new(self.seq.sigma(), EqualityMethod::Bits)
    }

    /// Distinct ranks of the query bytes, or `None` if a byte is not in the
    /// alphabet.
    pub fn query_ranks(&self, query: &[u8]) -> Option<Vec<Rank>> {
        let mut seen = Fingerprint::empty(self.seq.sigma());
        let mut out = Vec::with_capacity(query.len());
        for &b in query {
            let r = self.alphabet.rank(b)?;
            if seen.insert(r) {
                out.push(r);
            }
        }
        Some(out)
    }

    /// Step 2: recover a candidate trie string for `ranks` from its hash.
    pub fn peel(&self, ranks: &[Rank]) -> Vec<Rank> {
        let params = self.backtrack.params();
        let p = params.modulus();
        let mut h = ranks
            .iter()
            .fold(0, |h, &r| add_mod(h, params.power_unchecked(r), p));
        let mut out = Vec::with_capacity(ranks.len());
        for _ in 0..ranks.len() {
            let beta = self.backtrack.lookup(h);
            out.push(beta);
            h = add_mod(h, p - params.power_unchecked(beta), p);
        }
        out.reverse();
        out
    }

    /// Trie node of the set of `ranks` (distinct, in range), if indexed.
    pub fn locate_ranks(&self, ranks: &[Rank], scratch: &mut QueryScratch) -> Option<usize> {
        if ranks.is_empty() {
            return None;
        }
        let candidate = self.peel(ranks);
        let equal = match scratch.method {
            EqualityMethod::Bits => eq_bits(&candidate, ranks, &mut scratch.eq),
            EqualityMethod::Hash => eq_hash(&candidate, ranks),
            EqualityMethod::Partitioned(k) => eq_partitioned(&candidate, ranks, k, &mut scratch.eq),
        };
        if !equal.unwrap_or(false) {
            return None;
        }
        self.trie.walk(candidate.iter().copied())
    }

    pub fn exists_with(&self, query: &[u8], scratch: &mut QueryScratch) -> bool {
        match self.query_ranks(query) {
            Some(ranks) => self.locate_ranks(&ranks, scratch).is_some(),
            None => false,
        }
    }

    /// Whether the set of characters of `query` is a fingerprint.
    pub fn exists(&self, query: &[u8]) -> bool {
        self.exists_with(query, &mut self.scratch())
    }

    pub fn report_with(
        &self,
        query: &[u8],
        scratch: &mut QueryScratch,
    ) -> Result<Vec<MaximalLocation>> {
        let ranks = self.query_ranks(query).ok_or(Error::UnknownFingerprint)?;
        let node = self
            .locate_ranks(&ranks, scratch)
            .ok_or(Error::UnknownFingerprint)?;
        let f = Fingerprint::from_ranks(ranks, self.seq.sigma());
        Ok(self.report.locations(node, &f, &self.seq))
    }

    /// Maximal locations whose fingerprint is the set of characters of
    /// `query`, sorted, in normalized coordinates.
    pub fn report(&self, query: &[u8]) -> Result<Vec<MaximalLocation>> {
        self.report_with(query, &mut self.scratch())
    }

    /// Every location of every fingerprint, grouped by trie node.
    pub fn all_locations(&self) -> Vec<(Fingerprint, Vec<MaximalLocation>)> {
        (1..self.trie.len())
            .map(|v| {
                let f = self.trie.fingerprint(v);
                let locs = self.report.locations(v, &f, &self.seq);
                (f, locs)
            })
            .collect()
    }
}

/// Trie and report lists straight from the named participation tree.
fn exact_parts(seq: &Sequence) -> (FingerprintTrie, ReportIndex) {
    let tree = SuffixTree::build(seq);
    let pt = ParticipationTree::build(&tree, seq);
    let naming = name_fingerprints(&pt);
    let names = &naming.names;

    let mut trie = FingerprintTrie::new(seq.sigma());
    let mut node_of: HashMap<u32, usize> = HashMap::new();
    node_of.insert(names[PT_ROOT], TRIE_ROOT);
    let order = pt.preorder();
    for &v in &order[1..] {
        if !node_of.contains_key(&names[v]) {
            let parent = node_of[&names[pt.node(v).parent]];
            let id = trie.add_child(parent, pt.node(v).label);
            node_of.insert(names[v], id);
        }
    }

    // Suffixes in preorder, each node listing the suffixes that do not
    // support its own word first, so that the supports of the locations a
    // node accounts for form one range running to the end of its subtree.
    let mut supports = Vec::with_capacity(seq.len() + 1);
    let mut own_start = vec![0u32; pt.node_count()];
    let mut subtree_end = vec![0u32; pt.node_count()];
    let mut stack: Vec<(usize, bool)> = vec![(PT_ROOT, false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            subtree_end[v] = supports.len() as u32;
            continue;
        }
        let node = pt.node(v);
        supports.extend(
            node.attached
                .iter()
                .filter(|a| !a.supports_here)
                .map(|a| a.suffix as u32),
        );
        own_start[v] = supports.len() as u32;
        supports.extend(
            node.attached
                .iter()
                .filter(|a| a.supports_here)
                .map(|a| a.suffix as u32),
        );
        stack.push((v, true));
        stack.extend(node.children.iter().rev().map(|&(_, c)| (c, false)));
    }
    let mut per_node: Vec<Vec<(u32, u32)>> = vec![Vec::new(); trie.len()];
    for &v in &order[1..] {
        if own_start[v] < subtree_end[v] {
            per_node[node_of[&names[v]]].push((own_start[v], subtree_end[v]));
        }
    }
    let mut ranges = Vec::new();
    let mut offsets = vec![0u32];
    for list in per_node {
        ranges.extend(list);
        offsets.push(ranges.len() as u32);
    }
    let report =
        ReportIndex::from_parts(supports, ranges, offsets).expect("ranges built in bounds");
    (trie, report)
}

/// Trie and report lists from fingerprints discovered by a streaming builder.
fn explicit_parts<K: Copy + Eq + Hash>(
    sigma: usize,
    entries: &[Discovered<K>],
    supports: Vec<Vec<u32>>,
) -> (FingerprintTrie, ReportIndex) {
    let mut trie = FingerprintTrie::new(sigma);
    let mut node_of: HashMap<K, usize> = HashMap::with_capacity(entries.len());
    let mut lists = vec![Vec::new()];
    for (entry, list) in entries.iter().zip(supports) {
        let parent = entry.parent.map_or(TRIE_ROOT, |k| node_of[&k]);
        match trie.child(parent, entry.label) {
            // two hash names for one set can only come from a collision
            Some(existing) => {
                node_of.insert(entry.key, existing);
                lists[existing].extend(list);
            }
            None => {
                let id = trie.add_child(parent, entry.label);
                node_of.insert(entry.key, id);
                lists.push(list);
            }
        }
    }
    (trie, ReportIndex::from_lists(lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_all;

    const A: &[u8] = b"abaceabacd";

    fn locs(pairs: &[(usize, usize)]) -> Vec<MaximalLocation> {
        pairs
            .iter()
            .map(|&(i, j)| MaximalLocation::new(i, j))
            .collect()
    }

    #[test]
    fn golden_queries_every_builder() {
        for builder in [BuilderKind::Exact, BuilderKind::Randomized, BuilderKind::Mc] {
            let index = FingerprintIndex::build(A, BuildOptions::new(builder, 5)).unwrap();
            assert_eq!(index.fingerprint_count(), 17, "{builder}");
            assert_eq!(index.location_count(), 25);
            assert!(index.exists(b"ca"));
            assert!(!index.exists(b"bd"));
            assert!(index.exists(b"abcde"));
            assert!(!index.exists(b"az"));
            assert!(!index.exists(b""));
            assert_eq!(index.report(b"ac").unwrap(), locs(&[(3, 4), (8, 9)]));
            assert_eq!(
                index.report(b"a").unwrap(),
                locs(&[(1, 1), (3, 3), (6, 6), (8, 8)])
            );
            assert_eq!(index.report(b"bd").unwrap_err(), Error::UnknownFingerprint);
            assert_eq!(index.report(b"").unwrap_err(), Error::UnknownFingerprint);
        }
    }

    #[test]
    fn all_subsets_match_oracle() {
        for raw in [A, b"mississippi", b"abcbabcd", b"ab", b"a"] {
            let index = FingerprintIndex::build(raw, BuildOptions::default()).unwrap();
            let seq = index.sequence();
            let gt = oracle_all(seq).unwrap();
            let sigma = seq.sigma();
            let symbols = index.alphabet().symbols().to_vec();
            for mask in 1u32..(1 << sigma) {
                let query: Vec<u8> = (0..sigma)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| symbols[b])
                    .collect();
                let f = Fingerprint::from_ranks(
                    (0..sigma as Rank).filter(|b| mask >> b & 1 == 1),
                    sigma,
                );
                assert_eq!(index.exists(&query), gt.contains(&f));
                if gt.contains(&f) {
                    assert_eq!(index.report(&query).unwrap(), gt.locations_of(&f));
                }
            }
        }
    }

    #[test]
    fn peeling_recovers_trie_strings() {
        let index = FingerprintIndex::build(A, BuildOptions::default()).unwrap();
        for v in 1..index.trie().len() {
            let s = index.trie().string(v);
            let mut sorted = s.clone();
            sorted.sort_unstable();
            assert_eq!(index.peel(&sorted), s);
        }
    }

    #[test]
    fn equality_methods_agree() {
        let index = FingerprintIndex::build(b"abcadabacbefgafh", BuildOptions::default()).unwrap();
        let symbols = index.alphabet().symbols().to_vec();
        let sigma = symbols.len();
        let mut scratches = [
            QueryScratch::new(sigma, EqualityMethod::Bits),
            QueryScratch::new(sigma, EqualityMethod::Hash),
            QueryScratch::new(sigma, EqualityMethod::Partitioned(2)),
            QueryScratch::new(sigma, EqualityMethod::Partitioned(3)),
        ];
        for mask in 1u32..(1 << sigma) {
            let query: Vec<u8> = (0..sigma)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| symbols[b])
                .collect();
            let answers: Vec<bool> = scratches
                .iter_mut()
                .map(|s| index.exists_with(&query, s))
                .collect();
            assert!(answers.iter().all(|&a| a == answers[0]));
        }
        assert!(scratches.iter().all(QueryScratch::is_clean));
    }
}
