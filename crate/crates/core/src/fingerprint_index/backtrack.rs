//! Bottom-up view of the trie: from the hash of a fingerprint to the last
//! character of its trie string.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::polyhash::{add_mod, find_prime, HashParams, MAX_MODULUS};
use crate::seqcore::Rank;

use super::trie::FingerprintTrie;

/// Resampling budget for the evaluation point.
pub const BACKTRACK_BUDGET: usize = 1_000;

#[derive(Clone, Debug)]
pub struct BacktrackFunction {
    params: HashParams,
    map: HashMap<u64, Rank>,
}

/// `H_q = H_p + r^label` in one top-down pass; the root hashes to 0.
pub fn node_hashes(trie: &FingerprintTrie, params: &HashParams) -> Vec<u64> {
    let mut h = vec![0u64; trie.len()];
    for v in 1..trie.len() {
        h[v] = add_mod(
            h[trie.parent(v)],
            params.power_unchecked(trie.label(v)),
            params.modulus(),
        );
    }
    h
}

/// Hash parameters injective on the trie's fingerprints, and the number of
/// evaluation points tried.
pub fn build_backtrack<R: Rng + ?Sized>(
    trie: &FingerprintTrie,
    rng: &mut R,
) -> Result<(BacktrackFunction, usize)> {
    let sigma = trie.sigma().max(1);
    let f = trie.fingerprint_count() as u128;
    let lo = (f * f * sigma as u128).max(2);
    if 2 * lo >= MAX_MODULUS as u128 {
        return Err(Error::ModulusTooLarge(2 * lo));
    }
    let p = find_prime(lo as u64, 2 * lo as u64, rng)?;
    let mut seen = HashSet::with_capacity(trie.len());
    for attempt in 1..=BACKTRACK_BUDGET {
        let params = HashParams::new(p, rng.gen_range(1..p), sigma, 1);
        let hashes = node_hashes(trie, &params);
        seen.clear();
        if hashes[1..].iter().all(|&h| seen.insert(h)) {
            let map = (1..trie.len())
                .map(|v| (hashes[v], trie.label(v)))
                .collect();
            return Ok((BacktrackFunction { params, map }, attempt));
        }
    }
    Err(Error::RetryLimitExceeded(BACKTRACK_BUDGET))
}

impl BacktrackFunction {
    pub fn from_pairs(params: HashParams, pairs: &[(u64, Rank)]) -> Result<Self> {
        let map: HashMap<u64, Rank> = pairs.iter().copied().collect();
        if map.len() != pairs.len() {
            return Err(Error::Format(
                "repeated hash value in backtracking function".into(),
            ));
        }
        if let Some(&(_, r)) = pairs.iter().find(|&&(_, r)| r as usize >= params.sigma()) {
            return Err(Error::Format(format!(
                "backtracking rank {r} outside the alphabet"
            )));
        }
        Ok(BacktrackFunction { params, map })
    }

    pub fn params(&self) -> &HashParams {
        &self.params
    }

    /// Last character for a stored hash; some rank below σ otherwise.
    pub fn lookup(&self, h: u64) -> Rank {
        match self.map.get(&h) {
            Some(&r) => r,
            None => (h % self.params.sigma() as u64) as Rank,
        }
    }

    pub fn contains(&self, h: u64) -> bool {
        self.map.contains_key(&h)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Stored associations sorted by hash.
    pub fn pairs(&self) -> Vec<(u64, Rank)> {
        let mut v: Vec<(u64, Rank)> = self.map.iter().map(|(&h, &r)| (h, r)).collect();
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint_index::trie::build_trie;
    use crate::seqcore::Fingerprint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lookups_follow_trie_labels() {
        let sets: Vec<Fingerprint> = (1u32..16)
            .map(|mask| Fingerprint::from_ranks((0..4).filter(|b| mask >> b & 1 == 1), 4))
            .collect();
        let trie = build_trie(&sets, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (bt, attempts) = build_backtrack(&trie, &mut rng).unwrap();
        assert!(attempts >= 1);
        assert_eq!(bt.len(), 15);
        let hashes = node_hashes(&trie, bt.params());
        assert_eq!(hashes[0], 0);
        for (v, &h) in hashes.iter().enumerate().skip(1) {
            assert_eq!(bt.lookup(h), trie.label(v));
        }
        let p = bt.params().modulus();
        assert!((15 * 15 * 4..=2 * 15 * 15 * 4).contains(&p));
        let unknown = (0..p).find(|h| !bt.contains(*h)).unwrap();
        assert!(bt.lookup(unknown) < 4);
    }
}
