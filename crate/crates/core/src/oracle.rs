//! Brute-force ground truth for cross-checking the fast paths.
//!
//! Everything here follows the definitions literally and shares no code with
//! the construction algorithms, so disagreements point at real bugs.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::seqcore::{Fingerprint, MaximalLocation, Rank, Sequence};

pub const DEFAULT_CAP: usize = 500;

/// Every fingerprint, maximal location and copy class of a sequence.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    /// Distinct fingerprints in increasing order.
    pub fingerprints: Vec<Fingerprint>,
    /// Maximal locations sorted by `(start, end)`, each with its fingerprint.
    pub locations: Vec<(MaximalLocation, Fingerprint)>,
    /// Maximal locations grouped by equal substrings.
    pub classes: Vec<Vec<MaximalLocation>>,
}

impl GroundTruth {
    pub fn fingerprint_count(&self) -> usize {
        self.fingerprints.len()
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn contains(&self, f: &Fingerprint) -> bool {
        self.fingerprints.binary_search(f).is_ok()
    }

    /// Locations of `f`, sorted.
    pub fn locations_of(&self, f: &Fingerprint) -> Vec<MaximalLocation> {
        self.locations
            .iter()
            .filter(|(_, g)| g == f)
            .map(|&(l, _)| l)
            .collect()
    }
}

pub fn oracle_all(seq: &Sequence) -> Result<GroundTruth> {
    oracle_all_capped(seq, DEFAULT_CAP)
}

/// Double loop over all intervals, keeping those that satisfy the three
/// maximal-location conditions.
pub fn oracle_all_capped(seq: &Sequence, cap: usize) -> Result<GroundTruth> {
    let n = seq.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let s = seq.ranks();
    let sigma = seq.sigma();
    let mut locations = Vec::new();
    for i in 0..n {
        let mut set = Fingerprint::empty(sigma);
        for j in i..n {
            set.insert(s[j]);
            let left_ok = i == 0 || !set.contains(s[i - 1]);
            let right_ok = j + 1 == n || !set.contains(s[j + 1]);
            if left_ok && right_ok {
                locations.push((MaximalLocation::new(i + 1, j + 1), set.clone()));
            }
        }
    }
    let mut fingerprints: Vec<Fingerprint> = locations.iter().map(|(_, f)| f.clone()).collect();
    fingerprints.sort();
    fingerprints.dedup();

    let mut by_text: BTreeMap<&[Rank], Vec<MaximalLocation>> = BTreeMap::new();
    for &(loc, _) in &locations {
        by_text
            .entry(&s[loc.start - 1..loc.end])
            .or_default()
            .push(loc);
    }
    let classes = by_text.into_values().collect();
    Ok(GroundTruth {
        fingerprints,
        locations,
        classes,
    })
}

/// `Support` straight from its definition: the minimum over the letters of
/// `[i, j]` of their rightmost position inside the interval.
pub fn brute_support(s: &[Rank], i: usize, j: usize) -> usize {
    let window = &s[i - 1..j];
    window
        .iter()
        .map(|c| i + window.iter().rposition(|x| x == c).unwrap())
        .min()
        .unwrap()
}

/// `fo(i, j)` straight from its definition.
pub fn brute_fo(s: &[Rank], i: usize, j: usize) -> Vec<Rank> {
    let mut out: Vec<Rank> = Vec::new();
    for &c in &s[i - 1..j] {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Images of the map sending a root path `z` to the maximal locations whose
/// O-label is the word of `z` and whose support lies below `z`.
#[derive(Clone, Debug)]
pub struct PhiPartition {
    pub images: Vec<Vec<MaximalLocation>>,
}

/// `paths` holds, for each non-empty root path, its word and the suffix
/// starts below it.
pub fn phi_partition(
    seq: &Sequence,
    gt: &GroundTruth,
    paths: &[(Vec<Rank>, Vec<usize>)],
) -> PhiPartition {
    let s = seq.ranks();
    let mut by_label: HashMap<Vec<Rank>, Vec<(usize, MaximalLocation)>> = HashMap::new();
    for &(loc, _) in &gt.locations {
        let m = brute_support(s, loc.start, loc.end);
        by_label
            .entry(brute_fo(s, m, loc.end))
            .or_default()
            .push((m, loc));
    }
    let images = paths
        .iter()
        .map(|(word, suffixes)| {
            let below: HashSet<usize> = suffixes.iter().copied().collect();
            by_label
                .get(word)
                .map(|cands| {
                    cands
                        .iter()
                        .filter(|(m, _)| below.contains(m))
                        .map(|&(_, l)| l)
                        .collect()
                })
                .unwrap_or_default()
        })
        .collect();
    PhiPartition { images }
}

impl PhiPartition {
    /// Images non-empty, pairwise disjoint, covering every maximal location,
    /// and refined by the copy classes.
    pub fn check(&self, gt: &GroundTruth) -> std::result::Result<(), String> {
        let mut owner: HashMap<MaximalLocation, usize> = HashMap::new();
        for (z, image) in self.images.iter().enumerate() {
            if image.is_empty() {
                return Err(format!("path {z} has an empty image"));
            }
            for &loc in image {
                if let Some(prev) = owner.insert(loc, z) {
                    return Err(format!("{loc} lies in the images of paths {prev} and {z}"));
                }
            }
        }
        if let Some((loc, _)) = gt.locations.iter().find(|(l, _)| !owner.contains_key(l)) {
            return Err(format!("{loc} is not covered"));
        }
        for class in &gt.classes {
            let z = owner[&class[0]];
            if let Some(loc) = class.iter().find(|l| owner[l] != z) {
                return Err(format!(
                    "copies {} and {loc} fall in different images",
                    class[0]
                ));
            }
        }
        Ok(())
    }
}

/// The word `w_1 = a`, `w_k = w_{k-1} (a_1 a_2 .. a_k)^k` over `a, b, c, ...`.
pub fn gen_wk(k: usize) -> Result<Vec<u8>> {
    if !(1..=26).contains(&k) {
        return Err(Error::KOutOfRange(k));
    }
    let mut word = vec![b'a'];
    for step in 2..=k {
        let block: Vec<u8> = (0..step as u8).map(|c| b'a' + c).collect();
        for _ in 0..step {
            word.extend_from_slice(&block);
        }
    }
    Ok(word)
}
