//! Builders that stream over the fingerprint changes `lfo(m)` of every
//! position instead of materialising a participation tree.
//!
//! Every maximal location has a unique support `m` and its O-label is a
//! nonempty proper prefix of `lfo(m)`, so walking each `lfo(m)` prefix by
//! prefix visits every maximal location exactly once.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::naming::{padded_sigma, Name};
use crate::participation_tree::EfoList;
use crate::polyhash::{add_mod, find_prime, HashParams, MAX_MODULUS};
use crate::seqcore::{Fingerprint, MaximalLocation, Rank, Sequence};

/// `lfo(m)` without the sentinel, with the position of each character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeList {
    pub support: usize,
    pub chars: Vec<Rank>,
    pub ends: Vec<usize>,
    /// `s_m` never occurs again, so `lfo(m)` ran into the sentinel.
    pub terminated: bool,
}

impl ChangeList {
    /// Number of prefixes that label a maximal location with support `m`.
    pub fn location_prefixes(&self) -> usize {
        if self.terminated {
            self.chars.len()
        } else {
            self.chars.len() - 1
        }
    }

    /// The maximal location whose O-label is the first `t` characters.
    pub fn location(&self, seq: &Sequence, t: usize) -> MaximalLocation {
        assert!(t >= 1 && t <= self.location_prefixes());
        let end = if t < self.chars.len() {
            self.ends[t] - 1
        } else {
            seq.len()
        };
        let set = Fingerprint::from_ranks(self.chars[..t].iter().copied(), seq.sigma());
        let mut start = self.support;
        while start > 1 && set.contains(seq.at(start - 1)) {
            start -= 1;
        }
        MaximalLocation::new(start, end)
    }
}

/// Streams `lfo(m)` for `m = n, n - 1, .., 1`, one list at a time.
pub struct ChangeLists<'a> {
    seq: &'a Sequence,
    efo: Option<EfoList>,
}

impl Iterator for ChangeLists<'_> {
    type Item = ChangeList;

    fn next(&mut self) -> Option<ChangeList> {
        let efo = self.efo.as_mut()?;
        let sentinel = self.seq.sentinel();
        let mut list = ChangeList {
            support: efo.position(),
            chars: Vec::new(),
            ends: Vec::new(),
            terminated: false,
        };
        for (r, p) in efo.lfo_cells() {
            if r == sentinel {
                list.terminated = true;
            } else {
                list.chars.push(r);
                list.ends.push(p);
            }
        }
        if !efo.step(self.seq) {
            self.efo = None;
        }
        Some(list)
    }
}

pub fn enumerate_change_lists(seq: &Sequence) -> ChangeLists<'_> {
    ChangeLists {
        seq,
        efo: Some(EfoList::new(seq)),
    }
}

/// One distinct fingerprint found by a streaming builder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discovered<K> {
    pub key: K,
    /// Key of the fingerprint without `label`; `None` for single characters.
    pub parent: Option<K>,
    pub label: Rank,
    /// First `(support, prefix length)` that produced the fingerprint.
    pub witness: (usize, usize),
}

impl<K> Discovered<K> {
    /// The witness characters in O-label order.
    pub fn witness_string(&self, seq: &Sequence) -> Vec<Rank> {
        let (m, t) = self.witness;
        let mut out = seq.lfo(m).expect("witness support in range");
        out.truncate(t);
        out
    }
}

/// Output of the hash-table naming builder.
#[derive(Clone, Debug)]
pub struct RandomizedNames {
    /// Distinct fingerprints in discovery order; keys are top-level names.
    pub entries: Vec<Discovered<Name>>,
    /// Supports of the maximal locations of each entry.
    pub supports: Vec<Vec<u32>>,
    /// Distinct names held by each level's association after the run.
    pub level_sizes: Vec<usize>,
}

/// Naming with one `(pair -> name)` hash table per level, shared by all
/// change lists. Tables are undone after every list.
pub fn build_names_randomized(seq: &Sequence) -> RandomizedNames {
    let width = padded_sigma(seq.sigma());
    let levels = width.trailing_zeros() as usize;
    let mut maps: Vec<HashMap<(Name, Name), Name>> = vec![HashMap::new(); levels];
    let mut ninit: Vec<Name> = vec![0];
    for k in 0..levels {
        let next = intern(&mut maps[k], (ninit[k], ninit[k]));
        ninit.push(next);
    }
    let mut tables: Vec<Vec<Name>> = (0..=levels).map(|k| vec![ninit[k]; width >> k]).collect();
    let mut entry_of: Vec<u32> = Vec::new();
    let mut out = RandomizedNames {
        entries: Vec::new(),
        supports: Vec::new(),
        level_sizes: Vec::new(),
    };

    for list in enumerate_change_lists(seq) {
        let m = list.support;
        let mut parent = None;
        for (t, &alpha) in list.chars[..list.location_prefixes()].iter().enumerate() {
            let mut j = alpha as usize;
            tables[0][j] = 1;
            for k in 0..levels {
                let pair = (tables[k][j & !1], tables[k][j | 1]);
                j >>= 1;
                tables[k + 1][j] = intern(&mut maps[k], pair);
            }
            let name = tables[levels][0];
            if entry_of.len() <= name as usize {
                entry_of.resize(name as usize + 1, u32::MAX);
            }
            if entry_of[name as usize] == u32::MAX {
                entry_of[name as usize] = out.entries.len() as u32;
                out.entries.push(Discovered {
                    key: name,
                    parent,
                    label: alpha,
                    witness: (m, t + 1),
                });
                out.supports.push(Vec::new());
            }
            out.supports[entry_of[name as usize] as usize].push(m as u32);
            parent = Some(name);
        }
        for &alpha in &list.chars {
            for (k, table) in tables.iter_mut().enumerate() {
                table[alpha as usize >> k] = ninit[k];
            }
        }
    }
    out.level_sizes = maps.iter().map(HashMap::len).collect();
    out
}

fn intern(map: &mut HashMap<(Name, Name), Name>, pair: (Name, Name)) -> Name {
    let next = map.len() as Name;
    *map.entry(pair).or_insert(next)
}

/// Output of the Monte Carlo builder.
#[derive(Clone, Debug)]
pub struct McNames {
    pub params: HashParams,
    /// Distinct hash values in discovery order.
    pub entries: Vec<Discovered<u64>>,
    /// Supports of the maximal locations of each entry, when requested.
    pub supports: Option<Vec<Vec<u32>>>,
}

/// `n^(c+2) σ^3`, the lower end of the Monte Carlo modulus range.
pub fn mc_modulus_bound(n: usize, sigma: usize, c: u32) -> Result<u128> {
    let n = n as u128;
    let sigma = sigma as u128;
    let bound = n
        .checked_pow(c + 2)
        .and_then(|x| x.checked_mul(sigma.pow(3)))
        .ok_or(Error::ModulusTooLarge(u128::MAX))?;
    if bound.saturating_mul(2) >= MAX_MODULUS as u128 {
        return Err(Error::ModulusTooLarge(bound.saturating_mul(2)));
    }
    Ok(bound)
}

/// Names fingerprints by their polynomial hash values directly. Two
/// fingerprints sharing a hash are silently merged, with probability at most
/// `n^-c`.
pub fn build_mc<R: Rng + ?Sized>(
    seq: &Sequence,
    c: u32,
    with_locations: bool,
    rng: &mut R,
) -> Result<McNames> {
    let bound = mc_modulus_bound(seq.len(), seq.sigma(), c)? as u64;
    let p = find_prime(bound + 1, (2 * bound).max(bound + 1), rng)?;
    let params = HashParams::new(p, rng.gen_range(0..p), seq.sigma(), 1);
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut entries = Vec::new();
    let mut supports: Vec<Vec<u32>> = Vec::new();
    for list in enumerate_change_lists(seq) {
        let m = list.support;
        let mut h = 0u64;
        let mut parent = None;
        for (t, &alpha) in list.chars[..list.location_prefixes()].iter().enumerate() {
            h = add_mod(h, params.power_unchecked(alpha), p);
            let slot = *index.entry(h).or_insert_with(|| {
                entries.push(Discovered {
                    key: h,
                    parent,
                    label: alpha,
                    witness: (m, t + 1),
                });
                if with_locations {
                    supports.push(Vec::new());
                }
                entries.len() - 1
            });
            if with_locations {
                supports[slot].push(m as u32);
            }
            parent = Some(h);
        }
    }
    Ok(McNames {
        params,
        entries,
        supports: with_locations.then_some(supports),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_all;
    use crate::seqcore::normalize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn list_at(seq: &Sequence, m: usize) -> ChangeList {
        enumerate_change_lists(seq)
            .find(|l| l.support == m)
            .unwrap()
    }

    #[test]
    fn golden_change_lists() {
        let (seq, alpha) = normalize(b"abaceabacd").unwrap();
        let ranks = |s: &str| {
            s.bytes()
                .map(|b| alpha.rank(b).unwrap())
                .collect::<Vec<_>>()
        };
        let l1 = list_at(&seq, 1);
        assert_eq!(l1.chars, ranks("ab"));
        assert!(!l1.terminated);
        let l5 = list_at(&seq, 5);
        assert_eq!(l5.chars, ranks("eabcd"));
        assert!(l5.terminated);
        let counts: Vec<usize> = (1..=10)
            .map(|m| list_at(&seq, m).location_prefixes())
            .collect();
        assert_eq!(counts, vec![1, 3, 2, 3, 5, 1, 4, 3, 2, 1]);
        assert_eq!(counts.iter().sum::<usize>(), 25);
        assert_eq!(enumerate_change_lists(&seq).count(), 10);
    }

    #[test]
    fn prefixes_are_exactly_the_locations() {
        for raw in [&b"abaceabacd"[..], b"abcbabcd", b"mississippi", b"ab", b"a"] {
            let (seq, _) = normalize(raw).unwrap();
            let gt = oracle_all(&seq).unwrap();
            let mut found = Vec::new();
            for list in enumerate_change_lists(&seq) {
                for t in 1..=list.location_prefixes() {
                    let loc = list.location(&seq, t);
                    assert_eq!(seq.support(loc.start, loc.end).unwrap(), list.support);
                    assert_eq!(seq.o_label(loc.start, loc.end).unwrap(), list.chars[..t]);
                    assert_eq!(seq.extend(list.support, list.ends[t - 1]).unwrap(), loc);
                    found.push(loc);
                }
            }
            found.sort();
            let expect: Vec<_> = gt.locations.iter().map(|(l, _)| *l).collect();
            assert_eq!(found, expect);
        }
    }

    #[test]
    fn randomized_counts() {
        let (seq, _) = normalize(b"abaceabacd").unwrap();
        let names = build_names_randomized(&seq);
        assert_eq!(names.entries.len(), 17);
        assert_eq!(names.supports.iter().map(Vec::len).sum::<usize>(), 25);
        let (seq, _) = normalize(b"ab").unwrap();
        assert_eq!(build_names_randomized(&seq).entries.len(), 3);
    }

    #[test]
    fn mc_counts() {
        let (seq, _) = normalize(b"abaceabacd").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mc = build_mc(&seq, 1, true, &mut rng).unwrap();
        assert_eq!(mc.entries.len(), 17);
        assert_eq!(mc.supports.unwrap().iter().map(Vec::len).sum::<usize>(), 25);
        assert!(mc.params.modulus() > 1000 * 125);
        assert!(build_mc(&seq, 1, false, &mut rng)
            .unwrap()
            .supports
            .is_none());
    }

    #[test]
    fn mc_modulus_limit() {
        assert_eq!(mc_modulus_bound(10, 5, 1).unwrap(), 125_000);
        assert!(matches!(
            mc_modulus_bound(1_000_000, 200, 1),
            Err(Error::ModulusTooLarge(_))
        ));
    }
}
