//! Alphabets, simple (run-collapsed) sequences, fingerprints and the
//! reference definitions of `fo`, `lfo`, `Support`, O-labels and `Extend`.
//!
//! Positions are 1-based everywhere. Position `n + 1` of a sequence holds
//! the sentinel, whose rank is `sigma` (one past the last real rank).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank of a character in its alphabet.
pub type Rank = u32;

/// Bijection between the distinct bytes of a text and `0..sigma`.
///
/// Ranks are assigned in order of first appearance.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn from_symbols(symbols: Vec<u8>) -> Result<Self> {
        let mut seen = [false; 256];
        for &b in &symbols {
            if std::mem::replace(&mut seen[b as usize], true) {
                return Err(Error::Format(format!("alphabet repeats byte {b:#04x}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn rank(&self, byte: u8) -> Option<Rank> {
        self.symbols
            .iter()
            .position(|&b| b == byte)
            .map(|r| r as Rank)
    }

    pub fn unrank(&self, rank: Rank) -> Option<u8> {
        self.symbols.get(rank as usize).copied()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Lookup table byte -> rank, for hot loops.
    pub fn rank_table(&self) -> [Option<Rank>; 256] {
        let mut table = [None; 256];
        for (r, &b) in self.symbols.iter().enumerate() {
            table[b as usize] = Some(r as Rank);
        }
        table
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", String::from_utf8_lossy(&self.symbols))
    }
}

/// A simple sequence (no two equal adjacent characters) terminated by a
/// sentinel, with a map from each position back to its run in the raw text.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    // chars[p - 1] is the rank at position p; chars[n] is the sentinel.
    chars: Vec<Rank>,
    sigma: usize,
    runmap: Vec<(usize, usize)>,
}

/// A maximal location `<start, end>` in normalized 1-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MaximalLocation {
    pub start: usize,
    pub end: usize,
}

impl MaximalLocation {
    pub fn new(start: usize, end: usize) -> Self {
        MaximalLocation { start, end }
    }
}

impl fmt::Display for MaximalLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.start, self.end)
    }
}

/// Normalize a raw byte string: collapse runs and rank bytes by first appearance.
pub fn normalize(raw: &[u8]) -> Result<(Sequence, Alphabet)> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut table: [Option<Rank>; 256] = [None; 256];
    let mut symbols = Vec::new();
    let mut ranks = Vec::with_capacity(raw.len());
    for &b in raw {
        let r = *table[b as usize].get_or_insert_with(|| {
            symbols.push(b);
            (symbols.len() - 1) as Rank
        });
        ranks.push(r);
    }
    let sigma = symbols.len();
    let seq = Sequence::from_ranks(&ranks, sigma)?;
    Ok((seq, Alphabet { symbols }))
}

impl Sequence {
    /// Build a sequence from raw ranks, collapsing runs of equal ranks.
    pub fn from_ranks(raw: &[Rank], sigma: usize) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut chars = Vec::new();
        let mut runmap: Vec<(usize, usize)> = Vec::new();
        for (idx, &r) in raw.iter().enumerate() {
            if r as usize >= sigma {
                return Err(Error::RankOutOfRange { rank: r, sigma });
            }
            let pos = idx + 1;
            if chars.last() == Some(&r) {
                runmap.last_mut().unwrap().1 = pos;
            } else {
                chars.push(r);
                runmap.push((pos, pos));
            }
        }
        chars.push(sigma as Rank);
        Ok(Sequence {
            chars,
            sigma,
            runmap,
        })
    }

    /// Rebuild from stored parts (used when loading an index).
    pub(crate) fn from_parts(
        chars: Vec<Rank>,
        sigma: usize,
        runmap: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if chars.is_empty() || chars.len() != runmap.len() {
            return Err(Error::Format("sequence and run map lengths differ".into()));
        }
        if chars.windows(2).any(|w| w[0] == w[1]) || chars.iter().any(|&c| c as usize >= sigma) {
            return Err(Error::Format("stored sequence is not simple".into()));
        }
        let mut chars = chars;
        chars.push(sigma as Rank);
        Ok(Sequence {
            chars,
            sigma,
            runmap,
        })
    }

    /// Number of real positions (sentinel excluded).
    pub fn len(&self) -> usize {
        self.chars.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn sentinel(&self) -> Rank {
        self.sigma as Rank
    }

    /// Rank at 1-based position `pos`, where `pos = n + 1` is the sentinel.
    #[inline]
    pub fn at(&self, pos: usize) -> Rank {
        self.chars[pos - 1]
    }

    /// Ranks of positions `1..=n`.
    pub fn ranks(&self) -> &[Rank] {
        &self.chars[..self.len()]
    }

    /// Ranks of positions `1..=n+1`.
    pub fn ranks_with_sentinel(&self) -> &[Rank] {
        &self.chars
    }

    pub fn runmap(&self) -> &[(usize, usize)] {
        &self.runmap
    }

    /// Length of the raw text this sequence was normalized from.
    pub fn raw_len(&self) -> usize {
        self.runmap.last().map_or(0, |r| r.1)
    }

    fn check(&self, i: usize, j: usize, max: usize) -> Result<()> {
        if i == 0 || i > j || j > max {
            return Err(Error::IndexOutOfRange {
                i,
                j,
                n: self.len(),
            });
        }
        Ok(())
    }

    /// Set of ranks occurring in `[i, j]`.
    pub fn fingerprint_of(&self, i: usize, j: usize) -> Result<Fingerprint> {
        self.check(i, j, self.len())?;
        Ok(Fingerprint::from_ranks(
            self.chars[i - 1..j].iter().copied(),
            self.sigma,
        ))
    }

    /// First occurrences of each distinct character of `[i, j]`, in reading
    /// order. `j` may be `n + 1` (the sentinel).
    pub fn fo(&self, i: usize, j: usize) -> Result<Vec<Rank>> {
        self.check(i, j, self.len() + 1)?;
        let mut seen = vec![false; self.sigma + 1];
        Ok(self.chars[i - 1..j]
            .iter()
            .copied()
            .filter(|&c| !std::mem::replace(&mut seen[c as usize], true))
            .collect())
    }

    /// Next position after `i` holding the same character, if any.
    pub fn next_occurrence(&self, i: usize) -> Option<usize> {
        let c = self.at(i);
        (i + 1..=self.len()).find(|&p| self.at(p) == c)
    }

    /// `fo(i, j - 1)` where `j` is the next occurrence of `s_i`; runs through
    /// the sentinel when there is none.
    pub fn lfo(&self, i: usize) -> Result<Vec<Rank>> {
        self.check(i, i, self.len())?;
        match self.next_occurrence(i) {
            Some(p) => self.fo(i, p - 1),
            None => self.fo(i, self.len() + 1),
        }
    }

    /// Minimal position among the rightmost occurrences of the letters of `[i, j]`.
    pub fn support(&self, i: usize, j: usize) -> Result<usize> {
        self.check(i, j, self.len())?;
        let mut seen = vec![false; self.sigma];
        let mut support = j;
        for p in (i..=j).rev() {
            if !std::mem::replace(&mut seen[self.at(p) as usize], true) {
                support = p;
            }
        }
        Ok(support)
    }

    /// `fo(Support([i, j]), j)`.
    pub fn o_label(&self, i: usize, j: usize) -> Result<Vec<Rank>> {
        let m = self.support(i, j)?;
        self.fo(m, j)
    }

    /// Grow `[i, j]` while the neighbouring characters belong to `C(i, j)`.
    pub fn extend(&self, i: usize, j: usize) -> Result<MaximalLocation> {
        let set = self.fingerprint_of(i, j)?;
        let (mut lo, mut hi) = (i, j);
        while lo > 1 && set.contains(self.at(lo - 1)) {
            lo -= 1;
        }
        while hi < self.len() && set.contains(self.at(hi + 1)) {
            hi += 1;
        }
        Ok(MaximalLocation::new(lo, hi))
    }

    /// Raw-text interval covered by a normalized location.
    pub fn denormalize(&self, loc: MaximalLocation) -> Result<(usize, usize)> {
        self.check(loc.start, loc.end, self.len())?;
        Ok((self.runmap[loc.start - 1].0, self.runmap[loc.end - 1].1))
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence(sigma={}, {:?})", self.sigma, self.ranks())
    }
}

/// A set of character ranks stored as a bit-set with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    words: Vec<u64>,
    len: u32,
}

impl Fingerprint {
    pub fn empty(sigma: usize) -> Self {
        Fingerprint {
            words: vec![0; sigma.div_ceil(64).max(1)],
            len: 0,
        }
    }

    /// Ranks `>= sigma` (such as the sentinel) are ignored.
    pub fn from_ranks(ranks: impl IntoIterator<Item = Rank>, sigma: usize) -> Self {
        let mut f = Fingerprint::empty(sigma);
        for r in ranks {
            if (r as usize) < sigma {
                f.insert(r);
            }
        }
        f
    }

    /// Inserts `r`, returning whether it was absent.
    pub fn insert(&mut self, r: Rank) -> bool {
        let (w, b) = (r as usize / 64, r % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, r: Rank) -> bool {
        let (w, b) = (r as usize / 64, r % 64);
        let present = self.words.get(w).is_some_and(|x| x & (1 << b) != 0);
        if present {
            self.words[w] &= !(1 << b);
            self.len -= 1;
        }
        present
    }

    #[inline]
    pub fn contains(&self, r: Rank) -> bool {
        self.words
            .get(r as usize / 64)
            .is_some_and(|w| w & (1 << (r % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Ranks in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Rank> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(w as Rank * 64 + b)
            })
        })
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
