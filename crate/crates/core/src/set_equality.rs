//! Are two strings of distinct characters permutations of one set?
//!
//! Three interchangeable methods: a hash table, a σ-bit vector, and a
//! k-phase partitioning that only needs tables of about `σ^(1/k)` cells.
//! Duplicates inside either string are reported as errors, never as `false`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::naming::padded_sigma;
use crate::seqcore::Rank;

/// Reusable working memory for [`eq_bits`] and [`eq_partitioned`].
///
/// Every method leaves it clean, whatever the outcome.
#[derive(Clone, Debug)]
pub struct EqualityScratch {
    sigma: usize,
    bits: Vec<u64>,
    /// Per-phase bucket tables, keyed by `k`.
    partitions: HashMap<usize, Partition>,
}

#[derive(Clone, Debug)]
struct Partition {
    widths: Vec<u32>,
    /// `t1[d]`, `t2[d]`: buckets of phase `d`.
    t1: Vec<Vec<Vec<Rank>>>,
    t2: Vec<Vec<Vec<Rank>>>,
    low: Vec<u64>,
}

fn bit_words(bits: usize) -> usize {
    bits.div_ceil(64).max(1)
}

#[inline]
fn test_and_set(bits: &mut [u64], c: usize) -> bool {
    let (w, b) = (c / 64, 1u64 << (c % 64));
    let old = bits[w] & b != 0;
    bits[w] |= b;
    old
}

#[inline]
fn test_and_clear(bits: &mut [u64], c: usize) -> bool {
    let (w, b) = (c / 64, 1u64 << (c % 64));
    let old = bits[w] & b != 0;
    bits[w] &= !b;
    old
}

/// Slice widths, most significant first: the first is `ceil(b / k)` bits and
/// the rest of the `b = log σ'` bits are spread as evenly as possible.
pub fn slice_widths(sigma: usize, k: usize) -> Vec<u32> {
    let b = padded_sigma(sigma).trailing_zeros();
    let k = k as u32;
    let first = b.div_ceil(k);
    let rest = b - first;
    let others = k - 1;
    let mut widths = vec![first];
    widths.extend((0..others).map(|i| rest / others + u32::from(i < rest % others)));
    widths
}

impl Partition {
    fn new(sigma: usize, k: usize) -> Self {
        let widths = slice_widths(sigma, k);
        let phases = k - 1;
        let table = |w: u32| vec![Vec::new(); 1usize << w];
        Partition {
            t1: widths[..phases].iter().map(|&w| table(w)).collect(),
            t2: widths[..phases].iter().map(|&w| table(w)).collect(),
            low: vec![0; bit_words(1 << widths[phases])],
            widths,
        }
    }

    fn is_clean(&self) -> bool {
        let empty = |t: &Vec<Vec<Vec<Rank>>>| t.iter().flatten().all(Vec::is_empty);
        empty(&self.t1) && empty(&self.t2) && self.low.iter().all(|&w| w == 0)
    }

    fn shift(&self, phase: usize) -> u32 {
        self.widths[phase + 1..].iter().sum()
    }

    fn slice(&self, c: Rank, phase: usize) -> usize {
        ((c >> self.shift(phase)) & ((1u32 << self.widths[phase]) - 1)) as usize
    }

    /// `Ok(false)` on a bucket size mismatch or a missing character;
    /// `Err` when `s1` repeats a character.
    fn compare(&mut self, s1: &[Rank], s2: &[Rank], phase: usize) -> Result<bool> {
        if phase + 1 == self.widths.len() {
            return self.compare_low(s1, s2);
        }
        let mut nonempty = Vec::new();
        for &c in s1 {
            let j = self.slice(c, phase);
            if self.t1[phase][j].is_empty() {
                nonempty.push(j);
            }
            self.t1[phase][j].push(c);
        }
        for &c in s2 {
            let j = self.slice(c, phase);
            self.t2[phase][j].push(c);
        }
        let mut outcome = Ok(true);
        for &j in &nonempty {
            if self.t1[phase][j].len() != self.t2[phase][j].len() {
                outcome = Ok(false);
                break;
            }
            let r1 = std::mem::take(&mut self.t1[phase][j]);
            let r2 = std::mem::take(&mut self.t2[phase][j]);
            let result = self.compare(&r1, &r2, phase + 1);
            self.t1[phase][j] = r1;
            self.t2[phase][j] = r2;
            match result {
                Ok(true) => {}
                other => {
                    outcome = other;
                    break;
                }
            }
        }
        for &j in &nonempty {
            self.t1[phase][j].clear();
        }
        for &c in s2 {
            let j = self.slice(c, phase);
            self.t2[phase][j].clear();
        }
        outcome
    }

    fn compare_low(&mut self, s1: &[Rank], s2: &[Rank]) -> Result<bool> {
        let mask = (1u32 << self.widths[self.widths.len() - 1]) - 1;
        let mut outcome = Ok(true);
        let mut set = 0;
        for &c in s1 {
            if test_and_set(&mut self.low, (c & mask) as usize) {
                outcome = Err(Error::DuplicateCharacter(c));
                break;
            }
            set += 1;
        }
        if outcome.is_ok() {
            for &c in s2 {
                if !test_and_clear(&mut self.low, (c & mask) as usize) {
                    outcome = Ok(false);
                    break;
                }
            }
        }
        for &c in &s1[..set] {
            test_and_clear(&mut self.low, (c & mask) as usize);
        }
        outcome
    }
}

impl EqualityScratch {
    pub fn new(sigma: usize) -> Self {
        EqualityScratch {
            sigma,
            bits: vec![0; bit_words(sigma)],
            partitions: HashMap::new(),
        }
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// All bits zero and all bucket lists empty.
    pub fn is_clean(&self) -> bool {
        self.bits.iter().all(|&w| w == 0) && self.partitions.values().all(Partition::is_clean)
    }

    /// Sum of every scratch word and bucket length; zero when clean.
    pub fn checksum(&self) -> u64 {
        let bits: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        let lists: u64 = self
            .partitions
            .values()
            .map(|p| {
                let t: usize = p.t1.iter().chain(&p.t2).flatten().map(Vec::len).sum();
                t as u64 + p.low.iter().map(|w| w.count_ones() as u64).sum::<u64>()
            })
            .sum();
        bits + lists
    }

    fn check_ranks(&self, s: &[Rank]) -> Result<()> {
        match s.iter().find(|&&c| c as usize >= self.sigma) {
            Some(&c) => Err(Error::RankOutOfRange {
                rank: c,
                sigma: self.sigma,
            }),
            None => Ok(()),
        }
    }

    /// First repeated character of `s`, using the bit vector.
    fn duplicate_in(&mut self, s: &[Rank]) -> Option<Rank> {
        let mut dup = None;
        let mut set = 0;
        for &c in s {
            if test_and_set(&mut self.bits, c as usize) {
                dup = Some(c);
                break;
            }
            set += 1;
        }
        for &c in &s[..set] {
            test_and_clear(&mut self.bits, c as usize);
        }
        dup
    }
}

fn check_lengths(s1: &[Rank], s2: &[Rank]) -> Result<()> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch(s1.len(), s2.len()));
    }
    Ok(())
}

/// σ-bit vector method: set the bits of `s1`, clear them with `s2`.
pub fn eq_bits(s1: &[Rank], s2: &[Rank], scratch: &mut EqualityScratch) -> Result<bool> {
    check_lengths(s1, s2)?;
    scratch.check_ranks(s1)?;
    scratch.check_ranks(s2)?;
    for (set, &c) in s1.iter().enumerate() {
        if test_and_set(&mut scratch.bits, c as usize) {
            for &d in &s1[..set] {
                test_and_clear(&mut scratch.bits, d as usize);
            }
            return Err(Error::DuplicateCharacter(c));
        }
    }
    for &c in s2 {
        if !test_and_clear(&mut scratch.bits, c as usize) {
            for &d in s1 {
                test_and_clear(&mut scratch.bits, d as usize);
            }
            return match scratch.duplicate_in(s2) {
                Some(d) => Err(Error::DuplicateCharacter(d)),
                None => Ok(false),
            };
        }
    }
    Ok(true)
}

/// Hash-table method; needs no scratch.
pub fn eq_hash(s1: &[Rank], s2: &[Rank]) -> Result<bool> {
    check_lengths(s1, s2)?;
    let mut marks: HashMap<Rank, bool> = HashMap::with_capacity(s1.len());
    for &c in s1 {
        if marks.insert(c, false).is_some() {
            return Err(Error::DuplicateCharacter(c));
        }
    }
    let mut equal = true;
    let mut seen2: Option<HashMap<Rank, ()>> = None;
    for &c in s2 {
        match marks.get_mut(&c) {
            Some(mark) if !*mark => *mark = true,
            Some(_) => return Err(Error::DuplicateCharacter(c)),
            None => {
                equal = false;
                let seen = seen2.get_or_insert_with(HashMap::new);
                if seen.insert(c, ()).is_some() {
                    return Err(Error::DuplicateCharacter(c));
                }
            }
        }
    }
    Ok(equal && marks.values().all(|&m| m))
}

/// k-phase partitioning: bucket both strings by the `k - 1` most
/// significant slices, then compare matching buckets on the last slice.
pub fn eq_partitioned(
    s1: &[Rank],
    s2: &[Rank],
    k: usize,
    scratch: &mut EqualityScratch,
) -> Result<bool> {
    assert!(k >= 2, "k must be at least 2");
    check_lengths(s1, s2)?;
    scratch.check_ranks(s1)?;
    scratch.check_ranks(s2)?;
    let sigma = scratch.sigma;
    let part = scratch
        .partitions
        .entry(k)
        .or_insert_with(|| Partition::new(sigma, k));
    match part.compare(s1, s2, 0)? {
        true => Ok(true),
        false => {
            // a size mismatch can hide a repeat in either string
            part.compare(s1, s1, 0)?;
            part.compare(s2, s2, 0)?;
            Ok(false)
        }
    }
}
