//! Per-fingerprint lists of maximal locations, stored as the supports of
//! the locations. A location is rebuilt from its support by growing the
//! interval while the neighbours belong to the fingerprint.

use crate::error::{Error, Result};
use crate::seqcore::{Fingerprint, MaximalLocation, Sequence};

/// Each trie node owns a few ranges of `supports`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReportIndex {
    supports: Vec<u32>,
    ranges: Vec<(u32, u32)>,
    offsets: Vec<u32>,
}

impl ReportIndex {
    pub fn from_parts(
        supports: Vec<u32>,
        ranges: Vec<(u32, u32)>,
        offsets: Vec<u32>,
    ) -> Result<Self> {
        let bad = offsets.first() != Some(&0)
            || offsets.windows(2).any(|w| w[0] > w[1])
            || *offsets.last().unwrap_or(&0) as usize != ranges.len()
            || ranges
                .iter()
                .any(|&(a, b)| a > b || b as usize > supports.len());
        if bad {
            return Err(Error::Format("report ranges are inconsistent".into()));
        }
        Ok(ReportIndex {
            supports,
            ranges,
            offsets,
        })
    }

    /// One contiguous range per node, `lists[v]` holding node `v`'s supports.
    pub fn from_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut out = ReportIndex {
            supports: Vec::new(),
            ranges: Vec::new(),
            offsets: vec![0],
        };
        for list in lists {
            if !list.is_empty() {
                let start = out.supports.len() as u32;
                out.supports.extend(list);
                out.ranges.push((start, out.supports.len() as u32));
            }
            out.offsets.push(out.ranges.len() as u32);
        }
        out
    }

    pub fn supports(&self) -> &[u32] {
        &self.supports
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn supports_of(&self, node: usize) -> impl Iterator<Item = u32> + '_ {
        let (a, b) = (self.offsets[node] as usize, self.offsets[node + 1] as usize);
        self.ranges[a..b]
            .iter()
            .flat_map(move |&(s, e)| self.supports[s as usize..e as usize].iter().copied())
    }

    pub fn count(&self, node: usize) -> usize {
        let (a, b) = (self.offsets[node] as usize, self.offsets[node + 1] as usize);
        self.ranges[a..b]
            .iter()
            .map(|&(s, e)| (e - s) as usize)
            .sum()
    }

    /// Total number of stored locations.
    pub fn location_count(&self) -> usize {
        self.ranges.iter().map(|&(s, e)| (e - s) as usize).sum()
    }

    /// Locations of the fingerprint `f` stored at `node`, sorted.
    pub fn locations(&self, node: usize, f: &Fingerprint, seq: &Sequence) -> Vec<MaximalLocation> {
        let mut out: Vec<MaximalLocation> = self
            .supports_of(node)
            .map(|m| expand(seq, f, m as usize))
            .collect();
        out.sort_unstable();
        out
    }
}

/// The maximal location with fingerprint `f` containing position `m`.
pub fn expand(seq: &Sequence, f: &Fingerprint, m: usize) -> MaximalLocation {
    let (mut lo, mut hi) = (m, m);
    while lo > 1 && f.contains(seq.at(lo - 1)) {
        lo -= 1;
    }
    while hi < seq.len() && f.contains(seq.at(hi + 1)) {
        hi += 1;
    }
    MaximalLocation::new(lo, hi)
}
