//! The naming technique: every fingerprint is viewed as a bit vector over
//! the alphabet and named bottom-up, pairing cells level by level, so that
//! equal sets get equal names whatever order their characters arrived in.
//!
//! A single list of changes is a chain; a participation tree is handled the
//! same way with one depth-first search per level that saves and restores the
//! touched table cell around each edge.

use crate::error::{Error, Result};
use crate::participation_tree::ParticipationTree;
use crate::seqcore::Rank;

pub type Name = u32;

/// Alphabet size rounded up to a power of two, at least 2.
pub fn padded_sigma(sigma: usize) -> usize {
    sigma.max(2).next_power_of_two()
}

/// Names of every node of a naming run.
#[derive(Clone, Debug)]
pub struct Naming {
    /// Name of the character set spelled by the root path of each node.
    pub names: Vec<Name>,
    /// Distinct names produced at levels `2..=log σ' + 1`.
    pub level_counts: Vec<usize>,
    /// Whether each level's table was back to its initial state after its
    /// depth-first search.
    pub tables_restored: bool,
    pub padded_sigma: usize,
}

impl Naming {
    pub fn distinct_names(&self) -> usize {
        let mut v = self.names.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// Rooted tree in CSR form. Node 0 is the root; node `v > 0` owns the edge
/// from its parent and that edge sets bit `label[v]`.
struct Shape {
    label: Vec<Rank>,
    offsets: Vec<usize>,
    kids: Vec<usize>,
}

impl Shape {
    fn children(&self, v: usize) -> &[usize] {
        &self.kids[self.offsets[v]..self.offsets[v + 1]]
    }

    fn len(&self) -> usize {
        self.label.len()
    }

    fn chain(list: &[Rank]) -> Self {
        let count = list.len() + 1;
        let mut label = vec![0];
        label.extend_from_slice(list);
        let offsets = (0..=count).map(|v| v.min(list.len())).collect();
        let kids = (1..count).collect();
        Shape {
            label,
            offsets,
            kids,
        }
    }

    fn of_tree(pt: &ParticipationTree) -> Self {
        let mut label = Vec::with_capacity(pt.node_count());
        let mut offsets = Vec::with_capacity(pt.node_count() + 1);
        let mut kids = Vec::with_capacity(pt.node_count());
        for node in pt.nodes() {
            label.push(node.label);
            offsets.push(kids.len());
            kids.extend(node.children.iter().map(|&(_, c)| c));
        }
        offsets.push(kids.len());
        label[0] = 0;
        Shape {
            label,
            offsets,
            kids,
        }
    }
}

/// Sort pairs lexicographically with two counting-sort passes and name them
/// densely in sorted order. Returns the sorting permutation and the name of
/// each input pair.
pub fn radix_sort_pairs(pairs: &[(Name, Name)]) -> (Vec<usize>, Vec<Name>) {
    if pairs.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let universe = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap() as usize + 1;
    let by_second = counting_pass(pairs, (0..pairs.len()).collect(), universe, |p| p.1);
    let order = counting_pass(pairs, by_second, universe, |p| p.0);
    let mut names = vec![0; pairs.len()];
    let mut next: Name = 0;
    for (rank, &idx) in order.iter().enumerate() {
        if rank > 0 && pairs[order[rank - 1]] != pairs[idx] {
            next += 1;
        }
        names[idx] = next;
    }
    (order, names)
}

fn counting_pass(
    pairs: &[(Name, Name)],
    input: Vec<usize>,
    universe: usize,
    key: impl Fn(&(Name, Name)) -> Name,
) -> Vec<usize> {
    let mut count = vec![0usize; universe + 1];
    for &i in &input {
        count[key(&pairs[i]) as usize + 1] += 1;
    }
    for k in 1..=universe {
        count[k] += count[k - 1];
    }
    let mut out = vec![0; input.len()];
    for &i in &input {
        let slot = &mut count[key(&pairs[i]) as usize];
        out[*slot] = i;
        *slot += 1;
    }
    out
}

/// Tables seen at one node after every level, bottom row first.
type Snapshot = Vec<Vec<Name>>;

fn run(shape: &Shape, sigma: usize, watch: Option<usize>) -> (Naming, Snapshot) {
    let width = padded_sigma(sigma);
    let levels = width.trailing_zeros() as usize;
    let count = shape.len();
    // Δ of the edge into each node: the value written and the cell index
    let mut value: Vec<Name> = vec![1; count];
    let mut cell: Vec<usize> = shape.label.iter().map(|&r| r as usize).collect();
    let mut pair: Vec<(Name, Name)> = vec![(0, 0); count];
    let mut saved: Vec<Name> = vec![0; count];
    let mut ninit: Name = 0;
    let mut level_counts = Vec::with_capacity(levels);
    let mut restored = true;
    let mut snapshot = Vec::new();

    let mut stack: Vec<(usize, usize)> = Vec::new();
    for level in 0..levels {
        let size = width >> level;
        let mut table = vec![ninit; size];
        stack.push((0, 0));
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if let Some(&c) = shape.children(v).get(next) {
                top.1 += 1;
                let j = cell[c];
                saved[c] = table[j];
                table[j] = value[c];
                pair[c] = (table[j & !1], table[j | 1]);
                if watch == Some(c) {
                    snapshot.push(table.clone());
                }
                stack.push((c, 0));
            } else {
                stack.pop();
                if v != 0 {
                    table[cell[v]] = saved[v];
                }
            }
        }
        restored &= table.iter().all(|&x| x == ninit);

        pair[0] = (ninit, ninit);
        let (_, names) = radix_sort_pairs(&pair);
        level_counts.push(names.iter().copied().max().map_or(0, |m| m as usize + 1));
        ninit = names[0];
        value[1..count].copy_from_slice(&names[1..count]);
        cell[1..count].iter_mut().for_each(|c| *c >>= 1);
    }
    if let Some(w) = watch {
        let top = if w == 0 { ninit } else { value[w] };
        snapshot.push(vec![top]);
    }
    let mut names = value;
    names[0] = ninit;
    (
        Naming {
            names,
            level_counts,
            tables_restored: restored,
            padded_sigma: width,
        },
        snapshot,
    )
}

/// Names of the prefixes of a list of distinct characters: entry `t` names
/// the set of the first `t` characters, entry 0 the empty set.
pub fn name_list(list: &[Rank], sigma: usize) -> Result<Naming> {
    Ok(name_list_with_tables(list, sigma)?.0)
}

/// Like [`name_list`], also returning the table contents of every level once
/// the whole list has been applied.
pub fn name_list_with_tables(list: &[Rank], sigma: usize) -> Result<(Naming, Snapshot)> {
    let mut seen = vec![false; sigma];
    for &r in list {
        let slot = seen
            .get_mut(r as usize)
            .ok_or(Error::RankOutOfRange { rank: r, sigma })?;
        if *slot {
            return Err(Error::DuplicateChange(r));
        }
        *slot = true;
    }
    let shape = Shape::chain(list);
    Ok(run(&shape, sigma, Some(list.len())))
}

/// Name the character set of every root path of the participation tree.
pub fn name_fingerprints(pt: &ParticipationTree) -> Naming {
    run(&Shape::of_tree(pt), pt.sigma(), None).0
}
