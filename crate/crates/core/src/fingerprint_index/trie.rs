//! Fingerprint trie: one node per fingerprint, each child adding one
//! character to its parent's set.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::seqcore::{Fingerprint, Rank};

pub const TRIE_ROOT: usize = 0;

#[derive(Clone, Debug)]
pub struct FingerprintTrie {
    parent: Vec<u32>,
    label: Vec<Rank>,
    depth: Vec<u32>,
    children: HashMap<(u32, Rank), u32>,
    sigma: usize,
}

impl FingerprintTrie {
    /// A trie holding only the empty set.
    pub fn new(sigma: usize) -> Self {
        FingerprintTrie {
            parent: vec![0],
            label: vec![sigma as Rank],
            depth: vec![0],
            children: HashMap::new(),
            sigma,
        }
    }

    /// Rebuild from parent and label arrays, where every parent precedes its
    /// children.
    pub fn from_arrays(parent: &[u32], label: &[Rank], sigma: usize) -> Result<Self> {
        if parent.is_empty() || parent.len() != label.len() {
            return Err(Error::Format(
                "trie arrays are empty or of different lengths".into(),
            ));
        }
        let mut trie = FingerprintTrie::new(sigma);
        let mut sets = vec![Fingerprint::empty(sigma)];
        for v in 1..parent.len() {
            let (p, a) = (parent[v] as usize, label[v]);
            if p >= v || a as usize >= sigma || sets[p].contains(a) || trie.child(p, a).is_some() {
                return Err(Error::Format(format!("trie node {v} is malformed")));
            }
            let mut set = sets[p].clone();
            set.insert(a);
            sets.push(set);
            trie.add_child(p, a);
        }
        Ok(trie)
    }

    pub fn add_child(&mut self, parent: usize, label: Rank) -> usize {
        let id = self.parent.len();
        let previous = self.children.insert((parent as u32, label), id as u32);
        debug_assert!(previous.is_none(), "duplicate trie edge");
        self.parent.push(parent as u32);
        self.label.push(label);
        self.depth.push(self.depth[parent] + 1);
        id
    }

    pub fn child(&self, node: usize, label: Rank) -> Option<usize> {
        self.children
            .get(&(node as u32, label))
            .map(|&c| c as usize)
    }

    pub fn parent(&self, node: usize) -> usize {
        self.parent[node] as usize
    }

    pub fn label(&self, node: usize) -> Rank {
        self.label[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node] as usize
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn labels(&self) -> &[Rank] {
        &self.label
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Nodes including the root.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 1
    }

    pub fn fingerprint_count(&self) -> usize {
        self.len() - 1
    }

    /// Labels from the root down to `node`.
    pub fn string(&self, mut node: usize) -> Vec<Rank> {
        let mut out = Vec::with_capacity(self.depth(node));
        while node != TRIE_ROOT {
            out.push(self.label[node]);
            node = self.parent(node);
        }
        out.reverse();
        out
    }

    pub fn fingerprint(&self, node: usize) -> Fingerprint {
        Fingerprint::from_ranks(self.string(node), self.sigma)
    }

    /// Follow `path` from the root.
    pub fn walk(&self, path: impl IntoIterator<Item = Rank>) -> Option<usize> {
        path.into_iter()
            .try_fold(TRIE_ROOT, |node, a| self.child(node, a))
    }
}

/// Trie over a prefix-closed collection. A fingerprint hangs below `f \ {α}`
/// for the smallest `α` for which that set is present.
pub fn build_trie(collection: &[Fingerprint], sigma: usize) -> Result<FingerprintTrie> {
    let hinted: Vec<(Fingerprint, Option<Rank>)> =
        collection.iter().map(|f| (f.clone(), None)).collect();
    build_trie_with_hints(&hinted, sigma)
}

/// Like [`build_trie`], trying the hinted last character first.
pub fn build_trie_with_hints(
    collection: &[(Fingerprint, Option<Rank>)],
    sigma: usize,
) -> Result<FingerprintTrie> {
    let mut order: Vec<usize> = (0..collection.len()).collect();
    order.sort_by_key(|&i| collection[i].0.len());
    let mut trie = FingerprintTrie::new(sigma);
    let mut node_of: HashMap<Fingerprint, usize> = HashMap::new();
    node_of.insert(Fingerprint::empty(sigma), TRIE_ROOT);
    for i in order {
        let (f, hint) = &collection[i];
        if node_of.contains_key(f) {
            continue;
        }
        let parent_via = |a: Rank| {
            let mut g = f.clone();
            g.remove(a);
            node_of.get(&g).copied()
        };
        let choice = hint
            .filter(|&a| f.contains(a))
            .and_then(|a| parent_via(a).map(|p| (p, a)))
            .or_else(|| f.iter().find_map(|a| parent_via(a).map(|p| (p, a))));
        let (p, a) = choice.ok_or(Error::NotPrefixClosed(f.len()))?;
        let id = trie.add_child(p, a);
        node_of.insert(f.clone(), id);
    }
    Ok(trie)
}
