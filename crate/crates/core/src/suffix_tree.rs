//! Suffix tree of a sentinel-terminated sequence.
//!
//! Built online with Ukkonen's algorithm, then every edge is re-anchored so
//! that the path label of its lower node points at its leftmost occurrence.

use std::fmt::Write as _;

use crate::seqcore::{Rank, Sequence};

pub type NodeId = usize;

pub const ROOT: NodeId = 0;

#[derive(Clone, Debug)]
pub struct StNode {
    pub parent: NodeId,
    /// String depth of the node (length of its path label).
    pub depth: usize,
    /// Incoming edge as a 1-based inclusive interval `[k, l]`; `(0, 0)` at the root.
    pub edge: (usize, usize),
    /// Children sorted by first character.
    pub children: Vec<(Rank, NodeId)>,
    /// Suffix start for leaves.
    pub suffix: Option<usize>,
    /// Smallest suffix start in the subtree.
    pub min_suffix: usize,
}

#[derive(Clone, Debug)]
pub struct SuffixTree {
    nodes: Vec<StNode>,
    leaves: Vec<NodeId>,
}

const OPEN: usize = usize::MAX;

struct Builder<'a> {
    text: &'a [Rank],
    start: Vec<usize>,
    end: Vec<usize>,
    link: Vec<usize>,
    children: Vec<Vec<(Rank, NodeId)>>,
}

impl Builder<'_> {
    fn new_node(&mut self, start: usize, end: usize) -> NodeId {
        self.start.push(start);
        self.end.push(end);
        self.link.push(ROOT);
        self.children.push(Vec::new());
        self.start.len() - 1
    }

    fn child(&self, node: NodeId, c: Rank) -> Option<NodeId> {
        let kids = &self.children[node];
        kids.binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| kids[i].1)
    }

    fn set_child(&mut self, node: NodeId, c: Rank, child: NodeId) {
        let kids = &mut self.children[node];
        match kids.binary_search_by_key(&c, |&(k, _)| k) {
            Ok(i) => kids[i].1 = child,
            Err(i) => kids.insert(i, (c, child)),
        }
    }

    fn edge_len(&self, node: NodeId, pos: usize) -> usize {
        self.end[node].min(pos + 1) - self.start[node]
    }

    // 0-based, end-exclusive intervals
    fn run(&mut self) {
        let text = self.text;
        self.new_node(0, 0);
        let (mut active_node, mut active_edge, mut active_len) = (ROOT, 0usize, 0usize);
        let mut remainder = 0usize;
        for pos in 0..text.len() {
            remainder += 1;
            let mut last_new: Option<NodeId> = None;
            while remainder > 0 {
                if active_len == 0 {
                    active_edge = pos;
                }
                let c = text[active_edge];
                match self.child(active_node, c) {
                    None => {
                        let leaf = self.new_node(pos, OPEN);
                        self.set_child(active_node, c, leaf);
                        if let Some(n) = last_new.take() {
                            self.link[n] = active_node;
                        }
                    }
                    Some(next) => {
                        let len = self.edge_len(next, pos);
                        if active_len >= len {
                            active_edge += len;
                            active_len -= len;
                            active_node = next;
                            continue;
                        }
                        if text[self.start[next] + active_len] == text[pos] {
                            if let Some(n) = last_new.take() {
                                if active_node != ROOT {
                                    self.link[n] = active_node;
                                }
                            }
                            active_len += 1;
                            break;
                        }
                        let split_at = self.start[next] + active_len;
                        let mid = self.new_node(self.start[next], split_at);
                        self.set_child(active_node, c, mid);
                        let leaf = self.new_node(pos, OPEN);
                        self.set_child(mid, text[pos], leaf);
                        self.start[next] = split_at;
                        self.set_child(mid, text[split_at], next);
                        if let Some(n) = last_new {
                            self.link[n] = mid;
                        }
                        last_new = Some(mid);
                    }
                }
                remainder -= 1;
                if active_node == ROOT && active_len > 0 {
                    active_len -= 1;
                    active_edge = pos + 1 - remainder;
                } else if active_node != ROOT {
                    active_node = self.link[active_node];
                }
            }
        }
    }
}

impl SuffixTree {
    /// Build the suffix tree of `s_1..s_n #`.
    pub fn build(seq: &Sequence) -> Self {
        let text = seq.ranks_with_sentinel();
        let total = text.len();
        let mut b = Builder {
            text,
            start: Vec::with_capacity(2 * total),
            end: Vec::with_capacity(2 * total),
            link: Vec::with_capacity(2 * total),
            children: Vec::with_capacity(2 * total),
        };
        b.run();

        let count = b.start.len();
        let mut nodes: Vec<StNode> = (0..count)
            .map(|_| StNode {
                parent: ROOT,
                depth: 0,
                edge: (0, 0),
                children: Vec::new(),
                suffix: None,
                min_suffix: usize::MAX,
            })
            .collect();

        // Preorder pass: parents and string depths.
        let mut order = Vec::with_capacity(count);
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(_, c) in b.children[v].iter().rev() {
                let end = b.end[c].min(total);
                nodes[c].parent = v;
                nodes[c].depth = nodes[v].depth + end - b.start[c];
                stack.push(c);
            }
            nodes[v].children = std::mem::take(&mut b.children[v]);
        }

        let mut leaves = vec![ROOT; total + 1];
        for v in order.iter().rev().copied() {
            if nodes[v].children.is_empty() {
                let m = total - nodes[v].depth + 1;
                nodes[v].suffix = Some(m);
                nodes[v].min_suffix = m;
                leaves[m] = v;
            }
            if v != ROOT {
                let p = nodes[v].parent;
                nodes[p].min_suffix = nodes[p].min_suffix.min(nodes[v].min_suffix);
            }
        }
        // Re-anchor each edge inside the leftmost occurrence of its path label.
        for v in order.into_iter().skip(1) {
            let m = nodes[v].min_suffix;
            let pd = nodes[nodes[v].parent].depth;
            nodes[v].edge = (m + pd, m + nodes[v].depth - 1);
        }
        SuffixTree { nodes, leaves }
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    pub fn node(&self, v: NodeId) -> &StNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[StNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Leaf of the suffix starting at `pos` (1-based, up to `n + 1`).
    pub fn leaf(&self, pos: usize) -> NodeId {
        self.leaves[pos]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len() - 1
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_empty()
    }

    pub fn edge_len(&self, v: NodeId) -> usize {
        let (k, l) = self.nodes[v].edge;
        l + 1 - k
    }

    /// Suffix starts of all leaves below `v`.
    pub fn subtree_suffixes(&self, v: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let node = &self.nodes[u];
            if let Some(m) = node.suffix {
                out.push(m);
            }
            stack.extend(node.children.iter().map(|&(_, c)| c));
        }
        out.sort_unstable();
        out
    }

    /// Node whose path label starts with `pattern` and is shortest such,
    /// if `pattern` occurs.
    pub fn locate(&self, seq: &Sequence, pattern: &[Rank]) -> Option<NodeId> {
        let mut v = ROOT;
        let mut matched = 0;
        while matched < pattern.len() {
            let kids = &self.nodes[v].children;
            let i = kids
                .binary_search_by_key(&pattern[matched], |&(c, _)| c)
                .ok()?;
            let child = kids[i].1;
            let (k, l) = self.nodes[child].edge;
            for p in k..=l {
                if matched == pattern.len() {
                    break;
                }
                if seq.at(p) != pattern[matched] {
                    return None;
                }
                matched += 1;
            }
            v = child;
        }
        Some(v)
    }

    /// Graphviz rendering with node ids, edge intervals and spelled factors.
    pub fn to_dot(&self, seq: &Sequence, symbol: impl Fn(Rank) -> String) -> String {
        let mut out = String::from("digraph suffix_tree {\n  node [shape=circle];\n");
        for (v, node) in self.nodes.iter().enumerate() {
            match node.suffix {
                Some(m) => writeln!(out, "  n{v} [shape=box,label=\"{m}\"];").unwrap(),
                None => writeln!(out, "  n{v} [label=\"{v}\"];").unwrap(),
            }
            if v != ROOT {
                let (k, l) = node.edge;
                let factor: String = (k..=l).map(|p| symbol(seq.at(p))).collect();
                writeln!(
                    out,
                    "  n{} -> n{v} [label=\"[{k},{l}] {factor}\"];",
                    node.parent
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::normalize;

    fn spelled(tree: &SuffixTree, seq: &Sequence, leaf: NodeId) -> Vec<Rank> {
        let mut path = Vec::new();
        let mut v = leaf;
        while v != ROOT {
            path.push(v);
            v = tree.node(v).parent;
        }
        path.iter()
            .rev()
            .flat_map(|&v| {
                let (k, l) = tree.node(v).edge;
                (k..=l).map(|p| seq.at(p))
            })
            .collect()
    }

    fn check_tree(raw: &[u8]) {
        let (seq, _) = normalize(raw).unwrap();
        let tree = SuffixTree::build(&seq);
        let n = seq.len();
        let text = seq.ranks_with_sentinel();
        assert_eq!(tree.leaf_count(), n + 1);
        let mut depth_sum = 0;
        for i in 1..=n + 1 {
            let leaf = tree.leaf(i);
            assert_eq!(tree.node(leaf).suffix, Some(i));
            assert_eq!(spelled(&tree, &seq, leaf), &text[i - 1..]);
            depth_sum += tree.node(leaf).depth;
        }
        assert_eq!(depth_sum, (1..=n + 1).map(|i| n + 2 - i).sum::<usize>());
        for (v, node) in tree.nodes().iter().enumerate() {
            if v != ROOT && !node.children.is_empty() {
                assert!(node.children.len() >= 2);
            }
            assert!(node.children.windows(2).all(|w| w[0].0 < w[1].0));
            if v == ROOT {
                continue;
            }
            // the path label is anchored at its leftmost occurrence
            let label = spelled(&tree, &seq, v);
            let (k, l) = node.edge;
            let start = l + 1 - label.len();
            assert_eq!(k, start + tree.node(node.parent).depth);
            let first = (0..text.len())
                .find(|&s| text[s..].starts_with(&label))
                .unwrap()
                + 1;
            assert_eq!(first, start, "node {v}");
        }
    }

    #[test]
    fn golden_sequence() {
        let (seq, _) = normalize(b"abaceabacd").unwrap();
        let tree = SuffixTree::build(&seq);
        assert_eq!(tree.leaf_count(), 11);
        let a = tree
            .node(ROOT)
            .children
            .iter()
            .find(|&&(c, _)| c == 0)
            .unwrap()
            .1;
        assert_eq!(tree.node(a).edge, (1, 1));
        check_tree(b"abaceabacd");
    }

    #[test]
    fn tiny_tree() {
        let (seq, _) = normalize(b"ab").unwrap();
        let tree = SuffixTree::build(&seq);
        assert_eq!(tree.leaf_count(), 3);
        let keys: Vec<Rank> = tree.node(ROOT).children.iter().map(|&(c, _)| c).collect();
        assert_eq!(keys, vec![0, 1, 2]);
    }

    #[test]
    fn subtree_suffix_sets() {
        let (seq, _) = normalize(b"abaceabacd").unwrap();
        let tree = SuffixTree::build(&seq);
        assert_eq!(tree.subtree_suffixes(ROOT), (1..=11).collect::<Vec<_>>());
        assert_eq!(tree.subtree_suffixes(tree.leaf(4)), vec![4]);
        let v = tree.locate(&seq, &[0, 1, 0, 2]).unwrap();
        assert_eq!(tree.subtree_suffixes(v), vec![1, 6]);
        assert!(tree.locate(&seq, &[1, 4]).is_none());
    }

    #[test]
    fn assorted_texts() {
        for raw in [
            &b"a"[..],
            b"abababab",
            b"mississippi",
            b"abcabxabcd",
            b"cabcbabcd",
            b"xyzxyzyxzy",
        ] {
            check_tree(raw);
        }
    }

    #[test]
    fn dot_output_mentions_every_edge() {
        let (seq, alpha) = normalize(b"abab").unwrap();
        let tree = SuffixTree::build(&seq);
        let dot = tree.to_dot(&seq, |r| {
            alpha
                .unrank(r)
                .map_or("#".into(), |b| (b as char).to_string())
        });
        assert_eq!(dot.matches("->").count(), tree.node_count() - 1);
        assert!(dot.starts_with("digraph"));
    }
}
