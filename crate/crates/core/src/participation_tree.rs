//! Participation tree: the suffix tree reduced so that every root path
//! spells the O-label (a proper prefix of some `lfo`) of a group of maximal
//! locations.
//!
//! Construction walks each suffix bottom-up from its leaf, consuming the
//! right-to-left maintained first-occurrence list `efo(i)` to find which new
//! characters every edge contributes. Terminal characters are then dropped
//! and empty edges merged.

use std::fmt::Write as _;

use crate::seqcore::{Rank, Sequence};
use crate::suffix_tree::{SuffixTree, ROOT as ST_ROOT};

const NIL: u32 = u32::MAX;

/// `efo(i)`: the first occurrence of every character of `s_i .. s_{n+1}`,
/// as a doubly linked list ordered by position, plus the cursor `tp` on the
/// last cell positioned before the next occurrence of `s_i`.
///
/// Cells are indexed by rank, so the rank -> cell lookup is the identity.
#[derive(Clone, Debug)]
pub struct EfoList {
    prev: Vec<u32>,
    next: Vec<u32>,
    pos: Vec<usize>,
    present: Vec<bool>,
    head: u32,
    tail: u32,
    tp: u32,
    current: usize,
}

impl EfoList {
    /// `efo(n) = s_n #`, with `tp` on the sentinel cell.
    pub fn new(seq: &Sequence) -> Self {
        let width = seq.sigma() + 1;
        let n = seq.len();
        let (last, sentinel) = (seq.at(n), seq.sentinel());
        let mut efo = EfoList {
            prev: vec![NIL; width],
            next: vec![NIL; width],
            pos: vec![0; width],
            present: vec![false; width],
            head: last,
            tail: sentinel,
            tp: sentinel,
            current: n,
        };
        efo.next[last as usize] = sentinel;
        efo.prev[sentinel as usize] = last;
        efo.pos[last as usize] = n;
        efo.pos[sentinel as usize] = n + 1;
        efo.present[last as usize] = true;
        efo.present[sentinel as usize] = true;
        efo
    }

    /// The `i` this list currently represents.
    pub fn position(&self) -> usize {
        self.current
    }

    /// Move from `efo(i)` to `efo(i - 1)` in O(1). Returns `false` at `i = 1`.
    pub fn step(&mut self, seq: &Sequence) -> bool {
        if self.current <= 1 {
            return false;
        }
        let i = self.current - 1;
        let alpha = seq.at(i);
        let a = alpha as usize;
        if self.present[a] {
            // s is simple, so alpha is never the head here
            self.tp = self.prev[a];
            let (p, nx) = (self.prev[a], self.next[a]);
            self.next[p as usize] = nx;
            self.prev[nx as usize] = p;
        } else {
            self.tp = self.tail;
            self.present[a] = true;
        }
        self.prev[a] = NIL;
        self.next[a] = self.head;
        self.prev[self.head as usize] = alpha;
        self.head = alpha;
        self.pos[a] = i;
        self.current = i;
        true
    }

    /// `(rank, position)` cells front to back.
    pub fn cells(&self) -> impl Iterator<Item = (Rank, usize)> + '_ {
        let mut cell = self.head;
        std::iter::from_fn(move || {
            if cell == NIL {
                return None;
            }
            let out = (cell, self.pos[cell as usize]);
            cell = self.next[cell as usize];
            Some(out)
        })
    }

    /// The cell under `tp`.
    pub fn tp(&self) -> (Rank, usize) {
        (self.tp, self.pos[self.tp as usize])
    }

    /// Cells of `lfo(i)`: from the head through `tp`.
    pub fn lfo_cells(&self) -> impl Iterator<Item = (Rank, usize)> + '_ {
        let stop = self.pos[self.tp as usize];
        self.cells().take_while(move |&(_, p)| p <= stop)
    }

    pub fn contains(&self, r: Rank) -> bool {
        self.present.get(r as usize).copied().unwrap_or(false)
    }

    fn pos_of(&self, cell: u32) -> usize {
        self.pos[cell as usize]
    }

    fn prev_of(&self, cell: u32) -> u32 {
        self.prev[cell as usize]
    }
}

/// A suffix attached to a participation-tree node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attached {
    pub suffix: usize,
    /// Whether the node's own word is a proper prefix of `lfo(suffix)`, i.e.
    /// the suffix is the support of a maximal location labelled by that word.
    pub supports_here: bool,
}

#[derive(Clone, Debug)]
pub struct PtNode {
    pub parent: usize,
    /// Incoming character (the sentinel rank at the root).
    pub label: Rank,
    pub depth: usize,
    /// Children in construction order; labels may repeat.
    pub children: Vec<(Rank, usize)>,
    pub attached: Vec<Attached>,
}

#[derive(Clone, Debug)]
pub struct ParticipationTree {
    nodes: Vec<PtNode>,
    sigma: usize,
}

pub const ROOT: usize = 0;

/// Per-suffix-tree-edge participation strings, as produced by the bottom-up
/// walks (before terminal removal).
#[derive(Clone, Debug)]
pub struct Participation {
    spans: Vec<(u32, u32)>,
    pool: Vec<Rank>,
}

impl Participation {
    /// Characters the edge into suffix-tree node `v` contributes.
    pub fn of(&self, v: usize) -> &[Rank] {
        let (s, l) = self.spans[v];
        &self.pool[s as usize..(s + l) as usize]
    }
}

/// Bottom-up participation computation over all suffixes `n..1`.
pub fn compute_participation(tree: &SuffixTree, seq: &Sequence) -> Participation {
    let n = seq.len();
    let mut spans = vec![(0u32, 0u32); tree.node_count()];
    let mut pool: Vec<Rank> = Vec::new();
    let mut marked = vec![false; tree.node_count()];
    let mut efo = EfoList::new(seq);
    loop {
        let i = efo.position();
        let mut length = n + 1;
        let mut current = tree.leaf(i);
        let mut cursor = efo.tp;
        while !marked[current] && current != ST_ROOT {
            let deb = length + 1 - tree.edge_len(current);
            debug_assert!(cursor == NIL || efo.pos_of(cursor) <= length);
            let start = pool.len();
            while cursor != NIL && efo.pos_of(cursor) >= deb {
                pool.push(cursor);
                cursor = efo.prev_of(cursor);
            }
            pool[start..].reverse();
            spans[current] = (start as u32, (pool.len() - start) as u32);
            marked[current] = true;
            length = deb - 1;
            current = tree.node(current).parent;
        }
        if !efo.step(seq) {
            break;
        }
    }
    Participation { spans, pool }
}

impl ParticipationTree {
    pub fn build(tree: &SuffixTree, seq: &Sequence) -> Self {
        let part = compute_participation(tree, seq);
        Self::from_participation(tree, seq, &part)
    }

    /// Terminal removal, edge splitting and empty-edge merging.
    pub fn from_participation(tree: &SuffixTree, seq: &Sequence, part: &Participation) -> Self {
        let count = tree.node_count();
        let mut order = Vec::with_capacity(count);
        let mut stack = vec![ST_ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(tree.node(v).children.iter().rev().map(|&(_, c)| c));
        }

        // An edge loses its last character when no character lies below it.
        let mut char_below = vec![false; count];
        let mut trimmed = vec![false; count];
        for &v in order.iter().rev() {
            if v == ST_ROOT {
                continue;
            }
            let has_chars = !part.of(v).is_empty();
            trimmed[v] = has_chars && !char_below[v];
            let p = tree.node(v).parent;
            char_below[p] |= has_chars || char_below[v];
        }

        let mut nodes = vec![PtNode {
            parent: ROOT,
            label: seq.sentinel(),
            depth: 0,
            children: Vec::new(),
            attached: Vec::new(),
        }];
        let mut pt_of = vec![ROOT; count];
        // deepest edge on the root path with a non-empty participation
        let mut last_edge = vec![ST_ROOT; count];
        for &v in order.iter().skip(1) {
            let parent = tree.node(v).parent;
            let chars = part.of(v);
            let keep = if trimmed[v] {
                chars.len() - 1
            } else {
                chars.len()
            };
            let mut cur = pt_of[parent];
            for &c in &chars[..keep] {
                let id = nodes.len();
                nodes.push(PtNode {
                    parent: cur,
                    label: c,
                    depth: nodes[cur].depth + 1,
                    children: Vec::new(),
                    attached: Vec::new(),
                });
                nodes[cur].children.push((c, id));
                cur = id;
            }
            pt_of[v] = cur;
            last_edge[v] = if chars.is_empty() {
                last_edge[parent]
            } else {
                v
            };
            if let Some(m) = tree.node(v).suffix {
                let e = last_edge[v];
                let supports_here = m <= seq.len() && e != ST_ROOT && trimmed[e];
                nodes[cur].attached.push(Attached {
                    suffix: m,
                    supports_here,
                });
            }
        }
        ParticipationTree {
            nodes,
            sigma: seq.sigma(),
        }
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn node(&self, v: usize) -> &PtNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[PtNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Characters on the root path to `v`.
    pub fn word(&self, mut v: usize) -> Vec<Rank> {
        let mut out = Vec::with_capacity(self.nodes[v].depth);
        while v != ROOT {
            out.push(self.nodes[v].label);
            v = self.nodes[v].parent;
        }
        out.reverse();
        out
    }

    /// Suffixes attached anywhere in the subtree of `v`.
    pub fn subtree_suffixes(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.extend(self.nodes[u].attached.iter().map(|a| a.suffix));
            stack.extend(self.nodes[u].children.iter().map(|&(_, c)| c));
        }
        out.sort_unstable();
        out
    }

    /// Every non-empty root path with its word and the suffixes below it.
    pub fn root_paths(&self) -> impl Iterator<Item = (Vec<Rank>, Vec<usize>)> + '_ {
        (1..self.nodes.len()).map(|v| (self.word(v), self.subtree_suffixes(v)))
    }

    /// Nodes in depth-first preorder (parents before children).
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.nodes[v].children.iter().rev().map(|&(_, c)| c));
        }
        order
    }

    pub fn to_dot(&self, symbol: impl Fn(Rank) -> String) -> String {
        let mut out = String::from("digraph participation_tree {\n  node [shape=circle];\n");
        for (v, node) in self.nodes.iter().enumerate() {
            let boxes: Vec<String> = node
                .attached
                .iter()
                .map(|a| {
                    if a.supports_here {
                        format!("{}*", a.suffix)
                    } else {
                        a.suffix.to_string()
                    }
                })
                .collect();
            writeln!(out, "  n{v} [label=\"{v}\\n{}\"];", boxes.join(",")).unwrap();
            if v != ROOT {
                writeln!(
                    out,
                    "  n{} -> n{v} [label=\"{}\"];",
                    node.parent,
                    symbol(node.label)
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}
