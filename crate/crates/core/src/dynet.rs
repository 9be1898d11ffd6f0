//! Dynamic networks: round graphs, temporal reachability, information-flow
//! graphs and domination.
//!
//! Nodes are `0..n` internally. Every textual format (instance files, DOT,
//! CLI output) uses the 1-based names `1..=n`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported node count; arc rows are single `u64` words.
pub const MAX_NODES: usize = 64;

/// Irreflexive digraph on `0..n`, stored as one out-neighbour bit row per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::ProcessCount { n, max: MAX_NODES });
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, out: vec![0; n] })
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (p, q) in arcs {
            g.add_arc(p, q)?;
        }
        Ok(g)
    }

    /// Symmetric digraph: each undirected edge becomes two opposite arcs.
    pub fn from_undirected_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (p, q) in edges {
            g.add_arc(p, q)?;
            g.add_arc(q, p)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        check_n(n)?;
        let full = full_mask(n);
        let out = (0..n).map(|p| full & !(1u64 << p)).collect();
        Ok(Self { n, out })
    }

    /// Consistently directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn directed_cycle(n: usize) -> Result<Self> {
        Self::from_arcs(n, (0..n).filter(|_| n > 1).map(|p| (p, (p + 1) % n)))
    }

    /// Number of possible arcs, `n(n-1)`.
    pub fn arc_slots(n: usize) -> usize {
        n * n.saturating_sub(1)
    }

    /// Digraph whose arcs are the set bits of `mask`, with arc slots numbered
    /// source-major, target-minor (skipping the diagonal).
    pub fn from_bitmask(n: usize, mask: u64) -> Result<Self> {
        check_n(n)?;
        let slots = Self::arc_slots(n);
        if slots > 64 || (slots < 64 && mask >> slots != 0) {
            return Err(Error::InvalidParameter(format!(
                "bitmask {mask:#x} does not fit the {slots} arc slots of n = {n}"
            )));
        }
        let mut g = Self::empty(n)?;
        for (bit, (p, q)) in arc_slot_pairs(n).enumerate() {
            if mask >> bit & 1 == 1 {
                g.out[p] |= 1 << q;
            }
        }
        Ok(g)
    }

    /// Inverse of [`Digraph::from_bitmask`]; `None` when `n(n-1) > 64`.
    pub fn bitmask(&self) -> Option<u64> {
        if Self::arc_slots(self.n) > 64 {
            return None;
        }
        let mut mask = 0u64;
        for (bit, (p, q)) in arc_slot_pairs(self.n).enumerate() {
            if self.has_arc(p, q) {
                mask |= 1 << bit;
            }
        }
        Some(mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_arc(&mut self, p: usize, q: usize) -> Result<()> {
        self.check_node(p)?;
        self.check_node(q)?;
        if p == q {
            return Err(Error::ReflexiveArc(p + 1));
        }
        self.out[p] |= 1 << q;
        Ok(())
    }

    pub fn check_node(&self, p: usize) -> Result<()> {
        if p >= self.n {
            return Err(Error::NodeOutOfRange { node: p + 1, n: self.n });
        }
        Ok(())
    }

    pub fn has_arc(&self, p: usize, q: usize) -> bool {
        p < self.n && q < self.n && self.out[p] >> q & 1 == 1
    }

    /// Out-neighbours of `p` as a bit set.
    pub fn out_mask(&self, p: usize) -> u64 {
        self.out[p]
    }

    /// In-neighbours of `q` as a bit set.
    pub fn in_mask(&self, q: usize) -> u64 {
        (0..self.n)
            .filter(|&p| self.out[p] >> q & 1 == 1)
            .fold(0, |m, p| m | 1 << p)
    }

    pub fn out_degree(&self, p: usize) -> usize {
        self.out[p].count_ones() as usize
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Arcs in source-major, target-minor order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |p| bits(self.out[p]).map(move |q| (p, q)))
    }

    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && self.out.iter().zip(&other.out).all(|(a, b)| a & !b == 0)
    }

    /// Image of the digraph under the node permutation `perm` (arc `(p,q)`
    /// becomes `(perm[p], perm[q])`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph> {
        if perm.len() != self.n {
            return Err(Error::ProcessCountMismatch { expected: self.n, found: perm.len() });
        }
        Digraph::from_arcs(self.n, self.arcs().map(|(p, q)| (perm[p], perm[q])))
    }

    /// Graphviz rendering with nodes named `p1..pn`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for p in 0..self.n {
            let _ = writeln!(s, "  p{};", p + 1);
        }
        for (p, q) in self.arcs() {
            let _ = writeln!(s, "  p{} -> p{};", p + 1, q + 1);
        }
        s.push_str("}\n");
        s
    }
}

fn arc_slot_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
}

/// Indices of the set bits of `mask`, ascending.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A finite prefix `G_1, ..., G_r` of a dynamic network on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicGraph {
    n: usize,
    rounds: Vec<Digraph>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    rounds: Vec<Vec<[usize; 2]>>,
}

impl DynamicGraph {
    pub fn new(n: usize, rounds: Vec<Digraph>) -> Result<Self> {
        check_n(n)?;
        if let Some(g) = rounds.iter().find(|g| g.n != n) {
            return Err(Error::ProcessCountMismatch { expected: n, found: g.n });
        }
        Ok(Self { n, rounds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rounds `r`.
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[Digraph] {
        &self.rounds
    }

    /// The first `r` rounds (all of them if `r` exceeds the length).
    pub fn truncated(&self, r: usize) -> DynamicGraph {
        DynamicGraph { n: self.n, rounds: self.rounds[..r.min(self.rounds.len())].to_vec() }
    }

    /// Parses an instance document `{"n": .., "rounds": [[[from,to],..],..]}`
    /// with 1-based node names.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        check_n(file.n)?;
        let rounds = file
            .rounds
            .iter()
            .map(|arcs| {
                let mut g = Digraph::empty(file.n)?;
                for &[p, q] in arcs {
                    if p == 0 || p > file.n {
                        return Err(Error::NodeOutOfRange { node: p, n: file.n });
                    }
                    if q == 0 || q > file.n {
                        return Err(Error::NodeOutOfRange { node: q, n: file.n });
                    }
                    g.add_arc(p - 1, q - 1)?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.n, rounds)
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            n: self.n,
            rounds: self
                .rounds
                .iter()
                .map(|g| g.arcs().map(|(p, q)| [p + 1, q + 1]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("instance serializes")
    }
}

/// Whether there is a temporal path from `p` to `q` (strictly increasing
/// rounds). Forward propagation of the reachable set, one round at a time.
pub fn temporal_reachable(g: &DynamicGraph, p: usize, q: usize) -> Result<bool> {
    for node in [p, q] {
        if node >= g.n {
            return Err(Error::NodeOutOfRange { node: node + 1, n: g.n });
        }
    }
    Ok(reach_set(g.rounds.iter(), p) >> q & 1 == 1)
}

fn reach_set<'a>(rounds: impl Iterator<Item = &'a Digraph>, p: usize) -> u64 {
    let mut reach = 1u64 << p;
    for round in rounds {
        reach = step(round, reach);
    }
    reach
}

/// One synchronous round: every informed node informs its out-neighbours.
fn step(round: &Digraph, informed: u64) -> u64 {
    bits(informed).fold(informed, |acc, u| acc | round.out[u])
}

/// `G≤r`: arc `(p,q)` iff `p != q` and `q` hears from `p` within the rounds of `g`.
pub fn information_flow_graph(g: &DynamicGraph) -> Digraph {
    let out = (0..g.n)
        .map(|p| reach_set(g.rounds.iter(), p) & !(1u64 << p))
        .collect();
    Digraph { n: g.n, out }
}

/// Minimum dominating set of a digraph together with its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationReport {
    pub gamma: usize,
    /// Sorted node set; the first set of size `gamma` in lexicographic order.
    pub witness: Vec<usize>,
}

impl DominationReport {
    pub fn witness_mask(&self) -> u64 {
        self.witness.iter().fold(0, |m, &p| m | 1 << p)
    }
}

/// Whether every node outside `set` has an in-arc from some member of `set`.
pub fn dominates(h: &Digraph, set: u64) -> bool {
    let covered = bits(set).fold(set, |acc, u| acc | h.out[u]);
    covered == full_mask(h.n)
}

/// Exact domination number by enumerating subsets in increasing size,
/// lexicographically within each size.
pub fn domination(h: &Digraph) -> DominationReport {
    let n = h.n;
    for size in 1..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let set = combo.iter().fold(0u64, |m, &p| m | 1 << p);
            if dominates(h, set) {
                return DominationReport { gamma: size, witness: combo };
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("the full node set always dominates")
}

/// Advances `combo` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The dynamic network repeating `h` for `r` rounds.
pub fn constant_instance(h: &Digraph, r: usize) -> DynamicGraph {
    DynamicGraph { n: h.n, rounds: vec![h.clone(); r] }
}

/// `h^r`: arc `(p,q)` iff a directed path of length at most `r` leads from
/// `p` to `q != p`. Computed by breadth-first search over `h`.
pub fn power_graph(h: &Digraph, r: usize) -> Digraph {
    let out = (0..h.n)
        .map(|p| {
            let mut seen = 1u64 << p;
            let mut frontier = seen;
            for _ in 0..r {
                let next = bits(frontier).fold(0, |acc, u| acc | h.out[u]) & !seen;
                if next == 0 {
                    break;
                }
                seen |= next;
                frontier = next;
            }
            seen & !(1u64 << p)
        })
        .collect();
    Digraph { n: h.n, out }
}

/// Smallest `r <= r_max` with `γ(G≤r) <= k`, where round `t` (1-based) of the
/// network is produced by `round_at(t)`.
pub fn min_rounds_for_gamma<F>(n: usize, mut round_at: F, k: usize, r_max: usize) -> Option<usize>
where
    F: FnMut(usize) -> Digraph,
{
    let mut reach: Vec<u64> = (0..n).map(|p| 1u64 << p).collect();
    for r in 0..=r_max {
        if r > 0 {
            let round = round_at(r);
            for set in reach.iter_mut() {
                *set = step(&round, *set);
            }
        }
        let ifg = Digraph {
            n,
            out: reach.iter().enumerate().map(|(p, s)| s & !(1u64 << p)).collect(),
        };
        if domination(&ifg).gamma <= k {
            return Some(r);
        }
    }
    None
}
