//! Combinatorial solvers used by the synthesis pipeline: hitting sets over
//! qubit-difference families, Hamming-weighted spanning trees and paths, and
//! the dense-case shortcuts (Gray code, hypercube tree).
//!
//! All tie-breaks resolve toward the lowest qubit index or the lowest basis
//! value, so results are reproducible.

use crate::basis::{hamming_distance, BasisState, QubitSet, MAX_QUBITS};
use crate::error::{Error, Result};

/// Largest universe the exact hitting-set solver accepts.
pub const EXACT_UNIVERSE_LIMIT: usize = 20;
/// `hitting_set` uses the exact solver up to this many sets...
pub const AUTO_EXACT_MAX_SETS: usize = 8;
/// ...whose union has at most this many elements.
pub const AUTO_EXACT_MAX_UNIVERSE: usize = 12;

/// A family of nonempty qubit sets over a universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffFamily {
    universe: QubitSet,
    sets: Vec<QubitSet>,
}

impl DiffFamily {
    pub fn new(universe: QubitSet, sets: Vec<QubitSet>) -> Result<Self> {
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Infeasible(format!("member {i} is empty")));
            }
            if !s.is_subset(&universe) {
                return Err(Error::Dimension(format!(
                    "member {i} {s:?} is not inside the universe {universe:?}"
                )));
            }
        }
        Ok(Self { universe, sets })
    }

    pub fn universe(&self) -> QubitSet {
        self.universe
    }

    pub fn sets(&self) -> &[QubitSet] {
        &self.sets
    }

    /// Union of all members.
    pub fn support(&self) -> QubitSet {
        self.sets.iter().fold(QubitSet::EMPTY, |acc, s| acc.union(s))
    }

    pub fn is_hit_by(&self, h: &QubitSet) -> bool {
        self.sets.iter().all(|s| s.intersects(h))
    }
}

/// Repeatedly takes the element hitting the most not-yet-hit members.
pub fn greedy_hitting_set(d: &DiffFamily) -> QubitSet {
    QubitSet::from_mask(greedy_masks(&masks(d)))
}

/// A minimum-cardinality hitting set by branch and bound.
pub fn exact_hitting_set(d: &DiffFamily) -> Result<QubitSet> {
    if d.universe.len() > EXACT_UNIVERSE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exact hitting set over {} elements (limit {EXACT_UNIVERSE_LIMIT})",
            d.universe.len()
        )));
    }
    Ok(QubitSet::from_mask(exact_masks(&masks(d))))
}

/// Exact for small families, greedy otherwise.
pub fn hitting_set(d: &DiffFamily) -> QubitSet {
    QubitSet::from_mask(hitting_set_masks(&masks(d)))
}

fn masks(d: &DiffFamily) -> Vec<u32> {
    d.sets.iter().map(QubitSet::mask).collect()
}

/// `hitting_set` on raw masks (bit `q` is qubit `q`, members nonempty).
pub(crate) fn hitting_set_masks(sets: &[u32]) -> u32 {
    let support = sets.iter().fold(0, |a, s| a | s);
    if sets.len() <= AUTO_EXACT_MAX_SETS && support.count_ones() as usize <= AUTO_EXACT_MAX_UNIVERSE {
        exact_masks(sets)
    } else {
        greedy_masks(sets)
    }
}

fn greedy_masks(sets: &[u32]) -> u32 {
    let mut unhit: Vec<u32> = sets.to_vec();
    let mut chosen = 0u32;
    while !unhit.is_empty() {
        let mut counts = [0u32; 32];
        for &s in &unhit {
            let mut m = s;
            while m != 0 {
                counts[m.trailing_zeros() as usize] += 1;
                m &= m - 1;
            }
        }
        let mut best = 0;
        for q in 1..32 {
            if counts[q] > counts[best] {
                best = q;
            }
        }
        chosen |= 1 << best;
        unhit.retain(|s| s & (1 << best) == 0);
    }
    chosen
}

fn exact_masks(sets: &[u32]) -> u32 {
    let mut sorted = sets.to_vec();
    sorted.sort_by_key(|s| (s.count_ones(), *s));
    sorted.dedup();
    // A member containing another member is hit whenever the smaller one is.
    let reduced: Vec<u32> = sorted
        .iter()
        .enumerate()
        .filter(|(i, s)| !sorted[..*i].iter().any(|t| *t & !**s == 0))
        .map(|(_, s)| *s)
        .collect();
    let mut best = greedy_masks(sets);
    branch(&reduced, 0, &mut best);
    best
}

fn branch(unhit: &[u32], chosen: u32, best: &mut u32) {
    if unhit.is_empty() {
        if chosen.count_ones() < best.count_ones() {
            *best = chosen;
        }
        return;
    }
    // Pairwise-disjoint members each need their own element.
    let mut covered = 0u32;
    let mut lower = 0;
    for &s in unhit {
        if s & covered == 0 {
            covered |= s;
            lower += 1;
        }
    }
    if chosen.count_ones() + lower >= best.count_ones() {
        return;
    }
    let pivot = *unhit.iter().min_by_key(|s| s.count_ones()).expect("nonempty");
    let mut m = pivot;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        m &= m - 1;
        let rest: Vec<u32> = unhit.iter().filter(|s| **s & bit == 0).copied().collect();
        branch(&rest, chosen | bit, best);
    }
}

/// Complete graph on distinct basis states weighted by Hamming distance.
#[derive(Clone, Debug)]
pub struct WeightedBasisGraph {
    nodes: Vec<BasisState>,
}

impl WeightedBasisGraph {
    pub fn new(nodes: Vec<BasisState>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidState("graph without nodes".into()));
        }
        let n = nodes[0].n();
        let mut seen = std::collections::HashSet::with_capacity(nodes.len());
        for z in &nodes {
            if z.n() != n {
                return Err(Error::Dimension(format!("{z} in a {n}-qubit graph")));
            }
            if !seen.insert(*z) {
                return Err(Error::InvalidState(format!("duplicate node {z}")));
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[BasisState] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        (self.nodes[a].value() ^ self.nodes[b].value()).count_ones() as usize
    }

    /// Node indices sorted by basis value.
    fn by_value(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by_key(|&i| self.nodes[i]);
        idx
    }
}

/// A rooted spanning tree as a parent map over `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub nodes: Vec<BasisState>,
    /// `parent[i]` is the index of node `i`'s parent; `None` only at the root.
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

impl SpanningTree {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (p, child)))
    }

    pub fn total_weight(&self) -> usize {
        self.edges()
            .map(|(a, b)| (self.nodes[a].value() ^ self.nodes[b].value()).count_ones() as usize)
            .sum()
    }

    /// Children of every node, sorted by basis value.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut kids = vec![Vec::new(); self.nodes.len()];
        for (p, c) in self.edges() {
            kids[p].push(c);
        }
        for k in &mut kids {
            k.sort_by_key(|&i| self.nodes[i]);
        }
        kids
    }
}

/// Prim's algorithm on the complete Hamming graph, rooted at the lowest
/// basis value. O(m²) after the O(nm²) implicit distance evaluations.
pub fn mst_prim(g: &WeightedBasisGraph) -> SpanningTree {
    let order = g.by_value();
    let m = g.len();
    let mut in_tree = vec![false; m];
    let mut key = vec![usize::MAX; m];
    let mut parent = vec![None; m];
    let root = order[0];
    key[root] = 0;
    for _ in 0..m {
        let mut next = None;
        for &i in &order {
            if !in_tree[i] && next.is_none_or(|j: usize| key[i] < key[j]) {
                next = Some(i);
            }
        }
        let u = next.expect("a node remains");
        in_tree[u] = true;
        for &v in &order {
            if !in_tree[v] {
                let w = g.weight(u, v);
                if w < key[v] {
                    key[v] = w;
                    parent[v] = Some(u);
                }
            }
        }
    }
    SpanningTree {
        nodes: g.nodes.clone(),
        parent,
        root,
    }
}

/// Sum of consecutive Hamming distances along `path`.
pub fn path_cost(path: &[BasisState]) -> usize {
    path.windows(2)
        .map(|w| (w[0].value() ^ w[1].value()).count_ones() as usize)
        .sum()
}

/// Nearest-neighbor Hamiltonian path, tried from `start` or from every node,
/// keeping the cheapest.
pub fn shp_heuristic(g: &WeightedBasisGraph, start: Option<&BasisState>) -> Result<Vec<BasisState>> {
    let order = g.by_value();
    let starts: Vec<usize> = match start {
        Some(s) => vec![g
            .nodes
            .iter()
            .position(|z| z == s)
            .ok_or_else(|| Error::InvalidState(format!("start {s} is not a node")))?],
        None => order.clone(),
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for s in starts {
        let (cost, path) = nearest_neighbor_path(g, &order, s);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, path));
        }
    }
    let (_, path) = best.expect("at least one start");
    Ok(path.into_iter().map(|i| g.nodes[i]).collect())
}

fn nearest_neighbor_path(g: &WeightedBasisGraph, order: &[usize], start: usize) -> (usize, Vec<usize>) {
    let m = g.len();
    let mut visited = vec![false; m];
    let mut path = Vec::with_capacity(m);
    let mut cost = 0;
    let mut cur = start;
    visited[cur] = true;
    path.push(cur);
    for _ in 1..m {
        let mut next: Option<(usize, usize)> = None;
        for &v in order {
            if !visited[v] {
                let w = g.weight(cur, v);
                if next.is_none_or(|(bw, _)| w < bw) {
                    next = Some((w, v));
                }
            }
        }
        let (w, v) = next.expect("an unvisited node remains");
        visited[v] = true;
        path.push(v);
        cost += w;
        cur = v;
    }
    (cost, path)
}

/// Reflected binary Gray code over all `2^n` basis states, starting at `0…0`.
pub fn gray_code(n: usize) -> Result<Vec<BasisState>> {
    check_dense_width(n)?;
    (0..1u32 << n).map(|i| BasisState::new(n, i ^ (i >> 1))).collect()
}

/// Spanning tree of the full hypercube using only unit-weight edges: every
/// vertex hangs off the vertex with its lowest set bit cleared.
pub fn hypercube_mst(n: usize) -> Result<SpanningTree> {
    check_dense_width(n)?;
    let nodes = (0..1u32 << n)
        .map(|v| BasisState::new(n, v))
        .collect::<Result<Vec<_>>>()?;
    let parent = (0..1usize << n).map(|v| (v != 0).then(|| v & (v - 1))).collect();
    Ok(SpanningTree { nodes, parent, root: 0 })
}

fn check_dense_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

/// Hamming distance between two nodes that are known to share a width.
pub(crate) fn dist(a: &BasisState, b: &BasisState) -> usize {
    hamming_distance(a, b).expect("same width")
}
