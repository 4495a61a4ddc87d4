//! Walk orders: which basis state is reached from which, and in what order.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisState, QubitSet};
use crate::combinat::{
    dist, gray_code, hitting_set_masks, hypercube_mst, mst_prim, shp_heuristic, SpanningTree, WeightedBasisGraph,
};
use crate::decomp::su2_cx_cost;
use crate::error::{Error, Result};
use crate::state::SparseState;
use crate::walk::MergeStep;

/// A rooted tree over basis states, as forward steps: every step's `z1` has
/// already been reached and `z2` is reached by it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkOrder {
    root: BasisState,
    steps: Vec<MergeStep>,
}

impl WalkOrder {
    pub fn new(root: BasisState, steps: Vec<MergeStep>) -> Result<Self> {
        let mut seen = BTreeSet::from([root]);
        for (i, s) in steps.iter().enumerate() {
            if s.z1.n() != root.n() || s.z2.n() != root.n() {
                return Err(Error::Dimension(format!("step {i} has the wrong qubit count")));
            }
            if !seen.contains(&s.z1) {
                return Err(Error::Coverage(format!("step {i} starts from unreached {}", s.z1)));
            }
            if !seen.insert(s.z2) {
                return Err(Error::Coverage(format!("step {i} reaches {} twice", s.z2)));
            }
        }
        Ok(Self { root, steps })
    }

    /// The path `path[0] → path[1] → …` without preset targets.
    pub fn linear(path: &[BasisState]) -> Result<Self> {
        let root = *path.first().ok_or_else(|| Error::Coverage("empty path".into()))?;
        let steps = path
            .windows(2)
            .map(|w| MergeStep::new(w[0], w[1], None))
            .collect::<Result<Vec<_>>>()?;
        Self::new(root, steps)
    }

    pub fn root(&self) -> BasisState {
        self.root
    }

    pub fn steps(&self) -> &[MergeStep] {
        &self.steps
    }

    /// Root first, then each step's `z2`.
    pub fn states(&self) -> Vec<BasisState> {
        std::iter::once(self.root)
            .chain(self.steps.iter().map(|s| s.z2))
            .collect()
    }

    /// The visiting sequence when the order is a path from the root.
    pub fn path(&self) -> Option<Vec<BasisState>> {
        let mut last = self.root;
        for s in &self.steps {
            if s.z1 != last {
                return None;
            }
            last = s.z2;
        }
        Some(self.states())
    }

    /// Checks that the order covers exactly the support of `s`.
    pub fn validate(&self, s: &SparseState) -> Result<()> {
        if self.root.n() != s.n() {
            return Err(Error::Dimension(format!(
                "order on {} qubits, state on {}",
                self.root.n(),
                s.n()
            )));
        }
        let states = self.states();
        if states.len() != s.m() || !states.iter().all(|z| s.contains(z)) {
            return Err(Error::Coverage("walk order does not cover the state's support".into()));
        }
        Ok(())
    }

    /// Total Hamming length of all steps.
    pub fn hamming_length(&self) -> usize {
        self.steps.iter().map(|s| dist(&s.z1, &s.z2)).sum()
    }
}

/// Cost of synthesizing a state along an order, typically the CX count.
pub type CostFn<'a> = dyn Fn(&SparseState, &WalkOrder) -> Result<usize> + 'a;

pub fn order_sorted(s: &SparseState) -> WalkOrder {
    let path: Vec<BasisState> = s.support().collect();
    WalkOrder::linear(&path).expect("support is nonempty and distinct")
}

pub fn order_random(s: &SparseState, seed: u64) -> WalkOrder {
    let mut path: Vec<BasisState> = s.support().collect();
    path.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    WalkOrder::linear(&path).expect("support is nonempty and distinct")
}

fn preorder(tree: &SpanningTree) -> Result<WalkOrder> {
    let children = tree.children();
    let mut steps = Vec::with_capacity(tree.nodes.len().saturating_sub(1));
    let mut stack = vec![tree.root];
    while let Some(v) = stack.pop() {
        for &c in children[v].iter().rev() {
            stack.push(c);
        }
        if let Some(p) = tree.parent[v] {
            steps.push(MergeStep::new(tree.nodes[p], tree.nodes[v], None)?);
        }
    }
    WalkOrder::new(tree.nodes[tree.root], steps)
}

pub fn order_mst(s: &SparseState) -> WalkOrder {
    let tree = if s.is_dense() {
        hypercube_mst(s.n()).expect("valid qubit count")
    } else {
        mst_prim(&WeightedBasisGraph::new(s.support().collect()).expect("support is valid"))
    };
    preorder(&tree).expect("spanning tree yields a valid order")
}

pub fn order_shp(s: &SparseState) -> WalkOrder {
    let path = if s.is_dense() {
        gray_code(s.n()).expect("valid qubit count")
    } else {
        shp_heuristic(
            &WeightedBasisGraph::new(s.support().collect()).expect("support is valid"),
            None,
        )
        .expect("no start given")
    };
    WalkOrder::linear(&path).expect("Hamiltonian path yields a valid order")
}

/// Working set for the reverse-time orderings: each state in the original
/// basis next to its image under the CX gates applied so far, the latter as
/// a qubit mask (bit `q` is qubit `q`).
struct Mutable {
    orig: Vec<BasisState>,
    cur: Vec<u32>,
    scratch: Vec<u32>,
}

struct Profile {
    mhs: u32,
    diffs: Vec<u32>,
    total_diff: usize,
}

impl Mutable {
    fn new(s: &SparseState) -> Self {
        let orig: Vec<BasisState> = s.support().collect();
        let cur = orig.iter().map(|z| z.ones().mask()).collect();
        Self {
            orig,
            cur,
            scratch: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.cur.len()
    }

    /// Difference sets of `i` against every other live state and their
    /// hitting set.
    fn profile(&self, i: usize) -> Profile {
        let z = self.cur[i];
        let diffs: Vec<u32> = (0..self.len()).filter(|&j| j != i).map(|j| self.cur[j] ^ z).collect();
        Profile {
            mhs: hitting_set_masks(&diffs),
            total_diff: diffs.iter().map(|d| d.count_ones() as usize).sum(),
            diffs,
        }
    }

    /// Lowered CX cost of merging `i2` into `i1` on `target`: the
    /// conjugation plus the controlled gate with reduced controls.
    fn step_cost(&mut self, i1: usize, i2: usize, target: usize) -> usize {
        let d = self.cur[i1] ^ self.cur[i2];
        let t = d & !(1 << target);
        let mv = |x: u32| if x >> target & 1 == 1 { x ^ t } else { x };
        let z1 = mv(self.cur[i1]);
        let keep = !(1u32 << target);
        self.scratch.clear();
        for (k, &x) in self.cur.iter().enumerate() {
            if k != i1 && k != i2 {
                self.scratch.push((mv(x) ^ z1) & keep);
            }
        }
        let controls = hitting_set_masks(&self.scratch).count_ones() as usize;
        t.count_ones() as usize + su2_cx_cost(controls)
    }

    /// Records the merge of `i2` into `i1` on `target`, removes `i2` and
    /// moves every remaining state through the conjugating CX gates.
    fn merge(&mut self, i1: usize, i2: usize, target: usize) -> MergeStep {
        let t = (self.cur[i1] ^ self.cur[i2]) & !(1 << target);
        let step = MergeStep::new(self.orig[i1], self.orig[i2], Some(target)).expect("distinct");
        self.orig.remove(i2);
        self.cur.remove(i2);
        for x in &mut self.cur {
            if *x >> target & 1 == 1 {
                *x ^= t;
            }
        }
        step
    }

    fn value(&self, i: usize) -> u32 {
        self.orig[i].value()
    }
}

/// Member of `candidates` hit by the fewest of `diffs`; ties to lowest index.
fn least_frequent(candidates: u32, diffs: &[u32]) -> Option<usize> {
    QubitSet::from_mask(candidates)
        .iter()
        .map(|q| (diffs.iter().filter(|d| *d >> q & 1 == 1).count(), q))
        .min()
        .map(|(_, q)| q)
}

fn finish(steps_rev: Vec<MergeStep>, root: BasisState) -> WalkOrder {
    let steps: Vec<MergeStep> = steps_rev.into_iter().rev().collect();
    WalkOrder::new(root, steps).expect("reverse construction yields a valid order")
}

/// Reverse-time construction. Each round, every live state `z1` proposes
/// the least frequent bit of its minimum hitting set as target and every
/// state it separates through that bit as `z2`; the proposal with the
/// cheapest merge wins, then the `z1` with the most differing bits, then
/// the closest `z2`, then the lowest values. `z2` leaves and the remaining
/// states are relabeled through the conjugation.
pub fn order_mhs_nonlinear(s: &SparseState) -> WalkOrder {
    let mut w = Mutable::new(s);
    let mut steps_rev = Vec::new();
    while w.len() > 1 {
        let (i1, i2, target) = best_pair(&mut w);
        steps_rev.push(w.merge(i1, i2, target));
    }
    finish(steps_rev, w.orig[0])
}

type PairKey = (usize, std::cmp::Reverse<usize>, u32, u32, u32);
type LinearKey = (usize, std::cmp::Reverse<usize>, u32, u32);

fn best_pair(w: &mut Mutable) -> (usize, usize, usize) {
    let profiles: Vec<Profile> = (0..w.len()).map(|i| w.profile(i)).collect();
    let mut best: Option<(PairKey, (usize, usize, usize))> = None;
    for (i, p) in profiles.iter().enumerate() {
        let target = least_frequent(p.mhs, &p.diffs).expect("more than one live state");
        for j in 0..w.len() {
            let d = w.cur[i] ^ w.cur[j];
            if j == i || d >> target & 1 == 0 {
                continue;
            }
            let key = (
                w.step_cost(i, j, target),
                std::cmp::Reverse(p.total_diff),
                d.count_ones(),
                w.value(i),
                w.value(j),
            );
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, (i, j, target)));
            }
        }
    }
    best.expect("every hitting-set bit separates some state").1
}

/// As `order_mhs_nonlinear` for the first round; afterwards `z2` is always
/// the previous round's `z1`, so the result is a path. The new `z1` is the
/// state with the cheapest merge into `z2`, its target the least frequent
/// bit of its hitting set that separates it from `z2`.
pub fn order_mhs_linear(s: &SparseState) -> WalkOrder {
    let mut w = Mutable::new(s);
    let mut steps_rev = Vec::new();
    if w.len() == 1 {
        return finish(steps_rev, w.orig[0]);
    }
    let (i1, i2, target) = best_pair(&mut w);
    let mut prev = w.orig[i1];
    steps_rev.push(w.merge(i1, i2, target));
    while w.len() > 1 {
        let i2 = w.orig.iter().position(|z| *z == prev).expect("previous z1 is live");
        let mut best: Option<(LinearKey, (usize, usize))> = None;
        for i in 0..w.len() {
            if i == i2 {
                continue;
            }
            let p = w.profile(i);
            let d = w.cur[i] ^ w.cur[i2];
            let pool = if p.mhs & d != 0 { p.mhs & d } else { d };
            let target = least_frequent(pool, &p.diffs).expect("distinct states differ");
            let key = (
                w.step_cost(i, i2, target),
                std::cmp::Reverse(p.total_diff),
                d.count_ones(),
                w.value(i),
            );
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, (i, target)));
            }
        }
        let (_, (i1, target)) = best.expect("at least two live states");
        prev = w.orig[i1];
        steps_rev.push(w.merge(i1, i2, target));
    }
    finish(steps_rev, w.orig[0])
}

/// Builds a path by inserting the states of `initial`, in its order, at the
/// position that minimizes `cost` on the states inserted so far (amplitudes
/// restricted and renormalized). Strict improvement is required to move off
/// an earlier position.
pub fn order_greedy_insertion(s: &SparseState, initial: &WalkOrder, cost: &CostFn) -> Result<WalkOrder> {
    initial.validate(s)?;
    let states = initial
        .path()
        .ok_or_else(|| Error::InvalidWalk("greedy insertion needs a linear initial order".into()))?;
    let mut path: Vec<BasisState> = Vec::with_capacity(states.len());
    for z in states {
        let mut best: Option<(usize, Vec<BasisState>)> = None;
        for idx in 0..=path.len() {
            let mut cand = path.clone();
            cand.insert(idx, z);
            let sub = s.restrict(&cand)?;
            let c = cost(&sub, &WalkOrder::linear(&cand)?)?;
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, cand));
            }
        }
        path = best.expect("at least one position").1;
    }
    WalkOrder::linear(&path)
}

/// Whichever of `a`, `b` costs less; ties to `a`.
pub fn order_combined(s: &SparseState, a: WalkOrder, b: WalkOrder, cost: &CostFn) -> Result<WalkOrder> {
    let ca = cost(s, &a)?;
    let cb = cost(s, &b)?;
    Ok(if cb < ca { b } else { a })
}
