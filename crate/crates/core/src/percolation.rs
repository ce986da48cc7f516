//! The irreversible k-threshold process: a white vertex turns black for good
//! once at least `k` of its neighbors are black.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PercolationError {
    #[error("the seed converts the whole graph; there is no stuck set to certify")]
    Percolates,
}

/// Round-by-round record of a run. `rounds[t]` holds the vertices that turned
/// black in round `t + 1`; empty rounds are never recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PercolationTrace {
    pub k: usize,
    pub seed: VertexSet,
    pub rounds: Vec<Vec<usize>>,
    pub final_black: VertexSet,
    pub converted_all: bool,
    /// True when the run stopped at the round cap before reaching a fixpoint.
    pub capped: bool,
}

impl PercolationTrace {
    /// Round in which `v` turned black (0 for seed vertices).
    pub fn conversion_round(&self, v: usize) -> Option<usize> {
        if self.seed.contains(v) {
            return Some(0);
        }
        self.rounds.iter().position(|r| r.contains(&v)).map(|t| t + 1)
    }
}

/// One synchronous round: the white vertices with at least `k` black neighbors.
pub fn step(g: &Graph, black: &VertexSet, k: usize) -> VertexSet {
    let mut fresh = VertexSet::new(g.n());
    for v in g.vertices() {
        if !black.contains(v) && black_neighbors(g, black, v) >= k {
            fresh.insert(v);
        }
    }
    fresh
}

fn black_neighbors(g: &Graph, black: &VertexSet, v: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| black.contains(w)).count()
}

/// Runs synchronous rounds until nothing changes. The process always settles
/// within `n` rounds, which is the cap used here.
pub fn run(g: &Graph, seed: &VertexSet, k: usize) -> PercolationTrace {
    run_capped(g, seed, k, g.n())
}

pub fn run_capped(g: &Graph, seed: &VertexSet, k: usize, max_rounds: usize) -> PercolationTrace {
    let mut black = seed.clone();
    let mut rounds = Vec::new();
    let mut capped = false;
    loop {
        let fresh = step(g, &black, k);
        if fresh.is_empty() {
            break;
        }
        if rounds.len() == max_rounds {
            capped = true;
            break;
        }
        black.union_with(&fresh);
        rounds.push(fresh.to_vec());
    }
    PercolationTrace {
        k,
        seed: seed.clone(),
        converted_all: black.is_full(),
        rounds,
        final_black: black,
        capped,
    }
}

pub fn is_conversion_set(g: &Graph, seed: &VertexSet, k: usize) -> bool {
    Spreader::new(g, k).percolates(seed.iter())
}

/// The set of vertices still white at the fixpoint. Every returned vertex
/// `w` has at least `deg(w) - k + 1` neighbors inside the set.
pub fn stuck_certificate(g: &Graph, seed: &VertexSet, k: usize) -> Result<VertexSet, PercolationError> {
    let mut spreader = Spreader::new(g, k);
    spreader.spread(seed.iter());
    let white = VertexSet::from_members(g.n(), g.vertices().filter(|&v| !spreader.is_black(v)))
        .expect("ids in range");
    if white.is_empty() {
        Err(PercolationError::Percolates)
    } else {
        Ok(white)
    }
}

/// Checks the stuck-set condition: `white` avoids the seed and each member
/// keeps fewer than `k` neighbors outside `white`.
pub fn certifies_stuck(g: &Graph, seed: &VertexSet, k: usize, white: &VertexSet) -> bool {
    !white.is_empty()
        && white.iter().all(|w| {
            let inside = g.neighbors(w).iter().filter(|&&u| white.contains(u)).count();
            !seed.contains(w) && inside + k > g.degree(w)
        })
}

/// Unseeded vertices of degree below `k`; they can never turn black.
pub fn permanently_white(g: &Graph, seed: &VertexSet, k: usize) -> Vec<usize> {
    g.vertices().filter(|&v| g.degree(v) < k && !seed.contains(v)).collect()
}

/// Reusable worklist evaluator for the fixpoint of the process. The final
/// black set does not depend on the update order, so this gives the same
/// answer as the synchronous rounds of [`run`] at a fraction of the cost.
pub struct Spreader<'g> {
    g: &'g Graph,
    k: usize,
    count: Vec<u32>,
    black: Vec<bool>,
    queue: Vec<usize>,
    black_total: usize,
}

impl<'g> Spreader<'g> {
    pub fn new(g: &'g Graph, k: usize) -> Self {
        Spreader {
            g,
            k,
            count: vec![0; g.n()],
            black: vec![false; g.n()],
            queue: Vec::with_capacity(g.n()),
            black_total: 0,
        }
    }

    /// Resets and spreads from `seed`; returns the number of black vertices.
    pub fn spread<I: IntoIterator<Item = usize>>(&mut self, seed: I) -> usize {
        self.count.iter_mut().for_each(|c| *c = 0);
        self.black.iter_mut().for_each(|b| *b = false);
        self.queue.clear();
        self.black_total = 0;
        for v in seed {
            if !self.black[v] {
                self.black[v] = true;
                self.queue.push(v);
            }
        }
        if self.k == 0 {
            for v in 0..self.black.len() {
                if !self.black[v] {
                    self.black[v] = true;
                    self.queue.push(v);
                }
            }
        }
        let k = self.k as u32;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &w in self.g.neighbors(u) {
                if !self.black[w] {
                    self.count[w] += 1;
                    if self.count[w] >= k {
                        self.black[w] = true;
                        self.queue.push(w);
                    }
                }
            }
        }
        self.black_total = self.queue.len();
        self.black_total
    }

    pub fn percolates<I: IntoIterator<Item = usize>>(&mut self, seed: I) -> bool {
        self.spread(seed) == self.g.n()
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.black[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, h5, path, star};

    fn set(n: usize, m: &[usize]) -> VertexSet {
        VertexSet::from_members(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(&path(3), &set(3, &[0, 2]), 2).to_vec(), vec![1]);
        assert!(step(&cycle(3), &set(3, &[0]), 2).is_empty());
        // H5 ids: v1..v5 -> 0..4; seed {v3, v4}
        assert_eq!(step(&h5(), &set(5, &[2, 3]), 2).to_vec(), vec![1, 4]);
    }

    #[test]
    fn run_examples() {
        let t = run(&h5(), &set(5, &[2, 3]), 2);
        assert!(t.converted_all);
        assert_eq!(t.rounds, vec![vec![1, 4], vec![0]]);

        let t = run(&cycle(4), &set(4, &[0, 1]), 2);
        assert!(!t.converted_all);
        assert!(t.rounds.is_empty());

        let g = h5();
        for k in 1..5 {
            let t = run(&g, &VertexSet::full(5), k);
            assert!(t.converted_all && t.rounds.is_empty());
        }
    }

    #[test]
    fn alternating_cycle_seeds() {
        for l in 3..=10 {
            let seed = set(l, &(0..l).step_by(2).collect::<Vec<_>>());
            assert_eq!(seed.len(), l.div_ceil(2));
            assert!(is_conversion_set(&cycle(l), &seed, 2));
        }
    }

    #[test]
    fn cycle_seeds_one_short_all_fail() {
        for l in 3..=8 {
            let g = cycle(l);
            let need = l.div_ceil(2) - 1;
            for mask in 0u32..(1 << l) {
                if mask.count_ones() as usize == need {
                    let s = set(l, &(0..l).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
                    assert!(!is_conversion_set(&g, &s, 2), "C{l} {s:?}");
                }
            }
        }
    }

    #[test]
    fn unseeded_leaf_blocks() {
        let g = star(3);
        let s = set(4, &[0, 1, 2]);
        assert!(!is_conversion_set(&g, &s, 2));
        assert_eq!(permanently_white(&g, &s, 2), vec![3]);
    }

    #[test]
    fn stuck_certificate_examples() {
        let g = cycle(4);
        let seed = set(4, &[0, 1]);
        let w = stuck_certificate(&g, &seed, 2).unwrap();
        assert_eq!(w.to_vec(), vec![2, 3]);
        assert!(certifies_stuck(&g, &seed, 2, &w));
        assert_eq!(
            stuck_certificate(&path(3), &set(3, &[0, 2]), 2),
            Err(PercolationError::Percolates)
        );
    }

    #[test]
    fn round_cap_marks_trace() {
        let g = path(6);
        let seed = set(6, &[0, 2, 3, 5]);
        let t = run_capped(&g, &seed, 2, 0);
        assert!(t.capped && !t.converted_all);
        let t = run(&g, &seed, 2);
        assert!(!t.capped && t.converted_all);
        assert_eq!(t.conversion_round(1), Some(1));
        assert_eq!(t.conversion_round(0), Some(0));
    }

    fn arb_case() -> impl proptest::strategy::Strategy<Value = (Graph, Vec<bool>, Vec<bool>, usize)> {
        use proptest::prelude::*;
        crate::graph::tests::arb_graph(14).prop_flat_map(|g| {
            let n = g.n();
            (
                Just(g),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
                1usize..=4,
            )
        })
    }

    fn from_bools(bits: &[bool]) -> VertexSet {
        VertexSet::from_members(bits.len(), (0..bits.len()).filter(|&i| bits[i])).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn monotone_in_the_seed((g, a, extra, k) in arb_case()) {
            let small = from_bools(&a);
            let mut big = small.clone();
            big.union_with(&from_bools(&extra));
            let fs = run(&g, &small, k).final_black;
            let fb = run(&g, &big, k).final_black;
            proptest::prop_assert!(fs.is_subset(&fb));
        }

        #[test]
        fn idempotent_and_bounded((g, a, _extra, k) in arb_case()) {
            let t = run(&g, &from_bools(&a), k);
            proptest::prop_assert!(t.rounds.len() <= g.n() && !t.capped);
            let again = run(&g, &t.final_black, k);
            proptest::prop_assert!(again.rounds.is_empty());
            proptest::prop_assert_eq!(again.final_black, t.final_black.clone());
            let mut sp = Spreader::new(&g, k);
            proptest::prop_assert_eq!(sp.spread(t.seed.iter()), t.final_black.len());
        }

        #[test]
        fn low_degree_vertices_stay_white((g, a, _extra, k) in arb_case()) {
            let seed = from_bools(&a);
            let t = run(&g, &seed, k);
            for v in g.vertices().filter(|&v| g.degree(v) < k && !seed.contains(v)) {
                proptest::prop_assert!(!t.final_black.contains(v));
            }
        }
    }
}
