//! Exhaustive search for minimum irreversible k-conversion sets. This is the
//! ground truth every other solver in the crate is checked against.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::percolation::Spreader;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("graph has {n} vertices; exhaustive search is limited to {limit} (raise the limit to override)")]
    TooLarge { n: usize, limit: usize },
    #[error("search budget of {limit} candidate seeds exhausted")]
    BudgetExceeded { limit: u64 },
    #[error("closed form needs maximum degree <= 2, found vertex {vertex} of degree {degree}")]
    DegreeTooHigh { vertex: usize, degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Refuse graphs with more vertices than this.
    pub max_vertices: Option<usize>,
    /// Abort after simulating this many candidate seeds.
    pub max_evaluations: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_vertices: Some(30),
            max_evaluations: None,
        }
    }
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        SearchLimits {
            max_vertices: None,
            max_evaluations: None,
        }
    }

    fn check(&self, g: &Graph) -> Result<(), ExactError> {
        match self.max_vertices {
            Some(limit) if g.n() > limit => Err(ExactError::TooLarge { n: g.n(), limit }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactSolution {
    pub size: usize,
    pub witness: VertexSet,
    pub evaluated: u64,
}

/// Vertices of degree below `k`: every conversion set contains them.
pub fn forced_vertices(g: &Graph, k: usize) -> Vec<usize> {
    g.vertices().filter(|&v| g.degree(v) < k).collect()
}

/// Smallest conversion set, searching sizes upward from the forced count.
/// Among optimal sets, the one whose free part is lexicographically least is
/// returned, independent of the number of worker threads.
pub fn min_conversion_set(g: &Graph, k: usize, limits: SearchLimits) -> Result<ExactSolution, ExactError> {
    minimize(g, k, limits, true)
}

/// Same search without forced inclusions; used to cross-check the pruning.
pub fn min_conversion_set_unpruned(g: &Graph, k: usize, limits: SearchLimits) -> Result<ExactSolution, ExactError> {
    minimize(g, k, limits, false)
}

fn minimize(g: &Graph, k: usize, limits: SearchLimits, prune: bool) -> Result<ExactSolution, ExactError> {
    limits.check(g)?;
    let forced = if prune { forced_vertices(g, k) } else { Vec::new() };
    let budget = Budget::new(limits.max_evaluations);
    for s in forced.len()..=g.n() {
        if let Some(witness) = search_size(g, k, &forced, s, &budget)? {
            return Ok(ExactSolution {
                size: s,
                witness,
                evaluated: budget.used(),
            });
        }
    }
    unreachable!("the full vertex set always converts")
}

/// Decision form: is there a conversion set with exactly (equivalently, at
/// most) `s` vertices?
pub fn has_conversion_set_of_size(g: &Graph, k: usize, s: usize, limits: SearchLimits) -> Result<bool, ExactError> {
    Ok(find_conversion_set_of_size(g, k, s, limits)?.is_some())
}

pub fn find_conversion_set_of_size(
    g: &Graph,
    k: usize,
    s: usize,
    limits: SearchLimits,
) -> Result<Option<VertexSet>, ExactError> {
    limits.check(g)?;
    if s >= g.n() {
        return Ok(Some(VertexSet::full(g.n())));
    }
    let forced = forced_vertices(g, k);
    search_size(g, k, &forced, s, &Budget::new(limits.max_evaluations))
}

struct Budget {
    used: AtomicU64,
    limit: Option<u64>,
    exceeded: AtomicBool,
}

impl Budget {
    fn new(limit: Option<u64>) -> Self {
        Budget {
            used: AtomicU64::new(0),
            limit,
            exceeded: AtomicBool::new(false),
        }
    }

    /// Counts one evaluation; false once the budget is gone.
    fn charge(&self) -> bool {
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        match self.limit {
            Some(limit) if used > limit => {
                self.exceeded.store(true, Ordering::Relaxed);
                false
            }
            _ => !self.exceeded.load(Ordering::Relaxed),
        }
    }

    fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

fn search_size(
    g: &Graph,
    k: usize,
    forced: &[usize],
    s: usize,
    budget: &Budget,
) -> Result<Option<VertexSet>, ExactError> {
    if s < forced.len() {
        return Ok(None);
    }
    let is_forced = {
        let mut f = vec![false; g.n()];
        forced.iter().for_each(|&v| f[v] = true);
        f
    };
    let free: Vec<usize> = g.vertices().filter(|&v| !is_forced[v]).collect();
    let extra = s - forced.len();
    if extra > free.len() {
        return Ok(None);
    }
    let to_set = |chosen: &[usize]| {
        VertexSet::from_members(g.n(), forced.iter().copied().chain(chosen.iter().map(|&i| free[i])))
            .expect("ids in range")
    };
    if extra == 0 {
        if !budget.charge() {
            return Err(over(budget));
        }
        let mut sp = Spreader::new(g, k);
        return Ok(sp.percolates(forced.iter().copied()).then(|| to_set(&[])));
    }

    let found = (0..=free.len() - extra).into_par_iter().find_map_first(|first| {
        let mut sp = Spreader::new(g, k);
        let mut seed: Vec<usize> = Vec::with_capacity(s);
        let mut idx: Vec<usize> = (0..extra).map(|j| first + j).collect();
        loop {
            if !budget.charge() {
                return None;
            }
            seed.clear();
            seed.extend_from_slice(forced);
            seed.extend(idx.iter().map(|&i| free[i]));
            if sp.percolates(seed.iter().copied()) {
                return Some(idx.clone());
            }
            // next combination keeping idx[0] == first
            let mut j = extra - 1;
            loop {
                if j == 0 {
                    return None;
                }
                if idx[j] < free.len() - (extra - j) {
                    idx[j] += 1;
                    for t in j + 1..extra {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
                j -= 1;
            }
        }
    });
    if budget.exceeded.load(Ordering::Relaxed) {
        return Err(over(budget));
    }
    Ok(found.map(|idx| to_set(&idx)))
}

fn over(budget: &Budget) -> ExactError {
    ExactError::BudgetExceeded {
        limit: budget.limit.unwrap_or(u64::MAX),
    }
}

/// Minimum irreversible 2-conversion set size of a graph with maximum degree
/// at most 2, summed over components: an isolated vertex needs 1, a path on
/// `p` vertices needs `⌈(p+1)/2⌉`, a cycle on `l` vertices needs `⌈l/2⌉`.
pub fn closed_form_maxdeg2(g: &Graph) -> Result<usize, ExactError> {
    Ok(maxdeg2_witness(g)?.len())
}

/// An optimal 2-conversion set for a graph of maximum degree at most 2:
/// alternate vertices along each path or cycle, plus the far path end.
pub fn maxdeg2_witness(g: &Graph) -> Result<VertexSet, ExactError> {
    if let Some(v) = g.vertices().find(|&v| g.degree(v) > 2) {
        return Err(ExactError::DegreeTooHigh {
            vertex: v,
            degree: g.degree(v),
        });
    }
    let mut seed = VertexSet::new(g.n());
    for comp in g.components() {
        let start = comp.iter().copied().find(|&v| g.degree(v) < 2).unwrap_or(comp[0]);
        let order = walk(g, start, comp.len());
        for (pos, &v) in order.iter().enumerate() {
            if pos % 2 == 0 {
                seed.insert(v);
            }
        }
        let is_cycle = g.degree(start) == 2;
        if !is_cycle {
            seed.insert(*order.last().expect("nonempty component"));
        }
    }
    Ok(seed)
}

fn walk(g: &Graph, start: usize, len: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < len {
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| w != prev && w != start)
            .expect("component of a max-degree-2 graph is a path or cycle");
        prev = cur;
        cur = next;
        order.push(cur);
    }
    order
}
