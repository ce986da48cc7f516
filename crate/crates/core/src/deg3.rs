//! Minimum irreversible 2-conversion sets for graphs of maximum degree 3.
//!
//! A connected input is reduced to a 3-regular graph `G3` through a short
//! pipeline of gadget attachments. On a cubic graph the 2-conversion sets are
//! exactly the feedback vertex sets, which are the spanning sets of the
//! 2-polymatroid `f(X) = μ(G3) - μ(G3 - X)`. That polymatroid is linear: a
//! cycle-space basis gives each edge a vector, and each vertex owns the line
//! spanned by two of its three edge vectors. A minimum spanning subset of the
//! pre-caterpillar vertex set is computed with `polymatroid` and mapped back
//! through the pipeline.
//!
//! Every step keeps the vertex ids of its input and appends new vertices, so
//! mapping a seed back to an earlier graph is a prefix restriction plus the
//! step-specific repair.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{maxdeg2_witness, min_conversion_set, SearchLimits};
use crate::generators::H5_EDGES;
use crate::graph::{Graph, VertexSet};
use crate::percolation::Spreader;
use crate::polymatroid::{BinaryField, Line, PolymatroidError, PolymatroidInstance, DEFAULT_TRIALS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Deg3Error {
    #[error("vertex {vertex} has degree {degree}; this solver handles maximum degree 3")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("expected a {expected} graph")]
    Precondition { expected: &'static str },
    #[error("cographic representation disagrees with the cyclomatic rank on {subset:?}")]
    Representation { subset: Vec<usize> },
    #[error(transparent)]
    Polymatroid(#[from] PolymatroidError),
    #[error("no verified witness after {attempts} attempts on a component of {n} vertices")]
    VerificationFailed { n: usize, attempts: usize },
}

const SOLVE_ATTEMPTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    AttachH5,
    SplitAdjacentPair,
    AddEdgeNonadjacent,
    DuplicateGraph,
    AttachCaterpillar,
}

/// Role-tagged vertices of a step, in the ids of the graph after the step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepRoles {
    /// `copies[i][0]` is the anchor (a former leaf); the rest are new.
    AttachH5 { copies: Vec<[usize; 5]> },
    /// Edge `uv` subdivided by `x`, pendant `y` on `x`, H5 copy on `y`.
    SplitAdjacentPair { u: usize, v: usize, x: usize, y: usize, copy: [usize; 5] },
    AddEdgeNonadjacent { u: usize, v: usize },
    /// The copy of vertex `i` is `i + offset`; `v` joined to `v + offset`.
    DuplicateGraph { v: usize, offset: usize },
    /// `attached` are the former degree-2 vertices; `spine` the new path.
    AttachCaterpillar { attached: Vec<usize>, spine: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub before: Graph,
    pub after: Graph,
    pub roles: StepRoles,
}

impl ReductionStep {
    pub fn kind(&self) -> StepKind {
        match self.roles {
            StepRoles::AttachH5 { .. } => StepKind::AttachH5,
            StepRoles::SplitAdjacentPair { .. } => StepKind::SplitAdjacentPair,
            StepRoles::AddEdgeNonadjacent { .. } => StepKind::AddEdgeNonadjacent,
            StepRoles::DuplicateGraph { .. } => StepKind::DuplicateGraph,
            StepRoles::AttachCaterpillar { .. } => StepKind::AttachCaterpillar,
        }
    }

    /// Minimum 2-conversion set size after the step, given the size before.
    /// `None` for the caterpillar, whose relation goes through `V2` instead.
    pub fn optimum_after(&self, before: usize) -> Option<usize> {
        match &self.roles {
            StepRoles::AttachH5 { copies } => Some(before + copies.len()),
            StepRoles::SplitAdjacentPair { .. } => Some(before + 2),
            StepRoles::AddEdgeNonadjacent { .. } => Some(before),
            StepRoles::DuplicateGraph { .. } => Some(2 * before),
            StepRoles::AttachCaterpillar { .. } => None,
        }
    }

    /// Maps a 2-conversion set of `after` to one of `before`, checking the
    /// result by simulation.
    pub fn back_map(&self, seed: &VertexSet) -> Option<VertexSet> {
        let nb = self.before.n();
        let base: Vec<usize> = seed.iter().filter(|&v| v < nb).collect();
        let candidates: Vec<Vec<usize>> = match &self.roles {
            StepRoles::AttachH5 { copies } => {
                let mut s = base;
                s.extend(copies.iter().map(|c| c[0]));
                vec![s]
            }
            StepRoles::SplitAdjacentPair { u, v, x, .. } => {
                if seed.contains(*x) {
                    vec![with(&base, &[*u]), with(&base, &[*v]), with(&base, &[*u, *v])]
                } else {
                    vec![base]
                }
            }
            StepRoles::AddEdgeNonadjacent { .. } | StepRoles::AttachCaterpillar { .. } => vec![base],
            StepRoles::DuplicateGraph { v, offset } => {
                let copy: Vec<usize> = seed.iter().filter(|&w| w >= *offset).map(|w| w - offset).collect();
                let mut c = vec![with(&base, &[*v]), with(&copy, &[*v]), base, copy];
                c.sort_by_key(|s| s.len());
                c
            }
        };
        let mut spreader = Spreader::new(&self.before, 2);
        candidates.into_iter().find_map(|mut s| {
            s.sort_unstable();
            s.dedup();
            spreader
                .percolates(s.iter().copied())
                .then(|| VertexSet::from_members(nb, s).expect("ids below n"))
        })
    }
}

fn with(base: &[usize], extra: &[usize]) -> Vec<usize> {
    base.iter().chain(extra).copied().collect()
}

fn check_max_degree(g: &Graph) -> Result<(), Deg3Error> {
    match g.vertices().find(|&v| g.degree(v) > 3) {
        Some(v) => Err(Deg3Error::DegreeTooHigh {
            vertex: v,
            degree: g.degree(v),
        }),
        None => Ok(()),
    }
}

/// Identifies each degree-1 vertex with the degree-2 vertex of a fresh copy
/// of H5. Each copy raises the optimum by exactly one.
pub fn attach_h5_to_leaves(g: &Graph) -> Result<ReductionStep, Deg3Error> {
    check_max_degree(g)?;
    let leaves: Vec<usize> = g.vertices().filter(|&v| g.degree(v) == 1).collect();
    let mut edges = g.edges().to_vec();
    let mut copies = Vec::new();
    let mut next = g.n();
    for &leaf in &leaves {
        let ids = [leaf, next, next + 1, next + 2, next + 3];
        next += 4;
        edges.extend(H5_EDGES.iter().map(|&(a, b)| (ids[a], ids[b])));
        copies.push(ids);
    }
    Ok(ReductionStep {
        before: g.clone(),
        after: Graph::from_edges(next, edges).expect("H5 attachment stays simple"),
        roles: StepRoles::AttachH5 { copies },
    })
}

/// Steps turning a connected graph with degrees in {2, 3} into a cubic one.
pub fn normalize_degree2(g2: &Graph) -> Result<Vec<ReductionStep>, Deg3Error> {
    check_max_degree(g2)?;
    if !g2.is_connected() || g2.vertices().any(|v| g2.degree(v) < 2) {
        return Err(Deg3Error::Precondition {
            expected: "connected, minimum degree 2",
        });
    }
    let mut steps = Vec::new();
    let mut cur = g2.clone();
    loop {
        let deg2: Vec<usize> = cur.vertices().filter(|&v| cur.degree(v) == 2).collect();
        let step = match deg2.len() {
            0 => return Ok(steps),
            1 => duplicate(&cur, deg2[0]),
            2 if cur.has_edge(deg2[0], deg2[1]) => split_adjacent(&cur, deg2[0], deg2[1]),
            2 => add_edge(&cur, deg2[0], deg2[1]),
            _ => caterpillar(&cur, &deg2),
        };
        cur = step.after.clone();
        steps.push(step);
    }
}

fn duplicate(g: &Graph, v: usize) -> ReductionStep {
    let n = g.n();
    let mut edges = g.disjoint_union(g).edges().to_vec();
    edges.push((v, v + n));
    ReductionStep {
        before: g.clone(),
        after: Graph::from_edges(2 * n, edges).expect("duplication stays simple"),
        roles: StepRoles::DuplicateGraph { v, offset: n },
    }
}

fn split_adjacent(g: &Graph, u: usize, v: usize) -> ReductionStep {
    let n = g.n();
    let (x, y) = (n, n + 1);
    let copy = [y, n + 2, n + 3, n + 4, n + 5];
    let mut edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&e| e != (u.min(v), u.max(v))).collect();
    edges.extend([(u, x), (x, v), (x, y)]);
    edges.extend(H5_EDGES.iter().map(|&(a, b)| (copy[a], copy[b])));
    ReductionStep {
        before: g.clone(),
        after: Graph::from_edges(n + 6, edges).expect("split stays simple"),
        roles: StepRoles::SplitAdjacentPair { u, v, x, y, copy },
    }
}

fn add_edge(g: &Graph, u: usize, v: usize) -> ReductionStep {
    let mut edges = g.edges().to_vec();
    edges.push((u, v));
    ReductionStep {
        before: g.clone(),
        after: Graph::from_edges(g.n(), edges).expect("u and v are nonadjacent"),
        roles: StepRoles::AddEdgeNonadjacent { u, v },
    }
}

/// Spine `w1..w_{k-2}`; the ends take two leaves each and inner spine
/// vertices one, so every vertex ends at degree 3. For `k = 3` the single
/// spine vertex takes all three.
fn caterpillar(g: &Graph, attached: &[usize]) -> ReductionStep {
    let n = g.n();
    let k = attached.len();
    let spine: Vec<usize> = (n..n + k - 2).collect();
    let mut edges = g.edges().to_vec();
    edges.extend(spine.windows(2).map(|w| (w[0], w[1])));
    for (i, &t) in attached.iter().enumerate() {
        let pos = if k == 3 { 0 } else { i.saturating_sub(1).min(k - 3) };
        edges.push((t, spine[pos]));
    }
    ReductionStep {
        before: g.clone(),
        after: Graph::from_edges(n + k - 2, edges).expect("caterpillar stays simple"),
        roles: StepRoles::AttachCaterpillar {
            attached: attached.to_vec(),
            spine,
        },
    }
}

/// The full reduction of one connected graph of maximum degree 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pipeline {
    pub original: Graph,
    pub steps: Vec<ReductionStep>,
    pub g3: Graph,
    /// `V2` is the id prefix `0..v2_len` of `G3`.
    pub v2_len: usize,
}

impl Pipeline {
    pub fn build(g: &Graph) -> Result<Pipeline, Deg3Error> {
        check_max_degree(g)?;
        if !g.is_connected() || g.max_degree() < 3 {
            return Err(Deg3Error::Precondition {
                expected: "connected, maximum degree 3",
            });
        }
        let mut steps = Vec::new();
        let h5 = attach_h5_to_leaves(g)?;
        let g2 = h5.after.clone();
        if matches!(&h5.roles, StepRoles::AttachH5 { copies } if !copies.is_empty()) {
            steps.push(h5);
        }
        steps.extend(normalize_degree2(&g2)?);
        let g3 = steps.last().map_or_else(|| g.clone(), |s| s.after.clone());
        let v2_len = match steps.last() {
            Some(s) if s.kind() == StepKind::AttachCaterpillar => s.before.n(),
            _ => g3.n(),
        };
        Ok(Pipeline {
            original: g.clone(),
            steps,
            g3,
            v2_len,
        })
    }

    /// The graph whose 2-conversion sets are the spanning subsets of `V2`.
    pub fn v2_graph(&self) -> &Graph {
        match self.steps.last() {
            Some(s) if s.kind() == StepKind::AttachCaterpillar => &s.before,
            _ => &self.g3,
        }
    }

    pub fn v2(&self) -> Vec<usize> {
        (0..self.v2_len).collect()
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(ReductionStep::kind).collect()
    }

    /// Optimum of `v2_graph()` predicted from the optimum of the original.
    pub fn predicted_v2_optimum(&self, original: usize) -> usize {
        self.steps
            .iter()
            .fold(original, |acc, s| s.optimum_after(acc).unwrap_or(acc))
    }

    /// Maps a 2-conversion set of `v2_graph()` back to the original graph.
    pub fn back_map(&self, seed: &VertexSet) -> Option<VertexSet> {
        let mut cur = seed.clone();
        for step in self.steps.iter().rev() {
            if step.kind() == StepKind::AttachCaterpillar {
                continue;
            }
            cur = step.back_map(&cur)?;
        }
        Some(cur)
    }
}

/// One line per vertex of a graph of maximum degree 3: the span of the
/// cycle-space coordinates of two incident edges.
pub fn cographic_lines(g3: &Graph) -> Result<PolymatroidInstance, Deg3Error> {
    if g3.vertices().any(|v| g3.degree(v) != 3) {
        return Err(Deg3Error::Precondition { expected: "3-regular" });
    }
    let forest = g3.spanning_forest();
    let dim = forest.cycles.len();
    let mut column = vec![vec![0u64; dim]; g3.edge_count()];
    for (j, c) in forest.cycles.iter().enumerate() {
        for &e in &c.edges {
            column[e][j] = 1;
        }
    }
    let incident = g3.incident_edges();
    let lines = g3
        .vertices()
        .map(|v| Line {
            owner: v,
            a: column[incident[v][0].1].clone(),
            b: column[incident[v][1].1].clone(),
        })
        .collect();
    Ok(PolymatroidInstance::new(BinaryField::default(), dim, lines)?)
}

/// Compares the linear rank with `μ(G3) - μ(G3 - X)` on all singletons, the
/// whole vertex set, and `samples` random subsets.
pub fn verify_representation<R: Rng>(
    g3: &Graph,
    inst: &PolymatroidInstance,
    rng: &mut R,
    samples: usize,
) -> Result<(), Deg3Error> {
    let mu = g3.cyclomatic();
    let mut subsets: Vec<Vec<usize>> = g3.vertices().map(|v| vec![v]).collect();
    subsets.push(g3.vertices().collect());
    for _ in 0..samples {
        let mut x: Vec<usize> = g3.vertices().filter(|_| rng.gen_bool(0.3)).collect();
        x.shuffle(rng);
        subsets.push(x);
    }
    for x in subsets {
        let removed = VertexSet::from_members(g3.n(), x.iter().copied()).expect("ids in range");
        let expect = mu - g3.delete_vertices(&removed).0.cyclomatic();
        if inst.rank(&x) != expect {
            return Err(Deg3Error::Representation { subset: x });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub vertices: Vec<usize>,
    pub steps: Vec<StepKind>,
    pub g3_vertices: usize,
    pub v2_size: usize,
    pub cyclomatic: usize,
    pub matching_size: usize,
    pub spanning_size: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deg3Solution {
    pub size: usize,
    pub witness: VertexSet,
    pub seed: u64,
    pub components: Vec<ComponentSummary>,
}

/// Minimum irreversible 2-conversion set of a graph of maximum degree 3.
/// Components are solved independently with RNG streams derived from `seed`;
/// every witness is checked by simulation before it is returned.
pub fn min_i2cs_maxdeg3(g: &Graph, seed: u64) -> Result<Deg3Solution, Deg3Error> {
    check_max_degree(g)?;
    let comps = g.components();
    let solved = comps
        .par_iter()
        .enumerate()
        .map(|(i, comp)| {
            let (h, remap) = g.induced(comp);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (local, mut summary) = solve_component(&h, &mut rng)?;
            summary.vertices = comp.clone();
            Ok((local.iter().map(|v| remap.backward[v]).collect::<Vec<_>>(), summary))
        })
        .collect::<Result<Vec<_>, Deg3Error>>()?;
    let mut witness = VertexSet::new(g.n());
    let mut components = Vec::new();
    for (members, summary) in solved {
        members.into_iter().for_each(|v| {
            witness.insert(v);
        });
        components.push(summary);
    }
    if !Spreader::new(g, 2).percolates(witness.iter()) {
        return Err(Deg3Error::VerificationFailed {
            n: g.n(),
            attempts: SOLVE_ATTEMPTS,
        });
    }
    Ok(Deg3Solution {
        size: witness.len(),
        witness,
        seed,
        components,
    })
}

fn solve_component<R: Rng>(h: &Graph, rng: &mut R) -> Result<(VertexSet, ComponentSummary), Deg3Error> {
    let mut summary = ComponentSummary {
        vertices: Vec::new(),
        steps: Vec::new(),
        g3_vertices: h.n(),
        v2_size: h.n(),
        cyclomatic: h.cyclomatic(),
        matching_size: 0,
        spanning_size: 0,
        size: 0,
    };
    if h.max_degree() <= 2 {
        let w = maxdeg2_witness(h).expect("maximum degree checked");
        summary.size = w.len();
        return Ok((w, summary));
    }
    let pipeline = Pipeline::build(h)?;
    let inst = cographic_lines(&pipeline.g3)?;
    verify_representation(&pipeline.g3, &inst, rng, 8)?;
    summary.steps = pipeline.kinds();
    summary.g3_vertices = pipeline.g3.n();
    summary.v2_size = pipeline.v2_len;
    summary.cyclomatic = pipeline.g3.cyclomatic();
    let v2 = pipeline.v2();
    let v2_graph = pipeline.v2_graph();
    for _ in 0..SOLVE_ATTEMPTS {
        let span = match inst.min_spanning_set(&v2, rng, DEFAULT_TRIALS) {
            Ok(s) => s,
            Err(PolymatroidError::Inconsistent { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let s3 = VertexSet::from_members(v2_graph.n(), span.members.iter().copied()).expect("V2 ids");
        if !Spreader::new(v2_graph, 2).percolates(s3.iter()) {
            continue;
        }
        if let Some(w) = pipeline.back_map(&s3) {
            summary.matching_size = span.matching.len();
            summary.spanning_size = span.members.len();
            summary.size = w.len();
            return Ok((w, summary));
        }
    }
    Err(Deg3Error::VerificationFailed {
        n: h.n(),
        attempts: SOLVE_ATTEMPTS,
    })
}

/// A graph where the caterpillar spine pays off: the cubic graph `G3` has a
/// smaller 2-conversion set than `G2`, so the optimum has to be taken over
/// `V2` rather than all of `V3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpineAdvantage {
    pub g2: Graph,
    pub g3: Graph,
    pub spine: Vec<usize>,
    pub optimum_g2: usize,
    pub optimum_g3: usize,
    /// An optimal set of `G3`; it meets the spine.
    pub witness: VertexSet,
}

/// Scans `candidates` (connected, degrees in {2, 3}, between 3 and
/// `max_attached` vertices of degree 2; others are skipped), trying every
/// order of the degree-2 vertices along the spine, for the first caterpillar
/// completion that beats its input.
pub fn find_spine_advantage<I>(candidates: I, max_attached: usize) -> Option<SpineAdvantage>
where
    I: IntoIterator<Item = Graph>,
{
    candidates.into_iter().find_map(|g2| {
        if !g2.is_connected() || g2.max_degree() > 3 || g2.vertices().any(|v| g2.degree(v) < 2) {
            return None;
        }
        let deg2: Vec<usize> = g2.vertices().filter(|&v| g2.degree(v) == 2).collect();
        if !(3..=max_attached).contains(&deg2.len()) {
            return None;
        }
        let a = min_conversion_set(&g2, 2, SearchLimits::unlimited()).ok()?.size;
        orders(&deg2).into_par_iter().find_map_first(|order| {
            let step = caterpillar(&g2, &order);
            let b = min_conversion_set(&step.after, 2, SearchLimits::unlimited()).ok()?;
            let StepRoles::AttachCaterpillar { spine, .. } = step.roles else {
                unreachable!("caterpillar step")
            };
            (b.size < a).then(|| SpineAdvantage {
                g2: g2.clone(),
                g3: step.after,
                spine,
                optimum_g2: a,
                optimum_g3: b.size,
                witness: b.witness,
            })
        })
    })
}

/// All orders of `items`, skipping reversals (the spine is symmetric).
fn orders(items: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            if cur.first() < cur.last() {
                out.push(cur.clone());
            }
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut items.to_vec(), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{min_conversion_set, SearchLimits};
    use crate::generators::{complete, connected_subcubic_graphs, h5, path, petersen, star};
    use crate::percolation::is_conversion_set;

    fn opt(g: &Graph) -> usize {
        min_conversion_set(g, 2, SearchLimits::unlimited()).unwrap().size
    }

    fn k23() -> Graph {
        Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap()
    }

    #[test]
    fn h5_attachment_examples() {
        let e = path(2);
        let s = attach_h5_to_leaves(&e).unwrap();
        assert_eq!(s.after.n(), 10);
        assert_eq!(opt(&s.after), opt(&e) + 2);

        let st = star(3);
        let s = attach_h5_to_leaves(&st).unwrap();
        assert_eq!(s.after.degree(0), 3);
        assert_eq!(opt(&s.after), opt(&st) + 3);
        assert_eq!(s.optimum_after(opt(&st)), Some(opt(&s.after)));

        let s = attach_h5_to_leaves(&complete(4)).unwrap();
        assert_eq!(s.after, complete(4));
    }

    #[test]
    fn normalize_examples() {
        let steps = normalize_degree2(&h5()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].kind(), StepKind::DuplicateGraph);
        assert_eq!(opt(&steps[0].after), 4);

        assert!(normalize_degree2(&complete(4)).unwrap().is_empty());

        let steps = normalize_degree2(&k23()).unwrap();
        assert_eq!(steps.len(), 1);
        let g3 = &steps[0].after;
        assert_eq!(g3.n(), 6);
        assert!(g3.vertices().all(|v| g3.degree(v) == 3));
        assert_eq!(g3.neighbors(5), &[2, 3, 4]);

        assert!(normalize_degree2(&path(3)).is_err());
    }

    #[test]
    fn adjacent_pair_chain() {
        // K4 with the edge 0-1 subdivided twice: 4 and 5 are adjacent of degree 2
        let g = Graph::from_edges(6, [(0, 4), (4, 5), (5, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let steps = normalize_degree2(&g).unwrap();
        assert_eq!(
            steps.iter().map(ReductionStep::kind).collect::<Vec<_>>(),
            vec![StepKind::SplitAdjacentPair, StepKind::AddEdgeNonadjacent]
        );
        assert_eq!(opt(&steps[0].after), opt(&g) + 2);
        assert_eq!(opt(&steps[1].after), opt(&steps[0].after));
        let g3 = &steps[1].after;
        assert!(g3.vertices().all(|v| g3.degree(v) == 3));
    }

    #[test]
    fn cographic_k4() {
        let g = complete(4);
        let inst = cographic_lines(&g).unwrap();
        assert_eq!(inst.dim(), 3);
        assert!((0..4).all(|v| inst.rank(&[v]) == 2));
        assert_eq!(inst.full_rank(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        verify_representation(&g, &inst, &mut rng, 20).unwrap();
        assert!(cographic_lines(&path(3)).is_err());
    }

    #[test]
    fn solver_examples() {
        let s = min_i2cs_maxdeg3(&path(3), 0).unwrap();
        assert_eq!(s.size, 2);
        let p = petersen();
        let s = min_i2cs_maxdeg3(&p, 0).unwrap();
        assert_eq!(s.size, opt(&p));
        assert!(is_conversion_set(&p, &s.witness, 2));
        let two = complete(4).disjoint_union(&star(3));
        let s = min_i2cs_maxdeg3(&two, 9).unwrap();
        assert_eq!(s.size, opt(&two));
        assert_eq!(s.components.len(), 2);
        assert!(min_i2cs_maxdeg3(&star(4), 0).is_err());
    }

    #[test]
    fn matches_exact_up_to_seven_vertices() {
        for level in connected_subcubic_graphs(7) {
            for g in level {
                let s = min_i2cs_maxdeg3(&g, 3).unwrap();
                assert_eq!(s.size, opt(&g), "{g}");
            }
        }
    }

    #[test]
    fn spanning_iff_conversion_on_k23() {
        let p = Pipeline::build(&k23()).unwrap();
        assert_eq!(p.kinds(), vec![StepKind::AttachCaterpillar]);
        let inst = cographic_lines(&p.g3).unwrap();
        let v2 = p.v2();
        let target = inst.rank(&v2);
        for mask in 0u32..1 << v2.len() {
            let s: Vec<usize> = v2.iter().copied().filter(|&v| mask & (1 << v) != 0).collect();
            let seed = VertexSet::from_members(p.v2_graph().n(), s.iter().copied()).unwrap();
            assert_eq!(inst.rank(&s) == target, is_conversion_set(p.v2_graph(), &seed, 2));
        }
    }

    #[test]
    fn spine_can_beat_v2() {
        // found by running `find_spine_advantage` on subdivided random cubic graphs
        let g2 = crate::graph::parse_edge_list(
            "0 11\n1 4\n8 11\n3 5\n9 10\n2 10\n6 7\n2 3\n3 4\n2 4\n1 5\n5 10\n7 11\n6 9\n7 9\n0 8\n\
             6 12\n0 13\n12 13\n8 14\n1 15\n14 15\n",
        )
        .unwrap();
        let found = find_spine_advantage([g2.clone()], 4).expect("spine advantage");
        assert_eq!((found.optimum_g2, found.optimum_g3), (6, 5));
        assert_eq!(found.spine.len(), 2);
        assert!(found.g3.vertices().all(|v| found.g3.degree(v) == 3));
        assert!(found.spine.iter().any(|&w| found.witness.contains(w)));
        // no 5-set inside V2 converts G3, so every optimum uses the spine
        let mut sp = Spreader::new(&found.g3, 2);
        let n2 = g2.n() as u32;
        let hits = (0u32..1 << n2)
            .filter(|m| m.count_ones() == 5)
            .filter(|m| sp.percolates((0..g2.n()).filter(|&v| m >> v & 1 == 1)))
            .count();
        assert_eq!(hits, 0);
        assert!(find_spine_advantage([crate::generators::petersen()], 4).is_none());
    }
}
