//! Named small graphs, random subcubic graphs, and an isomorphism-free
//! enumeration of connected graphs of maximum degree 3.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a simple cycle needs at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle")
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("complete graph")
}

/// Star with one center (id 0) and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star")
}

/// Cycle `v1..v5` with chords `v2v4` and `v3v5`; `v1` (id 0) is the only
/// vertex of degree 2.
pub fn h5() -> Graph {
    Graph::from_edges(5, H5_EDGES).expect("H5")
}

/// Edges of [`h5`] on local ids 0..5.
pub const H5_EDGES: [(usize, usize); 7] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3), (2, 4)];

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, edges).expect("Petersen graph")
}

/// Uniform-ish random cubic graph on an even number of vertices via the
/// pairing model with rejection of loops, multi-edges and disconnected draws.
pub fn random_cubic<R: Rng>(n: usize, rng: &mut R) -> Graph {
    assert!(n >= 4 && n % 2 == 0, "cubic graphs need an even n >= 4");
    loop {
        let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
        points.shuffle(rng);
        let pairs: Vec<(usize, usize)> = points.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(g) = Graph::from_edges(n, pairs) {
            if g.is_connected() {
                return g;
            }
        }
    }
}

/// Random connected graph with maximum degree 3: a random tree with degrees
/// at most 3, plus up to `extra` additional edges between vertices of spare
/// degree.
pub fn random_connected_subcubic<R: Rng>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    let mut has = std::collections::HashSet::new();
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < 3).collect();
        let u = *open.choose(rng).expect("a tree on >=1 vertex has a vertex of degree < 3");
        edges.push((u, v));
        has.insert((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    for _ in 0..extra {
        let open: Vec<usize> = (0..n).filter(|&u| deg[u] < 3).collect();
        if open.len() < 2 {
            break;
        }
        let u = *open.choose(rng).unwrap();
        let v = *open.choose(rng).unwrap();
        let key = (u.min(v), u.max(v));
        if u == v || has.contains(&key) {
            continue;
        }
        has.insert(key);
        edges.push(key);
        deg[u] += 1;
        deg[v] += 1;
    }
    Graph::from_edges(n, edges).expect("random subcubic graph")
}

/// Canonical labeling: returns `order` such that `order[i]` is the vertex
/// placed at position `i`, and the packed upper-triangular adjacency code of
/// the relabeled graph. Two graphs are isomorphic iff their codes are equal.
///
/// Individualization-refinement without automorphism pruning; intended for
/// graphs of at most a few dozen vertices.
pub fn canonical_form(g: &Graph) -> (Vec<usize>, Vec<u64>) {
    let colors = refine(g, vec![0; g.n()]);
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    search(g, colors, &mut best);
    let (code, order) = best.unwrap_or_default();
    (order, code)
}

fn refine(g: &Graph, mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = count_classes(&colors);
    loop {
        let mut sigs: Vec<(usize, Vec<usize>, usize)> = (0..g.n())
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb, v)
            })
            .collect();
        sigs.sort();
        let mut next = vec![0; g.n()];
        let mut rank = 0;
        for i in 0..sigs.len() {
            if i > 0 && (sigs[i].0 != sigs[i - 1].0 || sigs[i].1 != sigs[i - 1].1) {
                rank += 1;
            }
            next[sigs[i].2] = rank;
        }
        colors = next;
        let c = count_classes(&colors);
        if c == classes {
            return colors;
        }
        classes = c;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(g: &Graph, colors: Vec<usize>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
    let n = g.n();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        members.entry(colors[v]).or_default().push(v);
    }
    match members.values().find(|cell| cell.len() > 1) {
        None => {
            let mut order = vec![0; n];
            for v in 0..n {
                order[colors[v]] = v;
            }
            let code = adjacency_code(g, &order);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, order));
            }
        }
        Some(cell) => {
            let target = colors[cell[0]];
            for &v in cell {
                let split: Vec<usize> = (0..n)
                    .map(|u| 2 * colors[u] + usize::from(colors[u] == target && u != v))
                    .collect();
                search(g, refine(g, split), best);
            }
        }
    }
}

fn adjacency_code(g: &Graph, order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut code = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64).max(1)];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(order[i], order[j]) {
                code[bit / 64] |= 1 << (63 - bit % 64);
            }
            bit += 1;
        }
    }
    code
}

/// Relabels `g` so that vertex `order[i]` becomes `i`.
pub fn relabel(g: &Graph, order: &[usize]) -> Graph {
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    Graph::from_edges(g.n(), g.edges().iter().map(|&(u, v)| (pos[u], pos[v]))).expect("relabeling")
}

/// All connected graphs of maximum degree at most 3 on `1..=max_n` vertices,
/// one representative per isomorphism class; entry `i` holds the graphs on
/// `i + 1` vertices in canonical form.
///
/// Every connected graph has a non-cut vertex, so each class on `n + 1`
/// vertices arises from a class on `n` vertices by adding one vertex joined
/// to 1..=3 vertices of degree below 3.
pub fn connected_subcubic_graphs(max_n: usize) -> Vec<Vec<Graph>> {
    let mut levels: Vec<Vec<Graph>> = Vec::new();
    if max_n == 0 {
        return levels;
    }
    levels.push(vec![Graph::empty(1)]);
    for n in 1..max_n {
        let mut found: BTreeMap<Vec<u64>, Graph> = BTreeMap::new();
        for g in &levels[n - 1] {
            let open: Vec<usize> = g.vertices().filter(|&v| g.degree(v) < 3).collect();
            for mask in 1u32..(1 << open.len()) {
                if mask.count_ones() > 3 {
                    continue;
                }
                let edges = g.edges().iter().copied().chain(
                    open.iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &u)| (u, n)),
                );
                let h = Graph::from_edges(n + 1, edges).expect("vertex extension");
                let (order, code) = canonical_form(&h);
                found.entry(code).or_insert_with(|| relabel(&h, &order));
            }
        }
        levels.push(found.into_values().collect());
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_form_is_invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_connected_subcubic(9, 4, &mut rng);
            let mut perm: Vec<usize> = (0..9).collect();
            perm.shuffle(&mut rng);
            let h = relabel(&g, &perm);
            assert_eq!(canonical_form(&g).1, canonical_form(&h).1);
        }
    }

    #[test]
    fn canonical_form_separates_nonisomorphic() {
        // two cubic graphs on 6 vertices: prism and K3,3
        let prism = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap();
        let k33 = Graph::from_edges(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v)))).unwrap();
        assert_ne!(canonical_form(&prism).1, canonical_form(&k33).1);
    }

    #[test]
    fn subcubic_class_counts() {
        // connected graphs with maximum degree <= 3, counted up to isomorphism
        let counts: Vec<usize> = connected_subcubic_graphs(8).iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 10, 29, 64, 194]);
    }

    #[test]
    fn random_generators_respect_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_cubic(10, &mut rng);
            assert!(g.degree_profile().degrees.iter().all(|&d| d == 3));
            assert!(g.is_connected());
            let h = random_connected_subcubic(12, 6, &mut rng);
            assert!(h.max_degree() <= 3 && h.is_connected());
        }
        assert_eq!(petersen().degree_profile().degrees, vec![3; 10]);
    }
}
