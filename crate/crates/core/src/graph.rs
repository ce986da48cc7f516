//! Simple undirected graphs on dense vertex ids, plus the structural queries
//! (components, cyclomatic number, spanning forests) the solvers build on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed input: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex id {id} exceeds the declared or supported range")]
    IdOverflow { line: usize, id: String },
    #[error("header declares {declared} edges but {found} were read")]
    EdgeCountMismatch { declared: usize, found: usize },
}

/// Largest vertex id accepted by the text parser.
pub const MAX_VERTEX_ID: usize = u32::MAX as usize;

/// An undirected simple graph with vertices `0..n`.
///
/// Adjacency lists are kept sorted; `edges` lists every edge once as `(u, v)`
/// with `u < v`, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(value: GraphJson) -> Result<Self, Self::Error> {
        Graph::from_edges(value.n, value.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Graph on `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            adj[u].push(v);
            adj[v].push(u);
            list.push(e);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Graph { adj, edges: list })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let max = degrees.iter().copied().max().unwrap_or(0);
        DegreeProfile { degrees, max }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in self.vertices() {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Cyclomatic number `e - v + κ`: the dimension of the cycle space.
    pub fn cyclomatic(&self) -> usize {
        self.edge_count() + self.component_count() - self.n()
    }

    /// Induced subgraph on the complement of `removed`.
    pub fn delete_vertices(&self, removed: &VertexSet) -> (Graph, Remap) {
        let keep: Vec<usize> = self.vertices().filter(|&v| !removed.contains(v)).collect();
        self.induced(&keep)
    }

    /// Induced subgraph on `keep` (new ids follow the order of `keep`).
    pub fn induced(&self, keep: &[usize]) -> (Graph, Remap) {
        let mut forward = vec![None; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            forward[old] = Some(new);
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| match (forward[u], forward[v]) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        });
        let g = Graph::from_edges(keep.len(), edges).expect("induced subgraph of a simple graph");
        (
            g,
            Remap {
                forward,
                backward: keep.to_vec(),
            },
        )
    }

    /// Breadth-first spanning forest together with the fundamental cycle of
    /// every non-tree edge. Edges are referenced by their index in `edges()`.
    pub fn spanning_forest(&self) -> SpanningForest {
        let n = self.n();
        let mut parent_edge = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut in_tree = vec![false; self.edge_count()];
        let incident = self.incident_edges();
        let mut queue = VecDeque::new();
        for root in self.vertices() {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &(w, e) in &incident[u] {
                    if !visited[w] {
                        visited[w] = true;
                        parent_edge[w] = e;
                        depth[w] = depth[u] + 1;
                        in_tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let other = |e: usize, v: usize| {
            let (a, b) = self.edges[e];
            if a == v {
                b
            } else {
                a
            }
        };
        let mut tree_edges = Vec::new();
        let mut cycles = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if in_tree[e] {
                tree_edges.push(e);
                continue;
            }
            let mut cycle = vec![e];
            let (mut a, mut b) = (u, v);
            while a != b {
                if depth[a] >= depth[b] {
                    let pe = parent_edge[a];
                    cycle.push(pe);
                    a = other(pe, a);
                } else {
                    let pe = parent_edge[b];
                    cycle.push(pe);
                    b = other(pe, b);
                }
            }
            cycle.sort_unstable();
            cycles.push(FundamentalCycle {
                non_tree_edge: e,
                edges: cycle,
            });
        }
        SpanningForest {
            tree_edges,
            cycles,
        }
    }

    /// For every vertex, its `(neighbor, edge index)` pairs.
    pub fn incident_edges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.n()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push((v, e));
            inc[v].push((u, e));
        }
        inc
    }

    /// Whether the graph contains a cycle, found by depth-first search.
    pub fn has_cycle(&self) -> bool {
        let mut visited = vec![false; self.n()];
        for root in self.vertices() {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut stack = vec![(root, usize::MAX)];
            while let Some((u, parent)) = stack.pop() {
                for &w in &self.adj[u] {
                    if w == parent {
                        continue;
                    }
                    if visited[w] {
                        return true;
                    }
                    visited[w] = true;
                    stack.push((w, u));
                }
            }
        }
        false
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + off, v + off)));
        Graph::from_edges(off + other.n(), edges).expect("disjoint union of simple graphs")
    }

    /// Edge-list text, one `u v` per line after a `p <n> <m>` header.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("p {} {}\n", self.n(), self.edge_count());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n(), self.edge_count())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub max: usize,
}

/// Vertex id translation produced by subgraph operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Remap {
    /// old id -> new id (None when deleted)
    pub forward: Vec<Option<usize>>,
    /// new id -> old id
    pub backward: Vec<usize>,
}

impl Remap {
    pub fn is_identity(&self) -> bool {
        self.backward.iter().enumerate().all(|(i, &v)| i == v) && self.forward.len() == self.backward.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub non_tree_edge: usize,
    /// Sorted edge indices, including the non-tree edge.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    pub tree_edges: Vec<usize>,
    pub cycles: Vec<FundamentalCycle>,
}

/// A subset of the vertices of some graph on `host` vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn new(host: usize) -> Self {
        VertexSet {
            bits: vec![false; host],
            len: 0,
        }
    }

    pub fn full(host: usize) -> Self {
        VertexSet {
            bits: vec![true; host],
            len: host,
        }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(host: usize, members: I) -> Result<Self, GraphError> {
        let mut s = VertexSet::new(host);
        for v in members {
            if v >= host {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: host });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn host(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.get(v).copied().unwrap_or(false)
    }

    /// Returns whether `v` was newly inserted. Panics if `v` is out of range.
    pub fn insert(&mut self, v: usize) -> bool {
        let fresh = !self.bits[v];
        if fresh {
            self.bits[v] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let present = self.contains(v);
        if present {
            self.bits[v] = false;
            self.len -= 1;
        }
        present
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_full(&self) -> bool {
        self.len == self.bits.len()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    pub fn complement(&self) -> VertexSet {
        let bits: Vec<bool> = self.bits.iter().map(|b| !b).collect();
        VertexSet {
            len: bits.len() - self.len,
            bits,
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Parses whitespace-separated `u v` lines. Blank lines and lines starting
/// with `c` or `#` are ignored; an optional `p [edge] <n> <m>` header fixes the
/// vertex count. Without a header, `n` is one more than the largest id.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut max_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('c') {
            continue;
        }
        let malformed = || ParseError::Malformed {
            line,
            text: raw.to_string(),
        };
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if header.is_some() || !edges.is_empty() {
                return Err(malformed());
            }
            let nums = match tokens.len() {
                3 => &tokens[1..],
                4 if tokens[1].chars().all(|c| c.is_ascii_alphabetic()) => &tokens[2..],
                _ => return Err(malformed()),
            };
            let n = parse_id(nums[0], line, malformed)?;
            let m = nums[1].parse::<usize>().map_err(|_| malformed())?;
            header = Some((n, m));
            continue;
        }
        let tokens = if tokens[0] == "e" { &tokens[1..] } else { &tokens[..] };
        if tokens.len() != 2 {
            return Err(malformed());
        }
        let u = parse_id(tokens[0], line, malformed)?;
        let v = parse_id(tokens[1], line, malformed)?;
        if let Some((n, _)) = header {
            for (id, tok) in [(u, tokens[0]), (v, tokens[1])] {
                if id >= n {
                    return Err(ParseError::IdOverflow {
                        line,
                        id: tok.to_string(),
                    });
                }
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, vertex: u });
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }

    let n = match header {
        Some((n, m)) => {
            if m != edges.len() {
                return Err(ParseError::EdgeCountMismatch {
                    declared: m,
                    found: edges.len(),
                });
            }
            n
        }
        None => max_id.map_or(0, |m| m + 1),
    };
    Ok(Graph::from_edges(n, edges).expect("parser validated the edge list"))
}

fn parse_id(tok: &str, line: usize, malformed: impl Fn() -> ParseError) -> Result<usize, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    match tok.parse::<u64>() {
        Ok(id) if id <= MAX_VERTEX_ID as u64 => Ok(id as usize),
        _ => Err(ParseError::IdOverflow {
            line,
            id: tok.to_string(),
        }),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::generators::{complete, cycle, h5, path, petersen};

    #[test]
    fn parses_path() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g, path(3));
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(
            parse_edge_list("0 0"),
            Err(ParseError::SelfLoop { line: 1, vertex: 0 })
        );
        assert_eq!(
            parse_edge_list("0 1\n1 0"),
            Err(ParseError::DuplicateEdge { line: 2, u: 1, v: 0 })
        );
        assert!(matches!(parse_edge_list("0 1 2"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 x"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(
            parse_edge_list("0 99999999999999"),
            Err(ParseError::IdOverflow { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("p 3 1\n0 3"),
            Err(ParseError::IdOverflow { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("p 3 2\n0 1"),
            Err(ParseError::EdgeCountMismatch { declared: 2, found: 1 })
        ));
    }

    #[test]
    fn header_fixes_vertex_count() {
        let g = parse_edge_list("c comment\np 5 1\n0 1\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.component_count(), 4);
        let g = parse_edge_list("p edge 3 1\ne 1 2\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 1));
    }

    #[test]
    fn h5_from_text() {
        // cycle v1..v5 (ids 0..4) with chords v2v4 and v3v5
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 0\n1 3\n2 4\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 7));
        assert_eq!(g, h5());
        assert_eq!(g.degree_profile().degrees, vec![2, 3, 3, 3, 3]);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.cyclomatic(), 3);
    }

    #[test]
    fn degree_profiles() {
        let single = Graph::empty(1);
        assert_eq!(single.degree_profile(), DegreeProfile { degrees: vec![0], max: 0 });
        assert_eq!(complete(4).degree_profile().degrees, vec![3; 4]);
    }

    #[test]
    fn components_and_cyclomatic() {
        let two_triangles = cycle(3).disjoint_union(&cycle(3));
        assert_eq!(two_triangles.component_count(), 2);
        assert_eq!(two_triangles.cyclomatic(), 2);
        assert_eq!(petersen().component_count(), 1);
        assert_eq!(Graph::empty(5).component_count(), 5);
        assert_eq!(path(7).cyclomatic(), 0);
        // cubic connected: n/2 + 1
        assert_eq!(petersen().cyclomatic(), 6);
        assert_eq!(complete(4).cyclomatic(), 3);
    }

    #[test]
    fn delete_vertices_cases() {
        let tri = cycle(3);
        let (g, remap) = tri.delete_vertices(&VertexSet::from_members(3, [1]).unwrap());
        assert_eq!(g, Graph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(remap.backward, vec![0, 2]);
        assert_eq!(remap.forward, vec![Some(0), None, Some(1)]);

        let (same, id) = tri.delete_vertices(&VertexSet::new(3));
        assert_eq!(same, tri);
        assert!(id.is_identity());

        let k4 = complete(4);
        let (tri2, _) = k4.delete_vertices(&VertexSet::from_members(4, [0]).unwrap());
        assert_eq!(k4.cyclomatic(), 3);
        assert_eq!(tri2.cyclomatic(), 1);
    }

    #[test]
    fn spanning_forest_cases() {
        let sf = cycle(3).spanning_forest();
        assert_eq!(sf.tree_edges.len(), 2);
        assert_eq!(sf.cycles.len(), 1);
        assert_eq!(sf.cycles[0].edges, vec![0, 1, 2]);

        assert!(path(6).spanning_forest().cycles.is_empty());

        let sf = complete(4).spanning_forest();
        assert_eq!(sf.tree_edges.len(), 3);
        assert_eq!(sf.cycles.len(), 3);
        assert!(sf.cycles.iter().all(|c| c.edges.len() == 3));
    }

    #[test]
    fn json_round_trip() {
        let g = petersen();
        let text = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::new(5);
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(1);
        assert_eq!(s.to_vec(), vec![1, 3]);
        assert_eq!(s.complement().to_vec(), vec![0, 2, 4]);
        assert!(VertexSet::from_members(3, [3]).is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
    }

    pub(crate) fn arb_graph(max_n: usize) -> impl proptest::strategy::Strategy<Value = Graph> {
        use proptest::prelude::*;
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    proptest::proptest! {
        #[test]
        fn json_round_trip_random(g in arb_graph(12)) {
            let text = serde_json::to_string(&g).unwrap();
            let back: Graph = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(back, g);
        }

        #[test]
        fn edge_list_round_trip(g in arb_graph(12)) {
            proptest::prop_assert_eq!(parse_edge_list(&g.to_edge_list()).unwrap(), g);
        }

        #[test]
        fn cyclomatic_zero_iff_acyclic(g in arb_graph(10)) {
            proptest::prop_assert_eq!(g.cyclomatic() == 0, !g.has_cycle());
            let forest = g.spanning_forest();
            proptest::prop_assert_eq!(forest.cycles.len(), g.cyclomatic());
        }
    }
}
