//! Reduction from 3-SAT to the existence of an irreversible 2-conversion set
//! of a given size in a graph of maximum degree 4.
//!
//! Layout of `G_F`:
//! - variable `i`: triangle `x_i y_i z_i`; `x_i` carries a path of positive
//!   outputs, one per occurrence of `X_i`, and `y_i` one of negative outputs.
//!   Every output has a pendant leaf.
//! - each literal occurrence: a one-way gadget from its output to the
//!   matching vertex of the clause spine `s1 s2 s3`; each spine vertex has a
//!   pendant leaf and `a_j = s1`.
//! - collecting path `v_1..v_m` (`v_j ~ a_j`, `v_1` has a leaf), then
//!   `v_m ~ u_1`, distributing path `u_1..u_n` with `u_i ~ z_i` and a leaf
//!   on every `u_i`.
//!
//! The target size is `s = |L| + n` where `L` is the set of leaves.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{find_conversion_set_of_size, ExactError, SearchLimits};
use crate::graph::{Graph, VertexSet};
use crate::percolation::{is_conversion_set, run};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line {text:?}")]
    MalformedHeader { line: usize, text: String },
    #[error("clause data before the problem line")]
    MissingHeader,
    #[error("line {line}: unexpected token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: clause {clause} has {found} literals, expected 3")]
    Arity { line: usize, clause: usize, found: usize },
    #[error("line {line}: variable {var} outside 1..={n}")]
    VariableOutOfRange { line: usize, var: usize, n: usize },
    #[error("problem line declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("formula has no clauses")]
    NoClauses,
    #[error("formula has no variables")]
    NoVariables,
    #[error("variable {0} occurs in no clause")]
    UnusedVariable(usize),
    #[error("literal {literal} in clause {clause} is out of range")]
    BadLiteral { clause: usize, literal: i32 },
    #[error("one-way gadget self-test failed: {0}")]
    OneWay(&'static str),
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A 3-CNF formula over variables `1..=n`; a literal is `+i` or `-i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<[i32; 3]>) -> Result<Self, SatError> {
        for (c, clause) in clauses.iter().enumerate() {
            for &l in clause {
                if l == 0 || l.unsigned_abs() as usize > n {
                    return Err(SatError::BadLiteral { clause: c, literal: l });
                }
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Number of occurrences of the literal `X_var` (positive) or `¬X_var`.
    pub fn occurrences(&self, var: usize, positive: bool) -> usize {
        let lit = if positive { var as i32 } else { -(var as i32) };
        self.clauses.iter().flatten().filter(|&&l| l == lit).count()
    }

    /// `assignment[i]` is the value of `X_{i+1}`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// First satisfying assignment in binary counting order.
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        (0u64..1 << self.n)
            .map(|mask| (0..self.n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.is_satisfied_by(a))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }
}

/// DIMACS CNF reader. Clauses may span lines; each must have exactly three
/// literals. Repeated literals inside a clause are kept.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            };
            match (parsed, header) {
                (Some(h), None) if clauses.is_empty() && current.is_empty() => header = Some(h),
                _ => {
                    return Err(DimacsError::MalformedHeader {
                        line,
                        text: t.to_string(),
                    })
                }
            }
            continue;
        }
        let (n, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in t.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                if current.len() != 3 {
                    return Err(DimacsError::Arity {
                        line,
                        clause: clauses.len() + 1,
                        found: current.len(),
                    });
                }
                clauses.push([current[0], current[1], current[2]]);
                current.clear();
            } else {
                let var = lit.unsigned_abs() as usize;
                if var > n {
                    return Err(DimacsError::VariableOutOfRange { line, var, n });
                }
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    let (n, m) = header.ok_or(DimacsError::MissingHeader)?;
    if m != clauses.len() {
        return Err(DimacsError::ClauseCount {
            declared: m,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula { n, clauses })
}

/// One-way gadget on local ids: start `u` = 0, end `v` = 1, internal
/// `w1..w4` = 2..=5, leaves on `w2`, `w3`, `w4` = 6..=8.
///
/// `w1 ~ u, w2, w3`; `w2, w3 ~ w1, w4`; `w4 ~ v`. Influence entering at `v`
/// reaches `w1` after three rounds; influence entering at `u` stops at
/// `w1`, which then has a single black neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneWayGadget {
    pub graph: Graph,
    pub start: usize,
    pub end: usize,
    pub internal: [usize; 4],
    pub leaves: [usize; 3],
}

const ONE_WAY_EDGES: [(usize, usize); 9] = [(0, 2), (2, 3), (2, 4), (3, 5), (4, 5), (5, 1), (3, 6), (4, 7), (5, 8)];

pub fn build_one_way() -> OneWayGadget {
    OneWayGadget {
        graph: Graph::from_edges(9, ONE_WAY_EDGES).expect("one-way gadget"),
        start: 0,
        end: 1,
        internal: [2, 3, 4, 5],
        leaves: [6, 7, 8],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OneWayReport {
    /// Round in which the start first has a black gadget neighbor, when the
    /// end and the leaves are seeded.
    pub forward_round: Option<usize>,
    /// Whether `w4` stays white when the start and the leaves are seeded.
    pub backward_blocked: bool,
}

impl OneWayGadget {
    pub fn check(&self) -> OneWayReport {
        let g = &self.graph;
        let seed = |first: usize| {
            VertexSet::from_members(g.n(), std::iter::once(first).chain(self.leaves)).expect("local ids")
        };
        let fwd = run(g, &seed(self.end), 2);
        let w1 = self.internal[0];
        let forward_round = fwd.conversion_round(w1);
        let back = run(g, &seed(self.start), 2);
        OneWayReport {
            forward_round,
            backward_blocked: !back.final_black.contains(self.internal[3]),
        }
    }
}

fn one_way_self_test() -> Result<(), SatError> {
    static RESULT: OnceLock<Result<(), SatError>> = OnceLock::new();
    RESULT
        .get_or_init(|| {
            let r = build_one_way().check();
            if r.forward_round != Some(3) {
                Err(SatError::OneWay("end does not reach the start in three rounds"))
            } else if !r.backward_blocked {
                Err(SatError::OneWay("influence leaks from start to end"))
            } else {
                Ok(())
            }
        })
        .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VertexRole {
    Leaf { of: usize },
    X { var: usize },
    Y { var: usize },
    Z { var: usize },
    Output { var: usize, positive: bool, index: usize },
    OneWay { clause: usize, position: usize, internal: usize },
    Spine { clause: usize, position: usize },
    Collecting { index: usize },
    Distributing { index: usize },
}

/// One literal occurrence: the output it reads from and the spine vertex it
/// feeds, joined by a one-way with internal vertices `w1..w4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Link {
    pub clause: usize,
    pub position: usize,
    pub output: usize,
    pub spine: usize,
    pub internal: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionOutput {
    #[serde(skip)]
    pub graph: Graph,
    pub s: usize,
    pub roles: Vec<VertexRole>,
    pub leaves: Vec<usize>,
    /// Per variable (0-based): `[x, y, z]`.
    pub triangles: Vec<[usize; 3]>,
    /// Per variable: positive and negative outputs, nearest the triangle first.
    pub antennas: Vec<[Vec<usize>; 2]>,
    pub spines: Vec<[usize; 3]>,
    pub links: Vec<Link>,
    pub collecting: Vec<usize>,
    pub distributing: Vec<usize>,
}

impl ReductionOutput {
    /// Leaves plus `x_i` for true and `y_i` for false variables.
    pub fn assignment_seed(&self, assignment: &[bool]) -> VertexSet {
        let picks = self
            .triangles
            .iter()
            .zip(assignment)
            .map(|(t, &val)| if val { t[0] } else { t[1] });
        VertexSet::from_members(self.graph.n(), self.leaves.iter().copied().chain(picks)).expect("ids in range")
    }

    pub fn a(&self, clause: usize) -> usize {
        self.spines[clause][0]
    }
}

#[derive(Default)]
struct Builder {
    roles: Vec<VertexRole>,
    edges: Vec<(usize, usize)>,
    leaves: Vec<usize>,
}

impl Builder {
    fn add(&mut self, role: VertexRole) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    fn leaf(&mut self, of: usize) -> usize {
        let l = self.add(VertexRole::Leaf { of });
        self.edges.push((of, l));
        self.leaves.push(l);
        l
    }
}

pub fn build_reduction(f: &CnfFormula) -> Result<ReductionOutput, SatError> {
    one_way_self_test()?;
    if f.n == 0 {
        return Err(SatError::NoVariables);
    }
    if f.m() == 0 {
        return Err(SatError::NoClauses);
    }
    if let Some(v) = (1..=f.n).find(|&v| f.occurrences(v, true) + f.occurrences(v, false) == 0) {
        return Err(SatError::UnusedVariable(v));
    }
    let mut b = Builder::default();

    let mut triangles = Vec::new();
    let mut antennas = Vec::new();
    for var in 0..f.n {
        let t = [
            b.add(VertexRole::X { var }),
            b.add(VertexRole::Y { var }),
            b.add(VertexRole::Z { var }),
        ];
        b.edges.extend([(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]);
        let mut pair: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (side, positive) in [(0, true), (1, false)] {
            let mut prev = t[side];
            for index in 0..f.occurrences(var + 1, positive) {
                let o = b.add(VertexRole::Output { var, positive, index });
                b.edges.push((prev, o));
                b.leaf(o);
                pair[side].push(o);
                prev = o;
            }
        }
        triangles.push(t);
        antennas.push(pair);
    }

    let gadget = build_one_way();
    let mut used = vec![[0usize; 2]; f.n];
    let mut spines = Vec::new();
    let mut links = Vec::new();
    for (clause, lits) in f.clauses.iter().enumerate() {
        let spine: [usize; 3] = std::array::from_fn(|position| b.add(VertexRole::Spine { clause, position }));
        b.edges.extend([(spine[0], spine[1]), (spine[1], spine[2])]);
        for (position, &lit) in lits.iter().enumerate() {
            b.leaf(spine[position]);
            let var = lit.unsigned_abs() as usize - 1;
            let side = usize::from(lit < 0);
            let output = antennas[var][side][used[var][side]];
            used[var][side] += 1;
            // the spine vertex is the start, the output the end
            let mut local = [0usize; 9];
            local[gadget.start] = spine[position];
            local[gadget.end] = output;
            for (j, &w) in gadget.internal.iter().enumerate() {
                local[w] = b.add(VertexRole::OneWay {
                    clause,
                    position,
                    internal: j + 1,
                });
            }
            for &l in &gadget.leaves {
                let owner = gadget.graph.neighbors(l)[0];
                local[l] = b.leaf(local[owner]);
            }
            b.edges.extend(
                gadget
                    .graph
                    .edges()
                    .iter()
                    .filter(|&&(p, q)| !gadget.leaves.contains(&p) && !gadget.leaves.contains(&q))
                    .map(|&(p, q)| (local[p], local[q])),
            );
            links.push(Link {
                clause,
                position,
                output,
                spine: spine[position],
                internal: std::array::from_fn(|j| local[gadget.internal[j]]),
            });
        }
        spines.push(spine);
    }

    let collecting: Vec<usize> = (0..f.m()).map(|index| b.add(VertexRole::Collecting { index })).collect();
    b.leaf(collecting[0]);
    for (j, &v) in collecting.iter().enumerate() {
        b.edges.push((v, spines[j][0]));
        if j > 0 {
            b.edges.push((collecting[j - 1], v));
        }
    }
    let distributing: Vec<usize> = (0..f.n).map(|index| b.add(VertexRole::Distributing { index })).collect();
    b.edges.push((collecting[f.m() - 1], distributing[0]));
    for (i, &u) in distributing.iter().enumerate() {
        b.leaf(u);
        b.edges.push((u, triangles[i][2]));
        if i > 0 {
            b.edges.push((distributing[i - 1], u));
        }
    }

    let graph = Graph::from_edges(b.roles.len(), b.edges).map_err(|e| SatError::Construction(e.to_string()))?;
    let out = ReductionOutput {
        s: b.leaves.len() + f.n,
        graph,
        roles: b.roles,
        leaves: b.leaves,
        triangles,
        antennas,
        spines,
        links,
        collecting,
        distributing,
    };
    check_structure(f, &out)?;
    Ok(out)
}

fn check_structure(f: &CnfFormula, out: &ReductionOutput) -> Result<(), SatError> {
    let g = &out.graph;
    let fail = |msg: String| Err(SatError::Construction(msg));
    if g.max_degree() > 4 {
        return fail(format!("maximum degree {}", g.max_degree()));
    }
    let degree_one: Vec<usize> = g.vertices().filter(|&v| g.degree(v) == 1).collect();
    let mut leaves = out.leaves.clone();
    leaves.sort_unstable();
    if degree_one != leaves {
        return fail("leaf list differs from the degree-1 vertices".into());
    }
    if leaves.len() != 15 * f.m() + f.n + 1 || out.s != leaves.len() + f.n {
        return fail(format!("|L| = {} for n = {}, m = {}", leaves.len(), f.n, f.m()));
    }
    for (var, [x, y, z]) in out.triangles.iter().copied().enumerate() {
        if !(g.has_edge(x, y) && g.has_edge(y, z) && g.has_edge(x, z)) {
            return fail(format!("triangle of variable {}", var + 1));
        }
        for (side, positive) in [(0, true), (1, false)] {
            if out.antennas[var][side].len() != f.occurrences(var + 1, positive) {
                return fail(format!("antenna length of variable {}", var + 1));
            }
        }
    }
    for link in &out.links {
        let lit = f.clauses[link.clause][link.position];
        let want = match out.roles[link.output] {
            VertexRole::Output { var, positive, .. } => var + 1 == lit.unsigned_abs() as usize && positive == (lit > 0),
            _ => false,
        };
        let [w1, _, _, w4] = link.internal;
        if !want || !g.has_edge(link.spine, w1) || !g.has_edge(link.output, w4) {
            return fail(format!("link for clause {} position {}", link.clause, link.position));
        }
    }
    if out.collecting.iter().enumerate().any(|(j, &v)| !g.has_edge(v, out.a(j))) {
        return fail("collecting path wiring".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub m: usize,
    pub vertices: usize,
    pub s: usize,
    pub satisfiable: bool,
    pub assignment: Option<Vec<bool>>,
    pub conversion_set_exists: bool,
    pub witness: Option<Vec<usize>>,
    /// Whether the seed built from the satisfying assignment percolates.
    pub assignment_seed_percolates: Option<bool>,
    pub agrees: bool,
}

/// Compares satisfiability of `f` with the existence of a 2-conversion set
/// of size `s` in `G_F`, the latter by exhaustive search within `limits`.
pub fn check_equivalence(f: &CnfFormula, limits: SearchLimits) -> Result<EquivalenceReport, SatError> {
    let out = build_reduction(f)?;
    let assignment = f.satisfying_assignment();
    let witness = find_conversion_set_of_size(&out.graph, 2, out.s, limits)?;
    let seed_ok = assignment
        .as_ref()
        .map(|a| is_conversion_set(&out.graph, &out.assignment_seed(a), 2));
    let satisfiable = assignment.is_some();
    let exists = witness.is_some();
    Ok(EquivalenceReport {
        n: f.n,
        m: f.m(),
        vertices: out.graph.n(),
        s: out.s,
        satisfiable,
        agrees: satisfiable == exists && seed_ok.unwrap_or(true),
        assignment,
        conversion_set_exists: exists,
        witness: witness.map(|w| w.to_vec()),
        assignment_seed_percolates: seed_ok,
    })
}

/// All formulas with `n` variables and `m` clauses, every variable used,
/// one representative per orbit under renaming variables, flipping their
/// signs, and reordering literals and clauses.
pub fn formulas_up_to_symmetry(n: usize, m: usize) -> Vec<CnfFormula> {
    let lits: Vec<i32> = (1..=n as i32).flat_map(|v| [v, -v]).collect();
    let mut clause_set = Vec::new();
    for i in 0..lits.len() {
        for j in i..lits.len() {
            for k in j..lits.len() {
                clause_set.push([lits[i], lits[j], lits[k]]);
            }
        }
    }
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let clauses: Vec<[i32; 3]> = idx.iter().map(|&c| clause_set[c]).collect();
        let f = CnfFormula { n, clauses };
        if (1..=n).all(|v| f.occurrences(v, true) + f.occurrences(v, false) > 0) {
            let fr = &f;
            let canon = perms
                .iter()
                .flat_map(|p| (0u32..1 << n).map(move |flip| normalize(fr, p, flip)))
                .min()
                .expect("at least one transform");
            if seen.insert(canon) {
                out.push(f);
            }
        }
        // next nondecreasing index tuple
        let mut j = m;
        loop {
            if j == 0 {
                break 'outer;
            }
            j -= 1;
            if idx[j] + 1 < clause_set.len() {
                idx[j] += 1;
                for t in j + 1..m {
                    idx[t] = idx[j];
                }
                break;
            }
        }
    }
    out
}

fn normalize(f: &CnfFormula, perm: &[usize], flip: u32) -> Vec<[i32; 3]> {
    let mut cs: Vec<[i32; 3]> = f
        .clauses
        .iter()
        .map(|c| {
            let mut c = c.map(|l| {
                let v = l.unsigned_abs() as usize - 1;
                let sign = if (l > 0) ^ (flip >> v & 1 == 1) { 1 } else { -1 };
                sign * (perm[v] as i32 + 1)
            });
            c.sort_unstable();
            c
        })
        .collect();
    cs.sort_unstable();
    cs
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CnfFormula {
        parse_dimacs("p cnf 2 1\n1 -1 -2 0\n").unwrap()
    }

    #[test]
    fn dimacs_examples() {
        let f = example();
        assert_eq!((f.n, f.clauses.clone()), (2, vec![[1, -1, -2]]));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 -2 0\n"), Err(DimacsError::Arity { found: 2, .. })));
        assert_eq!(parse_dimacs("p cnf 3 0\n").unwrap().m(), 0);
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), Err(DimacsError::VariableOutOfRange { var: 3, .. })));
        assert!(matches!(parse_dimacs("1 2 3 0\n"), Err(DimacsError::MissingHeader)));
        assert!(matches!(parse_dimacs("p cnf x 1\n"), Err(DimacsError::MalformedHeader { .. })));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 2 -1 0\n"), Err(DimacsError::ClauseCount { .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(DimacsError::Unterminated)));
        let split = parse_dimacs("c hi\np cnf 3 2\n1 2\n3 0 -1 -2 -3\n0\n").unwrap();
        assert_eq!(split.clauses, vec![[1, 2, 3], [-1, -2, -3]]);
        assert_eq!(parse_dimacs(&split.to_dimacs()).unwrap(), split);
    }

    #[test]
    fn one_way_properties() {
        let r = build_one_way().check();
        assert_eq!(r.forward_round, Some(3));
        assert!(r.backward_blocked);
        assert!(build_one_way().graph.max_degree() <= 4);
    }

    #[test]
    fn example_reduction_shape() {
        let f = example();
        let out = build_reduction(&f).unwrap();
        assert_eq!(out.antennas[0][0].len(), 1);
        assert_eq!(out.antennas[0][1].len(), 1);
        assert_eq!(out.antennas[1][0].len(), 0);
        assert_eq!(out.antennas[1][1].len(), 1);
        assert_eq!(out.leaves.len(), 15 + 2 + 1);
        assert_eq!(out.s, 15 + 4 + 1);
        assert_eq!(out.graph.max_degree(), 4);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(build_reduction(&parse_dimacs("p cnf 1 0\n").unwrap()), Err(SatError::NoClauses));
        let unused = CnfFormula::new(3, vec![[1, 2, -1]]).unwrap();
        assert_eq!(build_reduction(&unused), Err(SatError::UnusedVariable(3)));
        assert!(CnfFormula::new(1, vec![[1, 2, 1]]).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let r = check_equivalence(&example(), SearchLimits::unlimited()).unwrap();
        assert!(r.satisfiable && r.conversion_set_exists && r.agrees);
        assert_eq!(r.assignment_seed_percolates, Some(true));
        let unsat = CnfFormula::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
        let r = check_equivalence(&unsat, SearchLimits::unlimited()).unwrap();
        assert!(!r.satisfiable && !r.conversion_set_exists && r.agrees);
    }

    #[test]
    fn missing_leaf_never_percolates() {
        let f = example();
        let out = build_reduction(&f).unwrap();
        let full = out.assignment_seed(&[true, true]);
        assert!(is_conversion_set(&out.graph, &full, 2));
        for &l in &out.leaves {
            let mut s = VertexSet::full(out.graph.n());
            s.remove(l);
            assert!(!is_conversion_set(&out.graph, &s, 2));
        }
    }

    #[test]
    fn symmetry_classes_small() {
        // one variable, one clause: X X X, X X ¬X (up to sign flip)
        assert_eq!(formulas_up_to_symmetry(1, 1).len(), 2);
        let two = formulas_up_to_symmetry(2, 1);
        assert!(two.iter().all(|f| f.m() == 1));
        assert!(!two.is_empty());
    }

    fn arb_formula() -> impl proptest::strategy::Strategy<Value = CnfFormula> {
        use proptest::prelude::*;
        (1usize..5).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            proptest::collection::vec([lit.clone(), lit.clone(), lit], 1..5).prop_filter_map("every variable used", move |clauses| {
                let f = CnfFormula::new(n, clauses).ok()?;
                (1..=n).all(|v| f.occurrences(v, true) + f.occurrences(v, false) > 0).then_some(f)
            })
        })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn dimacs_round_trip(f in arb_formula()) {
            proptest::prop_assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
        }

        #[test]
        fn reduction_shape(f in arb_formula()) {
            let out = build_reduction(&f).unwrap();
            let g = &out.graph;
            proptest::prop_assert!(g.max_degree() <= 4);
            proptest::prop_assert_eq!(out.leaves.len(), 15 * f.m() + f.n + 1);
            proptest::prop_assert_eq!(out.s, out.leaves.len() + f.n);
            proptest::prop_assert!(out.leaves.iter().all(|&l| g.degree(l) == 1));
            proptest::prop_assert_eq!(g.vertices().filter(|&v| g.degree(v) == 1).count(), out.leaves.len());
            for v in 0..f.n {
                proptest::prop_assert_eq!(out.antennas[v][0].len(), f.occurrences(v + 1, true));
                proptest::prop_assert_eq!(out.antennas[v][1].len(), f.occurrences(v + 1, false));
            }
            if let Some(a) = f.satisfying_assignment() {
                proptest::prop_assert!(is_conversion_set(g, &out.assignment_seed(&a), 2));
            }
        }
    }
}
