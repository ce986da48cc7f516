//! Irreversible 3-conversion sets on toroidal grids `T(m, n) = C_m □ C_n`.
//!
//! Cell `[x, y]` (`0 <= x < m`, `0 <= y < n`) is vertex `y * m + x`; `[0, 0]`
//! is the bottom left corner. Seeds are assembled from small rectangular
//! patterns. Placing a pattern at `[i, j]` puts its bottom left cell there and
//! colors black every cell that is black in the pattern; cells already black
//! stay black.
//!
//! General case (`m, n != 4`): `m = 3k + a`, `n = 3l + b`, `a, b ∈ {0, 2, 4}`,
//! `g = gcd(k, l)`. The `3k × 3l` block is tiled with the base tile, except
//! that the merge tile sits at `[0, 3i]` for `i < g - 1`. The base tiling
//! leaves `g` white cycles and each merge tile joins two of them, so one
//! cycle remains. The leftover strips of width or height `a`, `b` get their
//! own patterns. Cases (A)-(C) add one black cell to break the last cycle.
//!
//! Case `n = 4`: `m = 2k + a`, `a ∈ {1, 2}`; a `2 × 4` tile repeated `k` times
//! plus a `2 × 4` cap at `[2k - 1, 0]` (`a = 1`, overlapping the last tile
//! column) or at `[2k, 0]` (`a = 2`).
//!
//! The bitmaps are data files produced by [`search_tile_patterns`].

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::percolation::{run, Spreader};

/// Environment variable naming a directory of `.pat` files that replace the
/// built-in patterns.
pub const PATTERN_DIR_ENV: &str = "CONVSET_PATTERN_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("T({m},{n}): both dimensions must be at least 3")]
    TooSmall { m: usize, n: usize },
    #[error("pattern {name}: {detail}")]
    BadPattern { name: String, detail: String },
    #[error("no pattern named {0}")]
    MissingPattern(String),
    #[error("cannot tile a {w}x{h} rectangle with the {pw}x{ph} pattern {name}")]
    NotDivisible { name: String, w: usize, h: usize, pw: usize, ph: usize },
    #[error("T({m},{n}): seed of size {size} does not percolate")]
    NotPercolating { m: usize, n: usize, size: usize },
    #[error("T({m},{n}): seed has {size} cells, expected {expected}")]
    SizeMismatch { m: usize, n: usize, size: usize, expected: usize },
    #[error("pattern search exhausted at stage {0}")]
    SearchExhausted(&'static str),
    #[error("reading pattern {path}: {detail}")]
    Io { path: String, detail: String },
}

/// Names of the pattern files, in the order the search fills them.
pub const PATTERN_NAMES: [&str; 12] = [
    "base", "merge", "strip_b", "strip_c", "strip_d", "corner_d", "corner_e", "strip_f", "corner_f", "n4_tile", "n4_cap_a1",
    "n4_cap_a2",
];

const EMBEDDED: [(&str, &str); 12] = [
    ("base", include_str!("../patterns/base.pat")),
    ("merge", include_str!("../patterns/merge.pat")),
    ("strip_b", include_str!("../patterns/strip_b.pat")),
    ("strip_c", include_str!("../patterns/strip_c.pat")),
    ("strip_d", include_str!("../patterns/strip_d.pat")),
    ("corner_d", include_str!("../patterns/corner_d.pat")),
    ("corner_e", include_str!("../patterns/corner_e.pat")),
    ("strip_f", include_str!("../patterns/strip_f.pat")),
    ("corner_f", include_str!("../patterns/corner_f.pat")),
    ("n4_tile", include_str!("../patterns/n4_tile.pat")),
    ("n4_cap_a1", include_str!("../patterns/n4_cap_a1.pat")),
    ("n4_cap_a2", include_str!("../patterns/n4_cap_a2.pat")),
];

/// Required `(width, height)` of each pattern.
fn expected_shape(name: &str) -> Option<(usize, usize)> {
    Some(match name {
        "base" | "merge" => (3, 3),
        "strip_b" => (3, 2),
        "strip_c" => (3, 4),
        "strip_d" => (2, 3),
        "corner_d" => (2, 2),
        "corner_e" | "n4_tile" | "n4_cap_a1" | "n4_cap_a2" => (2, 4),
        "strip_f" => (4, 3),
        "corner_f" => (4, 4),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPattern {
    pub name: String,
    pub width: usize,
    pub height: usize,
    /// Row-major from the bottom row: `cells[y * width + x]`.
    cells: Vec<bool>,
}

impl TorusPattern {
    pub fn from_cells(name: &str, width: usize, height: usize, cells: Vec<bool>) -> Result<Self, TorusError> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(TorusError::BadPattern {
                name: name.to_string(),
                detail: format!("{} cells do not fill {width}x{height}", cells.len()),
            });
        }
        Ok(TorusPattern {
            name: name.to_string(),
            width,
            height,
            cells,
        })
    }

    /// ASCII art: `#` black, `.` white, the last line is the bottom row.
    /// Blank lines and lines starting with `;` are skipped.
    pub fn parse(name: &str, text: &str) -> Result<Self, TorusError> {
        let bad = |detail: String| TorusError::BadPattern {
            name: name.to_string(),
            detail,
        };
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with(';'))
            .collect();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::new();
        for (i, row) in rows.iter().rev().enumerate() {
            if row.chars().count() != width {
                return Err(bad(format!("row {} has a different width", rows.len() - i)));
            }
            for c in row.chars() {
                match c {
                    '#' => cells.push(true),
                    '.' => cells.push(false),
                    _ => return Err(bad(format!("unexpected character {c:?}"))),
                }
            }
        }
        TorusPattern::from_cells(name, width, rows.len(), cells)
    }

    pub fn is_black(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn black_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for y in (0..self.height).rev() {
            for x in 0..self.width {
                out.push(if self.is_black(x, y) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: BTreeMap<String, TorusPattern>,
}

impl PatternSet {
    pub fn empty() -> Self {
        PatternSet {
            patterns: BTreeMap::new(),
        }
    }

    /// The patterns compiled into the crate.
    pub fn builtin() -> Self {
        let mut set = PatternSet::empty();
        for (name, text) in EMBEDDED {
            set.insert(TorusPattern::parse(name, text).expect("built-in pattern parses"))
                .expect("built-in pattern has the right shape");
        }
        set
    }

    /// Built-in patterns, with any `<name>.pat` found in `dir` taking
    /// precedence.
    pub fn load_dir(dir: &Path) -> Result<Self, TorusError> {
        let mut set = PatternSet::builtin();
        for name in PATTERN_NAMES {
            let path = dir.join(format!("{name}.pat"));
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| TorusError::Io {
                    path: path.display().to_string(),
                    detail: e.to_string(),
                })?;
                set.insert(TorusPattern::parse(name, &text)?)?;
            }
        }
        Ok(set)
    }

    /// Honors [`PATTERN_DIR_ENV`] when set.
    pub fn from_env() -> Result<Self, TorusError> {
        match std::env::var_os(PATTERN_DIR_ENV) {
            Some(dir) => PatternSet::load_dir(Path::new(&dir)),
            None => Ok(PatternSet::builtin()),
        }
    }

    pub fn insert(&mut self, p: TorusPattern) -> Result<(), TorusError> {
        if let Some(shape) = expected_shape(&p.name) {
            if shape != (p.width, p.height) {
                return Err(TorusError::BadPattern {
                    name: p.name.clone(),
                    detail: format!("expected {}x{}, found {}x{}", shape.0, shape.1, p.width, p.height),
                });
            }
        }
        self.patterns.insert(p.name.clone(), p);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&TorusPattern, TorusError> {
        self.patterns
            .get(name)
            .ok_or_else(|| TorusError::MissingPattern(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &TorusPattern> {
        self.patterns.values()
    }

    /// Writes one `<name>.pat` file per pattern.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for p in self.patterns.values() {
            std::fs::write(dir.join(format!("{}.pat", p.name)), p.to_text())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    pub m: usize,
    pub n: usize,
}

impl TorusGrid {
    pub fn new(m: usize, n: usize) -> Result<Self, TorusError> {
        if m < 3 || n < 3 {
            return Err(TorusError::TooSmall { m, n });
        }
        Ok(TorusGrid { m, n })
    }

    pub fn id(&self, x: usize, y: usize) -> usize {
        (y % self.n) * self.m + x % self.m
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.m, v / self.m)
    }

    pub fn graph(&self) -> Graph {
        let mut edges = Vec::with_capacity(2 * self.m * self.n);
        for y in 0..self.n {
            for x in 0..self.m {
                edges.push((self.id(x, y), self.id(x + 1, y)));
                edges.push((self.id(x, y), self.id(x, y + 1)));
            }
        }
        Graph::from_edges(self.m * self.n, edges).expect("a torus with m, n >= 3 is simple")
    }
}

/// Black/white coloring of a torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridState {
    pub grid: TorusGrid,
    black: Vec<bool>,
}

impl GridState {
    pub fn new(grid: TorusGrid) -> Self {
        GridState {
            black: vec![false; grid.m * grid.n],
            grid,
        }
    }

    pub fn is_black(&self, x: usize, y: usize) -> bool {
        self.black[self.grid.id(x, y)]
    }

    pub fn set_black(&mut self, x: usize, y: usize) {
        let id = self.grid.id(x, y);
        self.black[id] = true;
    }

    pub fn place(&mut self, p: &TorusPattern, i: usize, j: usize) {
        for y in 0..p.height {
            for x in 0..p.width {
                if p.is_black(x, y) {
                    self.set_black(i + x, j + y);
                }
            }
        }
    }

    /// Tiles the `w × h` rectangle with bottom left cell `[x0, y0]`;
    /// returns the number of copies placed.
    pub fn tile(&mut self, p: &TorusPattern, x0: usize, y0: usize, w: usize, h: usize) -> Result<usize, TorusError> {
        if w % p.width != 0 || h % p.height != 0 {
            return Err(TorusError::NotDivisible {
                name: p.name.clone(),
                w,
                h,
                pw: p.width,
                ph: p.height,
            });
        }
        for ty in 0..h / p.height {
            for tx in 0..w / p.width {
                self.place(p, x0 + tx * p.width, y0 + ty * p.height);
            }
        }
        Ok((w / p.width) * (h / p.height))
    }

    pub fn black_count(&self) -> usize {
        self.black.iter().filter(|&&b| b).count()
    }

    pub fn seed(&self) -> VertexSet {
        VertexSet::from_members(self.black.len(), (0..self.black.len()).filter(|&v| self.black[v])).expect("ids")
    }

    pub fn black_cells(&self) -> Vec<[usize; 2]> {
        (0..self.black.len())
            .filter(|&v| self.black[v])
            .map(|v| {
                let (x, y) = self.grid.coords(v);
                [x, y]
            })
            .collect()
    }

    /// ASCII art with the top row first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for y in (0..self.grid.n).rev() {
            for x in 0..self.grid.m {
                out.push(if self.is_black(x, y) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    fn transposed(&self) -> GridState {
        let t = TorusGrid {
            m: self.grid.n,
            n: self.grid.m,
        };
        let mut out = GridState::new(t);
        for y in 0..self.grid.n {
            for x in 0..self.grid.m {
                if self.is_black(x, y) {
                    out.set_black(y, x);
                }
            }
        }
        out
    }

    pub fn percolates(&self) -> bool {
        let g = self.grid.graph();
        Spreader::new(&g, 3).percolates(self.seed().iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorusCase {
    A,
    B,
    C,
    D,
    E,
    F,
    N4A1,
    N4A2,
}

/// How `T(m, n)` was decomposed. When `transposed` is set the construction
/// was built on `T(n, m)` and reflected; `k, l, a, b` describe that build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CaseParams {
    pub case: TorusCase,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub a: usize,
    pub b: usize,
    pub g: usize,
    pub transposed: bool,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn split3(m: usize) -> (usize, usize) {
    let a = [0, 4, 2][m % 3];
    ((m - a) / 3, a)
}

impl CaseParams {
    pub fn for_size(m: usize, n: usize) -> Result<Self, TorusError> {
        TorusGrid::new(m, n)?;
        if m == 4 || n == 4 {
            let (mm, transposed) = if n == 4 { (m, false) } else { (n, true) };
            let a = if mm % 2 == 1 { 1 } else { 2 };
            return Ok(CaseParams {
                case: if a == 1 { TorusCase::N4A1 } else { TorusCase::N4A2 },
                m,
                n,
                k: (mm - a) / 2,
                l: 0,
                a,
                b: 0,
                g: 1,
                transposed,
            });
        }
        let ((k, a), (l, b)) = (split3(m), split3(n));
        let transposed = a > b;
        let (k, a, l, b) = if transposed { (l, b, k, a) } else { (k, a, l, b) };
        let case = match (a, b) {
            (0, 0) => TorusCase::A,
            (0, 2) => TorusCase::B,
            (0, 4) => TorusCase::C,
            (2, 2) => TorusCase::D,
            (2, 4) => TorusCase::E,
            _ => TorusCase::F,
        };
        Ok(CaseParams {
            case,
            m,
            n,
            k,
            l,
            a,
            b,
            g: gcd(k, l),
            transposed,
        })
    }

    /// Exact seed size for the general cases; `None` for `n = 4`.
    pub fn expected_size(&self) -> Option<usize> {
        let mn = self.m * self.n;
        match self.case {
            TorusCase::A | TorusCase::B | TorusCase::C => Some((mn + 3) / 3),
            TorusCase::D | TorusCase::F => Some((mn + 2) / 3),
            TorusCase::E => Some((mn + 4) / 3),
            TorusCase::N4A1 | TorusCase::N4A2 => None,
        }
    }

    /// The stated upper bound: `(mn + 4) / 3` in general and
    /// `(3mn + 4) / 8` when a side is 4, rounded down.
    pub fn bound(&self) -> usize {
        let mn = self.m * self.n;
        match self.case {
            TorusCase::N4A1 | TorusCase::N4A2 => (3 * mn + 4) / 8,
            _ => (mn + 4) / 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusConstruction {
    pub params: CaseParams,
    pub state: GridState,
    /// The extra cell added in cases (A)-(C).
    pub extra: Option<[usize; 2]>,
}

impl TorusConstruction {
    pub fn size(&self) -> usize {
        self.state.black_count()
    }
}

/// Seed layout before the extra cell, on the (possibly transposed) build grid.
fn layout(p: &CaseParams, set: &PatternSet) -> Result<GridState, TorusError> {
    let (bm, bn) = if p.transposed { (p.n, p.m) } else { (p.m, p.n) };
    let mut s = GridState::new(TorusGrid { m: bm, n: bn });
    if matches!(p.case, TorusCase::N4A1 | TorusCase::N4A2) {
        s.tile(set.get("n4_tile")?, 0, 0, 2 * p.k, 4)?;
        if p.a == 1 {
            s.place(set.get("n4_cap_a1")?, 2 * p.k - 1, 0);
        } else {
            s.place(set.get("n4_cap_a2")?, 2 * p.k, 0);
        }
        return Ok(s);
    }
    let (k, l) = (p.k, p.l);
    let base = set.get("base")?;
    let merge = set.get("merge")?;
    for ty in 0..l {
        for tx in 0..k {
            let pat = if tx == 0 && ty + 1 < p.g { merge } else { base };
            s.place(pat, 3 * tx, 3 * ty);
        }
    }
    match p.case {
        TorusCase::A => {}
        TorusCase::B => {
            s.tile(set.get("strip_b")?, 0, 3 * l, 3 * k, 2)?;
        }
        TorusCase::C => {
            s.tile(set.get("strip_c")?, 0, 3 * l, 3 * k, 4)?;
        }
        TorusCase::D => {
            s.tile(set.get("strip_b")?, 0, 3 * l, 3 * k, 2)?;
            s.tile(set.get("strip_d")?, 3 * k, 0, 2, 3 * l)?;
            s.place(set.get("corner_d")?, 3 * k, 3 * l);
        }
        TorusCase::E => {
            s.tile(set.get("strip_c")?, 0, 3 * l, 3 * k, 4)?;
            s.tile(set.get("strip_d")?, 3 * k, 0, 2, 3 * l)?;
            s.place(set.get("corner_e")?, 3 * k, 3 * l);
        }
        TorusCase::F => {
            s.tile(set.get("strip_c")?, 0, 3 * l, 3 * k, 4)?;
            s.tile(set.get("strip_f")?, 3 * k, 0, 4, 3 * l)?;
            s.place(set.get("corner_f")?, 3 * k, 3 * l);
        }
        TorusCase::N4A1 | TorusCase::N4A2 => unreachable!(),
    }
    Ok(s)
}

/// Builds the seed for `T(m, n)` from `set` and checks that it percolates
/// and meets the size formula of its case.
pub fn construct_with(m: usize, n: usize, set: &PatternSet) -> Result<TorusConstruction, TorusError> {
    let params = CaseParams::for_size(m, n)?;
    let base = layout(&params, set)?;
    let extras: Vec<Option<[usize; 2]>> = match params.case {
        TorusCase::A | TorusCase::B | TorusCase::C => vec![Some([0, 0]), Some([1, 1])],
        _ => vec![None],
    };
    let mut last_size = base.black_count();
    for extra in extras {
        let mut s = base.clone();
        if let Some([x, y]) = extra {
            s.set_black(x, y);
        }
        let state = if params.transposed { s.transposed() } else { s };
        last_size = state.black_count();
        if let Some(expected) = params.expected_size() {
            if last_size != expected {
                return Err(TorusError::SizeMismatch {
                    m,
                    n,
                    size: last_size,
                    expected,
                });
            }
        } else if last_size > params.bound() {
            return Err(TorusError::SizeMismatch {
                m,
                n,
                size: last_size,
                expected: params.bound(),
            });
        }
        if state.percolates() {
            let extra = extra.map(|[x, y]| if params.transposed { [y, x] } else { [x, y] });
            return Ok(TorusConstruction { params, state, extra });
        }
    }
    Err(TorusError::NotPercolating { m, n, size: last_size })
}

/// [`construct_with`] using the patterns from [`PatternSet::from_env`].
pub fn construct_3cs(m: usize, n: usize) -> Result<TorusConstruction, TorusError> {
    construct_with(m, n, &PatternSet::from_env()?)
}

/// Connected components of the cells that stay white when the process with
/// threshold 3 is run from the black cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WhiteCycles {
    pub components: Vec<Vec<[usize; 2]>>,
    /// Every component is a simple cycle (each cell has exactly two white
    /// neighbors inside it).
    pub all_simple: bool,
}

impl WhiteCycles {
    pub fn count(&self) -> usize {
        self.components.len()
    }
}

pub fn white_cycle_structure(state: &GridState) -> WhiteCycles {
    let g = state.grid.graph();
    let trace = run(&g, &state.seed(), 3);
    let white = trace.final_black.complement();
    let keep = white.to_vec();
    let (h, remap) = g.induced(&keep);
    let components: Vec<Vec<[usize; 2]>> = h
        .components()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|v| {
                    let (x, y) = state.grid.coords(remap.backward[v]);
                    [x, y]
                })
                .collect()
        })
        .collect();
    WhiteCycles {
        all_simple: h.vertices().all(|v| h.degree(v) == 2),
        components,
    }
}

/// Knobs of the pattern search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Black cells per 3×3 tile.
    pub tile_blacks: usize,
    /// Black cells per 2×4 tile in the `n = 4` case.
    pub n4_blacks: usize,
    /// Test battery uses `k, l` in `1..=max_k`.
    pub max_k: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tile_blacks: 3,
            n4_blacks: 3,
            max_k: 4,
        }
    }
}

/// All patterns of the given shape with exactly `blacks` black cells, in
/// lexicographic order of their cell masks.
fn patterns_with(name: &str, w: usize, h: usize, blacks: usize) -> Vec<TorusPattern> {
    let cells = w * h;
    (0u32..1 << cells)
        .filter(|m| m.count_ones() as usize == blacks)
        .map(|mask| {
            let c = (0..cells).map(|i| mask >> i & 1 == 1).collect();
            TorusPattern::from_cells(name, w, h, c).expect("shape")
        })
        .collect()
}

fn battery(cfg: &SearchConfig, a: usize, b: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 1..=cfg.max_k {
        for l in 1..=cfg.max_k {
            out.push((3 * k + a, 3 * l + b));
        }
    }
    out
}

fn passes(set: &PatternSet, sizes: &[(usize, usize)]) -> bool {
    sizes.iter().all(|&(m, n)| construct_with(m, n, set).is_ok())
}

/// First candidate (in order) that, added to `set`, passes every size.
fn first_fit(set: &PatternSet, candidates: Vec<TorusPattern>, sizes: &[(usize, usize)]) -> Option<PatternSet> {
    candidates.into_par_iter().find_map_first(|p| {
        let mut s = set.clone();
        s.insert(p).ok()?;
        passes(&s, sizes).then_some(s)
    })
}

/// Base tiles whose tiling of `T(3k, 3l)` leaves exactly `gcd(k, l)`
/// disjoint white cycles for every `k, l <= max_k`.
pub fn base_tile_candidates(blacks: usize, max_k: usize) -> Vec<TorusPattern> {
    patterns_with("base", 3, 3, blacks)
        .into_par_iter()
        .filter(|p| {
            (1..=max_k).all(|k| {
                (1..=max_k).all(|l| {
                    let mut s = GridState::new(TorusGrid { m: 3 * k, n: 3 * l });
                    s.tile(p, 0, 0, 3 * k, 3 * l).expect("divisible");
                    let w = white_cycle_structure(&s);
                    w.all_simple && w.count() == gcd(k, l)
                })
            })
        })
        .collect()
}

/// One search stage: the patterns it fixes and the case that tests them.
struct Stage {
    label: &'static str,
    patterns: &'static [(&'static str, usize, usize, usize)],
    case: (usize, usize),
}

// strips and corners carry the density 1/3 implied by the size formulas
const STAGES: [Stage; 6] = [
    Stage { label: "base and merge tiles", patterns: &[("merge", 3, 3, 3)], case: (0, 0) },
    Stage { label: "strip_b", patterns: &[("strip_b", 3, 2, 2)], case: (0, 2) },
    Stage { label: "strip_c", patterns: &[("strip_c", 3, 4, 4)], case: (0, 4) },
    Stage { label: "strip_d", patterns: &[("strip_d", 2, 3, 2), ("corner_d", 2, 2, 2)], case: (2, 2) },
    Stage { label: "corner_e", patterns: &[("corner_e", 2, 4, 4)], case: (2, 4) },
    Stage { label: "strip_f", patterns: &[("strip_f", 4, 3, 4), ("corner_f", 4, 4, 6)], case: (4, 4) },
];

/// Exhaustive depth-first search for a complete pattern set: base and merge
/// tiles against case (A), then each strip and corner against the first
/// case that uses it, backtracking when a later case admits no candidate.
/// Candidates are tried in lexicographic order, so the result is fixed.
pub fn search_tile_patterns(cfg: &SearchConfig) -> Result<PatternSet, TorusError> {
    let deepest = AtomicUsize::new(0);
    let found = base_tile_candidates(cfg.tile_blacks, cfg.max_k).into_iter().find_map(|base| {
        let mut s = PatternSet::empty();
        s.insert(base).ok()?;
        search_stage(cfg, 0, s, &deepest)
    });
    let set = found.ok_or_else(|| TorusError::SearchExhausted(STAGES[deepest.load(Ordering::Relaxed)].label))?;
    search_n4(cfg, set)
}

fn search_stage(cfg: &SearchConfig, depth: usize, set: PatternSet, deepest: &AtomicUsize) -> Option<PatternSet> {
    let Some(stage) = STAGES.get(depth) else {
        return Some(set);
    };
    deepest.fetch_max(depth, Ordering::Relaxed);
    let sizes = battery(cfg, stage.case.0, stage.case.1);
    let blacks = |b: usize| if depth == 0 { cfg.tile_blacks } else { b };
    let combos: Vec<Vec<TorusPattern>> = stage.patterns.iter().fold(vec![Vec::new()], |acc, &(name, w, h, b)| {
        let options = patterns_with(name, w, h, blacks(b));
        acc.into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |p| {
                    let mut c = prefix.clone();
                    c.push(p.clone());
                    c
                })
            })
            .collect()
    });
    let passing: Vec<PatternSet> = combos
        .into_par_iter()
        .filter_map(|combo| {
            let mut s = set.clone();
            combo.into_iter().try_for_each(|p| s.insert(p)).ok()?;
            passes(&s, &sizes).then_some(s)
        })
        .collect();
    passing.into_iter().find_map(|s| search_stage(cfg, depth + 1, s, deepest))
}

fn search_n4(cfg: &SearchConfig, set: PatternSet) -> Result<PatternSet, TorusError> {
    let ks = 1..=2 * cfg.max_k;
    let a2: Vec<(usize, usize)> = ks.clone().map(|k| (2 * k + 2, 4)).collect();
    let a1: Vec<(usize, usize)> = ks.map(|k| (2 * k + 1, 4)).collect();
    let caps = |name: &str| -> Vec<TorusPattern> { (0..=cfg.n4_blacks).flat_map(|b| patterns_with(name, 2, 4, b)).collect() };
    patterns_with("n4_tile", 2, 4, cfg.n4_blacks)
        .into_iter()
        .find_map(|tile| {
            let mut s = set.clone();
            s.insert(tile).ok()?;
            let s = first_fit(&s, caps("n4_cap_a2"), &a2)?;
            first_fit(&s, caps("n4_cap_a1"), &a1)
        })
        .ok_or(TorusError::SearchExhausted("n = 4 tiles"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(name: &str, text: &str) -> TorusPattern {
        TorusPattern::parse(name, text).unwrap()
    }

    #[test]
    fn pattern_parse_round_trip() {
        let p = pat("x", "#..\n.#.\n..#\n");
        assert!(p.is_black(0, 2) && p.is_black(2, 0) && !p.is_black(0, 0));
        assert_eq!(p.to_text(), "#..\n.#.\n..#\n");
        assert!(TorusPattern::parse("bad", "#.\n#\n").is_err());
        assert!(TorusPattern::parse("bad", "#x\n").is_err());
        let mut set = PatternSet::empty();
        assert!(set.insert(pat("base", "##\n")).is_err());
    }

    #[test]
    fn place_and_tile() {
        let grid = TorusGrid::new(6, 6).unwrap();
        let mut s = GridState::new(grid);
        s.place(&pat("one", "#"), 0, 0);
        assert!(s.is_black(0, 0));
        // white never overrides black
        s.place(&pat("w", "."), 0, 0);
        assert!(s.is_black(0, 0));
        let tile = pat("t", "..#\n.#.\n#..\n");
        assert_eq!(s.tile(&tile, 0, 0, 6, 6).unwrap(), 4);
        assert_eq!(s.black_count(), 12);
        assert!(s.tile(&tile, 0, 0, 4, 6).is_err());
    }

    #[test]
    fn white_cycles_of_diagonal_tiling() {
        let tile = pat("t", "..#\n.#.\n#..\n");
        for k in 1..=4 {
            for l in 1..=4 {
                let mut s = GridState::new(TorusGrid::new(3 * k, 3 * l).unwrap());
                s.tile(&tile, 0, 0, 3 * k, 3 * l).unwrap();
                let w = white_cycle_structure(&s);
                assert!(w.all_simple);
                assert_eq!(w.count(), gcd(k, l), "k={k} l={l}");
            }
        }
        let mut full = GridState::new(TorusGrid::new(3, 3).unwrap());
        full.tile(&pat("b", "#"), 0, 0, 3, 3).unwrap();
        assert_eq!(white_cycle_structure(&full).count(), 0);
    }

    #[test]
    fn case_routing() {
        let p = CaseParams::for_size(6, 6).unwrap();
        assert_eq!((p.case, p.k, p.l, p.g), (TorusCase::A, 2, 2, 2));
        assert_eq!(p.expected_size(), Some(13));
        assert_eq!(CaseParams::for_size(6, 8).unwrap().case, TorusCase::B);
        assert_eq!(CaseParams::for_size(6, 8).unwrap().expected_size(), Some(17));
        let t = CaseParams::for_size(8, 6).unwrap();
        assert!(t.transposed && t.case == TorusCase::B);
        assert_eq!(CaseParams::for_size(7, 8).unwrap().case, TorusCase::E);
        let n4 = CaseParams::for_size(8, 4).unwrap();
        assert_eq!((n4.case, n4.k, n4.a, n4.bound()), (TorusCase::N4A2, 3, 2, 12));
        assert!(CaseParams::for_size(4, 9).unwrap().transposed);
        assert!(CaseParams::for_size(2, 9).is_err());
    }

    #[test]
    fn builtin_constructions() {
        let c = construct_3cs(6, 6).unwrap();
        assert_eq!(c.size(), 13);
        assert_eq!(construct_3cs(6, 8).unwrap().size(), 17);
        assert!(construct_3cs(8, 4).unwrap().size() <= 12);
        for (m, n) in [(5, 5), (5, 7), (7, 7), (9, 10), (4, 4), (3, 4), (4, 11)] {
            let c = construct_3cs(m, n).unwrap();
            assert!(c.state.percolates());
            assert!(c.size() <= c.params.bound());
        }
    }

    #[test]
    fn too_sparse_tiles_are_exhausted() {
        assert!(base_tile_candidates(2, 3).is_empty());
        let cfg = SearchConfig {
            tile_blacks: 2,
            ..SearchConfig::default()
        };
        assert_eq!(search_tile_patterns(&cfg), Err(TorusError::SearchExhausted("base and merge tiles")));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn constructions_percolate(m in 3usize..40, n in 3usize..40) {
            let c = construct_3cs(m, n).unwrap();
            proptest::prop_assert!(c.state.percolates());
            proptest::prop_assert!(c.size() <= c.params.bound());
            if let Some(e) = c.params.expected_size() {
                proptest::prop_assert_eq!(c.size(), e);
            }
        }
    }
}
