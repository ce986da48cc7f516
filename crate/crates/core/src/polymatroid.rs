//! Linear 2-polymatroids over GF(2^w).
//!
//! Each element is a line: the span of two vectors `a`, `b`. The rank of a set
//! of elements is the dimension of the span of all their vectors. A matching
//! is a set `M` with `rank(M) = 2|M|`; a spanning set reaches the rank of the
//! ground set. The maximum matching size `ν` is computed algebraically as half
//! the rank of the random alternating matrix `Σ t_i (a_i b_iᵀ + b_i a_iᵀ)`,
//! which never overestimates and is exact with probability at least
//! `1 - ν / 2^w` per trial. Minimum spanning sets then follow from
//! `ν + ρ = rank(ground)` by extending a maximum matching greedily.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolymatroidError {
    #[error("unsupported extension degree {0}; use 8, 16 or 32")]
    UnsupportedField(u32),
    #[error("line {line}: vector length {found} differs from ambient dimension {dim}")]
    DimensionMismatch { line: usize, dim: usize, found: usize },
    #[error("line {line}: coefficient {value:#x} is not an element of GF(2^{bits})")]
    CoefficientOutOfRange { line: usize, value: u64, bits: u32 },
    #[error("element {0} is not part of the instance")]
    UnknownElement(usize),
    #[error("exhaustive search over {lines} lines exceeds the limit of {limit}")]
    TooLarge { lines: usize, limit: usize },
    #[error("randomized matching failed consistency checks after {attempts} attempts")]
    Inconsistent { attempts: usize },
    #[error("malformed hex vector {0:?}")]
    BadHex(String),
}

/// Default number of independent random evaluations per rank query.
pub const DEFAULT_TRIALS: usize = 3;
/// Fresh-randomness retries before a consistency failure is reported.
pub const MAX_RETRIES: usize = 8;

/// GF(2^w) with elements stored in the low `w` bits of a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryField {
    bits: u32,
    modulus: u64,
}

impl BinaryField {
    /// Fixed irreducible moduli: x^8+x^4+x^3+x+1, x^16+x^12+x^3+x+1 and
    /// x^32+x^7+x^3+x^2+1.
    pub fn new(bits: u32) -> Result<Self, PolymatroidError> {
        let modulus = match bits {
            8 => 0x11b,
            16 => 0x1_100b,
            32 => 0x1_0000_008d,
            _ => return Err(PolymatroidError::UnsupportedField(bits)),
        };
        Ok(BinaryField { bits, modulus })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, x: u64) -> bool {
        x >> self.bits == 0
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if a == 1 {
            return b;
        }
        if b == 1 {
            return a;
        }
        let (mut a, mut b) = (a, b);
        let mut prod = 0u64;
        while b != 0 {
            if b & 1 != 0 {
                prod ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.bits != 0 {
                a ^= self.modulus;
            }
        }
        prod
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, (1u64 << self.bits) - 2)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen::<u64>() >> (64 - self.bits)
    }
}

impl Default for BinaryField {
    fn default() -> Self {
        BinaryField::new(32).expect("GF(2^32) is supported")
    }
}

/// A 2-dimensional subspace (or a degenerate one) spanned by `a` and `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub owner: usize,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymatroidInstance {
    field: BinaryField,
    dim: usize,
    lines: Vec<Line>,
    binary: bool,
}

impl PolymatroidInstance {
    pub fn new(field: BinaryField, dim: usize, lines: Vec<Line>) -> Result<Self, PolymatroidError> {
        for (i, l) in lines.iter().enumerate() {
            for v in [&l.a, &l.b] {
                if v.len() != dim {
                    return Err(PolymatroidError::DimensionMismatch {
                        line: i,
                        dim,
                        found: v.len(),
                    });
                }
                if let Some(&bad) = v.iter().find(|&&x| !field.contains(x)) {
                    return Err(PolymatroidError::CoefficientOutOfRange {
                        line: i,
                        value: bad,
                        bits: field.bits(),
                    });
                }
            }
        }
        let binary = lines.iter().all(|l| l.a.iter().chain(&l.b).all(|&x| x <= 1));
        Ok(PolymatroidInstance {
            field,
            dim,
            lines,
            binary,
        })
    }

    pub fn field(&self) -> BinaryField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Instance on the listed elements, in the given order.
    pub fn restrict(&self, elements: &[usize]) -> Result<PolymatroidInstance, PolymatroidError> {
        let lines = elements
            .iter()
            .map(|&e| self.lines.get(e).cloned().ok_or(PolymatroidError::UnknownElement(e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolymatroidInstance {
            field: self.field,
            dim: self.dim,
            binary: self.binary,
            lines,
        })
    }

    /// Dimension of the span of the lines in `elements`.
    pub fn rank(&self, elements: &[usize]) -> usize {
        let mut basis = self.basis();
        for &e in elements {
            basis.insert(&self.lines[e].a);
            basis.insert(&self.lines[e].b);
        }
        basis.rank()
    }

    pub fn full_rank(&self) -> usize {
        self.rank(&(0..self.len()).collect::<Vec<_>>())
    }

    fn basis(&self) -> SpanBasis {
        if self.binary {
            SpanBasis::Binary(BitBasis::new(self.dim))
        } else {
            SpanBasis::Field(FieldBasis::new(self.field, self.dim))
        }
    }

    fn elements_mask(&self, mask: u64) -> Vec<usize> {
        (0..self.len()).filter(|i| mask & (1 << i) != 0).collect()
    }

    fn check_small(&self, limit: usize) -> Result<(), PolymatroidError> {
        if self.len() > limit {
            Err(PolymatroidError::TooLarge {
                lines: self.len(),
                limit,
            })
        } else {
            Ok(())
        }
    }

    /// Maximum matching size by depth-first enumeration of matchings.
    pub fn nu_bruteforce(&self, limit: usize) -> Result<usize, PolymatroidError> {
        self.check_small(limit)?;
        let mut best = 0;
        let mut basis = self.basis();
        self.extend_matching(0, 0, &mut basis, &mut best);
        Ok(best)
    }

    fn extend_matching(&self, from: usize, size: usize, basis: &mut SpanBasis, best: &mut usize) {
        *best = (*best).max(size);
        let cap = basis.dim_left() / 2;
        if size + cap.min(self.len() - from) <= *best {
            return;
        }
        for e in from..self.len() {
            let mut next = basis.clone();
            if next.insert(&self.lines[e].a) && next.insert(&self.lines[e].b) {
                self.extend_matching(e + 1, size + 1, &mut next, best);
            }
        }
    }

    /// Minimum spanning set size by enumeration in order of size.
    pub fn rho_bruteforce(&self, limit: usize) -> Result<usize, PolymatroidError> {
        self.check_small(limit)?;
        let target = self.full_rank();
        let n = self.len();
        for size in 0..=n {
            let hit = (0u64..1 << n)
                .filter(|m| m.count_ones() as usize == size)
                .any(|m| self.rank(&self.elements_mask(m)) == target);
            if hit {
                return Ok(size);
            }
        }
        unreachable!("the ground set spans itself")
    }

    /// Half the rank of one random evaluation of the alternating matrix
    /// restricted to `alive` elements.
    fn parity_rank<R: Rng + ?Sized>(&self, alive: &[bool], rng: &mut R) -> usize {
        let t: Vec<u64> = self.lines.iter().map(|_| self.field.random(rng)).collect();
        self.parity_rank_with(alive, &t)
    }

    fn parity_rank_with(&self, alive: &[bool], t: &[u64]) -> usize {
        let f = self.field;
        let d = self.dim;
        let mut y = vec![vec![0u64; d]; d];
        for (i, line) in self.lines.iter().enumerate() {
            if !alive[i] || t[i] == 0 {
                continue;
            }
            for p in 0..d {
                let ap = f.mul(t[i], line.a[p]);
                let bp = f.mul(t[i], line.b[p]);
                if ap == 0 && bp == 0 {
                    continue;
                }
                for q in 0..d {
                    // t (a_p b_q + b_p a_q)
                    let v = f.mul(ap, line.b[q]) ^ f.mul(bp, line.a[q]);
                    y[p][q] ^= v;
                }
            }
        }
        field_rank(f, y) / 2
    }

    /// Randomized maximum matching size: the best of `trials` evaluations.
    pub fn nu_algebraic<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> usize {
        let alive = vec![true; self.len()];
        self.nu_algebraic_on(&alive, rng, trials)
    }

    fn nu_algebraic_on<R: Rng + ?Sized>(&self, alive: &[bool], rng: &mut R, trials: usize) -> usize {
        let draws: Vec<Vec<u64>> = (0..trials.max(1))
            .map(|_| self.lines.iter().map(|_| self.field.random(rng)).collect())
            .collect();
        if self.dim >= 48 && draws.len() > 1 {
            draws.par_iter().map(|t| self.parity_rank_with(alive, t)).max().unwrap_or(0)
        } else {
            draws.iter().map(|t| self.parity_rank_with(alive, t)).max().unwrap_or(0)
        }
    }

    /// Maximum matching by deletion: drop each element in turn unless that
    /// lowers the matching number. The survivors form a maximum matching.
    pub fn max_matching<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> Result<Vec<usize>, PolymatroidError> {
        for _ in 0..MAX_RETRIES {
            if let Some(m) = self.try_max_matching(rng, trials) {
                return Ok(m);
            }
        }
        Err(PolymatroidError::Inconsistent { attempts: MAX_RETRIES })
    }

    fn try_max_matching<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> Option<Vec<usize>> {
        let nu = self.nu_algebraic(rng, trials);
        let mut alive: Vec<bool> = self.lines.iter().map(|_| true).collect();
        // elements of rank < 2 never belong to a matching
        for (e, line) in self.lines.iter().enumerate() {
            let mut b = self.basis();
            b.insert(&line.a);
            b.insert(&line.b);
            if b.rank() < 2 {
                alive[e] = false;
            }
        }
        let mut remaining = alive.iter().filter(|&&a| a).count();
        for e in 0..self.len() {
            if !alive[e] || remaining == nu {
                continue;
            }
            alive[e] = false;
            // a single evaluation reaching nu is conclusive, failures are retried
            let still = (0..trials.max(1)).any(|_| self.parity_rank(&alive, rng) >= nu);
            if still {
                remaining -= 1;
            } else {
                alive[e] = true;
            }
        }
        let m: Vec<usize> = (0..self.len()).filter(|&e| alive[e]).collect();
        (m.len() == nu && self.rank(&m) == 2 * nu).then_some(m)
    }

    /// Minimum spanning subset of `ground`: a maximum matching of the
    /// restriction, extended by elements that each raise the rank by one.
    pub fn min_spanning_set<R: Rng + ?Sized>(
        &self,
        ground: &[usize],
        rng: &mut R,
        trials: usize,
    ) -> Result<SpanningSet, PolymatroidError> {
        let sub = self.restrict(ground)?;
        let target = sub.full_rank();
        for _ in 0..MAX_RETRIES {
            let Some(matching) = sub.try_max_matching(rng, trials) else {
                continue;
            };
            if let Some(members) = sub.extend_to_spanning(&matching, target) {
                return Ok(SpanningSet {
                    members: members.iter().map(|&i| ground[i]).collect(),
                    matching: matching.iter().map(|&i| ground[i]).collect(),
                    rank: target,
                });
            }
        }
        Err(PolymatroidError::Inconsistent { attempts: MAX_RETRIES })
    }

    /// Greedy extension of a maximum matching; `None` if some element would
    /// raise the rank by two, which means the matching was not maximum.
    fn extend_to_spanning(&self, matching: &[usize], target: usize) -> Option<Vec<usize>> {
        let mut basis = self.basis();
        let mut chosen = vec![false; self.len()];
        for &e in matching {
            basis.insert(&self.lines[e].a);
            basis.insert(&self.lines[e].b);
            chosen[e] = true;
        }
        for e in 0..self.len() {
            if basis.rank() == target {
                break;
            }
            if chosen[e] {
                continue;
            }
            let before = basis.rank();
            let mut next = basis.clone();
            next.insert(&self.lines[e].a);
            next.insert(&self.lines[e].b);
            match next.rank() - before {
                0 => {}
                1 => {
                    basis = next;
                    chosen[e] = true;
                }
                _ => return None,
            }
        }
        let members: Vec<usize> = (0..self.len()).filter(|&e| chosen[e]).collect();
        (basis.rank() == target && members.len() + matching.len() == target).then_some(members)
    }

    pub fn to_json(&self) -> InstanceJson {
        let width = (self.field.bits() / 4) as usize;
        InstanceJson {
            field_bits: self.field.bits(),
            dimension: self.dim,
            lines: self
                .lines
                .iter()
                .map(|l| LineJson {
                    owner: l.owner,
                    a: encode_hex(&l.a, width),
                    b: encode_hex(&l.b, width),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &InstanceJson) -> Result<Self, PolymatroidError> {
        let field = BinaryField::new(json.field_bits)?;
        let width = (field.bits() / 4) as usize;
        let lines = json
            .lines
            .iter()
            .map(|l| {
                Ok(Line {
                    owner: l.owner,
                    a: decode_hex(&l.a, width)?,
                    b: decode_hex(&l.b, width)?,
                })
            })
            .collect::<Result<Vec<_>, PolymatroidError>>()?;
        PolymatroidInstance::new(field, json.dimension, lines)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanningSet {
    /// Element indices of the spanning set, ascending.
    pub members: Vec<usize>,
    /// The maximum matching it was grown from.
    pub matching: Vec<usize>,
    /// Rank of the ground set.
    pub rank: usize,
}

/// Serialized instance: each vector is the concatenation of its coefficients
/// as fixed-width hex words (`w / 4` digits each).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub field_bits: u32,
    pub dimension: usize,
    pub lines: Vec<LineJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineJson {
    pub owner: usize,
    pub a: String,
    pub b: String,
}

fn encode_hex(v: &[u64], width: usize) -> String {
    v.iter().map(|x| format!("{x:0width$x}")).collect()
}

fn decode_hex(s: &str, width: usize) -> Result<Vec<u64>, PolymatroidError> {
    if s.len() % width != 0 || !s.is_ascii() {
        return Err(PolymatroidError::BadHex(s.to_string()));
    }
    (0..s.len() / width)
        .map(|i| u64::from_str_radix(&s[i * width..(i + 1) * width], 16).map_err(|_| PolymatroidError::BadHex(s.to_string())))
        .collect()
}

/// Rank of a dense matrix over the field by Gaussian elimination.
pub fn field_rank(f: BinaryField, mut rows: Vec<Vec<u64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = f.inv(rows[rank][c]);
        let pivot: Vec<u64> = rows[rank].iter().map(|&x| f.mul(x, inv)).collect();
        for r in rank + 1..rows.len() {
            let factor = rows[r][c];
            if factor != 0 {
                for (x, &pv) in rows[r][c..].iter_mut().zip(&pivot[c..]) {
                    *x ^= f.mul(factor, pv);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone)]
enum SpanBasis {
    Binary(BitBasis),
    Field(FieldBasis),
}

impl SpanBasis {
    fn insert(&mut self, v: &[u64]) -> bool {
        match self {
            SpanBasis::Binary(b) => b.insert(v),
            SpanBasis::Field(b) => b.insert(v),
        }
    }

    fn rank(&self) -> usize {
        match self {
            SpanBasis::Binary(b) => b.rows.len(),
            SpanBasis::Field(b) => b.rows.len(),
        }
    }

    fn dim_left(&self) -> usize {
        match self {
            SpanBasis::Binary(b) => b.dim - b.rows.len(),
            SpanBasis::Field(b) => b.dim - b.rows.len(),
        }
    }
}

/// Incremental echelon basis of 0/1 vectors, bit-packed into words.
#[derive(Debug, Clone)]
struct BitBasis {
    dim: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl BitBasis {
    fn new(dim: usize) -> Self {
        BitBasis { dim, rows: Vec::new() }
    }

    fn insert(&mut self, v: &[u64]) -> bool {
        let mut packed = vec![0u64; self.dim.div_ceil(64)];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                packed[i / 64] |= 1 << (i % 64);
            }
        }
        for (piv, row) in &self.rows {
            if packed[piv / 64] >> (piv % 64) & 1 == 1 {
                packed.iter_mut().zip(row).for_each(|(a, b)| *a ^= b);
            }
        }
        let lead = packed
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize);
        match lead {
            Some(piv) => {
                self.rows.push((piv, packed));
                true
            }
            None => false,
        }
    }
}

/// Incremental echelon basis over GF(2^w) with normalized pivots.
#[derive(Debug, Clone)]
struct FieldBasis {
    field: BinaryField,
    dim: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl FieldBasis {
    fn new(field: BinaryField, dim: usize) -> Self {
        FieldBasis {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field;
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                v.iter_mut().zip(row).for_each(|(x, &r)| *x ^= f.mul(c, r));
            }
        }
        match v.iter().position(|&x| x != 0) {
            Some(piv) => {
                let inv = f.inv(v[piv]);
                v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                self.rows.push((piv, v));
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Random instance whose coefficients come from `palette`; small
    /// palettes and dimensions create plenty of dependencies.
    pub(crate) fn random_instance<R: Rng>(rng: &mut R, lines: usize, dim: usize, palette: u64) -> PolymatroidInstance {
        let field = BinaryField::default();
        let ls = (0..lines)
            .map(|i| Line {
                owner: i,
                a: (0..dim).map(|_| rng.gen_range(0..palette)).collect(),
                b: (0..dim).map(|_| rng.gen_range(0..palette)).collect(),
            })
            .collect();
        PolymatroidInstance::new(field, dim, ls).unwrap()
    }

    fn unit(dim: usize, i: usize) -> Vec<u64> {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    }

    fn poly_mod(mut a: u128, m: u128) -> u128 {
        let dm = 127 - m.leading_zeros();
        while a != 0 && 127 - a.leading_zeros() >= dm {
            a ^= m << (127 - a.leading_zeros() - dm);
        }
        a
    }

    #[test]
    fn moduli_are_irreducible_by_trial_division() {
        for bits in [8u32, 16, 32] {
            let m = BinaryField::new(bits).unwrap().modulus() as u128;
            for d in 2u128..(1 << (bits / 2 + 1)) {
                assert_ne!(poly_mod(m, d), 0, "GF(2^{bits}) modulus divisible by {d:#b}");
            }
        }
    }

    #[test]
    fn field_axioms_sample() {
        let f = BinaryField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
        let small = BinaryField::new(8).unwrap();
        // AES field: 0x53 * 0xca = 1
        assert_eq!(small.mul(0x53, 0xca), 1);
        assert!(BinaryField::new(12).is_err());
    }

    #[test]
    fn rank_examples() {
        let f = BinaryField::default();
        let lines = vec![
            Line { owner: 0, a: vec![1, 0, 0], b: vec![0, 1, 0] },
            Line { owner: 1, a: vec![0, 1, 0], b: vec![0, 0, 1] },
            Line { owner: 2, a: vec![1, 0, 0], b: vec![0, 0, 1] },
        ];
        let inst = PolymatroidInstance::new(f, 3, lines).unwrap();
        assert_eq!(inst.rank(&[]), 0);
        assert_eq!(inst.rank(&[1]), 2);
        assert_eq!(inst.rank(&[0, 1, 2]), 3);
        assert_eq!(field_rank(f, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]), 2);
    }

    #[test]
    fn nu_examples() {
        let f = BinaryField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let same: Vec<Line> = (0..4).map(|i| Line { owner: i, a: unit(4, 0), b: unit(4, 1) }).collect();
        let same = PolymatroidInstance::new(f, 4, same).unwrap();
        assert_eq!(same.nu_bruteforce(18).unwrap(), 1);
        assert_eq!(same.nu_algebraic(&mut rng, 3), 1);
        assert_eq!(same.max_matching(&mut rng, 3).unwrap().len(), 1);

        let planes: Vec<Line> = (0..4).map(|i| Line { owner: i, a: unit(8, 2 * i), b: unit(8, 2 * i + 1) }).collect();
        let planes = PolymatroidInstance::new(f, 8, planes).unwrap();
        assert_eq!(planes.nu_bruteforce(18).unwrap(), 4);
        assert_eq!(planes.nu_algebraic(&mut rng, 3), 4);
        assert_eq!(planes.max_matching(&mut rng, 3).unwrap(), vec![0, 1, 2, 3]);

        let empty = PolymatroidInstance::new(f, 3, vec![]).unwrap();
        assert_eq!(empty.nu_algebraic(&mut rng, 1), 0);
        let one = planes.restrict(&[2]).unwrap();
        assert_eq!(one.nu_algebraic(&mut rng, 1), 1);
        assert!(planes.nu_bruteforce(3).is_err());
    }

    #[test]
    fn spanning_examples() {
        let f = BinaryField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lines: Vec<Line> = (0..3).map(|i| Line { owner: i, a: unit(3, 0), b: unit(3, 1) }).collect();
        let inst = PolymatroidInstance::new(f, 3, lines).unwrap();
        let s = inst.min_spanning_set(&[0], &mut rng, 3).unwrap();
        assert_eq!((s.members.clone(), s.rank), (vec![0], 2));
        let s = inst.min_spanning_set(&[0, 1, 2], &mut rng, 3).unwrap();
        assert_eq!(s.members.len(), 1);
    }

    #[test]
    fn algebraic_matches_bruteforce_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for round in 0..300 {
            let lines = rng.gen_range(0..=8);
            let dim = rng.gen_range(2..=8);
            let palette = if round % 3 == 0 { 4 } else { 2 };
            let inst = random_instance(&mut rng, lines, dim, palette);
            let nu = inst.nu_bruteforce(18).unwrap();
            assert_eq!(inst.nu_algebraic(&mut rng, 3), nu);
            let m = inst.max_matching(&mut rng, 3).unwrap();
            assert_eq!(m.len(), nu);
            assert_eq!(inst.rank(&m), 2 * nu);
            let all: Vec<usize> = (0..lines).collect();
            let s = inst.min_spanning_set(&all, &mut rng, 3).unwrap();
            assert_eq!(inst.rank(&s.members), inst.full_rank());
            assert_eq!(s.members.len(), inst.full_rank() - nu);
            assert_eq!(s.members.len(), inst.rho_bruteforce(18).unwrap());
        }
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let inst = random_instance(&mut rng, 5, 4, 1 << 20);
        let json = inst.to_json();
        assert_eq!(PolymatroidInstance::from_json(&json).unwrap(), inst);
        let mut bad = json.clone();
        bad.lines[0].a.push('z');
        assert!(PolymatroidInstance::from_json(&bad).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(96))]

        #[test]
        fn rank_is_a_2_polymatroid(seed in proptest::prelude::any::<u64>(), lines in 1usize..8, dim in 1usize..6, a in 0u32..256, b in 0u32..256) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, lines, dim, 3);
            let pick = |mask: u32| (0..lines).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>();
            let (x, y) = (pick(a), pick(b));
            let union = pick(a | b);
            let inter = pick(a & b);
            let (fx, fy) = (inst.rank(&x), inst.rank(&y));
            // submodular and monotone
            proptest::prop_assert!(inst.rank(&union) + inst.rank(&inter) <= fx + fy);
            proptest::prop_assert!(inst.rank(&inter) <= fx && fx <= inst.rank(&union));
            proptest::prop_assert!(fx <= 2 * x.len() && fx <= dim);
            proptest::prop_assert_eq!(inst.rank(&[]), 0);
        }

        #[test]
        fn json_round_trip(seed in proptest::prelude::any::<u64>(), lines in 1usize..6, dim in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, lines, dim, 1 << 32);
            let text = serde_json::to_string(&inst.to_json()).unwrap();
            let back: InstanceJson = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(PolymatroidInstance::from_json(&back).unwrap(), inst);
        }
    }
}
