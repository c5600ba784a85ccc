//! Characters of G = (Z/p)^n, their scalar classes (lines), echelon subsets
//! indexing the E² page, zero-sum triples, and subset-rank counting.
//!
//! A character is a vector in F_p^n. A line is the class of a nonzero
//! character under F_p^× scaling, represented by the multiple whose last
//! nonzero coordinate is 1. Lines are totally ordered lexicographically on
//! that representative, and every downstream sign convention uses this order.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, Fp};

pub const MAX_RANK: usize = 16;
/// Upper bound on p^n, so that characters can be enumerated.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

/// The group G = (Z/p)^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupContext {
    p: u32,
    n: usize,
}

impl GroupContext {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !(3..1 << 16).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if n == 0 || n > MAX_RANK {
            return Err(Error::InvalidRank(n));
        }
        match (p as u64).checked_pow(n as u32) {
            Some(order) if order <= MAX_GROUP_ORDER => Ok(GroupContext { p, n }),
            _ => Err(Error::GroupTooLarge { p, n }),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Fp {
        Fp::new_unchecked(self.p)
    }

    /// |G| = p^n.
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.n as u32)
    }

    /// Number of lines, (p^n − 1)/(p − 1).
    pub fn line_count(&self) -> u64 {
        (self.order() - 1) / (self.p as u64 - 1)
    }

    /// Validates coordinates and builds a character (possibly zero).
    pub fn character(&self, coords: &[u32]) -> Result<Character> {
        if coords.len() != self.n {
            return Err(Error::WrongLength {
                coords: coords.to_vec(),
                n: self.n,
            });
        }
        if let Some(&value) = coords.iter().find(|&&c| c >= self.p) {
            return Err(Error::UnreducedCoordinate {
                coords: coords.to_vec(),
                value,
                p: self.p,
            });
        }
        Ok(Character(coords.to_vec()))
    }

    /// Reduces arbitrary integers mod p.
    pub fn character_mod(&self, coords: &[i64]) -> Result<Character> {
        let f = self.field();
        let reduced: Vec<u32> = coords.iter().map(|&c| f.reduce(c)).collect();
        self.character(&reduced)
    }

    /// All nonzero characters in lexicographic order.
    pub fn nonzero_characters(&self) -> Vec<Character> {
        all_vectors(self.p, self.n)
            .into_iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(Character)
            .collect()
    }

    /// Rank of a family of characters over F_p.
    pub fn rank<'a, I>(&self, chars: I) -> usize
    where
        I: IntoIterator<Item = &'a Character>,
    {
        let f = self.field();
        let mut rows: Vec<Vec<u32>> = chars.into_iter().map(|c| c.0.clone()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = f.inv(rows[rank][col]);
            for r in rank + 1..rows.len() {
                let factor = f.mul(rows[r][col], inv);
                if factor != 0 {
                    for c in col..self.n {
                        let sub = f.mul(factor, rows[rank][c]);
                        rows[r][c] = f.sub(rows[r][c], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// All vectors of F_p^n in lexicographic order.
fn all_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (0..n).map(|_| 0..p).multi_cartesian_product().collect()
}

/// A homomorphism G → Z/p, as a coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Character(Vec<u32>);

impl Character {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Index of the last nonzero coordinate.
    pub fn pivot(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    pub fn scale(&self, f: Fp, k: u32) -> Character {
        Character(self.0.iter().map(|&c| f.mul(c, k)).collect())
    }

    pub fn add(&self, f: Fp, other: &Character) -> Character {
        Character(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        )
    }

    /// Pads with a trailing zero coordinate (embedding into rank n+1).
    pub fn pad(&self) -> Character {
        let mut v = self.0.clone();
        v.push(0);
        Character(v)
    }

    /// The character `chi ∘ g` for a matrix `g` given by rows, i.e. the row
    /// vector `chi · g`.
    pub fn transform(&self, f: Fp, matrix: &[Vec<u32>]) -> Character {
        let n = self.0.len();
        Character(
            (0..n)
                .map(|j| (0..n).fold(0, |acc, i| f.add(acc, f.mul(self.0[i], matrix[i][j]))))
                .collect(),
        )
    }
}

impl fmt::Display for Character {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "({})", self.0.iter().join(","))
    }
}

/// A scalar class of nonzero characters; equivalently the hyperplane ker(α).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Line {
    rep: Character,
}

impl Line {
    pub fn rep(&self) -> &Character {
        &self.rep
    }

    pub fn coords(&self) -> &[u32] {
        self.rep.coords()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(fm)
    }
}

/// Splits a nonzero character as `scale · line.rep`.
pub fn canonicalize(ctx: &GroupContext, chi: &Character) -> Result<(Line, u32)> {
    let f = ctx.field();
    let Some(piv) = chi.pivot() else {
        return Err(Error::ZeroCharacter(chi.0.clone()));
    };
    let scale = chi.0[piv];
    let rep = chi.scale(f, f.inv(scale));
    Ok((Line { rep }, scale))
}

/// Canonical line through a character; the character must be nonzero.
pub fn line_of(ctx: &GroupContext, chi: &Character) -> Result<Line> {
    canonicalize(ctx, chi).map(|(l, _)| l)
}

/// All lines of F_p^n, sorted lexicographically on their representatives.
pub fn enumerate_lines(ctx: &GroupContext) -> Vec<Line> {
    let lines: Vec<Line> = ctx
        .nonzero_characters()
        .into_iter()
        .filter(|c| c.0[c.pivot().unwrap()] == 1)
        .map(|rep| Line { rep })
        .collect();
    debug_assert_eq!(lines.len() as u64, ctx.line_count());
    debug_assert!(lines.windows(2).all(|w| w[0] < w[1]));
    lines
}

/// Canonicalizes, deduplicates and sorts an arrangement given by characters.
pub fn arrangement(ctx: &GroupContext, chars: &[Character]) -> Result<Vec<Line>> {
    let mut lines = chars
        .iter()
        .map(|c| line_of(ctx, c))
        .collect::<Result<Vec<_>>>()?;
    lines.sort();
    lines.dedup();
    Ok(lines)
}

/// A linearly independent set of canonical characters with distinct pivot
/// columns, stored in order of increasing pivot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EchelonSubset {
    elems: Vec<Character>,
}

impl EchelonSubset {
    pub fn elems(&self) -> &[Character] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

impl fmt::Display for EchelonSubset {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{{{}}}", self.elems.iter().join(" "))
    }
}

/// The family F_n, built by the recursion
/// F_k = F_{k−1} ∪ { S ∪ {x} : S ∈ F_{k−1}, x ∈ (Z/p)^{k−1} × {1} }
/// starting from F_0 = {∅}; characters of F_{k−1} are padded by a trailing 0.
pub fn enumerate_fn(ctx: &GroupContext) -> Vec<EchelonSubset> {
    let mut family = vec![EchelonSubset { elems: Vec::new() }];
    for k in 1..=ctx.n {
        let padded: Vec<EchelonSubset> = family
            .iter()
            .map(|s| EchelonSubset {
                elems: s.elems.iter().map(Character::pad).collect(),
            })
            .collect();
        let tails: Vec<Character> = all_vectors(ctx.p, k - 1)
            .into_iter()
            .map(|mut v| {
                v.push(1);
                Character(v)
            })
            .collect();
        let mut next = padded.clone();
        for s in &padded {
            for x in &tails {
                let mut elems = s.elems.clone();
                elems.push(x.clone());
                next.push(EchelonSubset { elems });
            }
        }
        family = next;
    }
    family
}

/// Whether a set of characters is in (not necessarily reduced) row echelon
/// form with respect to the reversed column order: every element is the
/// canonical representative of its line and the pivot columns are distinct.
pub fn is_echelon(ctx: &GroupContext, set: &[Character]) -> bool {
    let mut pivots = Vec::with_capacity(set.len());
    for c in set {
        if c.coords().len() != ctx.n {
            return false;
        }
        match c.pivot() {
            Some(piv) if c.0[piv] == 1 => pivots.push(piv),
            _ => return false,
        }
    }
    pivots.sort_unstable();
    let distinct = pivots.windows(2).all(|w| w[0] != w[1]);
    debug_assert!(!distinct || ctx.rank(set) == set.len());
    distinct
}

/// Three distinct lines with nonzero scalars satisfying
/// `a·L1 + b·L2 + c·L3 = 0`, normalized to `c = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeroSumTriple {
    pub lines: [Line; 3],
    pub scalars: [u32; 3],
}

impl ZeroSumTriple {
    /// The characters `(a·L1, b·L2, c·L3)`, which sum to zero.
    pub fn characters(&self, f: Fp) -> [Character; 3] {
        [0, 1, 2].map(|i| self.lines[i].rep.scale(f, self.scalars[i]))
    }
}

/// Every unordered triple of distinct lines from `lines` whose
/// representatives span a plane, with its unique zero-sum scalars.
pub fn zero_sum_triples(ctx: &GroupContext, lines: &[Line]) -> Vec<ZeroSumTriple> {
    let f = ctx.field();
    let mut sorted = lines.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    for (l1, l2, l3) in sorted.iter().tuple_combinations() {
        if let Some((a, b)) = solve_in_span(f, l1.rep(), l2.rep(), l3.rep()) {
            assert_eq!(
                ctx.rank([l1.rep(), l2.rep(), l3.rep()]),
                2,
                "zero-sum scalars must be unique up to scaling"
            );
            out.push(ZeroSumTriple {
                lines: [l1.clone(), l2.clone(), l3.clone()],
                scalars: [a, b, 1],
            });
        }
    }
    out
}

/// Solves `a·x + b·y = −z` for independent `x`, `y`; `None` if `z` is
/// outside their span.
fn solve_in_span(f: Fp, x: &Character, y: &Character, z: &Character) -> Option<(u32, u32)> {
    let n = x.0.len();
    let (i, j, det) = (0..n)
        .tuple_combinations()
        .map(|(i, j)| {
            let det = f.sub(f.mul(x.0[i], y.0[j]), f.mul(x.0[j], y.0[i]));
            (i, j, det)
        })
        .find(|&(_, _, d)| d != 0)?;
    let inv = f.inv(det);
    let (ri, rj) = (f.neg(z.0[i]), f.neg(z.0[j]));
    let a = f.mul(f.sub(f.mul(ri, y.0[j]), f.mul(rj, y.0[i])), inv);
    let b = f.mul(f.sub(f.mul(x.0[i], rj), f.mul(x.0[j], ri)), inv);
    let ok = (0..n).all(|k| f.add(f.add(f.mul(a, x.0[k]), f.mul(b, y.0[k])), z.0[k]) == 0);
    (ok && a != 0 && b != 0).then_some((a, b))
}

/// Table `c[s][r]` of the number of `s`-subsets of G*∖{0} spanning an
/// `r`-dimensional subspace, for `s ≤ s_max` and `r ≤ n`.
pub fn subset_rank_table(ctx: &GroupContext, s_max: usize) -> Vec<Vec<BigUint>> {
    let n = ctx.n;
    let pn = ctx.order();
    let ppow: Vec<u64> = (0..=n as u32).map(|r| (ctx.p as u64).pow(r)).collect();
    let mut table = vec![vec![BigUint::zero(); n + 1]; s_max + 1];
    table[0][0] = BigUint::from(1u32);
    for s in 1..=s_max {
        for r in 0..=n {
            let mut acc = BigUint::zero();
            // Grow an (s−1)-subset by an element inside its span...
            let inside = (ppow[r] - 1) as i128 - (s as i128 - 1);
            if inside > 0 {
                acc += &table[s - 1][r] * BigUint::from(inside as u128);
            } else if inside < 0 {
                debug_assert!(table[s - 1][r].is_zero());
            }
            // ...or outside it.
            if r > 0 {
                acc += &table[s - 1][r - 1] * BigUint::from(pn - ppow[r - 1]);
            }
            let (q, rem) = (&acc / s, &acc % s);
            debug_assert!(rem.is_zero());
            table[s][r] = q;
        }
    }
    table
}

/// Number of `s`-subsets of G*∖{0} whose span has dimension `r`.
pub fn subset_rank_count(ctx: &GroupContext, s: usize, r: usize) -> BigUint {
    if r > ctx.n || r > s || s as u64 > ctx.order() - 1 {
        return BigUint::zero();
    }
    subset_rank_table(ctx, s)[s][r].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, n: usize) -> GroupContext {
        GroupContext::new(p, n).unwrap()
    }

    fn ch(c: &GroupContext, v: &[u32]) -> Character {
        c.character(v).unwrap()
    }

    #[test]
    fn context_validation() {
        assert_eq!(GroupContext::new(2, 2), Err(Error::InvalidPrime(2)));
        assert_eq!(GroupContext::new(9, 2), Err(Error::InvalidPrime(9)));
        assert_eq!(GroupContext::new(3, 0), Err(Error::InvalidRank(0)));
        assert!(matches!(
            GroupContext::new(3, 16),
            Err(Error::GroupTooLarge { .. })
        ));
        assert!(GroupContext::new(3, 4).is_ok());
    }

    #[test]
    fn canonicalize_examples() {
        let c = ctx(3, 3);
        let (l, k) = canonicalize(&c, &ch(&c, &[2, 0, 1])).unwrap();
        assert_eq!((l.coords(), k), (&[2, 0, 1][..], 1));
        let (l, k) = canonicalize(&c, &ch(&c, &[1, 0, 2])).unwrap();
        assert_eq!((l.coords(), k), (&[2, 0, 1][..], 2));
        let c5 = ctx(5, 2);
        let (l, k) = canonicalize(&c5, &ch(&c5, &[0, 3])).unwrap();
        assert_eq!((l.coords(), k), (&[0, 1][..], 3));
        assert!(matches!(
            canonicalize(&c, &ch(&c, &[0, 0, 0])),
            Err(Error::ZeroCharacter(_))
        ));
    }

    #[test]
    fn canonicalize_round_trip_exhaustive() {
        for p in [3, 5, 7] {
            for n in 1..=3 {
                let c = ctx(p, n);
                let f = c.field();
                for chi in c.nonzero_characters() {
                    let (line, k) = canonicalize(&c, &chi).unwrap();
                    assert_eq!(line.rep().scale(f, k), chi);
                    assert_eq!(line.coords()[line.rep().pivot().unwrap()], 1);
                }
            }
        }
    }

    #[test]
    fn character_validation() {
        let c = ctx(3, 2);
        assert!(matches!(c.character(&[1]), Err(Error::WrongLength { .. })));
        assert!(matches!(
            c.character(&[3, 0]),
            Err(Error::UnreducedCoordinate { value: 3, .. })
        ));
        assert_eq!(c.character_mod(&[-1, 4]).unwrap().coords(), &[2, 1]);
    }

    #[test]
    fn line_enumeration() {
        assert_eq!(enumerate_lines(&ctx(3, 1)).len(), 1);
        let l: Vec<Vec<u32>> = enumerate_lines(&ctx(3, 2))
            .iter()
            .map(|l| l.coords().to_vec())
            .collect();
        assert_eq!(l, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 1]]);
        assert_eq!(enumerate_lines(&ctx(3, 3)).len(), 13);
        // Brute force: group nonzero characters by scalar class.
        for (p, n) in [(3, 2), (5, 2), (3, 3), (7, 2)] {
            let c = ctx(p, n);
            let f = c.field();
            let mut classes: Vec<Vec<Character>> = c
                .nonzero_characters()
                .into_iter()
                .map(|chi| {
                    let mut cls: Vec<Character> = f.units().map(|k| chi.scale(f, k)).collect();
                    cls.sort();
                    cls
                })
                .collect();
            classes.sort();
            classes.dedup();
            assert_eq!(classes.len(), enumerate_lines(&c).len());
        }
    }

    #[test]
    fn fn_small_cases() {
        let c1 = ctx(3, 1);
        let f1 = enumerate_fn(&c1);
        assert_eq!(f1.len(), 2);
        assert!(f1[0].is_empty());
        assert_eq!(f1[1].elems(), &[ch(&c1, &[1])]);

        let c = ctx(3, 2);
        let got: Vec<Vec<Vec<u32>>> = enumerate_fn(&c)
            .iter()
            .map(|s| s.elems().iter().map(|x| x.coords().to_vec()).collect())
            .collect();
        let expect: Vec<Vec<Vec<u32>>> = vec![
            vec![],
            vec![vec![1, 0]],
            vec![vec![0, 1]],
            vec![vec![1, 1]],
            vec![vec![2, 1]],
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 0], vec![1, 1]],
            vec![vec![1, 0], vec![2, 1]],
        ];
        assert_eq!(got, expect);
        assert_eq!(enumerate_fn(&ctx(3, 3)).len(), 80);
    }

    #[test]
    fn fn_matches_brute_force_echelon_sets() {
        for n in 1..=2 {
            let c = ctx(3, n);
            let all = c.nonzero_characters();
            let mut brute: Vec<Vec<Character>> = all
                .iter()
                .cloned()
                .powerset()
                .filter(|s| is_echelon(&c, s))
                .map(|mut s| {
                    s.sort_by_key(|x| x.pivot());
                    s
                })
                .collect();
            brute.sort();
            let mut rec: Vec<Vec<Character>> =
                enumerate_fn(&c).into_iter().map(|s| s.elems).collect();
            rec.sort();
            assert_eq!(rec, brute);
        }
    }

    #[test]
    fn echelon_examples() {
        let c = ctx(3, 2);
        assert!(is_echelon(&c, &[ch(&c, &[1, 0]), ch(&c, &[0, 1])]));
        assert!(!is_echelon(&c, &[ch(&c, &[1, 1]), ch(&c, &[2, 1])]));
        assert!(!is_echelon(&c, &[ch(&c, &[2, 2])]));
        let c3 = ctx(3, 3);
        assert!(is_echelon(&c3, &[ch(&c3, &[2, 1, 0]), ch(&c3, &[1, 0, 1])]));
    }

    #[test]
    fn triples_examples() {
        let c = ctx(3, 2);
        let lines = enumerate_lines(&c);
        let t = zero_sum_triples(&c, &lines);
        assert_eq!(t.len(), 4);
        let f = c.field();
        for tr in &t {
            let [a, b, g] = tr.characters(f);
            assert!(a.add(f, &b).add(f, &g).is_zero());
            assert_eq!(tr.scalars[2], 1);
        }
        let two = [
            line_of(&c, &ch(&c, &[1, 0])).unwrap(),
            line_of(&c, &ch(&c, &[0, 1])).unwrap(),
        ];
        assert!(zero_sum_triples(&c, &two).is_empty());

        let c3 = ctx(3, 3);
        let basis: Vec<Line> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .map(|v| line_of(&c3, &ch(&c3, v)).unwrap())
            .collect();
        assert!(zero_sum_triples(&c3, &basis).is_empty());
    }

    #[test]
    fn triples_iff_rank_two() {
        for (p, n) in [(3, 3), (5, 2), (3, 2)] {
            let c = ctx(p, n);
            let lines = enumerate_lines(&c);
            let found = zero_sum_triples(&c, &lines);
            let expected = lines
                .iter()
                .tuple_combinations()
                .filter(|(a, b, d)| c.rank([a.rep(), b.rep(), d.rep()]) == 2)
                .count();
            assert_eq!(found.len(), expected);
        }
        // Each of the 13 planes of F_3^3 holds 4 lines.
        assert_eq!(
            zero_sum_triples(&ctx(3, 3), &enumerate_lines(&ctx(3, 3))).len(),
            52
        );
    }

    fn brute_rank_counts(c: &GroupContext, s: usize) -> Vec<u64> {
        let mut counts = vec![0u64; c.n() + 1];
        for subset in c.nonzero_characters().iter().combinations(s) {
            counts[c.rank(subset)] += 1;
        }
        counts
    }

    #[test]
    fn subset_rank_examples() {
        let c = ctx(3, 2);
        assert_eq!(subset_rank_count(&c, 0, 0), BigUint::from(1u32));
        assert_eq!(subset_rank_count(&c, 2, 1), BigUint::from(4u32));
        assert_eq!(subset_rank_count(&c, 2, 2), BigUint::from(24u32));
        let total: BigUint = (0..=2).map(|r| subset_rank_count(&c, 3, r)).sum();
        assert_eq!(total, BigUint::from(56u32));
    }

    #[test]
    fn subset_rank_matches_enumeration() {
        for (p, n) in [(3, 1), (3, 2), (5, 1), (5, 2), (3, 3)] {
            let c = ctx(p, n);
            let universe = (c.order() - 1) as usize;
            let table = subset_rank_table(&c, universe);
            for s in 0..=universe {
                let binom = (0..s).fold(1u128, |acc, i| {
                    acc * (universe - i) as u128 / (i + 1) as u128
                });
                if binom > 100_000 {
                    continue;
                }
                let brute = brute_rank_counts(&c, s);
                for r in 0..=n {
                    assert_eq!(
                        table[s][r],
                        BigUint::from(brute[r]),
                        "p={p} n={n} s={s} r={r}"
                    );
                }
            }
        }
    }
}
