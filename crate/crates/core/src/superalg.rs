//! The free graded-commutative F_p-algebra on even generators `t_i`
//! (weight 2) and odd generators `u_j` (weight 1), homogeneous presentations
//! over it, and degreewise quotient dimensions via Macaulay matrices.
//!
//! Generators are referred to by index. In a [`Presentation`] the index of
//! an even generator points into its line list and the index of an odd one
//! into its odd-generator list; both lists are sorted, so generator order
//! (and hence every Koszul sign) follows the global line order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::charspace::{Character, GroupContext, Line};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{Echelon, SparseRow};
use crate::par;

/// `∏ t_i^{e_i} · u_{j_1} ⋯ u_{j_k}` with `j_1 < ⋯ < j_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SuperMonomial {
    /// `(generator, exponent)` pairs sorted by generator; exponents positive.
    t: Vec<(u32, u32)>,
    u: Vec<u32>,
}

impl SuperMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn t(gen: u32) -> Self {
        SuperMonomial {
            t: vec![(gen, 1)],
            u: Vec::new(),
        }
    }

    pub fn u(gen: u32) -> Self {
        SuperMonomial {
            t: Vec::new(),
            u: vec![gen],
        }
    }

    /// Builds a monomial from a dense exponent vector and a strictly
    /// increasing odd part.
    pub fn from_parts(t_exps: &[u32], u: Vec<u32>) -> Self {
        debug_assert!(u.windows(2).all(|w| w[0] < w[1]));
        SuperMonomial {
            t: t_exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(g, &e)| (g as u32, e))
                .collect(),
            u,
        }
    }

    pub fn t_exps(&self) -> &[(u32, u32)] {
        &self.t
    }

    pub fn u_set(&self) -> &[u32] {
        &self.u
    }

    pub fn t_degree(&self) -> usize {
        self.t.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn odd_len(&self) -> usize {
        self.u.len()
    }

    pub fn weight(&self) -> usize {
        2 * self.t_degree() + self.u.len()
    }

    /// Product `self · other`, or `None` when an odd generator repeats.
    /// The flag is true when sorting the odd part took an odd number of
    /// transpositions.
    pub fn mul(&self, other: &SuperMonomial) -> Option<(SuperMonomial, bool)> {
        let mut u = Vec::with_capacity(self.u.len() + other.u.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < self.u.len() || j < other.u.len() {
            if j == other.u.len() || (i < self.u.len() && self.u[i] < other.u[j]) {
                u.push(self.u[i]);
                i += 1;
            } else if i == self.u.len() || other.u[j] < self.u[i] {
                // other.u[j] jumps over the remaining self.u[i..]
                inversions += self.u.len() - i;
                u.push(other.u[j]);
                j += 1;
            } else {
                return None;
            }
        }
        let mut t = Vec::with_capacity(self.t.len() + other.t.len());
        let (mut i, mut j) = (0, 0);
        while i < self.t.len() || j < other.t.len() {
            if j == other.t.len() || (i < self.t.len() && self.t[i].0 < other.t[j].0) {
                t.push(self.t[i]);
                i += 1;
            } else if i == self.t.len() || other.t[j].0 < self.t[i].0 {
                t.push(other.t[j]);
                j += 1;
            } else {
                t.push((self.t[i].0, self.t[i].1 + other.t[j].1));
                i += 1;
                j += 1;
            }
        }
        Some((SuperMonomial { t, u }, inversions % 2 == 1))
    }

    fn max_generator(&self) -> (Option<u32>, Option<u32>) {
        (self.t.last().map(|&(g, _)| g), self.u.last().copied())
    }
}

/// Monomial order: weight, then number of odd factors, then odd part
/// lexicographically, then even part lexicographically on dense exponents
/// (higher exponent of an earlier generator first).
impl Ord for SuperMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.u.len().cmp(&other.u.len()))
            .then_with(|| self.u.cmp(&other.u))
            .then_with(|| {
                for (a, b) in self.t.iter().zip(&other.t) {
                    let ord = a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                other.t.len().cmp(&self.t.len())
            })
    }
}

impl PartialOrd for SuperMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A linear combination of super monomials with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SuperElement {
    terms: BTreeMap<SuperMonomial, u32>,
}

impl SuperElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: SuperMonomial, coeff: u32, f: Fp) -> Self {
        let mut e = Self::zero();
        e.add_term(m, coeff, f);
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SuperMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: SuperMonomial, coeff: u32, f: Fp) {
        let coeff = coeff % f.modulus();
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), coeff);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SuperElement, f: Fp) -> SuperElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c, f);
        }
        out
    }

    pub fn scale(&self, k: u32, f: Fp) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), f.mul(c, k), f);
        }
        out
    }

    pub fn mul_monomial(&self, m: &SuperMonomial, f: Fp) -> SuperElement {
        let mut out = SuperElement::zero();
        for (a, c) in self.terms() {
            if let Some((prod, neg)) = a.mul(m) {
                out.add_term(prod, if neg { f.neg(c) } else { c }, f);
            }
        }
        out
    }

    pub fn mul(&self, other: &SuperElement, f: Fp) -> SuperElement {
        let mut out = SuperElement::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((prod, neg)) = a.mul(b) {
                    let c = f.mul(ca, cb);
                    out.add_term(prod, if neg { f.neg(c) } else { c }, f);
                }
            }
        }
        out
    }

    /// The common weight of all terms; `Ok(None)` for zero.
    pub fn weight(&self) -> Result<Option<usize>> {
        let mut it = self.terms.keys().map(SuperMonomial::weight);
        let Some(w) = it.next() else {
            return Ok(None);
        };
        match it.find(|&x| x != w) {
            Some(other) => Err(Error::Inhomogeneous(w, other)),
            None => Ok(Some(w)),
        }
    }
}

/// Number of monomials of weight `w` in `even` t-generators and `odd`
/// u-generators: Σ_j C(odd, j)·C((w−j)/2 + even − 1, even − 1).
pub fn free_count(even: usize, odd: usize, w: usize) -> u128 {
    (0..=odd.min(w))
        .filter(|j| (w - j).is_multiple_of(2))
        .map(|j| binomial(odd as u128, j as u128) * multiset_count(even, (w - j) / 2))
        .sum()
}

/// Number of degree-`d` monomials in `vars` commuting variables.
pub(crate) fn multiset_count(vars: usize, d: usize) -> u128 {
    if vars == 0 {
        return u128::from(d == 0);
    }
    binomial((d + vars - 1) as u128, (vars - 1) as u128)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All dense exponent vectors of length `vars` with total `d`, in
/// lexicographically decreasing order.
pub(crate) fn exponent_vectors(vars: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(d as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u32);
            rec(vars, d - e, prefix, out);
            prefix.pop();
        }
    }
    if vars == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(vars, d, &mut Vec::with_capacity(vars), &mut out);
    out
}

/// All monomials of weight exactly `w`, sorted by the monomial order.
pub fn free_monomials(even: usize, odd: usize, w: usize) -> Vec<SuperMonomial> {
    let mut out = Vec::new();
    for j in (0..=odd.min(w)).filter(|j| (w - j).is_multiple_of(2)) {
        let t_parts = exponent_vectors(even, (w - j) / 2);
        for u in (0..odd as u32).combinations(j) {
            for t in &t_parts {
                out.push(SuperMonomial::from_parts(t, u.clone()));
            }
        }
    }
    out.sort();
    out
}

/// Generators indexed by an arrangement of lines, plus homogeneous relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    ctx: GroupContext,
    /// Even generators `t_L`, one per line, sorted.
    lines: Vec<Line>,
    /// Odd generators, sorted; `u_j` is attached to the character `odd[j]`.
    odd: Vec<Character>,
    relations: Vec<SuperElement>,
}

impl Presentation {
    /// Checks that relations are homogeneous, nonzero, and only use
    /// declared generators.
    pub fn new(
        ctx: GroupContext,
        lines: Vec<Line>,
        odd: Vec<Character>,
        relations: Vec<SuperElement>,
    ) -> Result<Self> {
        debug_assert!(lines.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(odd.windows(2).all(|w| w[0] < w[1]));
        let mut kept = Vec::with_capacity(relations.len());
        for r in relations {
            if r.weight()?.is_none() {
                continue;
            }
            for (m, _) in r.terms() {
                let (te, uo) = m.max_generator();
                if let Some(g) = te.filter(|&g| g as usize >= lines.len()) {
                    return Err(Error::UnknownGenerator {
                        index: g,
                        count: lines.len(),
                    });
                }
                if let Some(g) = uo.filter(|&g| g as usize >= odd.len()) {
                    return Err(Error::UnknownGenerator {
                        index: g,
                        count: odd.len(),
                    });
                }
            }
            kept.push(r);
        }
        Ok(Presentation {
            ctx,
            lines,
            odd,
            relations: kept,
        })
    }

    /// The free algebra on `t_L, u_L` for the given lines.
    pub fn free(ctx: GroupContext, lines: Vec<Line>) -> Self {
        let odd = lines.iter().map(|l| l.rep().clone()).collect();
        Presentation {
            ctx,
            lines,
            odd,
            relations: Vec::new(),
        }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn odd_generators(&self) -> &[Character] {
        &self.odd
    }

    pub fn relations(&self) -> &[SuperElement] {
        &self.relations
    }

    pub fn with_relations(&self, relations: Vec<SuperElement>) -> Result<Self> {
        Presentation::new(self.ctx, self.lines.clone(), self.odd.clone(), relations)
    }

    pub fn free_monomials(&self, w: usize) -> Vec<SuperMonomial> {
        free_monomials(self.lines.len(), self.odd.len(), w)
    }

    pub fn free_count(&self, w: usize) -> u128 {
        free_count(self.lines.len(), self.odd.len(), w)
    }

    /// Row-reduces the weight-`w` Macaulay matrix. Returns the column basis
    /// and the echelon form.
    fn macaulay(&self, w: usize) -> (Vec<SuperMonomial>, Echelon) {
        let f = self.ctx.field();
        let columns = self.free_monomials(w);
        let index: HashMap<&SuperMonomial, usize> =
            columns.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ech = Echelon::new(f, columns.len());
        let mut by_weight: BTreeMap<usize, Vec<&SuperElement>> = BTreeMap::new();
        for r in &self.relations {
            if let Ok(Some(rw)) = r.weight() {
                if rw <= w {
                    by_weight.entry(rw).or_default().push(r);
                }
            }
        }
        let mut row: SparseRow = Vec::new();
        'outer: for (rw, rels) in by_weight {
            let multipliers = self.free_monomials(w - rw);
            for r in rels {
                for m in &multipliers {
                    if ech.is_full() {
                        break 'outer;
                    }
                    row.clear();
                    for (a, c) in r.terms() {
                        if let Some((prod, neg)) = a.mul(m) {
                            row.push((index[&prod], if neg { f.neg(c) } else { c }));
                        }
                    }
                    ech.insert(&row);
                }
            }
        }
        (columns, ech)
    }

    /// Dimension over F_p of the weight-`w` part of the quotient algebra.
    pub fn quotient_dimension(&self, w: usize) -> usize {
        let (columns, ech) = self.macaulay(w);
        columns.len() - ech.rank()
    }

    /// Monomials of weight `w` whose images form a basis of the quotient:
    /// the pivot-free columns of the echelon Macaulay matrix.
    pub fn monomial_basis(&self, w: usize) -> Vec<SuperMonomial> {
        let (columns, ech) = self.macaulay(w);
        ech.free_columns()
            .into_iter()
            .map(|c| columns[c].clone())
            .collect()
    }

    /// Quotient dimensions for weights `0..=cutoff`.
    pub fn hilbert(&self, cutoff: usize) -> Vec<u64> {
        par::map_range(0..cutoff + 1, |w| self.quotient_dimension(w) as u64)
    }

    /// Human-readable form, e.g. `t(1,0)^2*u(0,1)`.
    pub fn render(&self, m: &SuperMonomial) -> String {
        if m.t.is_empty() && m.u.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for &(g, e) in &m.t {
            let mut s = format!("t{}", self.lines[g as usize]);
            if e > 1 {
                let _ = write!(s, "^{e}");
            }
            parts.push(s);
        }
        for &g in &m.u {
            parts.push(format!("u{}", self.odd[g as usize]));
        }
        parts.join("*")
    }

    pub fn render_element(&self, e: &SuperElement) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        e.terms()
            .map(|(m, c)| format!("{c}*{}", self.render(m)))
            .join(" + ")
    }
}
