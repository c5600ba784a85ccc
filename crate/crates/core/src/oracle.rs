//! The localized Borel ring
//! (∏ z_α)^{-1} F_p[x_1,…,x_n] ⊗ Λ[dx_1,…,dx_n]
//! as ground truth for the super-algebra presentations.
//!
//! `t_α` embeds as `1/z_α` and `u_α` as `dz_α/z_α`, where `z_α = Σ α_i x_i`.
//! Fractions are never normalized: equality and ranks are computed on
//! numerators cleared to a common product of Euler classes, which is
//! faithful because each `z_α` is a nonzero-divisor.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::charspace::{canonicalize, Character, GroupContext, Line};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::Echelon;
use crate::par;
use crate::series::{HilbertSeries, Source};
use crate::superalg::{
    exponent_vectors, free_monomials, Presentation, SuperElement, SuperMonomial,
};

/// `x^a · dx_T`, with `T` a bitmask over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BorelMonomial {
    pub x: Vec<u32>,
    pub dx: u32,
}

/// Element of F_p[x_1,…,x_n] ⊗ Λ[dx_1,…,dx_n].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyExtElement {
    n: usize,
    terms: BTreeMap<BorelMonomial, u32>,
}

/// Sign of `dx_S ∧ dx_T` relative to `dx_{S∪T}`; `None` if they overlap.
fn wedge_sign(s: u32, t: u32) -> Option<bool> {
    if s & t != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let i = rest.trailing_zeros();
        // dx_i moves left past every element of S above i
        swaps += (s >> (i + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(swaps % 2 == 1)
}

impl PolyExtElement {
    pub fn zero(n: usize) -> Self {
        PolyExtElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        let mut e = Self::zero(n);
        e.terms.insert(
            BorelMonomial {
                x: vec![0; n],
                dx: 0,
            },
            1,
        );
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BorelMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: BorelMonomial, c: u32, f: Fp) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(m).or_insert(0);
        *slot = f.add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &PolyExtElement, f: Fp) -> PolyExtElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c, f);
        }
        out
    }

    pub fn scale(&self, k: u32, f: Fp) -> PolyExtElement {
        let mut out = PolyExtElement::zero(self.n);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), f.mul(c, k), f);
        }
        out
    }

    pub fn mul(&self, other: &PolyExtElement, f: Fp) -> PolyExtElement {
        let mut out = PolyExtElement::zero(self.n);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let Some(neg) = wedge_sign(a.dx, b.dx) else {
                    continue;
                };
                let x = a.x.iter().zip(&b.x).map(|(i, j)| i + j).collect();
                let c = f.mul(ca, cb);
                out.add_term(
                    BorelMonomial { x, dx: a.dx | b.dx },
                    if neg { f.neg(c) } else { c },
                    f,
                );
            }
        }
        out
    }

    pub fn pow(&self, e: u32, f: Fp) -> PolyExtElement {
        (0..e).fold(PolyExtElement::one(self.n), |acc, _| acc.mul(self, f))
    }

    /// `(polynomial degree, dx count)` if all terms share it.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self
            .terms
            .keys()
            .map(|m| (m.x.iter().sum::<u32>(), m.dx.count_ones()));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }
}

/// The Euler class `z_χ = Σ χ_i x_i`.
pub fn euler_class(ctx: &GroupContext, chi: &Character) -> PolyExtElement {
    let f = ctx.field();
    let n = ctx.n();
    let mut e = PolyExtElement::zero(n);
    for (i, &c) in chi.coords().iter().enumerate() {
        let mut x = vec![0; n];
        x[i] = 1;
        e.add_term(BorelMonomial { x, dx: 0 }, c, f);
    }
    e
}

/// `dz_χ = Σ χ_i dx_i`.
pub fn d_euler_class(ctx: &GroupContext, chi: &Character) -> PolyExtElement {
    let f = ctx.field();
    let n = ctx.n();
    let mut e = PolyExtElement::zero(n);
    for (i, &c) in chi.coords().iter().enumerate() {
        e.add_term(
            BorelMonomial {
                x: vec![0; n],
                dx: 1 << i,
            },
            c,
            f,
        );
    }
    e
}

/// `numerator / ∏_L z_L^{denom[L]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalizedBorelElement {
    pub numerator: PolyExtElement,
    pub denom: BTreeMap<Line, u32>,
}

impl LocalizedBorelElement {
    pub fn zero(n: usize) -> Self {
        LocalizedBorelElement {
            numerator: PolyExtElement::zero(n),
            denom: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn denominator_poly(ctx: &GroupContext, denom: &BTreeMap<Line, u32>) -> PolyExtElement {
        let f = ctx.field();
        denom
            .iter()
            .fold(PolyExtElement::one(ctx.n()), |acc, (l, &e)| {
                acc.mul(&euler_class(ctx, l.rep()).pow(e, f), f)
            })
    }

    /// Rewrites over the denominator `target`, which must dominate ours.
    fn over(&self, ctx: &GroupContext, target: &BTreeMap<Line, u32>) -> PolyExtElement {
        let extra: BTreeMap<Line, u32> = target
            .iter()
            .map(|(l, &e)| {
                let have = self.denom.get(l).copied().unwrap_or(0);
                debug_assert!(have <= e);
                (l.clone(), e - have)
            })
            .filter(|&(_, e)| e > 0)
            .collect();
        self.numerator
            .mul(&Self::denominator_poly(ctx, &extra), ctx.field())
    }

    fn lcm(a: &BTreeMap<Line, u32>, b: &BTreeMap<Line, u32>) -> BTreeMap<Line, u32> {
        let mut out = a.clone();
        for (l, &e) in b {
            let slot = out.entry(l.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        out
    }

    pub fn add(&self, other: &Self, ctx: &GroupContext) -> Self {
        let denom = Self::lcm(&self.denom, &other.denom);
        let numerator = self
            .over(ctx, &denom)
            .add(&other.over(ctx, &denom), ctx.field());
        LocalizedBorelElement { numerator, denom }
    }

    pub fn mul(&self, other: &Self, ctx: &GroupContext) -> Self {
        let mut denom = self.denom.clone();
        for (l, &e) in &other.denom {
            *denom.entry(l.clone()).or_insert(0) += e;
        }
        LocalizedBorelElement {
            numerator: self.numerator.mul(&other.numerator, ctx.field()),
            denom,
        }
    }

    pub fn scale(&self, k: u32, ctx: &GroupContext) -> Self {
        LocalizedBorelElement {
            numerator: self.numerator.scale(k, ctx.field()),
            denom: self.denom.clone(),
        }
    }

    /// Equality of fractions by cross-multiplication.
    pub fn equals(&self, other: &Self, ctx: &GroupContext) -> bool {
        let f = ctx.field();
        let lhs = self
            .numerator
            .mul(&Self::denominator_poly(ctx, &other.denom), f);
        let rhs = other
            .numerator
            .mul(&Self::denominator_poly(ctx, &self.denom), f);
        lhs == rhs
    }
}

/// Embedding of a free super-algebra (even generators on lines, odd
/// generators on characters) into the localized Borel ring.
#[derive(Debug, Clone)]
pub struct Oracle {
    ctx: GroupContext,
    even: Vec<Line>,
    odd: Vec<Character>,
    /// Distinct lines occurring in any denominator.
    denom_lines: Vec<Line>,
    even_slot: Vec<usize>,
    /// For odd generator `u_χ` with `χ = k·L`: slot of `L` and `k^{-1}`.
    odd_slot: Vec<(usize, u32)>,
}

impl Oracle {
    pub fn new(ctx: GroupContext, even: &[Line], odd: &[Character]) -> Result<Self> {
        let f = ctx.field();
        let mut odd_lines = Vec::with_capacity(odd.len());
        for chi in odd {
            odd_lines.push(canonicalize(&ctx, chi)?);
        }
        let mut denom_lines: Vec<Line> = even
            .iter()
            .cloned()
            .chain(odd_lines.iter().map(|(l, _)| l.clone()))
            .collect();
        denom_lines.sort();
        denom_lines.dedup();
        let slot = |l: &Line| denom_lines.binary_search(l).unwrap();
        let even_slot = even.iter().map(slot).collect();
        let odd_slot = odd_lines
            .iter()
            .map(|(l, k)| (slot(l), f.inv(*k)))
            .collect();
        Ok(Oracle {
            ctx,
            even: even.to_vec(),
            odd: odd.to_vec(),
            denom_lines,
            even_slot,
            odd_slot,
        })
    }

    pub fn for_presentation(pres: &Presentation) -> Self {
        Oracle::new(*pres.ctx(), pres.lines(), pres.odd_generators())
            .expect("presentation generators are nonzero")
    }

    /// Oracle for the free algebra on `t_L, u_L` for the given lines.
    pub fn for_lines(ctx: GroupContext, lines: &[Line]) -> Self {
        let odd: Vec<Character> = lines.iter().map(|l| l.rep().clone()).collect();
        Oracle::new(ctx, lines, &odd).expect("line representatives are nonzero")
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    fn t_image(&self, g: u32) -> LocalizedBorelElement {
        let line = &self.even[g as usize];
        LocalizedBorelElement {
            numerator: PolyExtElement::one(self.ctx.n()),
            denom: BTreeMap::from([(line.clone(), 1)]),
        }
    }

    fn u_image(&self, g: u32) -> LocalizedBorelElement {
        let chi = &self.odd[g as usize];
        let (slot, _) = self.odd_slot[g as usize];
        // dz_χ / z_χ with z_χ = k·z_L
        let (_, k) = canonicalize(&self.ctx, chi).expect("nonzero");
        let f = self.ctx.field();
        LocalizedBorelElement {
            numerator: d_euler_class(&self.ctx, chi).scale(f.inv(k), f),
            denom: BTreeMap::from([(self.denom_lines[slot].clone(), 1)]),
        }
    }

    /// Image of a monomial: `t_L ↦ 1/z_L`, `u_χ ↦ dz_χ/z_χ`.
    pub fn embed(&self, m: &SuperMonomial) -> LocalizedBorelElement {
        let mut acc = LocalizedBorelElement {
            numerator: PolyExtElement::one(self.ctx.n()),
            denom: BTreeMap::new(),
        };
        for &(g, e) in m.t_exps() {
            for _ in 0..e {
                acc = acc.mul(&self.t_image(g), &self.ctx);
            }
        }
        for &g in m.u_set() {
            acc = acc.mul(&self.u_image(g), &self.ctx);
        }
        acc
    }

    /// Linear extension of [`Oracle::embed`].
    pub fn relation_image(&self, r: &SuperElement) -> LocalizedBorelElement {
        r.terms()
            .fold(LocalizedBorelElement::zero(self.ctx.n()), |acc, (m, c)| {
                acc.add(&self.embed(m).scale(c, &self.ctx), &self.ctx)
            })
    }

    /// Rank over F_p of the images of `ms`, all of weight `w`.
    pub fn span_rank(&self, ms: &[SuperMonomial], w: usize) -> Result<usize> {
        let f = self.ctx.field();
        let elems: Vec<SuperElement> = ms
            .iter()
            .map(|m| SuperElement::monomial(m.clone(), 1, f))
            .collect();
        self.span_rank_elements(&elems, w)
    }

    /// Rank over F_p of the images of homogeneous elements of weight `w`.
    pub fn span_rank_elements(&self, elems: &[SuperElement], w: usize) -> Result<usize> {
        for e in elems {
            match e.weight()? {
                Some(x) if x != w => return Err(Error::Inhomogeneous(w, x)),
                _ => {}
            }
        }
        let f = self.ctx.field();
        let n = self.ctx.n();
        let slots = self.denom_lines.len();
        let denom_of = |m: &SuperMonomial| {
            let mut d = vec![0u32; slots];
            for &(g, e) in m.t_exps() {
                d[self.even_slot[g as usize]] += e;
            }
            for &g in m.u_set() {
                d[self.odd_slot[g as usize].0] += 1;
            }
            d
        };

        // Common denominator: componentwise max over every monomial.
        let mut common = vec![0u32; slots];
        let mut max_j = None;
        for e in elems {
            for (m, _) in e.terms() {
                if m.odd_len() > n {
                    continue;
                }
                for (c, d) in common.iter_mut().zip(denom_of(m)) {
                    *c = (*c).max(d);
                }
                max_j = max_j.max(Some(m.odd_len()));
            }
        }
        let Some(max_j) = max_j else {
            return Ok(0);
        };
        let total: usize = common.iter().map(|&c| c as usize).sum();

        // Cleared numerators live in bidegree (total − (w + j)/2, j); lay the
        // column blocks for j = 0..=max_j side by side.
        let degree = |j: usize| total - (w + j) / 2;
        let top = (0..=max_j)
            .filter(|j| (w + j).is_multiple_of(2))
            .map(degree)
            .max()
            .unwrap_or(0);
        let forms = DenseForms::new(n, top);
        let mut mask_rank = vec![0usize; 1 << n];
        let mut per_size = vec![0usize; n + 1];
        for mask in 0u32..1 << n {
            let j = mask.count_ones() as usize;
            mask_rank[mask as usize] = per_size[j];
            per_size[j] += 1;
        }
        let mut offset = vec![0usize; max_j + 2];
        for j in 0..=max_j {
            let size = if (w + j).is_multiple_of(2) {
                forms.len(degree(j)) * per_size[j]
            } else {
                0
            };
            offset[j + 1] = offset[j] + size;
        }
        let euler: Vec<&[u32]> = self.denom_lines.iter().map(|l| l.coords()).collect();

        let mut ech = Echelon::new(f, offset[max_j + 1]);
        let mut row = Vec::new();
        for e in elems {
            if ech.is_full() {
                break;
            }
            row.clear();
            for (m, coeff) in e.terms() {
                let j = m.odd_len();
                if j > n {
                    continue;
                }
                let wedge = self.wedge(m, f);
                if wedge.is_empty() {
                    continue;
                }
                let d = denom_of(m);
                let mut poly = vec![1u32];
                let mut deg = 0;
                for (s, &c) in common.iter().enumerate() {
                    for _ in d[s]..c {
                        poly = forms.mul_linear(&poly, deg, euler[s], f);
                        deg += 1;
                    }
                }
                debug_assert_eq!(deg, degree(j));
                for (pi, &pc) in poly.iter().enumerate() {
                    if pc == 0 {
                        continue;
                    }
                    let pc = f.mul(pc, coeff);
                    for &(mask, wc) in &wedge {
                        let col = offset[j] + pi * per_size[j] + mask_rank[mask as usize];
                        row.push((col, f.mul(pc, wc)));
                    }
                }
            }
            ech.insert(&row);
        }
        Ok(ech.rank())
    }

    /// Coefficients of `k^{-1}·dz_{χ_1} ∧ ⋯ ∧ dz_{χ_j}` (the odd part of
    /// the cleared numerator) as `(mask, coeff)` pairs.
    fn wedge(&self, m: &SuperMonomial, f: Fp) -> Vec<(u32, u32)> {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::from([(0, 1)]);
        for &g in m.u_set() {
            let chi = &self.odd[g as usize];
            let scale = self.odd_slot[g as usize].1;
            let mut next = BTreeMap::new();
            for (&mask, &c) in &acc {
                for (i, &a) in chi.coords().iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let Some(neg) = wedge_sign(mask, 1 << i) else {
                        continue;
                    };
                    let v = f.mul(f.mul(c, a), scale);
                    let slot: &mut u32 = next.entry(mask | 1 << i).or_insert(0);
                    *slot = if neg {
                        f.sub(*slot, v)
                    } else {
                        f.add(*slot, v)
                    };
                }
            }
            next.retain(|_, v| *v != 0);
            acc = next;
        }
        acc.into_iter().collect()
    }
}

/// Dense homogeneous polynomials in `n` variables up to a fixed degree,
/// with precomputed multiplication-by-variable tables.
#[derive(Debug, Clone)]
struct DenseForms {
    /// `shift[d][i][v]`: index in degree `d+1` of monomial `i` of degree `d`
    /// times `x_v`.
    shift: Vec<Vec<Vec<usize>>>,
    sizes: Vec<usize>,
}

impl DenseForms {
    fn new(n: usize, max_degree: usize) -> Self {
        let exps: Vec<Vec<Vec<u32>>> = (0..=max_degree).map(|d| exponent_vectors(n, d)).collect();
        let index: Vec<HashMap<&Vec<u32>, usize>> = exps
            .iter()
            .map(|es| es.iter().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();
        let shift = (0..max_degree)
            .map(|d| {
                exps[d]
                    .iter()
                    .map(|e| {
                        (0..n)
                            .map(|v| {
                                let mut up = e.clone();
                                up[v] += 1;
                                index[d + 1][&up]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DenseForms {
            shift,
            sizes: exps.iter().map(Vec::len).collect(),
        }
    }

    fn len(&self, d: usize) -> usize {
        self.sizes[d]
    }

    fn mul_linear(&self, poly: &[u32], d: usize, form: &[u32], f: Fp) -> Vec<u32> {
        let mut out = vec![0u32; self.sizes[d + 1]];
        for (i, &c) in poly.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (v, &a) in form.iter().enumerate() {
                if a != 0 {
                    let k = self.shift[d][i][v];
                    out[k] = f.add(out[k], f.mul(c, a));
                }
            }
        }
        out
    }
}

/// Hilbert function of the subring generated by `t_L, u_L` for `L` in
/// `lines`, for weights `0..=cutoff`.
pub fn subring_hilbert(ctx: &GroupContext, lines: &[Line], cutoff: usize) -> HilbertSeries {
    let oracle = Oracle::for_lines(*ctx, lines);
    let coeffs = par::map_range(0..cutoff + 1, |w| {
        let ms = free_monomials(lines.len(), lines.len(), w);
        oracle
            .span_rank(&ms, w)
            .expect("homogeneous by construction") as u64
    });
    HilbertSeries::new(Source::Oracle, coeffs)
}
