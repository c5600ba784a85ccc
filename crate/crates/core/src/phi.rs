//! The presentation of Φ^G(HZ/p)_* by generators `t_α, u_α` and the four
//! relation families on zero-sum triples, the closed-form Poincaré series,
//! and the three-way verification against the localized Borel ring.

use serde::{Deserialize, Serialize};

use crate::charspace::{
    canonicalize, enumerate_lines, zero_sum_triples, Character, GroupContext, Line,
};
use crate::error::{Error, Result};
use crate::oracle::{subring_hilbert, Oracle};
use crate::series::{HilbertSeries, Source};
use crate::superalg::{binomial, Presentation, SuperElement, SuperMonomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationFamily {
    /// `t_α t_β + t_β t_γ + t_γ t_α`
    TTriple,
    /// `u_α t_β + u_α t_γ − u_β t_γ − u_γ t_β`, for the `i`-th cyclic
    /// rotation of `(α, β, γ)`.
    Mixed(u8),
    /// `u_α u_β + u_β u_γ + u_γ u_α`
    UTriple,
}

/// A relation together with the character triple it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantiatedRelation {
    pub family: RelationFamily,
    pub characters: [Character; 3],
    pub element: SuperElement,
}

/// Generator lookup for characters: `t_χ = k^{-1}·t_L` for `χ = k·L`, and
/// `u_χ` either identified with `u_L` (line-indexed) or kept per character.
struct Generators<'a> {
    ctx: &'a GroupContext,
    lines: &'a [Line],
    odd: &'a [Character],
    line_indexed_u: bool,
}

impl Generators<'_> {
    fn t(&self, chi: &Character) -> SuperElement {
        let f = self.ctx.field();
        let (line, k) = canonicalize(self.ctx, chi).expect("nonzero character");
        let g = self
            .lines
            .binary_search(&line)
            .expect("line in arrangement");
        SuperElement::monomial(SuperMonomial::t(g as u32), f.inv(k), f)
    }

    fn u(&self, chi: &Character) -> SuperElement {
        let f = self.ctx.field();
        let g = if self.line_indexed_u {
            let (line, _) = canonicalize(self.ctx, chi).expect("nonzero character");
            self.lines
                .binary_search(&line)
                .expect("line in arrangement")
        } else {
            self.odd
                .binary_search(chi)
                .expect("character is a generator")
        };
        SuperElement::monomial(SuperMonomial::u(g as u32), 1, f)
    }

    /// The four families on one character triple, mixed ones in all three
    /// cyclic rotations.
    fn families(&self, chars: &[Character; 3]) -> Vec<InstantiatedRelation> {
        let f = self.ctx.field();
        let [a, b, c] = chars;
        let (ta, tb, tc) = (self.t(a), self.t(b), self.t(c));
        let (ua, ub, uc) = (self.u(a), self.u(b), self.u(c));
        let mut out = Vec::with_capacity(5);
        let t_triple = ta
            .mul(&tb, f)
            .add(&tb.mul(&tc, f), f)
            .add(&tc.mul(&ta, f), f);
        out.push((RelationFamily::TTriple, t_triple));
        let rotations = [
            (&ua, &ub, &uc, &tb, &tc),
            (&ub, &uc, &ua, &tc, &ta),
            (&uc, &ua, &ub, &ta, &tb),
        ];
        for (i, (u0, u1, u2, t1, t2)) in rotations.into_iter().enumerate() {
            let minus = f.neg(1);
            let mixed = u0
                .mul(t1, f)
                .add(&u0.mul(t2, f), f)
                .add(&u1.mul(t2, f).scale(minus, f), f)
                .add(&u2.mul(t1, f).scale(minus, f), f);
            out.push((RelationFamily::Mixed(i as u8), mixed));
        }
        let u_triple = ua
            .mul(&ub, f)
            .add(&ub.mul(&uc, f), f)
            .add(&uc.mul(&ua, f), f);
        out.push((RelationFamily::UTriple, u_triple));
        out.into_iter()
            .map(|(family, element)| InstantiatedRelation {
                family,
                characters: chars.clone(),
                element,
            })
            .collect()
    }
}

/// Unordered triples `{α, β, γ}` of nonzero characters with `α+β+γ = 0`,
/// including those lying on a single line.
fn character_triples(ctx: &GroupContext) -> Vec<[Character; 3]> {
    let f = ctx.field();
    let chars = ctx.nonzero_characters();
    let mut out = Vec::new();
    for (i, a) in chars.iter().enumerate() {
        for b in &chars[i..] {
            let c = a.add(f, b).scale(f, f.neg(1));
            if !c.is_zero() && b <= &c {
                out.push([a.clone(), b.clone(), c]);
            }
        }
    }
    out
}

/// Relations for the arrangement `lines` with line-indexed generators:
/// every family on every zero-sum triple of distinct lines in `lines`.
pub fn arrangement_relations(ctx: &GroupContext, lines: &[Line]) -> Vec<InstantiatedRelation> {
    let f = ctx.field();
    let odd: Vec<Character> = lines.iter().map(|l| l.rep().clone()).collect();
    let gens = Generators {
        ctx,
        lines,
        odd: &odd,
        line_indexed_u: true,
    };
    zero_sum_triples(ctx, lines)
        .iter()
        .flat_map(|tr| gens.families(&tr.characters(f)))
        .collect()
}

/// Relations of the verbatim ideal: one odd generator per nonzero
/// character, the four families on every character triple summing to zero.
pub fn verbatim_relations(ctx: &GroupContext) -> Vec<InstantiatedRelation> {
    let lines = enumerate_lines(ctx);
    let odd = ctx.nonzero_characters();
    let gens = Generators {
        ctx,
        lines: &lines,
        odd: &odd,
        line_indexed_u: false,
    };
    character_triples(ctx)
        .iter()
        .flat_map(|tr| gens.families(tr))
        .collect()
}

/// Presentation over the lines of `lines` (t and u both line-indexed).
pub fn arrangement_presentation(ctx: &GroupContext, lines: &[Line]) -> Result<Presentation> {
    let mut lines = lines.to_vec();
    lines.sort();
    lines.dedup();
    let relations = arrangement_relations(ctx, &lines)
        .into_iter()
        .map(|r| r.element)
        .collect();
    let odd = lines.iter().map(|l| l.rep().clone()).collect();
    Presentation::new(*ctx, lines, odd, relations)
}

/// All relations of the Φ presentation in the chosen mode.
pub fn phi_relations(ctx: &GroupContext, verbatim: bool) -> Vec<InstantiatedRelation> {
    if verbatim {
        verbatim_relations(ctx)
    } else {
        arrangement_relations(ctx, &enumerate_lines(ctx))
    }
}

/// The presentation of Φ^G(HZ/p)_*. By default `u_{kα}` is identified with
/// `u_α`; with `verbatim` there is one odd generator per nonzero character.
pub fn build_phi_presentation(ctx: &GroupContext, verbatim: bool) -> Result<Presentation> {
    let lines = enumerate_lines(ctx);
    if !verbatim {
        return arrangement_presentation(ctx, &lines);
    }
    let relations = verbatim_relations(ctx)
        .into_iter()
        .map(|r| r.element)
        .collect();
    Presentation::new(*ctx, lines, ctx.nonzero_characters(), relations)
}

/// Power-series expansion of ∏_{i=1}^{n} (1 + (p^{i−1} − 1)x) / (1 − x)^n.
pub fn closed_form_series(ctx: &GroupContext, cutoff: usize) -> Result<HilbertSeries> {
    let overflow = || Error::Overflow("closed-form series");
    let n = ctx.n();
    let mut numer: Vec<u128> = vec![1];
    for i in 0..n {
        let a = (ctx.p() as u128).pow(i as u32) - 1;
        let mut next = vec![0u128; numer.len() + 1];
        for (k, &c) in numer.iter().enumerate() {
            next[k] = next[k].checked_add(c).ok_or_else(overflow)?;
            next[k + 1] = c.checked_mul(a).ok_or_else(overflow)?;
        }
        numer = next;
    }
    let coeffs = (0..=cutoff)
        .map(|d| {
            let mut acc = 0u128;
            for (k, &c) in numer.iter().enumerate().take(d + 1) {
                let b = binomial((d - k + n - 1) as u128, (n - 1) as u128);
                acc = c
                    .checked_mul(b)
                    .and_then(|x| acc.checked_add(x))
                    .ok_or_else(overflow)?;
            }
            u64::try_from(acc).map_err(|_| overflow())
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(HilbertSeries::new(Source::ClosedForm, coeffs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub weight: usize,
    pub closed_form: u64,
    pub presentation: u64,
    pub oracle: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    pub p: u32,
    pub n: usize,
    pub cutoff: usize,
    pub verbatim: bool,
    pub relation_count: usize,
    pub closed_form: HilbertSeries,
    pub presentation: HilbertSeries,
    pub oracle: HilbertSeries,
    /// Per weight: all three dimensions agree.
    pub agree: Vec<bool>,
    pub oracle_le_presentation: bool,
    pub mismatches: Vec<Mismatch>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.oracle_le_presentation && self.agree.iter().all(|&b| b)
    }
}

/// Compares the closed form, the presentation's quotient dimensions and
/// the oracle's subring dimensions for weights `0..=cutoff`.
pub fn verify_phi(ctx: &GroupContext, cutoff: usize, verbatim: bool) -> Result<PhiReport> {
    let closed_form = closed_form_series(ctx, cutoff)?;
    let pres = build_phi_presentation(ctx, verbatim)?;
    let presentation = HilbertSeries::new(Source::Presentation, pres.hilbert(cutoff));
    let oracle = subring_hilbert(ctx, &enumerate_lines(ctx), cutoff);
    let mut agree = Vec::with_capacity(cutoff + 1);
    let mut mismatches = Vec::new();
    for w in 0..=cutoff {
        let (c, q, o) = (
            closed_form.coeffs[w],
            presentation.coeffs[w],
            oracle.coeffs[w],
        );
        let ok = c == q && q == o;
        agree.push(ok);
        if !ok {
            mismatches.push(Mismatch {
                weight: w,
                closed_form: c,
                presentation: q,
                oracle: o,
            });
        }
    }
    Ok(PhiReport {
        p: ctx.p(),
        n: ctx.n(),
        cutoff,
        verbatim,
        relation_count: pres.relations().len(),
        oracle_le_presentation: oracle.dominated_by(&presentation),
        closed_form,
        presentation,
        oracle,
        agree,
        mismatches,
    })
}

/// Checks that every instantiated relation maps to zero in the localized
/// Borel ring. Returns the relations that do not.
pub fn nonvanishing_relations(ctx: &GroupContext, verbatim: bool) -> Vec<InstantiatedRelation> {
    let pres = build_phi_presentation(ctx, verbatim).expect("valid presentation");
    let oracle = Oracle::for_presentation(&pres);
    phi_relations(ctx, verbatim)
        .into_iter()
        .filter(|r| !oracle.relation_image(&r.element).is_zero())
        .collect()
}
