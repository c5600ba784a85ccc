//! The ring R_{p,n} of RO(G)⁺-graded coefficients (degrees k − V with
//! V^G = 0) and the Z-graded localizations Q_{p,n,S}.
//!
//! The classes `a_α` are never materialized: a piece of R with fixed
//! representation V = ⊕ m(α)·α is the span of the words
//! ∏_α (a_α t_α)^{m(α)−j(α)} (a_α u_α)^{j(α)}, so its dimension is the
//! oracle rank of the images ∏ t_α^{m−j} u_α^{j} in Φ.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::charspace::{canonicalize, enumerate_lines, Character, GroupContext, Line};
use crate::error::Result;
use crate::oracle::{subring_hilbert, Oracle};
use crate::par;
use crate::phi::arrangement_presentation;
use crate::series::{HilbertSeries, Source};
use crate::superalg::{SuperElement, SuperMonomial};

/// Names the 2-dimensional real irreducible attached to `{χ, −χ}`, as
/// `k·L.rep` with `1 ≤ k ≤ (p−1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrrepLabel {
    line: Line,
    scalar: u32,
}

impl IrrepLabel {
    pub fn new(ctx: &GroupContext, chi: &Character) -> Result<Self> {
        let (line, k) = canonicalize(ctx, chi)?;
        let scalar = k.min(ctx.p() - k);
        Ok(IrrepLabel { line, scalar })
    }

    pub fn line(&self) -> &Line {
        &self.line
    }

    pub fn scalar(&self) -> u32 {
        self.scalar
    }

    pub fn character(&self, ctx: &GroupContext) -> Character {
        self.line.rep().scale(ctx.field(), self.scalar)
    }
}

/// All (p^n − 1)/2 labels, ordered by line then scalar.
pub fn all_labels(ctx: &GroupContext) -> Vec<IrrepLabel> {
    enumerate_lines(ctx)
        .into_iter()
        .flat_map(|line| {
            (1..=(ctx.p() - 1) / 2).map(move |scalar| IrrepLabel {
                line: line.clone(),
                scalar,
            })
        })
        .collect()
}

/// The piece `(HZ/p_G)_{k − V}` with `V = ⊕ m(α)·α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiDegree {
    pub m: BTreeMap<IrrepLabel, u32>,
    pub k: i64,
}

impl MultiDegree {
    pub fn new(m: BTreeMap<IrrepLabel, u32>, k: i64) -> Self {
        let m = m.into_iter().filter(|&(_, e)| e > 0).collect();
        MultiDegree { m, k }
    }

    pub fn total(&self) -> u64 {
        self.m.values().map(|&e| e as u64).sum()
    }

    pub fn describe(&self, ctx: &GroupContext) -> String {
        if self.m.is_empty() {
            return "0".into();
        }
        self.m
            .iter()
            .map(|(l, e)| format!("{}^{e}", l.character(ctx)))
            .join(" ")
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .m
            .iter()
            .map(|(l, e)| format!("{}x{}^{e}", l.scalar, l.line))
            .join(" ");
        write!(f, "[{parts}] k={}", self.k)
    }
}

/// Shared state for R_{p,n} computations.
#[derive(Debug, Clone)]
pub struct RoGraded {
    ctx: GroupContext,
    lines: Vec<Line>,
    oracle: Oracle,
}

impl RoGraded {
    pub fn new(ctx: &GroupContext) -> Self {
        let lines = enumerate_lines(ctx);
        let oracle = Oracle::for_lines(*ctx, &lines);
        RoGraded {
            ctx: *ctx,
            lines,
            oracle,
        }
    }

    /// Images in Φ of the words of a multidegree; vanishing words dropped.
    pub fn words(&self, md: &MultiDegree) -> Vec<SuperElement> {
        let total = md.total() as i64;
        if md.k < total || md.k > 2 * total {
            return Vec::new();
        }
        let f = self.ctx.field();
        let entries: Vec<(&IrrepLabel, u32)> = md.m.iter().map(|(l, &e)| (l, e)).collect();
        // Σ_α (2m(α) − j(α)) = k  ⇔  Σ j = 2·total − k
        let odd_needed = (2 * total - md.k) as u32;
        let mut out = Vec::new();
        for js in entries
            .iter()
            .map(|&(_, e)| 0..=e)
            .multi_cartesian_product()
        {
            if js.iter().sum::<u32>() != odd_needed {
                continue;
            }
            let mut word = SuperElement::monomial(SuperMonomial::one(), 1, f);
            for (&(label, e), &j) in entries.iter().zip(&js) {
                let g = self.lines.binary_search(&label.line).unwrap() as u32;
                // t over k·L is k^{-1}·t_L
                let t = SuperElement::monomial(SuperMonomial::t(g), f.inv(label.scalar), f);
                let u = SuperElement::monomial(SuperMonomial::u(g), 1, f);
                for _ in 0..e - j {
                    word = word.mul(&t, f);
                }
                for _ in 0..j {
                    word = word.mul(&u, f);
                }
            }
            if !word.is_zero() {
                out.push(word);
            }
        }
        out
    }

    /// Dimension of the piece; zero outside `Σm ≤ k ≤ 2Σm`.
    pub fn dimension(&self, md: &MultiDegree) -> usize {
        let words = self.words(md);
        if words.is_empty() {
            return 0;
        }
        self.oracle
            .span_rank_elements(&words, md.k as usize)
            .expect("words are homogeneous of weight k")
    }
}

pub fn ro_dimension(ctx: &GroupContext, md: &MultiDegree) -> usize {
    RoGraded::new(ctx).dimension(md)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoRow {
    /// `(character of the label, multiplicity)` in label order.
    pub multidegree: Vec<(Character, u32)>,
    pub k: i64,
    pub dim: u64,
}

/// `ro_dimension` over every multidegree with `Σm ≤ max_total` and every
/// `k` in `k_range`, ordered by total, then multiplicity vector, then `k`.
pub fn ro_table(
    ctx: &GroupContext,
    max_total: u32,
    k_range: std::ops::RangeInclusive<i64>,
) -> Vec<RoRow> {
    let ro = RoGraded::new(ctx);
    let labels = all_labels(ctx);
    let mut degrees: Vec<MultiDegree> = Vec::new();
    for total in 0..=max_total as usize {
        for combo in labels.iter().combinations_with_replacement(total) {
            let mut m = BTreeMap::new();
            for l in combo {
                *m.entry(l.clone()).or_insert(0) += 1;
            }
            for k in k_range.clone() {
                degrees.push(MultiDegree::new(m.clone(), k));
            }
        }
    }
    let dims = par::map(&degrees, |md| ro.dimension(md) as u64);
    degrees
        .into_iter()
        .zip(dims)
        .map(|(md, dim)| RoRow {
            multidegree: md.m.iter().map(|(l, &e)| (l.character(ctx), e)).collect(),
            k: md.k,
            dim,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub lines: Vec<Line>,
    pub oracle: HilbertSeries,
    pub presentation: HilbertSeries,
    pub agree: Vec<bool>,
    pub oracle_le_presentation: bool,
}

impl LocalizationReport {
    pub fn all_equal(&self) -> bool {
        self.agree.iter().all(|&b| b)
    }
}

/// Hilbert function of Q_{p,n,S} from the oracle, against the candidate
/// presentation that only uses zero-sum triples inside `lines`.
pub fn localized_hilbert(
    ctx: &GroupContext,
    lines: &[Line],
    cutoff: usize,
) -> Result<LocalizationReport> {
    if lines.is_empty() {
        return Err(crate::error::Error::EmptyArrangement);
    }
    let pres = arrangement_presentation(ctx, lines)?;
    let oracle = subring_hilbert(ctx, pres.lines(), cutoff);
    let presentation = HilbertSeries::new(Source::Presentation, pres.hilbert(cutoff));
    Ok(LocalizationReport {
        lines: pres.lines().to_vec(),
        agree: oracle.equal_flags(&presentation),
        oracle_le_presentation: oracle.dominated_by(&presentation),
        oracle,
        presentation,
    })
}

/// `size` distinct lines chosen uniformly.
pub fn random_arrangement<R: Rng + ?Sized>(
    ctx: &GroupContext,
    size: usize,
    rng: &mut R,
) -> Vec<Line> {
    let mut lines = enumerate_lines(ctx);
    lines.shuffle(rng);
    lines.truncate(size);
    lines.sort();
    lines
}
