//! Dimension bookkeeping for the cube spectral sequence.
//!
//! The generator `y_S` sits in filtration `s = |S|` and carries total weight
//! `|S|`; the module attached to it is a polynomial algebra on `rank(S)`
//! weight-2 generators tensor an exterior algebra on `rank(S)` weight-1
//! generators. E¹ sums over all `s`-subsets of G*∖{0}, E² only over the
//! echelon family F_n.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::charspace::{enumerate_fn, subset_rank_table, GroupContext};
use crate::error::Result;
use crate::par;
use crate::phi::closed_form_series;
use crate::series::{HilbertSeries, Source};

fn binom(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension in weight `e` of Sym on `r` weight-2 generators tensor Λ on
/// `r` weight-1 generators.
pub fn sym_ext_dim(r: usize, e: usize) -> BigUint {
    if r == 0 {
        return if e == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    (0..=r.min(e))
        .filter(|j| (e - j).is_multiple_of(2))
        .map(|j| binom(r, j) * binom((e - j) / 2 + r - 1, r - 1))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Page {
    E1,
    E2,
}

/// `entries[s][d]` for `0 ≤ s, d ≤ cutoff`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageTable {
    pub page: Page,
    pub cutoff: usize,
    #[serde(with = "decimal_grid")]
    pub entries: Vec<Vec<BigUint>>,
}

impl PageTable {
    pub fn get(&self, s: usize, d: usize) -> &BigUint {
        &self.entries[s][d]
    }

    /// Column sums over `s`.
    pub fn totals(&self) -> Vec<BigUint> {
        (0..=self.cutoff)
            .map(|d| self.entries.iter().map(|row| &row[d]).sum())
            .collect()
    }
}

/// Entries can exceed 64 bits on E¹, so they serialize as decimal strings.
mod decimal_grid {
    use super::*;

    pub fn serialize<S: Serializer>(grid: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<Vec<String>> = grid
            .iter()
            .map(|row| row.iter().map(|x| x.to_str_radix(10)).collect())
            .collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        let strings = Vec::<Vec<String>>::deserialize(d)?;
        strings
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| {
                        BigUint::parse_bytes(x.as_bytes(), 10)
                            .ok_or_else(|| serde::de::Error::custom(format!("bad integer {x:?}")))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Precomputed counts for one group: subset ranks and |F_n| by size.
#[derive(Debug, Clone)]
pub struct SpectralSequence {
    ctx: GroupContext,
    /// `rank_counts[s][r]`, filled lazily up to the largest `s` requested.
    rank_counts: Vec<Vec<BigUint>>,
    fn_by_size: Vec<u64>,
}

impl SpectralSequence {
    pub fn new(ctx: &GroupContext, s_max: usize) -> Self {
        let universe = (ctx.order() - 1) as usize;
        let rank_counts = subset_rank_table(ctx, s_max.min(universe));
        let mut fn_by_size = vec![0u64; ctx.n() + 1];
        for s in enumerate_fn(ctx) {
            fn_by_size[s.len()] += 1;
        }
        SpectralSequence {
            ctx: *ctx,
            rank_counts,
            fn_by_size,
        }
    }

    pub fn fn_sizes(&self) -> &[u64] {
        &self.fn_by_size
    }

    fn rank_count(&self, s: usize, r: usize) -> BigUint {
        if s >= self.rank_counts.len() {
            let universe = (self.ctx.order() - 1) as usize;
            if s > universe {
                return BigUint::zero();
            }
            return subset_rank_table(&self.ctx, s)[s][r].clone();
        }
        self.rank_counts[s][r].clone()
    }

    pub fn e1_dim(&self, s: usize, d: usize) -> BigUint {
        if s == 0 {
            return if d == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        if d < s {
            return BigUint::zero();
        }
        (0..=self.ctx.n().min(s))
            .map(|r| self.rank_count(s, r) * sym_ext_dim(r, d - s))
            .sum()
    }

    pub fn e2_dim(&self, s: usize, d: usize) -> BigUint {
        if s > self.ctx.n() || d < s {
            return BigUint::zero();
        }
        BigUint::from(self.fn_by_size[s]) * sym_ext_dim(s, d - s)
    }

    pub fn e2_total(&self, d: usize) -> BigUint {
        (0..=self.ctx.n()).map(|s| self.e2_dim(s, d)).sum()
    }

    pub fn table(&self, page: Page, cutoff: usize) -> PageTable {
        let entries = par::map_range(0..cutoff + 1, |s| {
            (0..=cutoff)
                .map(|d| match page {
                    Page::E1 => self.e1_dim(s, d),
                    Page::E2 => self.e2_dim(s, d),
                })
                .collect()
        });
        PageTable {
            page,
            cutoff,
            entries,
        }
    }
}

pub fn e1_dim(ctx: &GroupContext, s: usize, d: usize) -> BigUint {
    SpectralSequence::new(ctx, s).e1_dim(s, d)
}

pub fn e2_dim(ctx: &GroupContext, s: usize, d: usize) -> BigUint {
    SpectralSequence::new(ctx, 0).e2_dim(s, d)
}

pub fn e2_total(ctx: &GroupContext, d: usize) -> BigUint {
    SpectralSequence::new(ctx, 0).e2_total(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub p: u32,
    pub n: usize,
    pub cutoff: usize,
    pub e2_total: HilbertSeries,
    pub closed_form: HilbertSeries,
    pub agree: Vec<bool>,
    pub e2_le_e1: bool,
}

impl CollapseReport {
    pub fn passed(&self) -> bool {
        self.e2_le_e1 && self.agree.iter().all(|&b| b)
    }
}

/// Compares the E² totals with the closed-form series and checks
/// E² ≤ E¹ entrywise for `0 ≤ s, d ≤ cutoff`.
pub fn collapse_check(ctx: &GroupContext, cutoff: usize) -> Result<CollapseReport> {
    let ss = SpectralSequence::new(ctx, cutoff);
    let closed_form = closed_form_series(ctx, cutoff)?;
    let totals: Vec<u64> = (0..=cutoff)
        .map(|d| ss.e2_total(d).to_u64().unwrap_or(u64::MAX))
        .collect();
    let e1 = ss.table(Page::E1, cutoff);
    let e2 = ss.table(Page::E2, cutoff);
    let e2_le_e1 = e1
        .entries
        .iter()
        .flatten()
        .zip(e2.entries.iter().flatten())
        .all(|(a, b)| b <= a);
    let e2_total = HilbertSeries::new(Source::E2Page, totals);
    Ok(CollapseReport {
        p: ctx.p(),
        n: ctx.n(),
        cutoff,
        agree: e2_total.equal_flags(&closed_form),
        e2_total,
        closed_form,
        e2_le_e1,
    })
}
