//! Incremental row echelon form over F_p for sparse rows.
//!
//! Rows are inserted one at a time and reduced against the pivots found so
//! far. The pivot of a row is its leftmost nonzero column, so the set of
//! pivot columns depends only on the row space, not on insertion order.

use crate::field::Fp;

/// A sparse row: `(column, value)` pairs with values in `0..p`. Columns may
/// repeat; repeated entries are summed.
pub type SparseRow = Vec<(usize, u32)>;

#[derive(Debug, Clone)]
pub struct Echelon {
    fp: Fp,
    ncols: usize,
    /// `pivot_of[c]` is the index into `rows` of the row with pivot `c`.
    pivot_of: Vec<Option<usize>>,
    /// Stored rows are monic at their pivot, which is their first entry.
    rows: Vec<SparseRow>,
    buf: Vec<u32>,
}

impl Echelon {
    pub fn new(fp: Fp, ncols: usize) -> Self {
        Echelon {
            fp,
            ncols,
            pivot_of: vec![None; ncols],
            rows: Vec::new(),
            buf: vec![0; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `row` against the current pivots and keeps the remainder if
    /// nonzero. Returns whether the rank grew.
    pub fn insert(&mut self, row: &[(usize, u32)]) -> bool {
        if self.is_full() || row.is_empty() {
            return false;
        }
        let fp = self.fp;
        let mut lo = usize::MAX;
        for &(c, v) in row {
            assert!(c < self.ncols, "column {c} out of range {}", self.ncols);
            self.buf[c] = fp.add(self.buf[c], v % fp.modulus());
            lo = lo.min(c);
        }
        let mut c = lo;
        while c < self.ncols {
            let v = self.buf[c];
            if v == 0 {
                c += 1;
                continue;
            }
            match self.pivot_of[c] {
                Some(r) => {
                    for &(cc, pv) in &self.rows[r] {
                        self.buf[cc] = fp.sub(self.buf[cc], fp.mul(v, pv));
                    }
                    debug_assert_eq!(self.buf[c], 0);
                    c += 1;
                }
                None => {
                    let scale = fp.inv(v);
                    let mut kept = Vec::new();
                    for cc in c..self.ncols {
                        let x = self.buf[cc];
                        if x != 0 {
                            kept.push((cc, fp.mul(x, scale)));
                            self.buf[cc] = 0;
                        }
                    }
                    self.pivot_of[c] = Some(self.rows.len());
                    self.rows.push(kept);
                    return true;
                }
            }
        }
        false
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        (0..self.ncols)
            .filter(|&c| self.pivot_of[c].is_some())
            .collect()
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols)
            .filter(|&c| self.pivot_of[c].is_none())
            .collect()
    }
}

/// Rank of a list of sparse rows over `ncols` columns.
pub fn rank<'a, I>(fp: Fp, ncols: usize, rows: I) -> usize
where
    I: IntoIterator<Item = &'a SparseRow>,
{
    let mut ech = Echelon::new(fp, ncols);
    for r in rows {
        if ech.is_full() {
            break;
        }
        ech.insert(r);
    }
    ech.rank()
}
