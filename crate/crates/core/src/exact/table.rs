// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use super::scalar::Scalar;
use super::ExactError;
use crate::par::{self, Exec};
use crate::weights::WeightSequence;

/// Which columns `Z(·, j)` a table materializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableLayout {
    /// Every column `0..=n` via `Z(·, j) = ω ∗ Z(·, j−1)`; `O(n²)` memory.
    Full,
    /// Columns on demand by halving, `Z(·, j) = Z(·, ⌊j/2⌋) ∗ Z(·, ⌈j/2⌉)`;
    /// `O(n log n)` memory.
    Columns,
}

#[derive(Clone, Copy, Debug)]
pub struct TableOptions {
    pub layout: TableLayout,
    /// Cap on stored entries.
    pub max_entries: usize,
    /// Largest `n` accepted for exact rational arithmetic.
    pub max_rational_n: usize,
    pub exec: Exec,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { layout: TableLayout::Full, max_entries: 20_000_000, max_rational_n: 1024, exec: Exec::default() }
    }
}

impl TableOptions {
    pub fn columns() -> Self {
        TableOptions { layout: TableLayout::Columns, ..Default::default() }
    }
}

/// `Z(m, j)` for `0 ≤ m ≤ n−1` at one `j`, with a relative error bound
/// valid for every entry.
#[derive(Clone, Debug)]
pub struct Column<S> {
    pub vals: Vec<S>,
    pub err: f64,
}

/// The balls-in-boxes normalizer `Z(m, j) = Σ_{y_1+…+y_j = m} Π ω_{y_i}`
/// for `0 ≤ m ≤ n−1`, `0 ≤ j ≤ n`.
pub struct PartitionTable<S: Scalar> {
    n: usize,
    ctx: S::Ctx,
    layout: TableLayout,
    exec: Exec,
    omega: Vec<S>,
    omega_err: f64,
    cols: RwLock<BTreeMap<usize, Arc<Column<S>>>>,
}

impl<S: Scalar> std::fmt::Debug for PartitionTable<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartitionTable").field("n", &self.n).field("layout", &self.layout).finish_non_exhaustive()
    }
}

/// Truncated product `(a ∗ b)[m]` for `m < len`.
pub(crate) fn convolve<S: Scalar>(exec: Exec, a: &[S], b: &[S], len: usize, zero: &S) -> Vec<S> {
    par::map_range(exec, len, |m| {
        let mut acc = zero.clone();
        for x in 0..=m {
            if a[x].is_zero() || b[m - x].is_zero() {
                continue;
            }
            acc = acc.add(&a[x].mul(&b[m - x]));
        }
        acc
    })
}

impl<S: Scalar> PartitionTable<S> {
    pub fn build(w: &WeightSequence, n: usize, ctx: S::Ctx, opts: TableOptions) -> Result<Self, ExactError> {
        if n == 0 {
            return Err(ExactError::Invalid("n must be at least 1".into()));
        }
        if S::unit(ctx) == 0.0 && n > opts.max_rational_n {
            return Err(ExactError::ResourceGuard(format!(
                "exact rational tables are limited to n ≤ {} (got {n}); use a floating-point mode",
                opts.max_rational_n
            )));
        }
        let entries = match opts.layout {
            TableLayout::Full => (n + 1).saturating_mul(n),
            TableLayout::Columns => n.saturating_mul(2 * (usize::BITS - n.leading_zeros()) as usize + 4),
        };
        if entries > opts.max_entries {
            return Err(ExactError::ResourceGuard(format!(
                "table for n = {n} needs {entries} entries, above the cap of {}",
                opts.max_entries
            )));
        }
        let (omega, omega_err) = S::weights(ctx, w, n)?;
        let tbl = PartitionTable { n, ctx, layout: opts.layout, exec: opts.exec, omega, omega_err, cols: RwLock::new(BTreeMap::new()) };
        tbl.insert(0, tbl.delta());
        if n >= 1 {
            tbl.insert(1, Column { vals: tbl.omega.clone(), err: omega_err });
        }
        if opts.layout == TableLayout::Full {
            let u = S::unit(ctx);
            let mut prev = tbl.column(1)?;
            for j in 2..=n {
                let vals = convolve(tbl.exec, &tbl.omega, &prev.vals, n, &S::zero_with(ctx));
                let err = prev.err + omega_err + prev.err * omega_err + (n as f64 + 1.0) * u;
                let col = Arc::new(Column { vals, err });
                tbl.cols.write().unwrap().insert(j, col.clone());
                prev = col;
            }
        }
        Ok(tbl)
    }

    fn delta(&self) -> Column<S> {
        let mut vals = vec![S::zero_with(self.ctx); self.n];
        vals[0] = S::one_with(self.ctx);
        Column { vals, err: 0.0 }
    }

    fn insert(&self, j: usize, c: Column<S>) {
        self.cols.write().unwrap().insert(j, Arc::new(c));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> S::Ctx {
        self.ctx
    }

    pub fn layout(&self) -> TableLayout {
        self.layout
    }

    /// `ω_0 .. ω_{n−1}`.
    pub fn omega(&self) -> &[S] {
        &self.omega
    }

    pub fn omega_err(&self) -> f64 {
        self.omega_err
    }

    /// Column `Z(·, j)`, computing it (and its halving ancestors) if needed.
    pub fn column(&self, j: usize) -> Result<Arc<Column<S>>, ExactError> {
        if j > self.n {
            return Err(ExactError::Invalid(format!("column {j} beyond n = {}", self.n)));
        }
        if let Some(c) = self.cols.read().unwrap().get(&j) {
            return Ok(c.clone());
        }
        let a = j / 2;
        let (ca, cb) = (self.column(a)?, self.column(j - a)?);
        let vals = convolve(self.exec, &ca.vals, &cb.vals, self.n, &S::zero_with(self.ctx));
        let err = ca.err + cb.err + ca.err * cb.err + (self.n as f64 + 1.0) * S::unit(self.ctx);
        let col = Arc::new(Column { vals, err });
        self.cols.write().unwrap().entry(j).or_insert(col.clone());
        Ok(col)
    }

    /// `Z(m, j)` with its relative error bound; zero for `m ≥ n`.
    pub fn z(&self, m: usize, j: usize) -> Result<(S, f64), ExactError> {
        if m >= self.n {
            return Ok((S::zero_with(self.ctx), 0.0));
        }
        let c = self.column(j)?;
        Ok((c.vals[m].clone(), c.err))
    }

    /// Column indices currently materialized.
    pub fn materialized(&self) -> Vec<usize> {
        self.cols.read().unwrap().keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{Ext, Hp};
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn small_values() {
        let bin = WeightSequence::binary();
        let t = PartitionTable::<BigRational>::build(&bin, 4, (), TableOptions::default()).unwrap();
        assert_eq!(t.z(2, 3).unwrap().0, q(3));
        let uni = WeightSequence::uniform();
        let t = PartitionTable::<BigRational>::build(&uni, 5, (), TableOptions::default()).unwrap();
        assert_eq!(t.z(3, 4).unwrap().0, q(20));
        for j in 0..=5 {
            assert_eq!(t.z(0, j).unwrap().0, q(1));
        }
        assert_eq!(t.z(2, 0).unwrap().0, q(0));
    }

    #[test]
    fn stars_and_bars_everywhere() {
        let uni = WeightSequence::uniform();
        let t = PartitionTable::<BigRational>::build(&uni, 9, (), TableOptions::default()).unwrap();
        let binom = |a: u64, b: u64| (0..b).fold(1u64, |acc, i| acc * (a - i) / (i + 1));
        for j in 1..=9u64 {
            for m in 0..9u64 {
                assert_eq!(t.z(m as usize, j as usize).unwrap().0, q(binom(m + j - 1, j - 1) as i64), "Z({m},{j})");
            }
        }
    }

    #[test]
    fn layouts_agree() {
        for w in [WeightSequence::motzkin(), WeightSequence::factorial(1.0).unwrap(), WeightSequence::cayley()] {
            let full = PartitionTable::<BigRational>::build(&w, 13, (), TableOptions::default()).unwrap();
            let cols = PartitionTable::<BigRational>::build(&w, 13, (), TableOptions::columns()).unwrap();
            for j in 0..=13 {
                assert_eq!(full.column(j).unwrap().vals, cols.column(j).unwrap().vals, "column {j}");
            }
        }
    }

    #[test]
    fn float_modes_within_bounds() {
        let w = WeightSequence::cayley();
        let n = 60;
        let exact = PartitionTable::<BigRational>::build(&w, n, (), TableOptions::default()).unwrap();
        let ext = PartitionTable::<Ext>::build(&w, n, (), TableOptions::columns()).unwrap();
        let hp = PartitionTable::<Hp>::build(&w, n, 128, TableOptions::columns()).unwrap();
        for j in [n - 1, n] {
            let (ce, cx, ch) = (exact.column(j).unwrap(), ext.column(j).unwrap(), hp.column(j).unwrap());
            assert!(cx.err < 1e-11 && ch.err < 1e-30);
            for m in 0..n {
                let truth = Ext::from_rational(&ce.vals[m]);
                let rx = (cx.vals[m].div(truth).to_f64() - 1.0).abs();
                assert!(rx <= cx.err, "ext m={m}: {rx} > {}", cx.err);
                let rh = (ch.vals[m].to_ext().div(truth).to_f64() - 1.0).abs();
                assert!(rh < 1e-14, "hp m={m}: {rh}");
            }
        }
        assert!(exact.z(5, n).unwrap().0.to_f64().unwrap() > 0.0);
    }

    #[test]
    fn guards() {
        let w = WeightSequence::uniform();
        let opts = TableOptions { max_entries: 100, ..Default::default() };
        assert!(matches!(PartitionTable::<Ext>::build(&w, 20, (), opts), Err(ExactError::ResourceGuard(_))));
        assert!(matches!(PartitionTable::<BigRational>::build(&w, 2000, (), TableOptions::columns()), Err(ExactError::ResourceGuard(_))));
        let pl = WeightSequence::power_law(2.5).unwrap();
        assert!(matches!(PartitionTable::<BigRational>::build(&pl, 5, (), TableOptions::default()), Err(ExactError::NotRational(_))));
    }

    #[test]
    fn parallel_is_bit_identical() {
        let w = WeightSequence::power_law(3.0).unwrap();
        let seq = PartitionTable::<Ext>::build(&w, 300, (), TableOptions { exec: Exec::Sequential, ..TableOptions::columns() }).unwrap();
        let par = PartitionTable::<Ext>::build(&w, 300, (), TableOptions { exec: Exec::Parallel, ..TableOptions::columns() }).unwrap();
        assert_eq!(seq.column(300).unwrap().vals, par.column(300).unwrap().vals);
    }
}
