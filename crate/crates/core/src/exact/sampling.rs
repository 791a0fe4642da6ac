// SPDX-License-Identifier: Apache-2.0

//! Exact draws from the balls-in-boxes law `Pr{Y = y} ∝ Π ω_{y_i}` on
//! sequences with `Σ y_i = n − 1`. Sampling runs in extended-range doubles
//! whatever the table's scalar, so probabilities are exact up to double
//! rounding of the table entries.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use super::scalar::{Ext, Scalar};
use super::table::PartitionTable;
use super::ExactError;

/// How a sequence is drawn from the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceMethod {
    /// Slot by slot, `Pr{Y_j = k} ∝ ω_k Z(m−k, s−1)`; needs every column.
    Sequential,
    /// Recursive halving: split the `s` remaining slots into `⌊s/2⌋` and
    /// `⌈s/2⌉` and draw the ball count of the first half; needs only the
    /// `O(log n)` halving columns.
    DivideConquer,
}

/// A reusable sampler over one table.
#[derive(Clone, Debug)]
pub struct SequenceSampler {
    n: usize,
    method: SequenceMethod,
    omega: Arc<Vec<Ext>>,
    cols: BTreeMap<usize, Arc<Vec<Ext>>>,
}

impl SequenceSampler {
    pub fn new<S: Scalar>(tbl: &PartitionTable<S>, method: SequenceMethod) -> Result<Self, ExactError> {
        let n = tbl.n();
        let needed: Vec<usize> = match method {
            SequenceMethod::Sequential => (0..=n).collect(),
            SequenceMethod::DivideConquer => {
                let mut js = vec![n];
                let mut i = 0;
                while i < js.len() {
                    let j = js[i];
                    if j >= 2 {
                        for c in [j / 2, j - j / 2] {
                            if !js.contains(&c) {
                                js.push(c);
                            }
                        }
                    }
                    i += 1;
                }
                js
            }
        };
        let mut cols = BTreeMap::new();
        for j in needed {
            let c = tbl.column(j)?;
            cols.insert(j, Arc::new(c.vals.iter().map(Scalar::to_ext).collect::<Vec<_>>()));
        }
        if cols[&n][n - 1].is_zero() {
            return Err(ExactError::ZeroProbability(format!("no sequence of length {n} has positive weight")));
        }
        let omega = Arc::new(tbl.omega().iter().map(Scalar::to_ext).collect());
        Ok(SequenceSampler { n, method, omega, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> SequenceMethod {
        self.method
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let mut out = vec![0u32; self.n];
        self.sample_into(rng, &mut out);
        out
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [u32]) {
        assert_eq!(out.len(), self.n);
        match self.method {
            SequenceMethod::Sequential => self.sequential(rng, out),
            SequenceMethod::DivideConquer => self.split(rng, self.n - 1, out),
        }
        debug_assert_eq!(out.iter().map(|&d| d as usize).sum::<usize>(), self.n - 1);
    }

    fn sequential<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [u32]) {
        let mut m = self.n - 1;
        for (i, slot) in out.iter_mut().enumerate() {
            let s = self.n - i;
            if m == 0 {
                *slot = 0;
                continue;
            }
            if s == 1 {
                *slot = m as u32;
                m = 0;
                continue;
            }
            let norm = self.cols[&s][m];
            let rest = &self.cols[&(s - 1)];
            let target = rng.random::<f64>();
            let mut acc = 0.0;
            let mut pick = None;
            for k in 0..=m {
                let p = self.omega[k].mul(rest[m - k]).ratio_f64(norm);
                if p > 0.0 {
                    pick = Some(k);
                    acc += p;
                    if acc > target {
                        break;
                    }
                }
            }
            let k = pick.expect("positive normalizer has a positive term");
            *slot = k as u32;
            m -= k;
        }
    }

    /// Fills `out` (its length is the slot count) with `m` balls.
    fn split<R: Rng + ?Sized>(&self, rng: &mut R, m: usize, out: &mut [u32]) {
        let s = out.len();
        if m == 0 {
            out.fill(0);
            return;
        }
        if s == 1 {
            out[0] = m as u32;
            return;
        }
        let a = s / 2;
        let (ca, cb) = (&self.cols[&a], &self.cols[&(s - a)]);
        let norm = self.cols[&s][m];
        let target = rng.random::<f64>();
        let mut acc = 0.0;
        let mut pick = None;
        for x in 0..=m {
            if ca[x].is_zero() || cb[m - x].is_zero() {
                continue;
            }
            pick = Some(x);
            acc += ca[x].mul(cb[m - x]).ratio_f64(norm);
            if acc > target {
                break;
            }
        }
        let x = pick.expect("positive normalizer has a positive term");
        let (left, right) = out.split_at_mut(a);
        self.split(rng, x, left);
        self.split(rng, m - x, right);
    }
}

/// One exact draw of `(Y_0, …, Y_{n−1})`, sequentially from a full table and
/// by halving otherwise.
pub fn sample_sequence<S: Scalar, R: Rng + ?Sized>(tbl: &PartitionTable<S>, rng: &mut R) -> Result<Vec<u32>, ExactError> {
    let method = match tbl.layout() {
        super::TableLayout::Full => SequenceMethod::Sequential,
        super::TableLayout::Columns => SequenceMethod::DivideConquer,
    };
    Ok(SequenceSampler::new(tbl, method)?.sample(rng))
}
