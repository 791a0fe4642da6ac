// SPDX-License-Identifier: Apache-2.0

//! Brute-force oracles over all plane trees of a small size.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::probs::FringeEvent;
use super::scalar::{ExactScalar, Ext, Scalar as _};
use super::ExactError;
use crate::tree::{pointed_at, PlaneTree, Window};
use crate::weights::{OffspringLaw, WeightSequence};

pub const MAX_ENUMERATE: usize = 12;

/// Every `n`-vertex plane tree with positive weight, in lexicographic DFS order.
pub fn enumerate_trees(w: &WeightSequence, n: usize) -> Result<Vec<(PlaneTree, ExactScalar)>, ExactError> {
    enumerate_plane_trees(w, n)?
        .into_iter()
        .map(|t| {
            let weight = match tree_weight(w, &t) {
                Some(r) => ExactScalar::Rational(r),
                None => Ext::from_ln(t.ln_weight(w)).to_exact(4.0 * n as f64 * f64::EPSILON),
            };
            Ok((t, weight))
        })
        .collect()
}

pub(crate) fn enumerate_plane_trees(w: &WeightSequence, n: usize) -> Result<Vec<PlaneTree>, ExactError> {
    if n == 0 {
        return Err(ExactError::Invalid("n must be at least 1".into()));
    }
    if n > MAX_ENUMERATE {
        return Err(ExactError::SizeGuard { n, max: MAX_ENUMERATE });
    }
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(n);
    extend(w, n, 1, &mut seq, &mut out);
    Ok(out)
}

/// `need`: vertices still owed to the open stack (ladder slack + 1).
fn extend(w: &WeightSequence, n: usize, need: usize, seq: &mut Vec<u32>, out: &mut Vec<PlaneTree>) {
    let left = n - seq.len();
    if need == 0 {
        if left == 0 {
            out.push(PlaneTree::from_degrees_unchecked(seq.clone()));
        }
        return;
    }
    // After this vertex, need − 1 + d more vertices must fit in left − 1 slots.
    for d in 0..=(left - need) {
        if !w.is_positive(d) {
            continue;
        }
        seq.push(d as u32);
        extend(w, n, need - 1 + d, seq, out);
        seq.pop();
    }
}

/// `Π ω_{d_i}` as a rational, when the weights are rational.
pub fn tree_weight(w: &WeightSequence, t: &PlaneTree) -> Option<BigRational> {
    t.degrees().iter().try_fold(BigRational::one(), |acc, &d| Some(acc * w.exact_weight(d as usize)?))
}

fn rational_trees(w: &WeightSequence, n: usize) -> Result<Vec<(PlaneTree, BigRational)>, ExactError> {
    enumerate_plane_trees(w, n)?
        .into_iter()
        .map(|t| {
            let r = tree_weight(w, &t).ok_or_else(|| ExactError::NotRational(w.tag().to_string()))?;
            Ok((t, r))
        })
        .collect()
}

/// Brute-force `Pr{event}` for `(T_n, v_0)`: weighted count of matching
/// (tree, vertex) pairs over `n · Σ ω(T)`.
pub fn brute_event_prob(w: &WeightSequence, n: usize, ev: &FringeEvent) -> Result<BigRational, ExactError> {
    let trees = rational_trees(w, n)?;
    let pat = ev.pattern();
    let (mut hit, mut total) = (BigRational::zero(), BigRational::zero());
    for (t, wt) in &trees {
        let layout = t.layout();
        for v in 0..t.len() {
            let pt = pointed_at(t, &layout, 0, v, Window::Full);
            if pat.matches(&pt).expect("full windows always decide") {
                hit += wt;
            }
        }
        total += wt;
    }
    if Zero::is_zero(&total) {
        return Err(ExactError::ZeroProbability(format!("no tree with n = {n} has positive weight")));
    }
    Ok(hit / (total * BigRational::from_integer(n.into())))
}

/// Brute-force root-degree law, `k = 0..n−1`.
pub fn brute_root_degree(w: &WeightSequence, n: usize) -> Result<Vec<BigRational>, ExactError> {
    let trees = rational_trees(w, n)?;
    let mut dist = vec![BigRational::zero(); n];
    let mut total = BigRational::zero();
    for (t, wt) in &trees {
        dist[t.degree(0) as usize] += wt;
        total += wt;
    }
    if Zero::is_zero(&total) {
        return Err(ExactError::ZeroProbability(format!("no tree with n = {n} has positive weight")));
    }
    Ok(dist.into_iter().map(|x| x / &total).collect())
}

/// Brute-force `Pr{|T^1| + … + |T^ℓ| = m}` from enumerated trees weighted by
/// an exact offspring law.
pub fn brute_forest_prob(law: &OffspringLaw, l: usize, m: usize) -> Result<BigRational, ExactError> {
    if !law.is_exact() {
        return Err(ExactError::NotRational("offspring law".into()));
    }
    // size[s] = Pr{|T| = s}
    let mut size = vec![BigRational::zero(); m + 1];
    for (s, slot) in size.iter_mut().enumerate().skip(1) {
        let pi = |k: usize| law.prob_exact(k).unwrap_or_else(BigRational::zero);
        let any = WeightSequence::uniform();
        for t in enumerate_plane_trees(&any, s)? {
            *slot += t.degrees().iter().fold(BigRational::one(), |acc, &d| acc * pi(d as usize));
        }
    }
    // ℓ-fold convolution of the size law.
    let mut acc = vec![BigRational::zero(); m + 1];
    acc[0] = BigRational::one();
    for _ in 0..l {
        let mut next = vec![BigRational::zero(); m + 1];
        for (a, x) in acc.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for b in 1..=(m - a) {
                next[a + b] += x * &size[b];
            }
        }
        acc = next;
    }
    Ok(acc[m].clone())
}
