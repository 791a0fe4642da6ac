// SPDX-License-Identifier: Apache-2.0

//! Plug-in total-variation estimates with percentile-bootstrap intervals.

use std::collections::BTreeMap;
use std::hash::Hash;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::rng::stream_rng;

pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvEstimate {
    pub estimate: f64,
    /// 95% percentile-bootstrap interval of the plug-in statistic. Like the
    /// estimate it is biased upwards, so near zero it may lie above it.
    pub ci: [f64; 2],
    pub resamples: usize,
    pub samples: [usize; 2],
    /// Distinct outcomes across both samples.
    pub support: usize,
    /// More distinct outcomes than a tenth of a sample: the plug-in
    /// estimate is then dominated by its upward bias.
    pub undersampled: bool,
}

/// `½ Σ |p̂ − q̂|` over count vectors on a common index.
fn tv_of_counts(a: &[u64], na: u64, b: &[u64], nb: u64) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs()).sum::<f64>()
}

/// A multinomial resample of `counts` with the same total, by sequential
/// conditional binomials (cost proportional to the support).
fn resample<R: Rng + ?Sized>(rng: &mut R, counts: &[u64], total: u64, out: &mut [u64]) {
    let mut left = total;
    let mut mass = total as f64;
    for (o, &c) in out.iter_mut().zip(counts) {
        if left == 0 || c == 0 {
            *o = 0;
            continue;
        }
        let p = (c as f64 / mass).min(1.0);
        let x = if p >= 1.0 { left } else { Binomial::new(left, p).expect("valid binomial").sample(rng) };
        *o = x;
        left -= x;
        mass -= c as f64;
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Plug-in TV between two samples over a countable encoding.
pub fn tv_plugin<K: Hash + Eq + Ord + Clone>(a: &[K], b: &[K], resamples: usize, seed: u64) -> TvEstimate {
    let mut ca: BTreeMap<&K, u64> = BTreeMap::new();
    let mut cb: BTreeMap<&K, u64> = BTreeMap::new();
    for x in a {
        *ca.entry(x).or_default() += 1;
    }
    for x in b {
        *cb.entry(x).or_default() += 1;
    }
    tv_counts(&ca, &cb, resamples, seed)
}

/// As [`tv_plugin`], from outcome counts.
pub fn tv_counts<K: Ord>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>, resamples: usize, seed: u64) -> TvEstimate {
    let keys: std::collections::BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    let va: Vec<u64> = keys.iter().map(|k| a.get(*k).copied().unwrap_or(0)).collect();
    let vb: Vec<u64> = keys.iter().map(|k| b.get(*k).copied().unwrap_or(0)).collect();
    let (na, nb) = (va.iter().sum::<u64>(), vb.iter().sum::<u64>());
    assert!(na > 0 && nb > 0, "TV needs nonempty samples");
    let estimate = tv_of_counts(&va, na, &vb, nb);
    let mut rng = stream_rng(seed, 0x7476);
    let (mut ra, mut rb) = (vec![0; va.len()], vec![0; vb.len()]);
    let mut boot: Vec<f64> = (0..resamples)
        .map(|_| {
            resample(&mut rng, &va, na, &mut ra);
            resample(&mut rng, &vb, nb, &mut rb);
            tv_of_counts(&ra, na, &rb, nb)
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let (da, db) = (va.iter().filter(|&&x| x > 0).count(), vb.iter().filter(|&&x| x > 0).count());
    TvEstimate {
        estimate,
        ci: if resamples == 0 { [estimate, estimate] } else { [percentile(&boot, 0.025), percentile(&boot, 0.975)] },
        resamples,
        samples: [na as usize, nb as usize],
        support: keys.len(),
        undersampled: da as u64 * 10 > na || db as u64 * 10 > nb,
    }
}

/// TV between the empirical law of `counts` (indexed by outcome) and a known
/// pmf on the same index; `law_total` is the law's total mass on the
/// index set, the rest counting as mass the sample never hits.
pub fn tv_vs_law(counts: &[u64], law: &[f64], law_total: f64, resamples: usize, seed: u64) -> TvEstimate {
    assert_eq!(counts.len(), law.len());
    let n: u64 = counts.iter().sum();
    assert!(n > 0, "TV needs a nonempty sample");
    let outside = (law_total - law.iter().sum::<f64>()).max(0.0);
    let tv = |c: &[u64]| 0.5 * (c.iter().zip(law).map(|(&x, &p)| (x as f64 / n as f64 - p).abs()).sum::<f64>() + outside);
    let estimate = tv(counts);
    let mut rng = stream_rng(seed, 0x6c61);
    let mut r = vec![0; counts.len()];
    let mut boot: Vec<f64> = (0..resamples)
        .map(|_| {
            resample(&mut rng, counts, n, &mut r);
            tv(&r)
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let distinct = counts.iter().filter(|&&x| x > 0).count();
    TvEstimate {
        estimate,
        ci: if resamples == 0 { [estimate, estimate] } else { [percentile(&boot, 0.025), percentile(&boot, 0.975)] },
        resamples,
        samples: [n as usize, 0],
        support: distinct,
        undersampled: distinct as u64 * 10 > n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_disjoint() {
        let a = vec!["x", "y", "y", "z"];
        let same = tv_plugin(&a, &a, 200, 1);
        assert_eq!(same.estimate, 0.0);
        assert!(same.ci[0] <= same.ci[1]);
        let far = tv_plugin(&["a", "a"], &["b"], 100, 1);
        assert_eq!(far.estimate, 1.0);
        assert_eq!(far.ci, [1.0, 1.0]);
        let half = tv_plugin(&[1, 2], &[1, 1], 0, 1);
        assert_eq!(half.estimate, 0.5);
    }

    #[test]
    fn bootstrap_covers_small_differences() {
        let a: Vec<u32> = (0..20_000).map(|i| i % 4).collect();
        let b: Vec<u32> = (0..20_000).map(|i| (i / 3) % 4).collect();
        let t = tv_plugin(&a, &b, 500, 7);
        assert!(t.estimate < 0.02 && t.ci[0] <= t.ci[1] && t.ci[1] < 0.03, "{t:?}");
        let far: Vec<u32> = (0..20_000).map(|i| (i % 5).min(3)).collect();
        let t = tv_plugin(&a, &far, 500, 7);
        assert!(t.ci[0] <= t.estimate && t.estimate <= t.ci[1], "{t:?}");
        assert!(!t.undersampled);
        let u: Vec<u32> = (0..100).collect();
        assert!(tv_plugin(&u, &u, 10, 1).undersampled);
    }

    #[test]
    fn against_a_law() {
        let t = tv_vs_law(&[50, 50], &[0.5, 0.25], 1.0, 100, 1);
        assert!((t.estimate - 0.25).abs() < 1e-12);
        let t = tv_vs_law(&[10, 0], &[1.0, 0.0], 1.0, 100, 1);
        assert_eq!((t.estimate, t.ci), (0.0, [0.0, 0.0]));
    }

    #[test]
    fn resampling_preserves_totals() {
        let mut rng = stream_rng(3, 0);
        let c = [5u64, 0, 7, 100];
        let mut out = [0u64; 4];
        for _ in 0..100 {
            resample(&mut rng, &c, 112, &mut out);
            assert_eq!(out.iter().sum::<u64>(), 112);
            assert_eq!(out[1], 0);
        }
    }
}
