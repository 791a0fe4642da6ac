// SPDX-License-Identifier: Apache-2.0

//! Alias-table draws from `π`, its size-biased version and bounded variants.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::SampleError;
use crate::weights::{OffspringLaw, Tail};

/// Outcome of one draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Draw {
    Finite(u64),
    /// The defect mass of a size-biased law.
    Infinite,
    /// A value above the bound of a bounded sampler.
    TooLarge,
}

#[derive(Clone, Copy, Debug)]
enum Bucket {
    /// `∝ k^{-exponent}` on `k ≥ start`.
    Zeta {
        exponent: f64,
        start: u64,
    },
    Infinite,
    TooLarge,
}

/// A discrete law on `{0, …, head−1}` plus a few special buckets.
#[derive(Clone, Debug)]
pub struct OffspringSampler {
    alias: WeightedAliasIndex<f64>,
    head: usize,
    buckets: Vec<Bucket>,
}

/// Beyond this many extra terms a ratio tail is cut (its mass is far below
/// double resolution long before).
const RATIO_STRETCH: usize = 100_000;

/// Masses `f(k)` for `k = 0..`, following a ratio tail past `K` until it
/// underflows relative to the head.
fn head_masses(law: &OffspringLaw, f: impl Fn(usize) -> f64, limit: Option<usize>) -> Vec<f64> {
    let cut = law.truncation();
    let stop = limit.unwrap_or(usize::MAX);
    let mut out: Vec<f64> = (0..=cut.min(stop)).map(&f).collect();
    let extend = match law.tail() {
        Tail::None => false,
        Tail::Ratio { .. } => true,
        Tail::PowerLaw { .. } => limit.is_some(),
    };
    if extend {
        let scale = out.iter().fold(0.0f64, |a, &b| a.max(b));
        let bound = if matches!(law.tail(), Tail::Ratio { .. }) { cut + RATIO_STRETCH } else { usize::MAX };
        let mut k = cut + 1;
        while k <= stop && k <= bound {
            let p = f(k);
            if matches!(law.tail(), Tail::Ratio { .. }) && p < scale * 1e-300 {
                break;
            }
            out.push(p);
            k += 1;
        }
    }
    out
}

impl OffspringSampler {
    fn build(mut masses: Vec<f64>, buckets: Vec<(Bucket, f64)>) -> Result<Self, SampleError> {
        let head = masses.len();
        let mut kept = Vec::new();
        for (b, w) in buckets {
            if w > 0.0 {
                masses.push(w);
                kept.push(b);
            }
        }
        let alias = WeightedAliasIndex::new(masses).map_err(|e| SampleError::InvalidPmf(format!("alias table: {e}")))?;
        Ok(OffspringSampler { alias, head, buckets: kept })
    }

    /// Draws from `π`.
    pub fn new(law: &OffspringLaw) -> Result<Self, SampleError> {
        let masses = head_masses(law, |k| law.prob(k), None);
        let tail = match law.tail() {
            Tail::PowerLaw { alpha, .. } => {
                vec![(Bucket::Zeta { exponent: alpha, start: law.truncation() as u64 + 1 }, law.tail_mass())]
            }
            _ => vec![],
        };
        Self::build(masses, tail)
    }

    /// Draws from `π` with every value above `kmax` collapsed to [`Draw::TooLarge`].
    pub fn bounded(law: &OffspringLaw, kmax: usize) -> Result<Self, SampleError> {
        let masses = head_masses(law, |k| law.prob(k), Some(kmax));
        let rest = (1.0 - masses.iter().sum::<f64>()).max(0.0);
        Self::build(masses, vec![(Bucket::TooLarge, rest)])
    }

    /// Draws from `ξ̂`: mass `kπ_k` at `k`, `1 − μ` at infinity.
    pub fn size_biased(law: &OffspringLaw) -> Result<Self, SampleError> {
        let sb = law.size_biased();
        let masses = head_masses(law, |k| k as f64 * law.prob(k), None);
        let mut buckets = vec![];
        if let Tail::PowerLaw { alpha, .. } = law.tail() {
            buckets.push((Bucket::Zeta { exponent: alpha - 1.0, start: law.truncation() as u64 + 1 }, sb.tail_mass));
        }
        // Rounding in μ can leave a spurious defect of a few ulps.
        if sb.infinity_mass > 1e-12 {
            buckets.push((Bucket::Infinite, sb.infinity_mass));
        }
        Self::build(masses, buckets)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Draw {
        let i = self.alias.sample(rng);
        if i < self.head {
            return Draw::Finite(i as u64);
        }
        match self.buckets[i - self.head] {
            Bucket::Zeta { exponent, start } => Draw::Finite(zeta_tail(rng, exponent, start)),
            Bucket::Infinite => Draw::Infinite,
            Bucket::TooLarge => Draw::TooLarge,
        }
    }

    /// A finite draw as an outdegree; saturates far beyond any tree size.
    pub fn degree<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self.sample(rng) {
            Draw::Finite(k) => k.min(u32::MAX as u64 - 1) as u32,
            d => unreachable!("unbounded law produced {d:?}"),
        }
    }
}

/// `Pr{k} ∝ k^{-a}` on `k ≥ s` (`a > 1`): a continuous Pareto proposal on
/// `[s − ½, ∞)` rounded to the nearest integer, thinned by
/// `k^{-a} / ∫_{k−½}^{k+½} y^{-a} dy ≤ 1`.
fn zeta_tail<R: Rng + ?Sized>(rng: &mut R, a: f64, s: u64) -> u64 {
    let lo = s as f64 - 0.5;
    loop {
        let u = 1.0 - rng.random::<f64>();
        let y = lo * u.powf(-1.0 / (a - 1.0));
        if y.is_nan() || y >= 1e18 {
            return u64::MAX;
        }
        let k = (y + 0.5).floor().max(s as f64);
        if k > 1e6 {
            // Thinning ratio is 1 − O(k⁻²) here.
            return k as u64;
        }
        let g = ((k - 0.5).powf(1.0 - a) - (k + 0.5).powf(1.0 - a)) / (a - 1.0);
        if rng.random::<f64>() * g <= k.powf(-a) {
            return k as u64;
        }
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::weights::{classify, WeightSequence};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn freq(s: &OffspringSampler, draws: usize, seed: u64) -> (Vec<f64>, f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = vec![0.0; 12];
        let (mut inf, mut big) = (0.0, 0.0);
        for _ in 0..draws {
            match s.sample(&mut rng) {
                Draw::Finite(k) if (k as usize) < c.len() => c[k as usize] += 1.0,
                Draw::Finite(_) => {}
                Draw::Infinite => inf += 1.0,
                Draw::TooLarge => big += 1.0,
            }
        }
        let d = draws as f64;
        (c.into_iter().map(|x| x / d).collect(), inf / d, big / d)
    }

    fn close(p_hat: f64, p: f64, draws: usize) {
        let sd = (p * (1.0 - p) / draws as f64).sqrt().max(1e-9);
        assert!((p_hat - p).abs() < 4.5 * sd, "{p_hat} vs {p}");
    }

    #[test]
    fn geometric_law_and_its_size_bias() {
        let law = classify(&WeightSequence::uniform()).unwrap();
        let n = 200_000;
        let (f, inf, _) = freq(&OffspringSampler::new(&law).unwrap(), n, 1);
        for k in 0..8 {
            close(f[k], law.prob(k), n);
        }
        assert_eq!(inf, 0.0);
        let (f, inf, _) = freq(&OffspringSampler::size_biased(&law).unwrap(), n, 2);
        assert_eq!((f[0], inf), (0.0, 0.0));
        for k in 1..8 {
            close(f[k], k as f64 * law.prob(k), n);
        }
    }

    #[test]
    fn power_law_tail_and_defect() {
        let law = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let s = OffspringSampler::size_biased(&law).unwrap();
        let n = 200_000;
        let (f, inf, _) = freq(&s, n, 3);
        close(inf, 1.0 - law.mu(), n);
        close(f[1], law.prob(1), n);
        // The Pareto thinning is exercised directly on a low start.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut c = [0usize; 4];
        let draws = 200_000;
        for _ in 0..draws {
            let k = zeta_tail(&mut rng, 3.0, 1);
            if k < 4 {
                c[k as usize] += 1;
            }
        }
        let z3 = 1.202_056_903_159_594_3;
        for k in 1..4 {
            close(c[k] as f64 / draws as f64, (k as f64).powi(-3) / z3, draws);
        }
    }

    #[test]
    fn bounded_collapses_the_tail() {
        let law = classify(&WeightSequence::uniform()).unwrap();
        let s = OffspringSampler::bounded(&law, 2).unwrap();
        let n = 100_000;
        let (f, _, big) = freq(&s, n, 5);
        close(big, 0.125, n);
        assert_eq!(f[3], 0.0);
        close(f[2], 0.125, n);
    }

    #[test]
    fn type_three_is_degenerate() {
        let law = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = OffspringSampler::new(&law).unwrap();
        let b = OffspringSampler::size_biased(&law).unwrap();
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), Draw::Finite(0));
            assert_eq!(b.sample(&mut rng), Draw::Infinite);
        }
    }
}
