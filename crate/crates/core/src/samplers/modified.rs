// SPDX-License-Identifier: Apache-2.0

//! The modified GW tree: a special root; special vertices draw from `ξ̂`
//! and hand specialness to one uniform child, until a draw is infinite. That
//! vertex becomes the tip and bursts into `D̃_n` normal children. Normal
//! vertices reproduce by `π`.

use rand::Rng;

use super::limit::{LimitSampler, Regime};
use super::offspring::Draw;
use super::{GwOutcome, SampleError};
use crate::tree::{PlaneTree, VertexRef};
use crate::weights::OffspringLaw;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifiedGw {
    pub tree: PlaneTree,
    /// The vertex that received `D̃_n` children.
    pub tip: VertexRef,
    pub tip_height: usize,
    /// Finite `ξ̂` draws along the special path, root first.
    pub spine_draws: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct ModifiedGwSampler {
    inner: LimitSampler,
}

impl ModifiedGwSampler {
    pub fn new(law: &OffspringLaw, dtilde: &[(usize, f64)]) -> Result<Self, SampleError> {
        let inner = LimitSampler::new(law, 0)?.with_dtilde(dtilde)?;
        if inner.regime() != Regime::Condensation {
            return Err(SampleError::WrongRegime { expected: "II or III", got: law.kind() });
        }
        Ok(ModifiedGwSampler { inner })
    }

    /// One realization, or an overflow marker past `size_cap` vertices.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, size_cap: usize) -> Result<ModifiedGw, GwOutcome> {
        let off = self.inner.offspring();
        let mut degrees = Vec::new();
        let mut spine_draws = Vec::new();
        let mut tip = None;
        // `true` marks the special vertex; popped in DFS order.
        let mut stack = vec![true];
        while let Some(special) = stack.pop() {
            let d = if !special {
                let d = off.degree(rng);
                stack.extend(std::iter::repeat_n(false, d as usize));
                d
            } else {
                match self.inner.biased().sample(rng) {
                    Draw::Finite(k) => {
                        let k = k.min(u32::MAX as u64) as u32;
                        spine_draws.push(k);
                        let j = rng.random_range(0..k);
                        // Pushed in reverse so child 0 is visited first.
                        stack.extend((0..k).rev().map(|c| c == j));
                        k
                    }
                    Draw::Infinite => {
                        tip = Some(degrees.len());
                        let d = self.inner.draw_dtilde(rng);
                        stack.extend(std::iter::repeat_n(false, d as usize));
                        d
                    }
                    Draw::TooLarge => unreachable!(),
                }
            };
            degrees.push(d);
            if degrees.len() + stack.len() > size_cap {
                return Err(GwOutcome::Overflow { size_cap });
            }
        }
        let tip = tip.expect("the special path ends in a burst");
        Ok(ModifiedGw { tree: PlaneTree::from_degrees_unchecked(degrees), tip, tip_height: spine_draws.len(), spine_draws })
    }
}

/// One modified GW tree; see [`ModifiedGwSampler`] for repeated draws.
pub fn sample_modified_gw<R: Rng + ?Sized>(
    law: &OffspringLaw,
    dtilde: &[(usize, f64)],
    rng: &mut R,
    size_cap: usize,
) -> Result<Result<ModifiedGw, GwOutcome>, SampleError> {
    Ok(ModifiedGwSampler::new(law, dtilde)?.sample(rng, size_cap))
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::weights::{classify, WeightSequence};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn type_three_bursts_at_the_root() {
        let law = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = sample_modified_gw(&law, &[(4, 1.0)], &mut rng, 100).unwrap().unwrap();
        assert_eq!((t.tip, t.tip_height), (0, 0));
        assert_eq!(t.tree.degrees(), [4, 0, 0, 0, 0]);
        assert!(matches!(sample_modified_gw(&law, &[(4, 1.0)], &mut rng, 3).unwrap(), Err(GwOutcome::Overflow { size_cap: 3 })));
        let uni = classify(&WeightSequence::uniform()).unwrap();
        assert!(matches!(ModifiedGwSampler::new(&uni, &[(4, 1.0)]), Err(SampleError::WrongRegime { .. })));
    }

    #[test]
    fn tip_height_is_geometric_and_spine_draws_are_size_biased() {
        let law = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let mu = law.mu();
        let s = ModifiedGwSampler::new(&law, &[(3, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 40_000;
        let (mut h, mut ok) = ([0usize; 4], 0usize);
        let mut k_counts = [0usize; 4];
        for _ in 0..draws {
            let Ok(t) = s.sample(&mut rng, 1_000_000) else { continue };
            ok += 1;
            let layout = t.tree.layout();
            assert_eq!(layout.depth(t.tip), t.tip_height);
            assert_eq!(t.tree.degree(t.tip), 3);
            if t.tip_height < 4 {
                h[t.tip_height] += 1;
            }
            for &k in &t.spine_draws {
                if k < 4 {
                    k_counts[k as usize] += 1;
                }
            }
        }
        assert!(ok > draws * 99 / 100);
        for k in 0..4 {
            let p = mu.powi(k as i32) * (1.0 - mu);
            let sd = (p * (1.0 - p) / ok as f64).sqrt();
            assert!((h[k] as f64 / ok as f64 - p).abs() < 4.5 * sd, "height {k}");
        }
        // Audit: finite ξ̂ draws have relative masses kπ_k.
        let r = k_counts[2] as f64 / k_counts[1] as f64;
        let want = 2.0 * law.prob(2) / law.prob(1);
        assert!((r / want - 1.0).abs() < 0.05, "{r} vs {want}");
    }
}
