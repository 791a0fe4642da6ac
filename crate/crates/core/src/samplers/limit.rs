// SPDX-License-Identifier: Apache-2.0

//! Windowed views of the limit trees: the sin-tree (type I), the
//! condensation tree (types II/III) and its finite-n stand-ins with a
//! large-degree vertex of law `D̃_n`.
//!
//! A window `m` materializes exactly what [`PointedTree::truncate`] keeps:
//! the center to depth `m`, spine records `u_1..u_m`, and at `u_i` with
//! `i < m` up to `m` siblings per side, each a GW tree cut at depth
//! `m − i − 1`; every materialized vertex shows at most `m` children.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::offspring::{Draw, OffspringSampler};
use super::SampleError;
use crate::tree::{Count, DegreePair, PointedTree, SpineRecord, SubNode, Subtree, Window};
use crate::weights::{OffspringLaw, WeightType};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Type I: a single infinite spine.
    SinTree,
    /// Types II/III: the spine stops below the second infinite-degree vertex.
    Condensation,
}

/// Which finite-n stand-in [`LimitSampler::sample_tbar_star_n`] draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbarVariant {
    /// `T̄*_n`: the spine ends at the vertex with `D̃_n` children.
    Tbar,
    /// `T*_n`: the condensation tree with its first infinite vertex pruned to
    /// `D̃_n` children; the spine continues up to the second one.
    Pruned,
}

/// A GW tree cut at `depth` levels below its root, each vertex showing at
/// most `cap` children.
pub fn gw_window<R: Rng + ?Sized>(off: &OffspringSampler, rng: &mut R, depth: u32, cap: u32) -> Subtree {
    let mut nodes = Vec::new();
    let mut stack = vec![0u32];
    while let Some(lvl) = stack.pop() {
        let degree = off.degree(rng);
        let shown = if lvl >= depth { 0 } else { degree.min(cap) };
        nodes.push(SubNode { degree, shown });
        // Children are i.i.d., so push order does not matter for the law.
        stack.extend(std::iter::repeat_n(lvl + 1, shown as usize));
    }
    Subtree::from_nodes(nodes).expect("DFS generation yields a complete subtree")
}

#[derive(Clone, Debug)]
struct Dtilde {
    support: Vec<u32>,
    alias: WeightedAliasIndex<f64>,
}

/// Samples windowed limit objects for one offspring law.
#[derive(Clone, Debug)]
pub struct LimitSampler {
    kind: WeightType,
    mu: f64,
    offspring: OffspringSampler,
    biased: OffspringSampler,
    window: u32,
    dtilde: Option<Dtilde>,
}

impl LimitSampler {
    pub fn new(law: &OffspringLaw, window: u32) -> Result<Self, SampleError> {
        Ok(LimitSampler {
            kind: law.kind(),
            mu: law.mu(),
            offspring: OffspringSampler::new(law)?,
            biased: OffspringSampler::size_biased(law)?,
            window,
            dtilde: None,
        })
    }

    /// Attaches a `D̃_n` law as `(degree, probability)` pairs.
    pub fn with_dtilde(mut self, pmf: &[(usize, f64)]) -> Result<Self, SampleError> {
        self.dtilde = Some(validate_dtilde(pmf)?);
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        if self.kind == WeightType::I {
            Regime::SinTree
        } else {
            Regime::Condensation
        }
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn offspring(&self) -> &OffspringSampler {
        &self.offspring
    }

    pub(crate) fn biased(&self) -> &OffspringSampler {
        &self.biased
    }

    /// One draw of `D̃_n`; panics if none is attached.
    pub(crate) fn draw_dtilde<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let dt = self.dtilde.as_ref().expect("D̃_n attached");
        dt.support[dt.alias.sample(rng)]
    }

    /// The limit object of this law's regime.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointedTree {
        match self.regime() {
            Regime::SinTree => self.sin(rng),
            Regime::Condensation => self.condensation(rng, None),
        }
    }

    pub fn sample_sin_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointedTree, SampleError> {
        if self.regime() != Regime::SinTree {
            return Err(SampleError::WrongRegime { expected: "I", got: self.kind });
        }
        Ok(self.sin(rng))
    }

    pub fn sample_condensation_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointedTree, SampleError> {
        if self.regime() != Regime::Condensation {
            return Err(SampleError::WrongRegime { expected: "II or III", got: self.kind });
        }
        Ok(self.condensation(rng, None))
    }

    /// `T̄*_n` or `T*_n`; needs a `D̃_n` law.
    pub fn sample_tbar_star_n<R: Rng + ?Sized>(&self, rng: &mut R, variant: TbarVariant) -> Result<PointedTree, SampleError> {
        if self.regime() != Regime::Condensation {
            return Err(SampleError::WrongRegime { expected: "II or III", got: self.kind });
        }
        let dt = self.dtilde.as_ref().ok_or_else(|| SampleError::InvalidPmf("no D̃_n distribution attached".into()))?;
        Ok(self.condensation(rng, Some((dt, variant))))
    }

    fn center<R: Rng + ?Sized>(&self, rng: &mut R) -> Subtree {
        gw_window(&self.offspring, rng, self.window, self.window)
    }

    /// Spine record for `u_i` with the given pair, siblings drawn if visible.
    fn record<R: Rng + ?Sized>(&self, rng: &mut R, i: u32, pair: DegreePair) -> SpineRecord {
        let m = self.window;
        let (mut left, mut right) = (Vec::new(), Vec::new());
        if i < m {
            let shown = |c: Count| match c {
                Count::Finite(k) => k.min(m),
                Count::Infinite => m,
            };
            let d = m - i - 1;
            left = (0..shown(pair.left)).map(|_| gw_window(&self.offspring, rng, d, m)).collect();
            right = (0..shown(pair.right)).map(|_| gw_window(&self.offspring, rng, d, m)).collect();
        }
        SpineRecord { pair, left, right }
    }

    /// Uniform position of the spine child among `k` children.
    fn finite_pair<R: Rng + ?Sized>(rng: &mut R, k: u64) -> DegreePair {
        let k = k.min(u32::MAX as u64) as u32;
        let a = rng.random_range(0..k);
        DegreePair::finite(a, k - 1 - a)
    }

    fn sin<R: Rng + ?Sized>(&self, rng: &mut R) -> PointedTree {
        let center = self.center(rng);
        let spine = (1..=self.window)
            .map(|i| {
                let k = match self.biased.sample(rng) {
                    Draw::Finite(k) => k,
                    d => unreachable!("type I size-biased law produced {d:?}"),
                };
                let pair = Self::finite_pair(rng, k);
                self.record(rng, i, pair)
            })
            .collect();
        PointedTree { center, spine, window: Window::Truncated(self.window), spine_complete: false }
    }

    fn condensation<R: Rng + ?Sized>(&self, rng: &mut R, dtilde: Option<(&Dtilde, TbarVariant)>) -> PointedTree {
        let m = self.window;
        let center = self.center(rng);
        let mut spine = Vec::new();
        let mut seen_inf = false;
        let mut complete = false;
        // Index m + 1 is drawn only to learn whether u_m is the root.
        for i in 1..=m + 1 {
            let pair = match self.biased.sample(rng) {
                Draw::Finite(k) => Self::finite_pair(rng, k),
                Draw::Infinite if seen_inf => {
                    complete = true;
                    break;
                }
                Draw::Infinite => {
                    seen_inf = true;
                    match dtilde {
                        None => DegreePair { left: Count::Infinite, right: Count::Infinite },
                        Some((dt, _)) => {
                            let k = dt.support[dt.alias.sample(rng)];
                            Self::finite_pair(rng, k as u64)
                        }
                    }
                }
                Draw::TooLarge => unreachable!(),
            };
            if i > m {
                break;
            }
            spine.push(self.record(rng, i, pair));
            if seen_inf && matches!(dtilde, Some((_, TbarVariant::Tbar))) {
                complete = true;
                break;
            }
        }
        PointedTree { center, spine, window: Window::Truncated(m), spine_complete: complete }
    }
}

fn validate_dtilde(pmf: &[(usize, f64)]) -> Result<Dtilde, SampleError> {
    if pmf.is_empty() {
        return Err(SampleError::InvalidPmf("empty D̃_n distribution".into()));
    }
    let mut total = 0.0;
    for &(k, p) in pmf {
        if !(p.is_finite() && p >= 0.0) {
            return Err(SampleError::InvalidPmf(format!("mass {p} at degree {k}")));
        }
        if k == 0 && p > 0.0 {
            return Err(SampleError::InvalidPmf("D̃_n must be supported on degrees ≥ 1".into()));
        }
        if k > u32::MAX as usize {
            return Err(SampleError::InvalidPmf(format!("degree {k} out of range")));
        }
        total += p;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(SampleError::InvalidPmf(format!("masses sum to {total}, not 1")));
    }
    let alias =
        WeightedAliasIndex::new(pmf.iter().map(|&(_, p)| p).collect()).map_err(|e| SampleError::InvalidPmf(format!("alias table: {e}")))?;
    Ok(Dtilde { support: pmf.iter().map(|&(k, _)| k as u32).collect(), alias })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::tree::{Constraint, WindowPattern};
    use crate::weights::{classify, WeightSequence};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn within(c: usize, n: usize, p: f64) {
        let sd = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
        let f = c as f64 / n as f64;
        assert!((f - p).abs() < 4.5 * sd, "{f} vs {p}");
    }

    #[test]
    fn sin_tree_spine_pairs_and_center() {
        let law = classify(&WeightSequence::uniform()).unwrap();
        let ls = LimitSampler::new(&law, 3).unwrap();
        let mut r = rng(1);
        let draws = 60_000;
        let (mut leaf, mut pair01, mut pair00) = (0, 0, 0);
        for _ in 0..draws {
            let pt = ls.sample_sin_tree(&mut r).unwrap();
            pt.validate().unwrap();
            assert_eq!((pt.spine.len(), pt.spine_complete, pt.window), (3, false, Window::Truncated(3)));
            leaf += (pt.center.root_degree() == 0) as usize;
            pair01 += (pt.spine[0].pair == DegreePair::finite(0, 1)) as usize;
            pair00 += (pt.spine[1].pair == DegreePair::finite(0, 0)) as usize;
        }
        within(leaf, draws, 0.5);
        // Pr{(a,b)} = Pr{ξ̂ = a+b+1}/(a+b+1) = π_{a+b+1}.
        within(pair01, draws, 0.125);
        within(pair00, draws, 0.25);
        let zero = LimitSampler::new(&law, 0).unwrap().sample(&mut r);
        assert!(zero.spine.is_empty() && zero.center.len() == 1);
        let pl = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        assert!(matches!(LimitSampler::new(&pl, 2).unwrap().sample_sin_tree(&mut r), Err(SampleError::WrongRegime { .. })));
    }

    #[test]
    fn condensation_heights_and_single_infinity() {
        let law = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let mu = law.mu();
        let ls = LimitSampler::new(&law, 40).unwrap();
        let mut r = rng(2);
        let draws = 40_000;
        let mut h = [0usize; 4];
        for _ in 0..draws {
            let pt = ls.sample_condensation_tree(&mut r).unwrap();
            let infs = pt.spine.iter().filter(|s| s.pair.left.is_infinite()).count();
            if pt.spine_complete {
                assert_eq!(infs, 1);
                let t = pt.spine.len();
                if t < 4 {
                    h[t] += 1;
                }
            }
        }
        assert_eq!(h[0], 0);
        for t in 1..4 {
            within(h[t], draws, t as f64 * (1.0 - mu).powi(2) * mu.powi(t as i32 - 1));
        }
        let iii = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        let ls = LimitSampler::new(&iii, 2).unwrap();
        for _ in 0..20 {
            let pt = ls.sample_condensation_tree(&mut r).unwrap();
            pt.validate().unwrap();
            assert!(pt.spine_complete && pt.spine.len() == 1 && pt.spine[0].pair.right.is_infinite());
            assert!(pt.spine[0].left.iter().chain(&pt.spine[0].right).all(|s| s.len() == 1));
            assert_eq!(pt.spine[0].left.len(), 2);
        }
        let one = LimitSampler::new(&iii, 1).unwrap().sample(&mut r);
        assert!(one.spine_complete && one.spine[0].left.is_empty());
    }

    #[test]
    fn tbar_star() {
        let law = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let mu = law.mu();
        let mut r = rng(3);
        let point = LimitSampler::new(&law, 30).unwrap().with_dtilde(&[(7, 1.0)]).unwrap();
        let draws = 40_000;
        let mut len = [0usize; 3];
        for _ in 0..draws {
            let pt = point.sample_tbar_star_n(&mut r, TbarVariant::Tbar).unwrap();
            pt.validate().unwrap();
            if pt.spine_complete {
                assert_eq!(pt.spine.last().unwrap().pair.total(), Count::Finite(7));
                if pt.spine.len() <= 3 {
                    len[pt.spine.len() - 1] += 1;
                }
            }
        }
        for t in 1..=3 {
            within(len[t - 1], draws, mu.powi(t as i32 - 1) * (1.0 - mu));
        }
        let pmf = [(2usize, 0.25), (5, 0.75)];
        let ls = LimitSampler::new(&law, 3).unwrap().with_dtilde(&pmf).unwrap();
        let iii = classify(&WeightSequence::factorial(1.0).unwrap()).unwrap();
        let ls3 = LimitSampler::new(&iii, 3).unwrap().with_dtilde(&pmf).unwrap();
        let mut two = 0;
        for _ in 0..draws {
            let pt = ls3.sample_tbar_star_n(&mut r, TbarVariant::Tbar).unwrap();
            two += (pt.spine[0].pair.total() == Count::Finite(2)) as usize;
            let pr = ls3.sample_tbar_star_n(&mut r, TbarVariant::Pruned).unwrap();
            assert!(pr.spine_complete && pr.spine.len() == 1);
        }
        within(two, draws, 0.25);
        assert!(ls.sample_tbar_star_n(&mut r, TbarVariant::Pruned).is_ok());
        for bad in [vec![], vec![(0usize, 1.0)], vec![(3, 0.5)], vec![(3, f64::NAN)]] {
            assert!(matches!(LimitSampler::new(&law, 2).unwrap().with_dtilde(&bad), Err(SampleError::InvalidPmf(_))));
        }
        assert!(LimitSampler::new(&law, 2).unwrap().sample_tbar_star_n(&mut r, TbarVariant::Tbar).is_err());
    }

    #[test]
    fn windows_are_projective() {
        // Window m+1 truncated to m has the law of window m.
        let law = classify(&WeightSequence::power_law(3.0).unwrap()).unwrap();
        let (a, b) = (LimitSampler::new(&law, 2).unwrap(), LimitSampler::new(&law, 3).unwrap());
        let pat = WindowPattern::new(vec![Constraint::RootAt(1)]);
        let pat2 = WindowPattern::new(vec![Constraint::SpinePair { index: 1, pair: DegreePair::finite(0, 0) }]);
        let mut r = rng(4);
        let draws = 40_000;
        let (mut ca, mut cb, mut da, mut db) = (0, 0, 0, 0);
        for _ in 0..draws {
            let x = a.sample(&mut r);
            let y = b.sample(&mut r).truncate(2);
            assert_eq!(x.window, y.window);
            ca += pat.matches(&x).unwrap() as usize;
            cb += pat.matches(&y).unwrap() as usize;
            da += pat2.matches(&x).unwrap() as usize;
            db += pat2.matches(&y).unwrap() as usize;
        }
        let p = (1.0 - law.mu()).powi(2);
        within(ca, draws, p);
        within(cb, draws, p);
        let q = law.prob(1);
        within(da, draws, q);
        within(db, draws, q);
    }
}
