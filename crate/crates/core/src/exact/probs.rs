// SPDX-License-Identifier: Apache-2.0

//! Exact finite-n probabilities of the balls-in-boxes model and of the
//! simply generated tree with a uniformly chosen vertex.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::{ExactScalar, Ext, Scalar};
use super::table::{convolve, PartitionTable};
use super::ExactError;
use crate::par::Exec;
use crate::tree::{Constraint, PointedTree, Window, WindowPattern};
use crate::weights::OffspringLaw;

/// A value with a relative error bound.
#[derive(Clone, Debug)]
pub(crate) struct Approx<S> {
    pub v: S,
    pub e: f64,
}

impl<S: Scalar> Approx<S> {
    fn mul(&self, o: &Approx<S>, u: f64) -> Approx<S> {
        Approx { v: self.v.mul(&o.v), e: self.e + o.e + self.e * o.e + u }
    }

    fn div(&self, o: &Approx<S>, u: f64) -> Approx<S> {
        let s = self.e + o.e;
        Approx { v: self.v.div(&o.v), e: s + 2.0 * s * s + u }
    }

    fn add(&self, o: &Approx<S>, u: f64) -> Approx<S> {
        Approx { v: self.v.add(&o.v), e: self.e.max(o.e) + u }
    }

    fn exact(&self) -> ExactScalar {
        self.v.to_exact(self.e)
    }
}

/// A threshold on the spine vertex directly above a pinned pointed subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// At least `left` siblings left and `right` siblings right of the spine child.
    AtLeast { left: u32, right: u32 },
    /// Outdegree strictly above `Ω`.
    DegreeAbove(u32),
}

/// An event about `(T_n, v_0)` with a uniformly chosen vertex `v_0`.
#[derive(Clone, Debug, PartialEq)]
pub enum FringeEvent {
    /// `v_0` is the root.
    RootIsPointed,
    /// `H_h(T_n, v_0) = T•` where `h` is the spine length of `T•`.
    Exact(PointedTree),
    /// `H_h(T_n, v_0) = T•` and `u_{h+1}` satisfies the threshold.
    Threshold { below: PointedTree, threshold: Threshold },
}

impl FringeEvent {
    /// Builds an event from a fully materialized pointed tree whose spine
    /// records at the given indices are replaced by thresholds. Only a single
    /// threshold on the topmost record is supported.
    pub fn new(tree: PointedTree, thresholds: Vec<(usize, Threshold)>) -> Result<Self, ExactError> {
        if tree.window != Window::Full || !tree.spine_complete {
            return Err(ExactError::UnsupportedPattern("the pointed tree must be fully materialized".into()));
        }
        match thresholds.as_slice() {
            [] => Ok(FringeEvent::Exact(tree)),
            [(i, th)] if *i == tree.spine.len() && *i >= 1 => {
                let mut below = tree;
                below.spine.pop();
                Ok(FringeEvent::Threshold { below, threshold: *th })
            }
            [(i, _)] => Err(ExactError::UnsupportedPattern(format!(
                "threshold at spine index {i}; only the topmost record (index {}) may carry one",
                tree.spine.len()
            ))),
            _ => Err(ExactError::UnsupportedPattern(format!("{} threshold ancestors; at most one is supported", thresholds.len()))),
        }
    }

    /// The same event as a window pattern, for matching sampled trees.
    pub fn pattern(&self) -> WindowPattern {
        let strip = |pt: &PointedTree| {
            WindowPattern::new(
                WindowPattern::exact(pt).constraints().iter().filter(|c| !matches!(c, Constraint::RootAt(_))).cloned().collect(),
            )
        };
        match self {
            FringeEvent::RootIsPointed => WindowPattern::new(vec![Constraint::RootAt(0)]),
            FringeEvent::Exact(pt) => strip(pt),
            FringeEvent::Threshold { below, threshold } => {
                let index = below.spine.len() + 1;
                strip(below).with(match *threshold {
                    Threshold::AtLeast { left, right } => Constraint::SpineAtLeast { index, min_left: left, min_right: right },
                    Threshold::DegreeAbove(omega) => Constraint::SpineDegreeAbove { index, omega },
                })
            }
        }
    }
}

fn dfs_of(pt: &PointedTree) -> Result<Vec<u32>, ExactError> {
    pt.flatten()
        .map(|(t, _)| t.into_degrees())
        .ok_or_else(|| ExactError::UnsupportedPattern("the pointed tree must be fully materialized".into()))
}

impl<S: Scalar> PartitionTable<S> {
    fn u(&self) -> f64 {
        S::unit(self.ctx())
    }

    fn normalizer(&self) -> Result<Approx<S>, ExactError> {
        let n = self.n();
        let (v, e) = self.z(n - 1, n)?;
        if v.is_zero() {
            return Err(ExactError::ZeroProbability(format!("no tree with n = {n} has positive weight")));
        }
        Ok(Approx { v, e })
    }

    /// `Σ_T ω(T)` over trees with `n` vertices, `= Z(n−1, n)/n`.
    pub fn total_tree_weight(&self) -> Result<ExactScalar, ExactError> {
        let n = self.n();
        let (v, e) = self.z(n - 1, n)?;
        Ok(Approx { v, e }.div(&Approx { v: S::from_u64(self.ctx(), n as u64), e: 0.0 }, self.u()).exact())
    }

    /// `(Π ω_{d_i}) · Z(n−1−Σd, n−len(d))`, the unnormalized prefix weight.
    pub(crate) fn prefix_weight(&self, d: &[u32]) -> Result<Approx<S>, ExactError> {
        let n = self.n();
        let sum: u64 = d.iter().map(|&x| x as u64).sum();
        let zero = Approx { v: S::zero_with(self.ctx()), e: 0.0 };
        if d.len() > n || sum > n as u64 - 1 {
            return Ok(zero);
        }
        let u = self.u();
        let mut acc = Approx { v: S::one_with(self.ctx()), e: 0.0 };
        for &x in d {
            let w = &self.omega()[x as usize];
            if w.is_zero() {
                return Ok(zero);
            }
            acc = acc.mul(&Approx { v: w.clone(), e: self.omega_err() }, u);
        }
        let (z, e) = self.z(n - 1 - sum as usize, n - d.len())?;
        Ok(acc.mul(&Approx { v: z, e }, u))
    }

    /// `Pr{(Y_0, …, Y_ℓ) = (d_0, …, d_ℓ)}` under the balls-in-boxes law.
    pub fn prefix_prob(&self, d: &[u32]) -> Result<ExactScalar, ExactError> {
        let num = self.prefix_weight(d)?;
        Ok(num.div(&self.normalizer()?, self.u()).exact())
    }

    /// Exact probability of a fringe event for `(T_n, v_0)`.
    pub fn fringe_event_prob(&self, ev: &FringeEvent) -> Result<ExactScalar, ExactError> {
        let n = self.n();
        let u = self.u();
        match ev {
            FringeEvent::RootIsPointed => {
                self.normalizer()?;
                let one = Approx { v: S::one_with(self.ctx()), e: 0.0 };
                Ok(one.div(&Approx { v: S::from_u64(self.ctx(), n as u64), e: 0.0 }, u).exact())
            }
            FringeEvent::Exact(pt) => self.prefix_prob(&dfs_of(pt)?),
            FringeEvent::Threshold { below, threshold } => {
                let dbar = dfs_of(below)?;
                // (first admissible root degree r, positions subtracted from r)
                let (r0, sub) = match *threshold {
                    Threshold::AtLeast { left, right } => (left as usize + right as usize + 1, left as usize + right as usize),
                    Threshold::DegreeAbove(omega) => (omega as usize + 1, 0),
                };
                let sum_bar: usize = dbar.iter().map(|&x| x as usize).sum();
                let mut total = Approx { v: S::zero_with(self.ctx()), e: 0.0 };
                if dbar.len() < n && sum_bar < n {
                    // Σ_r mult(r) · ω_r Π ω_{d̄_i} · Z(n−1−Σd̄−r, n−1−|d̄|)
                    let slots = n - 1 - dbar.len();
                    let col = self.column(slots)?;
                    let mut prod = Approx { v: S::one_with(self.ctx()), e: 0.0 };
                    for &x in &dbar {
                        prod = prod.mul(&Approx { v: self.omega()[x as usize].clone(), e: self.omega_err() }, u);
                    }
                    for r in r0..n {
                        if r + sum_bar > n - 1 {
                            break;
                        }
                        let w = &self.omega()[r];
                        let z = &col.vals[n - 1 - sum_bar - r];
                        if w.is_zero() || z.is_zero() {
                            continue;
                        }
                        let mult = S::from_u64(self.ctx(), (r - sub) as u64);
                        let term = Approx { v: w.mul(z).mul(&mult), e: self.omega_err() + col.err + 2.0 * u };
                        total = total.add(&term, u);
                    }
                    total = total.mul(&prod, u);
                }
                Ok(total.div(&self.normalizer()?, u).exact())
            }
        }
    }

    /// Relative weights `k ω_k Z(n−1−k, n−1)` of the root degree, with their sum.
    fn root_degree_weights(&self) -> Result<(Vec<Approx<S>>, Approx<S>), ExactError> {
        let n = self.n();
        let col = self.column(n - 1)?;
        let u = self.u();
        let mut total = Approx { v: S::zero_with(self.ctx()), e: 0.0 };
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let v = self.omega()[k].mul(&col.vals[n - 1 - k]).mul(&S::from_u64(self.ctx(), k as u64));
            let a = Approx { v, e: self.omega_err() + col.err + 2.0 * u };
            total = total.add(&a, u);
            out.push(a);
        }
        Ok((out, total))
    }

    /// `Pr{d⁺(root) = k}` for `k = 0..n−1`.
    pub fn root_degree_dist(&self) -> Result<Vec<ExactScalar>, ExactError> {
        let n = self.n();
        if n == 1 {
            return Ok(vec![S::one_with(self.ctx()).to_exact(0.0)]);
        }
        self.normalizer()?;
        // Pr{d = k} = (nk/(n−1)) ω_k Z(n−1−k, n−1) / Z(n−1, n), and the
        // weights sum to (n−1)/n · Z(n−1, n), so normalizing them is exact.
        let (ws, total) = self.root_degree_weights()?;
        Ok(ws.iter().map(|a| a.div(&total, self.u()).exact()).collect())
    }

    /// The root-degree law conditioned on `d⁺(root) > Ω`, as `(k, p)` pairs.
    pub fn dtilde_dist(&self, omega: u32) -> Result<Vec<(usize, ExactScalar)>, ExactError> {
        let n = self.n();
        if n == 1 {
            return Err(ExactError::ZeroProbability(format!("root degree above {omega} is impossible for n = 1")));
        }
        let (ws, _) = self.root_degree_weights()?;
        let u = self.u();
        let mut total = Approx { v: S::zero_with(self.ctx()), e: 0.0 };
        for a in &ws[(omega as usize + 1).min(n)..] {
            total = total.add(a, u);
        }
        if total.v.is_zero() {
            return Err(ExactError::ZeroProbability(format!("root degree above {omega} has probability zero at n = {n}")));
        }
        Ok(ws
            .iter()
            .enumerate()
            .skip(omega as usize + 1)
            .filter(|(_, a)| !a.v.is_zero())
            .map(|(k, a)| (k, a.div(&total, u).exact()))
            .collect())
    }
}

/// `Pr{|T^1| + … + |T^ℓ| = m}` for a forest of `ℓ` independent Galton–Watson
/// trees, `= (ℓ/m) Pr{ξ_1 + … + ξ_m = m − ℓ}`.
pub fn forest_count_prob(law: &OffspringLaw, l: usize, m: usize) -> Result<ExactScalar, ExactError> {
    if l == 0 || l > m {
        return Err(ExactError::Invalid(format!("need 1 ≤ ℓ ≤ m, got ℓ = {l}, m = {m}")));
    }
    let len = m - l + 1;
    if law.is_exact() {
        let pmf: Vec<BigRational> = (0..len).map(|k| law.prob_exact(k).unwrap_or_else(<BigRational as Zero>::zero)).collect();
        let p = conv_power(&pmf, m, len, &<BigRational as Zero>::zero(), &<BigRational as One>::one());
        let r = BigRational::new(l.into(), m.into()) * &p[m - l];
        return Ok(ExactScalar::Rational(r));
    }
    let pmf: Vec<Ext> = (0..len).map(|k| Ext::from_f64(law.prob(k))).collect();
    let p = conv_power(&pmf, m, len, &Ext::ZERO, &Ext::ONE);
    let v = Ext::from_f64(l as f64 / m as f64).mul(p[m - l]);
    // Input masses are accurate to ~1e-14 relative; each of the O(log m)
    // squarings adds at most len+1 roundings.
    let steps = 2.0 * (usize::BITS - m.leading_zeros()) as f64;
    let err = m as f64 * 1e-14 + steps * (len as f64 + 1.0) * f64::EPSILON;
    Ok(v.to_exact(err))
}

/// `p^{∗k}` truncated to `len` entries, by binary powering.
fn conv_power<S: Scalar>(p: &[S], k: usize, len: usize, zero: &S, one: &S) -> Vec<S> {
    let mut result = vec![zero.clone(); len];
    result[0] = one.clone();
    let mut base = p.to_vec();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = convolve(Exec::Sequential, &result, &base, len, zero);
        }
        k >>= 1;
        if k > 0 {
            base = convolve(Exec::Sequential, &base, &base, len, zero);
        }
    }
    result
}
