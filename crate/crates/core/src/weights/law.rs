// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::series::{power_tail, psi, weighted_series, zeta};
use super::{Family, Radius, WeightError, WeightSequence};

/// The three regimes of weight sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightType {
    I,
    II,
    III,
}

impl std::fmt::Display for WeightType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightType::I => "I",
            WeightType::II => "II",
            WeightType::III => "III",
        })
    }
}

/// How the offspring law behaves beyond the stored truncation point `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// Nothing beyond `K`.
    None,
    /// `π_{k+1} / π_k ≤ ratio < 1` for all `k > K`.
    Ratio { ratio: f64 },
    /// `π_k = k^{-alpha} / norm` for all `k > K`.
    PowerLaw { alpha: f64, norm: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum ExactPmf {
    /// `π_k = 2^{-k-1}`.
    HalfGeometric,
    Finite(Vec<BigRational>),
}

/// Tuning knobs for [`classify_with`].
#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    /// Absolute tolerance for the bisection on `ψ(t) = 1`.
    pub tau_tol: f64,
    /// Target bound on the probability mass discarded by truncation.
    pub tail_tol: f64,
    /// Truncation point used for polynomially decaying laws.
    pub power_law_cut: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tau_tol: 1e-12, tail_tol: 1e-14, power_law_cut: 4096 }
    }
}

/// The tilted offspring law `π_k = τ^k ω_k / φ(τ)` with its moments.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringLaw {
    weights: WeightSequence,
    kind: WeightType,
    tau: f64,
    tau_exact: Option<BigRational>,
    nu: f64,
    mu: f64,
    sigma2: f64,
    ln_phi_tau: f64,
    pmf: Vec<f64>,
    exact: Option<ExactPmf>,
    tail: Tail,
    tail_mass: f64,
}

/// The size-biased law: mass `k π_k` at `k ≥ 1`, defect `1 − μ` at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeBiasedLaw {
    /// `finite_pmf[k] = k π_k` for `k ≤ K` (so entry 0 is zero).
    pub finite_pmf: Vec<f64>,
    /// Mass of `k π_k` over `k > K`.
    pub tail_mass: f64,
    pub infinity_mass: f64,
}

pub fn classify(w: &WeightSequence) -> Result<OffspringLaw, WeightError> {
    classify_with(w, &ClassifyOptions::default())
}

pub fn classify_with(w: &WeightSequence, opts: &ClassifyOptions) -> Result<OffspringLaw, WeightError> {
    if w.max_support().is_some() && w.radius() != Radius::Infinite {
        return Err(WeightError::Invalid("finitely supported weights have infinite radius of convergence".into()));
    }
    if w.radius() == Radius::Zero {
        return Ok(OffspringLaw {
            weights: w.clone(),
            kind: WeightType::III,
            tau: 0.0,
            tau_exact: Some(BigRational::zero()),
            nu: 0.0,
            mu: 0.0,
            sigma2: 0.0,
            ln_phi_tau: w.ln_weight(0),
            pmf: vec![1.0],
            exact: Some(ExactPmf::Finite(vec![BigRational::one()])),
            tail: Tail::None,
            tail_mass: 0.0,
        });
    }

    let nu = limit_nu(w)?;
    if nu < 1.0 {
        return type_two(w, nu, opts);
    }

    let (tau, tau_exact) = find_tau(w, nu, opts)?;
    let phi = weighted_series(w, tau, 0, 1e-17)?.value;
    let second = weighted_series(w, tau, 2, 1e-17)?.value;
    let ln_phi = phi.ln();
    let sigma2 = second / phi - 1.0;

    let (pmf, tail, tail_mass) = truncate_geometric(w, tau, ln_phi, opts)?;
    let exact = exact_pmf(w, tau_exact.as_ref(), pmf.len());
    Ok(OffspringLaw {
        weights: w.clone(),
        kind: WeightType::I,
        tau,
        tau_exact,
        nu,
        mu: 1.0,
        sigma2,
        ln_phi_tau: ln_phi,
        pmf,
        exact,
        tail,
        tail_mass,
    })
}

/// `ν = lim_{t ↑ ρ} ψ(t)`.
fn limit_nu(w: &WeightSequence) -> Result<f64, WeightError> {
    match w.radius() {
        Radius::Zero => Ok(0.0),
        Radius::Infinite => Ok(w.max_support().map_or(f64::INFINITY, |m| m as f64)),
        Radius::Finite(rho) => match w.family() {
            Family::PowerLaw { alpha } => {
                debug_assert_eq!(rho, 1.0);
                if *alpha > 2.0 {
                    Ok(zeta(alpha - 1.0) / (1.0 + zeta(*alpha)))
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Family::Uniform => Ok(f64::INFINITY),
            _ => psi(w, rho),
        },
    }
}

fn find_tau(w: &WeightSequence, nu: f64, opts: &ClassifyOptions) -> Result<(f64, Option<BigRational>), WeightError> {
    match w.family() {
        Family::Uniform => return Ok((0.5, Some(BigRational::new(1.into(), 2.into())))),
        // Σ (k-1) t^k / k! vanishes at t = 1.
        Family::Cayley => return Ok((1.0, Some(BigRational::one()))),
        _ => {}
    }
    let rho = w.radius().as_f64();
    if nu == 1.0 && rho.is_finite() {
        return Ok((rho, None));
    }
    let mut hi = if rho.is_finite() { rho } else { 1.0 };
    if !rho.is_finite() {
        while psi(w, hi)? <= 1.0 {
            hi *= 2.0;
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > opts.tau_tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if psi(w, mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let exact = if w.is_rational() && w.max_support().is_some() { recover_rational_root(w, tau) } else { None };
    let tau = exact.as_ref().and_then(|r| r.to_f64()).unwrap_or(tau);
    Ok((tau, exact))
}

/// Looks for a small-denominator rational `t` with `Σ (k-1) ω_k t^k = 0` exactly,
/// among the continued-fraction convergents of `approx`.
fn recover_rational_root(w: &WeightSequence, approx: f64) -> Option<BigRational> {
    let max = w.max_support()?;
    let coeffs: Vec<BigRational> =
        (0..=max).map(|k| w.exact_weight(k).map(|x| x * BigRational::from_integer(BigInt::from(k as i64 - 1)))).collect::<Option<_>>()?;
    let eval = |t: &BigRational| {
        let mut acc = BigRational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    };
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = approx;
    for _ in 0..40 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        let cand = BigRational::new(h2.clone(), k2.clone());
        if k2.abs() > BigInt::from(1_000_000) {
            return None;
        }
        if cand.is_positive() && eval(&cand).is_zero() {
            return Some(cand);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

fn exact_pmf(w: &WeightSequence, tau: Option<&BigRational>, len: usize) -> Option<ExactPmf> {
    let tau = tau?;
    if matches!(w.family(), Family::Uniform) {
        return Some(ExactPmf::HalfGeometric);
    }
    let max = w.max_support()?;
    debug_assert!(len > max);
    let terms: Vec<BigRational> =
        (0..=max).map(|k| w.exact_weight(k).map(|x| x * num_traits::pow(tau.clone(), k))).collect::<Option<_>>()?;
    let phi: BigRational = terms.iter().fold(BigRational::zero(), |a, b| a + b);
    Some(ExactPmf::Finite(terms.into_iter().map(|t| t / &phi).collect()))
}

/// Truncates a law with `τ < ρ` (or finite support) at the first `K` where the
/// geometric domination bound on the remaining mass is below `tail_tol`.
fn truncate_geometric(w: &WeightSequence, tau: f64, ln_phi: f64, opts: &ClassifyOptions) -> Result<(Vec<f64>, Tail, f64), WeightError> {
    let ln_tau = tau.ln();
    let prob = |k: usize| {
        let lw = w.ln_weight(k);
        if lw == f64::NEG_INFINITY {
            0.0
        } else {
            (k as f64 * ln_tau + lw - ln_phi).exp()
        }
    };
    if let Some(max) = w.max_support() {
        return Ok(((0..=max).map(prob).collect(), Tail::None, 0.0));
    }
    let mut pmf = Vec::new();
    let mut k = 0usize;
    loop {
        pmf.push(prob(k));
        let next = prob(k + 1);
        if let Some(r) = w.ratio_bound(k + 1, tau) {
            if r < 1.0 {
                let bound = next / (1.0 - r);
                if bound < opts.tail_tol {
                    return Ok((pmf, Tail::Ratio { ratio: r }, bound));
                }
            }
        }
        k += 1;
        if k > 50_000_000 {
            return Err(WeightError::Precision(format!("could not truncate offspring law of {} below {:e}", w.tag(), opts.tail_tol)));
        }
    }
}

fn type_two(w: &WeightSequence, nu: f64, opts: &ClassifyOptions) -> Result<OffspringLaw, WeightError> {
    let Family::PowerLaw { alpha } = *w.family() else {
        return Err(WeightError::Invalid(format!("type II classification is only available for power-law tails, not {}", w.tag())));
    };
    let phi = 1.0 + zeta(alpha);
    let cut = opts.power_law_cut;
    let pmf: Vec<f64> = (0..=cut).map(|k| w.weight(k) / phi).collect();
    let tail_mass = power_tail(alpha, cut + 1).0 / phi;
    let sigma2 = if alpha > 3.0 { zeta(alpha - 2.0) / phi - nu * nu } else { f64::INFINITY };
    Ok(OffspringLaw {
        weights: w.clone(),
        kind: WeightType::II,
        tau: 1.0,
        tau_exact: Some(BigRational::one()),
        nu,
        mu: nu,
        sigma2,
        ln_phi_tau: phi.ln(),
        pmf,
        exact: None,
        tail: Tail::PowerLaw { alpha, norm: phi },
        tail_mass,
    })
}

impl OffspringLaw {
    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn kind(&self) -> WeightType {
        self.kind
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_exact(&self) -> Option<&BigRational> {
        self.tau_exact.as_ref()
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `ln φ(τ)`.
    pub fn ln_phi_tau(&self) -> f64 {
        self.ln_phi_tau
    }

    /// Stored masses `π_0 .. π_K`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// The truncation point `K`.
    pub fn truncation(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Mass (or rigorous bound on the mass) of `π` beyond `K`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `π_k` for any `k`.
    pub fn prob(&self, k: usize) -> f64 {
        if let Some(p) = self.pmf.get(k) {
            return *p;
        }
        match self.tail {
            Tail::None => 0.0,
            Tail::PowerLaw { alpha, norm } => (k as f64).powf(-alpha) / norm,
            Tail::Ratio { .. } => {
                let lw = self.weights.ln_weight(k);
                if lw == f64::NEG_INFINITY {
                    0.0
                } else {
                    (k as f64 * self.tau.ln() + lw - self.ln_phi_tau).exp()
                }
            }
        }
    }

    /// `π_k` exactly, when the law is rational.
    pub fn prob_exact(&self, k: usize) -> Option<BigRational> {
        match self.exact.as_ref()? {
            ExactPmf::HalfGeometric => Some(BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), k + 1))),
            ExactPmf::Finite(v) => Some(v.get(k).cloned().unwrap_or_else(BigRational::zero)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn size_biased(&self) -> SizeBiasedLaw {
        size_biased(self)
    }
}

pub fn size_biased(law: &OffspringLaw) -> SizeBiasedLaw {
    let finite_pmf: Vec<f64> = law.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).collect();
    let cut = law.truncation();
    let tail_mass = match law.tail {
        Tail::None => 0.0,
        Tail::PowerLaw { alpha, norm } => power_tail(alpha - 1.0, cut + 1).0 / norm,
        Tail::Ratio { ratio } => {
            let k = (cut + 1) as f64;
            let q = ratio * (k + 1.0) / k;
            if q < 1.0 {
                k * law.prob(cut + 1) / (1.0 - q)
            } else {
                // The ratio bound is loose here; sum a stretch explicitly.
                (cut + 1..cut + 10_000).map(|j| j as f64 * law.prob(j)).sum()
            }
        }
    };
    SizeBiasedLaw { finite_pmf, tail_mass, infinity_mass: 1.0 - law.mu }
}
