// SPDX-License-Identifier: Apache-2.0

//! Power series evaluation with rigorous truncation bounds, and zeta-type
//! tail sums via Euler–Maclaurin.

use super::{WeightError, WeightSequence};

/// A truncated series value together with a bound on the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Index of the last summed term.
    pub last_index: usize,
}

const MAX_TERMS: usize = 50_000_000;

/// Evaluates `Σ_k k^power ω_k t^k` for `0 ≤ t < ρ`.
///
/// Summation stops once the geometric domination bound on the remainder drops
/// below `rel_tol` times the partial sum.
pub fn weighted_series(w: &WeightSequence, t: f64, power: u32, rel_tol: f64) -> Result<SeriesValue, WeightError> {
    if t == 0.0 {
        let value = if power == 0 { w.weight(0) } else { 0.0 };
        return Ok(SeriesValue { value, tail_bound: 0.0, last_index: 0 });
    }
    let ln_t = t.ln();
    let max_k = w.max_support();
    let mut sum = 0.0f64;
    let mut k = 0usize;
    loop {
        let term = term(w, k, ln_t, power);
        sum += term;
        if let Some(max_k) = max_k {
            if k >= max_k {
                return Ok(SeriesValue { value: sum, tail_bound: 0.0, last_index: k });
            }
            k += 1;
            continue;
        }
        // Remainder bound: the term ratio beyond k is at most r·((j+1)/j)^p.
        if k >= 1 && term > 0.0 {
            if let Some(r) = w.ratio_bound(k, t) {
                let growth = ((k + 1) as f64 / k as f64).powi(power as i32);
                let q = r * growth;
                if q < 1.0 {
                    let tail = term * q / (1.0 - q);
                    if tail <= rel_tol * sum {
                        return Ok(SeriesValue { value: sum, tail_bound: tail, last_index: k });
                    }
                }
            } else {
                return Err(WeightError::Precision(format!("no tail bound available for {} at t={t}", w.tag())));
            }
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(WeightError::Precision(format!(
                "series for {} at t={t} did not meet tolerance {rel_tol:e} within {MAX_TERMS} terms",
                w.tag()
            )));
        }
    }
}

fn term(w: &WeightSequence, k: usize, ln_t: f64, power: u32) -> f64 {
    let lw = w.ln_weight(k);
    if lw == f64::NEG_INFINITY {
        return 0.0;
    }
    let kp = (k as f64).powi(power as i32);
    if kp == 0.0 {
        return 0.0;
    }
    (lw + k as f64 * ln_t).exp() * kp
}

/// `ψ(t) = t φ'(t) / φ(t)`.
pub fn psi(w: &WeightSequence, t: f64) -> Result<f64, WeightError> {
    let phi = weighted_series(w, t, 0, 1e-17)?;
    let dphi = weighted_series(w, t, 1, 1e-17)?;
    Ok(dphi.value / phi.value)
}

// B_{2j} / (2j)! for j = 1..=8.
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// `Σ_{k ≥ start} k^{-s}` for `s > 1`, `start ≥ 1`.
///
/// Small indices are summed directly and the rest is closed by Euler–Maclaurin
/// with eight Bernoulli corrections; `k^{-s}` is completely monotone, so the
/// remainder is bounded by the first omitted correction, which is returned as
/// the second component.
pub fn power_tail(s: f64, start: usize) -> (f64, f64) {
    assert!(s > 1.0, "power_tail needs s > 1");
    assert!(start >= 1);
    let cut = start.max(32);
    let mut direct = 0.0f64;
    // Sum from the small end upwards is less accurate; go from the top.
    for k in (start..cut).rev() {
        direct += (k as f64).powf(-s);
    }
    let n = cut as f64;
    let mut em = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Derivative factor s(s+1)...(s+2j-2) n^{-s-2j+1}.
    let mut rising = s;
    let mut pow = n.powf(-s - 1.0);
    let mut last = 0.0;
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let c = b * rising * pow;
        if j == BERNOULLI_OVER_FACT.len() - 1 {
            last = c.abs();
            break;
        }
        em += c;
        rising *= (s + 2.0 * j as f64 + 1.0) * (s + 2.0 * j as f64 + 2.0);
        pow /= n * n;
    }
    (direct + em, last + f64::EPSILON * (direct + em))
}

/// Riemann zeta for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    power_tail(s, 1).0
}
