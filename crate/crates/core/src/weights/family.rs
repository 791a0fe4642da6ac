// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::WeightError;

/// Radius of convergence of the weight generating function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Zero,
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn as_f64(self) -> f64 {
        match self {
            Radius::Zero => 0.0,
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Zero => write!(f, "0"),
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}

/// A single user-supplied weight.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Rational(BigRational),
    Decimal(f64),
}

impl Weight {
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Decimal(x) => *x,
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Weight::Rational(r) => r > &BigRational::zero(),
            Weight::Decimal(x) => *x > 0.0,
        }
    }
}

/// The built-in weight families plus finite user tables.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `ω_k = 1`.
    Uniform,
    /// `ω_k = 1/k!`.
    Cayley,
    /// `ω_0 = ω_2 = 1`.
    Binary,
    /// `ω_0 = ω_1 = ω_2 = 1`.
    Motzkin,
    /// `ω_0 = 1`, `ω_k = k^{-α}`.
    PowerLaw { alpha: f64 },
    /// `ω_k = k!^α`.
    Factorial { alpha: f64 },
    /// Finitely supported weights, from a file or built programmatically.
    Table(BTreeMap<usize, Weight>),
}

/// A branching weight sequence `(ω_k)` with its radius of convergence.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    family: Family,
    radius: Radius,
    tag: String,
}

fn ln_factorial(k: usize) -> f64 {
    // Exact summation is fine for the sizes in play and keeps results bit-stable.
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn factorial(k: usize) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn integral_alpha(alpha: f64) -> Option<u32> {
    (alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= 64.0).then_some(alpha as u32)
}

impl WeightSequence {
    fn new(family: Family, radius: Radius, tag: String) -> Result<Self, WeightError> {
        let w = WeightSequence { family, radius, tag };
        w.validate()?;
        Ok(w)
    }

    pub fn uniform() -> Self {
        Self::new(Family::Uniform, Radius::Finite(1.0), "uniform".into()).unwrap()
    }

    pub fn cayley() -> Self {
        Self::new(Family::Cayley, Radius::Infinite, "cayley".into()).unwrap()
    }

    pub fn binary() -> Self {
        Self::new(Family::Binary, Radius::Infinite, "binary".into()).unwrap()
    }

    pub fn motzkin() -> Self {
        Self::new(Family::Motzkin, Radius::Infinite, "motzkin".into()).unwrap()
    }

    pub fn power_law(alpha: f64) -> Result<Self, WeightError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(WeightError::Invalid(format!("powerlaw needs alpha > 0, got {alpha}")));
        }
        Self::new(Family::PowerLaw { alpha }, Radius::Finite(1.0), format!("powerlaw(alpha={alpha})"))
    }

    pub fn factorial(alpha: f64) -> Result<Self, WeightError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(WeightError::Invalid(format!("factorial needs alpha > 0, got {alpha}")));
        }
        Self::new(Family::Factorial { alpha }, Radius::Zero, format!("factorial(alpha={alpha})"))
    }

    /// Finitely supported weights. `radius` defaults to infinity, which is the
    /// only consistent value for a polynomial generating function.
    pub fn table(entries: BTreeMap<usize, Weight>, radius: Option<Radius>, tag: impl Into<String>) -> Result<Self, WeightError> {
        Self::new(Family::Table(entries), radius.unwrap_or(Radius::Infinite), tag.into())
    }

    /// Looks up a built-in family by name.
    pub fn builtin(name: &str, alpha: Option<f64>) -> Result<Self, WeightError> {
        match name {
            "uniform" | "catalan" => Ok(Self::uniform()),
            "cayley" | "poisson" => Ok(Self::cayley()),
            "binary" => Ok(Self::binary()),
            "motzkin" => Ok(Self::motzkin()),
            "powerlaw" => Self::power_law(alpha.unwrap_or(3.0)),
            "factorial" => Self::factorial(alpha.unwrap_or(1.0)),
            other => Err(WeightError::UnknownFamily(other.to_string())),
        }
    }

    fn validate(&self) -> Result<(), WeightError> {
        if let Family::Table(entries) = &self.family {
            for (k, v) in entries {
                let x = v.to_f64();
                if x.is_nan() || x < 0.0 {
                    return Err(WeightError::Invalid(format!("weight at k={k} is negative or NaN")));
                }
            }
        }
        if !self.is_positive(0) {
            return Err(WeightError::Invalid("omega_0 must be positive".into()));
        }
        let has_branching = match self.max_support() {
            Some(max) => (2..=max).any(|k| self.is_positive(k)),
            None => true,
        };
        if !has_branching {
            return Err(WeightError::Invalid("some omega_k with k >= 2 must be positive".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn radius(&self) -> Radius {
        self.radius
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Largest k with positive weight, if the support is finite.
    pub fn max_support(&self) -> Option<usize> {
        match &self.family {
            Family::Binary | Family::Motzkin => Some(2),
            Family::Table(entries) => entries.iter().rev().find(|(_, v)| v.is_positive()).map(|(k, _)| *k),
            _ => None,
        }
    }

    pub fn is_positive(&self, k: usize) -> bool {
        match &self.family {
            Family::Binary => k == 0 || k == 2,
            Family::Motzkin => k <= 2,
            Family::Table(entries) => entries.get(&k).is_some_and(|v| v.is_positive()),
            _ => true,
        }
    }

    /// `ln ω_k`, `-inf` for zero weights.
    pub fn ln_weight(&self, k: usize) -> f64 {
        if !self.is_positive(k) {
            return f64::NEG_INFINITY;
        }
        match &self.family {
            Family::Uniform | Family::Binary | Family::Motzkin => 0.0,
            Family::Cayley => -ln_factorial(k),
            Family::PowerLaw { alpha } => {
                if k == 0 {
                    0.0
                } else {
                    -alpha * (k as f64).ln()
                }
            }
            Family::Factorial { alpha } => alpha * ln_factorial(k),
            Family::Table(entries) => entries[&k].to_f64().ln(),
        }
    }

    /// `ω_k` as a double; overflows to infinity for superexponential families.
    pub fn weight(&self, k: usize) -> f64 {
        match &self.family {
            Family::Table(entries) => entries.get(&k).map_or(0.0, Weight::to_f64),
            Family::PowerLaw { alpha } if k > 0 => (k as f64).powf(-alpha),
            _ => self.ln_weight(k).exp(),
        }
    }

    /// `ω_k` as an exact rational, when the family has rational weights.
    pub fn exact_weight(&self, k: usize) -> Option<BigRational> {
        if !self.is_positive(k) {
            return Some(BigRational::zero());
        }
        match &self.family {
            Family::Uniform | Family::Binary | Family::Motzkin => Some(BigRational::one()),
            Family::Cayley => Some(BigRational::new(BigInt::one(), factorial(k))),
            Family::PowerLaw { alpha } => {
                let a = integral_alpha(*alpha)?;
                if k == 0 {
                    return Some(BigRational::one());
                }
                Some(BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(k), a as usize)))
            }
            Family::Factorial { alpha } => {
                let a = integral_alpha(*alpha)?;
                Some(BigRational::from_integer(num_traits::pow(factorial(k), a as usize)))
            }
            Family::Table(entries) => match &entries[&k] {
                Weight::Rational(r) => Some(r.clone()),
                Weight::Decimal(_) => None,
            },
        }
    }

    /// True when every weight has an exact rational value.
    pub fn is_rational(&self) -> bool {
        match &self.family {
            Family::PowerLaw { alpha } | Family::Factorial { alpha } => integral_alpha(*alpha).is_some(),
            Family::Table(entries) => entries.values().all(|v| matches!(v, Weight::Rational(_))),
            _ => true,
        }
    }

    /// Upper bound on `ω_{j+1} t / ω_j` over all `j ≥ k` (positive weights only).
    /// `None` when no geometric domination exists.
    pub fn ratio_bound(&self, k: usize, t: f64) -> Option<f64> {
        if let Some(max) = self.max_support() {
            if k >= max {
                return Some(0.0);
            }
        }
        match &self.family {
            Family::Uniform => Some(t),
            Family::Cayley => Some(t / (k as f64 + 1.0)),
            Family::PowerLaw { .. } => Some(t),
            Family::Factorial { .. } => None,
            // Finite support with k < max: no uniform ratio bound, but the
            // series is a polynomial and is summed exactly.
            Family::Binary | Family::Motzkin | Family::Table(_) => None,
        }
    }

    /// `gcd { k : ω_k > 0 }`.
    pub fn span(&self) -> usize {
        match self.max_support() {
            Some(max) => (1..=max).filter(|&k| self.is_positive(k)).fold(0usize, |g, k| g.gcd(&k)).max(1),
            // Every infinite built-in family has ω_1 > 0.
            None => 1,
        }
    }

    /// Whether trees with `n` vertices can have positive weight.
    pub fn admits(&self, n: usize) -> bool {
        n >= 1 && (n - 1).is_multiple_of(self.span())
    }

    /// Smallest admissible size `≥ n`.
    pub fn round_up_admissible(&self, n: usize) -> usize {
        let s = self.span();
        let n = n.max(1);
        n + (s - (n - 1) % s) % s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[(usize, i64)]) -> WeightSequence {
        let entries = pairs.iter().map(|&(k, v)| (k, Weight::Rational(BigRational::from_integer(v.into())))).collect();
        WeightSequence::table(entries, None, "t").unwrap()
    }

    #[test]
    fn span_examples() {
        assert_eq!(table(&[(0, 1), (2, 1)]).span(), 2);
        assert_eq!(WeightSequence::uniform().span(), 1);
        assert_eq!(table(&[(0, 1), (3, 1), (6, 1)]).span(), 3);
        assert_eq!(WeightSequence::binary().span(), 2);
    }

    #[test]
    fn builtin_examples() {
        let u = WeightSequence::builtin("uniform", None).unwrap();
        assert_eq!(u.radius(), Radius::Finite(1.0));
        assert_eq!(u.exact_weight(17), Some(BigRational::one()));
        let f = WeightSequence::builtin("factorial", Some(1.0)).unwrap();
        assert_eq!(f.radius(), Radius::Zero);
        assert_eq!(f.exact_weight(5), Some(BigRational::from_integer(120.into())));
        let p = WeightSequence::builtin("powerlaw", Some(3.0)).unwrap();
        assert_eq!(p.radius(), Radius::Finite(1.0));
        assert_eq!(p.exact_weight(0), Some(BigRational::one()));
        assert_eq!(p.exact_weight(2), Some(BigRational::new(1.into(), 8.into())));
        assert!(matches!(WeightSequence::builtin("nope", None), Err(WeightError::UnknownFamily(_))));
    }

    #[test]
    fn validation() {
        let e = WeightSequence::table([(0, Weight::Decimal(1.0)), (1, Weight::Decimal(1.0))].into_iter().collect(), None, "x");
        assert!(matches!(e, Err(WeightError::Invalid(_))));
        let e = WeightSequence::table([(2, Weight::Decimal(1.0))].into_iter().collect(), None, "x");
        assert!(matches!(e, Err(WeightError::Invalid(_))));
        let e = WeightSequence::table([(0, Weight::Decimal(1.0)), (2, Weight::Decimal(-1.0))].into_iter().collect(), None, "x");
        assert!(matches!(e, Err(WeightError::Invalid(_))));
        assert!(WeightSequence::power_law(-1.0).is_err());
    }

    #[test]
    fn admissible_sizes() {
        let b = WeightSequence::binary();
        assert!(b.admits(5));
        assert!(!b.admits(4));
        assert_eq!(b.round_up_admissible(4), 5);
        assert_eq!(b.round_up_admissible(5), 5);
        assert_eq!(WeightSequence::uniform().round_up_admissible(8), 8);
    }
}
