// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::LabError;

/// Degree threshold `Ω_n` separating small from large outdegrees. Every
/// schedule tends to infinity and is `o(n)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum OmegaSchedule {
    /// `⌈n^{1/4}⌉`.
    #[default]
    QuarterPower,
    /// `⌈ln(n + 1)⌉`.
    Log,
    /// `⌈c · n^β⌉` with `0 < β < 1`.
    User { c: f64, beta: f64 },
}

impl OmegaSchedule {
    pub fn validate(&self) -> Result<(), LabError> {
        if let OmegaSchedule::User { c, beta } = *self {
            if beta.is_nan() || beta >= 1.0 {
                return Err(LabError::Config(format!("Ω schedule exponent β = {beta} must be below 1 so that Ω_n = o(n)")));
            }
            if !(beta > 0.0 && c > 0.0 && c.is_finite()) {
                return Err(LabError::Config(format!("Ω schedule needs c > 0 and β > 0 to grow (got c = {c}, β = {beta})")));
            }
        }
        Ok(())
    }

    pub fn at(&self, n: usize) -> Result<u32, LabError> {
        self.validate()?;
        let v = match *self {
            // Integer fourth root, avoiding ⌈10000^{1/4}⌉ = 11 from rounding.
            OmegaSchedule::QuarterPower => {
                let mut k = (n as f64).powf(0.25).floor() as u64;
                while k.pow(4) < n as u64 {
                    k += 1;
                }
                while k > 0 && (k - 1).pow(4) >= n as u64 {
                    k -= 1;
                }
                k
            }
            OmegaSchedule::Log => ceil_tol(((n + 1) as f64).ln()),
            OmegaSchedule::User { c, beta } => ceil_tol(c * (n as f64).powf(beta)),
        };
        Ok(v.min(u32::MAX as u64) as u32)
    }
}

/// Ceiling that treats values within 1e-9 of an integer as that integer.
fn ceil_tol(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as u64
    } else {
        x.ceil() as u64
    }
}

impl std::fmt::Display for OmegaSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OmegaSchedule::QuarterPower => f.write_str("quarter_power"),
            OmegaSchedule::Log => f.write_str("log"),
            OmegaSchedule::User { c, beta } => write!(f, "user:{c},{beta}"),
        }
    }
}

impl std::str::FromStr for OmegaSchedule {
    type Err = LabError;
    /// `quarter_power`, `log`, or `user:c,beta`.
    fn from_str(s: &str) -> Result<Self, LabError> {
        let sched = match s {
            "quarter_power" => OmegaSchedule::QuarterPower,
            "log" => OmegaSchedule::Log,
            _ => {
                let rest = s.strip_prefix("user:").ok_or_else(|| LabError::Config(format!("unknown Ω schedule '{s}'")))?;
                let (c, b) = rest.split_once(',').ok_or_else(|| LabError::Config("user schedule is user:c,beta".into()))?;
                let num = |x: &str| x.trim().parse::<f64>().map_err(|e| LabError::Config(format!("bad number '{x}': {e}")));
                OmegaSchedule::User { c: num(c)?, beta: num(b)? }
            }
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// `Ω_n` under schedule `s`.
pub fn omega_schedule(s: &OmegaSchedule, n: usize) -> Result<u32, LabError> {
    s.at(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(OmegaSchedule::QuarterPower.at(10_000).unwrap(), 10);
        assert_eq!(OmegaSchedule::QuarterPower.at(10_001).unwrap(), 11);
        assert_eq!(OmegaSchedule::QuarterPower.at(8001).unwrap(), 10);
        assert_eq!(OmegaSchedule::QuarterPower.at(1).unwrap(), 1);
        assert_eq!(OmegaSchedule::Log.at(1000).unwrap(), 7);
        assert_eq!(OmegaSchedule::User { c: 2.0, beta: 0.5 }.at(100).unwrap(), 20);
        assert!(OmegaSchedule::User { c: 2.0, beta: 1.0 }.at(10).is_err());
        assert!("user:2,1.0".parse::<OmegaSchedule>().is_err());
        assert_eq!("user:1.5,0.25".parse::<OmegaSchedule>().unwrap(), OmegaSchedule::User { c: 1.5, beta: 0.25 });
    }

    #[test]
    fn nondecreasing_and_sublinear() {
        for s in [OmegaSchedule::QuarterPower, OmegaSchedule::Log, OmegaSchedule::User { c: 3.0, beta: 0.6 }] {
            let v: Vec<u32> = (1..5000).map(|n| s.at(n).unwrap()).collect();
            assert!(v.windows(2).all(|w| w[0] <= w[1]), "{s}");
            assert!((v[4998] as f64) < 4999.0 / 4.0, "{s}");
        }
    }
}
