// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Radius, Weight, WeightError, WeightSequence};

/// Parses the tab-separated weight format:
///
/// ```text
/// radius=inf
/// 0	1
/// 2	1/2
/// 3	0.25
/// ```
///
/// Blank lines and `#` comments are skipped. Missing indices have weight zero.
#[allow(clippy::tabs_in_doc_comments)]
pub fn parse_weight_file(text: &str, tag: &str) -> Result<WeightSequence, WeightError> {
    let mut radius = None;
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| WeightError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(v) = line.strip_prefix("radius=") {
            if radius.is_some() {
                return Err(err("duplicate radius header".into()));
            }
            radius = Some(parse_radius(v.trim()).ok_or_else(|| err(format!("bad radius `{v}`")))?);
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(k), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `k<TAB>weight`".into()));
        };
        let k: usize = k.trim().parse().map_err(|_| err(format!("bad index `{k}`")))?;
        let w = parse_weight(v.trim()).ok_or_else(|| err(format!("bad weight `{v}`")))?;
        if entries.insert(k, w).is_some() {
            return Err(err(format!("duplicate index {k}")));
        }
    }
    let radius = radius.ok_or(WeightError::Parse { line: 0, msg: "missing radius= header".into() })?;
    WeightSequence::table(entries, Some(radius), tag)
}

pub fn read_weight_file(path: &Path) -> Result<WeightSequence, WeightError> {
    let text = std::fs::read_to_string(path)?;
    parse_weight_file(&text, &format!("file:{}", path.display()))
}

fn parse_radius(v: &str) -> Option<Radius> {
    match v {
        "inf" | "+inf" | "infinity" => Some(Radius::Infinite),
        _ => {
            let r = f64::from_str(v).ok()?;
            if r == 0.0 {
                Some(Radius::Zero)
            } else if r > 0.0 && r.is_finite() {
                Some(Radius::Finite(r))
            } else {
                None
            }
        }
    }
}

fn parse_weight(v: &str) -> Option<Weight> {
    if let Some((p, q)) = v.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(Weight::Rational(BigRational::new(p, q)));
    }
    if let Ok(p) = BigInt::from_str(v) {
        return Some(Weight::Rational(BigRational::from_integer(p)));
    }
    let x = f64::from_str(v).ok()?;
    x.is_finite().then_some(Weight::Decimal(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entries() {
        let w = parse_weight_file("radius=inf\n0\t1\n# comment\n2\t1/2\n3\t0.25\n", "t").unwrap();
        assert_eq!(w.max_support(), Some(3));
        assert_eq!(w.weight(2), 0.5);
        assert_eq!(w.weight(1), 0.0);
        assert!(!w.is_rational());
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_weight_file("radius=inf\n0\t1\n2 1\n", "t").unwrap_err();
        assert!(matches!(e, WeightError::Parse { line: 3, .. }));
        let e = parse_weight_file("0\t1\n2\t1\n", "t").unwrap_err();
        assert!(matches!(e, WeightError::Parse { line: 0, .. }));
        let e = parse_weight_file("radius=inf\n0\t1\n2\t1/0\n", "t").unwrap_err();
        assert!(matches!(e, WeightError::Parse { line: 3, .. }));
    }

    #[test]
    fn validation_applies() {
        let e = parse_weight_file("radius=inf\n0\t1\n1\t1\n", "t").unwrap_err();
        assert!(matches!(e, WeightError::Invalid(_)));
    }
}
