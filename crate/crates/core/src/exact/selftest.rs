// SPDX-License-Identifier: Apache-2.0

//! Rational tables against brute-force enumeration, for every small size.

use num_rational::BigRational;
use serde::Serialize;

use super::{
    brute_event_prob, brute_root_degree, enumerate_trees, tree_weight, AnyTable, ExactError, FringeEvent, Mode, TableOptions, Threshold,
};
use crate::tree::{pointed_at, PointedTree, Window};
use crate::weights::WeightSequence;

#[derive(Clone, Debug, Default, Serialize)]
pub struct SelfTestReport {
    pub families: Vec<String>,
    pub max_n: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The small-family set: uniform, Motzkin, full binary and `1/k!`.
pub fn selftest_families() -> Vec<WeightSequence> {
    vec![
        WeightSequence::uniform(),
        WeightSequence::motzkin(),
        WeightSequence::binary(),
        WeightSequence::factorial(1.0).expect("α = 1 is valid"),
    ]
}

fn pointed_trees(k: usize) -> Result<Vec<PointedTree>, ExactError> {
    let mut out = Vec::new();
    for s in 1..=k {
        for (t, _) in enumerate_trees(&WeightSequence::uniform(), s)? {
            let layout = t.layout();
            out.extend((0..t.len()).map(|v| pointed_at(&t, &layout, 0, v, Window::Full)));
        }
    }
    Ok(out)
}

/// Exact events checked by [`selftest`]: all pointed trees with up to four
/// vertices, the root event, and thresholds above pointed trees with up to three.
pub fn selftest_events() -> Result<Vec<FringeEvent>, ExactError> {
    let mut events: Vec<FringeEvent> = pointed_trees(4)?.into_iter().map(FringeEvent::Exact).collect();
    events.push(FringeEvent::RootIsPointed);
    for b in pointed_trees(3)? {
        for (left, right) in [(0, 0), (1, 0), (0, 2), (1, 1)] {
            events.push(FringeEvent::Threshold { below: b.clone(), threshold: Threshold::AtLeast { left, right } });
        }
        for omega in 0..3 {
            events.push(FringeEvent::Threshold { below: b.clone(), threshold: Threshold::DegreeAbove(omega) });
        }
    }
    Ok(events)
}

fn rat(x: &super::ExactScalar) -> Result<BigRational, ExactError> {
    x.as_rational().cloned().ok_or_else(|| ExactError::Invalid("expected a rational value".into()))
}

/// Prefix, root-degree and fringe-event probabilities from rational tables
/// must equal brute-force counts exactly for every admissible `n ≤ max_n`.
pub fn selftest(families: &[WeightSequence], max_n: usize) -> Result<SelfTestReport, ExactError> {
    let events = selftest_events()?;
    let mut rep = SelfTestReport { families: families.iter().map(|w| w.tag().to_string()).collect(), max_n, ..Default::default() };
    for w in families {
        for n in (1..=max_n).filter(|&n| w.admits(n)) {
            let t = AnyTable::build(w, n, Mode::Rational, TableOptions::default())?;
            let z = rat(&t.z(n - 1, n)?)?;
            for (tree, _) in enumerate_trees(w, n)? {
                rep.checks += 1;
                let want = tree_weight(w, &tree).ok_or_else(|| ExactError::NotRational(w.tag().into()))? / &z;
                if rat(&t.prefix_prob(tree.degrees())?)? != want {
                    rep.failures.push(format!("{} n={n}: prefix_prob({tree})", w.tag()));
                }
            }
            rep.checks += 1;
            let rd = t.root_degree_dist()?.iter().map(rat).collect::<Result<Vec<_>, _>>()?;
            if rd != brute_root_degree(w, n)? {
                rep.failures.push(format!("{} n={n}: root_degree_dist", w.tag()));
            }
            for ev in &events {
                rep.checks += 1;
                if rat(&t.fringe_event_prob(ev)?)? != brute_event_prob(w, n, ev)? {
                    rep.failures.push(format!("{} n={n}: {ev:?}", w.tag()));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_selftest_passes() {
        let rep = selftest(&selftest_families(), 5).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.checks > 500);
    }
}
