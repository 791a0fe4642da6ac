// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Count, DegreePair, PointedTree, SpineRecord, Subtree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Where an address starts: the center `u_0`, or the `rank`-th sibling
/// (1-based, nearest first) on one side of the spine below `u_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Anchor {
    Center,
    Spine { index: usize, side: Side, rank: u32 },
}

/// A vertex off the spine: an anchor followed by 1-based child ranks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Address {
    pub anchor: Anchor,
    pub path: Vec<u32>,
}

impl Address {
    pub fn center(path: Vec<u32>) -> Self {
        Address { anchor: Anchor::Center, path }
    }

    pub fn sibling(index: usize, side: Side, rank: u32, path: Vec<u32>) -> Self {
        Address { anchor: Anchor::Spine { index, side, rank }, path }
    }

    /// Smallest window that materializes this vertex.
    fn window(&self) -> u32 {
        let deepest_rank = self.path.iter().copied().max().unwrap_or(0);
        let depth = self.path.len() as u32;
        match self.anchor {
            Anchor::Center => depth.max(deepest_rank),
            Anchor::Spine { index, rank, .. } => (index as u32 + 1 + depth).max(rank).max(deepest_rank),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    Outdegree {
        at: Address,
        degree: u32,
    },
    SpinePair {
        index: usize,
        pair: DegreePair,
    },
    /// At least `min_left` siblings on the left and `min_right` on the right.
    SpineAtLeast {
        index: usize,
        min_left: u32,
        min_right: u32,
    },
    /// Outdegree of `u_index` strictly above `omega`.
    SpineDegreeAbove {
        index: usize,
        omega: u32,
    },
    /// The spine ends at the root exactly at `u_h`.
    RootAt(usize),
}

/// A finite conjunction of constraints on a pointed tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WindowPattern {
    constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("pattern probes outside the materialized window")]
pub struct InsufficientWindow;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

impl WindowPattern {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        WindowPattern { constraints }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Pins every materialized outdegree and spine pair of `pt`, and the
    /// spine length when it is known.
    pub fn exact(pt: &PointedTree) -> Self {
        let mut cs = Vec::new();
        if pt.spine_complete {
            cs.push(Constraint::RootAt(pt.spine.len()));
        }
        push_subtree(&mut cs, &pt.center, Anchor::Center);
        for (i0, rec) in pt.spine.iter().enumerate() {
            let index = i0 + 1;
            cs.push(Constraint::SpinePair { index, pair: rec.pair });
            for (side, list) in [(Side::Left, &rec.left), (Side::Right, &rec.right)] {
                for (r, s) in list.iter().enumerate() {
                    push_subtree(&mut cs, s, Anchor::Spine { index, side, rank: r as u32 + 1 });
                }
            }
        }
        WindowPattern { constraints: cs }
    }

    /// Smallest window `m` at which [`matches`] is guaranteed to decide.
    pub fn required_window(&self) -> u32 {
        self.constraints
            .iter()
            .map(|c| match c {
                Constraint::Outdegree { at, .. } => at.window(),
                Constraint::SpinePair { index, .. }
                | Constraint::SpineAtLeast { index, .. }
                | Constraint::SpineDegreeAbove { index, .. } => *index as u32,
                Constraint::RootAt(h) => *h as u32,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn matches(&self, pt: &PointedTree) -> Result<bool, InsufficientWindow> {
        matches(pt, self)
    }
}

fn push_subtree(cs: &mut Vec<Constraint>, s: &Subtree, anchor: Anchor) {
    // Walk the materialized nodes, tracking the rank path.
    let mut stack: Vec<(usize, Vec<u32>)> = vec![(0, Vec::new())];
    while let Some((p, path)) = stack.pop() {
        let node = s.nodes()[p];
        for r in (0..node.shown).rev() {
            let mut child_path = path.clone();
            child_path.push(r + 1);
            stack.push((s.child(p, r).unwrap(), child_path));
        }
        cs.push(Constraint::Outdegree { at: Address { anchor, path }, degree: node.degree });
    }
}

/// `Ok(true)` iff every constraint holds. A violated constraint wins over
/// one that cannot be decided inside the window.
pub fn matches(pt: &PointedTree, pat: &WindowPattern) -> Result<bool, InsufficientWindow> {
    let mut unknown = false;
    for c in &pat.constraints {
        match eval(pt, c) {
            Tri::No => return Ok(false),
            Tri::Unknown => unknown = true,
            Tri::Yes => {}
        }
    }
    if unknown {
        Err(InsufficientWindow)
    } else {
        Ok(true)
    }
}

fn spine_record(pt: &PointedTree, index: usize) -> Result<&SpineRecord, Tri> {
    debug_assert!(index >= 1);
    match pt.spine.get(index - 1) {
        Some(r) => Ok(r),
        None if pt.spine_complete => Err(Tri::No),
        None => Err(Tri::Unknown),
    }
}

fn eval(pt: &PointedTree, c: &Constraint) -> Tri {
    match c {
        Constraint::RootAt(h) => {
            if pt.spine_complete {
                (pt.spine.len() == *h).into()
            } else if pt.spine.len() >= *h {
                Tri::No
            } else {
                Tri::Unknown
            }
        }
        Constraint::SpinePair { index, pair } => match spine_record(pt, *index) {
            Ok(r) => (r.pair == *pair).into(),
            Err(t) => t,
        },
        Constraint::SpineAtLeast { index, min_left, min_right } => match spine_record(pt, *index) {
            Ok(r) => (r.pair.left.at_least(*min_left) && r.pair.right.at_least(*min_right)).into(),
            Err(t) => t,
        },
        Constraint::SpineDegreeAbove { index, omega } => match spine_record(pt, *index) {
            Ok(r) => match r.pair.total() {
                Count::Infinite => Tri::Yes,
                Count::Finite(d) => (d > *omega).into(),
            },
            Err(t) => t,
        },
        Constraint::Outdegree { at, degree } => {
            let subtree = match at.anchor {
                Anchor::Center => &pt.center,
                Anchor::Spine { index, side, rank } => {
                    let rec = match spine_record(pt, index) {
                        Ok(r) => r,
                        Err(t) => return t,
                    };
                    let (count, list) = match side {
                        Side::Left => (rec.pair.left, &rec.left),
                        Side::Right => (rec.pair.right, &rec.right),
                    };
                    if rank == 0 || !count.at_least(rank) {
                        return Tri::No;
                    }
                    match list.get(rank as usize - 1) {
                        Some(s) => s,
                        None => return Tri::Unknown,
                    }
                }
            };
            let mut p = 0usize;
            for &r in &at.path {
                let node = subtree.nodes()[p];
                if r == 0 || r > node.degree {
                    return Tri::No;
                }
                match subtree.child(p, r - 1) {
                    Some(c) => p = c,
                    None => return Tri::Unknown,
                }
            }
            (subtree.nodes()[p].degree == *degree).into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{extended_fringe, pointed_at, PlaneTree, Window};

    fn tree(s: &str) -> PlaneTree {
        s.parse().unwrap()
    }

    #[test]
    fn empty_pattern_matches() {
        let pt = extended_fringe(&tree("2,0,0"), 1, 1).unwrap().unwrap();
        assert_eq!(WindowPattern::default().matches(&pt), Ok(true));
    }

    #[test]
    fn threshold_on_star() {
        let star = tree("9,0,0,0,0,0,0,0,0,0");
        let pat = WindowPattern::default().with(Constraint::SpineAtLeast { index: 1, min_left: 2, min_right: 2 });
        for v in 3..=7 {
            let pt = extended_fringe(&star, v, 1).unwrap().unwrap();
            assert_eq!(pat.matches(&pt), Ok(true));
            // Thresholds read the full pair even in a narrow window.
            assert_eq!(pat.matches(&pt.truncate(1)), Ok(true));
        }
        let pt = extended_fringe(&star, 2, 1).unwrap().unwrap();
        assert_eq!(pat.matches(&pt), Ok(false));
    }

    #[test]
    fn exact_pattern_and_perturbations() {
        let t = tree("3,1,2,0,0,0,1,0");
        let pt = extended_fringe(&t, 3, 3).unwrap().unwrap();
        let pat = WindowPattern::exact(&pt);
        assert_eq!(pat.matches(&pt), Ok(true));
        for (i, c) in pat.constraints().iter().enumerate() {
            let perturbed = match c.clone() {
                Constraint::Outdegree { at, degree } => Constraint::Outdegree { at, degree: degree + 1 },
                Constraint::SpinePair { index, pair } => Constraint::SpinePair {
                    index,
                    pair: DegreePair { left: pair.right, right: Count::Finite(pair.left.finite().unwrap() + 1) },
                },
                Constraint::RootAt(h) => Constraint::RootAt(h + 1),
                other => other,
            };
            let mut cs = pat.constraints().to_vec();
            cs[i] = perturbed;
            assert_eq!(WindowPattern::new(cs).matches(&pt), Ok(false), "constraint {i}");
        }
    }

    #[test]
    fn narrow_window_is_insufficient_not_false() {
        let t = tree("2,0,1,1,0");
        let layout = t.layout();
        let full = pointed_at(&t, &layout, 0, 1, Window::Full);
        let pat = WindowPattern::exact(&full);
        assert_eq!(pat.matches(&full.truncate(1)), Err(InsufficientWindow));
        let m = pat.required_window();
        assert_eq!(pat.matches(&full.truncate(m)), Ok(true));
    }

    #[test]
    fn monotone_under_window_enlargement() {
        let trees = ["4,1,0,2,0,0,0,1,0", "2,2,1,0,0,3,0,0,0", "1,3,0,1,0,0"];
        for a in trees {
            for b in trees {
                let (ta, tb) = (tree(a), tree(b));
                let (la, lb) = (ta.layout(), tb.layout());
                for va in 0..ta.len() {
                    let pat = WindowPattern::exact(&pointed_at(&ta, &la, 0, va, Window::Full));
                    for vb in 0..tb.len() {
                        let full = pointed_at(&tb, &lb, 0, vb, Window::Full);
                        let truth = pat.matches(&full).unwrap();
                        for m in 0..6 {
                            if let Ok(x) = pat.matches(&full.truncate(m)) {
                                assert_eq!(x, truth, "{a}@{va} vs {b}@{vb}, m={m}");
                                for m2 in m..7 {
                                    assert_eq!(pat.matches(&full.truncate(m2)), Ok(truth));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
