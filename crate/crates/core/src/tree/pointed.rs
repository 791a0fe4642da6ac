// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::fmt::Write as _;

use super::{Layout, PlaneTree, TreeError, VertexRef};

/// A number of siblings on one side of the spine; `Infinite` only occurs in
/// windows of limit objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Finite(u32),
    Infinite,
}

impl Count {
    pub fn finite(self) -> Option<u32> {
        match self {
            Count::Finite(k) => Some(k),
            Count::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Count::Infinite
    }

    pub fn at_least(self, k: u32) -> bool {
        match self {
            Count::Finite(x) => x >= k,
            Count::Infinite => true,
        }
    }

    /// How many of these siblings a window of width `cap` shows.
    fn capped(self, cap: Option<u32>) -> u32 {
        match (self, cap) {
            (Count::Finite(k), None) => k,
            (Count::Finite(k), Some(c)) => k.min(c),
            (Count::Infinite, Some(c)) => c,
            (Count::Infinite, None) => panic!("infinite sibling count in an unbounded window"),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

/// Siblings to the left and right of the spine child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreePair {
    pub left: Count,
    pub right: Count,
}

impl DegreePair {
    pub fn finite(left: u32, right: u32) -> Self {
        DegreePair { left: Count::Finite(left), right: Count::Finite(right) }
    }

    /// Outdegree of the spine vertex, `left + right + 1`.
    pub fn total(self) -> Count {
        match (self.left, self.right) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b + 1),
            _ => Count::Infinite,
        }
    }
}

/// One materialized vertex: its true outdegree and how many of its first
/// children are materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubNode {
    pub degree: u32,
    pub shown: u32,
}

/// A possibly truncated plane tree: materialized vertices in DFS order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subtree {
    nodes: Vec<SubNode>,
}

impl Subtree {
    pub fn from_nodes(nodes: Vec<SubNode>) -> Result<Self, TreeError> {
        let mut need = 1i64;
        for (i, n) in nodes.iter().enumerate() {
            if n.shown > n.degree {
                return Err(TreeError::Parse(format!("node {i} shows more children than it has")));
            }
            if need == 0 {
                return Err(TreeError::Parse("trailing nodes after a complete subtree".into()));
            }
            need += n.shown as i64 - 1;
        }
        if need != 0 || nodes.is_empty() {
            return Err(TreeError::Parse("incomplete subtree".into()));
        }
        Ok(Subtree { nodes })
    }

    pub fn from_plane_tree(t: &PlaneTree) -> Self {
        Subtree { nodes: t.degrees().iter().map(|&d| SubNode { degree: d, shown: d }).collect() }
    }

    /// The fringe of `t` at `root`, keeping vertices up to `depth` levels
    /// below it and the first `cap` children of each.
    pub fn from_plane(t: &PlaneTree, layout: &Layout, root: VertexRef, depth: Option<u32>, cap: Option<u32>) -> Self {
        if depth.is_none() && cap.is_none() {
            let end = root + layout.size(root);
            return Subtree { nodes: t.degrees()[root..end].iter().map(|&d| SubNode { degree: d, shown: d }).collect() };
        }
        let mut nodes = Vec::new();
        let mut stack = vec![(root, 0u32)];
        let mut kids = Vec::new();
        while let Some((v, lvl)) = stack.pop() {
            let degree = t.degree(v);
            let shown = if depth.is_some_and(|d| lvl >= d) { 0 } else { cap.map_or(degree, |c| degree.min(c)) };
            nodes.push(SubNode { degree, shown });
            kids.clear();
            kids.extend(t.children(layout, v).take(shown as usize));
            stack.extend(kids.iter().rev().map(|&c| (c, lvl + 1)));
        }
        Subtree { nodes }
    }

    /// A single vertex of outdegree `degree` with nothing below it shown.
    pub fn boundary(degree: u32) -> Self {
        Subtree { nodes: vec![SubNode { degree, shown: 0 }] }
    }

    pub fn nodes(&self) -> &[SubNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root_degree(&self) -> u32 {
        self.nodes[0].degree
    }

    pub fn is_full(&self) -> bool {
        self.nodes.iter().all(|n| n.shown == n.degree)
    }

    pub fn to_plane_tree(&self) -> Option<PlaneTree> {
        self.is_full().then(|| PlaneTree::from_degrees_unchecked(self.nodes.iter().map(|n| n.degree).collect()))
    }

    pub fn max_degree(&self) -> u32 {
        self.nodes.iter().map(|n| n.degree).max().unwrap_or(0)
    }

    /// Position just past the materialized subtree starting at `p`.
    pub fn end(&self, p: usize) -> usize {
        let mut need = 1usize;
        let mut q = p;
        while need > 0 {
            need += self.nodes[q].shown as usize;
            need -= 1;
            q += 1;
        }
        q
    }

    /// Position of the materialized child of rank `r` (0-based) of node `p`.
    pub fn child(&self, p: usize, r: u32) -> Option<usize> {
        if r >= self.nodes[p].shown {
            return None;
        }
        let mut c = p + 1;
        for _ in 0..r {
            c = self.end(c);
        }
        Some(c)
    }

    /// Restricts to `depth` levels and `cap` children per vertex.
    pub fn truncate(&self, depth: u32, cap: u32) -> Subtree {
        let mut nodes = Vec::new();
        let mut stack = vec![(0usize, 0u32)];
        let mut kids = Vec::new();
        while let Some((p, lvl)) = stack.pop() {
            let n = self.nodes[p];
            let shown = if lvl >= depth { 0 } else { n.shown.min(cap) };
            nodes.push(SubNode { degree: n.degree, shown });
            kids.clear();
            let mut c = p + 1;
            for _ in 0..shown {
                kids.push(c);
                c = self.end(c);
            }
            stack.extend(kids.iter().rev().map(|&c| (c, lvl + 1)));
        }
        Subtree { nodes }
    }

    fn encode_into(&self, out: &mut String) {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if n.shown == n.degree {
                let _ = write!(out, "{}", n.degree);
            } else {
                let _ = write!(out, "{}/{}", n.degree, n.shown);
            }
        }
    }
}

impl fmt::Display for Subtree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.encode_into(&mut s);
        f.write_str(&s)
    }
}

/// A spine vertex `u_i`: its sibling counts around `u_{i-1}` and the
/// materialized sibling subtrees, nearest to the spine first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpineRecord {
    pub pair: DegreePair,
    pub left: Vec<Subtree>,
    pub right: Vec<Subtree>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Window {
    Full,
    /// Vertices within distance `m` of the center, at most `m` children per
    /// vertex and `m` siblings per side on the spine.
    Truncated(u32),
}

impl Window {
    pub fn cap(self) -> Option<u32> {
        match self {
            Window::Full => None,
            Window::Truncated(m) => Some(m),
        }
    }
}

/// A plane tree centered at a pointed vertex `u_0`, seen through its
/// backwards spine `u_1, u_2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointedTree {
    /// Fringe subtree at `u_0`.
    pub center: Subtree,
    /// `spine[i - 1]` describes `u_i`.
    pub spine: Vec<SpineRecord>,
    pub window: Window,
    /// Whether the last spine record is the root; `false` means the spine
    /// continues beyond what is materialized.
    pub spine_complete: bool,
}

impl PointedTree {
    pub fn height(&self) -> Option<usize> {
        self.spine_complete.then_some(self.spine.len())
    }

    /// Checks record/materialization consistency.
    pub fn validate(&self) -> Result<(), TreeError> {
        let bad = |msg: &str| Err(TreeError::Parse(msg.to_string()));
        let cap = self.window.cap();
        if let Some(m) = cap {
            if self.spine.len() > m as usize {
                return bad("spine longer than the window");
            }
        }
        for (i0, rec) in self.spine.iter().enumerate() {
            let i = i0 as u32 + 1;
            let (l, r) = match cap {
                None => {
                    if rec.pair.left.is_infinite() || rec.pair.right.is_infinite() {
                        return bad("infinite degree in a full window");
                    }
                    (rec.pair.left.capped(None), rec.pair.right.capped(None))
                }
                Some(m) if i < m => (rec.pair.left.capped(cap), rec.pair.right.capped(cap)),
                Some(_) => (0, 0),
            };
            if rec.left.len() != l as usize || rec.right.len() != r as usize {
                return bad("materialized siblings disagree with the window");
            }
        }
        Ok(())
    }

    /// The plain tree and the pointed vertex index, for fully materialized trees.
    pub fn flatten(&self) -> Option<(PlaneTree, VertexRef)> {
        if self.window != Window::Full || !self.spine_complete {
            return None;
        }
        let mut degrees = Vec::new();
        for rec in self.spine.iter().rev() {
            degrees.push(rec.pair.total().finite()?);
            for s in rec.left.iter().rev() {
                degrees.extend(s.nodes.iter().map(|n| n.degree));
            }
        }
        let v = degrees.len();
        degrees.extend(self.center.nodes.iter().map(|n| n.degree));
        for rec in &self.spine {
            for s in &rec.right {
                degrees.extend(s.nodes.iter().map(|n| n.degree));
            }
        }
        Some((PlaneTree::from_degrees(degrees).ok()?, v))
    }

    /// Restriction to window `m` (which must not exceed the current window).
    pub fn truncate(&self, m: u32) -> PointedTree {
        if let Window::Truncated(cur) = self.window {
            assert!(m <= cur, "cannot widen a window from {cur} to {m}");
        }
        let keep = self.spine.len().min(m as usize);
        let spine = self.spine[..keep]
            .iter()
            .enumerate()
            .map(|(i0, rec)| {
                let i = i0 as u32 + 1;
                let (left, right) = if i < m {
                    let d = m - i - 1;
                    (
                        rec.left.iter().take(m as usize).map(|s| s.truncate(d, m)).collect(),
                        rec.right.iter().take(m as usize).map(|s| s.truncate(d, m)).collect(),
                    )
                } else {
                    (Vec::new(), Vec::new())
                };
                SpineRecord { pair: rec.pair, left, right }
            })
            .collect();
        PointedTree {
            center: self.center.truncate(m, m),
            spine,
            window: Window::Truncated(m),
            spine_complete: self.spine_complete && self.spine.len() <= m as usize,
        }
    }

    /// A compact canonical string, usable as a key for empirical distributions.
    pub fn encode(&self) -> String {
        let mut s = String::new();
        match self.window {
            Window::Full => s.push('F'),
            Window::Truncated(m) => {
                let _ = write!(s, "W{m}");
            }
        }
        s.push('|');
        self.center.encode_into(&mut s);
        for rec in &self.spine {
            let _ = write!(s, "|{}:{}", rec.pair.left, rec.pair.right);
            for (tag, side) in [('<', &rec.left), ('>', &rec.right)] {
                for t in side {
                    s.push(tag);
                    t.encode_into(&mut s);
                }
            }
        }
        s.push_str(if self.spine_complete { "|." } else { "|+" });
        s
    }
}

/// `k`-th ancestor of `v`, if it exists.
pub fn ancestor(layout: &Layout, v: VertexRef, k: usize) -> Option<VertexRef> {
    let mut cur = v;
    for _ in 0..k {
        cur = layout.parent(cur)?;
    }
    Some(cur)
}

/// The fringe at `top` (an ancestor of `v` or `v` itself) pointed at `v`,
/// seen through `window`.
pub fn pointed_at(t: &PlaneTree, layout: &Layout, top: VertexRef, v: VertexRef, window: Window) -> PointedTree {
    let h = layout.depth(v) - layout.depth(top);
    let cap = window.cap();
    let keep = cap.map_or(h, |m| h.min(m as usize));
    let mut spine = Vec::with_capacity(keep);
    let mut cur = v;
    for i0 in 0..keep {
        let i = i0 as u32 + 1;
        let p = layout.parent(cur).expect("top must be an ancestor of v");
        let kids: Vec<VertexRef> = t.children(layout, p).collect();
        let r = kids.iter().position(|&c| c == cur).unwrap();
        let pair = DegreePair::finite(r as u32, (kids.len() - 1 - r) as u32);
        let (left, right) = match cap {
            None => (
                kids[..r].iter().rev().map(|&c| Subtree::from_plane(t, layout, c, None, None)).collect(),
                kids[r + 1..].iter().map(|&c| Subtree::from_plane(t, layout, c, None, None)).collect(),
            ),
            Some(m) if i < m => {
                let d = Some(m - i - 1);
                (
                    kids[..r].iter().rev().take(m as usize).map(|&c| Subtree::from_plane(t, layout, c, d, cap)).collect(),
                    kids[r + 1..].iter().take(m as usize).map(|&c| Subtree::from_plane(t, layout, c, d, cap)).collect(),
                )
            }
            Some(_) => (Vec::new(), Vec::new()),
        };
        spine.push(SpineRecord { pair, left, right });
        cur = p;
    }
    PointedTree { center: Subtree::from_plane(t, layout, v, cap, cap), spine, window, spine_complete: keep == h }
}

/// `H_k(t, v)`: the fringe at the `k`-th ancestor of `v`, pointed at `v`;
/// `None` plays the role of ⋄ when `v` has height below `k`.
pub fn extended_fringe(t: &PlaneTree, v: VertexRef, k: usize) -> Result<Option<PointedTree>, TreeError> {
    t.check_vertex(v)?;
    let layout = t.layout();
    Ok(ancestor(&layout, v, k).map(|top| pointed_at(t, &layout, top, v, Window::Full)))
}

/// The pointed fringe subtree at the spine vertex `u_i`.
pub fn pointed_fringe(pt: &PointedTree, i: usize) -> Result<PointedTree, TreeError> {
    if i > pt.spine.len() {
        return Err(TreeError::SpineOutOfRange { index: i, len: pt.spine.len() });
    }
    Ok(PointedTree { center: pt.center.clone(), spine: pt.spine[..i].to_vec(), window: pt.window, spine_complete: true })
}

/// Youngest strict ancestor of `v` with outdegree above `omega`.
pub fn large_ancestor(t: &PlaneTree, layout: &Layout, v: VertexRef, omega: u32) -> Option<VertexRef> {
    let mut cur = v;
    while let Some(p) = layout.parent(cur) {
        if t.degree(p) > omega {
            return Some(p);
        }
        cur = p;
    }
    None
}

/// `H(t, v, Ω)`: the pointed fringe at the youngest ancestor of `v` with
/// outdegree above `Ω`; `None` plays the role of ⋄.
pub fn truncate_at_large_ancestor(t: &PlaneTree, v: VertexRef, omega: u32) -> Result<Option<PointedTree>, TreeError> {
    t.check_vertex(v)?;
    let layout = t.layout();
    Ok(large_ancestor(t, &layout, v, omega).map(|a| pointed_at(t, &layout, a, v, Window::Full)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> PlaneTree {
        s.parse().unwrap()
    }

    fn all_trees(n: usize) -> Vec<PlaneTree> {
        // Every sequence with the right sum, kept if it is a tree.
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<PlaneTree>) {
            if cur.len() == n {
                if left == 0 {
                    if let Ok(t) = PlaneTree::from_degrees(cur.clone()) {
                        out.push(t);
                    }
                }
                return;
            }
            for d in 0..=left {
                cur.push(d);
                rec(n, left - d, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n as u32 - 1, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn extended_fringe_examples() {
        let cherry = tree("2,0,0");
        let h0 = extended_fringe(&cherry, 1, 0).unwrap().unwrap();
        assert!(h0.spine.is_empty());
        assert_eq!(h0.center.to_plane_tree(), Some(PlaneTree::leaf()));
        assert!(extended_fringe(&cherry, 1, 2).unwrap().is_none());
        let h1 = extended_fringe(&cherry, 1, 1).unwrap().unwrap();
        assert_eq!(h1.spine.len(), 1);
        assert_eq!(h1.spine[0].pair, DegreePair::finite(0, 1));
        assert_eq!(h1.spine[0].right, vec![Subtree::from_plane_tree(&PlaneTree::leaf())]);
        assert!(h1.spine[0].left.is_empty());
        assert_eq!(h1.center.to_plane_tree(), Some(PlaneTree::leaf()));
    }

    #[test]
    fn full_extended_fringe_flattens_back() {
        for n in 1..=7 {
            for t in all_trees(n) {
                let layout = t.layout();
                for v in 0..n {
                    let h = layout.depth(v);
                    let pt = extended_fringe(&t, v, h).unwrap().unwrap();
                    assert_eq!(pt.spine.len(), h);
                    pt.validate().unwrap();
                    assert_eq!(pt.flatten(), Some((t.clone(), v)));
                }
            }
        }
    }

    #[test]
    fn pointed_fringe_examples() {
        let t = tree("2,1,0,2,0,0");
        let pt = extended_fringe(&t, 4, 2).unwrap().unwrap();
        assert_eq!(pointed_fringe(&pt, 2).unwrap(), pt);
        let at0 = pointed_fringe(&pt, 0).unwrap();
        assert!(at0.spine.is_empty() && at0.center == pt.center);
        // u_1 is the vertex 3 = (2,0,0) pointed at its left leaf.
        let at1 = pointed_fringe(&pt, 1).unwrap();
        assert_eq!(at1.flatten(), Some((tree("2,0,0"), 1)));
        assert_eq!(at1, extended_fringe(&tree("2,0,0"), 1, 1).unwrap().unwrap());
        assert!(pointed_fringe(&pt, 3).is_err());
    }

    #[test]
    fn large_ancestor_examples() {
        let star = tree("9,0,0,0,0,0,0,0,0,0");
        let pt = truncate_at_large_ancestor(&star, 4, 5).unwrap().unwrap();
        assert_eq!(pt.spine.len(), 1);
        assert_eq!(pt.spine[0].pair, DegreePair::finite(3, 5));
        let path = tree("1,1,1,1,0");
        for v in 0..5 {
            assert!(truncate_at_large_ancestor(&path, v, 2).unwrap().is_none());
        }
        // Vertex 2 hangs below vertex 1 (outdegree 1), below the root (outdegree 3).
        let pt = truncate_at_large_ancestor(&tree("3,1,0,0,0"), 2, 2).unwrap().unwrap();
        assert_eq!(pt.spine.len(), 2);
        assert_eq!(pt.spine[0].pair, DegreePair::finite(0, 0));
        assert_eq!(pt.spine[1].pair, DegreePair::finite(0, 2));
        assert!(pt.spine_complete);
    }

    #[test]
    fn windows_commute_with_truncation() {
        for n in 1..=8 {
            for t in all_trees(n) {
                let layout = t.layout();
                for v in 0..n {
                    let full = pointed_at(&t, &layout, 0, v, Window::Full);
                    for m in 0..5 {
                        let direct = pointed_at(&t, &layout, 0, v, Window::Truncated(m));
                        direct.validate().unwrap();
                        assert_eq!(direct, full.truncate(m), "{t} v={v} m={m}");
                        for m2 in 0..=m {
                            assert_eq!(direct.truncate(m2), full.truncate(m2));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn encoding_is_injective_on_small_trees() {
        let mut seen = std::collections::HashMap::new();
        for n in 1..=7 {
            for t in all_trees(n) {
                let layout = t.layout();
                for v in 0..n {
                    let pt = pointed_at(&t, &layout, 0, v, Window::Full);
                    if let Some(prev) = seen.insert(pt.encode(), (t.clone(), v)) {
                        panic!("{} collides: {prev:?} vs {t} {v}", pt.encode());
                    }
                }
            }
        }
    }

    #[test]
    fn subtree_window_keeps_true_degrees() {
        let t = tree("3,2,0,0,0,1,0");
        let layout = t.layout();
        let s = Subtree::from_plane(&t, &layout, 0, Some(1), Some(2));
        assert_eq!(s.to_string(), "3/2,2/0,0");
        assert_eq!(s.root_degree(), 3);
        assert_eq!(s.child(0, 1), Some(2));
        assert_eq!(s.child(0, 2), None);
        assert!(Subtree::from_nodes(vec![SubNode { degree: 1, shown: 0 }]).is_ok());
        assert!(Subtree::from_nodes(vec![SubNode { degree: 1, shown: 1 }]).is_err());
    }
}
