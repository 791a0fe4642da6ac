// SPDX-License-Identifier: Apache-2.0

//! Finite plane trees in DFS outdegree encoding, pointed trees with a
//! backwards-growing spine, window patterns and exploration orders.

mod explore;
mod pattern;
mod pointed;
pub mod serial;

pub use explore::{explore, Policy};
pub use pattern::{Address, Anchor, Constraint, InsufficientWindow, Side, WindowPattern};
pub use pointed::{
    ancestor, extended_fringe, large_ancestor, pointed_at, pointed_fringe, truncate_at_large_ancestor, Count, DegreePair, PointedTree,
    SpineRecord, SubNode, Subtree, Window,
};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("empty degree sequence")]
    Empty,
    #[error("degrees sum to {sum}, expected {expected}")]
    SumMismatch { sum: u64, expected: u64 },
    #[error("ladder condition violated at index {index}")]
    Ladder { index: usize },
    #[error("vertex {index} out of range for a tree with {len} vertices")]
    VertexOutOfRange { index: usize, len: usize },
    #[error("spine index {index} out of range (spine length {len})")]
    SpineOutOfRange { index: usize, len: usize },
    #[error("cannot parse tree: {0}")]
    Parse(String),
}

/// Index of a vertex in DFS order.
pub type VertexRef = usize;

const NO_PARENT: u32 = u32::MAX;

/// A finite rooted plane tree, stored as its DFS outdegree sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneTree {
    degrees: Vec<u32>,
}

/// Parent, fringe size and depth of every vertex.
#[derive(Clone, Debug)]
pub struct Layout {
    parent: Vec<u32>,
    size: Vec<u32>,
    depth: Vec<u32>,
}

impl Layout {
    pub fn parent(&self, v: VertexRef) -> Option<VertexRef> {
        let p = self.parent[v];
        (p != NO_PARENT).then_some(p as usize)
    }

    pub fn size(&self, v: VertexRef) -> usize {
        self.size[v] as usize
    }

    pub fn depth(&self, v: VertexRef) -> usize {
        self.depth[v] as usize
    }
}

/// Checks the ladder condition and the total; `Ok` means `seq` is a tree.
pub fn check_degrees(seq: &[u32]) -> Result<(), TreeError> {
    if seq.is_empty() {
        return Err(TreeError::Empty);
    }
    let n = seq.len();
    let mut s: i64 = 0;
    for (i, &d) in seq.iter().enumerate() {
        s += d as i64 - 1;
        if s < 0 && i + 1 < n {
            return Err(TreeError::Ladder { index: i });
        }
    }
    if s != -1 {
        let sum: u64 = seq.iter().map(|&d| d as u64).sum();
        return Err(TreeError::SumMismatch { sum, expected: n as u64 - 1 });
    }
    Ok(())
}

/// The unique rotation of `seq` that encodes a plane tree, with its start offset.
pub fn cycle_shift(seq: &[u32]) -> Result<(PlaneTree, usize), TreeError> {
    if seq.is_empty() {
        return Err(TreeError::Empty);
    }
    let n = seq.len();
    let sum: u64 = seq.iter().map(|&d| d as u64).sum();
    if sum != n as u64 - 1 {
        return Err(TreeError::SumMismatch { sum, expected: n as u64 - 1 });
    }
    // Start right after the first minimum of the walk Σ (d_i − 1).
    let (mut s, mut min, mut at) = (0i64, i64::MAX, 0usize);
    for (i, &d) in seq.iter().enumerate() {
        s += d as i64 - 1;
        if s < min {
            min = s;
            at = i;
        }
    }
    let j = (at + 1) % n;
    let mut degrees = Vec::with_capacity(n);
    degrees.extend_from_slice(&seq[j..]);
    degrees.extend_from_slice(&seq[..j]);
    debug_assert!(check_degrees(&degrees).is_ok());
    Ok((PlaneTree { degrees }, j))
}

impl PlaneTree {
    pub fn from_degrees(degrees: Vec<u32>) -> Result<Self, TreeError> {
        check_degrees(&degrees)?;
        Ok(PlaneTree { degrees })
    }

    pub(crate) fn from_degrees_unchecked(degrees: Vec<u32>) -> Self {
        debug_assert!(check_degrees(&degrees).is_ok());
        PlaneTree { degrees }
    }

    pub fn leaf() -> Self {
        PlaneTree { degrees: vec![0] }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn into_degrees(self) -> Vec<u32> {
        self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self, v: VertexRef) -> u32 {
        self.degrees[v]
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn layout(&self) -> Layout {
        let n = self.len();
        let mut parent = vec![NO_PARENT; n];
        let mut depth = vec![0u32; n];
        // (vertex, children still to attach)
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for v in 0..n {
            if let Some(top) = stack.last_mut() {
                parent[v] = top.0;
                depth[v] = depth[top.0 as usize] + 1;
                top.1 -= 1;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            if self.degrees[v] > 0 {
                stack.push((v as u32, self.degrees[v]));
            }
        }
        let mut size = vec![1u32; n];
        for v in (1..n).rev() {
            let p = parent[v] as usize;
            size[p] += size[v];
        }
        Layout { parent, size, depth }
    }

    /// Children of `v` in plane order.
    pub fn children<'a>(&'a self, layout: &'a Layout, v: VertexRef) -> impl Iterator<Item = VertexRef> + 'a {
        let d = self.degrees[v] as usize;
        let mut next = v + 1;
        (0..d).map(move |_| {
            let c = next;
            next += layout.size(c);
            c
        })
    }

    /// The fringe subtree rooted at `v`.
    pub fn fringe(&self, v: VertexRef) -> Result<PlaneTree, TreeError> {
        self.check_vertex(v)?;
        let mut need = 1usize;
        let mut end = v;
        while need > 0 {
            need += self.degrees[end] as usize;
            need -= 1;
            end += 1;
        }
        Ok(PlaneTree { degrees: self.degrees[v..end].to_vec() })
    }

    pub fn height_of(&self, v: VertexRef) -> Result<usize, TreeError> {
        self.check_vertex(v)?;
        Ok(self.layout().depth(v))
    }

    pub(crate) fn check_vertex(&self, v: VertexRef) -> Result<(), TreeError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(TreeError::VertexOutOfRange { index: v, len: self.len() })
        }
    }

    /// `Π ω_{d_i}` in log space.
    pub fn ln_weight(&self, w: &crate::weights::WeightSequence) -> f64 {
        self.degrees.iter().map(|&d| w.ln_weight(d as usize)).sum()
    }
}

/// A uniformly random vertex.
pub fn uniform_vertex<R: Rng + ?Sized>(t: &PlaneTree, rng: &mut R) -> VertexRef {
    rng.random_range(0..t.len())
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTree({self})")
    }
}

impl FromStr for PlaneTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let degrees = s
            .trim()
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| TreeError::Parse(format!("bad degree `{x}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        PlaneTree::from_degrees(degrees)
    }
}
