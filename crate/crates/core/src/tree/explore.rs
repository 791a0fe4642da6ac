// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use super::{PlaneTree, VertexRef};

/// Queue discipline for [`explore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Plain depth-first search: all children go to the front of the queue.
    Dfs,
    /// At vertices of outdegree `k`, only children `k1+1 ..= k1+d0` go to the
    /// front; the others are appended to the back.
    ModifiedDfs { k: u32, k1: u32, d0: u32 },
}

/// Visiting order of the vertices of `t` under `policy`.
pub fn explore(t: &PlaneTree, policy: Policy) -> Vec<VertexRef> {
    let layout = t.layout();
    let mut order = Vec::with_capacity(t.len());
    let mut queue = VecDeque::from([0usize]);
    let mut kids = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        kids.clear();
        kids.extend(t.children(&layout, v));
        match policy {
            Policy::ModifiedDfs { k, k1, d0 } if t.degree(v) == k => {
                let lo = (k1 as usize).min(kids.len());
                let hi = (k1 as usize + d0 as usize).min(kids.len());
                for &c in kids[lo..hi].iter().rev() {
                    queue.push_front(c);
                }
                queue.extend(kids[..lo].iter().chain(&kids[hi..]).copied());
            }
            _ => {
                for &c in kids.iter().rev() {
                    queue.push_front(c);
                }
            }
        }
    }
    order
}
