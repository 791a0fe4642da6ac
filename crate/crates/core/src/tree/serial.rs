// SPDX-License-Identifier: Apache-2.0

//! Text formats: one comma-separated degree sequence per line for plane trees,
//! and JSON for pointed trees.
//!
//! A pointed tree serializes as
//! `{"spine":[{"left":1,"right":"inf","children":["0","2/1,0"]}],"center":"0","window":2,"complete":false}`.
//! Subtrees are DFS lists where `d/s` marks a vertex of outdegree `d` with
//! only its first `s` children shown. `children` lists the materialized
//! siblings in plane order, left of the spine first.

use serde_json::{json, Value};

use super::{Count, DegreePair, PlaneTree, PointedTree, SpineRecord, SubNode, Subtree, TreeError, Window};

pub fn parse_trees(text: &str) -> Result<Vec<PlaneTree>, TreeError> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::parse).collect()
}

pub fn format_trees<'a>(trees: impl IntoIterator<Item = &'a PlaneTree>) -> String {
    let mut out = String::new();
    for t in trees {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

fn count_json(c: Count) -> Value {
    match c {
        Count::Finite(k) => json!(k),
        Count::Infinite => json!("inf"),
    }
}

fn parse_count(v: &Value) -> Result<Count, TreeError> {
    match v {
        Value::String(s) if s == "inf" => Ok(Count::Infinite),
        Value::Number(n) => {
            n.as_u64().and_then(|k| u32::try_from(k).ok()).map(Count::Finite).ok_or_else(|| TreeError::Parse(format!("bad count {n}")))
        }
        other => Err(TreeError::Parse(format!("bad count {other}"))),
    }
}

pub fn parse_subtree(s: &str) -> Result<Subtree, TreeError> {
    let nodes = s
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let bad = || TreeError::Parse(format!("bad subtree entry `{tok}`"));
            match tok.split_once('/') {
                Some((d, s)) => Ok(SubNode { degree: d.parse().map_err(|_| bad())?, shown: s.parse().map_err(|_| bad())? }),
                None => {
                    let d = tok.parse().map_err(|_| bad())?;
                    Ok(SubNode { degree: d, shown: d })
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Subtree::from_nodes(nodes)
}

pub fn pointed_to_json(pt: &PointedTree) -> Value {
    let spine: Vec<Value> = pt
        .spine
        .iter()
        .map(|r| {
            let children: Vec<String> = r.left.iter().rev().chain(r.right.iter()).map(|s| s.to_string()).collect();
            json!({"left": count_json(r.pair.left), "right": count_json(r.pair.right), "children": children})
        })
        .collect();
    let window = match pt.window {
        Window::Full => json!("full"),
        Window::Truncated(m) => json!(m),
    };
    json!({"spine": spine, "center": pt.center.to_string(), "window": window, "complete": pt.spine_complete})
}

pub fn pointed_from_json(v: &Value) -> Result<PointedTree, TreeError> {
    let bad = |m: &str| TreeError::Parse(m.to_string());
    let window = match v.get("window") {
        None => Window::Full,
        Some(Value::String(s)) if s == "full" => Window::Full,
        Some(Value::Number(n)) => Window::Truncated(n.as_u64().and_then(|m| u32::try_from(m).ok()).ok_or_else(|| bad("bad window"))?),
        Some(_) => return Err(bad("bad window")),
    };
    let center = parse_subtree(v.get("center").and_then(Value::as_str).ok_or_else(|| bad("missing center"))?)?;
    let complete = v.get("complete").map_or(Some(true), Value::as_bool).ok_or_else(|| bad("bad complete flag"))?;
    let cap = window.cap();
    let mut spine = Vec::new();
    for (i0, rec) in v.get("spine").and_then(Value::as_array).ok_or_else(|| bad("missing spine"))?.iter().enumerate() {
        let i = i0 as u32 + 1;
        let left = parse_count(rec.get("left").ok_or_else(|| bad("missing left"))?)?;
        let right = parse_count(rec.get("right").ok_or_else(|| bad("missing right"))?)?;
        let children = rec
            .get("children")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing children"))?
            .iter()
            .map(|c| c.as_str().ok_or_else(|| bad("child must be a string")).and_then(parse_subtree))
            .collect::<Result<Vec<_>, _>>()?;
        let shown_left = match cap {
            Some(m) if i >= m => 0,
            _ => match (left, cap) {
                (Count::Finite(a), Some(m)) => a.min(m),
                (Count::Finite(a), None) => a,
                (Count::Infinite, Some(m)) => m,
                (Count::Infinite, None) => return Err(bad("infinite count in a full window")),
            },
        } as usize;
        if shown_left > children.len() {
            return Err(bad("too few children"));
        }
        let mut l: Vec<Subtree> = children[..shown_left].to_vec();
        l.reverse();
        let r = children[shown_left..].to_vec();
        spine.push(SpineRecord { pair: DegreePair { left, right }, left: l, right: r });
    }
    let pt = PointedTree { center, spine, window, spine_complete: complete };
    pt.validate()?;
    Ok(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{pointed_at, Window};

    #[test]
    fn tree_lines_round_trip() {
        let text = "2,0,0\n# comment\n\n1,0\n0\n";
        let trees = parse_trees(text).unwrap();
        assert_eq!(trees.len(), 3);
        assert_eq!(format_trees(&trees), "2,0,0\n1,0\n0\n");
        assert!(parse_trees("0,2,0").is_err());
    }

    #[test]
    fn pointed_json_round_trip() {
        let t: PlaneTree = "3,0,2,0,1,0,1,0".parse().unwrap();
        let layout = t.layout();
        for v in 0..t.len() {
            for window in [Window::Full, Window::Truncated(0), Window::Truncated(1), Window::Truncated(2)] {
                let pt = pointed_at(&t, &layout, 0, v, window);
                let back = pointed_from_json(&pointed_to_json(&pt)).unwrap();
                assert_eq!(back, pt);
            }
        }
    }

    #[test]
    fn infinite_pairs_in_json() {
        let v: Value = serde_json::from_str(
            r#"{"spine":[{"left":"inf","right":"inf","children":["0","1/0","0","2/0"]}],"center":"0","window":2,"complete":true}"#,
        )
        .unwrap();
        let pt = pointed_from_json(&v).unwrap();
        assert_eq!(pt.spine[0].pair.left, Count::Infinite);
        assert_eq!(pt.spine[0].left.len(), 2);
        assert_eq!(pt.spine[0].left[0].to_string(), "1/0");
        assert_eq!(pt.spine[0].right[1].to_string(), "2/0");
    }
}
