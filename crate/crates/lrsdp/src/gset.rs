//! Gset graphs: a header `N E` followed by `E` lines `i j w` with 1-based
//! node numbers.

use std::path::Path;

use lrsdp_core::generators::WeightedGraph;

use crate::error::{parse_error, read_file, Result};

pub fn read_gset(path: &Path) -> Result<WeightedGraph> {
    parse_gset(&read_file(path)?)
}

pub fn parse_gset(text: &str) -> Result<WeightedGraph> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_error(1, "empty graph file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() < 2 {
        return Err(parse_error(ln, "expected header `N E`"));
    }
    let n: usize = h[0].parse().map_err(|_| parse_error(ln, format!("bad node count `{}`", h[0])))?;
    let e: usize = h[1].parse().map_err(|_| parse_error(ln, format!("bad edge count `{}`", h[1])))?;

    let mut edges = Vec::with_capacity(e);
    let mut last = ln;
    for (ln, l) in lines {
        last = ln;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 2 {
            return Err(parse_error(ln, "expected `i j w`"));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| parse_error(ln, format!("bad node `{s}`")));
        let (i, j) = (idx(t[0])?, idx(t[1])?);
        let w = match t.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| parse_error(ln, format!("bad weight `{s}`")))?,
            None => 1.0,
        };
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_error(ln, format!("node out of range 1..={n}")));
        }
        if i == j {
            return Err(parse_error(ln, format!("self-loop at node {i}")));
        }
        edges.push((i - 1, j - 1, w));
    }
    if edges.len() != e {
        return Err(parse_error(last, format!("header declares {e} edges but {} were read", edges.len())));
    }
    Ok(WeightedGraph::new(n, edges)?)
}
