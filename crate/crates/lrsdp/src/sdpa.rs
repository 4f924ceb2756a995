//! Sparse SDPA format restricted to a single PSD block.
//!
//! ```text
//! m
//! 1
//! n
//! b_1 … b_m
//! matno blkno i j value      (matno 0 is C, k is A_k; 1-based, upper triangle)
//! ```
//!
//! Lines starting with `"` or `*` are comments. Punctuation `{ } ( ) ,` in
//! the header is treated as whitespace, and repeated entries are summed.

use std::fmt::Write as _;
use std::path::Path;

use lrsdp_core::{ManifoldKind, SdpProblem, SparseSymMatrix};

use crate::error::{parse_error, read_file, write_file, Result};

type Triplets = Vec<(usize, usize, f64)>;

pub fn read_sdpa(path: &Path) -> Result<SdpProblem> {
    parse_sdpa(&read_file(path)?)
}

pub fn write_sdpa(problem: &SdpProblem, path: &Path) -> Result<()> {
    write_file(path, &format_sdpa(problem))
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, '{' | '}' | '(' | ')' | ','))
        .filter(|t| !t.is_empty())
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_error(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_sdpa(text: &str) -> Result<SdpProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let mut header = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_error(text.lines().count().max(1), format!("unexpected end of file, expected {what}")))
    };

    let (ln, l) = header("constraint count")?;
    let m: usize = number(tokens(l).next().unwrap_or(""), ln, "constraint count")?;
    let (ln, l) = header("block count")?;
    let blocks: usize = number(tokens(l).next().unwrap_or(""), ln, "block count")?;
    if blocks != 1 {
        return Err(parse_error(ln, format!("expected exactly one block, found {blocks}")));
    }
    let (ln, l) = header("block size")?;
    let size: i64 = number(tokens(l).next().unwrap_or(""), ln, "block size")?;
    if size <= 0 {
        return Err(parse_error(ln, "only a positive semidefinite block of positive size is supported"));
    }
    let n = usize::try_from(size).expect("positive");

    let mut b = Vec::with_capacity(m);
    while b.len() < m {
        let (ln, l) = header("right-hand side")?;
        for tok in tokens(l) {
            if b.len() == m {
                return Err(parse_error(ln, "too many right-hand side values"));
            }
            b.push(number::<f64>(tok, ln, "right-hand side value")?);
        }
    }

    let mut mats: Vec<Triplets> = vec![Vec::new(); m + 1];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(parse_error(ln, "expected `matno blkno i j value`"));
        }
        let matno: usize = number(toks[0], ln, "matrix number")?;
        let blk: usize = number(toks[1], ln, "block number")?;
        let i: usize = number(toks[2], ln, "row index")?;
        let j: usize = number(toks[3], ln, "column index")?;
        let v: f64 = number(toks[4], ln, "value")?;
        if matno > m {
            return Err(parse_error(ln, format!("matrix number {matno} exceeds {m}")));
        }
        if blk != 1 {
            return Err(parse_error(ln, format!("block number {blk} out of range")));
        }
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_error(ln, format!("index ({i}, {j}) out of range for n = {n}")));
        }
        if !v.is_finite() {
            return Err(parse_error(ln, "non-finite value"));
        }
        mats[matno].push((i - 1, j - 1, v));
    }

    let mut it = mats.into_iter();
    let c = SparseSymMatrix::from_triplets_summed(n, it.next().expect("cost slot"))?;
    let a = it.map(|t| SparseSymMatrix::from_triplets_summed(n, t)).collect::<lrsdp_core::Result<Vec<_>>>()?;
    Ok(SdpProblem::new(c, a, b, ManifoldKind::Free)?)
}

/// Emits the dialect accepted by [`parse_sdpa`], entries sorted by
/// `(matno, i, j)`, values in shortest round-trip form.
pub fn format_sdpa(problem: &SdpProblem) -> String {
    let mut out = String::new();
    let m = problem.num_constraints();
    let _ = writeln!(out, "{m}\n1\n{}", problem.dim());
    let b: Vec<String> = problem.rhs().iter().map(|v| format!("{v:?}")).collect();
    let _ = writeln!(out, "{}", b.join(" "));
    let all = std::iter::once(problem.cost()).chain(problem.constraints());
    for (k, mat) in all.enumerate() {
        for &(i, j, v) in mat.entries() {
            let _ = writeln!(out, "{k} 1 {} {} {v:?}", i + 1, j + 1);
        }
    }
    out
}
