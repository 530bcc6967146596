//! Coordinates, uid arithmetic and graph materialization for `D_{k,n}`.
//!
//! Vertices are identified by their full uid `uid_k`, so the vertices of any
//! copy of `D_{l,n}` inside `D_{k,n}` form a contiguous uid range.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graphcore::Graph;

/// Default cap on the number of vertices a graph may have.
pub const DEFAULT_VERTEX_BUDGET: u64 = 10_000_000;

/// `(k, n)` together with the size table `t[i] = |V(D_{i,n})|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DCellParams {
    pub k: usize,
    pub n: usize,
    pub t: Vec<u64>,
}

impl DCellParams {
    /// Number of vertices of `D_{k,n}`.
    pub fn vertex_count(&self) -> u64 {
        self.t[self.k]
    }

    /// Size of a level-`level` block, i.e. `t[level]` as a `usize`.
    pub fn block(&self, level: usize) -> usize {
        self.t[level] as usize
    }

    /// Number of copies of `D_{level-1,n}` inside one `D_{level,n}`.
    pub fn copies_at(&self, level: usize) -> usize {
        assert!(level >= 1);
        self.t[level - 1] as usize + 1
    }
}

/// Builds the parameter table. Rejects `n < 2` and any overflow of `u64`.
pub fn build_params(k: usize, n: usize) -> Result<DCellParams> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
    }
    let mut t = Vec::with_capacity(k + 1);
    t.push(n as u64);
    for i in 1..=k {
        let prev = t[i - 1];
        let next = prev
            .checked_add(1)
            .and_then(|p1| prev.checked_mul(p1))
            .ok_or(Error::Overflow("t_{i,n}"))?;
        t.push(next);
    }
    Ok(DCellParams { k, n, t })
}

/// Address `(a_k, ..., a_0)` of a vertex; `digits[0]` is `a_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub digits: Vec<usize>,
}

impl Coord {
    pub fn new(digits: Vec<usize>) -> Self {
        Coord { digits }
    }

    /// Digit `a_i`.
    pub fn a(&self, i: usize) -> usize {
        self.digits[self.digits.len() - 1 - i]
    }

    fn set_a(&mut self, i: usize, value: usize) {
        let len = self.digits.len();
        self.digits[len - 1 - i] = value;
    }
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Checks digit count and ranges of `c` against `p`.
pub fn validate_coord(c: &Coord, p: &DCellParams) -> Result<()> {
    if c.digits.len() != p.k + 1 {
        return Err(Error::DigitRange(format!(
            "coordinate {c} has {} digits, expected {}",
            c.digits.len(),
            p.k + 1
        )));
    }
    if c.a(0) >= p.n {
        return Err(Error::DigitRange(format!("a_0 = {} must be < {}", c.a(0), p.n)));
    }
    for i in 1..=p.k {
        if c.a(i) as u64 > p.t[i - 1] {
            return Err(Error::DigitRange(format!(
                "a_{i} = {} must be <= {}",
                c.a(i),
                p.t[i - 1]
            )));
        }
    }
    Ok(())
}

/// `uid_j(c) = a_0 + sum_{l=1..j} a_l * t[l-1]`.
pub fn uid(c: &Coord, j: usize, p: &DCellParams) -> Result<u64> {
    validate_coord(c, p)?;
    if j > p.k {
        return Err(Error::DigitRange(format!("suffix index {j} exceeds k = {}", p.k)));
    }
    let mut value = c.a(0) as u64;
    for l in 1..=j {
        let term = (c.a(l) as u64)
            .checked_mul(p.t[l - 1])
            .ok_or(Error::Overflow("uid"))?;
        value = value.checked_add(term).ok_or(Error::Overflow("uid"))?;
    }
    Ok(value)
}

/// Inverse of `uid_k` on `[0, t[k])`.
pub fn coord_from_uid(u: u64, p: &DCellParams) -> Result<Coord> {
    if u >= p.vertex_count() {
        return Err(Error::UidRange { uid: u, count: p.vertex_count() });
    }
    let mut digits = vec![0usize; p.k + 1];
    let mut rest = u;
    for l in (1..=p.k).rev() {
        digits[p.k - l] = (rest / p.t[l - 1]) as usize;
        rest %= p.t[l - 1];
    }
    digits[p.k] = rest as usize;
    Ok(Coord { digits })
}

/// The unique neighbor of `c` across level `level` (1 <= level <= k).
///
/// With `cidx = a_level` and `u = uid_{level-1}(c)`: when `u >= cidx` the
/// neighbor sits in copy `u + 1` with suffix uid `cidx`, otherwise in copy
/// `u` with suffix uid `cidx - 1`. Digits above `level` are kept.
pub fn cross_neighbor(c: &Coord, level: usize, p: &DCellParams) -> Result<Coord> {
    validate_coord(c, p)?;
    if level == 0 || level > p.k {
        return Err(Error::InvalidParams(format!(
            "cross level must be in 1..={}, got {level}",
            p.k
        )));
    }
    let cidx = c.a(level) as u64;
    let u = uid(c, level - 1, p)?;
    let (copy, suffix) = if u >= cidx { (u + 1, cidx) } else { (u, cidx - 1) };
    let mut out = c.clone();
    out.set_a(level, copy as usize);
    let mut rest = suffix;
    for l in (1..level).rev() {
        out.set_a(l, (rest / p.t[l - 1]) as usize);
        rest %= p.t[l - 1];
    }
    out.set_a(0, rest as usize);
    Ok(out)
}

/// Same rule as [`cross_neighbor`], computed directly on full uids.
pub fn cross_uid(p: &DCellParams, v: usize, level: usize) -> usize {
    debug_assert!(level >= 1 && level <= p.k);
    let block = p.block(level);
    let sub = p.block(level - 1);
    let hi = v - v % block;
    let rest = v % block;
    let c = rest / sub;
    let u = rest % sub;
    if u >= c {
        hi + (u + 1) * sub + c
    } else {
        hi + u * sub + (c - 1)
    }
}

/// Graph of `D_{k,n}` with the default vertex budget.
pub fn build_graph(p: &DCellParams) -> Result<Graph> {
    build_graph_with_budget(p, DEFAULT_VERTEX_BUDGET)
}

/// Graph of `D_{k,n}`: `K_n` inside every level-0 block plus one cross edge
/// per vertex and level.
pub fn build_graph_with_budget(p: &DCellParams, budget: u64) -> Result<Graph> {
    let count = p.vertex_count();
    if count > budget {
        return Err(Error::Budget { needed: count, budget });
    }
    let nv = count as usize;
    let n = p.n;
    let degree = n - 1 + p.k;
    let mut adjacency = Vec::with_capacity(nv);
    let mut buf = Vec::with_capacity(degree);
    for v in 0..nv {
        buf.clear();
        let base = v - v % n;
        buf.extend((base..base + n).filter(|&w| w != v));
        for level in 1..=p.k {
            buf.push(cross_uid(p, v, level));
        }
        buf.sort_unstable();
        adjacency.push(buf.clone());
    }
    Graph::from_adjacency(adjacency)
}

/// Vertices of one copy.
///
/// For `1 <= level <= k` the prefix gives the digits `(a_k, ..., a_level)`
/// and the result is the copy of `D_{level-1,n}` they select. `level == 0`
/// with an empty prefix selects the whole vertex set.
pub fn copy_vertices(p: &DCellParams, level: usize, prefix: &[usize]) -> Result<Vec<usize>> {
    if level == 0 {
        if !prefix.is_empty() {
            return Err(Error::DigitRange("level 0 takes an empty prefix".into()));
        }
        return Ok((0..p.vertex_count() as usize).collect());
    }
    if level > p.k {
        return Err(Error::DigitRange(format!("level {level} exceeds k = {}", p.k)));
    }
    if prefix.len() != p.k - level + 1 {
        return Err(Error::DigitRange(format!(
            "prefix for level {level} needs {} digits, got {}",
            p.k - level + 1,
            prefix.len()
        )));
    }
    let mut start: u64 = 0;
    for (idx, &d) in prefix.iter().enumerate() {
        let l = p.k - idx;
        if d as u64 > p.t[l - 1] {
            return Err(Error::DigitRange(format!("a_{l} = {d} must be <= {}", p.t[l - 1])));
        }
        start += d as u64 * p.t[l - 1];
    }
    let size = p.t[level - 1];
    Ok((start as usize..(start + size) as usize).collect())
}

/// Index of the level-`level` copy containing `v`, relative to its enclosing
/// `D_{level,n}`: this is the digit `a_level`.
pub fn copy_index(p: &DCellParams, v: usize, level: usize) -> usize {
    (v % p.block(level)) / p.block(level - 1)
}

/// Edge list: header `# dcell k=<k> n=<n> vertices=<t[k]>`, then one sorted
/// `u v` line per edge with `u < v`.
pub fn edge_list(p: &DCellParams, g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# dcell k={} n={} vertices={}", p.k, p.n, p.vertex_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// DOT rendering, vertices labelled by coordinate.
pub fn dot(p: &DCellParams, g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph dcell_{}_{} {{", p.k, p.n);
    for v in 0..g.vertex_count() {
        let label = coord_from_uid(v as u64, p).map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(out, "  {v} [label=\"{label}\"];");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

/// Parses the edge-list format. The header is optional; without it the
/// vertex count is one more than the largest uid seen.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for field in rest.split_whitespace() {
                if let Some(v) = field.strip_prefix("vertices=") {
                    declared = Some(v.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad vertex count {v:?}", lineno + 1))
                    })?);
                }
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("line {}: expected `u v`", lineno + 1)));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {}: bad uid {s:?}", lineno + 1)))
        };
        edges.push((parse(a)?, parse(b)?));
    }
    let max_seen = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let count = declared.unwrap_or(max_seen);
    if max_seen > count {
        return Err(Error::Parse(format!(
            "edge endpoint {} exceeds declared vertex count {count}",
            max_seen - 1
        )));
    }
    Graph::from_edges(count, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_table() {
        assert_eq!(build_params(0, 6).unwrap().t, vec![6]);
        assert_eq!(build_params(1, 6).unwrap().t, vec![6, 42]);
        assert_eq!(build_params(2, 6).unwrap().t, vec![6, 42, 1806]);
        assert!(build_params(1, 1).is_err());
        assert_eq!(build_params(8, 6), Err(Error::Overflow("t_{i,n}")));
    }

    #[test]
    fn uid_examples() {
        let p = build_params(1, 2).unwrap();
        assert_eq!(uid(&Coord::new(vec![0, 0]), 1, &p).unwrap(), 0);
        assert_eq!(uid(&Coord::new(vec![2, 1]), 0, &p).unwrap(), 1);
        let p2 = build_params(2, 2).unwrap();
        assert_eq!(uid(&Coord::new(vec![0, 1, 0]), 1, &p2).unwrap(), 2);
        assert!(uid(&Coord::new(vec![3, 0]), 1, &p).is_err());
    }

    #[test]
    fn coord_examples() {
        let p = build_params(1, 6).unwrap();
        assert_eq!(coord_from_uid(41, &p).unwrap(), Coord::new(vec![6, 5]));
        assert_eq!(coord_from_uid(0, &p).unwrap(), Coord::new(vec![0, 0]));
        assert!(coord_from_uid(42, &p).is_err());
        let p = build_params(1, 2).unwrap();
        assert_eq!(coord_from_uid(3, &p).unwrap(), Coord::new(vec![1, 1]));
    }

    #[test]
    fn cross_examples() {
        let p = build_params(1, 2).unwrap();
        let c = cross_neighbor(&Coord::new(vec![0, 0]), 1, &p).unwrap();
        assert_eq!(c, Coord::new(vec![1, 0]));
        let c = cross_neighbor(&Coord::new(vec![2, 1]), 1, &p).unwrap();
        assert_eq!(c, Coord::new(vec![1, 1]));
        assert!(cross_neighbor(&Coord::new(vec![2, 1]), 0, &p).is_err());
        let p = build_params(1, 6).unwrap();
        let c = cross_neighbor(&Coord::new(vec![0, 0]), 1, &p).unwrap();
        assert_eq!(c, Coord::new(vec![1, 0]));
    }

    #[test]
    fn graph_d12() {
        let p = build_params(1, 2).unwrap();
        let g = build_graph(&p).unwrap();
        assert_eq!(g.vertex_count(), 6);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 4), (2, 3), (3, 5), (4, 5)]);
    }

    #[test]
    fn graph_budget() {
        let p = build_params(2, 6).unwrap();
        assert_eq!(
            build_graph_with_budget(&p, 1000).unwrap_err(),
            Error::Budget { needed: 1806, budget: 1000 }
        );
    }

    #[test]
    fn copy_examples() {
        let p = build_params(1, 2).unwrap();
        assert_eq!(copy_vertices(&p, 1, &[0]).unwrap(), vec![0, 1]);
        let p = build_params(1, 6).unwrap();
        assert_eq!(copy_vertices(&p, 1, &[6]).unwrap(), (36..42).collect::<Vec<_>>());
        assert!(copy_vertices(&p, 1, &[7]).is_err());
        let p = build_params(0, 5).unwrap();
        assert_eq!(copy_vertices(&p, 0, &[]).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn edge_list_round_trip() {
        let p = build_params(1, 2).unwrap();
        let g = build_graph(&p).unwrap();
        let text = edge_list(&p, &g);
        assert!(text.starts_with("# dcell k=1 n=2 vertices=6\n0 1\n"));
        assert_eq!(text.lines().count(), 7);
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }
}
