//! Exact Steiner path packing numbers by branch and bound, plus the degree
//! based upper bound.
//!
//! The search branches on S-incident edges: the smallest undecided one is
//! either used by some path (every path through it is tried, shortest
//! first) or forbidden. Arcs between members of S are kept chordless, which
//! only removes packings that a shortcut would dominate; a chord between two
//! members of S is kept because that edge may belong to another path.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphcore::{Graph, Path};
use crate::packer::{Packing, SteinerTriple};

/// Search limits for one triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { node_limit: 10_000_000, time_limit: Duration::from_secs(60) }
    }
}

impl OracleBudget {
    pub fn nodes(node_limit: u64) -> Self {
        OracleBudget { node_limit, ..Default::default() }
    }
}

/// `value` is exact when `exact` is set, otherwise a lower bound certified by
/// `witness`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: usize,
    pub exact: bool,
    pub witness: Packing,
    pub nodes: u64,
}

/// Which triples [`exact_pi3`] minimizes over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triples {
    All,
    Sample(Vec<SteinerTriple>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    Max { cap: usize },
    AtLeast(usize),
    Spares { size: usize, need: usize },
}

const UNDECIDED: u8 = 0;
const USED: u8 = 1;
const FORBIDDEN: u8 = 2;

struct Search<'a> {
    g: &'a Graph,
    s: [usize; 3],
    /// S-incident edges as `(member, other)`; S-S edges appear once.
    edges: Vec<(usize, usize)>,
    edge_id: HashMap<(usize, usize), usize>,
    state: Vec<u8>,
    used: Vec<bool>,
    dist: [Vec<u32>; 3],
    in_a: Vec<bool>,
    a_total: usize,
    a_used: usize,
    paths: Vec<Path>,
    best: Vec<Path>,
    goal: Goal,
    nodes: u64,
    limit: u64,
    deadline: Instant,
    aborted: bool,
    done: bool,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn bfs(g: &Graph, src: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, s: &SteinerTriple, goal: Goal, budget: &OracleBudget) -> Self {
        let s = [s.x, s.y, s.z];
        let mut edges = Vec::new();
        let mut edge_id = HashMap::new();
        for &m in &s {
            for w in g.neighbors(m) {
                let k = key(m, w);
                if !edge_id.contains_key(&k) {
                    edge_id.insert(k, edges.len());
                    edges.push((m, w));
                }
            }
        }
        let mut in_a = vec![false; g.vertex_count()];
        let mut a_total = 0;
        for &m in &s {
            for w in g.neighbors(m) {
                if !s.contains(&w) && !in_a[w] {
                    in_a[w] = true;
                    a_total += 1;
                }
            }
        }
        Search {
            g,
            s,
            state: vec![UNDECIDED; edges.len()],
            edges,
            edge_id,
            used: vec![false; g.vertex_count()],
            dist: [bfs(g, s[0]), bfs(g, s[1]), bfs(g, s[2])],
            in_a,
            a_total,
            a_used: 0,
            paths: Vec::new(),
            best: Vec::new(),
            goal,
            nodes: 0,
            limit: budget.node_limit,
            deadline: Instant::now() + budget.time_limit,
            aborted: false,
            done: false,
        }
    }

    fn is_s(&self, v: usize) -> bool {
        self.s.contains(&v)
    }

    fn halted(&self) -> bool {
        self.aborted || self.done
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit || (self.nodes & 1023 == 0 && Instant::now() >= self.deadline) {
            self.aborted = true;
        }
        self.aborted
    }

    fn edge_free(&self, a: usize, b: usize) -> bool {
        match self.edge_id.get(&key(a, b)) {
            Some(&e) => self.state[e] == UNDECIDED,
            None => true,
        }
    }

    fn available(&self, e: usize) -> bool {
        let (_, w) = self.edges[e];
        self.state[e] == UNDECIDED && (self.is_s(w) || !self.used[w])
    }

    /// Upper bound on how many more paths fit.
    fn bound(&self) -> usize {
        let mut f = [0usize; 3];
        for (e, &(m, w)) in self.edges.iter().enumerate() {
            if self.available(e) {
                f[self.s.iter().position(|&x| x == m).unwrap()] += 1;
                if let Some(i) = self.s.iter().position(|&x| x == w) {
                    f[i] += 1;
                }
            }
        }
        let mut wasted = 0;
        for w in self.g.neighbors(self.s[0]) {
            if self.is_s(w) || self.used[w] {
                continue;
            }
            if self.s.iter().all(|&m| self.g.has_edge(m, w) && self.edge_free(m, w)) {
                wasted += 1;
            }
        }
        let total: usize = f.iter().sum();
        f.iter().copied().min().unwrap().min(total.saturating_sub(wasted) / 4)
    }

    fn record(&mut self) {
        let len = self.paths.len();
        match self.goal {
            Goal::Max { cap } => {
                if len > self.best.len() {
                    self.best = self.paths.clone();
                    if len >= cap {
                        self.done = true;
                    }
                }
            }
            Goal::AtLeast(t) => {
                if len >= t {
                    self.best = self.paths.clone();
                    self.done = true;
                }
            }
            Goal::Spares { size, need } => {
                if len == size && self.a_total - self.a_used >= need {
                    self.best = self.paths.clone();
                    self.done = true;
                }
            }
        }
    }

    fn run(&mut self) {
        if self.halted() || self.tick() {
            return;
        }
        self.record();
        if self.done {
            return;
        }
        let len = self.paths.len();
        let bound = self.bound();
        match self.goal {
            Goal::Max { .. } if len + bound <= self.best.len() => return,
            Goal::AtLeast(t) if len + bound < t => return,
            Goal::Spares { size, need } => {
                if len >= size || len + bound < size || self.a_total - self.a_used < need {
                    return;
                }
            }
            _ => {}
        }
        let Some(e) = (0..self.edges.len()).find(|&e| self.available(e)) else {
            return;
        };
        self.branch_used(e);
        if self.halted() {
            return;
        }
        self.state[e] = FORBIDDEN;
        self.run();
        self.state[e] = UNDECIDED;
    }

    fn branch_used(&mut self, e: usize) {
        let (m, w) = self.edges[e];
        let free = (0..self.g.vertex_count()).filter(|&v| !self.used[v] && !self.is_s(v)).count();
        let max_total = free + 2;
        for total in 2..=max_total {
            let l1_max = if self.is_s(w) { 1 } else { total - 1 };
            for l1 in 1..=l1_max {
                let mut arc = vec![m, w];
                self.grow_first(&mut arc, l1, total);
                if self.halted() {
                    return;
                }
            }
        }
    }

    fn min_dist_excluding(&self, v: usize, skip: usize) -> u32 {
        (0..3).filter(|&i| self.s[i] != skip).map(|i| self.dist[i][v]).min().unwrap()
    }

    fn chord_free(&self, arc: &[usize], nb: usize, upto: usize) -> bool {
        arc[..upto].iter().all(|&a| !self.g.has_edge(a, nb))
    }

    fn grow_first(&mut self, arc: &mut Vec<usize>, l1: usize, total: usize) {
        if self.tick() {
            return;
        }
        let len = arc.len() - 1;
        let v = *arc.last().unwrap();
        let start = arc[0];
        if self.is_s(v) && len > 0 {
            if len == l1 {
                let third = *self.s.iter().find(|&&q| q != start && q != v).unwrap();
                for c in [start, v] {
                    let mut arc2 = vec![c];
                    self.grow_second(arc, &mut arc2, total - l1, third);
                    if self.halted() {
                        return;
                    }
                }
            }
            return;
        }
        let remaining = l1 - len;
        if remaining == 0 {
            return;
        }
        let nbrs: Vec<usize> = self.g.neighbors(v).collect();
        for nb in nbrs {
            if self.is_s(nb) {
                if remaining != 1 || nb == start || !self.edge_free(v, nb) {
                    continue;
                }
                if !self.chord_free(arc, nb, arc.len() - 1) && !self.only_s_chords(arc, nb) {
                    continue;
                }
            } else {
                if remaining < 2 || self.used[nb] || arc.contains(&nb) {
                    continue;
                }
                if (self.min_dist_excluding(nb, start) as usize) > remaining - 1 {
                    continue;
                }
                if !self.chord_free(arc, nb, arc.len() - 1) {
                    continue;
                }
            }
            arc.push(nb);
            self.grow_first(arc, l1, total);
            arc.pop();
            if self.halted() {
                return;
            }
        }
    }

    /// Whether every earlier arc vertex adjacent to the S-member `nb` is
    /// itself in S (a chord between members of S is allowed).
    fn only_s_chords(&self, arc: &[usize], nb: usize) -> bool {
        arc[..arc.len() - 1].iter().all(|&a| self.is_s(a) || !self.g.has_edge(a, nb))
    }

    fn grow_second(&mut self, arc1: &[usize], arc2: &mut Vec<usize>, l2: usize, q: usize) {
        if self.tick() {
            return;
        }
        let len = arc2.len() - 1;
        let v = *arc2.last().unwrap();
        if v == q {
            if len == l2 {
                self.accept(arc1, arc2);
            }
            return;
        }
        let remaining = l2 - len;
        if remaining == 0 {
            return;
        }
        let qi = self.s.iter().position(|&x| x == q).unwrap();
        let nbrs: Vec<usize> = self.g.neighbors(v).collect();
        for nb in nbrs {
            if nb == q {
                if remaining != 1 || !self.edge_free(v, nb) {
                    continue;
                }
                if !self.only_s_chords(arc2, nb) && !self.chord_free(arc2, nb, arc2.len() - 1) {
                    continue;
                }
            } else {
                if self.is_s(nb) || remaining < 2 || self.used[nb] || arc1.contains(&nb) || arc2.contains(&nb) {
                    continue;
                }
                if len == 0 && !self.edge_free(v, nb) {
                    continue;
                }
                if (self.dist[qi][nb] as usize) > remaining - 1 {
                    continue;
                }
                if !self.chord_free(arc2, nb, arc2.len() - 1) {
                    continue;
                }
            }
            arc2.push(nb);
            self.grow_second(arc1, arc2, l2, q);
            arc2.pop();
            if self.halted() {
                return;
            }
        }
    }

    fn accept(&mut self, arc1: &[usize], arc2: &[usize]) {
        let c = arc2[0];
        let mut path: Path = if c == arc1[0] {
            arc1.iter().rev().copied().collect()
        } else {
            arc1.to_vec()
        };
        path.extend_from_slice(&arc2[1..]);
        let mut marked = Vec::new();
        for w in path.windows(2) {
            if let Some(&e) = self.edge_id.get(&key(w[0], w[1])) {
                debug_assert_eq!(self.state[e], UNDECIDED);
                self.state[e] = USED;
                marked.push(e);
            }
        }
        for &v in &path {
            if !self.is_s(v) {
                self.used[v] = true;
                if self.in_a[v] {
                    self.a_used += 1;
                }
            }
        }
        self.paths.push(path);
        self.run();
        let path = self.paths.pop().unwrap();
        for &v in &path {
            if !self.is_s(v) {
                self.used[v] = false;
                if self.in_a[v] {
                    self.a_used -= 1;
                }
            }
        }
        for e in marked {
            self.state[e] = UNDECIDED;
        }
    }
}

fn check_triple(g: &Graph, s: &SteinerTriple) -> Result<()> {
    let nv = g.vertex_count();
    if [s.x, s.y, s.z].iter().any(|&v| v >= nv) {
        return Err(Error::InvalidVertices(format!("{s} out of range for {nv} vertices")));
    }
    Ok(())
}

/// Degree bound for one triple: every path consumes four incidences at S and
/// every common neighbor of S wastes at least one.
pub fn upper_bound_pi_s(g: &Graph, s: &SteinerTriple) -> usize {
    let deg: usize = [s.x, s.y, s.z].iter().map(|&v| g.degree(v)).sum();
    let members = [s.x, s.y, s.z];
    let common = g
        .neighbors(s.x)
        .filter(|&w| !members.contains(&w) && g.has_edge(s.y, w) && g.has_edge(s.z, w))
        .count();
    (deg - common) / 4
}

/// Exact maximum number of internally disjoint S-paths, within budget.
pub fn exact_pi_s(g: &Graph, s: &SteinerTriple, budget: &OracleBudget) -> Result<OracleResult> {
    check_triple(g, s)?;
    let cap = upper_bound_pi_s(g, s);
    let mut search = Search::new(g, s, Goal::Max { cap }, budget);
    search.run();
    Ok(OracleResult {
        value: search.best.len(),
        exact: !search.aborted,
        witness: Packing::new(*s, search.best),
        nodes: search.nodes,
    })
}

/// Decides whether at least `target` paths exist. `Ok(Some(_))` carries a
/// witness, `Ok(None)` is a proof of impossibility, `Err` means the budget ran out.
fn at_least(g: &Graph, s: &SteinerTriple, target: usize, budget: &OracleBudget) -> std::result::Result<Option<Packing>, u64> {
    let mut search = Search::new(g, s, Goal::AtLeast(target), budget);
    search.run();
    if search.done {
        Ok(Some(Packing::new(*s, search.best)))
    } else if search.aborted {
        Err(search.nodes)
    } else {
        Ok(None)
    }
}

/// Outcome of [`packing_with_spares`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpareSearch {
    pub found: Option<Packing>,
    pub exact: bool,
}

/// Searches for `size` internally disjoint S-paths that leave at least
/// `need` vertices of `N(x) ∪ N(y) ∪ N(z)` uncovered.
pub fn packing_with_spares(
    g: &Graph,
    s: &SteinerTriple,
    size: usize,
    need: usize,
    budget: &OracleBudget,
) -> Result<SpareSearch> {
    check_triple(g, s)?;
    let mut search = Search::new(g, s, Goal::Spares { size, need }, budget);
    search.run();
    Ok(SpareSearch {
        found: search.done.then(|| Packing::new(*s, search.best.clone())),
        exact: !search.aborted || search.done,
    })
}

fn all_triples(nv: usize) -> Vec<SteinerTriple> {
    let mut out = Vec::new();
    for x in 0..nv {
        for y in x + 1..nv {
            for z in y + 1..nv {
                out.push(SteinerTriple { x, y, z });
            }
        }
    }
    out
}

/// Minimum of the per-triple optimum over the requested triples.
///
/// Triples are ordered by their degree bound; the first one is solved
/// exactly and every other triple only has to reach the running minimum.
pub fn exact_pi3(g: &Graph, triples: &Triples, budget: &OracleBudget) -> Result<OracleResult> {
    let (list, is_all) = match triples {
        Triples::All => (all_triples(g.vertex_count()), true),
        Triples::Sample(list) => (list.clone(), false),
    };
    if list.is_empty() {
        return Err(Error::InvalidVertices("no triples to evaluate".into()));
    }
    for s in &list {
        check_triple(g, s)?;
    }
    let mut keyed: Vec<(usize, SteinerTriple)> = list.iter().map(|s| (upper_bound_pi_s(g, s), *s)).collect();
    keyed.sort();
    let first = exact_pi_s(g, &keyed[0].1, budget)?;
    let best = first.value;
    let mut exact = first.exact;
    let mut nodes = first.nodes;

    enum Outcome {
        Reached(u64),
        Below(OracleResult),
        Unknown(u64),
    }
    let outcomes: Vec<Outcome> = keyed[1..]
        .par_iter()
        .map(|(_, s)| match at_least(g, s, best, budget) {
            Ok(Some(_)) => Outcome::Reached(0),
            Ok(None) => Outcome::Below(exact_pi_s(g, s, budget).expect("validated triple")),
            Err(n) => Outcome::Unknown(n),
        })
        .collect();
    let mut winner = first;
    for outcome in outcomes {
        match outcome {
            Outcome::Reached(n) => nodes += n,
            Outcome::Unknown(n) => {
                nodes += n;
                exact = false;
            }
            Outcome::Below(r) => {
                nodes += r.nodes;
                exact &= r.exact;
                if r.value < winner.value {
                    winner = r;
                }
            }
        }
    }
    Ok(OracleResult { value: winner.value, exact: exact && is_all, witness: winner.witness, nodes })
}

/// `|N(a) ∩ N(b) ∩ N(c)|` for every triple with at least one common neighbor.
pub fn common_neighbor_counts(g: &Graph) -> HashMap<[usize; 3], usize> {
    let mut counts = HashMap::new();
    for w in 0..g.vertex_count() {
        let nb: Vec<usize> = g.neighbors(w).collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                for l in j + 1..nb.len() {
                    *counts.entry([nb[i], nb[j], nb[l]]).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Largest common neighborhood over all triples, with the smallest triple
/// attaining it. `None` only when the graph has fewer than three vertices.
pub fn max_common_neighbors(g: &Graph) -> (usize, Option<[usize; 3]>) {
    if g.vertex_count() < 3 {
        return (0, None);
    }
    let counts = common_neighbor_counts(g);
    match counts.iter().map(|(t, &c)| (c, std::cmp::Reverse(*t))).max() {
        Some((c, std::cmp::Reverse(t))) => (c, Some(t)),
        None => (0, Some([0, 1, 2])),
    }
}

/// `floor((3d - r) / 4)` for a `d`-regular graph whose triples share at most
/// `r` neighbors.
pub fn upper_bound_pi3(g: &Graph) -> Result<usize> {
    let nv = g.vertex_count();
    if nv < 3 {
        return Err(Error::InvalidVertices("graph has fewer than three vertices".into()));
    }
    let d = g.degree(0);
    let degrees: HashSet<usize> = (0..nv).map(|v| g.degree(v)).collect();
    if degrees.len() != 1 {
        let mut ds: Vec<_> = degrees.into_iter().collect();
        ds.sort_unstable();
        return Err(Error::NotRegular(format!("degrees {ds:?}")));
    }
    let (r, _) = max_common_neighbors(g);
    Ok((3 * d - r) / 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_graph, build_params};
    use crate::verify::check_packing;

    fn t(x: usize, y: usize, z: usize) -> SteinerTriple {
        SteinerTriple::new(x, y, z).unwrap()
    }

    #[test]
    fn small_cliques() {
        let b = OracleBudget::default();
        assert_eq!(exact_pi_s(&Graph::complete(3), &t(0, 1, 2), &b).unwrap().value, 1);
        let r = exact_pi_s(&Graph::complete(4), &t(1, 2, 3), &b).unwrap();
        assert_eq!((r.value, r.exact), (2, true));
        assert!(check_packing(&Graph::complete(4), &t(1, 2, 3), &r.witness).ok());
        let r = exact_pi3(&Graph::complete(5), &Triples::All, &b).unwrap();
        assert_eq!((r.value, r.exact), (2, true));
    }

    #[test]
    fn common_neighbors() {
        assert_eq!(max_common_neighbors(&Graph::cycle(6)).0, 0);
        assert_eq!(max_common_neighbors(&Graph::complete(5)), (2, Some([0, 1, 2])));
        let g = build_graph(&build_params(1, 6).unwrap()).unwrap();
        let (r, w) = max_common_neighbors(&g);
        assert_eq!(r, 3);
        let w = w.unwrap();
        assert!(w.iter().all(|&v| v / 6 == w[0] / 6));
    }

    #[test]
    fn upper_bounds() {
        let g = build_graph(&build_params(1, 6).unwrap()).unwrap();
        assert_eq!(upper_bound_pi3(&g).unwrap(), 3);
        assert_eq!(upper_bound_pi3(&Graph::complete(6)).unwrap(), 3);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(upper_bound_pi3(&path), Err(Error::NotRegular(_))));
    }

    #[test]
    fn tiny_budget_is_inexact() {
        let g = build_graph(&build_params(1, 6).unwrap()).unwrap();
        let r = exact_pi_s(&g, &t(0, 1, 2), &OracleBudget::nodes(1)).unwrap();
        assert!(!r.exact);
    }

    #[test]
    fn spare_search_in_clique() {
        let g = build_graph(&build_params(1, 6).unwrap()).unwrap();
        let r = packing_with_spares(&g, &t(0, 1, 2), 3, 2, &OracleBudget::default()).unwrap();
        let pk = r.found.expect("a packing with two spares exists");
        assert_eq!(pk.paths.len(), 3);
        assert!(check_packing(&g, &t(0, 1, 2), &pk).ok());
    }
}
