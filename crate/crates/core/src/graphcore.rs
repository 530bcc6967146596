//! Simple undirected graphs and the path primitives the constructions use:
//! vertex-disjoint paths by unit vertex-capacity max flow, fans, BFS routing
//! with a forbidden set, and two-pair linking.
//!
//! Every routine is deterministic. Neighbors are scanned in increasing uid
//! order and augmenting paths are found by BFS, so equal inputs give equal
//! outputs.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

/// Ordered vertex sequence.
pub type Path = Vec<usize>;

/// Immutable simple graph stored as sorted adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds from per-vertex neighbor lists, rejecting loops, duplicates
    /// and asymmetric rows. Rows are sorted here.
    pub fn from_adjacency(mut rows: Vec<Vec<usize>>) -> Result<Graph> {
        let nv = rows.len();
        if nv > u32::MAX as usize {
            return Err(Error::InvalidParams("too many vertices".into()));
        }
        let mut offsets = Vec::with_capacity(nv + 1);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        offsets.push(0);
        for (v, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for (i, &w) in row.iter().enumerate() {
                if w >= nv {
                    return Err(Error::InvalidVertices(format!("neighbor {w} of {v} out of range")));
                }
                if w == v {
                    return Err(Error::InvalidVertices(format!("loop at {v}")));
                }
                if i > 0 && row[i - 1] == w {
                    return Err(Error::InvalidVertices(format!("parallel edge {v}-{w}")));
                }
                targets.push(w as u32);
            }
            offsets.push(targets.len());
        }
        let g = Graph { offsets, targets };
        for v in 0..nv {
            for w in g.neighbors(v) {
                if !g.has_edge(w, v) {
                    return Err(Error::InvalidVertices(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        Ok(g)
    }

    /// Builds from an undirected edge list; duplicate edges are merged.
    pub fn from_edges(nv: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut rows = vec![Vec::new(); nv];
        for &(a, b) in edges {
            if a >= nv || b >= nv {
                return Err(Error::InvalidVertices(format!("edge {a}-{b} out of range")));
            }
            rows[a].push(b);
            rows[b].push(a);
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Graph::from_adjacency(rows)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Graph {
        let rows = (0..n).map(|v| (0..n).filter(|&w| w != v).collect()).collect();
        Graph::from_adjacency(rows).expect("complete graph is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.targets[self.offsets[v]..self.offsets[v + 1]].iter().map(|&w| w as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count()
            && self.targets[self.offsets[u]..self.offsets[u + 1]].binary_search(&(v as u32)).is_ok()
    }

    /// All edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// `true` when every consecutive pair of `path` is an edge and no vertex repeats.
    pub fn is_simple_path(&self, path: &[usize]) -> bool {
        if path.is_empty() {
            return false;
        }
        let mut seen = HashSet::with_capacity(path.len());
        path.iter().all(|&v| v < self.vertex_count() && seen.insert(v))
            && path.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

const BIG: i32 = 1 << 20;

/// Node-split flow network over the part of the graph reachable from the
/// sources inside the allowed region.
struct SplitNet {
    verts: Vec<usize>,
    arcs_to: Vec<usize>,
    arcs_cap: Vec<i32>,
    adj: Vec<Vec<usize>>,
}

impl SplitNet {
    const SRC: usize = 0;
    const SNK: usize = 1;

    fn add_arc(&mut self, from: usize, to: usize, cap: i32) {
        let idx = self.arcs_to.len();
        self.arcs_to.push(to);
        self.arcs_cap.push(cap);
        self.adj[from].push(idx);
        self.arcs_to.push(from);
        self.arcs_cap.push(0);
        self.adj[to].push(idx + 1);
    }

    fn vin(local: usize) -> usize {
        2 + 2 * local
    }

    fn vout(local: usize) -> usize {
        3 + 2 * local
    }

    /// `sources`: `(vertex, wide)` fed from the super source; a wide vertex
    /// has unbounded capacity and accepts no flow from other vertices.
    /// `sinks`: same for the super sink; sinks never forward flow.
    fn build(
        g: &Graph,
        allowed: &dyn Fn(usize) -> bool,
        sources: &[(usize, bool)],
        sinks: &[(usize, bool)],
    ) -> SplitNet {
        let sink_set: HashMap<usize, bool> = sinks.iter().copied().collect();
        let wide_src: HashSet<usize> = sources.iter().filter(|s| s.1).map(|s| s.0).collect();
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut verts = Vec::new();
        let mut queue = VecDeque::new();
        for &(s, _) in sources {
            if index.insert(s, verts.len()).is_none() {
                verts.push(s);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            if sink_set.contains_key(&v) {
                continue;
            }
            for w in g.neighbors(v) {
                if !index.contains_key(&w) && allowed(w) {
                    index.insert(w, verts.len());
                    verts.push(w);
                    queue.push_back(w);
                }
            }
        }
        let nodes = 2 + 2 * verts.len();
        let mut net = SplitNet { verts, arcs_to: Vec::new(), arcs_cap: Vec::new(), adj: vec![Vec::new(); nodes] };
        for &(s, wide) in sources {
            let l = index[&s];
            net.add_arc(Self::SRC, Self::vin(l), if wide { BIG } else { 1 });
        }
        for local in 0..net.verts.len() {
            let v = net.verts[local];
            let wide = wide_src.contains(&v) || sink_set.get(&v).copied().unwrap_or(false);
            net.add_arc(Self::vin(local), Self::vout(local), if wide { BIG } else { 1 });
            if let Some(&wide_sink) = sink_set.get(&v) {
                net.add_arc(Self::vout(local), Self::SNK, if wide_sink { BIG } else { 1 });
                continue;
            }
            for w in g.neighbors(v) {
                if let Some(&lw) = index.get(&w) {
                    if wide_src.contains(&w) {
                        continue;
                    }
                    net.add_arc(Self::vout(local), Self::vin(lw), 1);
                }
            }
        }
        net
    }

    /// Edmonds-Karp up to `limit` units; returns the flow value.
    fn run(&mut self, limit: usize) -> usize {
        let nodes = self.adj.len();
        let mut flow = 0;
        while flow < limit {
            let mut parent_arc = vec![usize::MAX; nodes];
            let mut seen = vec![false; nodes];
            seen[Self::SRC] = true;
            let mut queue = VecDeque::from([Self::SRC]);
            while let Some(a) = queue.pop_front() {
                if a == Self::SNK {
                    break;
                }
                for &arc in &self.adj[a] {
                    let b = self.arcs_to[arc];
                    if !seen[b] && self.arcs_cap[arc] > 0 {
                        seen[b] = true;
                        parent_arc[b] = arc;
                        queue.push_back(b);
                    }
                }
            }
            if !seen[Self::SNK] {
                break;
            }
            let mut node = Self::SNK;
            while node != Self::SRC {
                let arc = parent_arc[node];
                self.arcs_cap[arc] -= 1;
                self.arcs_cap[arc ^ 1] += 1;
                node = self.arcs_to[arc ^ 1];
            }
            flow += 1;
        }
        flow
    }

    /// Splits the flow into vertex paths, each starting at a source vertex.
    fn decompose(&mut self) -> Vec<Path> {
        let mut paths = Vec::new();
        loop {
            let mut node = Self::SRC;
            let mut path = Vec::new();
            let mut found = false;
            loop {
                let next = self.adj[node]
                    .iter()
                    .copied()
                    .find(|&arc| arc % 2 == 0 && self.arcs_cap[arc ^ 1] > 0);
                let Some(arc) = next else { break };
                self.arcs_cap[arc ^ 1] -= 1;
                let to = self.arcs_to[arc];
                if to == Self::SNK {
                    found = true;
                    break;
                }
                if to % 2 == 0 {
                    path.push(self.verts[(to - 2) / 2]);
                }
                node = to;
            }
            if !found {
                break;
            }
            paths.push(path);
        }
        paths
    }
}

fn everywhere(_: usize) -> bool {
    true
}

/// Up to `want` paths between `u` and `v` that share only their ends.
pub fn disjoint_paths(g: &Graph, u: usize, v: usize, want: usize) -> Result<Vec<Path>> {
    disjoint_paths_in(g, &everywhere, u, v, want)
}

/// [`disjoint_paths`] restricted to vertices accepted by `allowed`.
pub fn disjoint_paths_in(
    g: &Graph,
    allowed: &dyn Fn(usize) -> bool,
    u: usize,
    v: usize,
    want: usize,
) -> Result<Vec<Path>> {
    if u == v {
        return Err(Error::InvalidVertices(format!("disjoint paths need distinct ends, got {u} twice")));
    }
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if want == 0 {
        return Ok(Vec::new());
    }
    let mut net = SplitNet::build(g, allowed, &[(u, true)], &[(v, true)]);
    net.run(want);
    let mut paths = net.decompose();
    paths.sort();
    Ok(paths)
}

/// Local vertex connectivity between `u` and `v`.
pub fn local_connectivity(g: &Graph, allowed: &dyn Fn(usize) -> bool, u: usize, v: usize) -> usize {
    let mut net = SplitNet::build(g, allowed, &[(u, true)], &[(v, true)]);
    net.run(usize::MAX)
}

/// `want` paths from `x` to distinct vertices of `targets`, meeting only at
/// `x`, with no internal vertex in `targets`.
pub fn fan(g: &Graph, x: usize, targets: &[usize], want: usize) -> Result<Vec<Path>> {
    fan_in(g, &everywhere, x, targets, want)
}

/// [`fan`] restricted to vertices accepted by `allowed`.
pub fn fan_in(
    g: &Graph,
    allowed: &dyn Fn(usize) -> bool,
    x: usize,
    targets: &[usize],
    want: usize,
) -> Result<Vec<Path>> {
    check_vertex(g, x)?;
    if targets.contains(&x) {
        return Err(Error::InvalidVertices(format!("fan root {x} is one of its targets")));
    }
    let unique: HashSet<usize> = targets.iter().copied().collect();
    if unique.len() < want {
        return Err(Error::FanInfeasible(format!("{} targets for a {want}-fan", unique.len())));
    }
    if want == 0 {
        return Ok(Vec::new());
    }
    let mut sinks: Vec<(usize, bool)> = unique.into_iter().map(|t| (t, false)).collect();
    sinks.sort_unstable();
    let mut net = SplitNet::build(g, allowed, &[(x, true)], &sinks);
    let got = net.run(want);
    if got < want {
        return Err(Error::FanInfeasible(format!("root {x}: only {got} of {want} paths")));
    }
    let mut paths = net.decompose();
    paths.sort_by_key(|p| *p.last().unwrap());
    Ok(paths)
}

/// Shortest path from `u` to `v` avoiding `forbidden`.
pub fn connect(g: &Graph, u: usize, v: usize, forbidden: &[usize]) -> Result<Path> {
    let forbidden: HashSet<usize> = forbidden.iter().copied().collect();
    if forbidden.contains(&u) || forbidden.contains(&v) {
        return Err(Error::InvalidVertices("connect endpoint is forbidden".into()));
    }
    connect_in(g, &|w| !forbidden.contains(&w), u, v)
}

/// Shortest path from `u` to `v` inside `allowed` (the ends are always allowed).
pub fn connect_in(g: &Graph, allowed: &dyn Fn(usize) -> bool, u: usize, v: usize) -> Result<Path> {
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if u == v {
        return Ok(vec![u]);
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    parent.insert(u, u);
    let mut queue = VecDeque::from([u]);
    while let Some(a) = queue.pop_front() {
        for b in g.neighbors(a) {
            if parent.contains_key(&b) || !(b == v || allowed(b)) {
                continue;
            }
            parent.insert(b, a);
            if b == v {
                let mut path = vec![v];
                let mut cur = v;
                while cur != u {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Ok(path);
            }
            queue.push_back(b);
        }
    }
    Err(Error::NoPath(format!("{u} and {v} are disconnected in the allowed region")))
}

/// Two vertex-disjoint paths joining the pair `a` to the pair `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkTwo {
    /// `paths[i]` starts at `a[i]` and ends in `b`.
    pub paths: [Path; 2],
}

impl LinkTwo {
    /// End of the path that starts at `from`.
    pub fn partner(&self, from: usize) -> Option<usize> {
        self.paths.iter().find(|p| p[0] == from).map(|p| *p.last().unwrap())
    }

    /// Path starting at `from`.
    pub fn path_from(&self, from: usize) -> Option<&Path> {
        self.paths.iter().find(|p| p[0] == from)
    }
}

/// Two disjoint paths, one from each vertex of `a` to a distinct vertex of
/// `b`; the realized pairing is read off the result.
pub fn link_two(g: &Graph, a: [usize; 2], b: [usize; 2]) -> Result<LinkTwo> {
    link_two_in(g, &everywhere, a, b)
}

/// [`link_two`] restricted to vertices accepted by `allowed`.
pub fn link_two_in(g: &Graph, allowed: &dyn Fn(usize) -> bool, a: [usize; 2], b: [usize; 2]) -> Result<LinkTwo> {
    for &v in a.iter().chain(b.iter()) {
        check_vertex(g, v)?;
    }
    if a[0] == a[1] || b[0] == b[1] {
        return Err(Error::InvalidVertices("link_two pairs must have distinct vertices".into()));
    }
    let mut net = SplitNet::build(g, allowed, &[(a[0], false), (a[1], false)], &[(b[0], false), (b[1], false)]);
    if net.run(2) < 2 {
        return Err(Error::NoPath(format!("no two disjoint paths between {a:?} and {b:?}")));
    }
    let mut paths = net.decompose();
    paths.sort_by_key(|p| if p[0] == a[0] { 0 } else { 1 });
    let second = paths.pop().expect("two paths");
    let first = paths.pop().expect("two paths");
    Ok(LinkTwo { paths: [first, second] })
}

/// Pairs on which [`connectivity`] is evaluated.
#[derive(Debug, Clone)]
pub enum Samples {
    All,
    Pairs(Vec<(usize, usize)>),
}

/// Minimum local vertex connectivity over the sampled pairs.
pub fn connectivity(g: &Graph, samples: &Samples) -> Result<usize> {
    let nv = g.vertex_count();
    let mut best = usize::MAX;
    let mut visit = |u: usize, v: usize| -> Result<()> {
        check_vertex(g, u)?;
        check_vertex(g, v)?;
        let c = local_connectivity(g, &everywhere, u, v);
        if c == 0 {
            return Err(Error::NoPath(format!("{u} and {v} are disconnected")));
        }
        best = best.min(c);
        Ok(())
    };
    match samples {
        Samples::All => {
            for u in 0..nv {
                for v in u + 1..nv {
                    visit(u, v)?;
                }
            }
        }
        Samples::Pairs(pairs) => {
            for &(u, v) in pairs {
                if u != v {
                    visit(u, v)?;
                }
            }
        }
    }
    if best == usize::MAX {
        return Err(Error::InvalidVertices("no pairs to evaluate".into()));
    }
    Ok(best)
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::InvalidVertices(format!("vertex {v} out of range")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_disjoint_paths() {
        let g = Graph::complete(4);
        let paths = disjoint_paths(&g, 0, 1, 3).unwrap();
        assert_eq!(paths, vec![vec![0, 1], vec![0, 2, 1], vec![0, 3, 1]]);
        assert!(disjoint_paths(&g, 0, 1, 0).unwrap().is_empty());
        assert!(disjoint_paths(&g, 2, 2, 1).is_err());
    }

    #[test]
    fn fan_examples() {
        let g = Graph::complete(4);
        let f = fan(&g, 0, &[1, 2, 3], 3).unwrap();
        assert_eq!(f, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(fan(&p, 0, &[2], 1).unwrap(), vec![vec![0, 1, 2]]);
        assert!(matches!(fan(&p, 0, &[1, 2], 2), Err(Error::FanInfeasible(_))));
    }

    #[test]
    fn fan_internal_avoids_targets() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(fan(&p, 0, &[1, 2], 2).is_err());
        assert_eq!(fan(&p, 0, &[1, 2], 1).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn connect_examples() {
        let g = Graph::complete(4);
        assert_eq!(connect(&g, 0, 1, &[]).unwrap(), vec![0, 1]);
        assert_eq!(connect(&g, 2, 2, &[]).unwrap(), vec![2]);
        assert_eq!(connect(&g, 0, 1, &[]).unwrap(), vec![0, 1]);
        let c = Graph::cycle(4);
        assert_eq!(connect(&c, 0, 2, &[1]).unwrap(), vec![0, 3, 2]);
        assert!(connect(&c, 0, 2, &[1, 3]).is_err());
    }

    #[test]
    fn link_two_examples() {
        let c = Graph::cycle(4);
        let l = link_two(&c, [0, 2], [1, 3]).unwrap();
        assert_eq!(l.paths[0].len(), 2);
        assert_eq!(l.paths[1].len(), 2);
        let g = Graph::complete(4);
        let l = link_two(&g, [0, 1], [2, 3]).unwrap();
        assert_eq!(l.paths, [vec![0, 2], vec![1, 3]]);
        assert_eq!(l.partner(1), Some(3));
        let p = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(link_two(&p, [0, 3], [1, 2]).is_ok());
        assert!(link_two(&p, [0, 1], [2, 3]).is_err());
    }

    #[test]
    fn connectivity_of_cliques() {
        for n in 2..7 {
            assert_eq!(connectivity(&Graph::complete(n), &Samples::All).unwrap(), n - 1);
        }
        assert_eq!(connectivity(&Graph::cycle(6), &Samples::All).unwrap(), 2);
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::from_adjacency(vec![vec![1], vec![]]).is_err());
        assert!(Graph::from_adjacency(vec![vec![0]]).is_err());
        assert!(Graph::from_adjacency(vec![vec![1, 1], vec![0]]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_simple_path(&[0, 1, 2]));
        assert!(!g.is_simple_path(&[0, 2]));
    }
}
