//! Independent certification of packings and of the structural facts about
//! `D_{k,n}` the constructions depend on.
//!
//! Nothing here calls into the packer; the disjointness predicate is
//! re-implemented from the definition.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphcore::{local_connectivity, Graph, Path};
use crate::oracle;
use crate::packer::{Packing, SteinerTriple};
use crate::topology::{build_graph, copy_index, cross_uid, DCellParams};

/// Default seed for every sampled audit.
pub const DEFAULT_SEED: u64 = 0xDCE11;

/// One named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of a verification or audit run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Report {
        Report { subject: subject.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    /// Conjunction of all checks.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Machine-readable form: one `CHECK <name> PASS|FAIL <detail>` line per check.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "CHECK {} {} {}\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        writeln!(f, "{}: {}/{} checks passed", self.subject, passed, self.checks.len())?;
        for c in &self.checks {
            writeln!(f, "  [{}] {} {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn fmt_list(items: &[String]) -> String {
    const SHOW: usize = 6;
    let mut s = items.iter().take(SHOW).cloned().collect::<Vec<_>>().join("; ");
    if items.len() > SHOW {
        s.push_str(&format!("; ... {} more", items.len() - SHOW));
    }
    s
}

/// Validates `pk` as a family of internally disjoint `S`-paths in `g`.
pub fn check_packing(g: &Graph, s: &SteinerTriple, pk: &Packing) -> Report {
    check_paths(g, s, &pk.paths, &format!("packing {} ({} paths)", s, pk.paths.len()), Some(&pk.triple))
}

/// Same as [`check_packing`] on a bare path list.
pub fn check_path_family(g: &Graph, s: &SteinerTriple, paths: &[Path]) -> Report {
    check_paths(g, s, paths, &format!("paths for {} ({} paths)", s, paths.len()), None)
}

fn check_paths(g: &Graph, s: &SteinerTriple, paths: &[Path], subject: &str, declared: Option<&SteinerTriple>) -> Report {
    let mut report = Report::new(subject);
    let terms = [s.x, s.y, s.z];
    let nv = g.vertex_count();
    let distinct = terms[0] != terms[1] && terms[0] != terms[2] && terms[1] != terms[2];
    let in_range = terms.iter().all(|&t| t < nv);
    report.push("triple.valid", distinct && in_range, format!("{s}"));
    if let Some(d) = declared {
        report.push("triple.matches", d == s, format!("packing declares {d}"));
    }

    let mut simple = Vec::new();
    let mut edges_bad = Vec::new();
    let mut covers = Vec::new();
    let mut internal = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        if p.is_empty() {
            simple.push(format!("path {i} is empty"));
            continue;
        }
        let mut seen = HashSet::new();
        if let Some(&dup) = p.iter().find(|&&v| !seen.insert(v)) {
            simple.push(format!("path {i} repeats vertex {dup}"));
        }
        if let Some(&bad) = p.iter().find(|&&v| v >= nv) {
            edges_bad.push(format!("path {i} has vertex {bad} out of range"));
        } else if let Some(w) = p.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            edges_bad.push(format!("path {i} uses non-edge {}-{}", w[0], w[1]));
        }
        let missing: Vec<usize> = terms.iter().copied().filter(|t| !p.contains(t)).collect();
        if !missing.is_empty() {
            covers.push(format!("path {i} misses {missing:?}"));
        }
        let ends = [p[0], p[p.len() - 1]];
        let inner: Vec<usize> = terms.iter().copied().filter(|t| p.contains(t) && !ends.contains(t)).collect();
        let end_count = terms.iter().filter(|t| ends.contains(t)).count();
        if inner.len() != 1 || end_count != 2 || p.len() < 3 {
            internal.push(format!("path {i} has S-internal {inner:?} and {end_count} S-ends"));
        }
    }
    report.push("path.simple", simple.is_empty(), fmt_list(&simple));
    report.push("path.edges", edges_bad.is_empty(), fmt_list(&edges_bad));
    report.push("path.covers_s", covers.is_empty(), fmt_list(&covers));
    report.push("path.one_internal", internal.is_empty(), fmt_list(&internal));

    let s_set: HashSet<usize> = terms.iter().copied().collect();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut shared_v = Vec::new();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut shared_e = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let mut local = HashSet::new();
        for &v in p {
            if s_set.contains(&v) || !local.insert(v) {
                continue;
            }
            if let Some(&j) = owner.get(&v) {
                shared_v.push(format!("vertex {v} in paths {j} and {i}"));
            } else {
                owner.insert(v, i);
            }
        }
        let mut local_e = HashSet::new();
        for w in p.windows(2) {
            let key = edge_key(w[0], w[1]);
            if !local_e.insert(key) {
                continue;
            }
            if let Some(&j) = edge_owner.get(&key) {
                shared_e.push(format!("edge {}-{} in paths {j} and {i}", key.0, key.1));
            } else {
                edge_owner.insert(key, i);
            }
        }
    }
    report.push("pairwise.vertices", shared_v.is_empty(), fmt_list(&shared_v));
    report.push("pairwise.edges", shared_e.is_empty(), fmt_list(&shared_e));
    report
}

/// Audits the four structural facts about `D_{k,n}`: regularity, one
/// top-level neighbor per vertex, unique edges between top-level copies with
/// same-copy pairs landing apart, and the common-neighborhood maximum.
pub fn audit_lemma1(p: &DCellParams) -> Result<Report> {
    let g = build_graph(p)?;
    let mut report = Report::new(format!("lemma1 D_{{{},{}}} ({} vertices)", p.k, p.n, g.vertex_count()));
    let nv = g.vertex_count();
    let deg = p.n + p.k - 1;

    let irregular: Vec<String> =
        (0..nv).filter(|&v| g.degree(v) != deg).map(|v| format!("deg({v}) = {}", g.degree(v))).collect();
    report.push("lemma1.1.regular", irregular.is_empty(), if irregular.is_empty() {
        format!("every vertex has degree {deg}")
    } else {
        fmt_list(&irregular)
    });

    if p.k == 0 {
        report.push("lemma1.2.top_neighbor", true, "skipped: k = 0 has no cross edges");
        report.push("lemma1.3.copy_edges", true, "skipped: k = 0 has no copies");
    } else {
        let block = p.block(p.k - 1);
        let top = |v: usize| v / block;
        let bad: Vec<String> = (0..nv)
            .filter_map(|v| {
                let outside = g.neighbors(v).filter(|&w| top(w) != top(v)).count();
                (outside != 1).then(|| format!("vertex {v} has {outside} top-level neighbors"))
            })
            .collect();
        report.push("lemma1.2.top_neighbor", bad.is_empty(), if bad.is_empty() {
            "every vertex has exactly one top-level neighbor".to_string()
        } else {
            fmt_list(&bad)
        });

        let copies = p.copies_at(p.k);
        let mut count = vec![0u32; copies * copies];
        for (a, b) in g.edges() {
            let (ca, cb) = (top(a), top(b));
            if ca != cb {
                count[ca.min(cb) * copies + ca.max(cb)] += 1;
            }
        }
        let mut bad = Vec::new();
        for i in 0..copies {
            for j in i + 1..copies {
                let c = count[i * copies + j];
                if c != 1 {
                    bad.push(format!("copies {i},{j} joined by {c} edges"));
                }
            }
        }
        for c in 0..copies {
            let mut seen = HashSet::new();
            for v in c * block..(c + 1) * block {
                let w = g.neighbors(v).find(|&w| top(w) != c);
                if let Some(w) = w {
                    if !seen.insert(top(w)) {
                        bad.push(format!("copy {c}: two vertices reach copy {}", top(w)));
                    }
                }
            }
        }
        report.push("lemma1.3.copy_edges", bad.is_empty(), if bad.is_empty() {
            format!("{} copy pairs each joined by one edge; same-copy pairs land apart", copies * (copies - 1) / 2)
        } else {
            fmt_list(&bad)
        });
    }

    if p.n < 4 {
        report.push("lemma1.4.common_neighbors", true, "skipped: requires n >= 4");
    } else {
        let (max, _) = oracle::max_common_neighbors(&g);
        let counts = oracle::common_neighbor_counts(&g);
        let n = p.n;
        let in_clique = |t: &[usize; 3]| t.iter().all(|&v| v / n == t[0] / n);
        let non_clique: Vec<String> = counts
            .iter()
            .filter(|(t, &c)| c == max && !in_clique(t))
            .map(|(t, _)| format!("{t:?}"))
            .collect();
        let at_max = counts.values().filter(|&&c| c == max).count();
        let cliques = nv / n;
        let expected = cliques * n * (n - 1) * (n - 2) / 6;
        let pass = max == n - 3 && non_clique.is_empty() && at_max == expected;
        report.push(
            "lemma1.4.common_neighbors",
            pass,
            format!(
                "max = {max} (expected {}), {at_max} triples at max, {expected} clique triples{}",
                n - 3,
                if non_clique.is_empty() { String::new() } else { format!(", non-clique: {}", fmt_list(&non_clique)) }
            ),
        );
    }
    Ok(report)
}

/// Pair selection for [`audit_kappa`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSample {
    All,
    Random { count: usize, seed: u64 },
}

fn sample_pairs(vertices: &[usize], sample: &PairSample) -> Vec<(usize, usize)> {
    match sample {
        PairSample::All => {
            let mut out = Vec::new();
            for (i, &a) in vertices.iter().enumerate() {
                for &b in &vertices[i + 1..] {
                    out.push((a, b));
                }
            }
            out
        }
        PairSample::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            if vertices.len() < 2 {
                return Vec::new();
            }
            (0..*count)
                .map(|_| {
                    let pair: Vec<_> = vertices.choose_multiple(&mut rng, 2).copied().collect();
                    (pair[0], pair[1])
                })
                .collect()
        }
    }
}

/// Connectivity audit.
///
/// For every union `H` of top-level copies listed in `subsets`, checks that
/// each selected pair has two internally disjoint paths inside `H`. Then
/// checks that sampled pairs of the whole graph have local connectivity
/// exactly `n + k - 1`. Subsets with fewer than three copies are refused.
pub fn audit_kappa(
    p: &DCellParams,
    subsets: &[Vec<usize>],
    h_pairs: &PairSample,
    full_pairs: &PairSample,
) -> Result<Report> {
    if p.k == 0 {
        return Err(Error::InvalidParams("kappa audit needs k >= 1".into()));
    }
    let copies = p.copies_at(p.k);
    for subset in subsets {
        let unique: HashSet<_> = subset.iter().collect();
        if unique.len() < 3 {
            return Err(Error::InvalidParams(format!(
                "copy union {subset:?} has fewer than 3 copies; the two-connectivity claim needs at least 3"
            )));
        }
        if let Some(c) = subset.iter().find(|&&c| c >= copies) {
            return Err(Error::InvalidParams(format!("copy {c} out of range (only {copies} copies)")));
        }
    }
    let g = build_graph(p)?;
    let block = p.block(p.k - 1);
    let mut report = Report::new(format!("kappa D_{{{},{}}}", p.k, p.n));
    for subset in subsets {
        let members: HashSet<usize> = subset.iter().copied().collect();
        let inside = |v: usize| members.contains(&(v / block));
        let mut vertices: Vec<usize> = Vec::new();
        let mut sorted: Vec<usize> = members.iter().copied().collect();
        sorted.sort_unstable();
        for &c in &sorted {
            vertices.extend(c * block..(c + 1) * block);
        }
        let pairs = sample_pairs(&vertices, h_pairs);
        let mut worst = usize::MAX;
        let mut bad = Vec::new();
        for &(a, b) in &pairs {
            let c = local_connectivity(&g, &inside, a, b).min(2);
            worst = worst.min(c);
            if c < 2 {
                bad.push(format!("pair ({a},{b}) has {c} disjoint paths"));
            }
        }
        report.push(
            format!("kappa.H{sorted:?}"),
            bad.is_empty(),
            if bad.is_empty() { format!("{} pairs, min >= 2", pairs.len()) } else { fmt_list(&bad) },
        );
    }
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let pairs = sample_pairs(&all, full_pairs);
    if !pairs.is_empty() {
        let want = p.n + p.k - 1;
        let mut bad = Vec::new();
        let mut min_seen = usize::MAX;
        for &(a, b) in &pairs {
            let c = local_connectivity(&g, &|_| true, a, b);
            min_seen = min_seen.min(c);
            if c != want {
                bad.push(format!("pair ({a},{b}) has local connectivity {c}"));
            }
        }
        report.push(
            "kappa.full",
            bad.is_empty(),
            if bad.is_empty() { format!("{} pairs, all equal {want}", pairs.len()) } else { fmt_list(&bad) },
        );
    }
    Ok(report)
}

/// Checks the per-vertex cross rule against the pairwise copy rule at every
/// level: for each pair of copies `i < j` inside a level block, the rule joins
/// the vertex of copy `i` with suffix uid `j - 1` to the vertex of copy `j`
/// with suffix uid `i`.
pub fn audit_cross_rule(p: &DCellParams) -> Report {
    let mut report = Report::new(format!("cross rule D_{{{},{}}}", p.k, p.n));
    let total = p.vertex_count() as usize;
    for level in 1..=p.k {
        let block = p.block(level);
        let sub = p.block(level - 1);
        let copies = p.copies_at(level);
        let mut bad = Vec::new();
        let mut base = 0;
        while base < total {
            for i in 0..copies {
                for j in i + 1..copies {
                    let a = base + i * sub + (j - 1);
                    let b = base + j * sub + i;
                    if cross_uid(p, a, level) != b || cross_uid(p, b, level) != a {
                        bad.push(format!("level {level}: {a} <-> {b}"));
                    }
                }
            }
            base += block;
            if bad.len() > 16 {
                break;
            }
        }
        let involution = (0..total).all(|v| cross_uid(p, cross_uid(p, v, level), level) == v);
        let leaves = (0..total).all(|v| copy_index(p, v, level) != copy_index(p, cross_uid(p, v, level), level));
        report.push(
            format!("cross.level{level}"),
            bad.is_empty() && involution && leaves,
            if bad.is_empty() {
                format!("pairwise rule matches; involution {involution}; leaves copy {leaves}")
            } else {
                fmt_list(&bad)
            },
        );
    }
    report
}

/// Random distinct triple drawn from `0..nv`.
pub fn random_triple<R: Rng>(rng: &mut R, nv: usize) -> SteinerTriple {
    loop {
        let x = rng.gen_range(0..nv);
        let y = rng.gen_range(0..nv);
        let z = rng.gen_range(0..nv);
        if x != y && y != z && x != z {
            return SteinerTriple::new(x, y, z).expect("distinct");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::build_params;

    fn triple(x: usize, y: usize, z: usize) -> SteinerTriple {
        SteinerTriple::new(x, y, z).unwrap()
    }

    #[test]
    fn triangle_packing_ok() {
        let g = Graph::complete(3);
        let s = triple(0, 1, 2);
        let pk = Packing::new(s, vec![vec![0, 1, 2]]);
        assert!(check_packing(&g, &s, &pk).ok());
    }

    #[test]
    fn k4_examples() {
        let g = Graph::complete(5);
        let s = triple(1, 2, 3);
        let good = Packing::new(s, vec![vec![1, 2, 3], vec![1, 3, 4, 2]]);
        assert!(check_packing(&g, &s, &good).ok());
        let bad = Packing::new(s, vec![vec![1, 2, 3], vec![1, 2, 4, 3]]);
        let r = check_packing(&g, &s, &bad);
        assert!(!r.ok());
        assert!(r.failures().any(|c| c.name == "pairwise.edges"));
    }

    #[test]
    fn report_lines() {
        let mut r = Report::new("t");
        r.push("a", true, "fine");
        r.push("b", false, "broken");
        assert_eq!(r.lines(), "CHECK a PASS fine\nCHECK b FAIL broken\n");
        assert!(!r.ok());
    }

    #[test]
    fn lemma1_small() {
        assert!(audit_lemma1(&build_params(1, 6).unwrap()).unwrap().ok());
        let r = audit_lemma1(&build_params(1, 2).unwrap()).unwrap();
        assert!(r.ok());
        assert!(r.checks.iter().any(|c| c.detail.starts_with("skipped")));
    }

    #[test]
    fn kappa_refuses_two_copies() {
        let p = build_params(1, 3).unwrap();
        assert!(audit_kappa(&p, &[vec![0, 1]], &PairSample::All, &PairSample::All).is_err());
        let r = audit_kappa(&p, &[vec![0, 1, 2]], &PairSample::All, &PairSample::Random { count: 10, seed: 1 })
            .unwrap();
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn cross_rule_small() {
        for (k, n) in [(1, 2), (1, 3), (1, 6), (2, 3)] {
            let r = audit_cross_rule(&build_params(k, n).unwrap());
            assert!(r.ok(), "{r}");
        }
    }
}
