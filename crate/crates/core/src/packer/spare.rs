//! Local exchanges that free neighbors of S from a fixed family of S-paths.
//!
//! The family is rewritten one exchange at a time. An exchange only ever
//! reuses vertices of the paths it replaces plus one or two unused edges at
//! S, so a vertex that is free stays free. Each accepted exchange either uses
//! one more edge inside S or strictly shrinks the number of neighbors of S
//! covered by the family, which bounds the number of rounds.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graphcore::{Graph, Path};
use crate::verify::check_path_family;

use super::walk::between;
use super::{Packing, SteinerTriple};

/// Input of [`spare_neighbors`].
#[derive(Debug, Clone)]
pub struct SparenessRequest {
    /// 1 asks for one free neighbor of S, 3 for two.
    pub ell: usize,
    pub triple: SteinerTriple,
    /// Number of common neighbors of the three vertices of S.
    pub r: usize,
}

/// Result of [`spare_neighbors`].
#[derive(Debug, Clone)]
pub struct SpareOutcome {
    pub packing: Packing,
    /// Free neighbors of S, smallest uid first.
    pub spares: Vec<usize>,
    /// `(edges inside S used, neighbors of S covered)` before every round.
    pub potentials: Vec<(usize, usize)>,
}

/// Rewrites `seed` until it leaves enough neighbors of S unused. Requires
/// `sum of degrees of S - 4 |seed| >= r + ell`.
pub fn spare_neighbors(g: &Graph, req: &SparenessRequest, seed: &Packing) -> Result<SpareOutcome> {
    let (paths, spares, potentials) = spare_in(g, &|_| true, req, &seed.paths)?;
    Ok(SpareOutcome { packing: Packing::new(req.triple, paths), spares, potentials })
}

type Spared = (Vec<Path>, Vec<usize>, Vec<(usize, usize)>);

pub(crate) fn spare_in(
    g: &Graph,
    region: &dyn Fn(usize) -> bool,
    req: &SparenessRequest,
    seed: &[Path],
) -> Result<Spared> {
    let s = req.triple.members();
    let degree: usize = s.iter().map(|&v| g.neighbors(v).filter(|&w| region(w)).count()).sum();
    if degree < 4 * seed.len() + req.r + req.ell {
        return Err(Error::InvalidParams(format!(
            "spare search needs degree sum {degree} >= 4 * {} + {} + {}",
            seed.len(),
            req.r,
            req.ell
        )));
    }
    let st = State::new(g, region, s, seed.to_vec());
    if !st.valid(&st.paths) {
        return Err(Error::InvalidVertices("seed is not a family of internally disjoint S-paths".into()));
    }
    let need = if req.ell >= 3 { 2 } else { 1 };
    let mut st = st;
    let mut potentials = Vec::new();
    let bound = st.a.len() + 8;
    for _ in 0..=bound {
        let spares = st.spares();
        potentials.push(st.potential(&st.paths));
        if spares.len() >= need {
            return Ok((st.paths, spares, potentials));
        }
        if !st.improve() {
            return Err(Error::LemmaViolation(format!(
                "no exchange frees a neighbor of {:?} ({} paths, {} free)",
                s,
                st.paths.len(),
                spares.len()
            )));
        }
    }
    Err(Error::LemmaViolation(format!("exchange rounds exceeded {bound}")))
}

struct State<'a> {
    g: &'a Graph,
    region: &'a dyn Fn(usize) -> bool,
    s: [usize; 3],
    a: HashSet<usize>,
    paths: Vec<Path>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn internal(p: &[usize], s: &[usize; 3]) -> usize {
    p[1..p.len() - 1].iter().copied().find(|v| s.contains(v)).expect("S-path has an internal member of S")
}

impl<'a> State<'a> {
    fn new(g: &'a Graph, region: &'a dyn Fn(usize) -> bool, s: [usize; 3], paths: Vec<Path>) -> Self {
        let a = s
            .iter()
            .flat_map(|&v| g.neighbors(v))
            .filter(|&w| region(w) && !s.contains(&w))
            .collect();
        State { g, region, s, a, paths }
    }

    fn potential(&self, paths: &[Path]) -> (usize, usize) {
        let tri = paths
            .iter()
            .flat_map(|p| p.windows(2))
            .filter(|w| self.s.contains(&w[0]) && self.s.contains(&w[1]))
            .count();
        let covered: HashSet<usize> = paths.iter().flatten().copied().filter(|v| self.a.contains(v)).collect();
        (tri, covered.len())
    }

    fn better(&self, new: (usize, usize), old: (usize, usize)) -> bool {
        new.0 > old.0 || (new.0 == old.0 && new.1 < old.1)
    }

    fn valid(&self, paths: &[Path]) -> bool {
        if !paths.iter().flatten().all(|&v| (self.region)(v)) {
            return false;
        }
        let triple = SteinerTriple { x: self.s[0], y: self.s[1], z: self.s[2] };
        check_path_family(self.g, &triple, paths).ok()
    }

    fn spares(&self) -> Vec<usize> {
        let used: HashSet<usize> = self.paths.iter().flatten().copied().collect();
        let mut free: Vec<usize> = self.a.iter().copied().filter(|v| !used.contains(v)).collect();
        free.sort_unstable();
        free
    }

    /// Applies the first exchange that improves the potential.
    fn improve(&mut self) -> bool {
        let old = self.potential(&self.paths);
        for (replace, new) in self.candidates() {
            let mut next: Vec<Path> =
                self.paths.iter().enumerate().filter(|(i, _)| !replace.contains(i)).map(|(_, p)| p.clone()).collect();
            next.extend(new);
            if next.len() == self.paths.len() && self.valid(&next) && self.better(self.potential(&next), old) {
                next.sort();
                self.paths = next;
                return true;
            }
        }
        false
    }

    /// Candidate exchanges as (indices replaced, new paths), in a fixed order.
    fn candidates(&self) -> Vec<(Vec<usize>, Vec<Path>)> {
        let used_edges: HashSet<(usize, usize)> =
            self.paths.iter().flat_map(|p| p.windows(2)).map(|w| key(w[0], w[1])).collect();
        let owner = |v: usize| self.paths.iter().position(|p| p.contains(&v));
        let unused = |a: usize, b: usize| self.g.has_edge(a, b) && !used_edges.contains(&key(a, b));
        let mut out = Vec::new();

        // Unused edges inside S shorten a long path.
        for (i, &a) in self.s.iter().enumerate() {
            for &b in &self.s[i + 1..] {
                if !unused(a, b) {
                    continue;
                }
                for (ti, t) in self.paths.iter().enumerate() {
                    if t.len() < 4 {
                        continue;
                    }
                    for new in absorb(t, a, b, &self.s) {
                        out.push((vec![ti], vec![new]));
                    }
                }
            }
        }

        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &alpha in &self.s {
            for mu in self.g.neighbors(alpha) {
                if (self.region)(mu) && !self.s.contains(&mu) && unused(alpha, mu) && owner(mu).is_some() {
                    edges.push((mu, alpha));
                }
            }
        }
        edges.sort_unstable();
        for (mu, alpha) in edges {
            let ti = owner(mu).unwrap();
            let t = &self.paths[ti];
            let c = internal(t, &self.s);
            if alpha == c {
                out.push((vec![ti], vec![shortcut_internal(t, c, mu)]));
                continue;
            }
            // Orient T from alpha.
            let t: Path = if t[0] == alpha { t.clone() } else { t.iter().rev().copied().collect() };
            let ic = t.iter().position(|&v| v == c).unwrap();
            let im = t.iter().position(|&v| v == mu).unwrap();
            let b = *t.last().unwrap();
            if im < ic {
                out.push((vec![ti], vec![[vec![alpha], t[im..].to_vec()].concat()]));
                continue;
            }
            if im > ic + 1 {
                let mut p: Path = t[..=ic].iter().rev().copied().collect();
                p.extend_from_slice(&t[im..]);
                out.push((vec![ti], vec![p]));
                continue;
            }
            // mu is the successor of c towards b.
            if unused(b, mu) {
                let mut p = vec![b, mu];
                p.extend_from_slice(&t[..=ic]);
                out.push((vec![ti], vec![p]));
            }
            for (t1i, t1) in self.paths.iter().enumerate() {
                if t1i == ti || internal(t1, &self.s) != b {
                    continue;
                }
                let mut p3: Path = t[..=ic].iter().rev().copied().collect();
                p3.extend_from_slice(&between(t1, alpha, b)[1..]);
                let mut p4 = vec![alpha, mu];
                p4.extend(between(t1, c, b));
                out.push((vec![ti, t1i], vec![p3, p4]));
            }
            let mut nus: Vec<usize> = self
                .g
                .neighbors(b)
                .filter(|&nu| (self.region)(nu) && !self.s.contains(&nu) && unused(b, nu))
                .collect();
            nus.sort_unstable();
            for nu in nus {
                let Some(t2i) = owner(nu) else { continue };
                if t2i == ti {
                    let iv = t.iter().position(|&v| v == nu).unwrap();
                    if iv >= 1 && iv < ic {
                        let mut p5 = vec![b];
                        p5.extend(t[..=iv].iter().rev());
                        p5.extend([mu, c]);
                        out.push((vec![ti], vec![p5]));
                    }
                    continue;
                }
                let t2 = &self.paths[t2i];
                let beta = internal(t2, &self.s);
                if beta == b {
                    continue;
                }
                // nu must lie strictly between alpha and c on T2.
                let seg = between(t2, alpha, c);
                if !seg[1..seg.len() - 1].contains(&nu) {
                    continue;
                }
                let mut p6 = vec![b];
                p6.extend(between(t2, nu, c));
                p6.extend([mu, alpha]);
                let p7 = if beta == c {
                    let mut p = t[..=ic].to_vec();
                    p.extend_from_slice(&between(t2, c, b)[1..]);
                    p
                } else {
                    let mut p: Path = t[..=ic].iter().rev().copied().collect();
                    p.extend_from_slice(&between(t2, alpha, b)[1..]);
                    p
                };
                out.push((vec![ti, t2i], vec![p6, p7]));
            }
        }
        out
    }
}

/// Replacements of `t` that use the unused edge `ab` inside S.
fn absorb(t: &[usize], a: usize, b: usize, s: &[usize; 3]) -> Vec<Path> {
    let c = internal(t, s);
    let ends = [t[0], *t.last().unwrap()];
    let mut out = Vec::new();
    if c == b || c == a {
        let (head, mid) = if c == b { (a, b) } else { (b, a) };
        let far = if ends[0] == head { ends[1] } else { ends[0] };
        let mut p = vec![head];
        p.extend(between(t, mid, far));
        out.push(p);
    } else {
        let mut p = vec![a];
        p.extend(between(t, b, c));
        out.push(p);
        let mut q = vec![b];
        q.extend(between(t, a, c));
        out.push(q);
    }
    out
}

/// Uses the chord `c mu` to skip the stretch of `t` between them.
fn shortcut_internal(t: &[usize], c: usize, mu: usize) -> Path {
    let ic = t.iter().position(|&v| v == c).unwrap();
    let im = t.iter().position(|&v| v == mu).unwrap();
    if im < ic {
        [&t[..=im], &t[ic..]].concat()
    } else {
        [&t[..=ic], &t[im..]].concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_graph, build_params};

    #[test]
    fn frees_a_vertex_in_a_long_detour() {
        // K_6 with a wasteful path family.
        let g = Graph::complete(6);
        let s = SteinerTriple::new(0, 1, 2).unwrap();
        let seed = Packing::new(s, vec![vec![0, 3, 1, 4, 5, 2]]);
        let req = SparenessRequest { ell: 1, triple: s, r: 3 };
        let out = spare_neighbors(&g, &req, &seed).unwrap();
        assert!(!out.spares.is_empty());
        assert!(out.potentials.windows(2).all(|w| w[1].0 > w[0].0 || (w[1].0 == w[0].0 && w[1].1 < w[0].1)));
    }

    #[test]
    fn precondition_checked() {
        let g = Graph::complete(4);
        let s = SteinerTriple::new(0, 1, 2).unwrap();
        let seed = Packing::new(s, vec![vec![0, 1, 2], vec![0, 2, 3, 1]]);
        let req = SparenessRequest { ell: 1, triple: s, r: 1 };
        assert!(matches!(spare_neighbors(&g, &req, &seed), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn d1_pack_leaves_spares() {
        let p = build_params(1, 6).unwrap();
        let g = build_graph(&p).unwrap();
        let packer = crate::packer::Packer::with_graph(p, g.clone()).unwrap();
        for (x, y, z) in [(0, 1, 2), (0, 7, 14), (0, 1, 9), (3, 20, 40)] {
            let s = SteinerTriple::new(x, y, z).unwrap();
            let pk = packer.pack(&s).unwrap();
            let req = SparenessRequest { ell: 1, triple: s, r: 0 };
            let out = spare_neighbors(&g, &req, &pk).unwrap();
            assert_eq!(out.packing.len(), pk.len());
            assert!(!out.spares.is_empty());
        }
    }
}
