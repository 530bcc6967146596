//! Constructions of `floor((2n + 3k) / 4)` internally disjoint S-paths in
//! `D_{k,n}`.
//!
//! Level 0 is a clique, level 1 has its own templates, and higher levels
//! recurse into one copy of `D_{k-1,n}` and route extra paths through the
//! other copies. Every copy at every level is a contiguous uid range, so the
//! recursion works on [`Block`]s and never copies the graph.

mod claim1;
mod claim2;
mod claim3;
mod complete;
mod d1;
mod residual;
mod spare;
mod walk;

use std::fmt;

use crate::error::{Error, Result};
use crate::graphcore::{Graph, Path};
use crate::topology::{build_graph, build_params, cross_uid, DCellParams};
use crate::verify::check_packing;

pub use complete::pack_complete;
pub use d1::pack_d1;
pub use spare::{spare_neighbors, SpareOutcome, SparenessRequest};

/// Three distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteinerTriple {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl SteinerTriple {
    pub fn new(x: usize, y: usize, z: usize) -> Result<Self> {
        if x == y || y == z || x == z {
            return Err(Error::InvalidVertices(format!("triple ({x}, {y}, {z}) repeats a vertex")));
        }
        Ok(SteinerTriple { x, y, z })
    }

    pub fn members(&self) -> [usize; 3] {
        [self.x, self.y, self.z]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.x == v || self.y == v || self.z == v
    }

    fn from_array(m: [usize; 3]) -> Self {
        SteinerTriple { x: m[0], y: m[1], z: m[2] }
    }
}

impl fmt::Display for SteinerTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.x, self.y, self.z)
    }
}

/// A family of S-paths, plus the construction branches that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub triple: SteinerTriple,
    pub paths: Vec<Path>,
    /// Branch labels, outermost level first.
    pub cases: Vec<String>,
}

impl Packing {
    pub fn new(triple: SteinerTriple, paths: Vec<Path>) -> Self {
        Packing { triple, paths, cases: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// `floor((2n + 3k) / 4)`.
pub fn pi3_formula(k: usize, n: usize) -> usize {
    (2 * n + 3 * k) / 4
}

/// Whether level `k` needs one path more than level `k - 1`. Decided from
/// the parities of `n` and `k` alone.
pub fn gains_path(k: usize, n: usize) -> bool {
    if k == 0 {
        return false;
    }
    let flat = (n % 2 == 0 && k % 4 == 1) || (n % 2 == 1 && k % 4 == 3);
    !flat
}

/// A copy of `D_{level,n}` occupying the uids `base .. base + t[level]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Block {
    pub level: usize,
    pub base: usize,
}

/// Shared read-only state for one packing run.
pub(crate) struct Ctx<'a> {
    pub p: &'a DCellParams,
    pub g: &'a Graph,
}

impl<'a> Ctx<'a> {
    pub fn size(&self, b: Block) -> usize {
        self.p.block(b.level)
    }

    pub fn contains(&self, b: Block, v: usize) -> bool {
        v >= b.base && v < b.base + self.size(b)
    }

    pub fn copies(&self, b: Block) -> usize {
        self.p.copies_at(b.level)
    }

    /// Sub-copy `i` of `b`.
    pub fn sub(&self, b: Block, i: usize) -> Block {
        Block { level: b.level - 1, base: b.base + i * self.p.block(b.level - 1) }
    }

    /// Index of the sub-copy of `b` holding `v`.
    pub fn sub_of(&self, b: Block, v: usize) -> usize {
        (v - b.base) / self.p.block(b.level - 1)
    }

    /// The neighbor of `v` across the top level of `b`.
    pub fn cross(&self, b: Block, v: usize) -> usize {
        cross_uid(self.p, v, b.level)
    }

    /// The vertex of sub-copy `i` joined to sub-copy `j`.
    pub fn port(&self, b: Block, i: usize, j: usize) -> usize {
        debug_assert_ne!(i, j);
        b.base + i * self.p.block(b.level - 1) + if j > i { j - 1 } else { j }
    }

    pub fn neighbors_in(&self, b: Block, v: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = b.base;
        let hi = b.base + self.size(b);
        self.g.neighbors(v).filter(move |&w| w >= lo && w < hi)
    }
}

fn construction(case: &str, detail: impl Into<String>) -> Error {
    Error::Construction { case: case.to_string(), detail: detail.into() }
}

/// Dispatch inside a block.
pub(crate) fn pack_in(ctx: &Ctx, b: Block, s: [usize; 3], cases: &mut Vec<String>) -> Result<Vec<Path>> {
    match b.level {
        0 => {
            cases.push("clique".into());
            let vertices: Vec<usize> = (b.base..b.base + ctx.size(b)).collect();
            Ok(complete::clique_paths(&vertices, s))
        }
        1 => d1::level1(ctx, b, s, cases),
        _ => {
            let c = s.map(|v| ctx.sub_of(b, v));
            if c[0] == c[1] && c[1] == c[2] {
                claim1::claim1(ctx, b, s, cases)
            } else if c[0] != c[1] && c[1] != c[2] && c[0] != c[2] {
                claim2::claim2(ctx, b, s, cases)
            } else {
                claim3::claim3(ctx, b, s, cases)
            }
        }
    }
}

/// Packs S-paths for any triple of one `D_{k,n}`, reusing its graph.
pub struct Packer {
    p: DCellParams,
    g: Graph,
}

impl Packer {
    /// Builds `D_{k,n}`; refuses `n < 6`.
    pub fn new(p: DCellParams) -> Result<Packer> {
        check_range(&p)?;
        let g = build_graph(&p)?;
        Ok(Packer { p, g })
    }

    /// Wraps an already built graph of `p`.
    pub fn with_graph(p: DCellParams, g: Graph) -> Result<Packer> {
        check_range(&p)?;
        if g.vertex_count() as u64 != p.vertex_count() {
            return Err(Error::InvalidParams("graph does not match the parameters".into()));
        }
        Ok(Packer { p, g })
    }

    pub fn params(&self) -> &DCellParams {
        &self.p
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    /// Packs `pi3_formula(k, n)` paths for `s` and checks the result.
    pub fn pack(&self, s: &SteinerTriple) -> Result<Packing> {
        let nv = self.g.vertex_count();
        if let Some(&v) = s.members().iter().find(|&&v| v >= nv) {
            return Err(Error::UidRange { uid: v as u64, count: nv as u64 });
        }
        let ctx = Ctx { p: &self.p, g: &self.g };
        let mut cases = Vec::new();
        let paths = pack_in(&ctx, Block { level: self.p.k, base: 0 }, s.members(), &mut cases)?;
        let packing = Packing { triple: *s, paths, cases };
        let report = check_packing(&self.g, s, &packing);
        let last = packing.cases.last().cloned().unwrap_or_default();
        if !report.ok() {
            let detail: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            return Err(construction(&last, format!("{} is invalid: {}", s, detail.join("; "))));
        }
        let want = pi3_formula(self.p.k, self.p.n);
        if packing.len() != want {
            return Err(construction(&last, format!("{} got {} paths, expected {want}", s, packing.len())));
        }
        Ok(packing)
    }
}

fn check_range(p: &DCellParams) -> Result<()> {
    if p.n < 6 {
        return Err(Error::OutsideRange(format!(
            "the construction needs n >= 6 (got n = {}); use the oracle for smaller switches",
            p.n
        )));
    }
    Ok(())
}

/// One-shot convenience: builds the graph and packs `s`.
pub fn pack(p: &DCellParams, s: &SteinerTriple) -> Result<Packing> {
    Packer::new(p.clone())?.pack(s)
}

/// Packs in `D_{k,n}` given only `(k, n)`.
pub fn pack_kn(k: usize, n: usize, s: &SteinerTriple) -> Result<Packing> {
    pack(&build_params(k, n)?, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(pi3_formula(1, 6), 3);
        assert_eq!(pi3_formula(0, 6), 3);
        assert_eq!(pi3_formula(2, 7), 5);
        assert_eq!(pi3_formula(2, 6), 4);
    }

    #[test]
    fn parity_rule_matches_arithmetic() {
        for n in 6..40 {
            for k in 1..40 {
                assert_eq!(gains_path(k, n), pi3_formula(k, n) == pi3_formula(k - 1, n) + 1, "k={k} n={n}");
            }
        }
        assert!(!gains_path(5, 6));
        assert!(gains_path(2, 6));
    }

    #[test]
    fn triple_rejects_repeats() {
        assert!(SteinerTriple::new(1, 1, 2).is_err());
        assert_eq!(SteinerTriple::new(3, 1, 2).unwrap().to_string(), "{3,1,2}");
    }

    #[test]
    fn small_n_refused() {
        let err = pack_kn(1, 5, &SteinerTriple::new(0, 1, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OutsideRange(_)));
    }
}

#[cfg(test)]
pub(crate) mod sweep {
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Copy pattern at the top level: 1, 2 or 3 distinct copies.
    pub fn spread(p: &DCellParams, s: [usize; 3]) -> usize {
        let blk = p.block(p.k - 1);
        let mut c = s.map(|v| v / blk);
        c.sort_unstable();
        1 + usize::from(c[0] != c[1]) + usize::from(c[1] != c[2])
    }

    /// Packs `count` random triples with the given spread and returns the
    /// label histogram and the failures.
    pub fn run(packer: &Packer, spread_want: usize, count: usize, seed: u64) -> (BTreeMap<String, usize>, Vec<String>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nv = packer.graph().vertex_count();
        let blk = packer.params().block(packer.params().k - 1);
        let mut hist = BTreeMap::new();
        let mut bad = Vec::new();
        let mut done = 0;
        while done < count {
            let x = rng.gen_range(0..nv);
            let pick = |rng: &mut ChaCha8Rng, same: bool| {
                if same {
                    (x / blk) * blk + rng.gen_range(0..blk)
                } else {
                    rng.gen_range(0..nv)
                }
            };
            let y = pick(&mut rng, spread_want < 3);
            let z = pick(&mut rng, spread_want == 1);
            let Ok(s) = SteinerTriple::new(x, y, z) else { continue };
            if spread(packer.params(), s.members()) != spread_want {
                continue;
            }
            done += 1;
            match packer.pack(&s) {
                Ok(pk) => *hist.entry(pk.cases.last().cloned().unwrap_or_default()).or_insert(0) += 1,
                Err(e) => bad.push(format!("{s}: {e}")),
            }
        }
        (hist, bad)
    }

    #[test]
    fn sampled_triples_k2() {
        for (k, n) in [(2, 6), (2, 7)] {
            let packer = Packer::new(build_params(k, n).unwrap()).unwrap();
            for sp in [1, 2, 3] {
                let (hist, bad) = run(&packer, sp, 60, 7);
                assert!(bad.is_empty(), "({k},{n}) spread {sp}: {bad:?}");
                assert_eq!(hist.values().sum::<usize>(), 60);
            }
        }
    }

    #[test]
    #[ignore = "builds D_{3,6}: 3.2M vertices"]
    fn sampled_triples_k3() {
        let packer = Packer::new(build_params(3, 6).unwrap()).unwrap();
        for sp in [1, 2, 3] {
            let t = std::time::Instant::now();
            let (hist, bad) = run(&packer, sp, if sp == 2 { 3000 } else { 300 }, 11);
            eprintln!("(3,6) spread {sp}: {hist:?} in {:?}", t.elapsed());
            assert!(bad.is_empty(), "{bad:?}");
        }
    }
}
