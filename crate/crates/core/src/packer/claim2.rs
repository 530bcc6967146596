//! S spread over three copies of `D_{k-1,n}`.
//!
//! Two helpers `u`, `v` are placed in the copy of `x` and `{x, u, v}` is
//! packed there. Only the number of inner paths with each internal vertex
//! matters: a path with internal `x`, `u` or `v` becomes a path with internal
//! `x`, `y` or `z` that reaches its two terminals through two private copies
//! ("escorts"). Inside the copies of S the paths end in fans.
//!
//! When the level gains a path, the roles are relabelled according to where
//! `x'`, `y'` and `z'` land, and the extra path is built from the unused fan
//! capacity ("slack") of one role.

use std::collections::HashMap;

use crate::error::Result;
use crate::graphcore::{connect_in, Path};

use super::spare::{spare_in, SparenessRequest};
use super::walk::{connect_copies, fan_targets, link_copies, region, render, rev, FanMap, Piece, Recipe};
use super::{construction, gains_path, pack_in, Block, Ctx, SteinerTriple};

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub(super) fn claim2(ctx: &Ctx, b: Block, s: [usize; 3], cases: &mut Vec<String>) -> Result<Vec<Path>> {
    let gains = gains_path(b.level, ctx.p.n);
    let mut inner: HashMap<usize, ([usize; 3], Vec<String>)> = HashMap::new();
    let mut counts_for = |host: usize, ctx: &Ctx| -> Result<([usize; 3], Vec<String>)> {
        if let Some(hit) = inner.get(&host) {
            return Ok(hit.clone());
        }
        let got = inner_counts(ctx, b, s[host], gains)?;
        inner.insert(host, got.clone());
        Ok(got)
    };

    if !gains {
        let (m, sub) = counts_for(0, ctx)?;
        let lay = Layout::new(ctx, b, s, m)?;
        cases.extend(sub);
        cases.push(format!("claim2.k{}.flat", b.level));
        return lay.finish(&Plan::none());
    }

    let mut failures = Vec::new();
    for perm in PERMS {
        let roles = perm.map(|i| s[i]);
        let Some(kind) = classify(ctx, b, roles) else { continue };
        let (inner_m, sub) = counts_for(perm[0], ctx)?;
        // The helper standing for the role-Y vertex is u, for role Z it is v.
        let lay = Layout::new(ctx, b, roles, inner_m)?;
        match lay.extra(kind) {
            Ok(Some(plan)) => match lay.finish(&plan) {
                Ok(paths) => {
                    cases.extend(sub);
                    cases.push(plan.label);
                    return Ok(paths);
                }
                Err(e) => failures.push(format!("{}: {e}", plan.label)),
            },
            Ok(None) => {}
            Err(e) => failures.push(format!("{kind:?}: {e}")),
        }
    }

    // No branch applies: choose the internal-role counts directly.
    let p1 = super::pi3_formula(b.level, ctx.p.n);
    let m = [p1 / 3 + usize::from(p1 % 3 > 0), p1 / 3 + usize::from(p1 % 3 > 1), p1 / 3];
    let lay = Layout::new(ctx, b, s, m)?;
    if (0..3).any(|r| lay.load[r] > lay.d0) {
        return Err(construction("claim2.rebalanced", format!("loads {:?} exceed degree {}", lay.load, lay.d0)));
    }
    let paths = lay
        .finish(&Plan::none())
        .map_err(|e| construction("claim2.rebalanced", format!("{e}; earlier attempts: {}", failures.join(" | "))))?;
    cases.push(format!("claim2.k{}.rebalanced", b.level));
    Ok(paths)
}

/// Internal-vertex counts of the inner packing of `{x, u, v}`.
fn inner_counts(ctx: &Ctx, b: Block, x: usize, gains: bool) -> Result<([usize; 3], Vec<String>)> {
    let dx = ctx.sub(b, ctx.sub_of(b, x));
    let (u, v) = helpers(ctx, dx, x)?;
    let s0 = [x, u, v];
    let mut sub = Vec::new();
    let mut paths = pack_in(ctx, dx, s0, &mut sub)?;
    if gains {
        let region = |w: usize| ctx.contains(dx, w);
        let r = super::claim1::common_neighbors(ctx, dx, s0);
        let req = SparenessRequest { ell: 3, triple: SteinerTriple::from_array(s0), r };
        match spare_in(ctx.g, &region, &req, &paths) {
            Ok((p, _, _)) => paths = p,
            Err(_) => sub.push("claim2.inner_spares_unavailable".into()),
        }
    }
    let mut m = [0usize; 3];
    for p in &paths {
        let c = p[1..p.len() - 1].iter().find_map(|w| s0.iter().position(|q| q == w)).expect("S-path");
        m[c] += 1;
    }
    Ok((m, sub))
}

/// `u` shares a neighbor with `x` inside the sub-copy of `x`; `v` is the
/// cross neighbor of such a common neighbor.
fn helpers(ctx: &Ctx, dx: Block, x: usize) -> Result<(usize, usize)> {
    let q = ctx.sub(dx, ctx.sub_of(dx, x));
    for u in q.base..q.base + ctx.size(q) {
        if u == x {
            continue;
        }
        let common = ctx.neighbors_in(q, u).filter(|&w| w != x && ctx.g.has_edge(w, x));
        if let Some(v) = common.map(|w| ctx.cross(dx, w)).min() {
            return Ok((u, v));
        }
    }
    Err(construction("claim2.helpers", format!("no helper pair next to {x}")))
}

/// Position of `x'`, `y'`, `z'` for one role assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// All three land outside the copies of S.
    AllOut,
    /// `y' = x`, `z'` outside.
    YtoXDirect,
    /// `y'` in the copy of `x` but `y' != x`, `z'` outside.
    YtoX,
    /// `y' = x` and `z'` in the copy of `x`.
    MutualZinX,
    /// `y' != x`, `z'` in the copy of `x`.
    ZinX,
    /// `y' != x`, `z'` in the copy of `y`.
    ZinY,
    /// `x'` in the copy of `z`, `z'` in the copy of `y`.
    Cycle,
}

fn classify(ctx: &Ctx, b: Block, s: [usize; 3]) -> Option<Kind> {
    let d = s.map(|v| ctx.sub_of(b, v));
    let xc = s.map(|v| ctx.cross(b, v));
    let cc = xc.map(|v| ctx.sub_of(b, v));
    if !cc.iter().any(|c| d.contains(c)) {
        return Some(Kind::AllOut);
    }
    if cc[Y] != d[X] {
        return None;
    }
    let direct = xc[Y] == s[X];
    if cc[X] == d[Z] {
        return (cc[Z] == d[Y]).then_some(Kind::Cycle);
    }
    if cc[Z] != d[X] && cc[Z] != d[Y] {
        return Some(if direct { Kind::YtoXDirect } else { Kind::YtoX });
    }
    match (direct, cc[Z] == d[X]) {
        (true, true) => Some(Kind::MutualZinX),
        (true, false) => None,
        (false, true) => Some(Kind::ZinX),
        (false, false) => Some(Kind::ZinY),
    }
}

/// A base path with internal role `c` and terminal roles `a`, `b`, routed
/// through escort copies `e1` (between `a` and `c`) and `e2` (between `c`
/// and `b`). `u1` joins `a1'` to `c1'` in `e1`, `u2` joins `c2'` to `b1'`
/// in `e2`.
#[derive(Debug, Clone)]
struct Base {
    c: usize,
    a: usize,
    b: usize,
    e1: usize,
    e2: usize,
    a1: usize,
    c1: usize,
    c2: usize,
    b1: usize,
    u1: Path,
    u2: Path,
}

impl Base {
    fn recipe(&self) -> Recipe {
        vec![
            Piece::Out(self.a, self.a1),
            Piece::P(self.u1.clone()),
            Piece::In(self.c, self.c1),
            Piece::Out(self.c, self.c2),
            Piece::P(self.u2.clone()),
            Piece::In(self.b, self.b1),
        ]
    }
}

struct Plan {
    label: String,
    remove: Vec<usize>,
    add: Vec<Recipe>,
}

impl Plan {
    fn none() -> Plan {
        Plan { label: String::new(), remove: Vec::new(), add: Vec::new() }
    }

    fn one(label: &str, recipe: Recipe) -> Plan {
        Plan { label: label.into(), remove: Vec::new(), add: vec![recipe] }
    }
}

struct Layout<'c, 'a> {
    ctx: &'c Ctx<'a>,
    b: Block,
    s: [usize; 3],
    d: [usize; 3],
    xc: [usize; 3],
    cc: [usize; 3],
    bases: Vec<Base>,
    /// Copies outside S's copies and the escorts, ascending.
    h: Vec<usize>,
    load: [usize; 3],
    d0: usize,
}

impl<'c, 'a> Layout<'c, 'a> {
    fn new(ctx: &'c Ctx<'a>, b: Block, s: [usize; 3], m: [usize; 3]) -> Result<Self> {
        let d = s.map(|v| ctx.sub_of(b, v));
        let xc = s.map(|v| ctx.cross(b, v));
        let cc = xc.map(|v| ctx.sub_of(b, v));
        let pool: Vec<usize> = (0..ctx.copies(b)).filter(|c| !d.contains(c) && !cc.contains(c)).collect();
        let need = 2 * (m[0] + m[1] + m[2]);
        if pool.len() < need + 3 {
            return Err(construction("claim2", format!("{} free copies for {need} escorts", pool.len())));
        }
        let mut lay = Layout {
            ctx,
            b,
            s,
            d,
            xc,
            cc,
            bases: Vec::new(),
            h: Vec::new(),
            load: [0; 3],
            d0: ctx.p.n + b.level - 2,
        };
        let mut next = 0;
        for (c, a, bb) in [(Y, X, Z), (Z, X, Y), (X, Y, Z)] {
            for _ in 0..m[c] {
                let base = lay.base(c, a, bb, pool[next], pool[next + 1])?;
                next += 2;
                lay.load[c] += 2;
                lay.load[a] += 1;
                lay.load[bb] += 1;
                lay.bases.push(base);
            }
        }
        let mut h: Vec<usize> = pool[next..].to_vec();
        h.extend(cc.iter().copied().filter(|c| !d.contains(c)));
        h.sort_unstable();
        h.dedup();
        lay.h = h;
        Ok(lay)
    }

    fn port(&self, role: usize, e: usize) -> usize {
        self.ctx.port(self.b, self.d[role], e)
    }

    /// The end of `port(role, e)` inside `e`.
    fn port_in(&self, e: usize, role: usize) -> usize {
        self.ctx.port(self.b, e, self.d[role])
    }

    fn inside(&self, e: usize, from: usize, to: usize) -> Result<Path> {
        let blk = self.ctx.sub(self.b, e);
        connect_in(self.ctx.g, &|w| self.ctx.contains(blk, w), from, to)
    }

    fn base(&self, c: usize, a: usize, bb: usize, e1: usize, e2: usize) -> Result<Base> {
        let u1 = self.inside(e1, self.port_in(e1, a), self.port_in(e1, c))?;
        let u2 = self.inside(e2, self.port_in(e2, c), self.port_in(e2, bb))?;
        Ok(Base {
            c,
            a,
            b: bb,
            e1,
            e2,
            a1: self.port(a, e1),
            c1: self.port(c, e1),
            c2: self.port(c, e2),
            b1: self.port(bb, e2),
            u1,
            u2,
        })
    }

    fn slack(&self, role: usize) -> usize {
        self.d0.saturating_sub(self.load[role])
    }

    /// Index of the last base path with internal role `c`.
    fn last_of(&self, c: usize) -> Option<usize> {
        self.bases.iter().rposition(|p| p.c == c)
    }

    fn pick_h(&self, avoid: &[usize]) -> Option<usize> {
        self.h.iter().copied().find(|c| !avoid.contains(c))
    }

    fn region(&self, avail: &[usize], must: &[usize]) -> Vec<usize> {
        region(avail, must)
    }

    fn connect(&self, copies: &[usize], from: usize, to: usize) -> Result<Path> {
        connect_copies(self.ctx, self.b, copies, from, to)
    }

    fn link(&self, copies: &[usize], a: [usize; 2], bb: [usize; 2]) -> Result<(Path, Path)> {
        link_copies(self.ctx, self.b, copies, a, bb)
    }

    fn with(&self, extra: &[usize]) -> Vec<usize> {
        let mut h = self.h.clone();
        h.extend_from_slice(extra);
        h
    }

    fn extra(&self, kind: Kind) -> Result<Option<Plan>> {
        match kind {
            Kind::AllOut => self.all_out(),
            Kind::YtoXDirect => self.y_to_x_direct(),
            Kind::YtoX => self.y_to_x(),
            Kind::MutualZinX => self.mutual_z_in_x(),
            Kind::ZinX => self.z_in_x(),
            Kind::ZinY => self.z_in_y(),
            Kind::Cycle => self.cycle(),
        }
    }

    fn all_out(&self) -> Result<Option<Plan>> {
        let Some(r) = [X, Y, Z].into_iter().find(|&r| self.slack(r) >= 1) else { return Ok(None) };
        let [a, bb] = match r {
            X => [Y, Z],
            Y => [X, Z],
            _ => [X, Y],
        };
        let Some(h1) = self.pick_h(&[self.cc[r]]) else { return Ok(None) };
        let r1 = self.port(r, h1);
        let r1p = self.port_in(h1, r);
        let copies = self.region(&self.h, &[self.cc[r], self.cc[a], self.cc[bb], h1]);
        let (l1, l2) = self.link(&copies, [r1p, self.xc[r]], [self.xc[a], self.xc[bb]])?;
        let (sa, sb) = (self.s[a], self.s[bb]);
        let recipe = if l1.last() == Some(&self.xc[a]) {
            vec![Piece::V(sa), Piece::P(rev(&l1)), Piece::In(r, r1), Piece::P(l2), Piece::V(sb)]
        } else {
            vec![Piece::V(sa), Piece::P(rev(&l2)), Piece::Out(r, r1), Piece::P(l1), Piece::V(sb)]
        };
        Ok(Some(Plan::one(&format!("claim2.all_out.slack{r}"), recipe)))
    }

    fn y_to_x_direct(&self) -> Result<Option<Plan>> {
        let [_, y, z] = self.s;
        if self.slack(X) >= 1 {
            let Some(h1) = self.pick_h(&[self.cc[X]]) else { return Ok(None) };
            let x1 = self.port(X, h1);
            let copies = self.region(&self.h, &[h1, self.cc[Z]]);
            let l = self.connect(&copies, self.port_in(h1, X), self.xc[Z])?;
            let recipe = vec![Piece::V(y), Piece::Out(X, x1), Piece::P(l), Piece::V(z)];
            return Ok(Some(Plan::one("claim2.y_to_x_direct.slack_x", recipe)));
        }
        let Some(k) = self.last_of(X) else { return Ok(None) };
        if self.slack(Z) == 0 {
            return Ok(None);
        }
        let p = &self.bases[k];
        let z1 = self.port(Z, p.e1);
        let z1p = self.port_in(p.e1, Z);
        let copies = self.region(&self.with(&[p.e1]), &[self.cc[Z], p.e1]);
        let (y3p, x3p) = (p.u1[0], *p.u1.last().unwrap());
        let (l1, l2) = self.link(&copies, [y3p, x3p], [self.xc[Z], z1p])?;
        let first = vec![Piece::V(y), Piece::Out(X, p.c2), Piece::P(p.u2.clone()), Piece::In(Z, p.b1)];
        let second = if l1.last() == Some(&self.xc[Z]) {
            vec![Piece::Out(Y, p.a1), Piece::P(l1), Piece::Out(Z, z1), Piece::P(rev(&l2)), Piece::In(X, p.c1)]
        } else {
            vec![Piece::Out(Y, p.a1), Piece::P(l1), Piece::In(Z, z1), Piece::P(rev(&l2)), Piece::In(X, p.c1)]
        };
        Ok(Some(Plan { label: "claim2.y_to_x_direct.slack_z".into(), remove: vec![k], add: vec![first, second] }))
    }

    /// `y y' F[y', x] x x' L[x', z'] z' z`.
    fn through_y_prime(&self) -> Result<Recipe> {
        let copies = self.region(&self.h, &[self.cc[X], self.cc[Z]]);
        let l = self.connect(&copies, self.xc[X], self.xc[Z])?;
        Ok(vec![Piece::V(self.s[Y]), Piece::In(X, self.xc[Y]), Piece::P(l), Piece::V(self.s[Z])])
    }

    /// Replaces the last base path with internal `x` by one with internal
    /// `y`, which frees one fan target of `x`.
    fn shift_x_to_y(&self, k: usize) -> Result<Recipe> {
        let p = &self.bases[k];
        let y1 = self.port(Y, p.e2);
        let bar = self.inside(p.e2, self.port_in(p.e2, Y), *p.u2.last().unwrap())?;
        Ok(vec![
            Piece::Out(X, p.c1),
            Piece::P(rev(&p.u1)),
            Piece::In(Y, p.a1),
            Piece::Out(Y, y1),
            Piece::P(bar),
            Piece::In(Z, p.b1),
        ])
    }

    fn y_to_x(&self) -> Result<Option<Plan>> {
        if self.slack(X) >= 1 {
            return Ok(Some(Plan::one("claim2.y_to_x.slack_x", self.through_y_prime()?)));
        }
        let Some(k) = self.last_of(X) else { return Ok(None) };
        if self.slack(Y) == 0 {
            return Ok(None);
        }
        let add = vec![self.shift_x_to_y(k)?, self.through_y_prime()?];
        Ok(Some(Plan { label: "claim2.y_to_x.slack_y".into(), remove: vec![k], add }))
    }

    fn mutual_z_in_x(&self) -> Result<Option<Plan>> {
        let [_, y, z] = self.s;
        let direct = vec![Piece::V(y), Piece::Out(X, self.xc[Z]), Piece::V(z)];
        if self.slack(X) >= 1 {
            return Ok(Some(Plan::one("claim2.mutual_z_in_x.slack_x", direct)));
        }
        let Some(k) = self.last_of(X) else { return Ok(None) };
        if self.slack(Y) == 0 {
            return Ok(None);
        }
        let add = vec![self.shift_x_to_y(k)?, direct];
        Ok(Some(Plan { label: "claim2.mutual_z_in_x.slack_y".into(), remove: vec![k], add }))
    }

    fn z_in_x(&self) -> Result<Option<Plan>> {
        let [x, y, z] = self.s;
        let Some(k) = self.last_of(X) else { return Ok(None) };
        let p = &self.bases[k];
        let z3p = *p.u2.last().unwrap();
        let both = vec![Piece::V(y), Piece::In(X, self.xc[Y]), Piece::Out(X, self.xc[Z]), Piece::V(z)];
        if self.slack(X) >= 1 {
            let copies = self.region(&self.with(&[p.e2]), &[self.cc[X], p.e2]);
            let l = self.connect(&copies, self.xc[X], z3p)?;
            let first = vec![Piece::Out(Y, p.a1), Piece::P(p.u1.clone()), Piece::In(X, p.c1), Piece::P(l), Piece::In(Z, p.b1)];
            return Ok(Some(Plan { label: "claim2.z_in_x.slack_x".into(), remove: vec![k], add: vec![first, both] }));
        }
        if self.slack(Y) == 0 {
            return Ok(None);
        }
        let avail = self.with(&[p.e1, p.e2]);
        let hy = self.pick_h(&[self.cc[Y]]).unwrap_or(p.e2);
        let y1 = self.port(Y, hy);
        let y1p = self.port_in(hy, Y);
        let y3p = p.u1[0];
        let copies = self.region(&avail, &[self.cc[X], p.e1, p.e2, hy]);
        let (l1, l2) = self.link(&copies, [self.xc[X], z3p], [y3p, y1p])?;
        let second = if l1.last() == Some(&y3p) {
            vec![Piece::V(x), Piece::P(l1), Piece::In(Y, p.a1), Piece::Out(Y, y1), Piece::P(rev(&l2)), Piece::In(Z, p.b1)]
        } else {
            vec![Piece::V(x), Piece::P(l1), Piece::In(Y, y1), Piece::Out(Y, p.a1), Piece::P(rev(&l2)), Piece::In(Z, p.b1)]
        };
        Ok(Some(Plan { label: "claim2.z_in_x.slack_y".into(), remove: vec![k], add: vec![both, second] }))
    }

    fn z_in_y(&self) -> Result<Option<Plan>> {
        let [_, y, z] = self.s;
        if self.slack(X) == 0 {
            return Ok(None);
        }
        if let Some(k) = self.last_of(Z) {
            let p = &self.bases[k];
            let x1 = self.port(X, p.e2);
            let bar = self.inside(p.e2, self.port_in(p.e2, X), p.u2[0])?;
            let copies = self.region(&self.with(&[p.e1]), &[self.cc[X], p.e1]);
            let l = self.connect(&copies, self.xc[X], *p.u1.last().unwrap())?;
            let first = vec![Piece::V(y), Piece::In(X, self.xc[Y]), Piece::P(l), Piece::In(Z, p.c1)];
            let second = vec![Piece::Out(X, x1), Piece::P(bar), Piece::In(Z, p.c2), Piece::In(Y, self.xc[Z])];
            return Ok(Some(Plan { label: "claim2.z_in_y.slack_x".into(), remove: vec![k], add: vec![first, second] }));
        }
        if self.slack(Y) >= 1 {
            let recipe = vec![Piece::Out(X, self.xc[Y]), Piece::Out(Y, self.xc[Z]), Piece::V(z)];
            return Ok(Some(Plan::one("claim2.z_in_y.slack_xy", recipe)));
        }
        if self.slack(Z) >= 1 {
            let Some(hz) = self.pick_h(&[self.cc[Z]]) else { return Ok(None) };
            let z1 = self.port(Z, hz);
            let copies = self.region(&self.h, &[self.cc[X], hz]);
            let l = self.connect(&copies, self.xc[X], self.port_in(hz, Z))?;
            let recipe = vec![Piece::V(y), Piece::In(X, self.xc[Y]), Piece::P(l), Piece::In(Z, z1)];
            return Ok(Some(Plan::one("claim2.z_in_y.slack_xz", recipe)));
        }
        Ok(None)
    }

    fn cycle(&self) -> Result<Option<Plan>> {
        let [x, y, z] = self.s;
        if self.slack(X) == 0 {
            return Ok(None);
        }
        if let Some(k) = self.last_of(Z) {
            let p = &self.bases[k];
            let first = vec![
                Piece::V(y),
                Piece::In(X, self.xc[Y]),
                Piece::Out(X, p.a1),
                Piece::P(p.u1.clone()),
                Piece::In(Z, p.c1),
            ];
            let second = vec![Piece::V(x), Piece::In(Z, self.xc[X]), Piece::In(Y, self.xc[Z])];
            return Ok(Some(Plan { label: "claim2.cycle.slack_x".into(), remove: vec![k], add: vec![first, second] }));
        }
        if self.slack(Y) >= 1 {
            let recipe = vec![Piece::Out(X, self.xc[Y]), Piece::Out(Y, self.xc[Z]), Piece::V(z)];
            return Ok(Some(Plan::one("claim2.cycle.slack_xy", recipe)));
        }
        Ok(None)
    }

    fn finish(&self, plan: &Plan) -> Result<Vec<Path>> {
        let mut recipes: Vec<Recipe> = self
            .bases
            .iter()
            .enumerate()
            .filter(|(i, _)| !plan.remove.contains(i))
            .map(|(_, p)| p.recipe())
            .collect();
        recipes.extend(plan.add.iter().cloned());
        let mut fans = Vec::with_capacity(3);
        for r in [X, Y, Z] {
            let blk = self.ctx.sub(self.b, self.d[r]);
            let targets = fan_targets(&recipes, r);
            fans.push(FanMap::build(self.ctx.g, &|w| self.ctx.contains(blk, w), self.s[r], &targets)?);
        }
        render(&recipes, &fans)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::packer::{pi3_formula, Packer, SteinerTriple};
    use crate::topology::build_params;

    /// Triples in three copies whose members are chosen among the ports
    /// towards the other two copies or at random, so every placement of the
    /// cross neighbors comes up.
    fn port_triples(packer: &Packer, rounds: usize, seed: u64) -> Vec<SteinerTriple> {
        let p = packer.params();
        let blk = p.block(p.k - 1);
        let copies = p.copies_at(p.k);
        let port = |i: usize, j: usize| i * blk + if j > i { j - 1 } else { j };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for _ in 0..rounds {
            let mut c = [0usize; 3];
            while c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                c = [rng.gen_range(0..copies), rng.gen_range(0..copies), rng.gen_range(0..copies)];
            }
            for code in 0..27 {
                let pick = |i: usize, rng: &mut ChaCha8Rng| match (code / 3usize.pow(i as u32)) % 3 {
                    0 => c[i] * blk + rng.gen_range(0..blk),
                    1 => port(c[i], c[(i + 1) % 3]),
                    _ => port(c[i], c[(i + 2) % 3]),
                };
                let t = [pick(0, &mut rng), pick(1, &mut rng), pick(2, &mut rng)];
                out.push(SteinerTriple::new(t[0], t[1], t[2]).unwrap());
            }
        }
        out
    }

    fn sweep(k: usize, n: usize, rounds: usize) -> (BTreeMap<String, usize>, Vec<String>) {
        let packer = Packer::new(build_params(k, n).unwrap()).unwrap();
        let mut hist = BTreeMap::new();
        let mut bad = Vec::new();
        for s in port_triples(&packer, rounds, 5) {
            match packer.pack(&s) {
                Ok(pk) => {
                    assert_eq!(pk.len(), pi3_formula(k, n));
                    *hist.entry(pk.cases.last().unwrap().clone()).or_insert(0) += 1;
                }
                Err(e) => bad.push(format!("{s}: {e}")),
            }
        }
        (hist, bad)
    }

    #[test]
    fn every_cross_placement_packs() {
        for (k, n) in [(2, 6), (2, 7)] {
            let (hist, bad) = sweep(k, n, 4);
            assert!(bad.is_empty(), "({k},{n}): {bad:?}");
            let kinds = ["all_out", "cycle", "mutual_z_in_x", "y_to_x.", "y_to_x_direct", "z_in_x", "z_in_y"];
            for kind in kinds {
                assert!(hist.keys().any(|l| l.contains(kind)), "({k},{n}) never took {kind}: {hist:?}");
            }
        }
    }
}
