//! All of S inside one copy `D[0]` of `D_{k-1,n}`.

use crate::error::Result;
use crate::graphcore::{connect_in, Path};

use super::spare::{spare_in, SparenessRequest};
use super::walk::Walk;
use super::{construction, gains_path, pack_in, Block, Ctx, SteinerTriple};

pub(super) fn claim1(ctx: &Ctx, b: Block, s: [usize; 3], cases: &mut Vec<String>) -> Result<Vec<Path>> {
    let d0 = ctx.sub(b, ctx.sub_of(b, s[0]));
    let paths = pack_in(ctx, d0, s, cases)?;
    if !gains_path(b.level, ctx.p.n) {
        cases.push(format!("claim1.k{}.flat", b.level));
        return Ok(paths);
    }
    cases.push(format!("claim1.k{}", b.level));
    let region = |w: usize| ctx.contains(d0, w);
    let r = common_neighbors(ctx, d0, s);
    let req = SparenessRequest { ell: 1, triple: SteinerTriple::from_array(s), r };
    let (mut paths, spares, _) = spare_in(ctx.g, &region, &req, &paths)?;
    let u = spares[0];
    // The member of S next to u plays x.
    let x = *s.iter().find(|&&v| ctx.g.has_edge(u, v)).expect("spare is a neighbor of S");
    let others: Vec<usize> = s.iter().copied().filter(|&v| v != x).collect();
    let (y, z) = (others[0], others[1]);
    let [x1, u1, y1, z1] = [x, u, y, z].map(|v| ctx.cross(b, v));
    let [c1, c2, c3, c4] = [x1, u1, y1, z1].map(|v| ctx.sub_of(b, v));
    let v = ctx.port(b, c1, c3);
    let w = ctx.port(b, c2, c4);
    let (v1, w1) = (ctx.cross(b, v), ctx.cross(b, w));
    let inside = |c: usize, from: usize, to: usize| -> Result<Path> {
        let blk = ctx.sub(b, c);
        connect_in(ctx.g, &|q| ctx.contains(blk, q), from, to).map_err(|e| construction("claim1", e.to_string()))
    };
    let t4 = inside(c4, z1, w1)?;
    let t2 = inside(c2, w, u1)?;
    let t1 = inside(c1, x1, v)?;
    let t3 = inside(c3, v1, y1)?;
    paths.push(Walk::new().v(z).seg(&t4).seg(&t2).v(u).v(x).seg(&t1).seg(&t3).v(y).done());
    Ok(paths)
}

pub(super) fn common_neighbors(ctx: &Ctx, blk: Block, s: [usize; 3]) -> usize {
    ctx.neighbors_in(blk, s[0])
        .filter(|&w| ctx.g.has_edge(w, s[1]) && ctx.g.has_edge(w, s[2]) && !s.contains(&w))
        .count()
}
