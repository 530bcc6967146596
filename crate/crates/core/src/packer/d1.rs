//! `D_{1,n}`: `n + 1` cliques joined by a perfect matching between copies.

use crate::error::Result;
use crate::graphcore::{connect_in, Path};
use crate::topology::{build_graph, build_params};

use super::complete::clique_paths;
use super::walk::Walk;
use super::{check_range, construction, Block, Ctx, Packing, SteinerTriple};

/// Packs `S` in `D_{1,n}` (`n >= 6`).
pub fn pack_d1(n: usize, s: &SteinerTriple) -> Result<Packing> {
    let p = build_params(1, n)?;
    check_range(&p)?;
    let g = build_graph(&p)?;
    super::Packer::with_graph(p, g)?.pack(s)
}

pub(super) fn level1(ctx: &Ctx, b: Block, s: [usize; 3], cases: &mut Vec<String>) -> Result<Vec<Path>> {
    let c = s.map(|v| ctx.sub_of(b, v));
    if c[0] == c[1] && c[1] == c[2] {
        cases.push("d1.one_copy".into());
        one_copy(ctx, b, s)
    } else if c[0] != c[1] && c[1] != c[2] && c[0] != c[2] {
        cases.push("d1.three_copies".into());
        Ok(three_copies(ctx, b, s))
    } else {
        cases.push("d1.two_copies".into());
        two_copies(ctx, b, s)
    }
}

fn clique_of(ctx: &Ctx, b: Block, i: usize) -> Vec<usize> {
    let sub = ctx.sub(b, i);
    (sub.base..sub.base + ctx.size(sub)).collect()
}

fn one_copy(ctx: &Ctx, b: Block, s: [usize; 3]) -> Result<Vec<Path>> {
    let [x, y, z] = s;
    let n = ctx.p.n;
    let clique = clique_of(ctx, b, ctx.sub_of(b, x));
    if n % 2 == 0 {
        return Ok(clique_paths(&clique, s));
    }
    // Odd n: hold back u_{n-3} for a path through the copies of y' and z'.
    let spare: Vec<usize> = clique.iter().copied().filter(|v| !s.contains(v)).collect();
    let held = spare[n - 4];
    let inner: Vec<usize> = clique.iter().copied().filter(|&v| v != held).collect();
    let mut paths = clique_paths(&inner, s);
    let (y1, z1) = (ctx.cross(b, y), ctx.cross(b, z));
    let (cy, cz) = (ctx.sub(b, ctx.sub_of(b, y1)), ctx.sub(b, ctx.sub_of(b, z1)));
    let region = |w: usize| ctx.contains(cy, w) || ctx.contains(cz, w);
    let t = connect_in(ctx.g, &region, y1, z1).map_err(|e| construction("d1.one_copy", e.to_string()))?;
    paths.push(Walk::new().v(x).v(held).v(y).seg(&t).v(z).done());
    Ok(paths)
}

fn two_copies(ctx: &Ctx, b: Block, s: [usize; 3]) -> Result<Vec<Path>> {
    let n = ctx.p.n;
    let c = s.map(|v| ctx.sub_of(b, v));
    // Pair {a, b'} shares a copy D0, the third vertex z sits in D1.
    let (pair, z) = if c[0] == c[1] {
        ([s[0], s[1]], s[2])
    } else if c[0] == c[2] {
        ([s[0], s[2]], s[1])
    } else {
        ([s[1], s[2]], s[0])
    };
    let d0 = ctx.sub_of(b, pair[0]);
    let d1 = ctx.sub_of(b, z);
    // y is a pair member whose cross neighbor avoids D1; smaller uid first.
    let mut cand: Vec<usize> = pair.iter().copied().filter(|&v| ctx.sub_of(b, ctx.cross(b, v)) != d1).collect();
    cand.sort_unstable();
    let y = cand[0];
    let x = if pair[0] == y { pair[1] } else { pair[0] };
    let d2 = ctx.sub_of(b, ctx.cross(b, y));
    // Copy order D[0], D[1], D[2], then the rest ascending.
    let mut order = vec![d0, d1, d2];
    order.extend((0..ctx.copies(b)).filter(|i| ![d0, d1, d2].contains(i)));
    let port = |from: usize, to: usize| ctx.port(b, order[from], order[to]);
    // u_i lives in D0, v_i in D1, both indexed 1..=n.
    let mut u = vec![0usize; n + 1];
    let mut v = vec![0usize; n + 1];
    u[1] = y;
    u[2] = port(0, 1);
    v[1] = port(1, 2);
    v[2] = port(1, 0);
    for i in 3..=n {
        u[i] = port(0, i);
        v[i] = port(1, i);
    }
    // x must carry an even index.
    let ix = (1..=n).find(|&i| u[i] == x).expect("x is a port of D0");
    if ix % 2 == 1 {
        let other = if ix == n { n - 1 } else { ix + 1 };
        u.swap(ix, other);
        v.swap(ix, other);
        // Copies follow their ports.
        order.swap(ix, other);
    }
    let cross = |w: usize| ctx.cross(b, w);
    let mut paths = vec![Walk::new().v(y).v(x).v(u[2]).v(v[2]).v(z).done()];
    let last = if n % 2 == 0 { n - 1 } else { n - 2 };
    for i in (3..=last).step_by(2) {
        paths.push(
            Walk::new()
                .v(y)
                .v(u[i])
                .v(cross(u[i]))
                .v(cross(v[i]))
                .v(v[i])
                .v(z)
                .v(v[i + 1])
                .v(cross(v[i + 1]))
                .v(cross(u[i + 1]))
                .v(u[i + 1])
                .v(x)
                .done(),
        );
    }
    if n % 2 == 1 {
        paths.push(Walk::new().v(x).v(u[n]).v(y).v(cross(y)).v(cross(v[1])).v(v[1]).v(z).done());
    }
    Ok(paths)
}

fn three_copies(ctx: &Ctx, b: Block, s: [usize; 3]) -> Vec<Path> {
    let n = ctx.p.n;
    let [x, y, z] = s;
    let (d0, d1, d2) = (ctx.sub_of(b, x), ctx.sub_of(b, y), ctx.sub_of(b, z));
    let mut order = vec![d0, d1, d2];
    order.extend((0..ctx.copies(b)).filter(|i| ![d0, d1, d2].contains(i)));
    let port = |from: usize, to: usize| ctx.port(b, order[from], order[to]);
    let cross = |w: usize| ctx.cross(b, w);
    let (u1, v1, u2, w1, v2, w2) = (port(0, 1), port(1, 0), port(0, 2), port(2, 0), port(1, 2), port(2, 1));
    let mut paths = vec![
        Walk::new().v(x).v(u1).v(v1).v(y).v(v2).v(w2).v(z).done(),
        Walk::new()
            .v(z)
            .v(w1)
            .v(u2)
            .v(x)
            .v(port(0, 3))
            .v(cross(port(0, 3)))
            .v(cross(port(1, 3)))
            .v(port(1, 3))
            .v(y)
            .done(),
    ];
    for i in (4..n).step_by(2) {
        let (ui, wi, uj, vj) = (port(0, i), port(2, i), port(0, i + 1), port(1, i + 1));
        paths.push(
            Walk::new()
                .v(z)
                .v(wi)
                .v(cross(wi))
                .v(cross(ui))
                .v(ui)
                .v(x)
                .v(uj)
                .v(cross(uj))
                .v(cross(vj))
                .v(vj)
                .v(y)
                .done(),
        );
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packer::pi3_formula;

    #[test]
    fn every_triple_small() {
        for n in [6, 7] {
            let p = build_params(1, n).unwrap();
            let packer = super::super::Packer::new(p).unwrap();
            let nv = packer.graph().vertex_count();
            let mut count = 0;
            for x in 0..nv {
                for y in (x + 1)..nv {
                    for z in (y + 1)..nv {
                        if (x + 3 * y + 7 * z) % 11 != 0 {
                            continue;
                        }
                        let s = SteinerTriple::new(x, y, z).unwrap();
                        let pk = packer.pack(&s).unwrap_or_else(|e| panic!("n={n} {s}: {e}"));
                        assert_eq!(pk.len(), pi3_formula(1, n));
                        count += 1;
                    }
                }
            }
            assert!(count > 100);
        }
    }

    #[test]
    fn standalone_entry() {
        let s = SteinerTriple::new(0, 7, 14).unwrap();
        assert_eq!(pack_d1(6, &s).unwrap().len(), 3);
        assert!(pack_d1(5, &s).is_err());
    }
}
