//! Path assembly helpers shared by the constructions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graphcore::{connect_in, fan_in, link_two_in, Graph, Path};

use super::{Block, Ctx};

/// Concatenates vertices and segments, dropping a vertex that repeats the
/// previous one. This is how the templates absorb anchors that coincide with
/// members of S.
#[derive(Debug, Default, Clone)]
pub(crate) struct Walk(Vec<usize>);

impl Walk {
    pub fn new() -> Self {
        Walk(Vec::new())
    }

    pub fn v(mut self, v: usize) -> Self {
        if self.0.last() != Some(&v) {
            self.0.push(v);
        }
        self
    }

    pub fn seg(mut self, seg: &[usize]) -> Self {
        for &v in seg {
            self = self.v(v);
        }
        self
    }

    pub fn seg_rev(mut self, seg: &[usize]) -> Self {
        for &v in seg.iter().rev() {
            self = self.v(v);
        }
        self
    }

    pub fn done(self) -> Path {
        self.0
    }
}

/// Sub-path of `path` from `a` to `b`, oriented from `a`.
pub(crate) fn between(path: &[usize], a: usize, b: usize) -> Path {
    let i = path.iter().position(|&v| v == a).expect("vertex on path");
    let j = path.iter().position(|&v| v == b).expect("vertex on path");
    if i <= j {
        path[i..=j].to_vec()
    } else {
        path[j..=i].iter().rev().copied().collect()
    }
}

/// A fan from `root`, indexed by target. A target equal to the root maps to
/// the one-vertex path.
#[derive(Debug, Clone)]
pub(crate) struct FanMap {
    pub root: usize,
    paths: HashMap<usize, Path>,
}

impl FanMap {
    pub fn build(g: &Graph, allowed: &dyn Fn(usize) -> bool, root: usize, targets: &[usize]) -> Result<FanMap> {
        let mut real: Vec<usize> = targets.iter().copied().filter(|&t| t != root).collect();
        real.sort_unstable();
        real.dedup();
        let fan = fan_in(g, allowed, root, &real, real.len())?;
        let mut paths: HashMap<usize, Path> = fan.into_iter().map(|p| (*p.last().unwrap(), p)).collect();
        if targets.contains(&root) {
            paths.insert(root, vec![root]);
        }
        Ok(FanMap { root, paths })
    }

    pub fn try_to(&self, t: usize) -> Result<&[usize]> {
        self.paths
            .get(&t)
            .map(|p| p.as_slice())
            .ok_or_else(|| Error::FanInfeasible(format!("{t} is not a target of the fan at {}", self.root)))
    }
}

/// One step of a path description: a vertex, a fixed segment, or a leg of
/// the fan of role `r` leaving the root towards `t` (`Out`) or arriving at
/// the root from `t` (`In`).
#[derive(Debug, Clone)]
pub(crate) enum Piece {
    V(usize),
    P(Path),
    Out(usize, usize),
    In(usize, usize),
}

pub(crate) type Recipe = Vec<Piece>;

/// Targets that the recipes ask from the fan of role `role`.
pub(crate) fn fan_targets(recipes: &[Recipe], role: usize) -> Vec<usize> {
    let mut out: Vec<usize> = recipes
        .iter()
        .flatten()
        .filter_map(|p| match *p {
            Piece::Out(r, t) | Piece::In(r, t) if r == role => Some(t),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn render(recipes: &[Recipe], fans: &[FanMap]) -> Result<Vec<Path>> {
    let mut paths = Vec::with_capacity(recipes.len());
    for recipe in recipes {
        let mut w = Walk::new();
        for piece in recipe {
            w = match piece {
                Piece::V(v) => w.v(*v),
                Piece::P(p) => w.seg(p),
                Piece::Out(r, t) => w.seg(fans[*r].try_to(*t)?),
                Piece::In(r, t) => w.seg_rev(fans[*r].try_to(*t)?),
            };
        }
        paths.push(w.done());
    }
    Ok(paths)
}

pub(crate) fn rev(p: &[usize]) -> Path {
    p.iter().rev().copied().collect()
}

/// Copies holding `must` plus enough of `avail` to make the union
/// 2-connected (three copies of one level always are).
pub(crate) fn region(avail: &[usize], must: &[usize]) -> Vec<usize> {
    let mut set: Vec<usize> = Vec::new();
    for &c in must {
        if !set.contains(&c) {
            set.push(c);
        }
    }
    for &c in avail {
        if set.len() >= 3 {
            break;
        }
        if !set.contains(&c) {
            set.push(c);
        }
    }
    set
}

pub(crate) fn connect_copies(ctx: &Ctx, b: Block, copies: &[usize], from: usize, to: usize) -> Result<Path> {
    connect_in(ctx.g, &|w| ctx.contains(b, w) && copies.contains(&ctx.sub_of(b, w)), from, to)
}

/// Two disjoint paths from `a` to `to` inside `copies`, returned as (path
/// from `a[0]`, path from `a[1]`).
pub(crate) fn link_copies(ctx: &Ctx, b: Block, copies: &[usize], a: [usize; 2], to: [usize; 2]) -> Result<(Path, Path)> {
    let lt = link_two_in(ctx.g, &|w| ctx.contains(b, w) && copies.contains(&ctx.sub_of(b, w)), a, to)?;
    Ok((lt.path_from(a[0]).unwrap().clone(), lt.path_from(a[1]).unwrap().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_collapses_repeats() {
        let p = Walk::new().v(1).v(2).v(2).seg(&[2, 3, 4]).seg_rev(&[5, 4]).done();
        assert_eq!(p, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn between_orients() {
        let p = [1, 2, 3, 4];
        assert_eq!(between(&p, 3, 1), vec![3, 2, 1]);
        assert_eq!(between(&p, 2, 4), vec![2, 3, 4]);
    }
}
