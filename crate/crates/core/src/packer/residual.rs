//! Last resort for branches without a fixed recipe: one more S-path through
//! the vertices a family leaves unused.

use std::collections::HashSet;

use crate::graphcore::{fan_in, Graph, Path};

/// An S-path internally disjoint from `paths`, or `None`. Each member of S is
/// tried as the internal vertex, with a two-leg fan towards the other two.
pub(crate) fn extra_path(g: &Graph, allowed: &dyn Fn(usize) -> bool, s: [usize; 3], paths: &[Path]) -> Option<Path> {
    let used: HashSet<usize> = paths.iter().flatten().copied().filter(|v| !s.contains(v)).collect();
    let mut direct: HashSet<(usize, usize)> = HashSet::new();
    for p in paths {
        for w in p.windows(2) {
            if s.contains(&w[0]) && s.contains(&w[1]) {
                direct.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    let ok = |w: usize| s.contains(&w) || (allowed(w) && !used.contains(&w));
    for (i, &c) in s.iter().enumerate() {
        let [a, b] = match i {
            0 => [s[1], s[2]],
            1 => [s[0], s[2]],
            _ => [s[0], s[1]],
        };
        let Ok(fan) = fan_in(g, &ok, c, &[a, b], 2) else { continue };
        let leg = |t: usize| fan.iter().find(|p| p.last() == Some(&t)).unwrap();
        let (pa, pb) = (leg(a), leg(b));
        let repeats = [pa, pb].iter().any(|p| p.len() == 2 && direct.contains(&(p[0].min(p[1]), p[0].max(p[1]))));
        if repeats || pa[1..].contains(&b) || pb[1..].contains(&a) {
            continue;
        }
        let mut path: Path = pa.iter().rev().copied().collect();
        path.extend_from_slice(&pb[1..]);
        return Some(path);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_free_route() {
        // Cycle 0..6 with S = {0, 2, 4}; the family uses 1.
        let g = Graph::cycle(6);
        let p = extra_path(&g, &|_| true, [0, 2, 4], &[vec![0, 1, 2]]).unwrap();
        assert_eq!(p, vec![0, 5, 4, 3, 2]);
        assert!(extra_path(&g, &|_| true, [0, 2, 4], &[vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]]).is_none());
    }
}
