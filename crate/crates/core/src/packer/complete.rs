use crate::error::{Error, Result};
use crate::graphcore::Path;

use super::{Packing, SteinerTriple};

/// `floor(m / 2)` S-paths in the clique on `vertices`: `x y z`, `x z v1 y`,
/// then `x v_a z v_b y` for consecutive pairs of the remaining vertices.
pub(crate) fn clique_paths(vertices: &[usize], s: [usize; 3]) -> Vec<Path> {
    let [x, y, z] = s;
    let spare: Vec<usize> = vertices.iter().copied().filter(|v| !s.contains(v)).collect();
    let mut paths = vec![vec![x, y, z]];
    if let Some(&v1) = spare.first() {
        paths.push(vec![x, z, v1, y]);
        for pair in spare[1..].chunks_exact(2) {
            paths.push(vec![x, pair[0], z, pair[1], y]);
        }
    }
    paths
}

/// Packing for `S` in `K_n` on the vertices `0..n`.
pub fn pack_complete(n: usize, s: &SteinerTriple) -> Result<Packing> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("K_{n} has no three vertices")));
    }
    if let Some(&v) = s.members().iter().find(|&&v| v >= n) {
        return Err(Error::UidRange { uid: v as u64, count: n as u64 });
    }
    let vertices: Vec<usize> = (0..n).collect();
    let mut pk = Packing::new(*s, clique_paths(&vertices, s.members()));
    pk.cases.push("clique".into());
    Ok(pk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::Graph;
    use crate::verify::check_packing;

    #[test]
    fn counts_and_validity() {
        for n in 3..=12 {
            let g = Graph::complete(n);
            for s in [(0, 1, 2), (n - 1, 0, n / 2 + usize::from(n / 2 == 0))] {
                let Ok(s) = SteinerTriple::new(s.0, s.1, s.2) else { continue };
                let pk = pack_complete(n, &s).unwrap();
                assert_eq!(pk.len(), n / 2);
                assert!(check_packing(&g, &s, &pk).ok());
            }
        }
    }

    #[test]
    fn k4_example() {
        let s = SteinerTriple::new(1, 2, 3).unwrap();
        let pk = pack_complete(5, &s).unwrap();
        assert_eq!(pk.paths[0], vec![1, 2, 3]);
        assert_eq!(pk.paths[1], vec![1, 3, 0, 2]);
        assert!(pack_complete(2, &s).is_err());
    }
}
