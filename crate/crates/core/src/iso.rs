//! Isomorphism of colored Cayley graphs by individualization and
//! refinement.
//!
//! Cells are refined by the vector of neighbour counts per (cell, color)
//! until stable, on both graphs at once so cell labels correspond. When a
//! cell is not a singleton, its smallest vertex in the first graph is
//! matched against each vertex of the same cell in the second graph in
//! turn. Both graphs are vertex-transitive (translations), so vertex 0 is
//! matched to vertex 0 up front.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::graphs::ColoredCayleyGraph;
use crate::perm::ColorPermutation;

pub const MAX_ISO_VERTICES: usize = 256;
const MAX_ISO_COLORS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isomorphism {
    /// Image in the second graph of each vertex (by element encoding).
    pub vertex_map: Vec<u32>,
    /// Color `c` of the first graph corresponds to `color_map(c)`.
    pub color_map: ColorPermutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoOutcome {
    pub isomorphic: bool,
    pub mapping: Option<Isomorphism>,
    /// Search nodes visited over all color correspondences.
    pub nodes: u64,
    pub color_maps_tried: u64,
}

struct Instance {
    n: usize,
    k: usize,
    a: Vec<u32>,
    b: Vec<u32>,
    nodes: u64,
}

fn edge_table(g: &ColoredCayleyGraph, relabel: Option<&ColorPermutation>) -> Vec<u32> {
    let f = g.field();
    let n = f.q() as usize;
    let mut t = vec![u32::MAX; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                let c = g.color(f.sub(Elem(u as u32), Elem(v as u32))).expect("distinct");
                t[u * n + v] = relabel.map_or(c, |s| s.apply(c));
            }
        }
    }
    t
}

impl Instance {
    /// Refines both partitions to a common stable one; false if the
    /// graphs are told apart.
    fn refine(&self, ca: &mut [u32], cb: &mut [u32]) -> bool {
        let (n, k) = (self.n, self.k);
        loop {
            let ncells = ca.iter().max().map_or(0, |&m| m as usize + 1);
            let sig = |cells: &[u32], table: &[u32], v: usize| -> Vec<u32> {
                let mut s = vec![0u32; 1 + ncells * k];
                s[0] = cells[v];
                for w in 0..n {
                    if w != v {
                        s[1 + cells[w] as usize * k + table[v * n + w] as usize] += 1;
                    }
                }
                s
            };
            let sa: Vec<Vec<u32>> = (0..n).map(|v| sig(ca, &self.a, v)).collect();
            let sb: Vec<Vec<u32>> = (0..n).map(|v| sig(cb, &self.b, v)).collect();
            let mut all: Vec<&Vec<u32>> = sa.iter().chain(sb.iter()).collect();
            all.sort();
            all.dedup();
            let index = |s: &Vec<u32>| all.binary_search(&s).expect("present") as u32;
            for v in 0..n {
                ca[v] = index(&sa[v]);
                cb[v] = index(&sb[v]);
            }
            let mut xa = ca.to_vec();
            let mut xb = cb.to_vec();
            xa.sort_unstable();
            xb.sort_unstable();
            if xa != xb {
                return false;
            }
            if all.len() == ncells {
                return true;
            }
        }
    }

    fn search(&mut self, mut ca: Vec<u32>, mut cb: Vec<u32>) -> Option<Vec<u32>> {
        self.nodes += 1;
        if !self.refine(&mut ca, &mut cb) {
            return None;
        }
        let n = self.n;
        let ncells = ca.iter().max().map_or(0, |&m| m as usize + 1);
        if ncells == n {
            let mut in_b = vec![0u32; n];
            for v in 0..n {
                in_b[cb[v] as usize] = v as u32;
            }
            let map: Vec<u32> = (0..n).map(|u| in_b[ca[u] as usize]).collect();
            let ok = (0..n).all(|u| {
                (0..n).all(|v| self.a[u * n + v] == self.b[map[u] as usize * n + map[v] as usize])
            });
            return ok.then_some(map);
        }
        let mut sizes = vec![0usize; ncells];
        for &c in &ca {
            sizes[c as usize] += 1;
        }
        let cell = (0..ncells).find(|&c| sizes[c] > 1).expect("some cell is not a singleton") as u32;
        let u = ca.iter().position(|&c| c == cell).expect("cell is nonempty");
        let fresh = ncells as u32;
        for v in (0..n).filter(|&v| cb[v] == cell) {
            let mut na = ca.clone();
            let mut nb = cb.clone();
            na[u] = fresh;
            nb[v] = fresh;
            if let Some(m) = self.search(na, nb) {
                return Some(m);
            }
        }
        None
    }
}

fn permutations(k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..k as u32).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// A vertex bijection carrying the colors of `a` onto those of `b`, with a
/// global relabelling of colors allowed when `permute_colors` is set.
pub fn iso_colored(
    a: &ColoredCayleyGraph,
    b: &ColoredCayleyGraph,
    permute_colors: bool,
) -> Result<IsoOutcome> {
    let n = a.field().q() as usize;
    let k = a.k();
    let mut outcome = IsoOutcome { isomorphic: false, mapping: None, nodes: 0, color_maps_tried: 0 };
    if n != b.field().q() as usize || k != b.k() {
        return Ok(outcome);
    }
    if n > MAX_ISO_VERTICES {
        return Err(Error::EnumerationTooLarge {
            size: n as u128,
            limit: MAX_ISO_VERTICES as u128,
        });
    }
    if permute_colors && k > MAX_ISO_COLORS {
        return Err(Error::EnumerationTooLarge {
            size: k as u128,
            limit: MAX_ISO_COLORS as u128,
        });
    }
    let sizes_a = a.color_class_sizes();
    let sizes_b = b.color_class_sizes();
    let maps = if permute_colors { permutations(k) } else { vec![(0..k as u32).collect()] };
    let tb = edge_table(b, None);
    for images in maps {
        if (0..k).any(|c| sizes_a[c] != sizes_b[images[c] as usize]) {
            continue;
        }
        let sigma = ColorPermutation::from_images(images)?;
        outcome.color_maps_tried += 1;
        let mut inst = Instance { n, k, a: edge_table(a, Some(&sigma)), b: tb.clone(), nodes: 0 };
        let mut ca = vec![0u32; n];
        let mut cb = vec![0u32; n];
        ca[0] = 1;
        cb[0] = 1;
        let found = inst.search(ca, cb);
        outcome.nodes += inst.nodes;
        if let Some(vertex_map) = found {
            outcome.isomorphic = true;
            outcome.mapping = Some(Isomorphism { vertex_map, color_map: sigma });
            return Ok(outcome);
        }
    }
    Ok(outcome)
}

/// Checks a claimed isomorphism edge by edge.
pub fn check_isomorphism(a: &ColoredCayleyGraph, b: &ColoredCayleyGraph, iso: &Isomorphism) -> bool {
    let fa = a.field();
    let fb = b.field();
    let n = fa.q() as usize;
    if iso.vertex_map.len() != n || fb.q() as usize != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in &iso.vertex_map {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    (0..n as u32).all(|u| {
        (0..n as u32).filter(|&v| v != u).all(|v| {
            let ca = a.color(fa.sub(Elem(u), Elem(v))).expect("distinct");
            let (x, y) = (iso.vertex_map[u as usize], iso.vertex_map[v as usize]);
            b.color(fb.sub(Elem(x), Elem(y))) == Some(iso.color_map.apply(ca))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::graphs::{gp_k, paley, peisert};
    use std::sync::Arc;

    #[test]
    fn lexicographic_permutations() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn self_isomorphism() {
        let f = Arc::new(build_field(2, 4, None).unwrap());
        let g = gp_k(f, 3).unwrap();
        let out = iso_colored(&g, &g, false).unwrap();
        assert!(out.isomorphic);
        assert!(check_isomorphism(&g, &g, out.mapping.as_ref().unwrap()));
    }

    #[test]
    fn paley_and_peisert_of_order_nine() {
        let f = Arc::new(build_field(3, 2, None).unwrap());
        let a = paley(f.clone()).unwrap();
        let b = peisert(f).unwrap();
        let out = iso_colored(&a, &b, true).unwrap();
        assert!(out.isomorphic);
        assert!(check_isomorphism(&a, &b, out.mapping.as_ref().unwrap()));
    }

    #[test]
    fn different_sizes_are_not_isomorphic() {
        let a = paley(Arc::new(build_field(3, 2, None).unwrap())).unwrap();
        let b = paley(Arc::new(build_field(13, 1, None).unwrap())).unwrap();
        assert!(!iso_colored(&a, &b, true).unwrap().isomorphic);
    }
}
