//! Permutations of color labels and the groups they generate.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest permutation group closed by [`GroupSummary::generate`].
pub const MAX_GROUP_ORDER: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorPermutation {
    images: Vec<u32>,
}

impl ColorPermutation {
    pub fn identity(k: usize) -> Self {
        ColorPermutation { images: (0..k as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x as usize >= k || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::InvalidConfig(format!("{images:?} is not a bijection")));
            }
        }
        Ok(ColorPermutation { images })
    }

    /// Product of the given cycles on `0..k`.
    pub fn from_cycles(k: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..k as u32).collect();
        let mut used = HashSet::new();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a as usize >= k || !used.insert(a) {
                    return Err(Error::InvalidConfig(format!(
                        "cycle entry {a} out of range or repeated"
                    )));
                }
                images[a as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(ColorPermutation { images })
    }

    pub fn transposition(k: usize, a: u32, b: u32) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidConfig("transposition needs two distinct colors".into()));
        }
        Self::from_cycles(k, &[&[a, b]])
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`, or a bare comma list
    /// `1,2` read as a single cycle.
    pub fn parse(k: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let groups: Vec<&str> = if s.contains('(') {
            s.split(')')
                .map(|g| g.trim().trim_start_matches('('))
                .filter(|g| !g.trim().is_empty())
                .collect()
        } else {
            vec![s]
        };
        let mut cycles = Vec::new();
        for g in groups {
            let cycle = g
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
                .collect::<Result<Vec<u32>>>()?;
            cycles.push(cycle);
        }
        let refs: Vec<&[u32]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(k, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, c: u32) -> u32 {
        self.images[c as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ColorPermutation) -> ColorPermutation {
        ColorPermutation {
            images: other.images.iter().map(|&c| self.images[c as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> ColorPermutation {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        ColorPermutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn fixes(&self, c: u32) -> bool {
        self.apply(c) == c
    }

    /// Nontrivial cycles, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut c = start as u32;
            while !seen[c as usize] {
                seen[c as usize] = true;
                cycle.push(c);
                c = self.apply(c);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| acc / crate::poly::gcd(acc, c.len() as u64) * c.len() as u64)
    }

    pub fn is_transposition(&self) -> bool {
        let c = self.cycles();
        c.len() == 1 && c[0].len() == 2
    }

    /// A single cycle moving every point.
    pub fn is_full_cycle(&self) -> bool {
        let c = self.cycles();
        c.len() == 1 && c[0].len() == self.images.len()
    }
}

impl fmt::Display for ColorPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// The permutation group on colors generated by a set of permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub degree: usize,
    pub order: u64,
    pub is_transitive: bool,
    pub is_cyclic: bool,
    pub is_symmetric: bool,
    pub generators: Vec<ColorPermutation>,
}

impl GroupSummary {
    pub fn generate(k: usize, generators: &[ColorPermutation]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != k) {
            return Err(Error::DimensionMismatch(format!(
                "permutation of degree {} in a group of degree {k}",
                g.degree()
            )));
        }
        let id = ColorPermutation::identity(k);
        let mut seen: HashSet<ColorPermutation> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    if seen.len() > MAX_GROUP_ORDER {
                        return Err(Error::GroupTooLarge(MAX_GROUP_ORDER));
                    }
                    queue.push_back(y);
                }
            }
        }
        let order = seen.len() as u64;
        let factorial: u64 = (1..=k as u64).product();
        let is_cyclic = seen.iter().any(|x| x.order() == order);
        let mut reach = vec![k == 0; k];
        if k > 0 {
            reach[0] = true;
            let mut stack = vec![0u32];
            while let Some(c) = stack.pop() {
                for g in generators {
                    let d = g.apply(c) as usize;
                    if !reach[d] {
                        reach[d] = true;
                        stack.push(d as u32);
                    }
                }
            }
        }
        Ok(GroupSummary {
            degree: k,
            order,
            is_transitive: reach.iter().all(|&b| b),
            is_cyclic,
            is_symmetric: order == factorial,
            generators: generators.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let t = ColorPermutation::parse(5, "1,2").unwrap();
        assert_eq!(t.to_string(), "(1 2)");
        let c = ColorPermutation::parse(5, "(0 1 2 3 4)").unwrap();
        assert!(c.is_full_cycle());
        assert_eq!(c.order(), 5);
        let m = ColorPermutation::parse(4, "(0 1)(2 3)").unwrap();
        assert_eq!(m.cycles(), vec![vec![0, 1], vec![2, 3]]);
        assert!(ColorPermutation::parse(3, "(0 1)(1 2)").is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let a = ColorPermutation::parse(3, "(0 1)").unwrap();
        let b = ColorPermutation::parse(3, "(1 2)").unwrap();
        // a∘b: 1 -> 2 -> 2, 2 -> 1 -> 0, 0 -> 0 -> 1
        assert_eq!(a.compose(&b).images(), &[1, 2, 0]);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn group_closure() {
        let c5 = ColorPermutation::parse(5, "(0 1 2 3 4)").unwrap();
        let g = GroupSummary::generate(5, std::slice::from_ref(&c5)).unwrap();
        assert_eq!(g.order, 5);
        assert!(g.is_cyclic && g.is_transitive && !g.is_symmetric);
        let t = ColorPermutation::parse(5, "(1 2)").unwrap();
        let s5 = GroupSummary::generate(5, &[c5, t]).unwrap();
        assert_eq!(s5.order, 120);
        assert!(s5.is_symmetric);
        let trivial = GroupSummary::generate(3, &[]).unwrap();
        assert_eq!(trivial.order, 1);
        assert!(!trivial.is_transitive);
        let one = GroupSummary::generate(1, &[]).unwrap();
        assert!(one.is_symmetric && one.is_transitive);
    }
}
