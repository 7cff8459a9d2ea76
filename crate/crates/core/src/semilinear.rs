//! The one-dimensional semilinear group ΓL_1(p^r) acting on the exponents
//! of a primitive root, subgroups in Foulser standard form
//! `<ω^d, ω^e α^s>`, and the orbit computations used to decide which
//! subgroups can be the vertex stabilizer of a totally symmetric coloring.
//!
//! Everything here is exponent arithmetic: `ω^e α^s` sends `ω^i` to
//! `ω^{p^s i + e}`. Subgroups always contain `ω^d`, so their orbits are
//! unions of residue classes mod `d` and orbit questions reduce to the
//! action of a single element on `Z_d`.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldTable};
use crate::graphs::ColoredCayleyGraph;
use crate::linalg::LinearMap;
use crate::perm::{ColorPermutation, GroupSummary};
use crate::poly::{divisors, gcd, is_prime};

/// `ω^e α^s` with `0 <= e < q - 1` and `0 <= s < r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaElem {
    pub e: u64,
    pub s: u32,
}

impl GammaElem {
    pub const IDENTITY: GammaElem = GammaElem { e: 0, s: 0 };

    pub fn omega_power(e: u64) -> Self {
        GammaElem { e, s: 0 }
    }
}

/// `(d, e, s)` naming `<ω^d, ω^e α^s>`. `s` lies in `1..=r`; `s = r`
/// means the second generator has no Frobenius part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FoulserTriple {
    pub d: u64,
    pub e: u64,
    pub s: u32,
}

impl FoulserTriple {
    pub fn new(d: u64, e: u64, s: u32) -> Self {
        FoulserTriple { d, e, s }
    }
}

impl std::fmt::Display for FoulserTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.d, self.e, self.s)
    }
}

/// Exponent-level model of ΓL_1(p^r).
#[derive(Debug, Clone)]
pub struct GammaL1 {
    p: u64,
    r: u32,
    /// q - 1
    n: u64,
    /// `p^s mod n` for `s = 0..=r`
    frob: Vec<u64>,
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

impl GammaL1 {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let q = (p as u64)
            .checked_pow(r)
            .filter(|_| r >= 1)
            .ok_or(Error::FieldTooLarge { p, r })?;
        let n = q - 1;
        let mut frob = Vec::with_capacity(r as usize + 1);
        let mut x = 1 % n.max(1);
        for _ in 0..=r {
            frob.push(x);
            x = mulmod(x, p as u64, n.max(1));
        }
        Ok(GammaL1 { p: p as u64, r, n, frob })
    }

    pub fn of_field(field: &FieldTable) -> Self {
        Self::new(field.p(), field.r()).expect("field parameters are valid")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// q - 1, the number of exponents.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// |ΓL_1(p^r)| = (q - 1) r.
    pub fn order(&self) -> u64 {
        self.n * self.r as u64
    }

    pub fn frobenius_multiplier(&self, s: u32) -> u64 {
        self.frob[(s % self.r) as usize]
    }

    /// Image of the exponent `i` under `g`.
    pub fn act(&self, g: GammaElem, i: u64) -> u64 {
        (mulmod(self.frobenius_multiplier(g.s), i, self.n) + g.e) % self.n
    }

    /// Same action on residues modulo a divisor `d` of q - 1.
    fn act_mod(&self, g: GammaElem, i: u64, d: u64) -> u64 {
        (mulmod(self.frobenius_multiplier(g.s), i, d) + g.e) % d
    }

    /// `a ∘ b` (apply `b` first), via `α ω = ω^p α`.
    pub fn compose(&self, a: GammaElem, b: GammaElem) -> GammaElem {
        GammaElem {
            e: (a.e + mulmod(self.frobenius_multiplier(a.s), b.e, self.n)) % self.n,
            s: (a.s + b.s) % self.r,
        }
    }

    pub fn pow(&self, g: GammaElem, m: u64) -> GammaElem {
        let mut acc = GammaElem::IDENTITY;
        let mut base = g;
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = self.compose(acc, base);
            }
            base = self.compose(base, base);
            m >>= 1;
        }
        acc
    }

    pub fn normalize(&self, g: GammaElem) -> GammaElem {
        GammaElem { e: g.e % self.n, s: g.s % self.r }
    }

    /// All elements of the subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[GammaElem]) -> Vec<GammaElem> {
        let gens: Vec<GammaElem> = gens.iter().map(|&g| self.normalize(g)).collect();
        let mut seen = HashSet::from([GammaElem::IDENTITY]);
        let mut queue = VecDeque::from([GammaElem::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.compose(g, x);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<GammaElem> = seen.into_iter().collect();
        out.sort();
        out
    }

    pub fn validate(&self, t: FoulserTriple) -> Result<()> {
        let bad = |reason| Err(Error::NotStandardForm { d: t.d, e: t.e, s: t.s, reason });
        if t.s == 0 || !self.r.is_multiple_of(t.s) {
            return bad("s must be positive and divide r");
        }
        if t.d == 0 || !self.n.is_multiple_of(t.d) {
            return bad("d must be positive and divide q - 1");
        }
        if t.e >= t.d {
            return bad("e must be below d");
        }
        let m = self.n / (self.p.pow(t.s) - 1);
        if mulmod(t.e, m % t.d, t.d) != 0 {
            return bad("d must divide e(q - 1)/(p^s - 1)");
        }
        Ok(())
    }

    /// |H| = (q - 1) r / (d s).
    pub fn subgroup_order(&self, t: FoulserTriple) -> u64 {
        self.n / t.d * (self.r / t.s) as u64
    }

    /// The two standard generators `ω^d` and `ω^e α^s`.
    pub fn generators(&self, t: FoulserTriple) -> [GammaElem; 2] {
        [
            GammaElem::omega_power(t.d % self.n),
            GammaElem { e: t.e, s: t.s % self.r },
        ]
    }

    pub fn contains(&self, t: FoulserTriple, g: GammaElem) -> bool {
        let g = self.normalize(g);
        if !g.s.is_multiple_of(t.s) {
            return false;
        }
        let b = (g.s / t.s) as u64;
        let h = self.pow(GammaElem { e: t.e, s: t.s % self.r }, b);
        (g.e + self.n - h.e).is_multiple_of(t.d)
    }

    /// The unique standard form of `<gens>`: `d` is least with `ω^d` in the
    /// group, `s` the least positive Frobenius part (or `r`), `e` the
    /// exponent of an element with Frobenius part `s`, reduced mod `d`.
    pub fn standard_form(&self, gens: &[GammaElem]) -> FoulserTriple {
        let elems = self.closure(gens);
        let d = elems
            .iter()
            .filter(|g| g.s == 0)
            .fold(self.n, |acc, g| gcd(acc, g.e));
        let s = elems
            .iter()
            .map(|g| g.s)
            .filter(|&s| s > 0)
            .min()
            .unwrap_or(self.r);
        let e = if s == self.r {
            0
        } else {
            elems.iter().find(|g| g.s == s).map_or(0, |g| g.e % d)
        };
        FoulserTriple { d, e, s }
    }

    pub fn subgroup_elements(&self, t: FoulserTriple) -> Result<Vec<GammaElem>> {
        self.validate(t)?;
        let h = GammaElem { e: t.e, s: t.s % self.r };
        let mut out = Vec::with_capacity(self.subgroup_order(t) as usize);
        let mut hb = GammaElem::IDENTITY;
        for _ in 0..self.r / t.s {
            for a in 0..self.n / t.d {
                out.push(GammaElem { e: (a * t.d + hb.e) % self.n, s: hb.s });
            }
            hb = self.compose(h, hb);
        }
        out.sort();
        Ok(out)
    }

    /// Orbits of `<ω^d, ω^e α^s>` on the residues `Z_d`, each sorted,
    /// ordered by smallest residue.
    pub fn residue_orbits(&self, t: FoulserTriple) -> Vec<Vec<u64>> {
        let h = GammaElem { e: t.e, s: t.s % self.r };
        let mut seen = vec![false; t.d as usize];
        let mut out = Vec::new();
        for start in 0..t.d {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut c = start;
            while !seen[c as usize] {
                seen[c as usize] = true;
                orbit.push(c);
                c = self.act_mod(h, c, t.d);
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// Orbits on all exponents `0..q-1` (nonzero field elements), ordered
    /// by smallest exponent.
    pub fn orbit_partition(&self, t: FoulserTriple) -> Result<Vec<Vec<u64>>> {
        self.validate(t)?;
        let orbits = self.residue_orbits(t);
        let mut label = vec![0usize; t.d as usize];
        for (i, o) in orbits.iter().enumerate() {
            for &c in o {
                label[c as usize] = i;
            }
        }
        let mut blocks = vec![Vec::new(); orbits.len()];
        for i in 0..self.n {
            blocks[label[(i % t.d) as usize]].push(i);
        }
        Ok(blocks)
    }

    /// Every valid standard-form triple.
    pub fn valid_triples(&self) -> Vec<FoulserTriple> {
        let mut out = Vec::new();
        for s in divisors(self.r as u64) {
            let s = s as u32;
            let m = self.n / (self.p.pow(s) - 1);
            for d in divisors(self.n) {
                let step = d / gcd(d, m % d);
                let mut e = 0;
                while e < d {
                    out.push(FoulserTriple { d, e, s });
                    e += step;
                }
            }
        }
        out
    }

    /// Triples whose group has exactly `k` orbits on nonzero elements, all
    /// of size (q - 1)/k. Orbits are computed, not argued.
    pub fn k_equal_orbit_triples(&self, k: usize) -> Vec<FoulserTriple> {
        let k = k as u64;
        if k == 0 || !self.n.is_multiple_of(k) {
            return Vec::new();
        }
        let class = self.n / k;
        self.valid_triples()
            .into_iter()
            .filter(|&t| self.subgroup_order(t).is_multiple_of(class) && t.d % k == 0)
            .filter(|&t| {
                let orbits = self.residue_orbits(t);
                orbits.len() as u64 == k && orbits.iter().all(|o| o.len() as u64 == t.d / k)
            })
            .collect()
    }

    /// Order of the subgroup of ΓL_1 fixing every orbit of `t` setwise.
    pub fn orbit_stabilizer_order(&self, t: FoulserTriple) -> u64 {
        let orbits = self.residue_orbits(t);
        let mut label = vec![0usize; t.d as usize];
        for (i, o) in orbits.iter().enumerate() {
            for &c in o {
                label[c as usize] = i;
            }
        }
        let mut count = 0u64;
        for s in 0..self.r {
            // g(0) = e must stay in the orbit of 0
            for &e in &orbits[0] {
                let g = GammaElem { e, s };
                if (0..t.d).all(|c| label[self.act_mod(g, c, t.d) as usize] == label[c as usize]) {
                    count += 1;
                }
            }
        }
        count * (self.n / t.d)
    }

    /// Standard-form overgroups `M ⊇ A` with `[M : A] = k`, each with its
    /// action on the orbits of `A`.
    pub fn index_k_overgroups(&self, a: FoulserTriple, k: usize) -> Vec<OvergroupReport> {
        let target = self.subgroup_order(a) * k as u64;
        let a_gens = self.generators(a);
        let orbits = self.residue_orbits(a);
        let mut label = vec![0u32; a.d as usize];
        for (i, o) in orbits.iter().enumerate() {
            for &c in o {
                label[c as usize] = i as u32;
            }
        }
        self.valid_triples()
            .into_iter()
            .filter(|&m| a.d.is_multiple_of(m.d) && self.subgroup_order(m) == target)
            .filter(|&m| a_gens.iter().all(|&g| self.contains(m, g)))
            .map(|m| OvergroupReport {
                triple: m,
                index: k as u64,
                action: self.action_on_orbits(&self.generators(m), &orbits, &label, a.d),
            })
            .collect()
    }

    fn action_on_orbits(
        &self,
        gens: &[GammaElem],
        orbits: &[Vec<u64>],
        label: &[u32],
        d: u64,
    ) -> ColorAction {
        let mut perms = Vec::with_capacity(gens.len());
        for &g in gens {
            let mut images = vec![0u32; orbits.len()];
            for (i, o) in orbits.iter().enumerate() {
                let first = self.act_mod(g, o[0], d);
                for &c in &o[1..] {
                    let img = self.act_mod(g, c, d);
                    if label[img as usize] != label[first as usize] {
                        return ColorAction::Breaks { element: g, a: o[0], b: c };
                    }
                }
                images[i] = label[first as usize];
            }
            perms.push(ColorPermutation::from_images(images).expect("orbit images are a bijection"));
        }
        let group = GroupSummary::generate(orbits.len(), &perms).expect("small color group");
        ColorAction::Permutes { generator_perms: perms, group }
    }

    /// Index-`k` overgroups that permute the orbits of `a` transitively.
    pub fn enumerate_color_transitive_overgroups(
        &self,
        a: FoulserTriple,
        k: usize,
    ) -> Vec<OvergroupReport> {
        self.index_k_overgroups(a, k)
            .into_iter()
            .filter(|o| matches!(&o.action, ColorAction::Permutes { group, .. } if group.is_transitive))
            .collect()
    }

    /// Candidate stabilizers `A = Aut(Γ)_0 ≤ ΓL_1` of a k-colored
    /// color-transitive, arc-transitive coloring: `A` has `k` equal
    /// orbits, is the full setwise stabilizer of its orbits inside ΓL_1, and
    /// some index-`k` overgroup in ΓL_1 permutes its orbits transitively.
    pub fn enumerate_k_equal_orbit_subgroups(&self, k: usize) -> FoulserAnalysis {
        let mut survivors = Vec::new();
        let mut eliminated = Vec::new();
        for t in self.k_equal_orbit_triples(k) {
            let stab = self.orbit_stabilizer_order(t);
            if stab != self.subgroup_order(t) {
                eliminated.push(Elimination {
                    triple: t,
                    reason: EliminationReason::NotOrbitClosed { stabilizer_order: stab },
                });
                continue;
            }
            if self.enumerate_color_transitive_overgroups(t, k).is_empty() {
                eliminated.push(Elimination {
                    triple: t,
                    reason: EliminationReason::NoColorTransitiveOvergroup {
                        overgroups: self.index_k_overgroups(t, k),
                    },
                });
                continue;
            }
            survivors.push(t);
        }
        FoulserAnalysis {
            p: self.p as u32,
            r: self.r,
            k,
            survivors,
            eliminated,
        }
    }

    /// Action on nonzero field elements.
    pub fn apply(&self, field: &FieldTable, g: GammaElem, x: Elem) -> Elem {
        if x.is_zero() {
            return x;
        }
        let i = field.dlog(x).expect("nonzero") as u64;
        field.antilog(self.act(g, i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColorAction {
    /// Each generator maps orbits onto orbits.
    Permutes {
        generator_perms: Vec<ColorPermutation>,
        group: GroupSummary,
    },
    /// `element` sends the exponents `a` and `b`, which lie in one orbit,
    /// into different orbits.
    Breaks { element: GammaElem, a: u64, b: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OvergroupReport {
    pub triple: FoulserTriple,
    pub index: u64,
    pub action: ColorAction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EliminationReason {
    /// A strictly larger subgroup of ΓL_1 fixes the same orbits.
    NotOrbitClosed { stabilizer_order: u64 },
    /// No index-k overgroup permutes the orbits transitively.
    NoColorTransitiveOvergroup { overgroups: Vec<OvergroupReport> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub triple: FoulserTriple,
    pub reason: EliminationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoulserAnalysis {
    pub p: u32,
    pub r: u32,
    pub k: usize,
    pub survivors: Vec<FoulserTriple>,
    pub eliminated: Vec<Elimination>,
}

/// Permutation of colors induced by `g`, or a witness pair of same-colored
/// elements sent to different colors.
pub fn induced_color_perm(g: GammaElem, graph: &ColoredCayleyGraph) -> Result<ColorPermutation> {
    let field = graph.field();
    let gamma = GammaL1::of_field(field);
    let mut images: Vec<Option<(u32, Elem)>> = vec![None; graph.k()];
    for x in field.powers() {
        let c = graph.color(x).expect("nonzero");
        let y = gamma.apply(field, g, x);
        let cy = graph.color(y).expect("nonzero");
        match images[c as usize] {
            None => images[c as usize] = Some((cy, x)),
            Some((prev, witness)) if prev != cy => {
                return Err(Error::NotColorPermuting { a: witness.0, b: x.0 });
            }
            _ => {}
        }
    }
    ColorPermutation::from_images(images.into_iter().map(|c| c.expect("every color used").0).collect())
}

/// Matrix of `g` in the basis 1, x, ..., x^{r-1}: column `j` holds the
/// coordinates of `g(x^j)`.
pub fn embed_semilinear_as_matrix(g: GammaElem, field: &FieldTable) -> LinearMap {
    let gamma = GammaL1::of_field(field);
    let cols: Vec<u32> = (0..field.r())
        .map(|j| gamma.apply(field, g, Elem(field.p().pow(j))).0)
        .collect();
    LinearMap::from_column_vectors(field.p(), field.r() as usize, &cols)
}

/// Matrix of `g` with respect to an arbitrary F_p-basis of the field.
pub fn embed_semilinear_in_basis(
    g: GammaElem,
    field: &FieldTable,
    basis: &[Elem],
) -> Result<LinearMap> {
    let r = field.r() as usize;
    if basis.len() != r {
        return Err(Error::DimensionMismatch(format!("basis needs {r} vectors")));
    }
    let change = LinearMap::from_column_vectors(field.p(), r, &basis.iter().map(|b| b.0).collect::<Vec<_>>());
    let inv = change
        .inverse()
        .ok_or_else(|| Error::InvalidConfig("basis vectors are linearly dependent".into()))?;
    Ok(inv.compose(&embed_semilinear_as_matrix(g, field)).compose(&change))
}
