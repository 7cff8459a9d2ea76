//! Checks of the defining properties of a totally symmetric coloring:
//! arc-transitivity through a vertex stabilizer, color permutations induced
//! by linear maps, and monochromatic lines.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::graphs::ColoredCayleyGraph;
use crate::linalg::{gl_order, LinearMap};
use crate::perm::{ColorPermutation, GroupSummary};
use crate::search;
use crate::semilinear::{FoulserTriple, GammaElem, GammaL1};

/// Largest `|GL_r(p)|` for which [`linear_stabilizer`] runs.
pub const MAX_STABILIZER_GL: u128 = 10_000_000;

/// A group fixing 0, given by generators of one of three kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Stabilizer {
    Foulser(FoulserTriple),
    Semilinear(Vec<GammaElem>),
    Matrices(Vec<LinearMap>),
}

impl Stabilizer {
    /// Orbits on nonzero elements as a label per element encoding.
    fn orbit_labels(&self, graph: &ColoredCayleyGraph) -> Result<Vec<u32>> {
        let field = graph.field();
        let q = field.q() as usize;
        let gamma = GammaL1::of_field(field);
        let step: Box<dyn Fn(usize, Elem) -> Elem + '_> = match self {
            Stabilizer::Foulser(t) => {
                gamma.validate(*t)?;
                let gens = gamma.generators(*t);
                Box::new(move |i, x| gamma.apply(field, gens[i], x))
            }
            Stabilizer::Semilinear(gens) => {
                let gens = gens.clone();
                let gamma = gamma.clone();
                Box::new(move |i, x| gamma.apply(field, gens[i], x))
            }
            Stabilizer::Matrices(ms) => {
                for (i, m) in ms.iter().enumerate() {
                    m.check_field(field)?;
                    if !m.is_invertible() {
                        return Err(Error::SingularGenerator(i));
                    }
                }
                Box::new(move |i, x| ms[i].apply(x))
            }
        };
        let ngens = match self {
            Stabilizer::Foulser(_) => 2,
            Stabilizer::Semilinear(g) => g.len(),
            Stabilizer::Matrices(m) => m.len(),
        };
        let mut label = vec![u32::MAX; q];
        let mut next = 0;
        for start in field.powers() {
            if label[start.0 as usize] != u32::MAX {
                continue;
            }
            label[start.0 as usize] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for i in 0..ngens {
                    let y = step(i, x);
                    if label[y.0 as usize] == u32::MAX {
                        label[y.0 as usize] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        Ok(label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcReport {
    pub arc_transitive: bool,
    pub orbit_count: usize,
    pub color_count: usize,
    /// Two elements of one orbit with different colors, if any.
    pub split_orbit: Option<(u32, u32)>,
}

/// True iff the stabilizer's orbits on nonzero elements are exactly the
/// color classes. Translations are implicit, so this certifies that the
/// automorphisms are transitive on the arcs of each color.
pub fn verify_arc_transitive(graph: &ColoredCayleyGraph, stab: &Stabilizer) -> Result<ArcReport> {
    let labels = stab.orbit_labels(graph)?;
    let field = graph.field();
    let orbit_count = field.powers().map(|x| labels[x.0 as usize]).max().map_or(0, |m| m as usize + 1);
    let mut orbit_color = vec![u32::MAX; orbit_count];
    let mut orbit_rep = vec![0u32; orbit_count];
    let mut split = None;
    for x in field.powers() {
        let o = labels[x.0 as usize] as usize;
        let c = graph.color(x).expect("nonzero");
        if orbit_color[o] == u32::MAX {
            orbit_color[o] = c;
            orbit_rep[o] = x.0;
        } else if orbit_color[o] != c && split.is_none() {
            split = Some((orbit_rep[o], x.0));
        }
    }
    Ok(ArcReport {
        arc_transitive: split.is_none() && orbit_count == graph.k(),
        orbit_count,
        color_count: graph.k(),
        split_orbit: split,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineReport {
    pub monochromatic: bool,
    /// A spanning vector of the first line carrying two colors.
    pub violating_line: Option<u32>,
}

/// Whether every one-dimensional F_p-subspace carries a single color.
pub fn lines_monochromatic(graph: &ColoredCayleyGraph) -> LineReport {
    let field = graph.field();
    let p = field.p();
    for v in field.powers() {
        let c = graph.color(v);
        if (2..p).any(|a| graph.color(field.scale(a, v)) != c) {
            return LineReport { monochromatic: false, violating_line: Some(v.0) };
        }
    }
    LineReport { monochromatic: true, violating_line: None }
}

/// The color permutation induced by `m`, or two same-colored vectors whose
/// images differ in color.
pub fn induced_color_perm_matrix(m: &LinearMap, graph: &ColoredCayleyGraph) -> Result<ColorPermutation> {
    let field = graph.field();
    m.check_field(field)?;
    if !m.is_invertible() {
        return Err(Error::SingularGenerator(0));
    }
    let mut images: Vec<Option<(u32, u32)>> = vec![None; graph.k()];
    for v in field.powers() {
        let c = graph.color(v).expect("nonzero") as usize;
        let cy = graph.color(m.apply(v)).expect("invertible");
        match images[c] {
            None => images[c] = Some((cy, v.0)),
            Some((prev, w)) if prev != cy => return Err(Error::NotColorPermuting { a: w, b: v.0 }),
            _ => {}
        }
    }
    ColorPermutation::from_images(images.into_iter().map(|i| i.expect("surjective coloring").0).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: LinearMap,
    pub permutation: ColorPermutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSet {
    pub witnesses: Vec<Witness>,
    pub group: GroupSummary,
}

pub fn color_symmetry_group(graph: &ColoredCayleyGraph, maps: &[LinearMap]) -> Result<WitnessSet> {
    let witnesses = maps
        .iter()
        .map(|m| {
            Ok(Witness { matrix: m.clone(), permutation: induced_color_perm_matrix(m, graph)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let perms: Vec<ColorPermutation> = witnesses.iter().map(|w| w.permutation.clone()).collect();
    let group = GroupSummary::generate(graph.k(), &perms)?;
    Ok(WitnessSet { witnesses, group })
}

/// Every matrix of `GL_r(p)` inducing the identity on colors, sorted.
pub fn linear_stabilizer(graph: &ColoredCayleyGraph) -> Result<Vec<LinearMap>> {
    let field = graph.field();
    let size = gl_order(field.p(), field.r() as usize);
    if size > MAX_STABILIZER_GL {
        return Err(Error::EnumerationTooLarge { size, limit: MAX_STABILIZER_GL });
    }
    search::all_witnesses(graph, &ColorPermutation::identity(graph.k()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TscVerdict {
    TotallySymmetric,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TscReport {
    pub graph: String,
    pub arc: ArcReport,
    pub witnesses: WitnessSet,
    pub color_group_order: u64,
    pub is_symmetric: bool,
    pub verdict: TscVerdict,
}

pub fn verify_tsc(
    graph: &ColoredCayleyGraph,
    stab: &Stabilizer,
    maps: &[LinearMap],
) -> Result<TscReport> {
    let arc = verify_arc_transitive(graph, stab)?;
    let witnesses = color_symmetry_group(graph, maps)?;
    let is_symmetric = witnesses.group.is_symmetric;
    let verdict = if arc.arc_transitive && is_symmetric {
        TscVerdict::TotallySymmetric
    } else {
        TscVerdict::Unresolved
    };
    Ok(TscReport {
        graph: graph.label().to_string(),
        color_group_order: witnesses.group.order,
        is_symmetric,
        arc,
        witnesses,
        verdict,
    })
}

/// Generators of the symmetric group on `0..k`: the transposition `(1 2)`
/// (or `(0 1)` when k = 2) and the full cycle.
pub fn symmetric_generators(k: usize) -> Vec<ColorPermutation> {
    match k {
        0 | 1 => Vec::new(),
        2 => vec![ColorPermutation::transposition(2, 0, 1).expect("valid")],
        _ => {
            let cycle: Vec<u32> = (0..k as u32).collect();
            vec![
                ColorPermutation::transposition(k, 1, 2).expect("valid"),
                ColorPermutation::from_cycles(k, &[&cycle]).expect("valid"),
            ]
        }
    }
}

/// Searches for matrices inducing each generator of `S_k` and bundles them
/// into a report. Missing witnesses leave the verdict unresolved.
pub fn find_symmetric_witnesses(
    graph: &ColoredCayleyGraph,
    config: &search::SearchConfig,
) -> Result<(Vec<LinearMap>, Vec<search::SearchCertificate>)> {
    let mut maps = Vec::new();
    let mut certs = Vec::new();
    for target in symmetric_generators(graph.k()) {
        let mut cfg = config.clone();
        cfg.target = target;
        cfg.count_all = false;
        let cert = search::search(graph, &cfg)?;
        if let Some(w) = &cert.witness {
            maps.push(w.clone());
        }
        certs.push(cert);
    }
    Ok((maps, certs))
}
