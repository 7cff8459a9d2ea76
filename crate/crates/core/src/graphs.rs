//! Translation-invariant colorings of complete graphs on a finite field.
//!
//! A [`ColoredCayleyGraph`] colors the edge `{u, v}` by the color of the
//! difference `u - v`, so the whole graph is a color table on the nonzero
//! field elements. Every family here (generalized Paley, Paley, Peisert,
//! direction graphs, partition graphs, orbital graphs) is built into that
//! one representation.

use std::collections::{HashMap, VecDeque};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{build_field, build_field_with_root, Elem, FieldTable};
use crate::linalg::LinearMap;

const NO_COLOR: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredCayleyGraph {
    field: Arc<FieldTable>,
    k: usize,
    /// Indexed by element encoding; entry 0 is unused.
    colors: Vec<u32>,
    label: String,
}

pub(crate) fn power_label(p: u32, r: u32) -> String {
    if r == 1 {
        p.to_string()
    } else {
        format!("{p}^{r}")
    }
}

impl ColoredCayleyGraph {
    /// Validates that the table is a surjective, negation-symmetric coloring.
    pub fn from_element_colors(
        field: Arc<FieldTable>,
        k: usize,
        mut colors: Vec<u32>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if colors.len() != field.q() as usize {
            return Err(Error::DimensionMismatch(format!(
                "color table has {} entries for a field of {} elements",
                colors.len(),
                field.q()
            )));
        }
        colors[0] = NO_COLOR;
        let mut seen = vec![false; k];
        for x in field.nonzero() {
            let c = colors[x.0 as usize];
            if c as usize >= k {
                return Err(Error::InvalidConfig(format!("color {c} of {x:?} is not below k = {k}")));
            }
            seen[c as usize] = true;
            if colors[field.neg(x).0 as usize] != c {
                return Err(Error::NotEdgeWellDefined(format!(
                    "x = {:?} and -x have different colors",
                    field.coeffs(x)
                )));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidConfig(format!("color {missing} is never used")));
        }
        Ok(ColoredCayleyGraph { field, k, colors, label: label.into() })
    }

    /// `colors[j]` is the color of `omega^j`.
    pub fn from_exponent_colors(
        field: Arc<FieldTable>,
        k: usize,
        by_exponent: &[u32],
        label: impl Into<String>,
    ) -> Result<Self> {
        if by_exponent.len() != field.order() as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {} exponent colors, got {}",
                field.order(),
                by_exponent.len()
            )));
        }
        let mut colors = vec![NO_COLOR; field.q() as usize];
        for (j, &c) in by_exponent.iter().enumerate() {
            colors[field.antilog(j as u64).0 as usize] = c;
        }
        Self::from_element_colors(field, k, colors, label)
    }

    /// Colors given by a partition of the exponents `0..q-1`; block `i`
    /// becomes color `i`.
    pub fn from_exponent_blocks(
        field: Arc<FieldTable>,
        blocks: &[Vec<u64>],
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut by_exp = vec![NO_COLOR; field.order() as usize];
        for (c, block) in blocks.iter().enumerate() {
            for &i in block {
                by_exp[i as usize] = c as u32;
            }
        }
        if by_exp.contains(&NO_COLOR) {
            return Err(Error::InvalidConfig("blocks do not cover every exponent".into()));
        }
        Self::from_exponent_colors(field, blocks.len(), &by_exp, label)
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.field.q() as usize
    }

    /// Color of the edge `(0, x)`; `None` for `x = 0`.
    pub fn color(&self, x: Elem) -> Option<u32> {
        match self.colors[x.0 as usize] {
            NO_COLOR => None,
            c => Some(c),
        }
    }

    /// Color of the edge `{u, v}`, `u != v`.
    pub fn edge_color(&self, u: Elem, v: Elem) -> Option<u32> {
        self.color(self.field.sub(u, v))
    }

    /// Raw table indexed by element encoding, `u32::MAX` at zero.
    pub fn color_table(&self) -> &[u32] {
        &self.colors
    }

    pub fn colors_by_exponent(&self) -> Vec<u32> {
        self.field.powers().map(|x| self.colors[x.0 as usize]).collect()
    }

    pub fn color_class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for x in self.field.nonzero() {
            sizes[self.colors[x.0 as usize] as usize] += 1;
        }
        sizes
    }

    /// Nonzero elements of each color, in increasing discrete-log order.
    pub fn color_classes(&self) -> Vec<Vec<Elem>> {
        let mut classes = vec![Vec::new(); self.k];
        for x in self.field.powers() {
            classes[self.colors[x.0 as usize] as usize].push(x);
        }
        classes
    }

    pub fn to_file(&self) -> GraphFile {
        let rec = self.field.record();
        GraphFile {
            label: self.label.clone(),
            p: rec.p,
            r: rec.r,
            k: self.k,
            colors: self.colors_by_exponent(),
            poly: Some(rec.poly),
            omega: Some(rec.omega),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        let field = match (&file.poly, &file.omega) {
            (poly, Some(omega)) => build_field_with_root(file.p, file.r, poly.as_deref(), omega)?,
            (poly, None) => build_field(file.p, file.r, poly.as_deref())?,
        };
        Self::from_exponent_colors(Arc::new(field), file.k, &file.colors, file.label.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk graph: `colors[j]` is the color of `omega^j`. `poly` and
/// `omega` pin the field realization; when absent the default modulus and
/// primitive root are used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub label: String,
    pub p: u32,
    pub r: u32,
    pub k: usize,
    pub colors: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<u32>>,
}

/// Generalized Paley graph: `omega^j` gets color `j mod k`.
pub fn gp_k(field: Arc<FieldTable>, k: usize) -> Result<ColoredCayleyGraph> {
    let n = field.order() as usize;
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotEdgeWellDefined(format!("{k} does not divide q - 1 = {n}")));
    }
    if field.p() != 2 && !(n / k).is_multiple_of(2) {
        return Err(Error::NotEdgeWellDefined(format!(
            "(q - 1)/k = {} is odd in odd characteristic, so -1 leaves the class of 1",
            n / k
        )));
    }
    let by_exp: Vec<u32> = (0..n).map(|j| (j % k) as u32).collect();
    let label = format!("GP_{k}({})", power_label(field.p(), field.r()));
    ColoredCayleyGraph::from_exponent_colors(field, k, &by_exp, label)
}

/// Paley graph: color 0 on squares, color 1 on non-squares.
pub fn paley(field: Arc<FieldTable>) -> Result<ColoredCayleyGraph> {
    if field.q() % 4 != 1 {
        return Err(Error::NotEdgeWellDefined(format!("q = {} is not 1 mod 4", field.q())));
    }
    let by_exp: Vec<u32> = (0..field.order()).map(|j| j % 2).collect();
    let label = format!("PG({})", power_label(field.p(), field.r()));
    ColoredCayleyGraph::from_exponent_colors(field, 2, &by_exp, label)
}

/// Peisert graph: color 0 on `omega^j` with `j = 0, 1 mod 4`.
pub fn peisert(field: Arc<FieldTable>) -> Result<ColoredCayleyGraph> {
    if field.p() % 4 != 3 || !field.r().is_multiple_of(2) {
        return Err(Error::NotEdgeWellDefined(format!(
            "Peisert graphs need p = 3 mod 4 and r even, got {}^{}",
            field.p(),
            field.r()
        )));
    }
    let by_exp: Vec<u32> = (0..field.order()).map(|j| u32::from(j % 4 >= 2)).collect();
    let label = format!("PG*({})", power_label(field.p(), field.r()));
    ColoredCayleyGraph::from_exponent_colors(field, 2, &by_exp, label)
}

/// F_q^d realized inside GF(q^d): coordinate `j` of a vector is the `j`-th
/// base-q digit of the element encoding.
#[derive(Debug, Clone)]
pub struct DirectionSpace {
    base: Arc<FieldTable>,
    d: usize,
    ambient: Arc<FieldTable>,
}

impl DirectionSpace {
    pub fn new(base: Arc<FieldTable>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfig("direction graphs need d > 1".into()));
        }
        let ambient = build_field(base.p(), base.r() * d as u32, None)?;
        Self::with_ambient(base, d, Arc::new(ambient))
    }

    pub fn with_ambient(base: Arc<FieldTable>, d: usize, ambient: Arc<FieldTable>) -> Result<Self> {
        if ambient.p() != base.p() || ambient.r() != base.r() * d as u32 {
            return Err(Error::DimensionMismatch(format!(
                "GF({}^{}) is not a {d}-dimensional space over GF({}^{})",
                ambient.p(),
                ambient.r(),
                base.p(),
                base.r()
            )));
        }
        Ok(DirectionSpace { base, d, ambient })
    }

    pub fn base(&self) -> &Arc<FieldTable> {
        &self.base
    }

    pub fn ambient(&self) -> &Arc<FieldTable> {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn split(&self, v: Elem) -> Vec<Elem> {
        let q = self.base.q();
        let mut x = v.0;
        (0..self.d)
            .map(|_| {
                let c = x % q;
                x /= q;
                Elem(c)
            })
            .collect()
    }

    pub fn join(&self, coords: &[Elem]) -> Elem {
        let q = self.base.q();
        Elem(coords.iter().rev().fold(0, |acc, c| acc * q + c.0))
    }

    /// Projective representative: the last nonzero coordinate scaled to 1.
    pub fn canonical(&self, coords: &[Elem]) -> Option<Vec<Elem>> {
        let last = coords.iter().rposition(|c| !c.is_zero())?;
        let inv = self.base.inv(coords[last]).ok()?;
        Some(coords.iter().map(|&c| self.base.mul(c, inv)).collect())
    }

    pub fn direction_of(&self, v: Elem) -> Option<Vec<Elem>> {
        self.canonical(&self.split(v))
    }

    /// All `(q^d - 1)/(q - 1)` canonical directions, ordered by the position
    /// of the last nonzero coordinate and then by coordinates.
    pub fn directions(&self) -> Vec<Vec<Elem>> {
        let mut dirs: Vec<Vec<Elem>> = self
            .ambient
            .nonzero()
            .map(|v| self.split(v))
            .filter(|c| c.iter().rev().find(|x| !x.is_zero()) == Some(&Elem::ONE))
            .collect();
        dirs.sort_by_key(|c| (c.iter().rposition(|x| !x.is_zero()), c.clone()));
        dirs
    }

    fn graph_from_direction_colors(
        &self,
        color_of: &HashMap<Vec<Elem>, u32>,
        k: usize,
        label: String,
    ) -> Result<ColoredCayleyGraph> {
        let mut colors = vec![NO_COLOR; self.ambient.q() as usize];
        for v in self.ambient.nonzero() {
            let dir = self.direction_of(v).expect("nonzero vector has a direction");
            colors[v.0 as usize] = color_of[&dir];
        }
        ColoredCayleyGraph::from_element_colors(self.ambient.clone(), k, colors, label)
    }
}

/// `F_k(q^d)`: one color per direction of F_q^d.
pub fn direction_graph(base: Arc<FieldTable>, d: usize) -> Result<ColoredCayleyGraph> {
    direction_graph_in(&DirectionSpace::new(base, d)?)
}

pub fn direction_graph_in(space: &DirectionSpace) -> Result<ColoredCayleyGraph> {
    let dirs = space.directions();
    let k = dirs.len();
    let color_of: HashMap<Vec<Elem>, u32> =
        dirs.into_iter().enumerate().map(|(i, d)| (d, i as u32)).collect();
    let b = space.base();
    let label = format!("F_{k}({}^{})", power_label(b.p(), b.r()), space.dim());
    space.graph_from_direction_colors(&color_of, k, label)
}

/// Equal-size blocks of directions; vectors are given by their coordinate
/// encodings in the base field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionPartition {
    pub d: usize,
    pub blocks: Vec<Vec<Vec<u32>>>,
}

impl DirectionPartition {
    /// The three color classes of lines of F_5^2 defining G_3(5^2): the
    /// pairing of (1,1) with (4,1), whose linear stabilizer has order 16.
    pub fn g3_25() -> Self {
        DirectionPartition {
            d: 2,
            blocks: vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![1, 1], vec![4, 1]],
                vec![vec![2, 1], vec![3, 1]],
            ],
        }
    }

    /// The other two pairings of the lines of F_5^2 that keep (1,0) and
    /// (0,1) together: (1,1) with (2,1), and (1,1) with (3,1). Both give
    /// graphs isomorphic to GP_3(5^2).
    pub fn g3_25_alternatives() -> [Self; 2] {
        let with = |a: u32, b: u32, c: u32| DirectionPartition {
            d: 2,
            blocks: vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![1, 1], vec![a, 1]],
                vec![vec![b, 1], vec![c, 1]],
            ],
        };
        [with(2, 3, 4), with(3, 2, 4)]
    }

    /// The three color classes of lines of F_11^2 defining G_3(11^2).
    pub fn g3_121() -> Self {
        DirectionPartition {
            d: 2,
            blocks: vec![
                vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![10, 1]],
                vec![vec![2, 1], vec![3, 1], vec![5, 1], vec![7, 1]],
                vec![vec![4, 1], vec![6, 1], vec![8, 1], vec![9, 1]],
            ],
        }
    }
}

pub fn partition_direction_graph(
    base: Arc<FieldTable>,
    partition: &DirectionPartition,
) -> Result<ColoredCayleyGraph> {
    partition_direction_graph_in(&DirectionSpace::new(base, partition.d)?, partition)
}

pub fn partition_direction_graph_in(
    space: &DirectionSpace,
    partition: &DirectionPartition,
) -> Result<ColoredCayleyGraph> {
    if partition.d != space.dim() {
        return Err(Error::BadPartition(format!(
            "partition of dimension {} in a space of dimension {}",
            partition.d,
            space.dim()
        )));
    }
    let q = space.base().q();
    let mut color_of = HashMap::new();
    for (c, block) in partition.blocks.iter().enumerate() {
        for v in block {
            if v.len() != partition.d || v.iter().any(|&x| x >= q) {
                return Err(Error::BadPartition(format!("{v:?} is not a vector of F_q^d")));
            }
            let coords: Vec<Elem> = v.iter().map(|&x| Elem(x)).collect();
            let dir = space
                .canonical(&coords)
                .ok_or_else(|| Error::BadPartition("zero vector has no direction".into()))?;
            if color_of.insert(dir, c as u32).is_some() {
                return Err(Error::BadPartition(format!("direction of {v:?} listed twice")));
            }
        }
    }
    let total = space.directions().len();
    if color_of.len() != total {
        return Err(Error::BadPartition(format!(
            "blocks cover {} of {total} directions",
            color_of.len()
        )));
    }
    let size = partition.blocks.first().map_or(0, Vec::len);
    if partition.blocks.iter().any(|b| b.len() != size) {
        return Err(Error::BadPartition("blocks have different sizes".into()));
    }
    let k = partition.blocks.len();
    let b = space.base();
    let label = format!("G_{k}({}^{})", power_label(b.p(), b.r()), space.dim());
    space.graph_from_direction_colors(&color_of, k, label)
}

/// Colors are the orbits on nonzero vectors of the group generated by the
/// given linear maps (translations are implicit). Orbits are numbered by
/// their smallest discrete logarithm.
pub fn orbital_graph(
    field: Arc<FieldTable>,
    generators: &[LinearMap],
    label: impl Into<String>,
) -> Result<ColoredCayleyGraph> {
    for (i, g) in generators.iter().enumerate() {
        g.check_field(&field)?;
        if !g.is_invertible() {
            return Err(Error::SingularGenerator(i));
        }
    }
    let tables: Vec<Vec<u32>> = generators
        .iter()
        .map(|g| field.elements().map(|x| g.apply_index(x.0)).collect())
        .collect();
    let mut colors = vec![NO_COLOR; field.q() as usize];
    let mut k = 0u32;
    for start in field.powers() {
        if colors[start.0 as usize] != NO_COLOR {
            continue;
        }
        colors[start.0 as usize] = k;
        let mut queue = VecDeque::from([start.0]);
        while let Some(x) = queue.pop_front() {
            for t in &tables {
                let y = t[x as usize];
                if colors[y as usize] == NO_COLOR {
                    colors[y as usize] = k;
                    queue.push_back(y);
                }
            }
        }
        k += 1;
    }
    ColoredCayleyGraph::from_element_colors(field, k as usize, colors, label)
}

/// Recolors through `map: old color -> new color`, which must be onto `0..k'`.
pub fn merge_colors(graph: &ColoredCayleyGraph, map: &[u32]) -> Result<ColoredCayleyGraph> {
    if map.len() != graph.k() {
        return Err(Error::BadRecoloring(map.len()));
    }
    let k_new = map.iter().max().map_or(0, |&m| m as usize + 1);
    let mut hit = vec![false; k_new];
    for &m in map {
        hit[m as usize] = true;
    }
    if hit.iter().any(|h| !h) {
        return Err(Error::BadRecoloring(k_new));
    }
    let colors: Vec<u32> = graph
        .color_table()
        .iter()
        .map(|&c| if c == NO_COLOR { NO_COLOR } else { map[c as usize] })
        .collect();
    ColoredCayleyGraph::from_element_colors(
        graph.field().clone(),
        k_new,
        colors,
        format!("{} merged {map:?}", graph.label()),
    )
}

pub fn color_class_sizes(graph: &ColoredCayleyGraph) -> Vec<usize> {
    graph.color_class_sizes()
}
