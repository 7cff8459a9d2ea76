//! Exhaustive search over `GL_r(p)` for matrices that induce a prescribed
//! permutation of colors.
//!
//! Column `j` of a candidate matrix is the image of the basis vector `e_j`,
//! so it must carry the color `target(color(e_j))`. Columns are chosen
//! depth first from those candidate lists; with pair-sum pruning, a column
//! is dropped as soon as its sum with an earlier column has the wrong
//! color. Every surviving full matrix is checked on all nonzero vectors.
//!
//! Counters are in leaf units: a pruned subtree counts the number of full
//! matrices below it, so an exhausted run always accounts for the whole
//! product of candidate list sizes.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::ColoredCayleyGraph;
use crate::linalg::LinearMap;
use crate::perm::ColorPermutation;

pub const DEFAULT_PROGRESS_INTERVAL: u64 = 10_000_000;

/// Largest leaf space [`stabilizer_count`] agrees to walk.
pub const MAX_COUNT_SPACE: u128 = 10_000_000_000;

/// Largest field the search tables are built for.
const MAX_SEARCH_ORDER: u32 = 1 << 22;

/// Matrices collected in counting mode.
const MAX_COLLECTED: usize = 1 << 16;

const NO_COLOR: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target: ColorPermutation,
    /// Pin the first column. When the target fixes the color of `e_1` the
    /// pin is `e_1` itself, otherwise the first vector (by discrete log) of
    /// the target color. Valid when color classes are orbits of a group of
    /// color-preserving linear maps.
    pub fix_first_column: bool,
    pub prune_pair_sums: bool,
    pub thread_count: usize,
    /// Leaves between progress lines on stderr; 0 disables them.
    pub progress_interval: u64,
    /// Keep going past the first witness and count them all.
    pub count_all: bool,
    /// Use the byte/XOR evaluator for GF(2^r), r <= 8.
    pub fast_gf2: bool,
}

impl SearchConfig {
    pub fn new(target: ColorPermutation) -> Self {
        SearchConfig {
            target,
            fix_first_column: true,
            prune_pair_sums: true,
            thread_count: default_threads(),
            progress_interval: DEFAULT_PROGRESS_INTERVAL,
            count_all: false,
            fast_gf2: false,
        }
    }

    pub fn threads(mut self, n: usize) -> Self {
        self.thread_count = n.max(1);
        self
    }

    pub fn pruning(mut self, on: bool) -> Self {
        self.prune_pair_sums = on;
        self
    }

    pub fn pin_first_column(mut self, on: bool) -> Self {
        self.fix_first_column = on;
        self
    }

    pub fn fast_gf2(mut self, on: bool) -> Self {
        self.fast_gf2 = on;
        self
    }

    pub fn counting(mut self, on: bool) -> Self {
        self.count_all = on;
        self
    }

    pub fn quiet(mut self) -> Self {
        self.progress_interval = 0;
        self
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    WitnessFound,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub graph: String,
    pub p: u32,
    pub r: u32,
    pub k: usize,
    pub outcome: Outcome,
    pub witness: Option<LinearMap>,
    pub witness_count: u64,
    pub column_sizes: Vec<usize>,
    /// Product of the candidate list sizes.
    pub leaf_space: u64,
    pub candidates_enumerated: u64,
    pub candidates_pruned: u64,
    pub wall_time_s: f64,
    pub fast_path: bool,
    pub config: SearchConfig,
}

impl SearchCertificate {
    pub fn is_exhausted(&self) -> bool {
        self.outcome == Outcome::Exhausted
    }

    /// Exhaustion is only meaningful if the counters cover the leaf space.
    pub fn covers_space(&self) -> bool {
        self.candidates_enumerated + self.candidates_pruned == self.leaf_space
    }
}

/// For each column, the vectors (in discrete-log order) it may hold.
pub fn column_candidates(
    graph: &ColoredCayleyGraph,
    target: &ColorPermutation,
    fix_first_column: bool,
) -> Result<Vec<Vec<u32>>> {
    check_target(graph, target)?;
    let field = graph.field();
    let p = field.p();
    let colors = graph.color_table();
    let mut lists = Vec::with_capacity(field.r() as usize);
    for j in 0..field.r() {
        let want = target.apply(colors[p.pow(j) as usize]);
        let list: Vec<u32> = field
            .antilog_table()
            .iter()
            .copied()
            .filter(|&v| colors[v as usize] == want)
            .collect();
        if list.is_empty() {
            return Err(Error::ImpossibleTarget { column: j as usize });
        }
        lists.push(list);
    }
    if fix_first_column {
        let e1_color = colors[1];
        let pin = if target.fixes(e1_color) { 1 } else { lists[0][0] };
        lists[0] = vec![pin];
    }
    Ok(lists)
}

fn check_target(graph: &ColoredCayleyGraph, target: &ColorPermutation) -> Result<()> {
    if target.degree() != graph.k() {
        return Err(Error::DimensionMismatch(format!(
            "target acts on {} colors, graph has {}",
            target.degree(),
            graph.k()
        )));
    }
    Ok(())
}

/// Vector arithmetic on encoded vectors of F_p^r.
struct Space<'a> {
    p: u32,
    r: usize,
    binary: bool,
    place: Vec<u32>,
    digits: Vec<u16>,
    colors: &'a [u32],
    target: Vec<u32>,
    order: &'a [u32],
    /// `target(color(e_i + e_j))`, row-major.
    pair_req: Vec<u32>,
}

impl<'a> Space<'a> {
    fn new(graph: &'a ColoredCayleyGraph, target: &ColorPermutation) -> Result<Self> {
        let field = graph.field();
        let (p, r, q) = (field.p(), field.r() as usize, field.q());
        if q > MAX_SEARCH_ORDER {
            return Err(Error::EnumerationTooLarge {
                size: q as u128,
                limit: MAX_SEARCH_ORDER as u128,
            });
        }
        let place: Vec<u32> = (0..r as u32).map(|i| p.pow(i)).collect();
        let mut digits = vec![0u16; q as usize * r];
        if p > 2 {
            for v in 0..q {
                let mut x = v;
                for i in 0..r {
                    digits[v as usize * r + i] = (x % p) as u16;
                    x /= p;
                }
            }
        }
        let colors = graph.color_table();
        let target_images = target.images().to_vec();
        let mut space = Space {
            p,
            r,
            binary: p == 2,
            place,
            digits,
            colors,
            target: target_images,
            order: field.antilog_table(),
            pair_req: vec![NO_COLOR; r * r],
        };
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    let s = space.add(space.place[i], space.place[j]);
                    space.pair_req[i * r + j] = space.target[colors[s as usize] as usize];
                }
            }
        }
        Ok(space)
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.binary {
            return a ^ b;
        }
        let r = self.r;
        let da = &self.digits[a as usize * r..a as usize * r + r];
        let db = &self.digits[b as usize * r..b as usize * r + r];
        let p = self.p;
        let mut out = 0;
        for i in 0..r {
            let s = da[i] as u32 + db[i] as u32;
            out += if s >= p { s - p } else { s } * self.place[i];
        }
        out
    }

    #[inline]
    fn digit(&self, v: u32, i: usize) -> u32 {
        if self.binary {
            (v >> i) & 1
        } else {
            self.digits[v as usize * self.r + i] as u32
        }
    }

    #[inline]
    fn color(&self, v: u32) -> u32 {
        self.colors[v as usize]
    }

    /// Multiples `0, c, 2c, ..., (p-1)c` of a column.
    fn multiples(&self, col: u32, out: &mut [u32]) {
        out[0] = 0;
        for c in 1..self.p as usize {
            out[c] = self.add(out[c - 1], col);
        }
    }

    /// Full check of a matrix given by its columns and their multiples.
    fn leaf_ok_generic(&self, mults: &[u32]) -> bool {
        let p = self.p as usize;
        for &v in self.order {
            let mut acc = 0;
            for i in 0..self.r {
                let c = self.digit(v, i) as usize;
                if c != 0 {
                    acc = self.add(acc, mults[i * p + c]);
                }
            }
            if self.color(acc) != self.target[self.color(v) as usize] {
                return false;
            }
        }
        true
    }

    /// Byte evaluator: the image of `v` is the XOR of the columns selected
    /// by the bits of `v`.
    fn leaf_ok_bytes(&self, cols: &[u32]) -> bool {
        let bytes: [u8; 8] = std::array::from_fn(|i| cols.get(i).copied().unwrap_or(0) as u8);
        for &v in self.order {
            let mut acc = 0u8;
            let mut bits = v as u8;
            while bits != 0 {
                acc ^= bytes[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            if self.color(acc as u32) != self.target[self.color(v) as usize] {
                return false;
            }
        }
        true
    }
}

#[derive(Default, Clone)]
struct ShardResult {
    enumerated: u64,
    pruned: u64,
    witnesses: Vec<Vec<u32>>,
    found: u64,
}

struct Walker<'s, 'a> {
    space: &'s Space<'a>,
    lists: &'s [Vec<u32>],
    suffix: &'s [u64],
    prune: bool,
    bytes: bool,
    count_all: bool,
    shard: usize,
    best: &'s AtomicUsize,
    progress: &'s Progress,
    cols: Vec<u32>,
    mults: Vec<u32>,
    out: ShardResult,
    unreported: u64,
}

impl Walker<'_, '_> {
    fn stopped(&self) -> bool {
        !self.count_all && self.best.load(Ordering::Relaxed) < self.shard
    }

    fn fits(&self, depth: usize, cand: u32) -> bool {
        let r = self.space.r;
        (0..depth).all(|j| {
            let s = self.space.add(self.cols[j], cand);
            self.space.color(s) == self.space.pair_req[j * r + depth]
        })
    }

    fn place(&mut self, depth: usize, cand: u32) {
        self.cols[depth] = cand;
        if !self.bytes {
            let p = self.space.p as usize;
            let mut buf = vec![0u32; p];
            self.space.multiples(cand, &mut buf);
            self.mults[depth * p..(depth + 1) * p].copy_from_slice(&buf);
        }
    }

    /// Returns false once the walk should stop.
    fn walk(&mut self, depth: usize) -> bool {
        if depth == self.space.r {
            self.out.enumerated += 1;
            self.unreported += 1;
            if self.unreported >= 4096 {
                self.progress.add(self.unreported);
                self.unreported = 0;
            }
            let ok = if self.bytes {
                self.space.leaf_ok_bytes(&self.cols)
            } else {
                self.space.leaf_ok_generic(&self.mults)
            };
            if ok {
                self.out.found += 1;
                if self.out.witnesses.len() < MAX_COLLECTED {
                    self.out.witnesses.push(self.cols.clone());
                }
                if !self.count_all {
                    self.best.fetch_min(self.shard, Ordering::Relaxed);
                    return false;
                }
            }
            return true;
        }
        let lists = self.lists;
        for &cand in &lists[depth] {
            if self.prune && !self.fits(depth, cand) {
                self.out.pruned += self.suffix[depth + 1];
                continue;
            }
            self.place(depth, cand);
            if !self.walk(depth + 1) || self.stopped() {
                return false;
            }
        }
        true
    }
}

struct Progress {
    label: String,
    interval: u64,
    done: AtomicU64,
}

impl Progress {
    fn add(&self, n: u64) {
        if self.interval == 0 {
            return;
        }
        let before = self.done.fetch_add(n, Ordering::Relaxed);
        if before / self.interval != (before + n) / self.interval {
            eprintln!("[{}] {} leaves checked", self.label, before + n);
        }
    }
}

fn product(sizes: impl Iterator<Item = usize>) -> Option<u64> {
    sizes.into_iter().try_fold(1u64, |acc, s| acc.checked_mul(s as u64))
}

fn run(graph: &ColoredCayleyGraph, config: &SearchConfig, bytes: bool) -> Result<SearchCertificate> {
    let start = Instant::now();
    let field = graph.field();
    let lists = column_candidates(graph, &config.target, config.fix_first_column)?;
    let space = Space::new(graph, &config.target)?;
    let r = space.r;
    let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
    let mut suffix = vec![1u64; r + 1];
    for d in (0..r).rev() {
        suffix[d] = product(sizes[d..].iter().copied()).ok_or(Error::EnumerationTooLarge {
            size: u128::MAX,
            limit: u64::MAX as u128,
        })?;
    }
    let leaf_space = suffix[0];

    // Shards are the admissible prefixes ending at the first free column.
    let shard_depth = if config.fix_first_column && r > 1 { 2 } else { 1 };
    let mut prefix_pruned = 0u64;
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    let mut probe = Walker {
        space: &space,
        lists: &lists,
        suffix: &suffix,
        prune: config.prune_pair_sums,
        bytes,
        count_all: true,
        shard: 0,
        best: &AtomicUsize::new(usize::MAX),
        progress: &Progress { label: String::new(), interval: 0, done: AtomicU64::new(0) },
        cols: vec![0; r],
        mults: vec![0; r * space.p as usize],
        out: ShardResult::default(),
        unreported: 0,
    };
    collect_prefixes(&mut probe, 0, shard_depth.min(r), &mut prefixes, &mut prefix_pruned);

    let best = AtomicUsize::new(usize::MAX);
    let progress = Progress {
        label: graph.label().to_string(),
        interval: config.progress_interval,
        done: AtomicU64::new(0),
    };
    let run_shard = |(i, prefix): (usize, &Vec<u32>)| -> ShardResult {
        let mut w = Walker {
            space: &space,
            lists: &lists,
            suffix: &suffix,
            prune: config.prune_pair_sums,
            bytes,
            count_all: config.count_all,
            shard: i,
            best: &best,
            progress: &progress,
            cols: vec![0; r],
            mults: vec![0; r * space.p as usize],
            out: ShardResult::default(),
            unreported: 0,
        };
        if w.stopped() {
            return w.out;
        }
        for (d, &c) in prefix.iter().enumerate() {
            w.place(d, c);
        }
        w.walk(prefix.len());
        w.progress.add(w.unreported);
        w.out
    };
    let results: Vec<ShardResult> = if config.thread_count <= 1 {
        prefixes.iter().enumerate().map(run_shard).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.thread_count)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| prefixes.par_iter().enumerate().map(run_shard).collect())
    };

    let mut enumerated = 0;
    let mut pruned = prefix_pruned;
    let mut found = 0;
    let mut witnesses: Vec<Vec<u32>> = Vec::new();
    for res in &results {
        enumerated += res.enumerated;
        pruned += res.pruned;
        found += res.found;
        witnesses.extend(res.witnesses.iter().cloned());
    }
    let p = field.p();
    let witness = witnesses.first().map(|cols| LinearMap::from_column_vectors(p, r, cols));
    Ok(SearchCertificate {
        graph: graph.label().to_string(),
        p,
        r: field.r(),
        k: graph.k(),
        outcome: if found > 0 { Outcome::WitnessFound } else { Outcome::Exhausted },
        witness,
        witness_count: found,
        column_sizes: sizes,
        leaf_space,
        candidates_enumerated: enumerated,
        candidates_pruned: pruned,
        wall_time_s: start.elapsed().as_secs_f64(),
        fast_path: bytes,
        config: config.clone(),
    })
}

fn collect_prefixes(
    w: &mut Walker,
    depth: usize,
    stop: usize,
    out: &mut Vec<Vec<u32>>,
    pruned: &mut u64,
) {
    if depth == stop {
        out.push(w.cols[..depth].to_vec());
        return;
    }
    let lists = w.lists;
    for &cand in &lists[depth] {
        if w.prune && !w.fits(depth, cand) {
            *pruned += w.suffix[depth + 1];
            continue;
        }
        w.place(depth, cand);
        collect_prefixes(w, depth + 1, stop, out, pruned);
    }
}

/// Generic search for any target permutation.
pub fn search(graph: &ColoredCayleyGraph, config: &SearchConfig) -> Result<SearchCertificate> {
    check_target(graph, &config.target)?;
    if config.fix_first_column && config.count_all {
        return Err(Error::InvalidConfig(
            "counting needs every first column; disable fix_first_column".into(),
        ));
    }
    if config.fast_gf2 {
        return gf2_fast_path(graph, config);
    }
    run(graph, config, false)
}

pub fn transposition_search(
    graph: &ColoredCayleyGraph,
    config: &SearchConfig,
) -> Result<SearchCertificate> {
    if !config.target.is_transposition() {
        return Err(Error::InvalidConfig(format!("{} is not a transposition", config.target)));
    }
    search(graph, config)
}

pub fn cyclic_search(graph: &ColoredCayleyGraph, config: &SearchConfig) -> Result<SearchCertificate> {
    let t = &config.target;
    if !(t.is_full_cycle() || t.degree() == 1) {
        return Err(Error::InvalidConfig(format!("{t} is not a cycle on all colors")));
    }
    search(graph, config)
}

pub fn gf2_fast_path(graph: &ColoredCayleyGraph, config: &SearchConfig) -> Result<SearchCertificate> {
    let f = graph.field();
    if !f.is_byte_field() {
        return Err(Error::NotBinaryField { p: f.p(), r: f.r() });
    }
    check_target(graph, &config.target)?;
    let mut cfg = config.clone();
    cfg.fast_gf2 = true;
    run(graph, &cfg, true)
}

/// Counts the invertible matrices inducing the identity on colors. The
/// certificate's `witness_count` is the count.
pub fn stabilizer_count(graph: &ColoredCayleyGraph, config: &SearchConfig) -> Result<SearchCertificate> {
    let mut cfg = config.clone();
    cfg.target = ColorPermutation::identity(graph.k());
    cfg.fix_first_column = false;
    cfg.count_all = true;
    let lists = column_candidates(graph, &cfg.target, false)?;
    let space: u128 = lists.iter().map(|l| l.len() as u128).product();
    if space > MAX_COUNT_SPACE {
        return Err(Error::EnumerationTooLarge { size: space, limit: MAX_COUNT_SPACE });
    }
    search(graph, &cfg)
}

/// All matrices inducing `target`, sorted.
pub fn all_witnesses(graph: &ColoredCayleyGraph, target: &ColorPermutation) -> Result<Vec<LinearMap>> {
    let cfg = SearchConfig::new(target.clone())
        .pin_first_column(false)
        .counting(true)
        .threads(1)
        .quiet();
    let lists = column_candidates(graph, target, false)?;
    let space: u128 = lists.iter().map(|l| l.len() as u128).product();
    if space > MAX_COUNT_SPACE {
        return Err(Error::EnumerationTooLarge { size: space, limit: MAX_COUNT_SPACE });
    }
    let field = graph.field();
    let space = Space::new(graph, target)?;
    let r = space.r;
    let mut suffix = vec![1u64; r + 1];
    for d in (0..r).rev() {
        suffix[d] = suffix[d + 1] * lists[d].len() as u64;
    }
    let best = AtomicUsize::new(usize::MAX);
    let progress = Progress { label: String::new(), interval: 0, done: AtomicU64::new(0) };
    let mut w = Walker {
        space: &space,
        lists: &lists,
        suffix: &suffix,
        prune: cfg.prune_pair_sums,
        bytes: false,
        count_all: true,
        shard: 0,
        best: &best,
        progress: &progress,
        cols: vec![0; r],
        mults: vec![0; r * space.p as usize],
        out: ShardResult::default(),
        unreported: 0,
    };
    w.walk(0);
    if w.out.found as usize > MAX_COLLECTED {
        return Err(Error::EnumerationTooLarge {
            size: w.out.found as u128,
            limit: MAX_COLLECTED as u128,
        });
    }
    let mut out: Vec<LinearMap> = w
        .out
        .witnesses
        .iter()
        .map(|c| LinearMap::from_column_vectors(field.p(), r, c))
        .collect();
    out.sort();
    Ok(out)
}
