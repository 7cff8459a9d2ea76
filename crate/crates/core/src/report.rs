//! Run manifests, the certificate cache, the line table of `G_3(11^2)`, and
//! the classification replay that runs every module on the parameter cases
//! of the classification.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{build_field, build_field_with_root, Elem, FieldTable};
use crate::graphs::{
    gp_k, merge_colors, partition_direction_graph_in, power_label, ColoredCayleyGraph,
    DirectionPartition, DirectionSpace,
};
use crate::iso::{iso_colored, IsoOutcome};
use crate::linalg::LinearMap;
use crate::perm::ColorPermutation;
use crate::search::{self, SearchCertificate, SearchConfig};
use crate::semilinear::{EliminationReason, FoulserAnalysis, FoulserTriple, GammaL1};
use crate::symmetry::{
    self, verify_arc_transitive, verify_tsc, ArcReport, LineReport, Stabilizer, TscVerdict,
    WitnessSet,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "TSC_CACHE_DIR";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Provenance of one invocation. Timestamps live here and nowhere else, so
/// the payload it accompanies stays byte-reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: String,
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub started_at: u64,
    pub finished_at: Option<u64>,
}

impl RunManifest {
    pub fn start(command: Vec<String>) -> Self {
        RunManifest {
            command,
            tool_version: TOOL_VERSION.to_string(),
            input_hashes: BTreeMap::new(),
            outputs: Vec::new(),
            started_at: unix_now(),
            finished_at: None,
        }
    }

    pub fn add_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.input_hashes.insert(name.into(), sha256_hex(bytes));
    }

    pub fn add_output(&mut self, path: impl Into<String>) {
        self.outputs.push(path.into());
    }

    pub fn finish(&mut self) {
        self.finished_at = Some(unix_now());
    }
}

/// A result together with the manifest of the run that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub manifest: RunManifest,
    pub result: T,
}

/// Search certificates on disk, keyed by SHA-256 of the graph file and the
/// outcome-relevant part of the configuration.
#[derive(Debug, Clone)]
pub struct CertificateCache {
    dir: PathBuf,
}

impl CertificateCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CertificateCache { dir: dir.into() }
    }

    /// The directory named by `TSC_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(graph: &ColoredCayleyGraph, config: &SearchConfig) -> Result<String> {
        let mut cfg = config.clone();
        // thread count and progress output never change the outcome
        cfg.thread_count = 0;
        cfg.progress_interval = 0;
        let mut bytes = graph.to_json()?.into_bytes();
        bytes.push(0);
        bytes.extend(serde_json::to_vec(&cfg)?);
        Ok(sha256_hex(&bytes))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<SearchCertificate>> {
        match fs::read(self.path(key)) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn put(&self, key: &str, cert: &SearchCertificate) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(cert)?)?;
        fs::rename(tmp, self.path(key))?;
        Ok(())
    }
}

/// Runs `search::search`, or returns the stored certificate. The flag is
/// true on a cache hit.
pub fn cached_search(
    cache: Option<&CertificateCache>,
    graph: &ColoredCayleyGraph,
    config: &SearchConfig,
) -> Result<(SearchCertificate, bool)> {
    let Some(cache) = cache else {
        return Ok((search::search(graph, config)?, false));
    };
    let key = CertificateCache::key(graph, config)?;
    if let Some(cert) = cache.get(&key)? {
        return Ok((cert, true));
    }
    let cert = search::search(graph, config)?;
    cache.put(&key, &cert)?;
    Ok((cert, false))
}

/// One row of the line table: `ω^i`, the canonical vector on its line,
/// and the line's color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRow {
    pub i: u64,
    pub vector: Vec<u32>,
    pub color: u32,
}

/// For `i` below the number of lines, the line through `ω^i`.
pub fn line_table(space: &DirectionSpace, graph: &ColoredCayleyGraph) -> Vec<LineRow> {
    let amb = space.ambient();
    let lines = space.directions().len() as u64;
    (0..lines)
        .map(|i| {
            let x = amb.antilog(i);
            let dir = space.direction_of(x).expect("nonzero");
            LineRow {
                i,
                vector: dir.iter().map(|e| e.0).collect(),
                color: graph.color(x).expect("nonzero"),
            }
        })
        .collect()
}

/// `GF(11^2)` as `F_11[x]/(x^2 + 1)` with primitive root `6 + 2x`.
pub fn field_121() -> Result<FieldTable> {
    build_field_with_root(11, 2, Some(&[1, 0, 1]), &[6, 2])
}

/// `GF(5^2)` as `F_5[x]/(x^2 + 2)` with primitive root `1 + x`.
pub fn field_25() -> Result<FieldTable> {
    build_field_with_root(5, 2, Some(&[2, 0, 1]), &[1, 1])
}

pub fn g3_121_space() -> Result<DirectionSpace> {
    DirectionSpace::with_ambient(Arc::new(build_field(11, 1, None)?), 2, Arc::new(field_121()?))
}

pub fn g3_25_space() -> Result<DirectionSpace> {
    DirectionSpace::with_ambient(Arc::new(build_field(5, 1, None)?), 2, Arc::new(field_25()?))
}

/// The field each classification case is worked in.
pub fn case_field(p: u32, r: u32) -> Result<FieldTable> {
    match (p, r) {
        (7, 4) => build_field(7, 4, Some(&[3, 0, 1, 1, 1])),
        (2, 8) => build_field(2, 8, Some(&[1, 1, 0, 1, 1, 0, 0, 0, 1])),
        (11, 2) => field_121(),
        (5, 2) => field_25(),
        _ => build_field(p, r, None),
    }
}

pub const CLASSIFICATION_CASES: [(u32, u32, usize); 11] = [
    (3, 4, 4),
    (7, 4, 5),
    (3, 4, 5),
    (2, 8, 5),
    (2, 4, 3),
    (2, 6, 3),
    (17, 2, 3),
    (23, 2, 3),
    (89, 2, 3),
    (5, 2, 3),
    (11, 2, 3),
];

/// Cases excluded unless long runs are requested.
pub const LONG_CASES: [(u32, u32, usize); 1] = [(2, 8, 5)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Tsc,
    NotTsc,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoRecord {
    pub other: String,
    pub permute_colors: bool,
    pub outcome: IsoOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub label: String,
    pub source: String,
    pub graph_sha256: String,
    pub arc: Option<ArcReport>,
    pub lines: LineReport,
    pub searches: Vec<SearchCertificate>,
    pub cache_hits: usize,
    pub witnesses: Option<WitnessSet>,
    pub linear_stabilizer_order: Option<usize>,
    pub isomorphisms: Vec<IsoRecord>,
    pub line_table: Option<Vec<LineRow>>,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub p: u32,
    pub r: u32,
    pub k: usize,
    pub foulser: Option<FoulserAnalysis>,
    pub graphs: Vec<GraphRecord>,
    /// TSC graphs up to isomorphism, when they could all be compared.
    pub tsc_classes: Option<usize>,
    pub verdict: Verdict,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub cases: Vec<CaseRecord>,
    pub skipped: Vec<(u32, u32, usize)>,
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub include_long: bool,
    pub threads: usize,
    pub cache: Option<CertificateCache>,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions { include_long: false, threads: 1, cache: None }
    }
}

pub fn replay_classification(
    cases: &[(u32, u32, usize)],
    opts: &ReplayOptions,
) -> Result<ClassificationReport> {
    if let Some(&(p, r, k)) = cases.iter().find(|c| !CLASSIFICATION_CASES.contains(c)) {
        return Err(Error::UnknownCase { p, r, k });
    }
    let mut report = ClassificationReport { cases: Vec::new(), skipped: Vec::new() };
    for &case in cases {
        if !opts.include_long && LONG_CASES.contains(&case) {
            report.skipped.push(case);
            continue;
        }
        let (p, r, k) = case;
        let record = replay_case(p, r, k, opts).unwrap_or_else(|e| CaseRecord {
            p,
            r,
            k,
            foulser: None,
            graphs: Vec::new(),
            tsc_classes: None,
            verdict: Verdict::Unresolved,
            error: Some(e.to_string()),
        });
        report.cases.push(record);
    }
    Ok(report)
}

fn orbital_label(field: &FieldTable, k: usize, t: FoulserTriple) -> String {
    let pr = power_label(field.p(), field.r());
    if t.d == k as u64 {
        format!("GP_{k}({pr})")
    } else {
        format!("Orb<ω^{},ω^{}α^{}>({pr})", t.d, t.e, t.s)
    }
}

fn foulser_graph(field: &Arc<FieldTable>, k: usize, t: FoulserTriple) -> Result<ColoredCayleyGraph> {
    let gamma = GammaL1::of_field(field);
    let blocks = gamma.orbit_partition(t)?;
    ColoredCayleyGraph::from_exponent_blocks(field.clone(), &blocks, orbital_label(field, k, t))
}

fn empty_record(graph: &ColoredCayleyGraph, source: String) -> Result<GraphRecord> {
    Ok(GraphRecord {
        label: graph.label().to_string(),
        source,
        graph_sha256: sha256_hex(graph.to_json()?.as_bytes()),
        arc: None,
        lines: symmetry::lines_monochromatic(graph),
        searches: Vec::new(),
        cache_hits: 0,
        witnesses: None,
        linear_stabilizer_order: None,
        isomorphisms: Vec::new(),
        line_table: None,
        verdict: Verdict::Unresolved,
        reason: String::new(),
    })
}

/// Decides one graph given a stabilizer whose orbits should be the color
/// classes. A transposition search that exhausts gives NOT_TSC; witnesses
/// for a generating set of `S_k` give TSC.
fn assess(
    graph: &ColoredCayleyGraph,
    stab: &Stabilizer,
    source: String,
    opts: &ReplayOptions,
) -> Result<GraphRecord> {
    let mut rec = empty_record(graph, source)?;
    let arc = verify_arc_transitive(graph, stab)?;
    let arc_ok = arc.arc_transitive;
    rec.arc = Some(arc);
    if !arc_ok {
        rec.reason = "stabilizer orbits differ from the color classes".into();
        return Ok(rec);
    }
    let mut maps = Vec::new();
    for target in symmetry::symmetric_generators(graph.k()) {
        let cfg = SearchConfig::new(target)
            .threads(opts.threads)
            .fast_gf2(graph.field().is_byte_field());
        let (cert, hit) = cached_search(opts.cache.as_ref(), graph, &cfg)?;
        rec.cache_hits += usize::from(hit);
        let exhausted = cert.is_exhausted() && cert.covers_space();
        let target = cert.config.target.clone();
        if let Some(w) = &cert.witness {
            maps.push(w.clone());
        }
        rec.searches.push(cert);
        if exhausted {
            rec.verdict = Verdict::NotTsc;
            rec.reason = format!("no matrix of GL_r(p) induces {target}");
            return Ok(rec);
        }
    }
    let report = verify_tsc(graph, stab, &maps)?;
    rec.witnesses = Some(report.witnesses);
    if report.verdict == TscVerdict::TotallySymmetric {
        rec.verdict = Verdict::Tsc;
        rec.reason = "arc-transitive and the witnesses generate the full symmetric group".into();
    } else {
        rec.reason = "witnesses do not generate the full symmetric group".into();
    }
    Ok(rec)
}

fn replay_case(p: u32, r: u32, k: usize, opts: &ReplayOptions) -> Result<CaseRecord> {
    let field = Arc::new(case_field(p, r)?);
    let gamma = GammaL1::of_field(&field);
    let analysis = gamma.enumerate_k_equal_orbit_subgroups(k);
    let mut graphs = Vec::new();
    for &t in &analysis.survivors {
        let g = foulser_graph(&field, k, t)?;
        graphs.push((g.clone(), assess(&g, &Stabilizer::Foulser(t), format!("foulser {t}"), opts)?));
    }
    // For planes the color-permuting maps need not be semilinear, so
    // subgroups dropped only for lack of a semilinear overgroup are decided
    // by search in GL_2(p) instead.
    if r == 2 {
        for elim in &analysis.eliminated {
            if let EliminationReason::NoColorTransitiveOvergroup { .. } = elim.reason {
                let t = elim.triple;
                let g = foulser_graph(&field, k, t)?;
                let rec = assess(&g, &Stabilizer::Foulser(t), format!("foulser {t}, no semilinear overgroup"), opts)?;
                graphs.push((g, rec));
            }
        }
    }
    match (p, r, k) {
        (5, 2, 3) => {
            let space = g3_25_space()?;
            let g = partition_direction_graph_in(&space, &DirectionPartition::g3_25())?;
            let stab = symmetry::linear_stabilizer(&g)?;
            let mut rec = assess(&g, &Stabilizer::Matrices(stab.clone()), "direction partition".into(), opts)?;
            rec.linear_stabilizer_order = Some(stab.len());
            graphs.push((g, rec));
        }
        (11, 2, 3) => {
            let space = g3_121_space()?;
            let g = partition_direction_graph_in(&space, &DirectionPartition::g3_121())?;
            let stab = Stabilizer::Semilinear(vec![
                crate::semilinear::GammaElem::omega_power(6),
                crate::semilinear::GammaElem { e: 3, s: 1 },
            ]);
            let mut rec = assess(&g, &stab, "direction partition".into(), opts)?;
            rec.line_table = Some(line_table(&space, &g));
            let known_maps = [
                LinearMap::from_rows(11, &[vec![1, 0], vec![0, -1]])?,
                LinearMap::from_rows(11, &[vec![2, 1], vec![1, 4]])?,
            ];
            let set = symmetry::color_symmetry_group(&g, &known_maps)?;
            if rec.witnesses.is_none() || rec.verdict != Verdict::Tsc {
                rec.witnesses = Some(set);
            }
            graphs.push((g, rec));
        }
        (3, 4, 4) => {
            // merging pairs of colors of a 4-colored TSC graph must give
            // isomorphic 2-colored graphs
            if let Some((g, rec)) = graphs.iter_mut().find(|(g, _)| g.label().starts_with("GP_4")) {
                let a = merge_colors(g, &[0, 1, 0, 1])?.with_label("merge {0,2}{1,3}");
                let b = merge_colors(g, &[0, 0, 1, 1])?.with_label("merge {0,1}{2,3}");
                let outcome = iso_colored(&a, &b, true)?;
                rec.isomorphisms.push(IsoRecord {
                    other: format!("{} vs {}", a.label(), b.label()),
                    permute_colors: true,
                    outcome,
                });
            }
        }
        _ => {}
    }

    let tsc: Vec<usize> = (0..graphs.len()).filter(|&i| graphs[i].1.verdict == Verdict::Tsc).collect();
    let mut tsc_classes = None;
    if graphs.iter().all(|(g, _)| g.n() <= crate::iso::MAX_ISO_VERTICES) {
        let mut reps: Vec<usize> = Vec::new();
        for &i in &tsc {
            let mut new_class = true;
            for &j in &reps {
                let outcome = iso_colored(&graphs[j].0, &graphs[i].0, true)?;
                let iso = outcome.isomorphic;
                let other = graphs[j].0.label().to_string();
                graphs[i].1.isomorphisms.push(IsoRecord { other, permute_colors: true, outcome });
                if iso {
                    new_class = false;
                    break;
                }
            }
            if new_class {
                reps.push(i);
            }
        }
        tsc_classes = Some(reps.len());
    } else if tsc.len() <= 1 {
        tsc_classes = Some(tsc.len());
    }

    let verdict = if !tsc.is_empty() {
        Verdict::Tsc
    } else if graphs.iter().all(|(_, g)| g.verdict == Verdict::NotTsc) {
        Verdict::NotTsc
    } else {
        Verdict::Unresolved
    };
    Ok(CaseRecord {
        p,
        r,
        k,
        foulser: Some(analysis),
        graphs: graphs.into_iter().map(|(_, rec)| rec).collect(),
        tsc_classes,
        verdict,
        error: None,
    })
}

/// `G_3(11^2)` built in the field of its line table.
pub fn g3_121() -> Result<ColoredCayleyGraph> {
    partition_direction_graph_in(&g3_121_space()?, &DirectionPartition::g3_121())
}

/// `G_3(5^2)` built in `F_5[x]/(x^2 + 2)`.
pub fn g3_25() -> Result<ColoredCayleyGraph> {
    partition_direction_graph_in(&g3_25_space()?, &DirectionPartition::g3_25())
}

pub fn gp_case(p: u32, r: u32, k: usize) -> Result<ColoredCayleyGraph> {
    gp_k(Arc::new(case_field(p, r)?), k)
}

/// The color permutation given as `"1,2"` or in cycle notation.
pub fn parse_colors(k: usize, s: &str) -> Result<ColorPermutation> {
    ColorPermutation::parse(k, s)
}

/// Vector coordinates of a field element, for printing.
pub fn coords(field: &FieldTable, x: Elem) -> Vec<u32> {
    field.coeffs(x)
}
