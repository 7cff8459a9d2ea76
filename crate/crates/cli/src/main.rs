use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tsc_core::field::build_field_with_root;
use tsc_core::graphs::{
    gp_k, paley, partition_direction_graph_in, peisert, ColoredCayleyGraph, DirectionPartition,
};
use tsc_core::iso::iso_colored;
use tsc_core::linalg::LinearMap;
use tsc_core::perm::ColorPermutation;
use tsc_core::report::{
    self, cached_search, CertificateCache, Envelope, ReplayOptions, RunManifest, CACHE_ENV,
    CLASSIFICATION_CASES,
};
use tsc_core::search::{self, SearchConfig};
use tsc_core::semilinear::{FoulserTriple, GammaL1};
use tsc_core::symmetry::{self, Stabilizer};
use tsc_core::{build_field, FieldTable};

#[derive(Parser)]
#[command(name = "tsc", version, about = "Totally symmetric colored Cayley graphs over finite fields")]
struct Cli {
    /// Worker threads for matrix searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory of cached search certificates.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build GF(p^r) and print its modulus and primitive root.
    Field(FieldArgs),
    /// Build a colored Cayley graph file.
    Graph(GraphArgs),
    /// Subgroups of the semilinear group with k equal orbits.
    Foulser {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
        /// Also list the index-k overgroups of every raw candidate.
        #[arg(long)]
        overgroups: bool,
    },
    /// Check a graph for arc-transitivity and color symmetry.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Test two graph files for colored isomorphism.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Allow a global relabelling of colors.
        #[arg(long)]
        permute_colors: bool,
    },
    /// Search GL_r(p) for matrices inducing a color permutation.
    Search {
        #[arg(value_enum)]
        kind: SearchKind,
        /// Graph file.
        graph: PathBuf,
        /// Target color permutation, e.g. "1,2" or "(0 1 2 3 4)".
        #[arg(long)]
        colors: Option<String>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        fast_gf2: bool,
        /// Leave the first column free instead of pinning it.
        #[arg(long)]
        no_pin: bool,
    },
    /// Run every module on the classification cases.
    Replay {
        /// Cases as p,r,k; defaults to all of them.
        #[arg(long = "case", value_parser = parse_case)]
        cases: Vec<(u32, u32, usize)>,
        /// Include searches measured in hours.
        #[arg(long)]
        include_long: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Arc-transitivity under a stabilizer, plus color symmetry from matrices.
    Tsc {
        graph: PathBuf,
        /// Stabilizer ⟨ω^d, ω^e α^s⟩ given as d,e,s.
        #[arg(long, value_parser = parse_triple)]
        triple: Option<FoulserTriple>,
        /// Use the full linear stabilizer, found by search.
        #[arg(long, conflicts_with = "triple")]
        linear: bool,
        /// Matrix rows separated by ';', e.g. "1,0;0,-1". Searched for when absent.
        #[arg(long = "matrix")]
        matrices: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Transposition,
    Cyclic,
    Stabilizer,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    r: u32,
    /// Monic modulus coefficients c_0,...,c_r.
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<u32>>,
    /// Primitive root coordinates; requires --poly.
    #[arg(long, value_delimiter = ',', requires = "poly")]
    omega: Option<Vec<u32>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Generalized Paley graph GP_k.
    Gp,
    Paley,
    Peisert,
    /// Orbital graph of ⟨ω^d, ω^e α^s⟩.
    Orbital,
    /// The 3-colored direction graph on F_11^2.
    G3_121,
    /// The 3-colored direction graph on F_5^2.
    G3_25,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', requires = "poly")]
    omega: Option<Vec<u32>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_triple)]
    triple: Option<FoulserTriple>,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad number '{x}'")))
        .collect()
}

fn parse_triple(s: &str) -> Result<FoulserTriple, String> {
    match parse_list::<u64>(s)?.as_slice() {
        &[d, e, s] => Ok(FoulserTriple::new(d, e, s as u32)),
        _ => Err("expected d,e,s".into()),
    }
}

fn parse_case(s: &str) -> Result<(u32, u32, usize), String> {
    match parse_list::<u64>(s)?.as_slice() {
        &[p, r, k] => Ok((p as u32, r as u32, k as usize)),
        _ => Err("expected p,r,k".into()),
    }
}

fn parse_matrix(p: u32, s: &str) -> Result<LinearMap> {
    let rows = s
        .split(';')
        .map(|row| parse_list::<i64>(row).map_err(anyhow::Error::msg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearMap::from_rows(p, &rows)?)
}

fn field_of(args: &FieldArgs) -> Result<FieldTable> {
    Ok(match (&args.poly, &args.omega) {
        (Some(poly), Some(omega)) => build_field_with_root(args.p, args.r, Some(poly), omega)?,
        (Some(poly), None) => build_field(args.p, args.r, Some(poly))?,
        _ => report::case_field(args.p, args.r)?,
    })
}

fn build_graph(args: &GraphArgs) -> Result<ColoredCayleyGraph> {
    let field = || -> Result<Arc<FieldTable>> {
        let (Some(p), Some(r)) = (args.p, args.r) else {
            bail!("--p and --r are required for this family");
        };
        let f = FieldArgs { p, r, poly: args.poly.clone(), omega: args.omega.clone() };
        Ok(Arc::new(field_of(&f)?))
    };
    Ok(match args.family {
        Family::Gp => gp_k(field()?, args.k.context("--k is required")?)?,
        Family::Paley => paley(field()?)?,
        Family::Peisert => peisert(field()?)?,
        Family::Orbital => {
            let field = field()?;
            let t = args.triple.context("--triple is required")?;
            let blocks = GammaL1::of_field(&field).orbit_partition(t)?;
            ColoredCayleyGraph::from_exponent_blocks(field, &blocks, format!("Orb{t}"))?
        }
        Family::G3_121 => report::g3_121()?,
        Family::G3_25 => partition_direction_graph_in(&report::g3_25_space()?, &DirectionPartition::g3_25())?,
    })
}

/// Reads a graph file, bare or inside the envelope this tool writes.
fn load(path: &Path) -> Result<ColoredCayleyGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("manifest").is_some() {
        value = value["result"].take();
    }
    let file = serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))?;
    Ok(ColoredCayleyGraph::from_file(&file)?)
}

struct Ctx {
    threads: usize,
    cache: Option<CertificateCache>,
    manifest: RunManifest,
}

impl Ctx {
    fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.add_input(path.display().to_string(), &bytes);
        Ok(())
    }
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<(Value, String)> {
    match cli.command {
        Command::Field(args) => {
            let f = field_of(&args)?;
            let summary = format!("GF({}^{}) modulus {:?} primitive root {:?}", f.p(), f.r(), f.record().poly, f.record().omega);
            Ok((serde_json::to_value(f.record())?, summary))
        }
        Command::Graph(args) => {
            let g = build_graph(&args)?;
            let summary = format!("{}: {} vertices, class sizes {:?}", g.label(), g.n(), g.color_class_sizes());
            Ok((serde_json::to_value(g.to_file())?, summary))
        }
        Command::Foulser { p, r, k, overgroups } => {
            let gamma = GammaL1::new(p, r)?;
            let analysis = gamma.enumerate_k_equal_orbit_subgroups(k);
            let survivors: Vec<String> = analysis.survivors.iter().map(ToString::to_string).collect();
            let summary = format!("({p},{r},{k}): survivors {}", survivors.join(" "));
            let mut out = json!({ "analysis": analysis });
            if overgroups {
                let raw: Vec<Value> = gamma
                    .k_equal_orbit_triples(k)
                    .into_iter()
                    .map(|t| json!({ "triple": t, "overgroups": gamma.index_k_overgroups(t, k) }))
                    .collect();
                out["overgroups"] = Value::Array(raw);
            }
            Ok((out, summary))
        }
        Command::Verify { what: VerifyCommand::Tsc { graph, triple, linear, matrices } } => {
            ctx.input(&graph)?;
            let g = load(&graph)?;
            let p = g.field().p();
            let stab = match (triple, linear) {
                (Some(t), _) => Stabilizer::Foulser(t),
                (None, true) => Stabilizer::Matrices(symmetry::linear_stabilizer(&g)?),
                (None, false) => bail!("give --triple or --linear"),
            };
            let (maps, certs) = if matrices.is_empty() {
                let cfg = SearchConfig::new(ColorPermutation::identity(g.k())).threads(ctx.threads);
                symmetry::find_symmetric_witnesses(&g, &cfg)?
            } else {
                let maps = matrices.iter().map(|m| parse_matrix(p, m)).collect::<Result<Vec<_>>>()?;
                (maps, Vec::new())
            };
            let rep = symmetry::verify_tsc(&g, &stab, &maps)?;
            let summary = format!(
                "{}: arc-transitive {}, color group order {}, {}",
                g.label(),
                rep.arc.arc_transitive,
                rep.color_group_order,
                serde_json::to_value(rep.verdict)?.as_str().unwrap_or_default()
            );
            Ok((json!({ "report": rep, "searches": certs }), summary))
        }
        Command::Iso { a, b, permute_colors } => {
            ctx.input(&a)?;
            ctx.input(&b)?;
            let (ga, gb) = (load(&a)?, load(&b)?);
            let out = iso_colored(&ga, &gb, permute_colors)?;
            let summary = format!(
                "{} vs {}: {} ({} nodes)",
                ga.label(),
                gb.label(),
                if out.isomorphic { "isomorphic" } else { "not isomorphic" },
                out.nodes
            );
            Ok((serde_json::to_value(out)?, summary))
        }
        Command::Search { kind, graph, colors, no_prune, fast_gf2, no_pin } => {
            ctx.input(&graph)?;
            let g = load(&graph)?;
            let k = g.k();
            let target = match (&colors, kind) {
                (Some(c), _) => ColorPermutation::parse(k, c)?,
                (None, SearchKind::Transposition) if k >= 3 => ColorPermutation::transposition(k, 1, 2)?,
                (None, SearchKind::Transposition) => ColorPermutation::transposition(k, 0, 1)?,
                (None, SearchKind::Cyclic) => ColorPermutation::from_images((1..k as u32).chain([0]).collect())?,
                (None, SearchKind::Stabilizer) => ColorPermutation::identity(k),
            };
            let cfg = SearchConfig::new(target)
                .threads(ctx.threads)
                .pruning(!no_prune)
                .pin_first_column(!no_pin)
                .fast_gf2(fast_gf2);
            let (cert, hit) = match kind {
                SearchKind::Stabilizer => (search::stabilizer_count(&g, &cfg)?, false),
                SearchKind::Transposition if !cfg.target.is_transposition() => {
                    bail!("{} is not a transposition", cfg.target)
                }
                SearchKind::Cyclic if k > 1 && !cfg.target.is_full_cycle() => {
                    bail!("{} is not a {k}-cycle", cfg.target)
                }
                _ => cached_search(ctx.cache.as_ref(), &g, &cfg)?,
            };
            let outcome = serde_json::to_value(cert.outcome)?;
            let summary = format!(
                "{} target {}: {} ({} enumerated, {} pruned of {}, {:.3} s{})",
                g.label(),
                cert.config.target,
                outcome.as_str().unwrap_or_default(),
                cert.candidates_enumerated,
                cert.candidates_pruned,
                cert.leaf_space,
                cert.wall_time_s,
                if hit { ", cached" } else { "" }
            );
            Ok((json!({ "certificate": cert, "cache_hit": hit }), summary))
        }
        Command::Replay { cases, include_long } => {
            let cases = if cases.is_empty() { CLASSIFICATION_CASES.to_vec() } else { cases };
            let opts = ReplayOptions { include_long, threads: ctx.threads, cache: ctx.cache.clone() };
            let rep = report::replay_classification(&cases, &opts)?;
            let mut lines = Vec::new();
            for c in &rep.cases {
                let v = serde_json::to_value(c.verdict)?;
                let classes = c.tsc_classes.map_or("?".to_string(), |n| n.to_string());
                lines.push(format!("({},{},{}) {} with {} TSC class(es)", c.p, c.r, c.k, v.as_str().unwrap_or_default(), classes));
                if let Some(e) = &c.error {
                    lines.push(format!("  error: {e}"));
                }
            }
            for (p, r, k) in &rep.skipped {
                lines.push(format!("({p},{r},{k}) skipped; pass --include-long"));
            }
            Ok((serde_json::to_value(rep)?, lines.join("\n")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = Ctx {
        threads: cli.threads.unwrap_or_else(search::default_threads).max(1),
        cache: cli.cache_dir.clone().map(CertificateCache::new),
        manifest: RunManifest::start(std::env::args().collect()),
    };
    let out = cli.out.clone();
    let result = run(cli, &mut ctx).and_then(|(value, summary)| {
        if let Some(path) = &out {
            ctx.manifest.add_output(path.display().to_string());
        }
        ctx.manifest.finish();
        let env = Envelope { manifest: ctx.manifest, result: value };
        let text = serde_json::to_string_pretty(&env)? + "\n";
        match &out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                println!("{summary}");
            }
            None => {
                print!("{text}");
                eprintln!("{summary}");
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
