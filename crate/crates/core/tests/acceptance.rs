//! Acceptance criteria, one PASS/FAIL line each. Runs with its own harness
//! so the lines always reach the terminal.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Deserialize;
use tsc_core::graphs::{gp_k, merge_colors, paley, peisert, ColoredCayleyGraph};
use tsc_core::iso::{check_isomorphism, iso_colored};
use tsc_core::report::{self, line_table};
use tsc_core::search::{self, SearchConfig};
use tsc_core::semilinear::{FoulserTriple, GammaElem};
use tsc_core::symmetry::{self, Stabilizer, TscVerdict};
use tsc_core::{build_field, ColorPermutation, Elem, FieldTable, GammaL1, LinearMap};

type Check = Result<String, String>;
type Case = (u32, u32, usize);
type Criterion = fn() -> Check;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn transposition_12(k: usize) -> ColorPermutation {
    ColorPermutation::transposition(k, 1, 2).unwrap()
}

fn five_cycle() -> ColorPermutation {
    ColorPermutation::from_images(vec![1, 2, 3, 4, 0]).unwrap()
}

/// Leaves of the pinned search: one vector for column 0, then every vector
/// of the target color of `e_j` for the remaining columns.
fn leaf_space_oracle(g: &ColoredCayleyGraph, target: &ColorPermutation) -> u128 {
    let f = g.field();
    let sizes = g.color_class_sizes();
    (1..f.r() as usize)
        .map(|j| {
            let ej = Elem(f.p().pow(j as u32));
            sizes[target.apply(g.color(ej).unwrap()) as usize] as u128
        })
        .product()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let expected: [(Case, (u64, u64, u32)); 6] = [
        ((2, 4, 3), (3, 0, 2)),
        ((2, 6, 3), (3, 0, 2)),
        ((2, 8, 5), (5, 0, 4)),
        ((7, 4, 5), (5, 0, 4)),
        ((3, 4, 5), (5, 0, 4)),
        ((3, 4, 4), (4, 0, 2)),
    ];
    for ((p, r, k), (d, e, s)) in expected {
        let got = GammaL1::new(p, r).map_err(err)?.enumerate_k_equal_orbit_subgroups(k).survivors;
        ensure!(got == vec![FoulserTriple::new(d, e, s)], "({p},{r},{k}) gave {got:?}");
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!("6 cases exact, {t:.2?}"))
}

fn exhausted_transposition(p: u32, r: u32, expected_space: u128, fast: bool) -> Result<(search::SearchCertificate, Duration), String> {
    let g = report::gp_case(p, r, 5).map_err(err)?;
    let target = transposition_12(5);
    let oracle = leaf_space_oracle(&g, &target);
    ensure!(oracle == expected_space, "oracle leaf space {oracle} != {expected_space}");
    let cfg = SearchConfig::new(target).threads(search::default_threads()).fast_gf2(fast).quiet();
    let start = Instant::now();
    let cert = search::transposition_search(&g, &cfg).map_err(err)?;
    let t = start.elapsed();
    ensure!(cert.is_exhausted() && cert.witness.is_none(), "outcome {:?}", cert.outcome);
    ensure!(cert.leaf_space as u128 == oracle, "leaf space {} != {oracle}", cert.leaf_space);
    ensure!(
        (cert.candidates_enumerated + cert.candidates_pruned) as u128 == oracle,
        "enumerated {} + pruned {} != {oracle}",
        cert.candidates_enumerated,
        cert.candidates_pruned
    );
    Ok((cert, t))
}

fn criterion_2() -> Check {
    let (cert, t) = exhausted_transposition(3, 4, 4096, false)?;
    ensure!(t < Duration::from_secs(1), "took {t:?}");
    Ok(format!("EXHAUSTED over {} leaves ({} enumerated), {t:.2?}", cert.leaf_space, cert.candidates_enumerated))
}

fn criterion_3() -> Check {
    let (cert, t) = exhausted_transposition(7, 4, 480u128.pow(3), false)?;
    ensure!(t < Duration::from_secs(600), "took {t:?}");
    Ok(format!("EXHAUSTED over {} leaves ({} enumerated), {t:.2?}", cert.leaf_space, cert.candidates_enumerated))
}

fn criterion_4() -> Check {
    let (cert, t) = exhausted_transposition(2, 8, 51u128.pow(7), true)?;
    ensure!(cert.fast_path, "fast path not used");
    ensure!(cert.config.prune_pair_sums, "pruning off");
    ensure!(t < Duration::from_secs(4 * 3600), "took {t:?}");
    Ok(format!("EXHAUSTED over {} leaves on the byte path, {t:.2?}", cert.leaf_space))
}

/// All 4x4 matrices over GF(2), as column images in F_16, that induce
/// `target` on GP_3(2^4).
fn gl42_oracle(g: &ColoredCayleyGraph, target: &ColorPermutation) -> (usize, BTreeSet<Vec<u32>>) {
    let f = g.field();
    let mut invertible = 0;
    let mut witnesses = BTreeSet::new();
    for code in 0u32..1 << 16 {
        let cols: Vec<u32> = (0..4).map(|j| (code >> (4 * j)) & 15).collect();
        let image = |x: u32| {
            (0..4).filter(|&j| x >> j & 1 == 1).fold(Elem(0), |acc, j| f.add(acc, Elem(cols[j])))
        };
        let images: BTreeSet<u32> = (0..16).map(|x| image(x).0).collect();
        if images.len() < 16 {
            continue;
        }
        invertible += 1;
        if (1..16).all(|x| g.color(image(x)) == Some(target.apply(g.color(Elem(x)).unwrap()))) {
            witnesses.insert(cols);
        }
    }
    (invertible, witnesses)
}

fn criterion_5() -> Check {
    let mut found = Vec::new();
    for (p, r) in [(3, 4), (7, 4), (2, 8)] {
        let g = report::gp_case(p, r, 5).map_err(err)?;
        let cfg = SearchConfig::new(five_cycle()).threads(1).fast_gf2(p == 2).quiet();
        let cert = search::cyclic_search(&g, &cfg).map_err(err)?;
        let w = cert.witness.ok_or(format!("no 5-cycle witness on {}", g.label()))?;
        let perm = symmetry::induced_color_perm_matrix(&w, &g).map_err(err)?;
        ensure!(perm == five_cycle(), "{} witness induces {perm}", g.label());
        found.push(g.label().to_string());
    }
    let g = gp_k(Arc::new(build_field(2, 4, None).map_err(err)?), 3).map_err(err)?;
    let target = ColorPermutation::transposition(3, 0, 1).unwrap();
    let cfg = SearchConfig::new(target.clone()).threads(1).pin_first_column(false).quiet();
    let cert = search::transposition_search(&g, &cfg).map_err(err)?;
    let w = cert.witness.ok_or("no (0 1) witness on GP_3(2^4)")?;
    let (invertible, oracle) = gl42_oracle(&g, &target);
    ensure!(invertible == 20160, "GL_4(2) enumeration found {invertible}");
    ensure!(oracle.contains(&w.columns()), "search witness {w} not in enumeration");
    let all: BTreeSet<Vec<u32>> =
        search::all_witnesses(&g, &target).map_err(err)?.iter().map(LinearMap::columns).collect();
    ensure!(all == oracle, "search lists {} witnesses, enumeration {}", all.len(), oracle.len());
    Ok(format!("5-cycles on {}; GP_3(2^4) (0 1): {} of 20160 matrices", found.join(", "), oracle.len()))
}

#[derive(Deserialize)]
struct Table1 {
    p: u32,
    poly: Vec<u32>,
    omega: Vec<u32>,
    rows: Vec<report::LineRow>,
}

fn criterion_6() -> Check {
    let g = report::g3_121().map_err(err)?;
    let m = |rows: [[i64; 2]; 2]| LinearMap::from_rows(11, &rows.map(Vec::from)).unwrap();
    let a = symmetry::induced_color_perm_matrix(&m([[1, 0], [0, -1]]), &g).map_err(err)?;
    let b = symmetry::induced_color_perm_matrix(&m([[2, 1], [1, 4]]), &g).map_err(err)?;
    ensure!(a == transposition_12(3), "diag(1,-1) induces {a}");
    ensure!(b == ColorPermutation::transposition(3, 0, 1).unwrap(), "[[2,1],[1,4]] induces {b}");
    let maps = [m([[1, 0], [0, -1]]), m([[2, 1], [1, 4]])];
    let stab = Stabilizer::Semilinear(vec![GammaElem::omega_power(6), GammaElem { e: 3, s: 1 }]);
    let rep = symmetry::verify_tsc(&g, &stab, &maps).map_err(err)?;
    ensure!(rep.witnesses.group.is_symmetric && rep.witnesses.group.order == 6, "group order {}", rep.witnesses.group.order);
    ensure!(rep.verdict == TscVerdict::TotallySymmetric, "verdict {:?}", rep.verdict);

    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/table1.json")).map_err(err)?;
    let fixture: Table1 = serde_json::from_str(&text).map_err(err)?;
    let rec = g.field().record();
    ensure!(fixture.p == rec.p && fixture.poly == rec.poly && fixture.omega == rec.omega, "field differs from fixture");
    let rows = line_table(&report::g3_121_space().map_err(err)?, &g);
    ensure!(rows.len() == 12 && fixture.rows.len() == 12, "row count {}", rows.len());
    for (got, want) in rows.iter().zip(&fixture.rows) {
        ensure!(got == want, "row {}: got {:?}/{}, expected {:?}/{}", want.i, got.vector, got.color, want.vector, want.color);
    }
    Ok("(1 2), (0 1), S_3, TOTALLY_SYMMETRIC; 12 line-table rows match".into())
}

/// Matrices over F_5 preserving every color of a graph built on F_5^2.
fn gl25_oracle(g: &ColoredCayleyGraph) -> (usize, BTreeSet<[u32; 4]>) {
    let vec = |x: u32| [x % 5, x / 5];
    let mut invertible = 0;
    let mut stab = BTreeSet::new();
    for code in 0u32..625 {
        let m = [code % 5, code / 5 % 5, code / 25 % 5, code / 125];
        if (m[0] * m[3] % 5 + 5 - m[1] * m[2] % 5) % 5 == 0 {
            continue;
        }
        invertible += 1;
        let image = |x: u32| {
            let [a, b] = vec(x);
            let (c0, c1) = ((m[0] * a + m[1] * b) % 5, (m[2] * a + m[3] * b) % 5);
            Elem(c0 + 5 * c1)
        };
        if (1..25).all(|x| g.color(image(x)) == g.color(Elem(x))) {
            stab.insert(m);
        }
    }
    (invertible, stab)
}

fn criterion_7() -> Check {
    let base = Arc::new(build_field(5, 1, None).map_err(err)?);
    let g = tsc_core::graphs::partition_direction_graph(base, &tsc_core::graphs::DirectionPartition::g3_25()).map_err(err)?;
    let stab = symmetry::linear_stabilizer(&g).map_err(err)?;
    let (invertible, oracle) = gl25_oracle(&g);
    ensure!(invertible == 480, "GL_2(5) enumeration found {invertible}");
    ensure!(stab.len() == 16 && oracle.len() == 16, "stabilizer {} / oracle {}", stab.len(), oracle.len());
    let as_key = |m: &LinearMap| [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)];
    ensure!(stab.iter().map(as_key).collect::<BTreeSet<_>>() == oracle, "stabilizer differs from enumeration");
    let m = |rows: [[i64; 2]; 2]| LinearMap::from_rows(5, &rows.map(Vec::from)).unwrap();
    for gen in [m([[2, 0], [0, 2]]), m([[0, 1], [1, 0]]), m([[-1, 0], [0, 1]])] {
        ensure!(stab.contains(&gen), "generator {gen} missing");
    }
    let cfg = SearchConfig::new(ColorPermutation::identity(3)).threads(1).quiet();
    let (maps, certs) = symmetry::find_symmetric_witnesses(&g, &cfg).map_err(err)?;
    ensure!(certs.iter().all(|c| c.leaf_space <= 480), "search space exceeds GL_2(5)");
    let rep = symmetry::verify_tsc(&g, &Stabilizer::Matrices(stab), &maps).map_err(err)?;
    ensure!(rep.verdict == TscVerdict::TotallySymmetric, "verdict {:?}", rep.verdict);
    Ok(format!("stabilizer of order 16 with the 3 generators; {} searched witnesses; TOTALLY_SYMMETRIC", maps.len()))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let f9 = Arc::new(build_field(3, 2, None).map_err(err)?);
    let (a, b) = (paley(f9.clone()).map_err(err)?, peisert(f9).map_err(err)?);
    let out = iso_colored(&a, &b, true).map_err(err)?;
    ensure!(out.isomorphic, "GP(9) and PG*(9) not isomorphic");
    ensure!(check_isomorphism(&a, &b, out.mapping.as_ref().unwrap()), "mapping fails edge check");
    let f81 = Arc::new(build_field(3, 4, None).map_err(err)?);
    let (c, d) = (paley(f81.clone()).map_err(err)?, peisert(f81).map_err(err)?);
    let out81 = iso_colored(&c, &d, true).map_err(err)?;
    ensure!(!out81.isomorphic, "PG(81) and PG*(81) reported isomorphic");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(120), "took {t:?}");
    Ok(format!("GP(9) ≅ PG*(9); PG(81) ≇ PG*(81) after {} nodes; {t:.2?}", out81.nodes))
}

fn criterion_9() -> Check {
    let f = Arc::new(build_field(3, 4, None).map_err(err)?);
    let g = gp_k(f.clone(), 4).map_err(err)?;
    let a = merge_colors(&g, &[0, 1, 0, 1]).map_err(err)?;
    let b = merge_colors(&g, &[0, 0, 1, 1]).map_err(err)?;
    ensure!(a.color_table() == paley(f.clone()).map_err(err)?.color_table(), "{{0,2}}/{{1,3}} differs from Paley");
    ensure!(b.color_table() == peisert(f).map_err(err)?.color_table(), "{{0,1}}/{{2,3}} differs from Peisert");
    Ok("both merges equal table-for-table".into())
}

/// `x -> ω^e x^(p^s)` from field multiplication alone.
fn semilinear_image(f: &FieldTable, g: GammaElem, x: Elem) -> Elem {
    f.mul(f.pow(f.omega(), g.e), f.pow(x, (f.p() as u64).pow(g.s)))
}

fn prime_powers_upto(limit: u32) -> Vec<(u32, u32)> {
    let is_prime = |n: u32| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    let mut out = Vec::new();
    for p in (2..=limit).filter(|&p| is_prime(p)) {
        let mut q = p;
        let mut r = 1;
        while q <= limit {
            out.push((p, r));
            q *= p;
            r += 1;
        }
    }
    out
}

fn criterion_10() -> Check {
    let start = Instant::now();
    let mut graphs = 0;
    let mut triples = 0;
    let mut pairs = 0u64;
    for (p, r) in prime_powers_upto(256) {
        let f = Arc::new(build_field(p, r, None).map_err(err)?);
        let gamma = GammaL1::of_field(&f);
        let n = gamma.n();

        let mut family = vec![paley(f.clone()).ok(), peisert(f.clone()).ok()];
        for k in [2, 3, 4, 5] {
            family.push(gp_k(f.clone(), k).ok());
        }
        for g in family.into_iter().flatten() {
            graphs += 1;
            for x in f.nonzero() {
                ensure!(g.color(x) == g.color(f.sub(Elem(0), x)), "{}: color({x:?}) != color(-x)", g.label());
            }
        }

        for t in gamma.valid_triples() {
            triples += 1;
            let formula = (n / t.d) * (r / t.s) as u64;
            let closure = gamma.closure(&gamma.generators(t)).len() as u64;
            ensure!(closure == formula && gamma.subgroup_order(t) == formula, "GF({p}^{r}) {t}: |H| {formula}, closure {closure}");
        }

        // image tables for every element of ΓL_1, then every ordered pair
        let size = (n * r as u64) as usize;
        let elem = |i: usize| GammaElem { e: i as u64 % n, s: (i as u64 / n) as u32 };
        let index = |g: GammaElem| (g.s as u64 * n + g.e) as usize;
        let q = f.q() as usize;
        let table: Vec<Vec<u32>> =
            (0..size).map(|i| (0..q as u32).map(|x| semilinear_image(&f, elem(i), Elem(x)).0).collect()).collect();
        for a in 0..size {
            for b in 0..size {
                let c = &table[index(gamma.compose(elem(a), elem(b)))];
                let (ta, tb) = (&table[a], &table[b]);
                ensure!((0..q).all(|x| c[x] == ta[tb[x] as usize]), "GF({p}^{r}): compose({:?},{:?}) differs pointwise", elem(a), elem(b));
            }
        }
        pairs += (size * size) as u64;
    }

    for (p, r, k, target) in [(3, 4, 5, transposition_12(5)), (3, 4, 5, five_cycle()), (2, 4, 3, ColorPermutation::transposition(3, 0, 1).unwrap())] {
        let g = report::gp_case(p, r, k).map_err(err)?;
        let base = SearchConfig::new(target).threads(1).quiet();
        let on = search::search(&g, &base).map_err(err)?;
        let off = search::search(&g, &base.clone().pruning(false)).map_err(err)?;
        ensure!(on.outcome == off.outcome && on.witness == off.witness, "{}: pruning changes the outcome", g.label());
        ensure!(off.candidates_pruned == 0, "pruning off still pruned");
    }

    let g = report::gp_case(3, 4, 5).map_err(err)?;
    for target in [transposition_12(5), five_cycle()] {
        let one = search::search(&g, &SearchConfig::new(target.clone()).threads(1).quiet()).map_err(err)?;
        let many = search::search(&g, &SearchConfig::new(target).threads(4).quiet()).map_err(err)?;
        ensure!(
            one.outcome == many.outcome
                && one.witness == many.witness
                && one.leaf_space == many.leaf_space
                && one.candidates_enumerated == many.candidates_enumerated
                && one.candidates_pruned == many.candidates_pruned,
            "1 vs 4 threads disagree"
        );
    }
    Ok(format!(
        "{graphs} graphs symmetric, {triples} triples, {pairs} compositions; pruning and threads neutral; {:.2?}",
        start.elapsed()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("1 Foulser replay", criterion_1),
        ("2 GP_5(3^4) transposition exhausted", criterion_2),
        ("3 GP_5(7^4) transposition exhausted", criterion_3),
        ("4 GP_5(2^8) transposition exhausted", criterion_4),
        ("5 positive controls", criterion_5),
        ("6 G_3(11^2)", criterion_6),
        ("7 G_3(5^2)", criterion_7),
        ("8 isomorphism suite", criterion_8),
        ("9 merge consistency", criterion_9),
        ("10 property suites", criterion_10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
