use std::time::Instant;

use tsc_core::report::{
    cached_search, replay_classification, CaseRecord, CertificateCache, ClassificationReport, ReplayOptions,
    Verdict, CLASSIFICATION_CASES,
};
use tsc_core::search::SearchConfig;
use tsc_core::{ColorPermutation, Error};

fn case(rep: &ClassificationReport, p: u32, r: u32, k: usize) -> &CaseRecord {
    rep.cases.iter().find(|c| (c.p, c.r, c.k) == (p, r, k)).unwrap()
}

#[test]
fn default_replay() {
    let rep = replay_classification(&CLASSIFICATION_CASES, &ReplayOptions::default()).unwrap();
    assert_eq!(rep.skipped, vec![(2, 8, 5)]);
    assert_eq!(rep.cases.len(), CLASSIFICATION_CASES.len() - 1);
    for c in &rep.cases {
        assert!(c.error.is_none(), "{:?}", c.error);
        for g in &c.graphs {
            match g.verdict {
                Verdict::Tsc => assert!(g.witnesses.as_ref().is_some_and(|w| w.group.is_symmetric)),
                Verdict::NotTsc => assert!(g.searches.iter().any(|s| s.is_exhausted() && s.covers_space())),
                Verdict::Unresolved => {}
            }
        }
    }

    let c = case(&rep, 2, 4, 3);
    assert_eq!(c.verdict, Verdict::Tsc);
    assert_eq!(c.graphs.len(), 1);
    assert_eq!(c.graphs[0].label, "GP_3(2^4)");

    for (p, r, k) in [(3, 4, 5), (7, 4, 5), (3, 4, 4)] {
        assert_eq!(case(&rep, p, r, k).verdict, Verdict::NotTsc, "({p},{r},{k})");
    }
    let c = case(&rep, 3, 4, 4);
    assert!(c.graphs[0].isomorphisms.iter().any(|i| !i.outcome.isomorphic));

    for (p, classes) in [(17, 1), (23, 1), (89, 1), (5, 2), (11, 2)] {
        let c = case(&rep, p, 2, 3);
        assert_eq!(c.verdict, Verdict::Tsc);
        assert_eq!(c.tsc_classes, Some(classes), "p = {p}");
    }

    let c = case(&rep, 11, 2, 3);
    let g3 = c.graphs.iter().find(|g| g.label == "G_3(11^2)").unwrap();
    assert_eq!(g3.verdict, Verdict::Tsc);
    assert_eq!(g3.line_table.as_ref().unwrap().len(), 12);
    assert!(c.graphs.iter().any(|g| g.label == "GP_3(11^2)" && g.verdict == Verdict::Tsc));

    let c = case(&rep, 5, 2, 3);
    let g3 = c.graphs.iter().find(|g| g.label == "G_3(5^2)").unwrap();
    assert_eq!(g3.linear_stabilizer_order, Some(16));
}

#[test]
fn single_thread_reports_are_reproducible() {
    let opts = ReplayOptions::default();
    let strip = |rep: &ClassificationReport| {
        let mut v = serde_json::to_value(rep).unwrap();
        for c in v["cases"].as_array_mut().unwrap() {
            for g in c["graphs"].as_array_mut().unwrap() {
                for s in g["searches"].as_array_mut().unwrap() {
                    s["wall_time_s"] = 0.into();
                }
            }
        }
        serde_json::to_string(&v).unwrap()
    };
    let a = replay_classification(&[(2, 4, 3), (11, 2, 3)], &opts).unwrap();
    let b = replay_classification(&[(2, 4, 3), (11, 2, 3)], &opts).unwrap();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn unknown_case_is_an_error() {
    let err = replay_classification(&[(2, 4, 3), (3, 2, 2)], &ReplayOptions::default()).unwrap_err();
    assert!(matches!(err, Error::UnknownCase { p: 3, r: 2, k: 2 }));
}

#[test]
fn cache_skips_the_7_4_search() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CertificateCache::new(dir.path());
    let g = tsc_core::report::gp_case(7, 4, 5).unwrap();
    let cfg = SearchConfig::new(ColorPermutation::transposition(5, 1, 2).unwrap()).threads(1).quiet();
    let (first, hit) = cached_search(Some(&cache), &g, &cfg).unwrap();
    assert!(!hit);
    let start = Instant::now();
    let (second, hit) = cached_search(Some(&cache), &g, &cfg).unwrap();
    assert!(hit);
    assert!(start.elapsed().as_secs_f64() < 0.5);
    assert_eq!(first, second);

    let other = cfg.clone().pruning(false);
    let key = CertificateCache::key(&g, &other).unwrap();
    assert_ne!(key, CertificateCache::key(&g, &cfg).unwrap());
    assert!(cache.get(&key).unwrap().is_none());
}

#[test]
fn corrupt_cache_entry_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CertificateCache::new(dir.path());
    let g = tsc_core::report::gp_case(3, 4, 5).unwrap();
    let cfg = SearchConfig::new(ColorPermutation::transposition(5, 1, 2).unwrap());
    let key = CertificateCache::key(&g, &cfg).unwrap();
    std::fs::write(dir.path().join(format!("{key}.json")), "{").unwrap();
    assert!(cached_search(Some(&cache), &g, &cfg).is_err());
}
