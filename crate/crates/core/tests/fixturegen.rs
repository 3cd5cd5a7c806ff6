use std::collections::BTreeMap;
use std::path::Path;

use ltqp::engine::Setup;
use ltqp::fixturegen::{generate_web, oracle_eval, OracleFeatures, WebSpec};
use ltqp::query::{classify, parse_query, QueryClass};

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn same_seed_same_bytes() {
    let spec = WebSpec {
        seed: 42,
        docs_per_entity: 2,
        ..WebSpec::default()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_web(&spec, a.path()).unwrap();
    generate_web(&spec, b.path()).unwrap();
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert!(fa.contains_key("manifest.tsv") && fa.contains_key("ground_truth.tsv"));
    assert_eq!(fa, fb);

    let c = tempfile::tempdir().unwrap();
    generate_web(&WebSpec { seed: 43, ..spec }, c.path()).unwrap();
    assert_ne!(fa, files(c.path()));
}

#[test]
fn generated_queries_classify_as_intended() {
    for seed in 0..5 {
        let dir = tempfile::tempdir().unwrap();
        let web = generate_web(&WebSpec { seed, ..WebSpec::default() }, dir.path()).unwrap();
        let classes: Vec<QueryClass> = web.queries.iter().map(|q| q.class).collect();
        for class in QueryClass::TABLE {
            assert!(classes.contains(&class), "seed {seed}: no {class} query");
        }
        for q in &web.queries {
            let text = std::fs::read_to_string(dir.path().join(format!("queries/{}.rq", q.id))).unwrap();
            let parsed = parse_query(&text, &q.id).unwrap();
            assert_eq!(parsed, q.query);
            assert_eq!(classify(&parsed), q.class, "{text}");
        }
    }
}

#[test]
fn planted_bindings_are_in_the_ground_truth() {
    for seed in 0..5 {
        let dir = tempfile::tempdir().unwrap();
        let web = generate_web(&WebSpec { seed, ..WebSpec::default() }, dir.path()).unwrap();
        for q in &web.queries {
            assert!(q.planted.contains_key(&Setup::Combined));
            for (setup, row) in &q.planted {
                let truth = &web.ground_truth[&(q.id.clone(), *setup)];
                assert!(truth.contains(row), "seed {seed} {} {setup}: {row:?} missing", q.id);
            }
        }
    }
}

#[test]
fn ground_truth_file_matches_reloaded_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let web = generate_web(&WebSpec::default(), dir.path()).unwrap();
    for q in web.queries.iter().step_by(5) {
        for setup in [Setup::Base, Setup::SameAs, Setup::RhoDf, Setup::Combined] {
            let reloaded = oracle_eval(dir.path(), &q.query, OracleFeatures::from(setup)).unwrap();
            assert_eq!(reloaded, web.ground_truth[&(q.id.clone(), setup)]);
        }
    }
    let lines = std::fs::read_to_string(dir.path().join("ground_truth.tsv")).unwrap().lines().count();
    assert_eq!(lines, web.ground_truth.values().map(|s| s.len()).sum::<usize>());
}

#[test]
fn without_links_base_and_combined_agree() {
    let spec = WebSpec {
        sameas: 0,
        seealso: 0,
        vocab_depth: 0,
        ..WebSpec::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let web = generate_web(&spec, dir.path()).unwrap();
    for q in &web.queries {
        assert_eq!(
            web.ground_truth[&(q.id.clone(), Setup::Base)],
            web.ground_truth[&(q.id.clone(), Setup::Combined)],
            "{}",
            q.id
        );
    }
}

#[test]
fn one_sameas_pair_widens_an_entity_so_query() {
    let found = (0..10).any(|seed| {
        let spec = WebSpec {
            seed,
            sameas: 1,
            seealso: 0,
            vocab_depth: 0,
            ..WebSpec::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let web = generate_web(&spec, dir.path()).unwrap();
        web.queries.iter().filter(|q| q.class == QueryClass::EntitySO && q.needs.same_as).any(|q| {
            let base = &web.ground_truth[&(q.id.clone(), Setup::Base)];
            let combined = &web.ground_truth[&(q.id.clone(), Setup::Combined)];
            combined.len() > base.len()
        })
    });
    assert!(found);
}

#[test]
fn bad_specs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [
        WebSpec { entities: 1, ..WebSpec::default() },
        WebSpec { docs_per_entity: 0, ..WebSpec::default() },
        WebSpec { base: "fixture/".into(), ..WebSpec::default() },
    ] {
        assert!(generate_web(&spec, dir.path()).is_err());
    }
}
