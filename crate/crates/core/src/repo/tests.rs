use std::path::{Path, PathBuf};

use super::*;
use crate::category::check_functor;
use crate::protocol::{minimize, sample_traces};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn loaded() -> (Catalog, Model) {
    load(&fixtures().join("catalog.txt"), Options::default()).expect("fixture catalog loads")
}

#[test]
fn fixture_catalog_loads() {
    let (catalog, model) = loaded();
    assert_eq!(catalog.units.len(), 3);
    assert!(model.interfaces.contains_key("ManagePortfolio"));
    assert!(model.interfaces.contains_key("ManageDocuments"));
    assert!(model.components.contains_key("DocumentManager"));
    let docs = &catalog.architectures["Documents"];
    assert!(docs.has_morphism("I1", crate::category::MorphismKind::Ext, "I3"));
    assert!(check_functor(&catalog.links["Realize"]).unwrap().passed());
    assert!(check_functor(&catalog.links["Identity"]).unwrap().passed());
    assert!(!check_functor(&catalog.links["Reversed"]).unwrap().passed());
}

#[test]
fn empty_catalog_is_empty_model() {
    let (catalog, model) = load_units(PathBuf::from("empty.txt"), Vec::new(), Options::default()).unwrap();
    assert!(model.is_empty());
    assert!(catalog.architectures.is_empty());
}

#[test]
fn missing_unit_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.txt");
    std::fs::write(&path, "# comment\nmissing.adl\n").unwrap();
    let err = load(&path, Options::default()).unwrap_err();
    assert!(matches!(err, LoadError::Io { .. }));
    assert!(err.to_string().contains("missing.adl"), "{err}");
}

#[test]
fn every_failing_unit_is_reported() {
    let units = vec![
        SourceUnit::new("a.adl", "interface X {"),
        SourceUnit::new("b.adl", "interface Y { f(x: Nope); }"),
        SourceUnit::new("c.adl", "contract {"),
    ];
    let err = load_units(PathBuf::from("c.txt"), units, Options::default()).unwrap_err();
    let paths: Vec<_> = err.diagnostics().iter().filter_map(|d| d.path.clone()).collect();
    assert!(paths.contains(&"a.adl".to_string()));
    assert!(paths.contains(&"c.adl".to_string()));
}

#[test]
fn invalid_causal_relation_fails_load() {
    let text = "interface P { a(); } interface R { b(); }
        contract C implements P { protocol { ?a } }
        component K { provided contract C required interface R causal { ?a } }";
    let err = load_units(PathBuf::from("c.txt"), vec![SourceUnit::new("k.adl", text)], Options::default())
        .unwrap_err();
    assert!(err.to_string().contains("publication `K`"), "{err}");
}

#[test]
fn index_entries_are_minimal_and_named() {
    let (catalog, model) = loaded();
    let index = build_index(&catalog, &model, Options::default()).unwrap();
    let dm = index.entry("DocumentManager").unwrap();
    assert!(dm.keywords.contains("document"));
    assert!(dm.provided_dfa.accepts(&["searchDocuments", "setPreference"]));
    assert!(sample_traces(&dm.provided_dfa, 2)
        .iter()
        .any(|t| t.to_string() == "searchDocuments setPreference"));
    for e in &index.entries {
        assert_eq!(minimize(&e.provided_dfa).unwrap().state_count(), e.provided_dfa.state_count());
    }
    // DocStore declares no protocol: any call order over its methods.
    let store = index.entry("DocStore").unwrap();
    assert!(store.provided_dfa.accepts(&["put", "put"]));
    assert_eq!(store.provided_dfa.state_count(), 1);
}

#[test]
fn index_is_independent_of_order_and_mode() {
    let (catalog, model) = loaded();
    let a = build_index(&catalog, &model, Options::default()).unwrap();
    let mut units = catalog.units.clone();
    units.reverse();
    let (catalog2, model2) = load_units(catalog.path.clone(), units, Options::default()).unwrap();
    assert_eq!(model, model2);
    let b = build_index(
        &catalog2,
        &model2,
        Options {
            execution: Execution::Sequential,
            ..Options::default()
        },
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn cache_round_trip_and_rejections() {
    let (catalog, model) = loaded();
    let index = build_index(&catalog, &model, Options::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.txt.idx");
    save_cache(&index, &path).unwrap();
    assert_eq!(load_cache(&path).unwrap(), index);

    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(matches!(
        load_cache(&path),
        Err(CacheError::Truncated | CacheError::Corrupt { .. })
    ));
    std::fs::write(&path, "ARCHMATCH-IDX v0\n").unwrap();
    assert_eq!(load_cache(&path), Err(CacheError::Version));
    std::fs::write(&path, [0xff, 0xfe, 0x00]).unwrap();
    assert_eq!(load_cache(&path), Err(CacheError::Version));
}

#[test]
fn stale_cache_is_rebuilt() {
    let (catalog, model) = loaded();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.idx");
    let (_, status) = open_index(&catalog, &model, &path, Options::default()).unwrap();
    assert_eq!(status, CacheStatus::Built);
    let (_, status) = open_index(&catalog, &model, &path, Options::default()).unwrap();
    assert_eq!(status, CacheStatus::Fresh);

    let mut units = catalog.units.clone();
    units[0].text.push_str("\ninterface Extra { x(); }\n");
    let (edited, model) = load_units(catalog.path.clone(), units, Options::default()).unwrap();
    let (index, status) = open_index(&edited, &model, &path, Options::default()).unwrap();
    assert!(matches!(status, CacheStatus::Rebuilt(CacheError::Stale { .. })));
    assert_eq!(index.hash, edited.content_hash());
}

#[test]
fn words_split_on_case_changes() {
    assert_eq!(split_words("searchDocuments"), ["search", "documents"]);
    assert_eq!(split_words("ManageDocuments"), ["manage", "documents"]);
    assert_eq!(split_words("HTTPServer"), ["http", "server"]);
    assert_eq!(split_words("get_v2Item"), ["get", "v2", "item"]);
    assert!(split_words("").is_empty());
}

#[test]
fn default_cache_path_sits_beside_catalog() {
    let (catalog, _) = loaded();
    assert_eq!(catalog.default_cache_path(), fixtures().join("catalog.txt.idx"));
}
