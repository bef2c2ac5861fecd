//! The committed fixture files are exactly the canonical print of the
//! builders in `jetreduce_dsl::fixtures`. Regenerate with
//! `REGEN_FIXTURES=1 cargo test -p jetreduce fixtures_golden`.

use std::path::PathBuf;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("fixtures/{name}.jet"))
}

#[test]
fn fixture_files_match_builders() {
    let regen = std::env::var("REGEN_FIXTURES").is_ok();
    for (name, doc) in jetreduce_dsl::fixtures::all() {
        let printed = jetreduce_dsl::print(&doc);
        let path = fixture_path(name);
        if regen {
            std::fs::write(&path, &printed).unwrap();
            continue;
        }
        let on_disk = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; regenerate with REGEN_FIXTURES=1", path.display()));
        assert_eq!(on_disk, printed, "{name}.jet is stale; regenerate with REGEN_FIXTURES=1");
    }
}

#[test]
fn fixture_files_load() {
    for (name, doc) in jetreduce_dsl::fixtures::all() {
        let path = fixture_path(name);
        let source = std::fs::read_to_string(&path).unwrap();
        let loaded = jetreduce_dsl::load(&source)
            .unwrap_or_else(|e| panic!("{name}: {}", e.render(&source)));
        assert_eq!(loaded, doc);
    }
}
