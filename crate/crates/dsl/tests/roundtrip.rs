//! Parser/printer round-trips on fuzzed valid documents and spanned
//! diagnostics on malformed ones.

use jetreduce_dsl::fixtures::fuzz_document;
use jetreduce_dsl::{load, print};

#[test]
fn fuzzed_documents_round_trip() {
    for seed in 0..100u64 {
        let doc = fuzz_document(seed);
        let printed = print(&doc);
        let again = load(&printed)
            .unwrap_or_else(|e| panic!("seed {seed}: {}\n---\n{printed}", e.render(&printed)));
        assert_eq!(doc, again, "seed {seed} does not round-trip:\n{printed}");
        assert_eq!(printed, print(&again), "seed {seed}: print not a fixed point");
    }
}

#[test]
fn malformed_documents_produce_spanned_diagnostics() {
    let cases: Vec<&str> = vec![
        "theory {",
        "theory t { base 1 coords [t]; }",
        "theory t { base 2 coords [t]; fields q; lagrangian = 0; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = q1_t^; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = q1_t^x; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 1/0; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = q9; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = q1^-2; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = V(q1); }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = (q1; }",
        "algebra a { basis [e1; }",
        "algebra a { basis [e1]; brackets { [e1, e2] = e1; } }",
        "algebra a { basis [e1, e2]; brackets { [e1, e2] = 3 q; } }",
        "action a of b on c { }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } action a of b on t { }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } algebra g { basis [e1]; } action a of g on t { e2 -> ev(); }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } algebra g { basis [e1]; } action a of g on t { e1 -> ev(q1 = 1); } momap m for a { mu 0 : e1 -> 0; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } field f on t { q1 = [1, 2]; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } check unknown(t);",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0; } check el(missing);",
        "momap m for ghost { mu 1 : e1 -> 0; }",
        "theory t { base 1 coords [t]; fields q[1]; lagrangian = 0 } ",
    ];
    assert!(cases.len() >= 20);
    for (i, src) in cases.iter().enumerate() {
        match load(src) {
            Ok(_) => panic!("case {i} unexpectedly parsed: {src}"),
            Err(diag) => {
                assert!(diag.span.start <= src.len(), "case {i}: span outside input");
                let rendered = diag.render(src);
                assert!(rendered.contains(':'), "case {i}: {rendered}");
            }
        }
    }
}
