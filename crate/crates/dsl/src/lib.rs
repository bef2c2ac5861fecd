//! Text format for theories, symmetry algebras, actions, momentum maps, and
//! field samples, with a recursive-descent parser producing spanned
//! diagnostics and a canonical printer that round-trips through the parser.

pub mod ast;
pub mod diag;
pub mod fixtures;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolver;

pub use diag::{Diagnostic, Span};
pub use printer::print;
pub use resolver::{CheckKind, Document, ResolvedCheck};

/// Parse and resolve a document in one step.
pub fn load(source: &str) -> Result<Document, Diagnostic> {
    let ast = parser::parse(source)?;
    resolver::resolve(&ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MECHANICS: &str = r#"
# Particle of unit mass in a potential.
theory mech {
  base 1 coords [t];
  fields q[3];
  jets 4;
  functions V(q1, q2, q3);
  lagrangian = 1/2*(q1_t^2 + q2_t^2 + q3_t^2) - V(q1, q2, q3);
}
algebra r3 {
  basis [e1, e2, e3];
}
action trans of r3 on mech {
  e1 -> ev(q1 = 1);
  e2 -> ev(q2 = 1);
  e3 -> ev(q3 = 1);
}
momap trans_mu for trans {
  mu 1 : e1 -> q1_t;
  mu 1 : e2 -> q2_t;
  mu 1 : e3 -> q3_t;
}
field lin on mech {
  q1 = t;
  q2 = 2*t;
  q3 = 3*t;
}
check el(mech);
check momap(mech, trans, trans_mu);
check zero_locus(mech, trans, trans_mu, lin);
"#;

    #[test]
    fn mechanics_document_loads() {
        let doc = load(MECHANICS).unwrap();
        assert_eq!(doc.theories.len(), 1);
        assert_eq!(doc.algebras.len(), 1);
        assert_eq!(doc.actions.len(), 1);
        assert_eq!(doc.momaps.len(), 1);
        assert_eq!(doc.fields.len(), 1);
        assert_eq!(doc.checks.len(), 3);
        assert_eq!(doc.theories[0].ctx.fields, vec!["q1", "q2", "q3"]);
    }

    #[test]
    fn round_trip_is_identity_on_resolutions() {
        let doc = load(MECHANICS).unwrap();
        let printed = print(&doc);
        let again =
            load(&printed).unwrap_or_else(|e| panic!("{}\n---\n{}", e.render(&printed), printed));
        assert_eq!(doc, again);
        // And printing is a fixed point.
        assert_eq!(printed, print(&again));
    }

    #[test]
    fn empty_document() {
        let doc = load("").unwrap();
        assert_eq!(doc, Document::empty());
    }

    #[test]
    fn malformed_power_is_spanned() {
        let src = "theory t { base 1 coords [t]; fields q[1]; lagrangian = q1_t^; }";
        let err = load(src).unwrap_err();
        assert!(err.span.start > 0);
        let rendered = err.render(src);
        assert!(rendered.contains("expected"), "{rendered}");
    }

    #[test]
    fn undeclared_variable_is_reported() {
        let src = "theory t { base 1 coords [t]; fields q[1]; lagrangian = q2; }";
        let err = load(src).unwrap_err();
        assert!(err.message.contains("undeclared"), "{}", err.message);
    }
}
