//! Deterministic renderers for forms: plain text (re-parseable by the DSL)
//! and LaTeX. Terms follow the canonical internal order; within a term the
//! generators are displayed vertical-first with the highest jets leading,
//! matching the usual typography (`v(q1_t)^^v(q1)`, `v(q1)^^d(t)`), with the
//! reordering sign folded into the coefficient.

use crate::form::{BigradedForm, Generator};
use crate::jet::JetContext;
use crate::scalar::Scalar;

/// Display order for one term: verticals in descending canonical order, then
/// horizontals ascending; returns the permutation parity (true = odd).
fn display_order(gens: &[Generator]) -> (Vec<Generator>, bool) {
    let mut verticals: Vec<Generator> =
        gens.iter().filter(|g| g.is_vertical()).cloned().collect();
    verticals.reverse();
    let horizontals: Vec<Generator> =
        gens.iter().filter(|g| g.is_horizontal()).cloned().collect();
    let mut display = verticals;
    display.extend(horizontals);
    // Parity of the permutation mapping the canonical list onto `display`.
    let mut perm: Vec<usize> = display
        .iter()
        .map(|g| gens.iter().position(|h| h == g).expect("same multiset"))
        .collect();
    let mut odd = false;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            odd = !odd;
        }
    }
    (display, odd)
}

fn generator_text(g: &Generator, ctx: &JetContext) -> String {
    match g {
        Generator::Horizontal(mu) => format!("d({})", ctx.base[*mu]),
        vertical => format!(
            "v({})",
            ctx.var_name(&vertical.jet_var().expect("vertical generator"))
        ),
    }
}

fn generator_latex(g: &Generator, ctx: &JetContext) -> String {
    match g {
        Generator::Horizontal(mu) => format!("\\mathrm{{d}}{}", latex_sub(&ctx.base[*mu])),
        vertical => format!(
            "\\delta {}",
            latex_sub(&ctx.var_name(&vertical.jet_var().expect("vertical generator")))
        ),
    }
}

fn latex_sub(name: &str) -> String {
    match name.split_once('_') {
        Some((stem, suffix)) => format!("{stem}_{{{suffix}}}"),
        None => name.to_string(),
    }
}

/// Plain-text rendering; `0` for the zero form.
pub fn form_text<C: Scalar>(form: &BigradedForm<C>, ctx: &JetContext) -> String {
    if form.is_zero() {
        return "0".to_string();
    }
    let mut pieces = Vec::new();
    for (gens, coeff) in form.terms() {
        let (display, odd) = display_order(gens);
        let coeff = if odd { coeff.neg() } else { coeff.clone() };
        let coeff_str = coeff.display(ctx);
        let gens_str: Vec<String> = display.iter().map(|g| generator_text(g, ctx)).collect();
        let piece = if gens_str.is_empty() {
            coeff_str
        } else if coeff_str == "1" {
            gens_str.join("^^")
        } else if coeff_str == "-1" {
            format!("-{}", gens_str.join("^^"))
        } else if coeff.num_terms() > 1 {
            format!("({})*{}", coeff_str, gens_str.join("^^"))
        } else {
            format!("{}*{}", coeff_str, gens_str.join("^^"))
        };
        pieces.push(piece);
    }
    let mut out = String::new();
    for (i, piece) in pieces.iter().enumerate() {
        if i == 0 {
            out.push_str(piece);
        } else if let Some(stripped) = piece.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(piece);
        }
    }
    out
}

/// LaTeX rendering with `\delta` contact generators and `\wedge` products.
pub fn form_latex<C: Scalar>(form: &BigradedForm<C>, ctx: &JetContext) -> String {
    if form.is_zero() {
        return "0".to_string();
    }
    let mut pieces = Vec::new();
    for (gens, coeff) in form.terms() {
        let (display, odd) = display_order(gens);
        let coeff = if odd { coeff.neg() } else { coeff.clone() };
        let coeff_str = coeff.latex(ctx);
        let gens_str: Vec<String> = display.iter().map(|g| generator_latex(g, ctx)).collect();
        let piece = if gens_str.is_empty() {
            coeff_str
        } else if coeff_str == "1" {
            gens_str.join(" \\wedge ")
        } else if coeff_str == "-1" {
            format!("-{}", gens_str.join(" \\wedge "))
        } else if coeff.num_terms() > 1 {
            format!("\\left({}\\right) {}", coeff_str, gens_str.join(" \\wedge "))
        } else {
            format!("{} \\, {}", coeff_str, gens_str.join(" \\wedge "))
        };
        pieces.push(piece);
    }
    let mut out = String::new();
    for (i, piece) in pieces.iter().enumerate() {
        if i == 0 {
            out.push_str(piece);
        } else if let Some(stripped) = piece.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(piece);
        }
    }
    out
}
