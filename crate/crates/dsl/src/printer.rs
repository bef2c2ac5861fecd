//! Canonical rendering of a resolved document. `parse(print(doc))` resolves
//! to a document structurally equal to `doc`; golden tests diff this output.

use crate::resolver::{CheckKind, Document, ResolvedCheck};
use jetreduce_core::algebra::ActionRule;
use jetreduce_core::jet::{JetContext, SLOT_NAMES};
use jetreduce_core::linfty::CochainData;
use jetreduce_core::print::form_text;
use jetreduce_core::sample::Component;
use jetreduce_core::Rat;
use num_traits::{One, Zero};
use std::fmt::Write as _;

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for theory in &doc.theories {
        print_theory(&mut out, theory);
    }
    for algebra in &doc.algebras {
        print_algebra(&mut out, algebra);
    }
    for action in &doc.actions {
        print_action(&mut out, doc, action);
    }
    for momap in &doc.momaps {
        print_momap(&mut out, doc, momap);
    }
    for field in &doc.fields {
        print_field(&mut out, doc, field);
    }
    for check in &doc.checks {
        print_check(&mut out, doc, check);
    }
    out
}

fn rat(r: &Rat) -> String {
    format!("{r}")
}

fn print_theory(out: &mut String, theory: &jetreduce_core::theory::Theory<Rat>) {
    let ctx = &theory.ctx;
    writeln!(out, "theory {} {{", theory.name).unwrap();
    write!(out, "  base {} coords [", ctx.dim()).unwrap();
    out.push_str(&ctx.base.join(", "));
    writeln!(out, "];").unwrap();
    let fields: Vec<String> = ctx
        .field_groups
        .iter()
        .map(|g| {
            if g.dims.is_empty() {
                g.name.clone()
            } else {
                let dims: Vec<String> = g.dims.iter().map(|d| d.to_string()).collect();
                format!("{}[{}]", g.name, dims.join(", "))
            }
        })
        .collect();
    writeln!(out, "  fields {};", fields.join(", ")).unwrap();
    if let Some(p) = ctx.param_dim {
        writeln!(out, "  params {p};").unwrap();
    }
    writeln!(out, "  jets {};", ctx.jet_order).unwrap();
    if !ctx.functions.is_empty() {
        let fns: Vec<String> = ctx
            .functions
            .iter()
            .map(|f| {
                let args: Vec<String> = f.args.iter().map(|a| ctx.var_name(a)).collect();
                format!("{}({})", f.name, args.join(", "))
            })
            .collect();
        writeln!(out, "  functions {};", fns.join(", ")).unwrap();
    }
    writeln!(out, "  lagrangian = {};", theory.density.display(ctx)).unwrap();
    if let Some(g) = &theory.gamma_override {
        writeln!(out, "  gamma = {};", form_text(g, ctx)).unwrap();
    }
    if let Some(w) = &theory.omega_override {
        writeln!(out, "  omega = {};", form_text(w, ctx)).unwrap();
    }
    writeln!(out, "}}").unwrap();
}

fn print_algebra(out: &mut String, algebra: &jetreduce_core::algebra::LieAlgebra<Rat>) {
    writeln!(out, "algebra {} {{", algebra.name).unwrap();
    writeln!(out, "  basis [{}];", algebra.basis.join(", ")).unwrap();
    let m = algebra.dim();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let combo: Vec<String> = (0..m)
                .filter(|&k| !algebra.constants[i][j][k].is_zero())
                .map(|k| {
                    let c = &algebra.constants[i][j][k];
                    if c.is_one() {
                        algebra.basis[k].clone()
                    } else {
                        format!("{}*{}", rat(c), algebra.basis[k])
                    }
                })
                .collect();
            if !combo.is_empty() {
                entries.push(format!(
                    "    [{}, {}] = {};",
                    algebra.basis[i],
                    algebra.basis[j],
                    combo.join(" + ").replace("+ -", "- ")
                ));
            }
        }
    }
    if !entries.is_empty() {
        writeln!(out, "  brackets {{").unwrap();
        for e in entries {
            writeln!(out, "{e}").unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    if algebra.local {
        writeln!(out, "  local;").unwrap();
    }
    writeln!(out, "}}").unwrap();
}

fn vector_field_text(
    vf: &jetreduce_core::vector_field::JetVectorField<Rat>,
    ctx: &JetContext,
) -> String {
    let mut parts = Vec::new();
    let vertical: Vec<String> = vf
        .characteristic
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(i, e)| format!("{} = {}", ctx.fields[i], e.display(ctx)))
        .collect();
    parts.push(format!("ev({})", vertical.join(", ")));
    let lift: Vec<String> = vf
        .horizontal
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(mu, e)| format!("{} = {}", ctx.base[mu], e.display(ctx)))
        .collect();
    if !lift.is_empty() {
        parts.push(format!("lift({})", lift.join(", ")));
    }
    parts.join(" + ")
}

fn print_action(out: &mut String, doc: &Document, action: &crate::resolver::ResolvedAction) {
    let algebra = &doc.algebras[action.algebra];
    let theory = &doc.theories[action.theory];
    let ctx = &theory.ctx;
    writeln!(
        out,
        "action {} of {} on {} {{",
        action.action.name, algebra.name, theory.name
    )
    .unwrap();
    match &action.action.rule {
        ActionRule::Global(fields) => {
            for (i, vf) in fields.iter().enumerate() {
                if vf.is_zero() {
                    continue;
                }
                writeln!(out, "  {} -> {};", algebra.basis[i], vector_field_text(vf, ctx)).unwrap();
            }
        }
        ActionRule::Local(template) => {
            writeln!(out, "  {} -> {};", SLOT_NAMES[0], vector_field_text(template, ctx)).unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
}

fn print_momap(out: &mut String, doc: &Document, momap: &crate::resolver::ResolvedMomap) {
    let action = &doc.actions[momap.action];
    let algebra = &doc.algebras[action.algebra];
    let ctx = &doc.theories[action.theory].ctx;
    writeln!(out, "momap {} for {} {{", momap.momap.name, action.action.name).unwrap();
    for (idx, data) in momap.momap.components.iter().enumerate() {
        let arity = idx + 1;
        match data {
            CochainData::Global(values) => {
                for (tuple, value) in values {
                    if value.is_zero() {
                        continue;
                    }
                    let pattern: Vec<String> =
                        tuple.iter().map(|&i| algebra.basis[i].clone()).collect();
                    writeln!(
                        out,
                        "  mu {arity} : {} -> {};",
                        pattern.join(" ^ "),
                        form_text(value, ctx)
                    )
                    .unwrap();
                }
            }
            CochainData::Local(template) => {
                if template.is_zero() {
                    continue;
                }
                let pattern: Vec<String> =
                    SLOT_NAMES[..arity].iter().map(|s| s.to_string()).collect();
                writeln!(
                    out,
                    "  mu {arity} : {} -> {};",
                    pattern.join(" ^ "),
                    form_text(template, ctx)
                )
                .unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
}

fn print_field(out: &mut String, doc: &Document, field: &crate::resolver::ResolvedField) {
    let theory = &doc.theories[field.theory];
    let ctx = &theory.ctx;
    writeln!(out, "field {} on {} {{", field.sample.label, theory.name).unwrap();
    if let Some(lat) = &field.sample.lattice {
        let axes: Vec<String> = (0..lat.dim())
            .map(|axis| {
                let end = lat.origin[axis] + lat.spacing[axis] * (lat.shape[axis] - 1) as f64;
                format!(
                    "{} from {:?} to {:?} n {}",
                    ctx.base[axis], lat.origin[axis], end, lat.shape[axis]
                )
            })
            .collect();
        writeln!(out, "  grid {};", axes.join(", ")).unwrap();
    }
    for (i, comp) in field.sample.components.iter().enumerate() {
        match comp {
            Component::Closed(e) => {
                if e.is_zero() {
                    continue;
                }
                writeln!(out, "  {} = {};", ctx.fields[i], e.display(ctx)).unwrap();
            }
            Component::Grid(values) => {
                let rendered: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
                writeln!(out, "  {} = [{}];", ctx.fields[i], rendered.join(", ")).unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
}

fn print_check(out: &mut String, doc: &Document, check: &ResolvedCheck) {
    let mut args = vec![doc.theories[check.theory].name.clone()];
    if let Some(a) = check.action {
        args.push(doc.actions[a].action.name.clone());
    }
    if let Some(m) = check.momap {
        args.push(doc.momaps[m].momap.name.clone());
    }
    for f in &check.fields {
        args.push(doc.fields[*f].sample.label.clone());
    }
    writeln!(out, "check {}({});", check_kind_name(&check.kind), args.join(", ")).unwrap();
}

fn check_kind_name(kind: &CheckKind) -> &'static str {
    kind.name()
}
