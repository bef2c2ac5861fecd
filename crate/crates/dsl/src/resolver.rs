//! Name resolution: turns the surface syntax into engine values. Jet
//! variables are spelled `q1`, `q1_t`, `q1_tt` over one-dimensional bases
//! and `A12`, `A12_d0`, `A12_d01` otherwise; function symbols apply as
//! `V(q1,q2,q3)` with partials `V_1`, `V_12`; local momentum-map and action
//! rules bind generic section names whose components follow the same jet
//! spelling (`X1`, `X1_d2`).

use crate::ast::*;
use crate::diag::{Diagnostic, ParseResult, Span};
use jetreduce_core::algebra::{ActionRule, AlgebraAction, LieAlgebra};
use jetreduce_core::expr::ScalarExpr;
use jetreduce_core::form::Generator;
use jetreduce_core::jet::{FunApp, JetContext, JetVar, MultiIndex, PARAM_SLOTS};
use jetreduce_core::linfty::{CochainData, MomentumMap};
use jetreduce_core::sample::{Component, FieldSample, Lattice};
use jetreduce_core::scalar::Scalar;
use jetreduce_core::theory::Theory;
use num_traits::Zero;
use jetreduce_core::vector_field::JetVectorField;
use jetreduce_core::{Expr, Form, Rat};

/// A fully resolved document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub theories: Vec<Theory<Rat>>,
    pub algebras: Vec<LieAlgebra<Rat>>,
    pub actions: Vec<ResolvedAction>,
    pub momaps: Vec<ResolvedMomap>,
    pub fields: Vec<ResolvedField>,
    pub checks: Vec<ResolvedCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedAction {
    pub action: AlgebraAction<Rat>,
    pub algebra: usize,
    pub theory: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedMomap {
    pub momap: MomentumMap<Rat>,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedField {
    pub sample: FieldSample,
    pub theory: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckKind {
    El,
    Symmetry,
    Momap,
    ZeroLocus,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::El => "el",
            CheckKind::Symmetry => "symmetry",
            CheckKind::Momap => "momap",
            CheckKind::ZeroLocus => "zero_locus",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCheck {
    pub kind: CheckKind,
    pub theory: usize,
    pub action: Option<usize>,
    pub momap: Option<usize>,
    pub fields: Vec<usize>,
}

impl Document {
    pub fn empty() -> Self {
        Document {
            theories: Vec::new(),
            algebras: Vec::new(),
            actions: Vec::new(),
            momaps: Vec::new(),
            fields: Vec::new(),
            checks: Vec::new(),
        }
    }
}

/// Bindings of section binders to parameter slots inside a rule body.
#[derive(Default, Clone)]
pub(crate) struct Binders {
    names: Vec<String>,
}

pub fn resolve(doc: &SourceDoc) -> ParseResult<Document> {
    let mut out = Document::empty();
    let mut names: std::collections::BTreeMap<String, Span> = std::collections::BTreeMap::new();
    for decl in &doc.decls {
        let (name, span) = match decl {
            Decl::Theory(d) => (&d.name, d.span),
            Decl::Algebra(d) => (&d.name, d.span),
            Decl::Action(d) => (&d.name, d.span),
            Decl::Momap(d) => (&d.name, d.span),
            Decl::Field(d) => (&d.name, d.span),
            Decl::Check(_) => continue,
        };
        if names.insert(name.clone(), span).is_some() {
            return Err(Diagnostic::new(span, format!("duplicate declaration `{name}`")));
        }
    }

    for decl in &doc.decls {
        match decl {
            Decl::Theory(d) => {
                let theory = resolve_theory(d)?;
                out.theories.push(theory);
            }
            Decl::Algebra(d) => {
                let algebra = resolve_algebra(d)?;
                out.algebras.push(algebra);
            }
            Decl::Action(d) => {
                let resolved = resolve_action(d, &out)?;
                out.actions.push(resolved);
            }
            Decl::Momap(d) => {
                let resolved = resolve_momap(d, &out)?;
                out.momaps.push(resolved);
            }
            Decl::Field(d) => {
                let resolved = resolve_field(d, &out)?;
                out.fields.push(resolved);
            }
            Decl::Check(d) => {
                let resolved = resolve_check(d, &out)?;
                out.checks.push(resolved);
            }
        }
    }
    Ok(out)
}

fn find_theory<'a>(doc: &'a Document, name: &str, span: Span) -> ParseResult<(usize, &'a Theory<Rat>)> {
    doc.theories
        .iter()
        .position(|t| t.name == name)
        .map(|i| (i, &doc.theories[i]))
        .ok_or_else(|| Diagnostic::new(span, format!("unknown theory `{name}`")))
}

fn find_algebra<'a>(
    doc: &'a Document,
    name: &str,
    span: Span,
) -> ParseResult<(usize, &'a LieAlgebra<Rat>)> {
    doc.algebras
        .iter()
        .position(|a| a.name == name)
        .map(|i| (i, &doc.algebras[i]))
        .ok_or_else(|| Diagnostic::new(span, format!("unknown algebra `{name}`")))
}

fn resolve_theory(d: &TheoryDecl) -> ParseResult<Theory<Rat>> {
    if d.coords.len() != d.base_dim as usize {
        return Err(Diagnostic::new(
            d.span,
            format!("base dimension {} but {} coordinates", d.base_dim, d.coords.len()),
        ));
    }
    let groups: Vec<(String, Vec<usize>)> = d
        .fields
        .iter()
        .map(|(n, dims)| (n.clone(), dims.iter().map(|&x| x as usize).collect()))
        .collect();
    let mut ctx = JetContext::new(d.coords.clone(), groups);
    if let Some(p) = d.params {
        ctx = ctx.with_params(p as usize);
    }
    if let Some(j) = d.jets {
        ctx = ctx.with_jet_order(j as u32);
    }
    for (fname, args) in &d.functions {
        let arg_vars: Vec<JetVar> = args
            .iter()
            .map(|a| {
                resolve_jet_name(a, &ctx, &Binders::default())
                    .ok_or_else(|| Diagnostic::new(d.span, format!("unknown function argument `{a}`")))
            })
            .collect::<ParseResult<_>>()?;
        ctx.declare_function(fname.clone(), arg_vars);
    }
    let binders = Binders::default();
    let density = resolve_expr(&d.lagrangian, &ctx, &binders)?;
    let mut theory = Theory::new(d.name.clone(), ctx, density)
        .map_err(|e| Diagnostic::new(d.span, e.to_string()))?;
    if let Some(g) = &d.gamma {
        theory.gamma_override = Some(resolve_form(g, &theory.ctx, &binders)?);
    }
    if let Some(w) = &d.omega {
        theory.omega_override = Some(resolve_form(w, &theory.ctx, &binders)?);
    }
    Ok(theory)
}

fn resolve_algebra(d: &AlgebraDecl) -> ParseResult<LieAlgebra<Rat>> {
    let m = d.basis.len();
    let index = |name: &str, span: Span| -> ParseResult<usize> {
        d.basis
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| Diagnostic::new(span, format!("unknown basis element `{name}`")))
    };
    let mut constants = vec![vec![vec![Rat::from_i64(0); m]; m]; m];
    for (a, b, combo, span) in &d.brackets {
        let i = index(a, *span)?;
        let j = index(b, *span)?;
        for (coeff, target) in combo {
            let k = index(target, *span)?;
            constants[i][j][k] = coeff.clone();
            constants[j][i][k] = -coeff.clone();
        }
    }
    LieAlgebra::new(d.name.clone(), d.basis.clone(), constants, d.local)
        .map_err(|e| Diagnostic::new(d.span, e.to_string()))
}

fn resolve_action(d: &ActionDecl, doc: &Document) -> ParseResult<ResolvedAction> {
    let (alg_idx, algebra) = find_algebra(doc, &d.algebra, d.span)?;
    let (theory_idx, theory) = find_theory(doc, &d.theory, d.span)?;
    let ctx = &theory.ctx;

    let build_field = |rule: &ActionRuleDecl, binders: &Binders| -> ParseResult<JetVectorField<Rat>> {
        let mut characteristic = vec![Expr::zero(); ctx.num_fields()];
        for (comp, e) in &rule.vertical {
            let idx = ctx
                .field_index(comp)
                .ok_or_else(|| Diagnostic::new(rule.span, format!("unknown field component `{comp}`")))?;
            characteristic[idx] = characteristic[idx].add(&resolve_expr(e, ctx, binders)?);
        }
        let mut horizontal = vec![Expr::zero(); ctx.dim()];
        for (coord, e) in &rule.lift {
            let idx = ctx
                .base_index(coord)
                .ok_or_else(|| Diagnostic::new(rule.span, format!("unknown coordinate `{coord}`")))?;
            horizontal[idx] = horizontal[idx].add(&resolve_expr(e, ctx, binders)?);
        }
        JetVectorField::vertical(ctx, characteristic)
            .and_then(|vf| vf.with_horizontal(horizontal))
            .map_err(|e| Diagnostic::new(rule.span, e.to_string()))
    };

    let rule = if algebra.local {
        if ctx.param_dim != Some(algebra.dim()) {
            return Err(Diagnostic::new(
                d.span,
                "local algebra requires the theory to declare a matching parameter bundle",
            ));
        }
        if d.rules.len() != 1 {
            return Err(Diagnostic::new(
                d.span,
                "a local action takes exactly one rule over a generic section",
            ));
        }
        let rule = &d.rules[0];
        let binders = Binders { names: vec![rule.binder.clone()] };
        ActionRule::Local(build_field(rule, &binders)?)
    } else {
        let mut fields = vec![None; algebra.dim()];
        for rule in &d.rules {
            let idx = algebra
                .basis
                .iter()
                .position(|b| *b == rule.binder)
                .ok_or_else(|| {
                    Diagnostic::new(rule.span, format!("unknown basis element `{}`", rule.binder))
                })?;
            fields[idx] = Some(build_field(rule, &Binders::default())?);
        }
        ActionRule::Global(
            fields
                .into_iter()
                .map(|f| f.unwrap_or_else(|| JetVectorField::zero(ctx)))
                .collect(),
        )
    };

    Ok(ResolvedAction {
        action: AlgebraAction { name: d.name.clone(), rule },
        algebra: alg_idx,
        theory: theory_idx,
    })
}

fn resolve_momap(d: &MomapDecl, doc: &Document) -> ParseResult<ResolvedMomap> {
    let action_idx = doc
        .actions
        .iter()
        .position(|a| a.action.name == d.action)
        .ok_or_else(|| Diagnostic::new(d.span, format!("unknown action `{}`", d.action)))?;
    let resolved_action = &doc.actions[action_idx];
    let algebra = &doc.algebras[resolved_action.algebra];
    let theory = &doc.theories[resolved_action.theory];
    let ctx = &theory.ctx;

    let max_arity = d.components.iter().map(|c| c.arity as usize).max().unwrap_or(0);
    if algebra.local && max_arity > PARAM_SLOTS {
        return Err(Diagnostic::new(d.span, format!("arity above {PARAM_SLOTS} is not supported")));
    }
    let mut components: Vec<CochainData<Rat>> = (0..max_arity)
        .map(|_| {
            if algebra.local {
                CochainData::Local(Form::zero())
            } else {
                CochainData::Global(std::collections::BTreeMap::new())
            }
        })
        .collect();

    for mu in &d.components {
        let arity = mu.arity as usize;
        if arity == 0 || mu.pattern.len() != arity {
            return Err(Diagnostic::new(
                mu.span,
                format!("mu {} takes a wedge of {} elements", mu.arity, mu.arity),
            ));
        }
        if algebra.local {
            let binders = Binders { names: mu.pattern.clone() };
            let value = resolve_form(&mu.value, ctx, &binders)?;
            match &mut components[arity - 1] {
                CochainData::Local(existing) => {
                    if !existing.is_zero() {
                        return Err(Diagnostic::new(
                            mu.span,
                            format!("duplicate local component mu {arity}"),
                        ));
                    }
                    *existing = value;
                }
                CochainData::Global(_) => unreachable!(),
            }
        } else {
            let tuple: Vec<usize> = mu
                .pattern
                .iter()
                .map(|name| {
                    algebra.basis.iter().position(|b| b == name).ok_or_else(|| {
                        Diagnostic::new(mu.span, format!("unknown basis element `{name}`"))
                    })
                })
                .collect::<ParseResult<_>>()?;
            if tuple.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Diagnostic::new(
                    mu.span,
                    "wedge pattern must list basis elements in strictly increasing order",
                ));
            }
            let value = resolve_form(&mu.value, ctx, &Binders::default())?;
            match &mut components[arity - 1] {
                CochainData::Global(map) => {
                    if map.insert(tuple, value).is_some() {
                        return Err(Diagnostic::new(mu.span, "duplicate wedge pattern"));
                    }
                }
                CochainData::Local(_) => unreachable!(),
            }
        }
    }

    Ok(ResolvedMomap {
        momap: MomentumMap { name: d.name.clone(), components }.normalized(),
        action: action_idx,
    })
}

fn resolve_field(d: &FieldDecl, doc: &Document) -> ParseResult<ResolvedField> {
    let (theory_idx, theory) = find_theory(doc, &d.theory, d.span)?;
    let ctx = &theory.ctx;
    let lattice = match &d.grid {
        None => None,
        Some(g) => {
            if g.axes.len() != ctx.dim() {
                return Err(Diagnostic::new(g.span, "grid axes must match the base dimension"));
            }
            let mut origin = Vec::new();
            let mut spacing = Vec::new();
            let mut shape = Vec::new();
            for (i, (coord, start, end, count)) in g.axes.iter().enumerate() {
                if ctx.base_index(coord) != Some(i) {
                    return Err(Diagnostic::new(
                        g.span,
                        "grid axes must list the base coordinates in order",
                    ));
                }
                if *count < 2 {
                    return Err(Diagnostic::new(g.span, "grid axes need at least 2 points"));
                }
                let t0 = start.to_f64();
                let t1 = end.to_f64();
                origin.push(t0);
                spacing.push((t1 - t0) / (*count as f64 - 1.0));
                shape.push(*count as usize);
            }
            Some(Lattice { origin, spacing, shape })
        }
    };

    let mut components: Vec<Option<Component>> = vec![None; ctx.num_fields()];
    for (comp, value, span) in &d.components {
        let idx = ctx
            .field_index(comp)
            .ok_or_else(|| Diagnostic::new(*span, format!("unknown field component `{comp}`")))?;
        let resolved = match value {
            ComponentDecl::Closed(e) => Component::Closed(resolve_expr(e, ctx, &Binders::default())?),
            ComponentDecl::Samples(values) => {
                let Some(lat) = &lattice else {
                    return Err(Diagnostic::new(*span, "sample lists require a grid declaration"));
                };
                if values.len() != lat.len() {
                    return Err(Diagnostic::new(
                        *span,
                        format!("expected {} samples, got {}", lat.len(), values.len()),
                    ));
                }
                Component::Grid(values.iter().map(|r| r.to_f64()).collect())
            }
        };
        if components[idx].replace(resolved).is_some() {
            return Err(Diagnostic::new(*span, format!("duplicate component `{comp}`")));
        }
    }
    let components: Vec<Component> = components
        .into_iter()
        .map(|c| c.unwrap_or_else(|| Component::Closed(ScalarExpr::zero())))
        .collect();

    // Closed components must reference base coordinates only.
    for (i, c) in components.iter().enumerate() {
        if let Component::Closed(e) = c {
            if e.variables().iter().any(|v| !matches!(v, JetVar::Base(_))) {
                return Err(Diagnostic::new(
                    d.span,
                    format!(
                        "component `{}` must be a function of the base coordinates",
                        ctx.fields[i]
                    ),
                ));
            }
        }
    }

    let sample = FieldSample { label: d.name.clone(), components, lattice };
    Ok(ResolvedField { sample, theory: theory_idx })
}

fn resolve_check(d: &CheckDecl, doc: &Document) -> ParseResult<ResolvedCheck> {
    let arg = |i: usize| -> ParseResult<&String> {
        d.args
            .get(i)
            .ok_or_else(|| Diagnostic::new(d.span, format!("check `{}` is missing arguments", d.kind)))
    };
    let theory_of = |name: &str| -> ParseResult<usize> {
        find_theory(doc, name, d.span).map(|(i, _)| i)
    };
    let action_of = |name: &str| -> ParseResult<usize> {
        doc.actions
            .iter()
            .position(|a| a.action.name == name)
            .ok_or_else(|| Diagnostic::new(d.span, format!("unknown action `{name}`")))
    };
    match d.kind.as_str() {
        "el" => Ok(ResolvedCheck {
            kind: CheckKind::El,
            theory: theory_of(arg(0)?)?,
            action: None,
            momap: None,
            fields: Vec::new(),
        }),
        "symmetry" => {
            let theory = theory_of(arg(0)?)?;
            let action = action_of(arg(1)?)?;
            if doc.actions[action].theory != theory {
                return Err(Diagnostic::new(d.span, "action does not act on this theory"));
            }
            Ok(ResolvedCheck {
                kind: CheckKind::Symmetry,
                theory,
                action: Some(action),
                momap: None,
                fields: Vec::new(),
            })
        }
        "momap" | "zero_locus" => {
            let theory = theory_of(arg(0)?)?;
            let action = action_of(arg(1)?)?;
            if doc.actions[action].theory != theory {
                return Err(Diagnostic::new(d.span, "action does not act on this theory"));
            }
            let momap_name = arg(2)?;
            let momap = doc
                .momaps
                .iter()
                .position(|m| m.momap.name == *momap_name)
                .ok_or_else(|| Diagnostic::new(d.span, format!("unknown momap `{momap_name}`")))?;
            if doc.momaps[momap].action != action {
                return Err(Diagnostic::new(d.span, "momap belongs to a different action"));
            }
            if d.kind == "momap" {
                Ok(ResolvedCheck {
                    kind: CheckKind::Momap,
                    theory,
                    action: Some(action),
                    momap: Some(momap),
                    fields: Vec::new(),
                })
            } else {
                let mut fields = Vec::new();
                for name in &d.args[3..] {
                    let idx = doc
                        .fields
                        .iter()
                        .position(|f| f.sample.label == *name)
                        .ok_or_else(|| Diagnostic::new(d.span, format!("unknown field `{name}`")))?;
                    if doc.fields[idx].theory != theory {
                        return Err(Diagnostic::new(d.span, "field sample lives on another theory"));
                    }
                    fields.push(idx);
                }
                Ok(ResolvedCheck {
                    kind: CheckKind::ZeroLocus,
                    theory,
                    action: Some(action),
                    momap: Some(momap),
                    fields,
                })
            }
        }
        other => Err(Diagnostic::expecting(
            d.span,
            format!("unknown check `{other}`"),
            vec!["`el`".into(), "`symmetry`".into(), "`momap`".into(), "`zero_locus`".into()],
        )),
    }
}

// ----- identifier and expression resolution --------------------------------

/// Parse a derivative suffix against the context: repeated single-character
/// coordinate names over a 1-dimensional base (`t`, `tt`), or `d` followed
/// by axis digits (`d0`, `d01`).
fn parse_suffix(suffix: &str, ctx: &JetContext) -> Option<MultiIndex> {
    let n = ctx.dim();
    if n == 1 {
        let coord = &ctx.base[0];
        if !coord.is_empty() && suffix.len().is_multiple_of(coord.len()) {
            let reps = suffix.len() / coord.len();
            if reps > 0 && suffix == coord.repeat(reps) {
                return Some(MultiIndex(vec![reps as u32]));
            }
        }
    }
    let digits = suffix.strip_prefix('d')?;
    if digits.is_empty() {
        return None;
    }
    let mut index = MultiIndex::zero(n);
    for ch in digits.chars() {
        let axis = ch.to_digit(10)? as usize;
        if axis >= n {
            return None;
        }
        index.0[axis] += 1;
    }
    Some(index)
}

/// Resolve an identifier as a jet variable (base coordinate, field jet, or
/// bound parameter-section jet).
fn resolve_jet_name(name: &str, ctx: &JetContext, binders: &Binders) -> Option<JetVar> {
    if let Some(mu) = ctx.base_index(name) {
        return Some(JetVar::Base(mu));
    }
    let (stem, index) = match name.rsplit_once('_') {
        None => (name, MultiIndex::zero(ctx.dim())),
        Some((stem, suffix)) => match parse_suffix(suffix, ctx) {
            Some(idx) => (stem, idx),
            None => (name, MultiIndex::zero(ctx.dim())),
        },
    };
    if let Some(comp) = ctx.field_index(stem) {
        return Some(JetVar::field(comp, index));
    }
    // Bound section components: binder name followed by a 1-based component
    // digit sequence, e.g. `X1`.
    for (slot, binder) in binders.names.iter().enumerate() {
        if let Some(digits) = stem.strip_prefix(binder.as_str()) {
            if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                let comp: usize = digits.parse().ok()?;
                if let Some(dim) = ctx.param_dim {
                    if comp >= 1 && comp <= dim {
                        return Some(JetVar::param(slot, comp - 1, index));
                    }
                }
            }
        }
    }
    None
}

/// Resolve a function-symbol head like `V` or `V_12`.
fn resolve_function(name: &str, ctx: &JetContext) -> Option<FunApp> {
    let (stem, der_digits) = match name.rsplit_once('_') {
        None => (name, ""),
        Some((stem, suffix)) if suffix.chars().all(|c| c.is_ascii_digit()) && !suffix.is_empty() => {
            (stem, suffix)
        }
        Some(_) => (name, ""),
    };
    let symbol = ctx.functions.iter().position(|f| f.name == stem)?;
    let arity = ctx.functions[symbol].args.len();
    let mut der = vec![0u32; arity];
    for ch in der_digits.chars() {
        let slot = ch.to_digit(10)? as usize;
        if slot < 1 || slot > arity {
            return None;
        }
        der[slot - 1] += 1;
    }
    Some(FunApp { symbol, der })
}

pub(crate) fn resolve_expr(
    node: &ExprNode,
    ctx: &JetContext,
    binders: &Binders,
) -> ParseResult<Expr> {
    resolve_expr_inner(node, ctx, binders)
}

fn resolve_expr_inner(node: &ExprNode, ctx: &JetContext, binders: &Binders) -> ParseResult<Expr> {
    match node {
        ExprNode::Number(r, _) => Ok(Expr::constant(r.clone())),
        ExprNode::Ident(name, span) => {
            if let Some(v) = resolve_jet_name(name, ctx, binders) {
                ctx.check_var(&v).map_err(|e| Diagnostic::new(*span, e.to_string()))?;
                return Ok(Expr::var(v));
            }
            Err(Diagnostic::new(*span, format!("undeclared variable `{name}`")))
        }
        ExprNode::Apply(name, args, span) => {
            let Some(app) = resolve_function(name, ctx) else {
                return Err(Diagnostic::new(*span, format!("unknown function `{name}`")));
            };
            let decl = &ctx.functions[app.symbol];
            if args.len() != decl.args.len() {
                return Err(Diagnostic::new(
                    *span,
                    format!("`{}` takes {} arguments", decl.name, decl.args.len()),
                ));
            }
            // Arguments are fixed at declaration; check they match.
            for (given, declared) in args.iter().zip(&decl.args) {
                match given {
                    ExprNode::Ident(n, aspan) => {
                        let v = resolve_jet_name(n, ctx, binders)
                            .ok_or_else(|| Diagnostic::new(*aspan, format!("undeclared variable `{n}`")))?;
                        if v != *declared {
                            return Err(Diagnostic::new(
                                *aspan,
                                format!("`{}` must be applied to its declared arguments", decl.name),
                            ));
                        }
                    }
                    other => {
                        return Err(Diagnostic::new(
                            other.span(),
                            format!("`{}` must be applied to its declared arguments", decl.name),
                        ))
                    }
                }
            }
            Ok(Expr::fun(app))
        }
        ExprNode::Neg(a) => Ok(resolve_expr_inner(a, ctx, binders)?.neg()),
        ExprNode::Add(a, b) => {
            Ok(resolve_expr_inner(a, ctx, binders)?.add(&resolve_expr_inner(b, ctx, binders)?))
        }
        ExprNode::Sub(a, b) => {
            Ok(resolve_expr_inner(a, ctx, binders)?.sub(&resolve_expr_inner(b, ctx, binders)?))
        }
        ExprNode::Mul(a, b) => {
            Ok(resolve_expr_inner(a, ctx, binders)?.mul(&resolve_expr_inner(b, ctx, binders)?))
        }
        ExprNode::Div(a, b) => {
            let num = resolve_expr_inner(a, ctx, binders)?;
            let den = resolve_expr_inner(b, ctx, binders)?;
            let c = den.as_constant().ok_or_else(|| {
                Diagnostic::new(b.span(), "division by a non-constant expression")
            })?;
            if c.is_zero() {
                return Err(Diagnostic::new(b.span(), "division by zero"));
            }
            Ok(num.scale(&(Rat::from_i64(1) / c)))
        }
        ExprNode::Pow(a, k, span) => {
            let base = resolve_expr_inner(a, ctx, binders)?;
            if *k < 0 {
                let c = base.as_constant().ok_or_else(|| {
                    Diagnostic::new(*span, "negative power of a non-constant expression")
                })?;
                if c.is_zero() {
                    return Err(Diagnostic::new(*span, "division by zero"));
                }
                return Ok(Expr::constant((Rat::from_i64(1) / c).pow((-k) as i32)));
            }
            Ok(base.pow(*k as u32))
        }
    }
}

pub(crate) fn resolve_form(
    node: &FormNode,
    ctx: &JetContext,
    binders: &Binders,
) -> ParseResult<Form> {
    match node {
        FormNode::Scalar(e) => Ok(Form::scalar(resolve_expr(e, ctx, binders)?)),
        FormNode::Horizontal(coord, span) => {
            let mu = ctx
                .base_index(coord)
                .ok_or_else(|| Diagnostic::new(*span, format!("unknown coordinate `{coord}`")))?;
            Ok(Form::generator(Generator::Horizontal(mu)))
        }
        FormNode::Vertical(name, span) => {
            let v = resolve_jet_name(name, ctx, binders)
                .ok_or_else(|| Diagnostic::new(*span, format!("undeclared variable `{name}`")))?;
            let g = match v {
                JetVar::FieldJet { comp, index } => Generator::VerticalField { comp, index },
                JetVar::ParamJet { slot, comp, index } => {
                    Generator::VerticalParam { slot, comp, index }
                }
                JetVar::Base(_) => {
                    return Err(Diagnostic::new(
                        *span,
                        "v(...) takes a field or parameter jet; use d(...) for coordinates",
                    ))
                }
            };
            Ok(Form::generator(g))
        }
        FormNode::Neg(a) => Ok(resolve_form(a, ctx, binders)?.neg()),
        FormNode::Add(a, b) => {
            Ok(resolve_form(a, ctx, binders)?.add(&resolve_form(b, ctx, binders)?))
        }
        FormNode::Sub(a, b) => {
            Ok(resolve_form(a, ctx, binders)?.sub(&resolve_form(b, ctx, binders)?))
        }
        FormNode::Wedge(a, b) => {
            Ok(resolve_form(a, ctx, binders)?.wedge(&resolve_form(b, ctx, binders)?))
        }
    }
}
