//! Canonical polynomial expressions over jet coordinates and uninterpreted
//! function symbols.
//!
//! An expression is a sum of terms, each an exact coefficient times a
//! monomial in atoms (jet variables or function applications). Terms are kept
//! in a fixed total order with like terms merged and zero terms dropped, so
//! structural equality decides mathematical equality for this class.

use crate::error::{CoreError, Result};
use crate::jet::{FunApp, JetContext, JetVar, MultiIndex};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A multiplicative atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(JetVar),
    Fun(FunApp),
}

/// Sorted list of `(atom, power)` with positive powers and distinct atoms.
pub type Monomial = Vec<(Atom, u32)>;

/// Monomial key with the fixed total term order: total degree descending,
/// then atoms ascending with power descending as tiebreak. Leading terms of
/// a polynomial print first.
#[derive(Debug, Clone, PartialEq, Eq)]
struct MonoKey(Monomial);

impl Ord for MonoKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let da: u32 = self.0.iter().map(|(_, p)| p).sum();
        let db: u32 = other.0.iter().map(|(_, p)| p).sum();
        db.cmp(&da).then_with(|| {
            let mut i = 0;
            loop {
                match (self.0.get(i), other.0.get(i)) {
                    (None, None) => return std::cmp::Ordering::Equal,
                    (None, Some(_)) => return std::cmp::Ordering::Less,
                    (Some(_), None) => return std::cmp::Ordering::Greater,
                    (Some((aa, pa)), Some((ab, pb))) => {
                        let ord = aa.cmp(ab).then(pb.cmp(pa));
                        if ord != std::cmp::Ordering::Equal {
                            return ord;
                        }
                    }
                }
                i += 1;
            }
        })
    }
}

impl PartialOrd for MonoKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical scalar expression with coefficients in `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarExpr<C: Scalar> {
    /// Terms keyed by monomial; values are nonzero.
    terms: BTreeMap<MonoKey, C>,
}

/// Unnormalized expression tree, the input shape of `normalize`.
#[derive(Debug, Clone, PartialEq)]
pub enum RawExpr<C: Scalar> {
    Const(C),
    Var(JetVar),
    Fun(FunApp),
    Add(Vec<RawExpr<C>>),
    Sub(Box<RawExpr<C>>, Box<RawExpr<C>>),
    Neg(Box<RawExpr<C>>),
    Mul(Vec<RawExpr<C>>),
    Div(Box<RawExpr<C>>, Box<RawExpr<C>>),
    Pow(Box<RawExpr<C>>, i64),
}

/// Fold an expression tree into canonical form.
///
/// Normalization is idempotent; re-normalizing the term list of a canonical
/// expression reproduces it.
pub fn normalize<C: Scalar>(raw: &RawExpr<C>, ctx: &JetContext) -> Result<ScalarExpr<C>> {
    match raw {
        RawExpr::Const(c) => Ok(ScalarExpr::constant(c.clone())),
        RawExpr::Var(v) => {
            ctx.check_var(v)?;
            Ok(ScalarExpr::var(v.clone()))
        }
        RawExpr::Fun(app) => {
            if app.symbol >= ctx.functions.len() {
                return Err(CoreError::UndeclaredVariable(format!("function #{}", app.symbol)));
            }
            Ok(ScalarExpr::fun(app.clone()))
        }
        RawExpr::Add(parts) => {
            let mut acc = ScalarExpr::zero();
            for p in parts {
                acc = acc.add(&normalize(p, ctx)?);
            }
            Ok(acc)
        }
        RawExpr::Sub(a, b) => Ok(normalize(a, ctx)?.add(&normalize(b, ctx)?.neg())),
        RawExpr::Neg(a) => Ok(normalize(a, ctx)?.neg()),
        RawExpr::Mul(parts) => {
            let mut acc = ScalarExpr::constant(C::one());
            for p in parts {
                acc = acc.mul(&normalize(p, ctx)?);
            }
            Ok(acc)
        }
        RawExpr::Div(a, b) => {
            let den = normalize(b, ctx)?;
            let inv = den.invert_constant()?;
            Ok(normalize(a, ctx)?.scale(&inv))
        }
        RawExpr::Pow(a, k) => {
            let base = normalize(a, ctx)?;
            if *k >= 0 {
                Ok(base.pow(*k as u32))
            } else {
                // Negative powers only of nonzero constants.
                let inv = base.invert_constant().map_err(|e| match e {
                    CoreError::NonConstantDivisor => CoreError::NegativePower,
                    other => other,
                })?;
                Ok(ScalarExpr::constant(inv).pow((-*k) as u32))
            }
        }
    }
}

impl<C: Scalar> ScalarExpr<C> {
    pub fn zero() -> Self {
        ScalarExpr { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(MonoKey(Vec::new()), c);
        }
        ScalarExpr { terms }
    }

    pub fn int(v: i64) -> Self {
        Self::constant(C::from_i64(v))
    }

    pub fn var(v: JetVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(MonoKey(vec![(Atom::Var(v), 1)]), C::one());
        ScalarExpr { terms }
    }

    pub fn fun(app: FunApp) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(MonoKey(vec![(Atom::Fun(app), 1)]), C::one());
        ScalarExpr { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut acc = ScalarExpr::zero();
        for (m, c) in terms {
            acc.add_term(m, c);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter().map(|(k, c)| (&k.0, c))
    }

    /// The constant term's coefficient, if the expression is a constant.
    pub fn as_constant(&self) -> Option<C> {
        if self.terms.is_empty() {
            return Some(C::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&MonoKey(Vec::new())) {
                return Some(c.clone());
            }
        }
        None
    }

    fn invert_constant(&self) -> Result<C> {
        let c = self.as_constant().ok_or(CoreError::NonConstantDivisor)?;
        if c.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        Ok(C::one() / c)
    }

    fn add_term(&mut self, mono: Monomial, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(MonoKey(mono)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ScalarExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ScalarExpr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k.clone() * c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ScalarExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(merge_monomials(&ma.0, &mb.0), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative with respect to an atom. Distinct jet
    /// coordinates are independent; function applications differentiate via
    /// the chain rule into their registered partial symbols.
    pub fn partial(&self, by: &Atom, ctx: &JetContext) -> Self {
        let mut out = ScalarExpr::zero();
        for (mono, coeff) in self.terms.iter().map(|(k, c)| (&k.0, c)) {
            for (pos, (atom, power)) in mono.iter().enumerate() {
                // d(atom^p)/d(by): the polynomial rule when atom == by, plus
                // the chain rule through function-symbol arguments.
                let inner: Option<ScalarExpr<C>> = match (atom, by) {
                    (a, b) if a == b => Some(ScalarExpr::one()),
                    (Atom::Fun(app), Atom::Var(v)) => {
                        let decl = &ctx.functions[app.symbol];
                        let mut sum = ScalarExpr::zero();
                        for (slot, arg) in decl.args.iter().enumerate() {
                            if arg == v {
                                sum = sum.add(&ScalarExpr::fun(app.derived(slot)));
                            }
                        }
                        if sum.is_zero() {
                            None
                        } else {
                            Some(sum)
                        }
                    }
                    _ => None,
                };
                let Some(inner) = inner else { continue };
                let mut rest: Monomial = Vec::with_capacity(mono.len());
                for (j, entry) in mono.iter().enumerate() {
                    if j == pos {
                        if entry.1 > 1 {
                            rest.push((entry.0.clone(), entry.1 - 1));
                        }
                    } else {
                        rest.push(entry.clone());
                    }
                }
                let piece = ScalarExpr::from_terms([(rest, coeff.clone() * C::from_i64(*power as i64))]);
                out = out.add(&piece.mul(&inner));
            }
        }
        out
    }

    /// Total derivative `D_mu`, accounting for field dependence on the base:
    /// `D_mu = d/dx^mu + sum u^a_{I+mu} d/du^a_I` (and likewise on parameter
    /// jets and through function-symbol arguments).
    pub fn total_derivative(&self, axis: usize, ctx: &JetContext) -> Result<Self> {
        let mut out = ScalarExpr::zero();
        for (mono, coeff) in self.terms.iter().map(|(k, c)| (&k.0, c)) {
            for (pos, (atom, power)) in mono.iter().enumerate() {
                let datom = total_derivative_atom::<C>(atom, axis, ctx)?;
                if datom.is_zero() {
                    continue;
                }
                let mut rest: Monomial = Vec::with_capacity(mono.len());
                for (j, entry) in mono.iter().enumerate() {
                    if j == pos {
                        if entry.1 > 1 {
                            rest.push((entry.0.clone(), entry.1 - 1));
                        }
                    } else {
                        rest.push(entry.clone());
                    }
                }
                let piece = ScalarExpr::from_terms([(rest, coeff.clone() * C::from_i64(*power as i64))]);
                out = out.add(&piece.mul(&datom));
            }
        }
        Ok(out)
    }

    /// Iterated total derivative `D_I`.
    pub fn total_derivative_multi(&self, index: &MultiIndex, ctx: &JetContext) -> Result<Self> {
        let mut out = self.clone();
        for axis in index.axes() {
            out = out.total_derivative(axis, ctx)?;
        }
        Ok(out)
    }

    /// Substitute jet variables by expressions. Atoms not covered by `map`
    /// are kept. Function applications stay formal; their arguments are fixed
    /// declarations, so substituting into them is not meaningful here.
    pub fn substitute_vars(&self, map: &dyn Fn(&JetVar) -> Option<ScalarExpr<C>>) -> Self {
        let mut out = ScalarExpr::zero();
        for (mono, coeff) in self.terms.iter().map(|(k, c)| (&k.0, c)) {
            let mut acc = ScalarExpr::constant(coeff.clone());
            for (atom, power) in mono {
                let factor = match atom {
                    Atom::Var(v) => match map(v) {
                        Some(e) => e,
                        None => ScalarExpr::var(v.clone()),
                    },
                    Atom::Fun(app) => ScalarExpr::fun(app.clone()),
                };
                acc = acc.mul(&factor.pow(*power));
            }
            out = out.add(&acc);
        }
        out
    }

    /// All distinct jet variables appearing in the expression.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut seen = std::collections::BTreeSet::new();
        for key in self.terms.keys() {
            for (atom, _) in &key.0 {
                if let Atom::Var(v) = atom {
                    seen.insert(v.clone());
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Field jets the expression can depend on: plain occurrences plus the
    /// declared arguments of any function symbol present. This is the set a
    /// vertical derivation must differentiate by.
    pub fn field_dependencies(&self, ctx: &JetContext) -> Vec<JetVar> {
        let mut seen = std::collections::BTreeSet::new();
        for key in self.terms.keys() {
            for (atom, _) in &key.0 {
                match atom {
                    Atom::Var(v @ JetVar::FieldJet { .. }) => {
                        seen.insert(v.clone());
                    }
                    Atom::Fun(app) => {
                        for arg in &ctx.functions[app.symbol].args {
                            if matches!(arg, JetVar::FieldJet { .. }) {
                                seen.insert(arg.clone());
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn contains_fun_symbols(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, _)| matches!(a, Atom::Fun(_))))
    }

    /// Degree in fiber variables (field and parameter jets; function
    /// applications count as fiber-dependent through their arguments).
    fn fiber_degree_of(mono: &Monomial, ctx: &JetContext) -> Option<u32> {
        let mut deg = 0u32;
        for (atom, p) in mono {
            match atom {
                Atom::Var(JetVar::Base(_)) => {}
                Atom::Var(_) => deg += p,
                Atom::Fun(app) => {
                    let decl = &ctx.functions[app.symbol];
                    if decl.args.iter().any(|a| !matches!(a, JetVar::Base(_))) {
                        // Not polynomial in the fiber variables.
                        return None;
                    }
                }
            }
        }
        Some(deg)
    }

    /// Split into homogeneous pieces by fiber degree. `None` when the
    /// expression is not polynomial in the fiber variables (a function
    /// symbol depends on them).
    pub fn fiber_homogeneous_parts(&self, ctx: &JetContext) -> Option<BTreeMap<u32, Self>> {
        let mut parts: BTreeMap<u32, Self> = BTreeMap::new();
        for (mono, coeff) in self.terms.iter().map(|(k, c)| (&k.0, c)) {
            let deg = Self::fiber_degree_of(mono, ctx)?;
            parts
                .entry(deg)
                .or_insert_with(ScalarExpr::zero)
                .add_term(mono.clone(), coeff.clone());
        }
        Some(parts)
    }

    /// Map coefficients into another scalar ring.
    pub fn map_coeff<D: Scalar>(&self, f: &dyn Fn(&C) -> D) -> ScalarExpr<D> {
        ScalarExpr {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let d = f(c);
                    if d.is_zero() {
                        None
                    } else {
                        Some((MonoKey(m.0.clone()), d))
                    }
                })
                .collect(),
        }
    }

    /// Numeric evaluation with values supplied per jet variable. Errors on
    /// function symbols (no interpretation) or unassigned variables.
    pub fn eval_f64(&self, value: &dyn Fn(&JetVar) -> Option<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (mono, coeff) in self.terms.iter().map(|(k, c)| (&k.0, c)) {
            let mut prod = coeff.to_f64();
            for (atom, power) in mono {
                match atom {
                    Atom::Var(v) => {
                        let x = value(v).ok_or_else(|| {
                            CoreError::NumericEval(format!("no value for {v:?}"))
                        })?;
                        prod *= x.powi(*power as i32);
                    }
                    Atom::Fun(_) => {
                        return Err(CoreError::NumericEval(
                            "uninterpreted function symbol in numeric context".into(),
                        ))
                    }
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Render with names from the context. Deterministic term order.
    pub fn display(&self, ctx: &JetContext) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (mono, coeff)) in self.terms.iter().map(|(k, c)| (&k.0, c)).enumerate() {
            let neg = coeff.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = Scalar::abs(coeff);
            let coeff_is_one = mag.is_one();
            if !coeff_is_one || mono.is_empty() {
                write!(out, "{mag}").unwrap();
                if !mono.is_empty() {
                    out.push('*');
                }
            }
            for (j, (atom, power)) in mono.iter().enumerate() {
                if j > 0 {
                    out.push('*');
                }
                match atom {
                    Atom::Var(v) => out.push_str(&ctx.var_name(v)),
                    Atom::Fun(app) => {
                        out.push_str(&ctx.fun_name(app));
                        let decl = &ctx.functions[app.symbol];
                        out.push('(');
                        for (k, arg) in decl.args.iter().enumerate() {
                            if k > 0 {
                                out.push(',');
                            }
                            out.push_str(&ctx.var_name(arg));
                        }
                        out.push(')');
                    }
                }
                if *power > 1 {
                    write!(out, "^{power}").unwrap();
                }
            }
        }
        out
    }

    /// LaTeX rendering, same term order as `display`.
    pub fn latex(&self, ctx: &JetContext) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (mono, coeff)) in self.terms.iter().map(|(k, c)| (&k.0, c)).enumerate() {
            let neg = coeff.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = Scalar::abs(coeff);
            if !mag.is_one() || mono.is_empty() {
                write!(out, "{mag}").unwrap();
                if !mono.is_empty() {
                    out.push_str(r"\,");
                }
            }
            for (j, (atom, power)) in mono.iter().enumerate() {
                if j > 0 {
                    out.push_str(r"\,");
                }
                let name = match atom {
                    Atom::Var(v) => latex_name(&ctx.var_name(v)),
                    Atom::Fun(app) => latex_name(&ctx.fun_name(app)),
                };
                out.push_str(&name);
                if *power > 1 {
                    write!(out, "^{{{power}}}").unwrap();
                }
            }
        }
        out
    }
}

fn latex_name(name: &str) -> String {
    match name.split_once('_') {
        Some((stem, suffix)) => format!("{stem}_{{{suffix}}}"),
        None => name.to_string(),
    }
}

fn total_derivative_atom<C: Scalar>(
    atom: &Atom,
    axis: usize,
    ctx: &JetContext,
) -> Result<ScalarExpr<C>> {
    match atom {
        Atom::Var(JetVar::Base(mu)) => Ok(if *mu == axis {
            ScalarExpr::one()
        } else {
            ScalarExpr::zero()
        }),
        Atom::Var(JetVar::FieldJet { comp, index }) => {
            let raised = index.raised(axis, ctx.jet_order)?;
            Ok(ScalarExpr::var(JetVar::field(*comp, raised)))
        }
        Atom::Var(JetVar::ParamJet { slot, comp, index }) => {
            let raised = index.raised(axis, ctx.jet_order)?;
            Ok(ScalarExpr::var(JetVar::param(*slot, *comp, raised)))
        }
        Atom::Fun(app) => {
            // Chain rule through the declared arguments.
            let decl = &ctx.functions[app.symbol];
            let mut sum = ScalarExpr::zero();
            for (slot, arg) in decl.args.iter().enumerate() {
                let darg = total_derivative_atom::<C>(&Atom::Var(arg.clone()), axis, ctx)?;
                if darg.is_zero() {
                    continue;
                }
                sum = sum.add(&ScalarExpr::fun(app.derived(slot)).mul(&darg));
            }
            Ok(sum)
        }
    }
}

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    type E = ScalarExpr<Rat>;

    fn mech() -> JetContext {
        let mut ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![3])]);
        let args = (0..3).map(|i| JetVar::field0(i, 1)).collect();
        ctx.declare_function("V", args);
        ctx
    }

    fn q(i: usize, order: u32) -> JetVar {
        JetVar::field(i, MultiIndex(vec![order]))
    }

    #[test]
    fn commutativity_cancellation() {
        let ctx = mech();
        // q1_t*q1 - q1*q1_t -> 0
        let raw = RawExpr::Sub(
            Box::new(RawExpr::Mul(vec![RawExpr::Var(q(0, 1)), RawExpr::Var(q(0, 0))])),
            Box::new(RawExpr::Mul(vec![RawExpr::Var(q(0, 0)), RawExpr::Var(q(0, 1))])),
        );
        assert!(normalize::<Rat>(&raw, &ctx).unwrap().is_zero());
    }

    #[test]
    fn binomial_expansion() {
        let ctx = mech();
        let raw = RawExpr::Pow(
            Box::new(RawExpr::Add(vec![RawExpr::Var(q(0, 0)), RawExpr::Var(q(0, 1))])),
            2,
        );
        let e = normalize::<Rat>(&raw, &ctx).unwrap();
        let expected = E::var(q(0, 0))
            .pow(2)
            .add(&E::var(q(0, 0)).mul(&E::var(q(0, 1))).scale(&Rat::from_i64(2)))
            .add(&E::var(q(0, 1)).pow(2));
        assert_eq!(e, expected);
        assert_eq!(e.display(&ctx), "q1^2 + 2*q1*q1_t + q1_t^2");
    }

    #[test]
    fn like_terms_merge() {
        let ctx = mech();
        let half = RawExpr::Const(Rat::from_fraction(1, 2));
        let sq = RawExpr::Mul(vec![RawExpr::Var(q(0, 1)), RawExpr::Var(q(0, 1))]);
        let raw = RawExpr::Add(vec![
            RawExpr::Mul(vec![half.clone(), sq.clone()]),
            RawExpr::Mul(vec![half, sq]),
        ]);
        let e = normalize::<Rat>(&raw, &ctx).unwrap();
        assert_eq!(e, E::var(q(0, 1)).pow(2));
    }

    #[test]
    fn partial_of_function_symbol() {
        let ctx = mech();
        let v = E::fun(FunApp::base(0, 3));
        let d = v.partial(&Atom::Var(q(0, 0)), &ctx);
        assert_eq!(d, E::fun(FunApp { symbol: 0, der: vec![1, 0, 0] }));
        assert_eq!(d.display(&ctx), "V_1(q1,q2,q3)");
    }

    #[test]
    fn partial_power_rule_and_independence() {
        let ctx = mech();
        let e = E::var(q(0, 1)).pow(2);
        assert_eq!(
            e.partial(&Atom::Var(q(0, 1)), &ctx),
            E::var(q(0, 1)).scale(&Rat::from_i64(2))
        );
        // Jets are independent: d(q1_tt)/d(q1_t) = 0.
        assert!(E::var(q(0, 2)).partial(&Atom::Var(q(0, 1)), &ctx).is_zero());
    }

    #[test]
    fn total_derivative_definition_and_leibniz() {
        let ctx = mech();
        assert_eq!(E::var(q(0, 0)).total_derivative(0, &ctx).unwrap(), E::var(q(0, 1)));
        let e = E::var(q(0, 0)).mul(&E::var(q(0, 1)));
        let expected = E::var(q(0, 1))
            .pow(2)
            .add(&E::var(q(0, 0)).mul(&E::var(q(0, 2))));
        assert_eq!(e.total_derivative(0, &ctx).unwrap(), expected);
    }

    #[test]
    fn total_derivative_chain_rule_on_symbols() {
        // D_t V(q) = sum_i V_i(q) q^i_t, assembled term by term as the oracle.
        let ctx = mech();
        let v = E::fun(FunApp::base(0, 3));
        let lhs = v.total_derivative(0, &ctx).unwrap();
        let mut oracle = E::zero();
        for i in 0..3 {
            let vi = E::fun(FunApp { symbol: 0, der: { let mut d = vec![0, 0, 0]; d[i] = 1; d } });
            oracle = oracle.add(&vi.mul(&E::var(q(i, 1))));
        }
        assert_eq!(lhs, oracle);
    }

    #[test]
    fn truncation_overflow_total_derivative() {
        let ctx = mech().with_jet_order(2);
        let e = E::var(q(0, 2));
        assert!(matches!(
            e.total_derivative(0, &ctx),
            Err(CoreError::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn division_and_negative_powers() {
        let ctx = mech();
        let raw = RawExpr::Div(
            Box::new(RawExpr::Var(q(0, 0))),
            Box::new(RawExpr::Const(Rat::from_i64(2))),
        );
        let e = normalize::<Rat>(&raw, &ctx).unwrap();
        assert_eq!(e, E::var(q(0, 0)).scale(&Rat::from_fraction(1, 2)));

        let bad = RawExpr::Pow(Box::new(RawExpr::Var(q(0, 0))), -1);
        assert!(matches!(normalize::<Rat>(&bad, &ctx), Err(CoreError::NegativePower)));

        let ok = RawExpr::Pow(Box::new(RawExpr::Const(Rat::from_i64(2))), -2);
        assert_eq!(
            normalize::<Rat>(&ok, &ctx).unwrap(),
            E::constant(Rat::from_fraction(1, 4))
        );
    }

    #[test]
    fn float_instantiation_works() {
        // The kernel is generic over the scalar; smoke-test the f64 lane.
        let ctx = mech();
        let e = ScalarExpr::<f64>::var(q(0, 0)).mul(&ScalarExpr::<f64>::constant(0.5));
        let d = e.total_derivative(0, &ctx).unwrap();
        assert_eq!(d, ScalarExpr::<f64>::var(q(0, 1)).scale(&0.5));
    }
}
