//! Bigraded differential forms on the truncated jet bundle.
//!
//! A form is a sum of terms, each a scalar coefficient times a strictly
//! increasing wedge of generators. Horizontal generators `d(x^mu)` come
//! before vertical contact generators `v(u^a_I)` in the canonical order;
//! reordering signs are absorbed into the coefficients, so equal forms are
//! structurally equal.
//!
//! The differentials split the total de Rham differential, `d_tot = d_v + d_h`,
//! with the contact-structure sign `d_h(v(u^a_I)) = -sum_mu v(u^a_{I+mu}) ^ d(x^mu)`
//! chosen so that `d_h d_v + d_v d_h = 0`; this convention reproduces
//! `omega = EL + v(q1_t)^v(q1) + ...` for the particle Lagrangian.

use crate::error::Result;
use crate::expr::ScalarExpr;
use crate::jet::{JetContext, JetVar, MultiIndex};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// A degree-one generator of the exterior algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// Horizontal generator `d(x^mu)`.
    Horizontal(usize),
    /// Vertical contact generator `delta u^a_I`.
    VerticalField { comp: usize, index: MultiIndex },
    /// Vertical generator of a parameter jet (local mode).
    VerticalParam { slot: usize, comp: usize, index: MultiIndex },
}

impl Generator {
    pub fn is_horizontal(&self) -> bool {
        matches!(self, Generator::Horizontal(_))
    }

    pub fn is_vertical(&self) -> bool {
        !self.is_horizontal()
    }

    /// The jet variable a vertical generator differentiates, if any.
    pub fn jet_var(&self) -> Option<JetVar> {
        match self {
            Generator::Horizontal(_) => None,
            Generator::VerticalField { comp, index } => {
                Some(JetVar::field(*comp, index.clone()))
            }
            Generator::VerticalParam { slot, comp, index } => {
                Some(JetVar::param(*slot, *comp, index.clone()))
            }
        }
    }
}

/// Wedge of generators in strictly increasing canonical order.
pub type GenList = Vec<Generator>;

/// Bigraded differential form; may mix bidegrees (e.g. the premultisymplectic
/// form has components in (1,n) and (2,n-1)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedForm<C: Scalar> {
    terms: BTreeMap<GenList, ScalarExpr<C>>,
}

/// Bidegree (vertical, horizontal) of a generator list.
pub fn bidegree(gens: &[Generator]) -> (usize, usize) {
    let p = gens.iter().filter(|g| g.is_vertical()).count();
    (p, gens.len() - p)
}

impl<C: Scalar> BigradedForm<C> {
    pub fn zero() -> Self {
        BigradedForm { terms: BTreeMap::new() }
    }

    /// A (0,0)-form from a scalar expression.
    pub fn scalar(e: ScalarExpr<C>) -> Self {
        let mut f = Self::zero();
        f.add_term(Vec::new(), e);
        f
    }

    /// A single generator as a form.
    pub fn generator(g: Generator) -> Self {
        let mut f = Self::zero();
        f.add_term(vec![g], ScalarExpr::one());
        f
    }

    pub fn from_term(gens: GenList, coeff: ScalarExpr<C>) -> Self {
        let mut f = Self::zero();
        f.insert_unsorted(gens, coeff);
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GenList, &ScalarExpr<C>)> {
        self.terms.iter()
    }

    fn add_term(&mut self, gens: GenList, coeff: ScalarExpr<C>) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(gens) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Insert a term whose generator list may be unsorted; sorts it into
    /// canonical order tracking the permutation sign, dropping repeats.
    pub fn insert_unsorted(&mut self, mut gens: GenList, coeff: ScalarExpr<C>) {
        // Insertion sort counting transpositions of odd generators.
        let mut sign = false;
        for i in 1..gens.len() {
            let mut j = i;
            while j > 0 && gens[j - 1] > gens[j] {
                gens.swap(j - 1, j);
                sign = !sign;
                j -= 1;
            }
        }
        for w in gens.windows(2) {
            if w[0] == w[1] {
                return; // odd generator squares to zero
            }
        }
        let coeff = if sign { coeff.neg() } else { coeff };
        self.add_term(gens, coeff);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        BigradedForm {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BigradedForm {
            terms: self.terms.iter().map(|(g, k)| (g.clone(), k.scale(c))).collect(),
        }
    }

    pub fn scale_expr(&self, e: &ScalarExpr<C>) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.mul(e));
        }
        out
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ga, ca) in &self.terms {
            for (gb, cb) in &other.terms {
                let mut gens = Vec::with_capacity(ga.len() + gb.len());
                gens.extend_from_slice(ga);
                gens.extend_from_slice(gb);
                out.insert_unsorted(gens, ca.mul(cb));
            }
        }
        out
    }

    /// The component of the given bidegree.
    pub fn component(&self, vertical: usize, horizontal: usize) -> Self {
        BigradedForm {
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| bidegree(g) == (vertical, horizontal))
                .map(|(g, c)| (g.clone(), c.clone()))
                .collect(),
        }
    }

    /// All bidegrees present, sorted.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut degs: Vec<_> = self.terms.keys().map(|g| bidegree(g)).collect();
        degs.sort_unstable();
        degs.dedup();
        degs
    }

    /// Total degree when homogeneous; `None` for mixed or zero forms.
    pub fn total_degree(&self) -> Option<usize> {
        let mut deg = None;
        for g in self.terms.keys() {
            match deg {
                None => deg = Some(g.len()),
                Some(d) if d == g.len() => {}
                _ => return None,
            }
        }
        deg
    }

    /// Vertical differential: `d_v e = sum de/du^a_I v(u^a_I)` on
    /// coefficients, zero on generators. Parameter jets are background
    /// functions and do not contribute contact generators.
    pub fn d_v(&self, ctx: &JetContext) -> Self {
        let mut out = Self::zero();
        for (gens, coeff) in &self.terms {
            for v in coeff.field_dependencies(ctx) {
                let dc = coeff.partial(&crate::expr::Atom::Var(v.clone()), ctx);
                if dc.is_zero() {
                    continue;
                }
                let JetVar::FieldJet { comp, index } = v else { unreachable!() };
                let mut gs = Vec::with_capacity(gens.len() + 1);
                gs.push(Generator::VerticalField { comp, index });
                gs.extend_from_slice(gens);
                out.insert_unsorted(gs, dc);
            }
        }
        out
    }

    /// Horizontal differential: total derivatives on coefficients,
    /// `d_h d(x^mu) = 0`, and the contact rule on vertical generators.
    pub fn d_h(&self, ctx: &JetContext) -> Result<Self> {
        let n = ctx.dim();
        let mut out = Self::zero();
        for (gens, coeff) in &self.terms {
            // Coefficient part: sum_mu (D_mu coeff) d(x^mu) ^ gens.
            for mu in 0..n {
                let dc = coeff.total_derivative(mu, ctx)?;
                if dc.is_zero() {
                    continue;
                }
                let mut gs = Vec::with_capacity(gens.len() + 1);
                gs.push(Generator::Horizontal(mu));
                gs.extend_from_slice(gens);
                out.insert_unsorted(gs, dc);
            }
            // Generator part, graded Leibniz. Passing d_h over the first j
            // generators contributes (-1)^j; the contact rule contributes a
            // further minus, so the term sign is -(-1)^j.
            for (j, g) in gens.iter().enumerate() {
                let dg: Vec<(Generator, Generator)> = match g {
                    Generator::Horizontal(_) => Vec::new(),
                    Generator::VerticalField { comp, index } => (0..n)
                        .map(|mu| {
                            index.raised(mu, ctx.jet_order).map(|raised| {
                                (
                                    Generator::VerticalField { comp: *comp, index: raised },
                                    Generator::Horizontal(mu),
                                )
                            })
                        })
                        .collect::<Result<_>>()?,
                    Generator::VerticalParam { slot, comp, index } => (0..n)
                        .map(|mu| {
                            index.raised(mu, ctx.jet_order).map(|raised| {
                                (
                                    Generator::VerticalParam {
                                        slot: *slot,
                                        comp: *comp,
                                        index: raised,
                                    },
                                    Generator::Horizontal(mu),
                                )
                            })
                        })
                        .collect::<Result<_>>()?,
                };
                for (g1, g2) in dg {
                    let mut gs = Vec::with_capacity(gens.len() + 1);
                    gs.extend_from_slice(&gens[..j]);
                    gs.push(g1);
                    gs.push(g2);
                    gs.extend_from_slice(&gens[j + 1..]);
                    let c = if j % 2 == 0 { coeff.neg() } else { coeff.clone() };
                    out.insert_unsorted(gs, c);
                }
            }
        }
        Ok(out)
    }

    /// Total differential `d_v + d_h`.
    pub fn d_tot(&self, ctx: &JetContext) -> Result<Self> {
        Ok(self.d_v(ctx).add(&self.d_h(ctx)?))
    }

    /// Substitute jet variables inside all coefficients.
    pub fn map_coefficients(&self, f: &dyn Fn(&ScalarExpr<C>) -> ScalarExpr<C>) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(g.clone(), f(c));
        }
        out
    }
}
