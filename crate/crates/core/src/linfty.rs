//! The L-infinity algebra of Hamiltonian forms and homotopy momentum maps.
//!
//! For a pre-n-plectic form omega the graded space has Hamiltonian pairs
//! `(alpha, chi)` with `i_chi omega = -d alpha` in degree 0 and plain forms
//! in negative degrees. The multibrackets are `l_1 = d` on negative degrees
//! and `l_k = -(-1)^{k(k+1)/2} i_{chi_k} ... i_{chi_1} omega` on Hamiltonian
//! pairs.
//!
//! A homotopy momentum map is a component family `mu_i` satisfying, for
//! `1 <= i <= n+1` with `mu_0 = mu_{n+1} = 0`,
//!
//! ```text
//! d mu_i(a_1^...^a_i) + mu_{i-1}(dCE(a_1^...^a_i))
//!     = (-1)^{i(i+1)/2} i_{rho(a_i)} ... i_{rho(a_1)} omega
//! ```
//!
//! `verify_momap` checks every relation on basis wedges (global mode) or on
//! generic parameter sections (local mode) and reports residual forms.

use crate::algebra::{
    basis_section, chevalley_eilenberg_boundary, slot_section, AlgebraAction, LieAlgebra, Section,
};
use crate::error::{CoreError, Result};
use crate::expr::ScalarExpr;
use crate::form::{BigradedForm, Generator};
use crate::jet::{JetContext, JetVar, PARAM_SLOTS, SLOT_NAMES};
use crate::scalar::Scalar;
use crate::vector_field::JetVectorField;
use std::collections::BTreeMap;

/// A Hamiltonian form with a chosen Hamiltonian vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPair<C: Scalar> {
    pub alpha: BigradedForm<C>,
    pub chi: JetVectorField<C>,
}

/// Outcome of the Hamiltonian condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianCheck<C: Scalar> {
    /// `i_chi omega + d alpha`; zero iff the pair is Hamiltonian.
    pub residual: BigradedForm<C>,
}

impl<C: Scalar> HamiltonianCheck<C> {
    pub fn pass(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Check `i_chi omega = -d alpha`.
pub fn hamiltonian_check<C: Scalar>(
    pair: &HamiltonianPair<C>,
    omega: &BigradedForm<C>,
    ctx: &JetContext,
) -> Result<HamiltonianCheck<C>> {
    let residual = pair.chi.contract(omega, ctx)?.add(&pair.alpha.d_tot(ctx)?);
    Ok(HamiltonianCheck { residual })
}

/// An element of the graded space underlying the L-infinity algebra.
/// Degree 0 requires a verified Hamiltonian pair; degrees `1-n..0` are plain
/// forms of matching total degree.
#[derive(Debug, Clone, PartialEq)]
pub enum LInftyElement<C: Scalar> {
    Hamiltonian(HamiltonianPair<C>),
    Form { degree: i64, form: BigradedForm<C> },
}

impl<C: Scalar> LInftyElement<C> {
    pub fn degree(&self) -> i64 {
        match self {
            LInftyElement::Hamiltonian(_) => 0,
            LInftyElement::Form { degree, .. } => *degree,
        }
    }

    /// Validate the degree table against a pre-n-plectic form of degree n+1.
    pub fn validate(&self, n: usize, omega: &BigradedForm<C>, ctx: &JetContext) -> Result<()> {
        match self {
            LInftyElement::Hamiltonian(pair) => {
                if let Some(d) = pair.alpha.total_degree() {
                    if d != n - 1 {
                        return Err(CoreError::validation(format!(
                            "Hamiltonian form must have degree {}, got {d}",
                            n - 1
                        )));
                    }
                }
                let check = hamiltonian_check(pair, omega, ctx)?;
                if !check.pass() {
                    return Err(CoreError::UnverifiedPair(format!(
                        "{} terms",
                        check.residual.num_terms()
                    )));
                }
            }
            LInftyElement::Form { degree, form } => {
                if *degree >= 0 || *degree < 1 - (n as i64) {
                    return Err(CoreError::validation(format!(
                        "plain forms live in degrees {}..=-1, got {degree}",
                        1 - (n as i64)
                    )));
                }
                if let Some(d) = form.total_degree() {
                    if d as i64 != (n as i64) - 1 + degree {
                        return Err(CoreError::validation("form degree does not match slot"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Multibracket `l_k`. `l_1 = d` on negative degrees; for `k > 1` the signed
/// iterated contraction on Hamiltonian pairs, each re-verified; zero in all
/// other cases.
pub fn l_bracket<C: Scalar>(
    elements: &[LInftyElement<C>],
    omega: &BigradedForm<C>,
    ctx: &JetContext,
) -> Result<BigradedForm<C>> {
    let k = elements.len();
    if k == 0 {
        return Ok(BigradedForm::zero());
    }
    if k == 1 {
        return match &elements[0] {
            LInftyElement::Form { form, .. } => form.d_tot(ctx),
            LInftyElement::Hamiltonian(_) => Ok(BigradedForm::zero()),
        };
    }
    if elements.iter().any(|e| e.degree() != 0) {
        return Ok(BigradedForm::zero());
    }
    let mut acc = omega.clone();
    for element in elements {
        let LInftyElement::Hamiltonian(pair) = element else { unreachable!() };
        let check = hamiltonian_check(pair, omega, ctx)?;
        if !check.pass() {
            return Err(CoreError::UnverifiedPair(format!(
                "{} residual terms",
                check.residual.num_terms()
            )));
        }
        // i_{chi_k} ... i_{chi_1} omega applies chi_1 first.
        acc = pair.chi.contract(&acc, ctx)?;
    }
    // Overall sign -(-1)^{k(k+1)/2}.
    let exp = k * (k + 1) / 2;
    let positive = exp % 2 == 1; // -(-1)^exp
    Ok(if positive { acc } else { acc.neg() })
}

/// Cochain data of one momentum-map component.
#[derive(Debug, Clone, PartialEq)]
pub enum CochainData<C: Scalar> {
    /// Values on strictly increasing basis tuples; absent tuples are zero.
    Global(BTreeMap<Vec<usize>, BigradedForm<C>>),
    /// Template over parameter slots `0..arity` (local mode).
    Local(BigradedForm<C>),
}

/// A homotopy momentum map given by its components `mu_i`, `i = 1..`.
/// Missing components are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMap<C: Scalar> {
    pub name: String,
    /// `components[i-1]` holds `mu_i`.
    pub components: Vec<CochainData<C>>,
}

/// All permutations of `0..k` with their parity (true = odd).
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(remaining: &mut Vec<usize>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            let x = remaining.remove(i);
            current.push(x);
            rec(remaining, current, out);
            current.pop();
            remaining.insert(i, x);
        }
    }
    let mut perms = Vec::new();
    rec(&mut (0..k).collect(), &mut Vec::new(), &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inversions = 0usize;
            for i in 0..p.len() {
                for j in (i + 1)..p.len() {
                    if p[i] > p[j] {
                        inversions += 1;
                    }
                }
            }
            let odd = inversions % 2 == 1;
            (p, odd)
        })
        .collect()
}

/// Substitute parameter jets of several slots at once inside a scalar.
fn substitute_slots<C: Scalar>(
    e: &ScalarExpr<C>,
    args: &[&Section<C>],
    ctx: &JetContext,
) -> Result<ScalarExpr<C>> {
    let failed: std::cell::RefCell<Option<CoreError>> = std::cell::RefCell::new(None);
    let out = e.substitute_vars(&|v| match v {
        JetVar::ParamJet { slot, comp, index } if *slot < args.len() => {
            match args[*slot][*comp].total_derivative_multi(index, ctx) {
                Ok(expr) => Some(expr),
                Err(err) => {
                    failed.borrow_mut().get_or_insert(err);
                    Some(ScalarExpr::zero())
                }
            }
        }
        _ => None,
    });
    match failed.into_inner() {
        Some(err) => Err(err),
        None => Ok(out),
    }
}

fn substitute_slots_form<C: Scalar>(
    form: &BigradedForm<C>,
    args: &[&Section<C>],
    ctx: &JetContext,
) -> Result<BigradedForm<C>> {
    let mut out = BigradedForm::zero();
    for (gens, coeff) in form.terms() {
        if gens.iter().any(|g| matches!(g, Generator::VerticalParam { .. })) {
            return Err(CoreError::validation(
                "local cochain templates must not contain parameter contact generators",
            ));
        }
        out = out.add(&BigradedForm::from_term(
            gens.clone(),
            substitute_slots(coeff, args, ctx)?,
        ));
    }
    Ok(out)
}

impl<C: Scalar> MomentumMap<C> {
    /// Canonical shape: zero values dropped from tuple maps, trailing zero
    /// components removed. Printing and resolution agree on this form.
    pub fn normalized(mut self) -> Self {
        for data in &mut self.components {
            if let CochainData::Global(values) = data {
                values.retain(|_, v| !v.is_zero());
            }
        }
        while let Some(last) = self.components.last() {
            let empty = match last {
                CochainData::Global(values) => values.is_empty(),
                CochainData::Local(form) => form.is_zero(),
            };
            if empty {
                self.components.pop();
            } else {
                break;
            }
        }
        self
    }

    /// Evaluate `mu_i` on a wedge of algebra elements given as sections.
    /// The result is the alternating multilinear extension; in particular a
    /// wedge with a repeated element evaluates to zero.
    pub fn evaluate(
        &self,
        arity: usize,
        args: &[Section<C>],
        alg: &LieAlgebra<C>,
        ctx: &JetContext,
    ) -> Result<BigradedForm<C>> {
        if arity == 0 || arity != args.len() {
            return Ok(BigradedForm::zero());
        }
        let Some(data) = self.components.get(arity - 1) else {
            return Ok(BigradedForm::zero());
        };
        match data {
            CochainData::Global(values) => {
                let m = alg.dim();
                let mut out = BigradedForm::zero();
                for (tuple, value) in values {
                    if tuple.len() != arity || tuple.iter().any(|t| *t >= m) {
                        return Err(CoreError::validation("cochain tuple out of range"));
                    }
                    // Alternating extension: coefficient det[args_l[tuple_m]].
                    let mut det = ScalarExpr::zero();
                    for (perm, odd) in permutations(arity) {
                        let mut prod = ScalarExpr::one();
                        for (l, &p) in perm.iter().enumerate() {
                            prod = prod.mul(&args[l][tuple[p]]);
                        }
                        det = if odd { det.sub(&prod) } else { det.add(&prod) };
                    }
                    if det.is_zero() {
                        continue;
                    }
                    out = out.add(&value.scale_expr(&det));
                }
                Ok(out)
            }
            CochainData::Local(template) => {
                // Antisymmetrize the template over the argument order.
                let mut out = BigradedForm::zero();
                for (perm, odd) in permutations(arity) {
                    let ordered: Vec<&Section<C>> = perm.iter().map(|&p| &args[p]).collect();
                    let value = substitute_slots_form(template, &ordered, ctx)?;
                    out = if odd { out.sub(&value) } else { out.add(&value) };
                }
                let factorial: i64 = (1..=arity as i64).product();
                Ok(out.scale(&(C::one() / C::from_i64(factorial))))
            }
        }
    }

    /// Evaluate `mu_{p}` on a signed combination of wedges (the image of the
    /// Chevalley-Eilenberg boundary).
    fn evaluate_combination(
        &self,
        arity: usize,
        combo: &[(C, Vec<Section<C>>)],
        alg: &LieAlgebra<C>,
        ctx: &JetContext,
    ) -> Result<BigradedForm<C>> {
        let mut out = BigradedForm::zero();
        for (sign, wedge) in combo {
            let v = self.evaluate(arity, wedge, alg, ctx)?;
            out = out.add(&v.scale(sign));
        }
        Ok(out)
    }
}

/// One relation instance in a momentum-map verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationEntry<C: Scalar> {
    pub arity: usize,
    /// Wedge label, e.g. `e1^e2` or `X^Y`.
    pub label: String,
    pub residual: BigradedForm<C>,
}

impl<C: Scalar> RelationEntry<C> {
    pub fn pass(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomapReport<C: Scalar> {
    pub plectic_degree: usize,
    pub entries: Vec<RelationEntry<C>>,
}

impl<C: Scalar> MomapReport<C> {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass())
    }
}

/// Strictly increasing index tuples of length `k` from `0..m`.
pub(crate) fn increasing_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            rec(i + 1, m, k, current, out);
            current.pop();
        }
    }
    rec(0, m, k, &mut current, &mut out);
    out
}

/// The wedges a relation of the given arity is checked on, with labels.
fn relation_wedges<C: Scalar>(
    alg: &LieAlgebra<C>,
    ctx: &JetContext,
    arity: usize,
) -> Vec<(String, Vec<Section<C>>)> {
    if alg.local {
        if arity > PARAM_SLOTS {
            return Vec::new();
        }
        let sections: Vec<Section<C>> = (0..arity).map(|s| slot_section(alg, ctx, s)).collect();
        let label = SLOT_NAMES[..arity].join("^");
        vec![(label, sections)]
    } else {
        increasing_tuples(alg.dim(), arity)
            .into_iter()
            .map(|tuple| {
                let label = tuple
                    .iter()
                    .map(|&i| alg.basis[i].clone())
                    .collect::<Vec<_>>()
                    .join("^");
                let sections = tuple.iter().map(|&i| basis_section(alg, i)).collect();
                (label, sections)
            })
            .collect()
    }
}

/// Verify every defining relation of a homotopy momentum map against the
/// action and the premultisymplectic form.
pub fn verify_momap<C: Scalar>(
    momap: &MomentumMap<C>,
    action: &AlgebraAction<C>,
    alg: &LieAlgebra<C>,
    omega: &BigradedForm<C>,
    ctx: &JetContext,
) -> Result<MomapReport<C>> {
    let n = omega
        .total_degree()
        .ok_or_else(|| CoreError::validation("omega must be homogeneous of degree n+1"))?
        .checked_sub(1)
        .ok_or_else(|| CoreError::validation("omega must have positive degree"))?;

    // Degree bookkeeping: mu_i takes values in forms of total degree n - i.
    for (idx, data) in momap.components.iter().enumerate() {
        let arity = idx + 1;
        if arity > n {
            return Err(CoreError::validation(format!(
                "mu_{arity} exceeds the plectic degree {n}"
            )));
        }
        let expected = n - arity;
        let check_degree = |form: &BigradedForm<C>| -> Result<()> {
            match form.total_degree() {
                None if form.is_zero() => Ok(()),
                Some(d) if d == expected => Ok(()),
                got => Err(CoreError::validation(format!(
                    "mu_{arity} values must have total degree {expected}, got {got:?}"
                ))),
            }
        };
        match data {
            CochainData::Global(values) => {
                for v in values.values() {
                    check_degree(v)?;
                }
            }
            CochainData::Local(template) => check_degree(template)?,
        }
    }

    let mut entries = Vec::new();
    for arity in 1..=(n + 1) {
        for (label, wedge) in relation_wedges(alg, ctx, arity) {
            // LHS: d mu_i(wedge) + mu_{i-1}(dCE(wedge)).
            let mut lhs = momap.evaluate(arity, &wedge, alg, ctx)?.d_tot(ctx)?;
            if arity >= 2 {
                let boundary = chevalley_eilenberg_boundary(alg, &wedge);
                lhs = lhs.add(&momap.evaluate_combination(arity - 1, &boundary, alg, ctx)?);
            }
            // RHS: (-1)^{i(i+1)/2} i_{rho(a_i)} ... i_{rho(a_1)} omega.
            let mut rhs = omega.clone();
            for section in &wedge {
                let field = action.evaluate(section, ctx)?;
                rhs = field.contract(&rhs, ctx)?;
            }
            if (arity * (arity + 1) / 2) % 2 == 1 {
                rhs = rhs.neg();
            }
            entries.push(RelationEntry { arity, label, residual: lhs.sub(&rhs) });
        }
    }
    Ok(MomapReport { plectic_degree: n, entries })
}

/// The defect `l_2(mu_1(a) ^ mu_1(b)) - mu_1([a,b]) + d mu_2(a^b)`; zero for
/// any verified momentum map.
pub fn bracket_defect<C: Scalar>(
    momap: &MomentumMap<C>,
    a: &Section<C>,
    b: &Section<C>,
    action: &AlgebraAction<C>,
    alg: &LieAlgebra<C>,
    omega: &BigradedForm<C>,
    ctx: &JetContext,
) -> Result<BigradedForm<C>> {
    let pair_a = HamiltonianPair {
        alpha: momap.evaluate(1, std::slice::from_ref(a), alg, ctx)?,
        chi: action.evaluate(a, ctx)?,
    };
    let pair_b = HamiltonianPair {
        alpha: momap.evaluate(1, std::slice::from_ref(b), alg, ctx)?,
        chi: action.evaluate(b, ctx)?,
    };
    let l2 = l_bracket(
        &[LInftyElement::Hamiltonian(pair_a), LInftyElement::Hamiltonian(pair_b)],
        omega,
        ctx,
    )?;
    let bracket = crate::algebra::bracket_sections(alg, a, b);
    let mu1_bracket = momap.evaluate(1, &[bracket], alg, ctx)?;
    let mu2 = momap.evaluate(2, &[a.clone(), b.clone()], alg, ctx)?;
    Ok(l2.sub(&mu1_bracket).add(&mu2.d_tot(ctx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::*;
    use crate::{Expr, Form, Rat};

    #[test]
    fn translation_momap_passes_all_relations() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let alg = translation_algebra();
        let action = translation_action(&theory.ctx);
        let momap = translation_momap();
        let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
        assert_eq!(report.plectic_degree, 1);
        assert!(report.pass(), "failed entries: {:?}",
            report.entries.iter().filter(|e| !e.pass()).map(|e| (&e.label, e.arity)).collect::<Vec<_>>());
    }

    #[test]
    fn translation_with_potential_fails_hamiltonian_condition() {
        let theory = particle(Potential::Harmonic);
        let data = theory.premultisymplectic().unwrap();
        let alg = translation_algebra();
        let action = translation_action(&theory.ctx);
        let momap = translation_momap();
        let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
        assert!(!report.pass());
    }

    #[test]
    fn rotation_momap_passes_all_relations() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let alg = rotation_algebra();
        let action = rotation_action(&theory.ctx);
        let momap = rotation_momap();
        let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
        assert!(report.pass(), "failed entries: {:?}",
            report.entries.iter().filter(|e| !e.pass()).map(|e| (&e.label, e.arity)).collect::<Vec<_>>());
    }

    #[test]
    fn rotation_momap_respects_potential_invariance() {
        // Angular momentum stays a momentum map for the rotationally
        // invariant harmonic potential, and fails for an anisotropic one.
        let theory = particle(Potential::Harmonic);
        let data = theory.premultisymplectic().unwrap();
        let alg = rotation_algebra();
        let action = rotation_action(&theory.ctx);
        let momap = rotation_momap();
        let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
        assert!(report.pass());

        // V = 1/2 (q1)^2 breaks two of the three rotations.
        let ctx = mechanics_context(Potential::Zero);
        let mut density = Expr::zero();
        for i in 0..3 {
            density = density.add(&Expr::var(q(i, 1)).pow(2).scale(&Rat::from_fraction(1, 2)));
        }
        density = density.sub(&Expr::var(q(0, 0)).pow(2).scale(&Rat::from_fraction(1, 2)));
        let skew = crate::theory::Theory::new("aniso", ctx, density).unwrap();
        let skew_data = skew.premultisymplectic().unwrap();
        let report = verify_momap(&momap, &action, &alg, &skew_data.omega, &skew.ctx).unwrap();
        assert!(!report.pass());
        // Rotation about the q1 axis still passes its Hamiltonian condition.
        assert!(report
            .entries
            .iter()
            .any(|e| e.arity == 1 && e.label == "e1" && e.pass()));
    }

    #[test]
    fn time_translation_momap_passes() {
        for potential in [Potential::Zero, Potential::Symbolic, Potential::Harmonic] {
            let theory = particle(potential);
            let data = theory.premultisymplectic().unwrap();
            let alg = time_algebra();
            let action = time_translation_action(&theory.ctx);
            let momap = time_translation_momap(potential);
            let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
            assert!(report.pass(), "potential {potential:?}");
        }
    }

    #[test]
    fn sign_flipped_mutants_fail() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        // Flip mu_1(e2) of the translation map.
        let alg = translation_algebra();
        let action = translation_action(&theory.ctx);
        let mut momap = translation_momap();
        if let CochainData::Global(values) = &mut momap.components[0] {
            let v = values.get_mut(&vec![1]).unwrap();
            *v = v.neg();
        }
        let report = verify_momap(&momap, &action, &alg, &data.omega, &theory.ctx).unwrap();
        assert!(!report.pass());
    }

    #[test]
    fn hamiltonian_check_examples() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        // (q1_t, d/dq1): pass.
        let mut ch = vec![Expr::zero(); 3];
        ch[0] = Expr::one();
        let chi = crate::vector_field::JetVectorField::vertical(ctx, ch).unwrap();
        let good = HamiltonianPair { alpha: Form::scalar(Expr::var(q(0, 1))), chi: chi.clone() };
        assert!(hamiltonian_check(&good, &data.omega, ctx).unwrap().pass());
        // (0, 0): pass.
        let zero = HamiltonianPair {
            alpha: Form::zero(),
            chi: crate::vector_field::JetVectorField::zero(ctx),
        };
        assert!(hamiltonian_check(&zero, &data.omega, ctx).unwrap().pass());
        // (q1, d/dq1): fail, residual = i_chi omega + d q1 as expanded by hand:
        // (q1_t - q1_tt) dt + v(q1) - v(q1_t).
        let bad = HamiltonianPair { alpha: Form::scalar(Expr::var(q(0, 0))), chi };
        let check = hamiltonian_check(&bad, &data.omega, ctx).unwrap();
        assert!(!check.pass());
        let mut expected = Form::zero();
        expected = expected.add(&Form::scalar(Expr::var(q(0, 1)).sub(&Expr::var(q(0, 2))))
            .wedge(&Form::generator(Generator::Horizontal(0))));
        expected = expected.add(&Form::generator(dq(0, 0)));
        expected = expected.sub(&Form::generator(dq(0, 1)));
        assert_eq!(check.residual, expected);
    }

    #[test]
    fn l2_matches_mu1_of_bracket_for_rotations() {
        // With mu_2 = 0, the bracket relation forces
        // l_2(mu_1(e1) ^ mu_1(e2)) = mu_1([e1, e2]).
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let alg = rotation_algebra();
        let action = rotation_action(ctx);
        let momap = rotation_momap();
        let a = basis_section(&alg, 0);
        let b = basis_section(&alg, 1);
        let pair = |s: &Section<Rat>| HamiltonianPair {
            alpha: momap.evaluate(1, std::slice::from_ref(s), &alg, ctx).unwrap(),
            chi: action.evaluate(s, ctx).unwrap(),
        };
        let l2 = l_bracket(
            &[LInftyElement::Hamiltonian(pair(&a)), LInftyElement::Hamiltonian(pair(&b))],
            &data.omega,
            ctx,
        )
        .unwrap();
        let bracket = crate::algebra::bracket_sections(&alg, &a, &b);
        let mu1b = momap.evaluate(1, &[bracket], &alg, ctx).unwrap();
        assert_eq!(l2, mu1b);
        // [e1,e2] = -e3 in the action-aligned basis, so l2 = -(q x q_t)_3.
        let qs: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 0))).collect();
        let qd: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1))).collect();
        assert_eq!(l2, Form::scalar(cross_component(&qs, &qd, 2).neg()));
    }

    #[test]
    fn l_bracket_degenerate_cases() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let mut ch = vec![Expr::zero(); 3];
        ch[0] = Expr::one();
        let chi = crate::vector_field::JetVectorField::vertical(ctx, ch).unwrap();
        let pair = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: Form::scalar(Expr::var(q(0, 1))),
            chi,
        });
        let zero_pair = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: Form::zero(),
            chi: crate::vector_field::JetVectorField::zero(ctx),
        });
        // l_2 with a zero pair is zero.
        assert!(l_bracket(&[pair.clone(), zero_pair], &data.omega, ctx).unwrap().is_zero());
        // Arity above n+1 contracts omega to zero.
        let many: Vec<_> = (0..4).map(|_| pair.clone()).collect();
        assert!(l_bracket(&many, &data.omega, ctx).unwrap().is_zero());
        // Unverified pair errors.
        let mut ch = vec![Expr::zero(); 3];
        ch[0] = Expr::one();
        let bad = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: Form::scalar(Expr::var(q(0, 0))),
            chi: crate::vector_field::JetVectorField::vertical(ctx, ch).unwrap(),
        });
        assert!(matches!(
            l_bracket(&[pair, bad], &data.omega, ctx),
            Err(CoreError::UnverifiedPair(_))
        ));
    }

    #[test]
    fn l2_independent_of_hamiltonian_field_choice() {
        // Theory with a spectator field: density = 1/2 q1_t^2 over q[2].
        let ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![2])]);
        let density = Expr::var(crate::jet::JetVar::field(0, crate::jet::MultiIndex(vec![1])))
            .pow(2)
            .scale(&Rat::from_fraction(1, 2));
        let theory = crate::theory::Theory::new("partial", ctx, density).unwrap();
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let alpha = Form::scalar(Expr::var(crate::jet::JetVar::field(
            0,
            crate::jet::MultiIndex(vec![1]),
        )));
        let chi1 = crate::vector_field::JetVectorField::vertical(
            ctx,
            vec![Expr::one(), Expr::zero()],
        )
        .unwrap();
        // A second choice differing by a kernel direction (the q2 line).
        let chi2 = crate::vector_field::JetVectorField::vertical(
            ctx,
            vec![Expr::one(), Expr::var(crate::jet::JetVar::field(1, crate::jet::MultiIndex(vec![0])))],
        )
        .unwrap();
        for chi in [&chi1, &chi2] {
            let pair = HamiltonianPair { alpha: alpha.clone(), chi: chi.clone() };
            assert!(hamiltonian_check(&pair, &data.omega, ctx).unwrap().pass());
        }
        let other = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: alpha.clone(),
            chi: chi1.clone(),
        });
        let l2_a = l_bracket(
            &[LInftyElement::Hamiltonian(HamiltonianPair { alpha: alpha.clone(), chi: chi1.clone() }), other.clone()],
            &data.omega,
            ctx,
        )
        .unwrap();
        let l2_b = l_bracket(
            &[LInftyElement::Hamiltonian(HamiltonianPair { alpha: alpha.clone(), chi: chi2 }), other],
            &data.omega,
            ctx,
        )
        .unwrap();
        assert_eq!(l2_a, l2_b);
    }

    #[test]
    fn bracket_defect_vanishes_on_verified_maps() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        // Rotations: mu_2 = 0 case.
        let alg = rotation_algebra();
        let action = rotation_action(ctx);
        let momap = rotation_momap();
        let a = basis_section(&alg, 0);
        let b = basis_section(&alg, 1);
        let d = bracket_defect(&momap, &a, &b, &action, &alg, &data.omega, ctx).unwrap();
        assert!(d.is_zero());
        // Abelian translations: all three terms vanish individually.
        let alg = translation_algebra();
        let action = translation_action(ctx);
        let momap = translation_momap();
        let a = basis_section(&alg, 0);
        let b = basis_section(&alg, 2);
        let d = bracket_defect(&momap, &a, &b, &action, &alg, &data.omega, ctx).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn alternation_kills_repeated_arguments() {
        let theory = particle(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = rotation_algebra();
        let momap = rotation_momap();
        let a = basis_section(&alg, 0);
        // mu_1 evaluated twice on the same element at arity 2 (if it had a
        // mu_2 this would exercise it); use a synthetic arity-2 cochain.
        let mut mu2 = BTreeMap::new();
        mu2.insert(vec![0, 1], Form::scalar(Expr::var(q(0, 0))));
        let synthetic = MomentumMap {
            name: "synthetic".into(),
            components: vec![
                momap.components[0].clone(),
                CochainData::Global(mu2),
            ],
        };
        let v = synthetic.evaluate(2, &[a.clone(), a.clone()], &alg, ctx).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn degree_bookkeeping_is_enforced() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        let action = translation_action(ctx);
        // A mu_1 valued in 1-forms is a category error for n = 1.
        let mut mu1 = BTreeMap::new();
        mu1.insert(
            vec![0],
            Form::generator(Generator::Horizontal(0)),
        );
        let bad = MomentumMap { name: "bad".into(), components: vec![CochainData::Global(mu1)] };
        assert!(matches!(
            verify_momap(&bad, &action, &alg, &data.omega, ctx),
            Err(CoreError::Validation(_))
        ));
        // Element validation: degree-0 slots need a verified pair, negative
        // slots are plain forms of matching degree.
        let mut ch = vec![Expr::zero(); 3];
        ch[0] = Expr::one();
        let chi = crate::vector_field::JetVectorField::vertical(ctx, ch).unwrap();
        let good = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: Form::scalar(Expr::var(q(0, 1))),
            chi: chi.clone(),
        });
        assert!(good.validate(1, &data.omega, ctx).is_ok());
        let unverified = LInftyElement::Hamiltonian(HamiltonianPair {
            alpha: Form::scalar(Expr::var(q(0, 0))),
            chi,
        });
        assert!(matches!(
            unverified.validate(1, &data.omega, ctx),
            Err(CoreError::UnverifiedPair(_))
        ));
        let bad_slot = LInftyElement::Form { degree: 0, form: Form::zero() };
        assert!(bad_slot.validate(1, &data.omega, ctx).is_err());
    }

    #[test]
    fn phase_space_angular_momentum_passes() {
        let theory = phase_space_theory();
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let alg = rotation_algebra();
        let action = phase_space_rotation_action(ctx);
        let momap = phase_space_momap();
        assert_eq!(action.bracket_compatibility(&alg, ctx).unwrap(), None);
        let report = verify_momap(&momap, &action, &alg, &data.omega, ctx).unwrap();
        assert_eq!(report.plectic_degree, 1);
        assert!(report.pass(), "failed entries: {:?}",
            report.entries.iter().filter(|e| !e.pass()).map(|e| (&e.label, e.arity)).collect::<Vec<_>>());
    }
}
