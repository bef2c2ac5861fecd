//! The obstruction double complex `Hom(wedge^p g, Omega^q(X))` with the
//! Chevalley-Eilenberg differential `d_g a = a o dCE` and the signed de Rham
//! differential `d_X a = (-1)^p d o a` (here `d = d_h + d_v` on jet space).
//!
//! An invariant premultisymplectic form gives the cocycle
//! `omega-bar = sum (-1)^{i-1} omega_i`; a homotopy momentum map assembles
//! into `mu-bar = sum -(-1)^{i(i+1)/2} mu_i`, and the verification
//! `d-bar mu-bar = omega-bar` is equivalent to the relation family checked
//! by `verify_momap`. Both routes are computed independently and compared.

use crate::algebra::{basis_section, AlgebraAction, LieAlgebra};
use crate::error::{CoreError, Result};
use crate::form::BigradedForm;
use crate::jet::JetContext;
use crate::linfty::{increasing_tuples, CochainData, MomentumMap, MomapReport};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// An alternating multilinear map from wedges of basis elements to forms,
/// stored on strictly increasing index tuples. Missing tuples are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<C: Scalar> {
    pub arity: usize,
    pub values: BTreeMap<Vec<usize>, BigradedForm<C>>,
}

impl<C: Scalar> Cochain<C> {
    pub fn zero(arity: usize) -> Self {
        Cochain { arity, values: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|f| f.is_zero())
    }

    /// Add a value on a strictly increasing tuple, merging with any existing
    /// entry and dropping zeros.
    pub fn insert_value(&mut self, tuple: Vec<usize>, value: BigradedForm<C>) {
        self.insert(tuple, value);
    }

    fn insert(&mut self, tuple: Vec<usize>, value: BigradedForm<C>) {
        if value.is_zero() {
            return;
        }
        match self.values.entry(tuple) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&value);
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
        for (t, v) in &other.values {
            out.insert(t.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, v) in &other.values {
            out.insert(t.clone(), v.neg());
        }
        out
    }

    /// Evaluate on an arbitrary index tuple by alternation.
    pub fn eval(&self, tuple: &[usize]) -> BigradedForm<C> {
        let mut sorted: Vec<usize> = tuple.to_vec();
        // Insertion sort, tracking parity.
        let mut odd = false;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return BigradedForm::zero();
        }
        match self.values.get(&sorted) {
            None => BigradedForm::zero(),
            Some(v) => {
                if odd {
                    v.neg()
                } else {
                    v.clone()
                }
            }
        }
    }
}

/// Chevalley-Eilenberg differential: `(d_g c)(a_0,...,a_p) = c(dCE(...))`,
/// raising the arity by one.
pub fn d_g<C: Scalar>(c: &Cochain<C>, alg: &LieAlgebra<C>) -> Cochain<C> {
    let m = alg.dim();
    let p = c.arity + 1;
    let mut out = Cochain::zero(p);
    for tuple in increasing_tuples(m, p) {
        let mut total = BigradedForm::zero();
        for j in 0..p {
            for k in (j + 1)..p {
                // (-1)^{(j+1)+(k+1)} [a_j, a_k] ^ rest, 1-based signs.
                let sign_odd = (j + k) % 2 == 1; // (-1)^{j+k+2} = (-1)^{j+k}
                let mut rest: Vec<usize> = Vec::with_capacity(p - 1);
                rest.push(0); // placeholder for the bracket slot
                for (l, &idx) in tuple.iter().enumerate() {
                    if l != j && l != k {
                        rest.push(idx);
                    }
                }
                for l in 0..m {
                    let coeff = alg.constants[tuple[j]][tuple[k]][l].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    rest[0] = l;
                    let mut v = c.eval(&rest).scale(&coeff);
                    if sign_odd {
                        v = v.neg();
                    }
                    total = total.add(&v);
                }
            }
        }
        out.insert(tuple, total);
    }
    out
}

/// Signed de Rham differential: `(d_X c) = (-1)^p d_tot o c`.
pub fn d_x<C: Scalar>(c: &Cochain<C>, ctx: &JetContext) -> Result<Cochain<C>> {
    let mut out = Cochain::zero(c.arity);
    for (tuple, value) in &c.values {
        let mut d = value.d_tot(ctx)?;
        if c.arity % 2 == 1 {
            d = d.neg();
        }
        out.insert(tuple.clone(), d);
    }
    Ok(out)
}

/// A formal sum of cochains of different arities.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainSum<C: Scalar> {
    /// Keyed by arity.
    pub components: BTreeMap<usize, Cochain<C>>,
}

impl<C: Scalar> CochainSum<C> {
    pub fn zero() -> Self {
        CochainSum { components: BTreeMap::new() }
    }

    pub fn insert(&mut self, c: Cochain<C>) {
        if c.is_zero() {
            return;
        }
        match self.components.entry(c.arity) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|c| c.is_zero())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for c in other.components.values() {
            let neg = Cochain {
                arity: c.arity,
                values: c.values.iter().map(|(t, v)| (t.clone(), v.neg())).collect(),
            };
            out.insert(neg);
        }
        out
    }

    /// Total differential `d-bar = d_g + d_X` applied componentwise.
    pub fn d_bar(&self, alg: &LieAlgebra<C>, ctx: &JetContext) -> Result<Self> {
        let mut out = Self::zero();
        for c in self.components.values() {
            out.insert(d_g(c, alg));
            out.insert(d_x(c, ctx)?);
        }
        Ok(out)
    }
}

/// The components `beta_i(a_1^...^a_i) = i_{rho(a_i)} ... i_{rho(a_1)} beta`
/// together with the signed total `beta-bar = sum (-1)^{i-1} beta_i`.
pub struct BarMap<C: Scalar> {
    pub components: Vec<Cochain<C>>,
    pub total: CochainSum<C>,
}

pub fn bar_map<C: Scalar>(
    beta: &BigradedForm<C>,
    action: &AlgebraAction<C>,
    alg: &LieAlgebra<C>,
    ctx: &JetContext,
) -> Result<BarMap<C>> {
    if alg.local {
        return Err(CoreError::validation(
            "the obstruction complex is computed for global-mode algebras only",
        ));
    }
    // Contractions can land in every arity up to the highest term degree
    // (mixed-degree sums included).
    let degree = beta
        .bidegrees()
        .iter()
        .map(|(p, q)| p + q)
        .max()
        .unwrap_or(0);
    let m = alg.dim();
    let fields: Vec<_> = (0..m)
        .map(|i| action.evaluate(&basis_section(alg, i), ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut components = Vec::new();
    let mut total = CochainSum::zero();
    for arity in 1..=degree.max(1) {
        let mut c = Cochain::zero(arity);
        for tuple in increasing_tuples(m, arity) {
            // i_{rho(a_i)} ... i_{rho(a_1)} beta: contract a_1 first.
            let mut value = beta.clone();
            for &idx in &tuple {
                value = fields[idx].contract(&value, ctx)?;
            }
            c.insert(tuple, value);
        }
        let mut signed = c.clone();
        if arity % 2 == 0 {
            // (-1)^{i-1} = -1 for even arity.
            signed = Cochain {
                arity,
                values: signed.values.iter().map(|(t, v)| (t.clone(), v.neg())).collect(),
            };
        }
        components.push(c);
        total.insert(signed);
    }
    Ok(BarMap { components, total })
}

/// Assemble `mu-bar = sum_i -(-1)^{i(i+1)/2} mu_i` as a cochain sum
/// (global-mode momentum maps only).
pub fn mu_bar<C: Scalar>(
    momap: &MomentumMap<C>,
    alg: &LieAlgebra<C>,
) -> Result<CochainSum<C>> {
    if alg.local {
        return Err(CoreError::validation(
            "mu-bar is computed for global-mode algebras only",
        ));
    }
    let mut total = CochainSum::zero();
    for (idx, data) in momap.components.iter().enumerate() {
        let arity = idx + 1;
        let CochainData::Global(values) = data else {
            return Err(CoreError::validation("global-mode momentum map required"));
        };
        let mut c = Cochain::zero(arity);
        for (tuple, v) in values {
            c.insert(tuple.clone(), v.clone());
        }
        // -(-1)^{i(i+1)/2}
        let exp = arity * (arity + 1) / 2;
        if exp % 2 == 0 {
            c = Cochain {
                arity,
                values: c.values.iter().map(|(t, v)| (t.clone(), v.neg())).collect(),
            };
        }
        total.insert(c);
    }
    Ok(total)
}

/// Extract momentum-map components from a primitive of `omega-bar`:
/// `mu_i = -(-1)^{i(i+1)/2} nu^{(i, n-i)}`. Round-trips with `mu_bar`.
pub fn extract_momap<C: Scalar>(nu: &CochainSum<C>, name: impl Into<String>) -> MomentumMap<C> {
    let max_arity = nu.components.keys().max().copied().unwrap_or(0);
    let mut components = Vec::new();
    for arity in 1..=max_arity {
        let values = match nu.components.get(&arity) {
            None => BTreeMap::new(),
            Some(c) => {
                let exp = arity * (arity + 1) / 2;
                c.values
                    .iter()
                    .map(|(t, v)| (t.clone(), if exp % 2 == 0 { v.neg() } else { v.clone() }))
                    .collect()
            }
        };
        components.push(CochainData::Global(values));
    }
    MomentumMap { name: name.into(), components }
}

/// Report of the cohomological checks.
#[derive(Debug, Clone)]
pub struct Thm2Report<C: Scalar> {
    /// `L_{rho(a)} omega` per basis element.
    pub invariance_residuals: Vec<(String, BigradedForm<C>)>,
    /// `d-bar omega-bar`, zero iff the action is premultisymplectic.
    pub dbar_omega_bar: CochainSum<C>,
    /// `d-bar mu-bar - omega-bar` when a momentum map was supplied.
    pub primitivity_residual: Option<CochainSum<C>>,
    /// The relation-family report for the same data, and whether the two
    /// verification routes agree.
    pub relation_report: Option<MomapReport<C>>,
    pub routes_agree: Option<bool>,
}

impl<C: Scalar> Thm2Report<C> {
    pub fn action_invariant(&self) -> bool {
        self.invariance_residuals.iter().all(|(_, r)| r.is_zero())
    }

    pub fn premultisymplectic(&self) -> bool {
        self.dbar_omega_bar.is_zero()
    }

    pub fn primitive_ok(&self) -> Option<bool> {
        self.primitivity_residual.as_ref().map(|r| r.is_zero())
    }
}

/// Run the closedness check `d-bar omega-bar = 0`, and when a momentum map
/// is supplied, the primitivity check `d-bar mu-bar = omega-bar` plus the
/// cross-check against the relation family.
pub fn check_thm2<C: Scalar>(
    action: &AlgebraAction<C>,
    alg: &LieAlgebra<C>,
    omega: &BigradedForm<C>,
    momap: Option<&MomentumMap<C>>,
    ctx: &JetContext,
) -> Result<Thm2Report<C>> {
    let mut invariance_residuals = Vec::new();
    for i in 0..alg.dim() {
        let field = action.evaluate(&basis_section(alg, i), ctx)?;
        invariance_residuals.push((alg.basis[i].clone(), field.lie_derivative(omega, ctx)?));
    }
    let omega_bar = bar_map(omega, action, alg, ctx)?.total;
    let dbar_omega_bar = omega_bar.d_bar(alg, ctx)?;

    let (primitivity_residual, relation_report, routes_agree) = match momap {
        None => (None, None, None),
        Some(m) => {
            let mb = mu_bar(m, alg)?;
            let residual = mb.d_bar(alg, ctx)?.sub(&omega_bar);
            let report = crate::linfty::verify_momap(m, action, alg, omega, ctx)?;
            let agree = residual.is_zero() == report.pass();
            (Some(residual), Some(report), Some(agree))
        }
    };

    Ok(Thm2Report {
        invariance_residuals,
        dbar_omega_bar,
        primitivity_residual,
        relation_report,
        routes_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::*;
    use crate::{Expr, Form, Rat};

    fn q_cochain_identity() -> Cochain<Rat> {
        // a |-> q^a as a 1-cochain over so(3).
        let mut c = Cochain::zero(1);
        for a in 0..3 {
            c.insert(vec![a], Form::scalar(Expr::var(q(a, 0))));
        }
        c
    }

    #[test]
    fn abelian_d_g_vanishes() {
        let alg = translation_algebra();
        let c = q_cochain_identity();
        assert!(d_g(&c, &alg).is_zero());
    }

    #[test]
    fn so3_d_g_on_identity_cochain() {
        // (d_g c)(e1, e2) = c(dCE(e1^e2)) = c(-[e1,e2]) = c(e3) = q3 in the
        // action-aligned basis.
        let alg = rotation_algebra();
        let c = q_cochain_identity();
        let dc = d_g(&c, &alg);
        assert_eq!(dc.eval(&[0, 1]), Form::scalar(Expr::var(q(2, 0))));
        // d_g^2 = 0.
        assert!(d_g(&dc, &alg).is_zero());
    }

    #[test]
    fn d_x_sign_and_square() {
        let ctx = mechanics_context(Potential::Zero);
        // p = 1, value q1_t: d_X c = -(v(q1_t) + q1_tt dt) on that slot.
        let mut c = Cochain::zero(1);
        c.insert(vec![0], Form::scalar(Expr::var(q(0, 1))));
        let dc = d_x(&c, &ctx).unwrap();
        let mut expected = Form::generator(dq(0, 1)).neg();
        expected = expected.sub(
            &Form::scalar(Expr::var(q(0, 2)))
                .wedge(&Form::generator(crate::form::Generator::Horizontal(0))),
        );
        assert_eq!(dc.eval(&[0]), expected);
        assert!(d_x(&dc, &ctx).unwrap().is_zero());
        // Constant values go to zero.
        let mut k = Cochain::zero(2);
        k.insert(vec![0, 1], Form::scalar(Expr::int(5)));
        assert!(d_x(&k, &ctx).unwrap().is_zero());
    }

    #[test]
    fn complex_identities_on_sample_cochains() {
        let ctx = mechanics_context(Potential::Zero);
        let alg = rotation_algebra();
        let mut c = Cochain::zero(1);
        for a in 0..3 {
            c.insert(vec![a], Form::scalar(Expr::var(q(a, 1)).mul(&Expr::var(q(a, 0)))));
        }
        let dgdx = d_g(&d_x(&c, &ctx).unwrap(), &alg);
        let dxdg = d_x(&d_g(&c, &alg), &ctx).unwrap();
        assert!(dgdx.add(&dxdg).is_zero());
    }

    #[test]
    fn bar_map_recovers_presymplectic_components() {
        // On the classical phase space: beta_1(a) = i_{rho(a)} omega and
        // beta_2(a,b) = i_{rho(b)} i_{rho(a)} omega; total = beta_1 - beta_2.
        let theory = phase_space_theory();
        let data = theory.premultisymplectic().unwrap();
        let alg = rotation_algebra();
        let action = phase_space_rotation_action(&theory.ctx);
        let bm = bar_map(&data.omega, &action, &alg, &theory.ctx).unwrap();
        assert_eq!(bm.components.len(), 2);
        let rho0 = action.evaluate(&basis_section(&alg, 0), &theory.ctx).unwrap();
        let rho1 = action.evaluate(&basis_section(&alg, 1), &theory.ctx).unwrap();
        let omega1 = rho0.contract(&data.omega, &theory.ctx).unwrap();
        assert_eq!(bm.components[0].eval(&[0]), omega1);
        let omega2 = rho1.contract(&omega1, &theory.ctx).unwrap();
        assert_eq!(bm.components[1].eval(&[0, 1]), omega2);
        // Signed total: arity-2 component is negated.
        assert_eq!(bm.total.components[&2].eval(&[0, 1]), omega2.neg());
    }

    #[test]
    fn trivial_action_bars_to_zero() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let alg = translation_algebra();
        let zero_fields = vec![crate::VectorField::zero(&theory.ctx); 3];
        let action = crate::algebra::AlgebraAction {
            name: "trivial".into(),
            rule: crate::algebra::ActionRule::Global(zero_fields),
        };
        let bm = bar_map(&data.omega, &action, &alg, &theory.ctx).unwrap();
        assert!(bm.total.is_zero());
    }

    #[test]
    fn rotation_action_is_premultisymplectic() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let alg = rotation_algebra();
        let action = rotation_action(&theory.ctx);
        let report = check_thm2(&action, &alg, &data.omega, Some(&rotation_momap()), &theory.ctx)
            .unwrap();
        assert!(report.action_invariant());
        assert!(report.premultisymplectic());
        assert_eq!(report.primitive_ok(), Some(true));
        assert_eq!(report.routes_agree, Some(true));
    }

    #[test]
    fn translation_primitivity_equals_relation_family() {
        let theory = particle(Potential::Zero);
        let data = theory.premultisymplectic().unwrap();
        let alg = translation_algebra();
        let action = translation_action(&theory.ctx);
        let momap = translation_momap();
        let report =
            check_thm2(&action, &alg, &data.omega, Some(&momap), &theory.ctx).unwrap();
        assert!(report.premultisymplectic());
        assert_eq!(report.primitive_ok(), Some(true));
        assert_eq!(report.routes_agree, Some(true));
    }

    #[test]
    fn non_invariant_omega_is_detected() {
        // V = 1/2 (q1)^2: translations no longer preserve omega.
        let theory = particle(Potential::Harmonic);
        let data = theory.premultisymplectic().unwrap();
        let alg = translation_algebra();
        let action = translation_action(&theory.ctx);
        let report = check_thm2(&action, &alg, &data.omega, Some(&translation_momap()), &theory.ctx).unwrap();
        assert!(!report.action_invariant());
        assert!(!report.premultisymplectic());
        assert_eq!(report.primitive_ok(), Some(false));
        // The two failure routes agree.
        assert_eq!(report.routes_agree, Some(true));
    }

    #[test]
    fn classical_angular_momentum_thm1_instance() {
        let theory = phase_space_theory();
        let data = theory.premultisymplectic().unwrap();
        let alg = rotation_algebra();
        let action = phase_space_rotation_action(&theory.ctx);
        let momap = phase_space_momap();
        let report =
            check_thm2(&action, &alg, &data.omega, Some(&momap), &theory.ctx).unwrap();
        assert!(report.action_invariant());
        assert!(report.premultisymplectic());
        assert_eq!(report.primitive_ok(), Some(true));
        assert_eq!(report.routes_agree, Some(true));
    }

    #[test]
    fn mu_bar_extraction_round_trip() {
        let alg = rotation_algebra();
        let momap = rotation_momap();
        let mb = mu_bar(&momap, &alg).unwrap();
        let extracted = extract_momap(&mb, "roundtrip");
        let mb2 = mu_bar(&extracted, &alg).unwrap();
        assert_eq!(mb, mb2);
    }

    #[test]
    fn time_translation_thm2() {
        for potential in [Potential::Zero, Potential::Symbolic] {
            let theory = particle(potential);
            let data = theory.premultisymplectic().unwrap();
            let alg = time_algebra();
            let action = time_translation_action(&theory.ctx);
            let momap = time_translation_momap(potential);
            let report =
                check_thm2(&action, &alg, &data.omega, Some(&momap), &theory.ctx).unwrap();
            assert!(report.action_invariant());
            assert!(report.premultisymplectic());
            assert_eq!(report.primitive_ok(), Some(true));
            assert_eq!(report.routes_agree, Some(true));
        }
    }
}
