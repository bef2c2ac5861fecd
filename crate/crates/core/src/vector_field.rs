//! Vector fields on the jet bundle: an evolutionary vertical part given by a
//! characteristic, plus a strictly horizontal Cartan lift of a base vector
//! field. The prolongation is implicit: contraction rules use total
//! derivatives of the characteristic.

use crate::error::{CoreError, Result};
use crate::expr::ScalarExpr;
use crate::form::{BigradedForm, Generator};
use crate::jet::{JetContext, JetVar, MultiIndex};
use crate::scalar::Scalar;

/// `pr(Q) + v^mu D_mu` with `Q^a` the vertical characteristic and `v^mu`
/// functions of the base coordinates only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetVectorField<C: Scalar> {
    /// Characteristic per flattened field component.
    pub characteristic: Vec<ScalarExpr<C>>,
    /// Horizontal components, one per base coordinate.
    pub horizontal: Vec<ScalarExpr<C>>,
}

impl<C: Scalar> JetVectorField<C> {
    pub fn zero(ctx: &JetContext) -> Self {
        JetVectorField {
            characteristic: vec![ScalarExpr::zero(); ctx.num_fields()],
            horizontal: vec![ScalarExpr::zero(); ctx.dim()],
        }
    }

    pub fn vertical(ctx: &JetContext, characteristic: Vec<ScalarExpr<C>>) -> Result<Self> {
        let mut vf = Self::zero(ctx);
        if characteristic.len() != ctx.num_fields() {
            return Err(CoreError::validation(
                "characteristic length does not match field components",
            ));
        }
        vf.characteristic = characteristic;
        Ok(vf)
    }

    /// Cartan lift of a base vector field.
    pub fn horizontal_lift(ctx: &JetContext, components: Vec<ScalarExpr<C>>) -> Result<Self> {
        let mut vf = Self::zero(ctx);
        if components.len() != ctx.dim() {
            return Err(CoreError::validation("horizontal components do not match base dimension"));
        }
        for c in &components {
            if c.variables().iter().any(|v| !matches!(v, JetVar::Base(_))) {
                return Err(CoreError::validation(
                    "horizontal components must depend on base coordinates only",
                ));
            }
        }
        vf.horizontal = components;
        Ok(vf)
    }

    pub fn with_horizontal(mut self, components: Vec<ScalarExpr<C>>) -> Result<Self> {
        for c in &components {
            if c.variables().iter().any(|v| !matches!(v, JetVar::Base(_))) {
                return Err(CoreError::validation(
                    "horizontal components must depend on base coordinates only",
                ));
            }
        }
        self.horizontal = components;
        Ok(self)
    }

    pub fn is_strictly_vertical(&self) -> bool {
        self.horizontal.iter().all(|c| c.is_zero())
    }

    pub fn is_strictly_horizontal(&self) -> bool {
        self.characteristic.iter().all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.is_strictly_vertical() && self.is_strictly_horizontal()
    }

    pub fn add(&self, other: &Self) -> Self {
        JetVectorField {
            characteristic: self
                .characteristic
                .iter()
                .zip(&other.characteristic)
                .map(|(a, b)| a.add(b))
                .collect(),
            horizontal: self
                .horizontal
                .iter()
                .zip(&other.horizontal)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        JetVectorField {
            characteristic: self.characteristic.iter().map(|c| c.neg()).collect(),
            horizontal: self.horizontal.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Only the evolutionary part.
    pub fn vertical_part(&self, ctx: &JetContext) -> Self {
        let mut vf = Self::zero(ctx);
        vf.characteristic = self.characteristic.clone();
        vf
    }

    /// Prolonged characteristic `D_I Q^a`.
    pub fn prolong(&self, comp: usize, index: &MultiIndex, ctx: &JetContext) -> Result<ScalarExpr<C>> {
        self.characteristic[comp].total_derivative_multi(index, ctx)
    }

    /// Contraction with a generator.
    fn contract_generator(&self, g: &Generator, ctx: &JetContext) -> Result<ScalarExpr<C>> {
        match g {
            Generator::Horizontal(mu) => Ok(self.horizontal[*mu].clone()),
            Generator::VerticalField { comp, index } => self.prolong(comp.to_owned(), index, ctx),
            // Parameter directions are background, not part of the field
            // space the vector field moves.
            Generator::VerticalParam { .. } => Ok(ScalarExpr::zero()),
        }
    }

    /// Interior product, extended as a graded derivation of degree -1.
    pub fn contract(&self, form: &BigradedForm<C>, ctx: &JetContext) -> Result<BigradedForm<C>> {
        let mut out = BigradedForm::zero();
        for (gens, coeff) in form.terms() {
            for (j, g) in gens.iter().enumerate() {
                let val = self.contract_generator(g, ctx)?;
                if val.is_zero() {
                    continue;
                }
                let mut rest = Vec::with_capacity(gens.len() - 1);
                rest.extend_from_slice(&gens[..j]);
                rest.extend_from_slice(&gens[j + 1..]);
                let mut c = coeff.mul(&val);
                if j % 2 == 1 {
                    c = c.neg();
                }
                out.insert_unsorted(rest, c);
            }
        }
        Ok(out)
    }

    /// Cartan formula: `L_X = i_X d_tot + d_tot i_X`.
    pub fn lie_derivative(&self, form: &BigradedForm<C>, ctx: &JetContext) -> Result<BigradedForm<C>> {
        let a = self.contract(&form.d_tot(ctx)?, ctx)?;
        let b = self.contract(form, ctx)?.d_tot(ctx)?;
        Ok(a.add(&b))
    }

    /// Apply the prolonged field as a derivation to a scalar expression:
    /// `pr(Q)(f) + v^mu D_mu f`.
    pub fn apply(&self, e: &ScalarExpr<C>, ctx: &JetContext) -> Result<ScalarExpr<C>> {
        let mut out = ScalarExpr::zero();
        for v in e.field_dependencies(ctx) {
            let JetVar::FieldJet { comp, index } = &v else { continue };
            let coeff = self.prolong(*comp, index, ctx)?;
            if coeff.is_zero() {
                continue;
            }
            out = out.add(&e.partial(&crate::expr::Atom::Var(v), ctx).mul(&coeff));
        }
        for mu in 0..ctx.dim() {
            if self.horizontal[mu].is_zero() {
                continue;
            }
            out = out.add(&e.total_derivative(mu, ctx)?.mul(&self.horizontal[mu]));
        }
        Ok(out)
    }

    /// Commutator of two fields in evolutionary-plus-lift form. Evolutionary
    /// fields commute with total derivatives, so the bracket is
    /// `pr(X(Q_Y) - Y(Q_X)) + lift([v_X, v_Y])`.
    pub fn bracket(&self, other: &Self, ctx: &JetContext) -> Result<Self> {
        let mut characteristic = Vec::with_capacity(ctx.num_fields());
        for a in 0..ctx.num_fields() {
            let xy = self.apply(&other.characteristic[a], ctx)?;
            let yx = other.apply(&self.characteristic[a], ctx)?;
            characteristic.push(xy.sub(&yx));
        }
        let mut horizontal = Vec::with_capacity(ctx.dim());
        for mu in 0..ctx.dim() {
            let mut h = ScalarExpr::zero();
            for nu in 0..ctx.dim() {
                let d_other = other.horizontal[mu].total_derivative(nu, ctx)?;
                let d_self = self.horizontal[mu].total_derivative(nu, ctx)?;
                h = h.add(&self.horizontal[nu].mul(&d_other));
                h = h.sub(&other.horizontal[nu].mul(&d_self));
            }
            horizontal.push(h);
        }
        Ok(JetVectorField { characteristic, horizontal })
    }
}

/// Outcome of the decomposition and bracket checks for a vector field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProlongationReport {
    pub strictly_vertical: bool,
    pub strictly_horizontal: bool,
    /// `i_{pr Q} d_h + d_h i_{pr Q} = 0` on the test set.
    pub vertical_bracket_ok: bool,
    /// `i_{lift v} d_v + d_v i_{lift v} = 0` on the test set.
    pub horizontal_bracket_ok: bool,
}

impl ProlongationReport {
    pub fn label(&self) -> &'static str {
        match (self.strictly_vertical, self.strictly_horizontal) {
            (true, true) => "zero",
            (true, false) => "strictly vertical",
            (false, true) => "strictly horizontal",
            (false, false) => "vertical + horizontal components",
        }
    }
}

/// Confirm the strictly-vertical / strictly-horizontal decomposition on a
/// generator test set: contact generators up to order `jet_order - 1`, the
/// horizontal generators, and products with coordinate monomials.
pub fn prolongation_check<C: Scalar>(
    vf: &JetVectorField<C>,
    ctx: &JetContext,
) -> Result<ProlongationReport> {
    let vert = vf.vertical_part(ctx);
    let mut hor = JetVectorField::zero(ctx);
    hor.horizontal = vf.horizontal.clone();

    let mut probes: Vec<BigradedForm<C>> = Vec::new();
    // Budget: d_h raises a probe generator by one, and contracting the
    // result prolongs the characteristic by the generator's order.
    let q_order = vf
        .characteristic
        .iter()
        .flat_map(|e| e.variables())
        .filter_map(|v| match v {
            JetVar::FieldJet { index, .. } | JetVar::ParamJet { index, .. } => Some(index.order()),
            JetVar::Base(_) => None,
        })
        .max()
        .unwrap_or(0);
    let max_order = ctx.jet_order.saturating_sub(1 + q_order).min(2);
    for comp in 0..ctx.num_fields() {
        for order in 0..=max_order {
            let mut index = MultiIndex::zero(ctx.dim());
            if ctx.dim() > 0 {
                index.0[0] = order;
            } else if order > 0 {
                continue;
            }
            let g = Generator::VerticalField { comp, index: index.clone() };
            probes.push(BigradedForm::generator(g.clone()));
            // A coefficient that exercises both coordinate and jet content.
            let coeff = ScalarExpr::var(JetVar::field(comp, index));
            probes.push(BigradedForm::scalar(coeff).wedge(&BigradedForm::generator(g)));
        }
    }
    for mu in 0..ctx.dim() {
        probes.push(BigradedForm::generator(Generator::Horizontal(mu)));
        probes.push(
            BigradedForm::scalar(ScalarExpr::var(JetVar::Base(mu)))
                .wedge(&BigradedForm::generator(Generator::Horizontal(mu))),
        );
    }

    let mut vertical_ok = true;
    let mut horizontal_ok = true;
    for f in &probes {
        let v_resid = vert.contract(&f.d_h(ctx)?, ctx)?.add(&vert.contract(f, ctx)?.d_h(ctx)?);
        if !v_resid.is_zero() {
            vertical_ok = false;
        }
        let h_resid = hor.contract(&f.d_v(ctx), ctx)?.add(&hor.contract(f, ctx)?.d_v(ctx));
        if !h_resid.is_zero() {
            horizontal_ok = false;
        }
    }

    Ok(ProlongationReport {
        strictly_vertical: vf.is_strictly_vertical(),
        strictly_horizontal: vf.is_strictly_horizontal(),
        vertical_bracket_ok: vertical_ok,
        horizontal_bracket_ok: horizontal_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    type E = ScalarExpr<Rat>;
    type F = BigradedForm<Rat>;

    fn mech() -> JetContext {
        JetContext::new(vec!["t".into()], vec![("q".into(), vec![3])])
    }

    fn q(i: usize, order: u32) -> JetVar {
        JetVar::field(i, MultiIndex(vec![order]))
    }

    fn dq(i: usize, order: u32) -> Generator {
        Generator::VerticalField { comp: i, index: MultiIndex(vec![order]) }
    }

    fn translation(ctx: &JetContext, i: usize) -> JetVectorField<Rat> {
        let mut ch = vec![E::zero(); 3];
        ch[i] = E::one();
        JetVectorField::vertical(ctx, ch).unwrap()
    }

    #[test]
    fn contract_constant_characteristic_on_contact_form() {
        let ctx = mech();
        let x = translation(&ctx, 0);
        for j in 0..3 {
            let r = x.contract(&F::generator(dq(j, 0)), &ctx).unwrap();
            if j == 0 {
                assert_eq!(r, F::scalar(E::one()));
            } else {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn contract_graded_leibniz_hand_expansion() {
        // i_{d/dq1} (v(q^j_t) ^ v(q^j)) = -v(q1_t).
        let ctx = mech();
        let x = translation(&ctx, 0);
        let mut omega2 = F::zero();
        for j in 0..3 {
            omega2.insert_unsorted(vec![dq(j, 1), dq(j, 0)], E::one());
        }
        let r = x.contract(&omega2, &ctx).unwrap();
        assert_eq!(r, F::generator(dq(0, 1)).neg());
    }

    #[test]
    fn cartan_lift_annihilates_contact_forms() {
        let ctx = mech();
        let lift = JetVectorField::horizontal_lift(&ctx, vec![E::one()]).unwrap();
        for i in 0..3 {
            assert!(lift.contract(&F::generator(dq(i, 0)), &ctx).unwrap().is_zero());
        }
        assert_eq!(
            lift.contract(&F::generator(Generator::Horizontal(0)), &ctx).unwrap(),
            F::scalar(E::one())
        );
    }

    #[test]
    fn lie_derivative_of_boundary_form_vanishes_for_translation() {
        let ctx = mech();
        let x = translation(&ctx, 0);
        let mut gamma = F::zero();
        for i in 0..3 {
            gamma = gamma.add(&F::scalar(E::var(q(i, 1))).wedge(&F::generator(dq(i, 0))));
        }
        assert!(x.lie_derivative(&gamma, &ctx).unwrap().is_zero());
    }

    #[test]
    fn prolongation_labels() {
        let ctx = mech();
        let x = translation(&ctx, 0);
        let r = prolongation_check(&x, &ctx).unwrap();
        assert!(r.strictly_vertical && !r.strictly_horizontal);
        assert!(r.vertical_bracket_ok && r.horizontal_bracket_ok);
        assert_eq!(r.label(), "strictly vertical");

        let lift = JetVectorField::horizontal_lift(&ctx, vec![E::one()]).unwrap();
        let r = prolongation_check(&lift, &ctx).unwrap();
        assert_eq!(r.label(), "strictly horizontal");

        // Time translation: xi + lift(d/dt) with Q^i = -q^i_t.
        let ch = (0..3).map(|i| E::var(q(i, 1)).neg()).collect();
        let x = JetVectorField::vertical(&ctx, ch)
            .unwrap()
            .with_horizontal(vec![E::one()])
            .unwrap();
        let r = prolongation_check(&x, &ctx).unwrap();
        assert_eq!(r.label(), "vertical + horizontal components");
        assert!(r.vertical_bracket_ok && r.horizontal_bracket_ok);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn rotation_bracket_is_antihomomorphism_of_cross_product() {
        // [rho(e1), rho(e2)] = rho(-(e1 x e2)) for the rotation action,
        // so the fixture algebra uses sign-flipped so(3) constants.
        let ctx = mech();
        let rot = |a: usize| {
            let mut ch = vec![E::zero(); 3];
            for i in 0..3 {
                for k in 0..3 {
                    let eps = levi_civita(i, a, k);
                    if eps != 0 {
                        ch[i] = ch[i].add(&E::var(q(k, 0)).scale(&Rat::from_i64(eps)));
                    }
                }
            }
            JetVectorField::vertical(&ctx, ch).unwrap()
        };
        let b = rot(0).bracket(&rot(1), &ctx).unwrap();
        let minus_rot3 = rot(2).neg();
        assert_eq!(b, minus_rot3);
    }

    fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1,
            _ => 0,
        }
    }
}
