//! Lagrangian field theories: Euler-Lagrange form, boundary form,
//! premultisymplectic form, Noether and manifest symmetries, currents.
//!
//! The central decomposition is `d_v L = EL - d_h gamma`, the cohomological
//! integration by parts. `EL` is computed by the Euler operator
//! `E_a = sum_I (-D)_I d/du^a_I`; `gamma` by recursively lowering derivative
//! indices, smallest base axis first. Both are verified against each other
//! before anything is returned.

use crate::error::{CoreError, Result};
use crate::expr::{Atom, ScalarExpr};
use crate::form::{BigradedForm, Generator};
use crate::jet::{JetContext, JetVar, MultiIndex, PARAM_SLOTS};
use crate::scalar::Scalar;
use crate::vector_field::JetVectorField;
use std::collections::BTreeMap;

/// A Lagrangian field theory over a trivial bundle on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory<C: Scalar> {
    pub name: String,
    pub ctx: JetContext,
    /// Lagrangian density: `L = density * vol`.
    pub density: ScalarExpr<C>,
    /// Optional user-supplied boundary form; verified before use.
    pub gamma_override: Option<BigradedForm<C>>,
    /// Optional premultisymplectic form supplied directly, for degenerate
    /// encodings (a 0-dimensional base with a symplectic fiber).
    pub omega_override: Option<BigradedForm<C>>,
}

/// The premultisymplectic package of a theory.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisymplecticData<C: Scalar> {
    /// Euler-Lagrange source form, bidegree (1, n).
    pub el: BigradedForm<C>,
    /// Boundary form, bidegree (1, n-1).
    pub gamma: BigradedForm<C>,
    /// `omega = EL + d_v gamma`, total degree n+1.
    pub omega: BigradedForm<C>,
    /// Lepage form `L + gamma`.
    pub lepage: BigradedForm<C>,
}

/// Variables the integration-by-parts machinery ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FiberComp {
    Field(usize),
    Param { slot: usize, comp: usize },
}

impl FiberComp {
    fn jet(&self, index: MultiIndex) -> JetVar {
        match self {
            FiberComp::Field(a) => JetVar::field(*a, index),
            FiberComp::Param { slot, comp } => JetVar::param(*slot, *comp, index),
        }
    }

    fn contact(&self, index: MultiIndex) -> Generator {
        match self {
            FiberComp::Field(a) => Generator::VerticalField { comp: *a, index },
            FiberComp::Param { slot, comp } => {
                Generator::VerticalParam { slot: *slot, comp: *comp, index }
            }
        }
    }
}

fn fiber_comps(ctx: &JetContext, include_params: bool) -> Vec<FiberComp> {
    let mut out: Vec<FiberComp> = (0..ctx.num_fields()).map(FiberComp::Field).collect();
    if include_params {
        if let Some(dim) = ctx.param_dim {
            for slot in 0..PARAM_SLOTS {
                for comp in 0..dim {
                    out.push(FiberComp::Param { slot, comp });
                }
            }
        }
    }
    out
}

/// The volume form `d(x^0) ^ ... ^ d(x^{n-1})` (the empty wedge for n = 0).
pub fn volume_form<C: Scalar>(ctx: &JetContext) -> BigradedForm<C> {
    BigradedForm::from_term(
        (0..ctx.dim()).map(Generator::Horizontal).collect(),
        ScalarExpr::one(),
    )
}

/// Interior product `i_{d/dx^mu} vol`, with its permutation sign.
pub fn interior_volume<C: Scalar>(ctx: &JetContext, mu: usize) -> BigradedForm<C> {
    let gens: Vec<Generator> = (0..ctx.dim())
        .filter(|nu| *nu != mu)
        .map(Generator::Horizontal)
        .collect();
    let coeff = if mu.is_multiple_of(2) {
        ScalarExpr::one()
    } else {
        ScalarExpr::one().neg()
    };
    BigradedForm::from_term(gens, coeff)
}

/// The Lagrangian as a (0, n)-form.
pub fn lagrangian_form<C: Scalar>(theory: &Theory<C>) -> BigradedForm<C> {
    volume_form(&theory.ctx).scale_expr(&theory.density)
}

/// Euler operator `E_a(f) = sum_I (-1)^{|I|} D_I (df/du^a_I)` for one fiber
/// component.
pub fn euler_operator<C: Scalar>(
    density: &ScalarExpr<C>,
    comp: FiberComp,
    ctx: &JetContext,
) -> Result<ScalarExpr<C>> {
    let mut indices: std::collections::BTreeSet<MultiIndex> = std::collections::BTreeSet::new();
    let deps = match comp {
        FiberComp::Field(_) => density.field_dependencies(ctx),
        FiberComp::Param { .. } => density.variables(),
    };
    for v in deps {
        match (&comp, &v) {
            (FiberComp::Field(a), JetVar::FieldJet { comp: b, index }) if a == b => {
                indices.insert(index.clone());
            }
            (FiberComp::Param { slot, comp: c }, JetVar::ParamJet { slot: s, comp: b, index })
                if slot == s && c == b =>
            {
                indices.insert(index.clone());
            }
            _ => {}
        }
    }
    let mut acc = ScalarExpr::zero();
    for index in indices {
        let partial = density.partial(&Atom::Var(comp.jet(index.clone())), ctx);
        if partial.is_zero() {
            continue;
        }
        let mut term = partial.total_derivative_multi(&index, ctx)?;
        if index.order() % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Integration by parts of `d_v(density * vol)` over the given fiber
/// components: returns the order-zero source coefficients and the
/// accumulated boundary form, satisfying
/// `d_v(density*vol) = source - d_h(boundary)`.
/// Order-zero source coefficients per fiber component.
type SourceCoeffs<C> = BTreeMap<FiberComp, ScalarExpr<C>>;

fn integrate_by_parts<C: Scalar>(
    density: &ScalarExpr<C>,
    ctx: &JetContext,
    include_params: bool,
) -> Result<(SourceCoeffs<C>, BigradedForm<C>)> {
    // Coefficients of d_v(density) per (component, multi-index).
    let mut work: BTreeMap<(FiberComp, MultiIndex), ScalarExpr<C>> = BTreeMap::new();
    for comp in fiber_comps(ctx, include_params) {
        let deps = match comp {
            FiberComp::Field(_) => density.field_dependencies(ctx),
            FiberComp::Param { .. } => density.variables(),
        };
        for v in deps {
            let matches = match (&comp, &v) {
                (FiberComp::Field(a), JetVar::FieldJet { comp: b, index }) if a == b => {
                    Some(index.clone())
                }
                (
                    FiberComp::Param { slot, comp: c },
                    JetVar::ParamJet { slot: s, comp: b, index },
                ) if slot == s && c == b => Some(index.clone()),
                _ => None,
            };
            let Some(index) = matches else { continue };
            let coeff = density.partial(&Atom::Var(comp.jet(index.clone())), ctx);
            if coeff.is_zero() {
                continue;
            }
            work.insert((comp, index), coeff);
        }
    }

    let mut gamma = BigradedForm::zero();
    let mut source: BTreeMap<FiberComp, ScalarExpr<C>> = BTreeMap::new();
    // Lower derivative indices one axis at a time, smallest axis first:
    //   f v(u_I) ^ vol = -(D_mu f) v(u_{I-mu}) ^ vol - d_h(f v(u_{I-mu}) ^ i_mu vol)
    while let Some(((comp, index), coeff)) = work.pop_first() {
        if coeff.is_zero() {
            continue;
        }
        match index.first_axis() {
            None => {
                let entry = source.entry(comp).or_insert_with(ScalarExpr::zero);
                *entry = entry.add(&coeff);
            }
            Some(mu) => {
                let lowered = index.lowered(mu).expect("axis came from the index");
                let piece = BigradedForm::scalar(coeff.clone())
                    .wedge(&BigradedForm::generator(comp.contact(lowered.clone())))
                    .wedge(&interior_volume(ctx, mu));
                gamma = gamma.add(&piece);
                let pushed = coeff.total_derivative(mu, ctx)?.neg();
                if !pushed.is_zero() {
                    let entry = work.entry((comp, lowered)).or_insert_with(ScalarExpr::zero);
                    *entry = entry.add(&pushed);
                }
            }
        }
    }
    Ok((source, gamma))
}

fn source_form<C: Scalar>(
    coeffs: &BTreeMap<FiberComp, ScalarExpr<C>>,
    ctx: &JetContext,
) -> BigradedForm<C> {
    let vol = volume_form(ctx);
    let mut out = BigradedForm::zero();
    for (comp, coeff) in coeffs {
        let contact = BigradedForm::generator(comp.contact(MultiIndex::zero(ctx.dim())));
        out = out.add(&BigradedForm::scalar(coeff.clone()).wedge(&contact).wedge(&vol));
    }
    out
}

impl<C: Scalar> Theory<C> {
    pub fn new(name: impl Into<String>, ctx: JetContext, density: ScalarExpr<C>) -> Result<Self> {
        let theory = Theory {
            name: name.into(),
            ctx,
            density,
            gamma_override: None,
            omega_override: None,
        };
        theory.validate()?;
        Ok(theory)
    }

    fn validate(&self) -> Result<()> {
        for v in self.density.variables() {
            self.ctx.check_var(&v)?;
            if matches!(v, JetVar::ParamJet { .. }) {
                return Err(CoreError::validation(
                    "Lagrangian density must not reference parameter jets",
                ));
            }
        }
        let order = self
            .density
            .variables()
            .iter()
            .filter_map(|v| match v {
                JetVar::FieldJet { index, .. } => Some(index.order()),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        if self.ctx.dim() > 0 && order + 1 > self.ctx.jet_order {
            return Err(CoreError::TruncationOverflow {
                requested: order + 1,
                max: self.ctx.jet_order,
            });
        }
        Ok(())
    }

    /// Euler-Lagrange source form `EL = E_a(density) v(u^a) ^ vol`.
    pub fn euler_lagrange(&self) -> Result<BigradedForm<C>> {
        let mut coeffs = BTreeMap::new();
        for a in 0..self.ctx.num_fields() {
            let e = euler_operator(&self.density, FiberComp::Field(a), &self.ctx)?;
            if !e.is_zero() {
                coeffs.insert(FiberComp::Field(a), e);
            }
        }
        Ok(source_form(&coeffs, &self.ctx))
    }

    /// Boundary form with `d_v L = EL - d_h gamma`, verified symbolically.
    /// A user override is verified against the same identity.
    pub fn boundary_form(&self) -> Result<BigradedForm<C>> {
        let gamma = match &self.gamma_override {
            Some(g) => g.clone(),
            None => integrate_by_parts(&self.density, &self.ctx, false)?.1,
        };
        let el = self.euler_lagrange()?;
        let lhs = lagrangian_form(self).d_v(&self.ctx);
        let residual = lhs.sub(&el).add(&gamma.d_h(&self.ctx)?);
        if !residual.is_zero() {
            return Err(CoreError::internal(
                "boundary form fails d_v L = EL - d_h gamma",
            ));
        }
        Ok(gamma)
    }

    /// Full premultisymplectic package; all stated invariants are checked.
    pub fn premultisymplectic(&self) -> Result<MultisymplecticData<C>> {
        let el = self.euler_lagrange()?;
        let gamma = self.boundary_form()?;
        let lepage = lagrangian_form(self).add(&gamma);
        let omega = match &self.omega_override {
            Some(w) => w.clone(),
            None => el.add(&gamma.d_v(&self.ctx)),
        };
        if self.omega_override.is_none() {
            // omega = (d_h + d_v)(L + gamma)
            let total = lepage.d_tot(&self.ctx)?;
            if !total.sub(&omega).is_zero() {
                return Err(CoreError::internal("omega != d_tot(L + gamma)"));
            }
        }
        if !omega.d_tot(&self.ctx)?.is_zero() {
            return Err(CoreError::internal("omega is not closed"));
        }
        Ok(MultisymplecticData { el, gamma, omega, lepage })
    }
}

/// Contraction with the prolonged fiber-scaling field (`Q^a = u^a` on every
/// field and parameter component): each contact generator is replaced by its
/// jet variable.
fn contract_scaling<C: Scalar>(form: &BigradedForm<C>) -> BigradedForm<C> {
    let mut out = BigradedForm::zero();
    for (gens, coeff) in form.terms() {
        for (j, g) in gens.iter().enumerate() {
            let Some(v) = g.jet_var() else { continue };
            let mut rest = Vec::with_capacity(gens.len() - 1);
            rest.extend_from_slice(&gens[..j]);
            rest.extend_from_slice(&gens[j + 1..]);
            let mut c = coeff.mul(&ScalarExpr::var(v));
            if j % 2 == 1 {
                c = c.neg();
            }
            out.insert_unsorted(rest, c);
        }
    }
    out
}

/// Result of the Noether-symmetry decision for a strictly vertical field.
#[derive(Debug, Clone, PartialEq)]
pub struct NoetherOutcome<C: Scalar> {
    /// `L_chi L` as a (0, n)-form.
    pub lie_l: BigradedForm<C>,
    /// Source form of the Euler images of the `L_chi L` density over all
    /// fiber variables; zero iff `L_chi L` is d_h-exact up to a pure
    /// base-coordinate remainder.
    pub euler_image: BigradedForm<C>,
    /// Fiber-independent remainder `f_0(x) vol`. A primitive for it would
    /// need explicit base-coordinate antidifferentiation, which does not
    /// yield a conserved current, so it is reported as failure data.
    pub base_remainder: BigradedForm<C>,
    /// A primitive with `L_chi L = d_h alpha`, when the symmetry passes.
    pub alpha: Option<BigradedForm<C>>,
}

impl<C: Scalar> NoetherOutcome<C> {
    pub fn is_noether(&self) -> bool {
        self.alpha.is_some()
    }
}

/// Decide whether a strictly vertical field is a Noether symmetry and
/// construct a primitive `alpha` for polynomial densities.
///
/// Exactness is decided by the Euler-operator kernel over all fiber
/// variables (fields and parameters). The primitive is assembled from the
/// fiber-scaling homotopy: a fiber-homogeneous piece `f_k vol` of degree
/// `k >= 1` with vanishing Euler images satisfies
/// `f_k vol = d_h((1/k) i_{scaling} gamma_k)`.
pub fn is_noether_symmetry<C: Scalar>(
    chi: &JetVectorField<C>,
    theory: &Theory<C>,
) -> Result<NoetherOutcome<C>> {
    if !chi.is_strictly_vertical() {
        return Err(CoreError::validation(
            "Noether symmetries are strictly vertical; pass the vertical part",
        ));
    }
    let ctx = &theory.ctx;
    let lie_l = chi.lie_derivative(&lagrangian_form(theory), ctx)?;
    // Extract the density of the (0, n)-form.
    let vol_key: Vec<Generator> = (0..ctx.dim()).map(Generator::Horizontal).collect();
    let mut density = ScalarExpr::zero();
    for (gens, coeff) in lie_l.terms() {
        if *gens == vol_key {
            density = density.add(coeff);
        } else {
            return Err(CoreError::internal("L_chi L is not a (0, n)-form"));
        }
    }

    let mut euler_coeffs = BTreeMap::new();
    for comp in fiber_comps(ctx, true) {
        let e = euler_operator(&density, comp, ctx)?;
        if !e.is_zero() {
            euler_coeffs.insert(comp, e);
        }
    }
    let euler_image = source_form(&euler_coeffs, ctx);

    if !euler_image.is_zero() {
        return Ok(NoetherOutcome {
            lie_l,
            euler_image,
            base_remainder: BigradedForm::zero(),
            alpha: None,
        });
    }

    let Some(parts) = density.fiber_homogeneous_parts(ctx) else {
        return Err(CoreError::HomotopyInapplicable(
            "density is not polynomial in the fiber variables".into(),
        ));
    };
    let base_part = parts.get(&0).cloned().unwrap_or_else(ScalarExpr::zero);
    if !base_part.is_zero() {
        return Ok(NoetherOutcome {
            lie_l,
            euler_image,
            base_remainder: volume_form(ctx).scale_expr(&base_part),
            alpha: None,
        });
    }

    let mut alpha = BigradedForm::zero();
    for (k, piece) in &parts {
        if *k == 0 || piece.is_zero() {
            continue;
        }
        let (_, gamma_aux) = integrate_by_parts(piece, ctx, true)?;
        let inv_k = C::one() / C::from_i64(*k as i64);
        alpha = alpha.add(&contract_scaling(&gamma_aux).scale(&inv_k));
    }
    // Guard the construction.
    let resid = alpha.d_h(ctx)?.sub(&volume_form(ctx).scale_expr(&density));
    if !resid.is_zero() {
        return Err(CoreError::internal("homotopy primitive fails d_h alpha = L_chi L"));
    }

    Ok(NoetherOutcome { lie_l, euler_image, base_remainder: BigradedForm::zero(), alpha: Some(alpha) })
}

/// A Noether current together with its verification data.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentReport<C: Scalar> {
    /// `j = alpha - i_chi gamma`, a (0, n-1)-form.
    pub current: BigradedForm<C>,
    /// `d_h j - i_chi EL`; zero for consistent inputs.
    pub conservation_residual: BigradedForm<C>,
    /// Residual of the Hamiltonian condition for the candidate `mu = -j`.
    pub eq_hamiltonian_minus_j: BigradedForm<C>,
    /// Residual for the candidate `mu = +j`.
    pub eq_hamiltonian_plus_j: BigradedForm<C>,
}

/// Build the Noether current `j = alpha - i_chi gamma` and verify the
/// conservation law `d_h j = i_chi EL`. Both sign candidates for the
/// momentum-map component are checked against `i_chi omega = -d mu`; which
/// one a momentum map uses is example-dependent, so neither is chosen here.
pub fn noether_current<C: Scalar>(
    chi: &JetVectorField<C>,
    alpha: &BigradedForm<C>,
    data: &MultisymplecticData<C>,
    ctx: &JetContext,
) -> Result<CurrentReport<C>> {
    let current = alpha.sub(&chi.contract(&data.gamma, ctx)?);
    let conservation_residual = current.d_h(ctx)?.sub(&chi.contract(&data.el, ctx)?);
    if !conservation_residual.is_zero() {
        return Err(CoreError::validation(
            "conservation check failed: d_h j != i_chi EL (inconsistent alpha/chi)",
        ));
    }
    let iw = chi.contract(&data.omega, ctx)?;
    let eq_hamiltonian_minus_j = iw.add(&current.neg().d_tot(ctx)?);
    let eq_hamiltonian_plus_j = iw.add(&current.d_tot(ctx)?);
    Ok(CurrentReport {
        current,
        conservation_residual,
        eq_hamiltonian_minus_j,
        eq_hamiltonian_plus_j,
    })
}

/// Manifest-symmetry report: the field must decompose into strictly vertical
/// plus strictly horizontal parts (structural for this representation, but
/// re-checked) and preserve the Lepage form.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestReport<C: Scalar> {
    pub decomposition_ok: bool,
    pub lepage_residual: BigradedForm<C>,
    pub manifest: bool,
}

pub fn is_manifest<C: Scalar>(
    chi: &JetVectorField<C>,
    theory: &Theory<C>,
) -> Result<ManifestReport<C>> {
    let ctx = &theory.ctx;
    let decomposition_ok = chi
        .horizontal
        .iter()
        .all(|c| c.variables().iter().all(|v| matches!(v, JetVar::Base(_))));
    let data = theory.premultisymplectic()?;
    let lepage_residual = chi.lie_derivative(&data.lepage, ctx)?;
    let manifest = decomposition_ok && lepage_residual.is_zero();
    Ok(ManifestReport { decomposition_ok, lepage_residual, manifest })
}
