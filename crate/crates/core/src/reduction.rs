//! Homotopy zero locus and reduction checks.
//!
//! A field belongs to the homotopy zero locus of a momentum map exactly when
//! (i) every pulled-back first component is closed on the base, and
//! (ii) the pullback of `i_{xi_a} i_{xi_b} d_v gamma` vanishes for every pair
//! of generators (vertical parts only). Membership is decided through these
//! two computable conditions; the raw exactness definition is retained as an
//! independent oracle for one-dimensional bases and abelian algebras.

use crate::algebra::{basis_section, slot_section, AlgebraAction, LieAlgebra, Section};
use crate::error::{CoreError, Result};
use crate::expr::{Atom, ScalarExpr};
use crate::form::{BigradedForm, Generator};
use crate::jet::{JetContext, JetVar, MultiIndex};
use crate::linfty::MomentumMap;
use crate::sample::{
    pullback_exterior_derivative, pullback_form, substitute_jet_closed, FieldSample,
    NumericSample, Pullback,
};
use crate::scalar::Scalar;
use crate::Rat;

/// Default relative tolerance for numeric residuals.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Default flow step as a fraction of the grid box.
pub const DEFAULT_FLOW_STEP_FRACTION: f64 = 1e-3;

/// Edge nodes excluded from residual norms: one-sided boundary stencils are
/// second-order for a single derivative but do not converge when two or
/// three derivative passes stack, so membership and invariance residuals
/// are measured on the grid interior.
pub const GRID_MARGIN: usize = 8;

/// A codimension-1 slice `{x^axis = value}` with a coorientation sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub axis: usize,
    pub value: f64,
    pub positive: bool,
}

impl SliceSpec {
    pub fn at(value: f64) -> Self {
        SliceSpec { axis: 0, value, positive: true }
    }

    fn sign(&self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }
}

/// Residual of one condition instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Symbolic(BigradedForm<Rat>),
    /// Max-abs residual and the scale it is compared against.
    Numeric { max_abs: f64, scale: f64 },
}

impl Residual {
    pub fn passes(&self, tol: f64) -> bool {
        match self {
            Residual::Symbolic(f) => f.is_zero(),
            Residual::Numeric { max_abs, scale } => *max_abs <= tol * scale.max(1.0),
        }
    }

    pub fn describe(&self, ctx: &JetContext) -> String {
        match self {
            Residual::Symbolic(f) => crate::print::form_text(f, ctx),
            Residual::Numeric { max_abs, .. } => format!("{max_abs:.3e}"),
        }
    }
}

fn pullback_residual(p: &Pullback) -> Residual {
    match p {
        Pullback::Symbolic(f) => Residual::Symbolic(f.clone()),
        Pullback::Sampled(s) => Residual::Numeric {
            max_abs: s.max_abs_interior(GRID_MARGIN),
            scale: 1.0,
        },
    }
}

/// Zero-locus membership report.
#[derive(Debug, Clone)]
pub struct ZeroLocusReport {
    pub field: String,
    /// Per generator: residual of `d((j phi)* mu_1(a))`.
    pub condition_i: Vec<(String, Residual)>,
    /// Per pair: residual of `(j phi)* (i_{xi_a} i_{xi_b} d_v gamma)`.
    pub condition_ii: Vec<(String, Residual)>,
    pub tol: f64,
}

impl ZeroLocusReport {
    pub fn pass(&self) -> bool {
        self.condition_i.iter().all(|(_, r)| r.passes(self.tol))
            && self.condition_ii.iter().all(|(_, r)| r.passes(self.tol))
    }
}

/// The generators conditions are checked on: basis elements (global mode) or
/// generic sections (local mode).
fn generator_sections<C: Scalar>(
    alg: &LieAlgebra<C>,
    ctx: &JetContext,
    count: usize,
) -> Vec<(String, Section<C>)> {
    if alg.local {
        (0..count.min(crate::jet::PARAM_SLOTS))
            .map(|s| (crate::jet::SLOT_NAMES[s].to_string(), slot_section(alg, ctx, s)))
            .collect()
    } else {
        (0..alg.dim())
            .map(|i| (alg.basis[i].clone(), basis_section(alg, i)))
            .collect()
    }
}

/// Decide membership of a field in the homotopy zero locus via the two
/// computable conditions.
pub fn zero_locus_check(
    sample: &FieldSample,
    momap: &MomentumMap<Rat>,
    action: &AlgebraAction<Rat>,
    alg: &LieAlgebra<Rat>,
    gamma: &BigradedForm<Rat>,
    ctx: &JetContext,
    tol: f64,
) -> Result<ZeroLocusReport> {
    let generators = generator_sections(alg, ctx, 2);
    let mut condition_i = Vec::new();
    for (label, section) in &generators {
        let mu1 = momap.evaluate(1, std::slice::from_ref(section), alg, ctx)?;
        let pulled = pullback_form(&mu1, sample, ctx)?;
        let d = pullback_exterior_derivative(&pulled, ctx)?;
        // Scale numeric residuals against the magnitude of the current.
        let residual = match (&d, &pulled) {
            (Pullback::Sampled(ds), Pullback::Sampled(ps)) => Residual::Numeric {
                max_abs: ds.max_abs_interior(GRID_MARGIN),
                scale: ps.max_abs() / box_scale(&ps.lattice),
            },
            _ => pullback_residual(&d),
        };
        condition_i.push((label.clone(), residual));
    }

    let delta_gamma = gamma.d_v(ctx);
    let mut condition_ii = Vec::new();
    for (i, (label_a, sec_a)) in generators.iter().enumerate() {
        for (label_b, sec_b) in generators.iter().skip(i + 1) {
            let xi_a = action.evaluate(sec_a, ctx)?.vertical_part(ctx);
            let xi_b = action.evaluate(sec_b, ctx)?.vertical_part(ctx);
            let contracted = xi_a.contract(&xi_b.contract(&delta_gamma, ctx)?, ctx)?;
            let pulled = pullback_form(&contracted, sample, ctx)?;
            condition_ii.push((format!("{label_a},{label_b}"), pullback_residual(&pulled)));
        }
    }

    Ok(ZeroLocusReport {
        field: sample.label.clone(),
        condition_i,
        condition_ii,
        tol,
    })
}

fn box_scale(lattice: &crate::sample::Lattice) -> f64 {
    lattice
        .spacing
        .iter()
        .zip(&lattice.shape)
        .map(|(h, n)| h * (*n as f64 - 1.0))
        .fold(1.0, f64::max)
}

/// Charge of a current on a codimension-1 slice: evaluation at the slice
/// point for a 1-dimensional base, trapezoid quadrature over the slice
/// lattice otherwise; the coorientation sign is applied.
#[allow(clippy::needless_range_loop)]
pub fn charge(
    current: &BigradedForm<Rat>,
    sample: &FieldSample,
    slice: &SliceSpec,
    ctx: &JetContext,
) -> Result<f64> {
    let n = ctx.dim();
    if slice.axis >= n {
        return Err(CoreError::validation("slice axis out of range"));
    }
    // The surviving generator list on the slice: all dx except the axis.
    let key: Vec<Generator> = (0..n)
        .filter(|mu| *mu != slice.axis)
        .map(Generator::Horizontal)
        .collect();
    match pullback_form(current, sample, ctx)? {
        Pullback::Symbolic(form) => {
            if n != 1 {
                return Err(CoreError::validation(
                    "symbolic charges are defined for 1-dimensional bases; use a grid sample",
                ));
            }
            let mut total = 0.0;
            for (gens, coeff) in form.terms() {
                if *gens != key {
                    continue;
                }
                total += coeff.eval_f64(&|v| match v {
                    JetVar::Base(0) => Some(slice.value),
                    _ => None,
                })?;
            }
            Ok(slice.sign() * total)
        }
        Pullback::Sampled(sampled) => {
            let lattice = &sampled.lattice;
            let slice_index = lattice.nearest_index(slice.axis, slice.value)?;
            let Some(values) = sampled.terms.get(&key) else {
                return Ok(0.0);
            };
            if n == 1 {
                return Ok(slice.sign() * values[slice_index]);
            }
            // Trapezoid quadrature over the remaining axes.
            let mut total = 0.0;
            for (flat, idx) in lattice.indices().into_iter().enumerate() {
                if idx[slice.axis] != slice_index {
                    continue;
                }
                let mut weight = 1.0;
                for axis in 0..n {
                    if axis == slice.axis {
                        continue;
                    }
                    weight *= lattice.spacing[axis];
                    if idx[axis] == 0 || idx[axis] == lattice.shape[axis] - 1 {
                        weight *= 0.5;
                    }
                }
                total += weight * values[flat];
            }
            Ok(slice.sign() * total)
        }
    }
}

/// Result of the infinitesimal-invariance check along the flow
/// `phi_t = phi_0 + t (Q_c o j phi_0)`.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub generator: String,
    /// Per condition instance: label and the t-derivative residual at 0.
    pub entries: Vec<(String, Residual)>,
    /// Richardson ratios `|D_h| / |D_{h/2}|` for numeric entries whose
    /// magnitudes sit above the noise floor (the expected ratio is 4).
    pub richardson: Vec<(String, f64)>,
    pub tol: f64,
}

impl InvarianceReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|(_, r)| r.passes(self.tol))
    }
}

fn condition_labels<C: Scalar>(alg: &LieAlgebra<C>, ctx: &JetContext) -> Vec<String> {
    let generators = generator_sections(alg, ctx, 2);
    let mut labels: Vec<String> =
        generators.iter().map(|(l, _)| format!("(i) {l}")).collect();
    for (i, (la, _)) in generators.iter().enumerate() {
        for (lb, _) in generators.iter().skip(i + 1) {
            labels.push(format!("(ii) {la},{lb}"));
        }
    }
    labels
}

/// Evaluate the zero-locus condition quantities on a closed-form flow
/// sample whose components may reference the flow parameter as base
/// coordinate index `n` (one past the theory's base).
fn symbolic_condition_values(
    components: &[ScalarExpr<Rat>],
    momap: &MomentumMap<Rat>,
    action: &AlgebraAction<Rat>,
    alg: &LieAlgebra<Rat>,
    gamma: &BigradedForm<Rat>,
    ctx: &JetContext,
) -> Result<Vec<ScalarExpr<Rat>>> {
    let n = ctx.dim();
    let flow_sample = FieldSampleFlow { components };
    let generators = generator_sections(alg, ctx, 2);
    let mut out = Vec::new();
    // Condition (i): all coefficients of d((j phi)* mu_1), i.e. base
    // derivatives of the pulled-back coefficients of every horizontal term.
    for (_, section) in &generators {
        let mu1 = momap.evaluate(1, std::slice::from_ref(section), alg, ctx)?;
        for (gens, coeff) in mu1.terms() {
            if gens.iter().any(Generator::is_vertical) {
                continue;
            }
            let pulled = flow_sample.substitute(coeff, ctx)?;
            for mu in 0..n {
                if gens.contains(&Generator::Horizontal(mu)) {
                    continue;
                }
                out.push(pulled.partial(&Atom::Var(JetVar::Base(mu)), ctx));
            }
        }
    }
    // Condition (ii).
    let delta_gamma = gamma.d_v(ctx);
    for (i, (_, sec_a)) in generators.iter().enumerate() {
        for (_, sec_b) in generators.iter().skip(i + 1) {
            let xi_a = action.evaluate(sec_a, ctx)?.vertical_part(ctx);
            let xi_b = action.evaluate(sec_b, ctx)?.vertical_part(ctx);
            let contracted = xi_a.contract(&xi_b.contract(&delta_gamma, ctx)?, ctx)?;
            let mut acc = ScalarExpr::zero();
            for (gens, coeff) in contracted.terms() {
                if gens.iter().any(Generator::is_vertical) {
                    continue;
                }
                acc = acc.add(&flow_sample.substitute(coeff, ctx)?);
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// Closed-form components that may depend on an extra flow coordinate; jets
/// are taken along the theory's base axes only.
struct FieldSampleFlow<'a> {
    components: &'a [ScalarExpr<Rat>],
}

impl FieldSampleFlow<'_> {
    fn substitute(&self, e: &ScalarExpr<Rat>, ctx: &JetContext) -> Result<ScalarExpr<Rat>> {
        if e.contains_fun_symbols() {
            return Err(CoreError::validation(
                "symbolic flow requires a concrete (polynomial) theory",
            ));
        }
        let failed: std::cell::RefCell<Option<CoreError>> = std::cell::RefCell::new(None);
        let out = e.substitute_vars(&|v| match v {
            JetVar::FieldJet { comp, index } => {
                if *comp >= self.components.len() {
                    failed
                        .borrow_mut()
                        .get_or_insert(CoreError::MissingComponent(format!("component #{comp}")));
                    return Some(ScalarExpr::zero());
                }
                let mut value = self.components[*comp].clone();
                for axis in index.axes() {
                    value = value.partial(&Atom::Var(JetVar::Base(axis)), ctx);
                }
                Some(value)
            }
            _ => None,
        });
        match failed.into_inner() {
            Some(err) => Err(err),
            None => Ok(out),
        }
    }
}

/// One scalar quantity whose flow derivative is checked: sampled values plus
/// an optional outer base-derivative to be applied after differencing in the
/// flow parameter (differencing first cancels shared stencil rounding).
struct ConditionPiece {
    label: String,
    values: Vec<f64>,
    outer_axis: Option<usize>,
}

fn numeric_condition_pieces(
    numeric: &NumericSample<'_>,
    momap: &MomentumMap<Rat>,
    action: &AlgebraAction<Rat>,
    alg: &LieAlgebra<Rat>,
    gamma: &BigradedForm<Rat>,
    ctx: &JetContext,
) -> Result<Vec<ConditionPiece>> {
    let n = ctx.dim();
    let generators = generator_sections(alg, ctx, 2);
    let mut out = Vec::new();
    for (label, section) in &generators {
        let mu1 = momap.evaluate(1, std::slice::from_ref(section), alg, ctx)?;
        for (gens, coeff) in mu1.terms() {
            if gens.iter().any(Generator::is_vertical) {
                continue;
            }
            let pulled = numeric.eval(coeff)?;
            for mu in 0..n {
                if gens.contains(&Generator::Horizontal(mu)) {
                    continue;
                }
                out.push(ConditionPiece {
                    label: format!("(i) {label}"),
                    values: pulled.clone(),
                    outer_axis: Some(mu),
                });
            }
        }
    }
    let delta_gamma = gamma.d_v(ctx);
    for (i, (label_a, sec_a)) in generators.iter().enumerate() {
        for (label_b, sec_b) in generators.iter().skip(i + 1) {
            let xi_a = action.evaluate(sec_a, ctx)?.vertical_part(ctx);
            let xi_b = action.evaluate(sec_b, ctx)?.vertical_part(ctx);
            let contracted = xi_a.contract(&xi_b.contract(&delta_gamma, ctx)?, ctx)?;
            let mut acc = vec![0.0; numeric.lattice.len()];
            for (gens, coeff) in contracted.terms() {
                if gens.iter().any(Generator::is_vertical) {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(numeric.eval(coeff)?) {
                    *a += v;
                }
            }
            out.push(ConditionPiece {
                label: format!("(ii) {label_a},{label_b}"),
                values: acc,
                outer_axis: None,
            });
        }
    }
    Ok(out)
}

/// Check the infinitesimal invariance of the zero locus along the generator
/// `c`: both condition quantities must have vanishing t-derivative at t = 0
/// along a path with initial velocity `xi_c` at the field. Closed-form
/// fields are differentiated symbolically; grids use central differences at
/// steps `h` and `h/2` with a Richardson consistency ratio.
#[allow(clippy::too_many_arguments)]
pub fn invariance_check(
    sample: &FieldSample,
    generator: usize,
    momap: &MomentumMap<Rat>,
    action: &AlgebraAction<Rat>,
    alg: &LieAlgebra<Rat>,
    gamma: &BigradedForm<Rat>,
    ctx: &JetContext,
    step: Option<f64>,
    tol: f64,
) -> Result<InvarianceReport> {
    let membership = zero_locus_check(sample, momap, action, alg, gamma, ctx, tol)?;
    if !membership.pass() {
        return Err(CoreError::validation(format!(
            "field `{}` is not in the homotopy zero locus",
            sample.label
        )));
    }
    let section = if alg.local {
        slot_section(alg, ctx, generator.min(crate::jet::PARAM_SLOTS - 1))
    } else {
        basis_section(alg, generator)
    };
    let gen_label = if alg.local {
        crate::jet::SLOT_NAMES[generator.min(crate::jet::PARAM_SLOTS - 1)].to_string()
    } else {
        alg.basis[generator].clone()
    };
    let xi = action.evaluate(&section, ctx)?.vertical_part(ctx);
    let labels = condition_labels(alg, ctx);

    if sample.is_closed() {
        // phi_s = phi_0 + s * (Q_c o j phi_0), with s the extra coordinate.
        let n = ctx.dim();
        let s = ScalarExpr::var(JetVar::Base(n));
        let mut flow_components = Vec::with_capacity(ctx.num_fields());
        for a in 0..ctx.num_fields() {
            let velocity = substitute_jet_closed(&xi.characteristic[a], sample, ctx)?;
            let base = match &sample.components[a] {
                crate::sample::Component::Closed(e) => e.clone(),
                crate::sample::Component::Grid(_) => unreachable!(),
            };
            flow_components.push(base.add(&s.mul(&velocity)));
        }
        let values = symbolic_condition_values(
            &flow_components,
            momap,
            action,
            alg,
            gamma,
            ctx,
        )?;
        let mut entries = Vec::new();
        for (label, value) in labels.iter().zip(values) {
            // d/ds at s = 0.
            let derived = value.partial(&Atom::Var(JetVar::Base(n)), ctx);
            let at_zero = derived.substitute_vars(&|v| match v {
                JetVar::Base(mu) if *mu == n => Some(ScalarExpr::zero()),
                _ => None,
            });
            entries.push((
                label.clone(),
                Residual::Symbolic(BigradedForm::scalar(at_zero)),
            ));
        }
        return Ok(InvarianceReport { generator: gen_label, entries, richardson: Vec::new(), tol });
    }

    // Numeric branch. Positions and first derivatives of the perturbed
    // field are built linearly from shared arrays (pos_s = P + s psi,
    // vel_s = V + s Dpsi), so stencil rounding is common to all branches
    // and cancels in the flow differences; any outer base-derivative of a
    // condition is applied after differencing for the same reason.
    let numeric0 = NumericSample::new(sample, ctx)?;
    let lattice = numeric0.lattice.clone();
    let n = ctx.dim();
    let h = step.unwrap_or(DEFAULT_FLOW_STEP_FRACTION * box_scale(&lattice));
    let mut positions = Vec::with_capacity(ctx.num_fields());
    let mut first_jets: Vec<Vec<Vec<f64>>> = Vec::with_capacity(ctx.num_fields());
    let mut velocity = Vec::with_capacity(ctx.num_fields());
    let mut velocity_jets: Vec<Vec<Vec<f64>>> = Vec::with_capacity(ctx.num_fields());
    for a in 0..ctx.num_fields() {
        positions.push(numeric0.component(a).to_vec());
        let jets: Vec<Vec<f64>> = (0..n)
            .map(|mu| numeric0.jet(a, &MultiIndex::unit(n, mu)))
            .collect::<Result<_>>()?;
        first_jets.push(jets);
        let psi = numeric0.eval(&xi.characteristic[a])?;
        let psi_jets: Vec<Vec<f64>> = (0..n)
            .map(|mu| crate::sample::axis_derivative(&psi, &lattice, mu))
            .collect::<Result<_>>()?;
        velocity.push(psi);
        velocity_jets.push(psi_jets);
    }
    let pieces_at = |s: f64| -> Result<Vec<ConditionPiece>> {
        let arrays: Vec<Vec<f64>> = (0..ctx.num_fields())
            .map(|a| {
                positions[a]
                    .iter()
                    .zip(&velocity[a])
                    .map(|(x, v)| x + s * v)
                    .collect()
            })
            .collect();
        let jets: Vec<Vec<Vec<f64>>> = (0..ctx.num_fields())
            .map(|a| {
                (0..n)
                    .map(|mu| {
                        first_jets[a][mu]
                            .iter()
                            .zip(&velocity_jets[a][mu])
                            .map(|(x, v)| x + s * v)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let ns = NumericSample::from_arrays_with_first_jets(lattice.clone(), arrays, jets, ctx);
        numeric_condition_pieces(&ns, momap, action, alg, gamma, ctx)
    };
    let flow_derivative = |s: f64| -> Result<Vec<(String, Vec<f64>)>> {
        let plus = pieces_at(s)?;
        let minus = pieces_at(-s)?;
        plus.into_iter()
            .zip(minus)
            .map(|(p, m)| {
                let diff: Vec<f64> = p
                    .values
                    .iter()
                    .zip(&m.values)
                    .map(|(a, b)| (a - b) / (2.0 * s))
                    .collect();
                let out = match p.outer_axis {
                    None => diff,
                    Some(mu) => crate::sample::axis_derivative(&diff, &lattice, mu)?,
                };
                Ok((p.label, out))
            })
            .collect()
    };
    let d_h = flow_derivative(h)?;
    let d_h2 = flow_derivative(h / 2.0)?;

    let mut entries = Vec::new();
    let mut richardson = Vec::new();
    for ((label, dh), (_, dh2)) in d_h.iter().zip(&d_h2) {
        let max_h = crate::sample::max_abs_interior(dh, &lattice, GRID_MARGIN);
        let max_h2 = crate::sample::max_abs_interior(dh2, &lattice, GRID_MARGIN);
        // Convergent second-order differences: take the finer estimate.
        entries.push((label.clone(), Residual::Numeric { max_abs: max_h2, scale: 1.0 }));
        let noise = 1e-10;
        if max_h > noise && max_h2 > noise {
            richardson.push((label.clone(), max_h / max_h2));
        }
    }
    Ok(InvarianceReport { generator: gen_label, entries, richardson, tol })
}

/// Polynomial antiderivative along a base coordinate.
fn antiderivative_base(e: &ScalarExpr<Rat>, axis: usize) -> Result<ScalarExpr<Rat>> {
    if e.contains_fun_symbols() {
        return Err(CoreError::validation("antiderivative requires a polynomial"));
    }
    let target = Atom::Var(JetVar::Base(axis));
    let mut out = ScalarExpr::zero();
    for (mono, coeff) in e.terms() {
        let mut new_mono = mono.clone();
        let mut power = 0u32;
        if let Some(slot) = new_mono.iter_mut().find(|(a, _)| *a == target) {
            power = slot.1;
            slot.1 += 1;
        } else {
            new_mono.push((target.clone(), 1));
            new_mono.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let scaled = coeff.clone() / Rat::from_i64((power + 1) as i64);
        out = out.add(&ScalarExpr::from_terms([(new_mono, scaled)]));
    }
    Ok(out)
}

fn degree_in_base(e: &ScalarExpr<Rat>, axis: usize) -> u32 {
    let target = Atom::Var(JetVar::Base(axis));
    e.terms()
        .map(|(mono, _)| {
            mono.iter()
                .find(|(a, _)| *a == target)
                .map(|(_, p)| *p)
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Independent oracle for the raw exactness definition on a 1-dimensional
/// base with an abelian algebra: the pulled-back cochain is exact iff each
/// pulled `mu_1(a)` is constant, decided by explicit antidifferentiation
/// (the antiderivative on an interval must be linear in the coordinate).
pub fn exactness_oracle_n1(
    momap: &MomentumMap<Rat>,
    sample: &FieldSample,
    alg: &LieAlgebra<Rat>,
    ctx: &JetContext,
) -> Result<bool> {
    if ctx.dim() != 1 {
        return Err(CoreError::validation("the exactness oracle requires a 1-dimensional base"));
    }
    if !alg.is_abelian() || alg.local {
        return Err(CoreError::validation("the exactness oracle requires a global abelian algebra"));
    }
    if !sample.is_closed() {
        return Err(CoreError::validation("the exactness oracle requires closed-form fields"));
    }
    for i in 0..alg.dim() {
        let mu1 = momap.evaluate(1, &[basis_section(alg, i)], alg, ctx)?;
        let mut pulled = ScalarExpr::zero();
        for (gens, coeff) in mu1.terms() {
            if gens.iter().any(Generator::is_vertical) {
                continue;
            }
            if !gens.is_empty() {
                return Err(CoreError::validation("mu_1 must be a function for n = 1"));
            }
            pulled = pulled.add(&substitute_jet_closed(coeff, sample, ctx)?);
        }
        let primitive = antiderivative_base(&pulled, 0)?;
        if degree_in_base(&primitive, 0) > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: the sample arrays of a jet expression (used by fixtures).
pub fn sample_expression(
    e: &ScalarExpr<Rat>,
    sample: &FieldSample,
    ctx: &JetContext,
) -> Result<Vec<f64>> {
    let numeric = NumericSample::new(sample, ctx)?;
    numeric.eval(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::*;
    use crate::sample::Lattice;
    use crate::Expr;

    fn t() -> Expr {
        Expr::var(JetVar::Base(0))
    }

    fn mech_setup(
        potential: Potential,
    ) -> (crate::theory::Theory<Rat>, BigradedForm<Rat>) {
        let theory = particle(potential);
        let gamma = theory.boundary_form().unwrap();
        (theory, gamma)
    }

    #[test]
    fn translation_zero_locus_linear_passes_quadratic_fails() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        let action = translation_action(ctx);
        let momap = translation_momap();

        let linear = FieldSample::closed(
            "linear",
            vec![t(), t().scale(&Rat::from_i64(2)), t().scale(&Rat::from_i64(3))],
        )
        .unwrap();
        let report =
            zero_locus_check(&linear, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL).unwrap();
        assert!(report.pass());
        // Abelian: condition (ii) is identically zero.
        for (_, r) in &report.condition_ii {
            assert!(matches!(r, Residual::Symbolic(f) if f.is_zero()));
        }

        let quadratic =
            FieldSample::closed("quadratic", vec![t().pow(2), Expr::zero(), Expr::zero()])
                .unwrap();
        let report =
            zero_locus_check(&quadratic, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL)
                .unwrap();
        assert!(!report.pass());
        // The offending residual is d(2t) = 2 dt on the first generator.
        let Residual::Symbolic(f) = &report.condition_i[0].1 else { panic!() };
        assert_eq!(
            *f,
            BigradedForm::scalar(Expr::int(2))
                .wedge(&BigradedForm::generator(Generator::Horizontal(0)))
        );
    }

    #[test]
    fn rotation_zero_locus_radial_passes_circular_fails() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = rotation_algebra();
        let action = rotation_action(ctx);
        let momap = rotation_momap();

        // phi(t) = (t, t, t): phi x phi' = 0.
        let radial = FieldSample::closed("radial", vec![t(), t(), t()]).unwrap();
        let report =
            zero_locus_check(&radial, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL).unwrap();
        assert!(report.pass());

        // The circle (cos t, sin t, 0) on a grid: condition (ii) fails with
        // residual |phi x phi'|_3 = 1.
        let lattice = Lattice::line(0.0, std::f64::consts::TAU, 1001);
        let cos: Vec<f64> =
            lattice.indices().iter().map(|i| lattice.point(i)[0].cos()).collect();
        let sin: Vec<f64> =
            lattice.indices().iter().map(|i| lattice.point(i)[0].sin()).collect();
        let circle =
            FieldSample::grid("circle", lattice, vec![cos, sin, vec![0.0; 1001]]).unwrap();
        let report =
            zero_locus_check(&circle, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL).unwrap();
        assert!(!report.pass());
        let failing: Vec<&str> = report
            .condition_ii
            .iter()
            .filter(|(_, r)| !r.passes(DEFAULT_TOL))
            .map(|(l, _)| l.as_str())
            .collect();
        assert_eq!(failing, vec!["e1,e2"]);
        // Condition (i) passes: the angular momentum is constant on a circle.
        assert!(report.condition_i.iter().all(|(_, r)| r.passes(DEFAULT_TOL)));
    }

    #[test]
    fn time_translation_zero_locus_constant_energy() {
        let (theory, gamma) = mech_setup(Potential::Harmonic);
        let ctx = &theory.ctx;
        let alg = time_algebra();
        let action = time_translation_action(ctx);
        let momap = time_translation_momap(Potential::Harmonic);

        // Constant path: energy V(c) is constant.
        let constant =
            FieldSample::closed("rest", vec![Expr::int(1), Expr::zero(), Expr::zero()]).unwrap();
        let report =
            zero_locus_check(&constant, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL)
                .unwrap();
        assert!(report.pass());

        // Linear path in a harmonic potential: energy 1/2 + t^2/2 drifts.
        let moving = FieldSample::closed("moving", vec![t(), Expr::zero(), Expr::zero()]).unwrap();
        let report =
            zero_locus_check(&moving, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL).unwrap();
        assert!(!report.pass());
    }

    #[test]
    fn oracle_agrees_with_conditions() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        let action = translation_action(ctx);
        let momap = translation_momap();
        let samples = [
            FieldSample::closed("lin", vec![t(), t().scale(&Rat::from_i64(2)), t().scale(&Rat::from_i64(3))]).unwrap(),
            FieldSample::closed("quad", vec![t().pow(2), Expr::zero(), Expr::zero()]).unwrap(),
            FieldSample::closed("rest", vec![Expr::one(), Expr::one(), Expr::one()]).unwrap(),
        ];
        for sample in &samples {
            let by_conditions =
                zero_locus_check(sample, &momap, &action, &alg, &gamma, ctx, DEFAULT_TOL)
                    .unwrap()
                    .pass();
            let by_oracle = exactness_oracle_n1(&momap, sample, &alg, ctx).unwrap();
            assert_eq!(by_conditions, by_oracle, "sample {}", sample.label);
        }
        // Zero map: exact for any field.
        let zero_map = MomentumMap { name: "zero".into(), components: Vec::new() };
        assert!(exactness_oracle_n1(&zero_map, &samples[1], &alg, ctx).unwrap());
    }

    #[test]
    fn charges_translation_and_rotation() {
        let (theory, _) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        // Translation current component 2 on phi = (t, 2t, 3t) at t = 0: 2.
        let phi = FieldSample::closed(
            "lin",
            vec![t(), t().scale(&Rat::from_i64(2)), t().scale(&Rat::from_i64(3))],
        )
        .unwrap();
        let current = BigradedForm::scalar(Expr::var(q(1, 1)));
        let value = charge(&current, &phi, &SliceSpec::at(0.0), ctx).unwrap();
        assert_eq!(value, 2.0);
        // Zero current: 0.
        assert_eq!(charge(&BigradedForm::zero(), &phi, &SliceSpec::at(0.0), ctx).unwrap(), 0.0);
        // Rotation current e3 on the circle grid at t = 0: (phi x phi')_3 = 1.
        let lattice = Lattice::line(-1.0, 1.0, 4001);
        let cos: Vec<f64> = lattice.indices().iter().map(|i| lattice.point(i)[0].cos()).collect();
        let sin: Vec<f64> = lattice.indices().iter().map(|i| lattice.point(i)[0].sin()).collect();
        let circle = FieldSample::grid("circle", lattice, vec![cos, sin, vec![0.0; 4001]]).unwrap();
        let qs: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 0))).collect();
        let qd: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1))).collect();
        let l3 = BigradedForm::scalar(cross_component(&qs, &qd, 2));
        let value = charge(&l3, &circle, &SliceSpec::at(0.0), ctx).unwrap();
        assert!((value - 1.0).abs() < 1e-6, "got {value}");
    }

    #[test]
    fn charges_constant_across_slices_symbolically() {
        // Free particle, linear path: the pulled current is constant, so
        // charges agree at any two slices exactly.
        let (theory, _) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let phi = FieldSample::closed(
            "lin",
            vec![t(), t().scale(&Rat::from_i64(2)), t().scale(&Rat::from_i64(3))],
        )
        .unwrap();
        for i in 0..3 {
            let current = BigradedForm::scalar(Expr::var(q(i, 1)));
            let q0 = charge(&current, &phi, &SliceSpec::at(0.0), ctx).unwrap();
            let q5 = charge(&current, &phi, &SliceSpec::at(5.0), ctx).unwrap();
            assert_eq!(q0, q5);
        }
    }

    #[test]
    fn charge_quadrature_over_a_two_dimensional_base() {
        // One field u over (x0, x1); current u * i_{d/dx0} vol = u dx1.
        // On the slice {x0 = c} the charge is the trapezoid integral of the
        // pulled-back u over x1.
        let ctx = crate::jet::JetContext::new(
            vec!["x0".into(), "x1".into()],
            vec![("u".into(), vec![1])],
        );
        let lattice = Lattice {
            origin: vec![0.0, 0.0],
            spacing: vec![0.1, 0.01],
            shape: vec![11, 101],
        };
        // u(x0, x1) = x1 sampled exactly.
        let values: Vec<f64> = lattice.indices().iter().map(|i| lattice.point(i)[1]).collect();
        let sample = FieldSample::grid("sheet", lattice, vec![values]).unwrap();
        let u0 = Expr::var(JetVar::field(0, crate::jet::MultiIndex(vec![0, 0])));
        let current = BigradedForm::scalar(u0)
            .wedge(&crate::theory::interior_volume(&ctx, 0));
        let q = charge(&current, &sample, &SliceSpec { axis: 0, value: 0.5, positive: true }, &ctx)
            .unwrap();
        // int_0^1 x1 dx1 = 1/2, exact for the trapezoid rule on linear data.
        assert!((q - 0.5).abs() < 1e-12, "got {q}");
        // Coorientation flips the sign.
        let q_neg = charge(
            &current,
            &sample,
            &SliceSpec { axis: 0, value: 0.5, positive: false },
            &ctx,
        )
        .unwrap();
        assert_eq!(q_neg, -q);
        // A slice outside the box errors.
        assert!(matches!(
            charge(&current, &sample, &SliceSpec { axis: 0, value: 9.0, positive: true }, &ctx),
            Err(CoreError::SliceOutsideGrid { .. })
        ));
    }

    #[test]
    fn invariance_translation_symbolic_zero() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        let action = translation_action(ctx);
        let momap = translation_momap();
        let phi = FieldSample::closed(
            "lin",
            vec![t(), t().scale(&Rat::from_i64(2)), t().scale(&Rat::from_i64(3))],
        )
        .unwrap();
        let report = invariance_check(
            &phi, 0, &momap, &action, &alg, &gamma, ctx, None, DEFAULT_TOL,
        )
        .unwrap();
        assert!(report.pass());
        for (_, r) in &report.entries {
            assert!(matches!(r, Residual::Symbolic(f) if f.is_zero()));
        }
    }

    #[test]
    fn invariance_rotation_symbolic_zero() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = rotation_algebra();
        let action = rotation_action(ctx);
        let momap = rotation_momap();
        let phi = FieldSample::closed("radial", vec![t(), t(), t()]).unwrap();
        let report = invariance_check(
            &phi, 2, &momap, &action, &alg, &gamma, ctx, None, DEFAULT_TOL,
        )
        .unwrap();
        assert!(report.pass());
    }

    #[test]
    fn invariance_rejects_fields_outside_the_locus() {
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        let action = translation_action(ctx);
        let momap = translation_momap();
        let phi =
            FieldSample::closed("quad", vec![t().pow(2), Expr::zero(), Expr::zero()]).unwrap();
        assert!(invariance_check(
            &phi, 0, &momap, &action, &alg, &gamma, ctx, None, DEFAULT_TOL
        )
        .is_err());
    }

    #[test]
    fn invariance_zero_generator_is_trivial() {
        // A zero characteristic gives a constant path; all derivatives are 0.
        let (theory, gamma) = mech_setup(Potential::Zero);
        let ctx = &theory.ctx;
        let alg = translation_algebra();
        // Action sending e3 to zero.
        let mut fields = Vec::new();
        for i in 0..3 {
            let mut ch = vec![Expr::zero(); 3];
            if i < 2 {
                ch[i] = Expr::one();
            }
            fields.push(crate::vector_field::JetVectorField::vertical(ctx, ch).unwrap());
        }
        let action = crate::algebra::AlgebraAction {
            name: "degenerate".into(),
            rule: crate::algebra::ActionRule::Global(fields),
        };
        let momap = MomentumMap {
            name: "partial".into(),
            components: vec![crate::linfty::CochainData::Global({
                let mut m = std::collections::BTreeMap::new();
                m.insert(vec![0], BigradedForm::scalar(Expr::var(q(0, 1))));
                m.insert(vec![1], BigradedForm::scalar(Expr::var(q(1, 1))));
                m
            })],
        };
        let phi = FieldSample::closed(
            "lin",
            vec![t(), t().scale(&Rat::from_i64(2)), Expr::zero()],
        )
        .unwrap();
        let report = invariance_check(
            &phi, 2, &momap, &action, &alg, &gamma, ctx, None, DEFAULT_TOL,
        )
        .unwrap();
        assert!(report.pass());
    }

    #[test]
    fn invariance_numeric_quartic_with_richardson_ratio() {
        // Anharmonic oscillator: time translation along an RK4 solution.
        // The flow leaves the locus at second order in the step, so the
        // derivative estimates converge at O(h^2) with a nonzero constant.
        let theory = particle(Potential::Quartic);
        let gamma = theory.boundary_form().unwrap();
        let ctx = &theory.ctx;
        let alg = time_algebra();
        let action = time_translation_action(ctx);
        let momap = time_translation_momap(Potential::Quartic);
        // accel = -grad V = -|q|^2 q.
        let accel = |s: &[f64]| -> Vec<f64> {
            let n2: f64 = s.iter().map(|x| x * x).sum();
            s.iter().map(|x| -n2 * x).collect()
        };
        let (lattice, arrays) = crate::sample::rk4_second_order(
            &accel,
            &[0.5, 0.1, -0.15],
            &[0.15, -0.05, 0.2],
            0.0,
            1e-3,
            2000,
        );
        let phi = FieldSample::grid("rk4-quartic", lattice, arrays).unwrap();
        let report = invariance_check(
            &phi, 0, &momap, &action, &alg, &gamma, ctx, Some(0.02), DEFAULT_TOL,
        )
        .unwrap();
        assert!(report.pass(), "entries: {:?}",
            report.entries.iter().map(|(l, r)| (l.clone(), format!("{r:?}"))).collect::<Vec<_>>());
        assert!(!report.richardson.is_empty());
        for (label, ratio) in &report.richardson {
            assert!((3.2..=4.8).contains(ratio), "{label}: ratio {ratio}");
        }
    }
}
