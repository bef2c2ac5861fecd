//! Concrete fields: closed-form component functions of the base coordinates,
//! or grid samples on a uniform rectangular lattice. Substitution along the
//! jet prolongation replaces every field jet `u^a_I` by the derivative
//! `d_I phi^a`, symbolically for closed components and by second-order
//! central differences (one-sided at the boundary) for grids.

use crate::error::{CoreError, Result};
use crate::expr::{Atom, ScalarExpr};
use crate::form::{BigradedForm, GenList, Generator};
use crate::jet::{JetContext, JetVar, MultiIndex};
use crate::scalar::Scalar;
use crate::Rat;
use std::cell::RefCell;
use std::collections::BTreeMap;

/// Uniform rectangular lattice on a box in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Lattice {
    pub fn line(t0: f64, t1: f64, points: usize) -> Self {
        assert!(points >= 2);
        Lattice {
            origin: vec![t0],
            spacing: vec![(t1 - t0) / (points - 1) as f64],
            shape: vec![points],
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for axis in (0..self.dim().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.shape[axis + 1];
        }
        strides
    }

    /// Coordinates of the lattice point with the given multi-index.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(axis, &i)| self.origin[axis] + self.spacing[axis] * i as f64)
            .collect()
    }

    /// Iterate all lattice multi-indices in row-major order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.dim()];
        loop {
            out.push(idx.clone());
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.shape[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Nearest lattice index along one axis; errors outside the box.
    pub fn nearest_index(&self, axis: usize, value: f64) -> Result<usize> {
        let rel = (value - self.origin[axis]) / self.spacing[axis];
        let i = rel.round();
        if i < -0.5 || i > (self.shape[axis] - 1) as f64 + 0.5 {
            return Err(CoreError::SliceOutsideGrid { axis, value });
        }
        Ok(i.clamp(0.0, (self.shape[axis] - 1) as f64) as usize)
    }
}

/// One field component of a sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// Expression in the base coordinates only.
    Closed(ScalarExpr<Rat>),
    /// Values on the sample's lattice, row-major.
    Grid(Vec<f64>),
}

/// A concrete field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub label: String,
    pub components: Vec<Component>,
    /// Required when any component is a grid.
    pub lattice: Option<Lattice>,
}

impl FieldSample {
    pub fn closed(label: impl Into<String>, components: Vec<ScalarExpr<Rat>>) -> Result<Self> {
        for c in &components {
            if c.variables().iter().any(|v| !matches!(v, JetVar::Base(_))) {
                return Err(CoreError::validation(
                    "closed-form components must reference base coordinates only",
                ));
            }
        }
        Ok(FieldSample {
            label: label.into(),
            components: components.into_iter().map(Component::Closed).collect(),
            lattice: None,
        })
    }

    pub fn grid(
        label: impl Into<String>,
        lattice: Lattice,
        components: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let label = label.into();
        for values in &components {
            if values.len() != lattice.len() {
                return Err(CoreError::GridShape(label));
            }
        }
        Ok(FieldSample {
            label,
            components: components.into_iter().map(Component::Grid).collect(),
            lattice: Some(lattice),
        })
    }

    pub fn is_closed(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Component::Closed(_)))
    }

    fn component(&self, a: usize) -> Result<&Component> {
        self.components
            .get(a)
            .ok_or_else(|| CoreError::MissingComponent(format!("component #{a}")))
    }

    /// Symbolic derivative `d_I phi^a` of a closed component.
    pub fn closed_jet(&self, a: usize, index: &MultiIndex, ctx: &JetContext) -> Result<ScalarExpr<Rat>> {
        match self.component(a)? {
            Component::Grid(_) => Err(CoreError::validation(
                "symbolic substitution requires closed-form components",
            )),
            Component::Closed(e) => {
                let mut out = e.clone();
                for axis in index.axes() {
                    out = out.partial(&Atom::Var(JetVar::Base(axis)), ctx);
                }
                Ok(out)
            }
        }
    }
}

/// Substitute every field jet by the corresponding derivative of a
/// closed-form sample; the result is an expression in base coordinates.
/// Function symbols whose arguments are field jets have no closed-form
/// composition in this expression class and are rejected.
pub fn substitute_jet_closed(
    e: &ScalarExpr<Rat>,
    sample: &FieldSample,
    ctx: &JetContext,
) -> Result<ScalarExpr<Rat>> {
    for (mono, _) in e.terms() {
        for (atom, _) in mono {
            if let Atom::Fun(app) = atom {
                let depends = ctx.functions[app.symbol]
                    .args
                    .iter()
                    .any(|arg| matches!(arg, JetVar::FieldJet { .. }));
                if depends {
                    return Err(CoreError::validation(format!(
                        "function symbol {} composes with the field; use a concrete interpretation",
                        ctx.functions[app.symbol].name
                    )));
                }
            }
        }
    }
    let failed: RefCell<Option<CoreError>> = RefCell::new(None);
    let out = e.substitute_vars(&|v| match v {
        JetVar::FieldJet { comp, index } => match sample.closed_jet(*comp, index, ctx) {
            Ok(expr) => Some(expr),
            Err(err) => {
                failed.borrow_mut().get_or_insert(err);
                Some(ScalarExpr::zero())
            }
        },
        _ => None,
    });
    match failed.into_inner() {
        Some(err) => Err(err),
        None => Ok(out),
    }
}

/// Second-order finite-difference derivative of a sampled function along one
/// axis: central in the interior, one-sided at the boundary.
pub fn axis_derivative(values: &[f64], lattice: &Lattice, axis: usize) -> Result<Vec<f64>> {
    let n_axis = lattice.shape[axis];
    if n_axis < 3 {
        return Err(CoreError::GridResolution { order: 1, points: n_axis, axis });
    }
    let h = lattice.spacing[axis];
    let stride = lattice.strides()[axis];
    let mut out = vec![0.0; values.len()];
    for (flat, idx) in lattice.indices().into_iter().enumerate() {
        let i = idx[axis];
        out[flat] = if i == 0 {
            (-3.0 * values[flat] + 4.0 * values[flat + stride] - values[flat + 2 * stride])
                / (2.0 * h)
        } else if i == n_axis - 1 {
            (3.0 * values[flat] - 4.0 * values[flat - stride] + values[flat - 2 * stride])
                / (2.0 * h)
        } else {
            (values[flat + stride] - values[flat - stride]) / (2.0 * h)
        };
    }
    Ok(out)
}

/// Numeric view of a field sample: every component realized as arrays on the
/// lattice, with jet derivatives computed (and memoized) on demand.
pub struct NumericSample<'a> {
    pub lattice: Lattice,
    ctx: &'a JetContext,
    base: Vec<Vec<f64>>,
    jets: RefCell<BTreeMap<(usize, MultiIndex), Vec<f64>>>,
}

impl<'a> NumericSample<'a> {
    pub fn new(sample: &FieldSample, ctx: &'a JetContext) -> Result<Self> {
        let lattice = sample
            .lattice
            .clone()
            .ok_or_else(|| CoreError::validation("numeric evaluation requires a lattice"))?;
        let mut base = Vec::with_capacity(sample.components.len());
        for comp in &sample.components {
            match comp {
                Component::Grid(values) => base.push(values.clone()),
                Component::Closed(e) => {
                    let mut values = Vec::with_capacity(lattice.len());
                    for idx in lattice.indices() {
                        let point = lattice.point(&idx);
                        values.push(e.eval_f64(&|v| match v {
                            JetVar::Base(mu) => Some(point[*mu]),
                            _ => None,
                        })?);
                    }
                    base.push(values);
                }
            }
        }
        Ok(NumericSample { lattice, ctx, base, jets: RefCell::new(BTreeMap::new()) })
    }

    /// Build directly from per-component arrays (used by flow perturbations).
    pub fn from_arrays(lattice: Lattice, arrays: Vec<Vec<f64>>, ctx: &'a JetContext) -> Self {
        NumericSample { lattice, ctx, base: arrays, jets: RefCell::new(BTreeMap::new()) }
    }

    /// Build from positions plus pre-seeded first-derivative arrays (one per
    /// component and axis). Flow perturbations use this so the stencil
    /// rounding is shared between branches and cancels in differences.
    pub fn from_arrays_with_first_jets(
        lattice: Lattice,
        arrays: Vec<Vec<f64>>,
        first: Vec<Vec<Vec<f64>>>,
        ctx: &'a JetContext,
    ) -> Self {
        let n = lattice.dim();
        let mut cache = BTreeMap::new();
        for (a, per_axis) in first.into_iter().enumerate() {
            for (axis, arr) in per_axis.into_iter().enumerate() {
                cache.insert((a, MultiIndex::unit(n, axis)), arr);
            }
        }
        NumericSample { lattice, ctx, base: arrays, jets: RefCell::new(cache) }
    }

    pub fn component(&self, a: usize) -> &[f64] {
        &self.base[a]
    }

    /// Sampled jet `d_I phi^a`.
    pub fn jet(&self, a: usize, index: &MultiIndex) -> Result<Vec<f64>> {
        if index.order() == 0 {
            return Ok(self.base[a].clone());
        }
        if let Some(hit) = self.jets.borrow().get(&(a, index.clone())) {
            return Ok(hit.clone());
        }
        let axis = index.first_axis().expect("positive order");
        let lowered = index.lowered(axis).expect("positive order");
        let inner = self.jet(a, &lowered)?;
        let out = axis_derivative(&inner, &self.lattice, axis)?;
        self.jets.borrow_mut().insert((a, index.clone()), out.clone());
        Ok(out)
    }

    /// Evaluate a base-and-jet expression at every lattice point.
    pub fn eval(&self, e: &ScalarExpr<Rat>) -> Result<Vec<f64>> {
        // Pre-pull the jet arrays so evaluation per point is a lookup.
        let mut jet_arrays: BTreeMap<JetVar, Vec<f64>> = BTreeMap::new();
        for v in e.variables() {
            match &v {
                JetVar::FieldJet { comp, index } => {
                    let arr = self.jet(*comp, index)?;
                    jet_arrays.insert(v.clone(), arr);
                }
                JetVar::ParamJet { .. } => {
                    return Err(CoreError::NumericEval(
                        "parameter jets have no numeric interpretation".into(),
                    ))
                }
                JetVar::Base(_) => {}
            }
        }
        let mut out = Vec::with_capacity(self.lattice.len());
        for (flat, idx) in self.lattice.indices().into_iter().enumerate() {
            let point = self.lattice.point(&idx);
            out.push(e.eval_f64(&|v| match v {
                JetVar::Base(mu) => Some(point[*mu]),
                other => jet_arrays.get(other).map(|arr| arr[flat]),
            })?);
        }
        Ok(out)
    }

    pub fn ctx(&self) -> &JetContext {
        self.ctx
    }
}

/// A pulled-back form on the base manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum Pullback {
    /// Horizontal form with closed-form coefficients.
    Symbolic(BigradedForm<Rat>),
    /// Horizontal form with sampled coefficients.
    Sampled(SampledForm),
}

/// Horizontal form with one value array per generator list.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledForm {
    pub lattice: Lattice,
    pub terms: BTreeMap<GenList, Vec<f64>>,
}

impl SampledForm {
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|arr| arr.iter().map(|x| x.abs()))
            .fold(0.0, f64::max)
    }

    /// Max-abs over the interior of the lattice. Stacked one-sided stencils
    /// do not converge at the edge nodes, so residual norms skip a margin.
    pub fn max_abs_interior(&self, margin: usize) -> f64 {
        self.terms
            .values()
            .map(|arr| max_abs_interior(arr, &self.lattice, margin))
            .fold(0.0, f64::max)
    }
}

/// Max-abs of a sampled array over lattice points at least `margin` nodes
/// away from every boundary (the full array when the grid is too small).
pub fn max_abs_interior(values: &[f64], lattice: &Lattice, margin: usize) -> f64 {
    let usable = lattice.shape.iter().all(|&s| s > 2 * margin + 1);
    let mut out = 0.0f64;
    for (flat, idx) in lattice.indices().into_iter().enumerate() {
        if usable
            && idx
                .iter()
                .zip(&lattice.shape)
                .any(|(&i, &s)| i < margin || i + margin >= s)
        {
            continue;
        }
        out = out.max(values[flat].abs());
    }
    out
}

/// Pull a bigraded form back along the prolongation of a field: contact
/// generators vanish on holonomic sections, so only the purely horizontal
/// part survives, with jets substituted.
pub fn pullback_form(
    form: &BigradedForm<Rat>,
    sample: &FieldSample,
    ctx: &JetContext,
) -> Result<Pullback> {
    if sample.is_closed() {
        let mut out = BigradedForm::zero();
        for (gens, coeff) in form.terms() {
            if gens.iter().any(Generator::is_vertical) {
                continue;
            }
            out = out.add(&BigradedForm::from_term(
                gens.clone(),
                substitute_jet_closed(coeff, sample, ctx)?,
            ));
        }
        Ok(Pullback::Symbolic(out))
    } else {
        let numeric = NumericSample::new(sample, ctx)?;
        let mut terms = BTreeMap::new();
        for (gens, coeff) in form.terms() {
            if gens.iter().any(Generator::is_vertical) {
                continue;
            }
            let values = numeric.eval(coeff)?;
            terms
                .entry(gens.clone())
                .and_modify(|acc: &mut Vec<f64>| {
                    for (a, v) in acc.iter_mut().zip(&values) {
                        *a += v;
                    }
                })
                .or_insert(values);
        }
        Ok(Pullback::Sampled(SampledForm { lattice: numeric.lattice.clone(), terms }))
    }
}

/// Exterior derivative on the base of a pulled-back horizontal form.
pub fn pullback_exterior_derivative(p: &Pullback, ctx: &JetContext) -> Result<Pullback> {
    match p {
        Pullback::Symbolic(form) => {
            let mut out = BigradedForm::zero();
            for (gens, coeff) in form.terms() {
                for mu in 0..ctx.dim() {
                    let d = coeff.partial(&Atom::Var(JetVar::Base(mu)), ctx);
                    if d.is_zero() {
                        continue;
                    }
                    let mut gs = Vec::with_capacity(gens.len() + 1);
                    gs.push(Generator::Horizontal(mu));
                    gs.extend_from_slice(gens);
                    out.insert_unsorted(gs, d);
                }
            }
            Ok(Pullback::Symbolic(out))
        }
        Pullback::Sampled(sampled) => {
            let mut out: BTreeMap<GenList, Vec<f64>> = BTreeMap::new();
            for (gens, values) in &sampled.terms {
                for mu in 0..ctx.dim() {
                    if gens.contains(&Generator::Horizontal(mu)) {
                        continue;
                    }
                    let d = axis_derivative(values, &sampled.lattice, mu)?;
                    // Sort d(x^mu) into place, tracking the sign.
                    let mut gs: GenList = Vec::with_capacity(gens.len() + 1);
                    gs.push(Generator::Horizontal(mu));
                    gs.extend_from_slice(gens);
                    let mut sign = 1.0;
                    for i in 1..gs.len() {
                        let mut j = i;
                        while j > 0 && gs[j - 1] > gs[j] {
                            gs.swap(j - 1, j);
                            sign = -sign;
                            j -= 1;
                        }
                    }
                    let entry = out.entry(gs).or_insert_with(|| vec![0.0; values.len()]);
                    for (a, v) in entry.iter_mut().zip(&d) {
                        *a += sign * v;
                    }
                }
            }
            Ok(Pullback::Sampled(SampledForm { lattice: sampled.lattice.clone(), terms: out }))
        }
    }
}

/// Integrate a second-order system `q'' = accel(q)` with classical RK4,
/// producing one sampled array per component plus the matching lattice.
pub fn rk4_second_order(
    accel: &dyn Fn(&[f64]) -> Vec<f64>,
    q0: &[f64],
    v0: &[f64],
    t0: f64,
    dt: f64,
    steps: usize,
) -> (Lattice, Vec<Vec<f64>>) {
    let dim = q0.len();
    let mut q = q0.to_vec();
    let mut v = v0.to_vec();
    let mut arrays = vec![Vec::with_capacity(steps + 1); dim];
    for (a, arr) in arrays.iter_mut().enumerate() {
        arr.push(q[a]);
    }
    for _ in 0..steps {
        // State y = (q, v), y' = (v, accel(q)).
        let k1q = v.clone();
        let k1v = accel(&q);
        let q2: Vec<f64> = q.iter().zip(&k1q).map(|(x, k)| x + 0.5 * dt * k).collect();
        let v2: Vec<f64> = v.iter().zip(&k1v).map(|(x, k)| x + 0.5 * dt * k).collect();
        let k2q = v2.clone();
        let k2v = accel(&q2);
        let q3: Vec<f64> = q.iter().zip(&k2q).map(|(x, k)| x + 0.5 * dt * k).collect();
        let v3: Vec<f64> = v.iter().zip(&k2v).map(|(x, k)| x + 0.5 * dt * k).collect();
        let k3q = v3.clone();
        let k3v = accel(&q3);
        let q4: Vec<f64> = q.iter().zip(&k3q).map(|(x, k)| x + dt * k).collect();
        let v4: Vec<f64> = v.iter().zip(&k3v).map(|(x, k)| x + dt * k).collect();
        let k4q = v4.clone();
        let k4v = accel(&q4);
        for a in 0..dim {
            q[a] += dt / 6.0 * (k1q[a] + 2.0 * k2q[a] + 2.0 * k3q[a] + k4q[a]);
            v[a] += dt / 6.0 * (k1v[a] + 2.0 * k2v[a] + 2.0 * k3v[a] + k4v[a]);
        }
        for (a, arr) in arrays.iter_mut().enumerate() {
            arr.push(q[a]);
        }
    }
    let lattice = Lattice {
        origin: vec![t0],
        spacing: vec![dt],
        shape: vec![steps + 1],
    };
    (lattice, arrays)
}
