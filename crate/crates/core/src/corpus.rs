//! Worked examples used across tests, the selftest suites, and the shipped
//! fixture files: the particle in a potential with its three symmetries, the
//! angular-momentum phase space, and componentwise Chern-Simons theory.

use crate::algebra::{ActionRule, AlgebraAction, LieAlgebra};
use crate::expr::ScalarExpr;
use crate::form::Generator;
use crate::jet::{FunApp, JetContext, JetVar, MultiIndex};
use crate::linfty::{CochainData, MomentumMap};
use crate::scalar::Scalar;
use crate::theory::Theory;
use num_traits::Zero;
use crate::vector_field::JetVectorField;
use crate::{Expr, Form, Rat, VectorField};

pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Potential choices for the particle theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    /// Free particle.
    Zero,
    /// Uninterpreted `V(q1,q2,q3)` with registered partials.
    Symbolic,
    /// `1/2 |q|^2`.
    Harmonic,
    /// `1/4 |q|^4` (anharmonic; used by the numeric invariance fixtures).
    Quartic,
}

pub fn mechanics_context(potential: Potential) -> JetContext {
    let mut ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![3])]);
    if potential == Potential::Symbolic {
        let args = (0..3).map(|i| JetVar::field0(i, 1)).collect();
        ctx.declare_function("V", args);
    }
    ctx
}

pub fn q(i: usize, order: u32) -> JetVar {
    JetVar::field(i, MultiIndex(vec![order]))
}

pub fn dq(i: usize, order: u32) -> Generator {
    Generator::VerticalField { comp: i, index: MultiIndex(vec![order]) }
}

/// Particle of unit mass: density `1/2 q_t . q_t - V(q)`.
pub fn particle(potential: Potential) -> Theory<Rat> {
    let ctx = mechanics_context(potential);
    let mut density = Expr::zero();
    for i in 0..3 {
        density = density.add(&Expr::var(q(i, 1)).pow(2).scale(&Rat::from_fraction(1, 2)));
    }
    match potential {
        Potential::Zero => {}
        Potential::Symbolic => density = density.sub(&Expr::fun(FunApp::base(0, 3))),
        Potential::Harmonic => {
            for i in 0..3 {
                density = density.sub(&Expr::var(q(i, 0)).pow(2).scale(&Rat::from_fraction(1, 2)));
            }
        }
        Potential::Quartic => {
            let mut norm2 = Expr::zero();
            for i in 0..3 {
                norm2 = norm2.add(&Expr::var(q(i, 0)).pow(2));
            }
            density = density.sub(&norm2.pow(2).scale(&Rat::from_fraction(1, 4)));
        }
    }
    Theory::new("particle", ctx, density).expect("particle theory is valid")
}

/// Abelian translation algebra `R^3`.
pub fn translation_algebra() -> LieAlgebra<Rat> {
    LieAlgebra::abelian("r3", vec!["e1".into(), "e2".into(), "e3".into()], false)
}

pub fn translation_action(ctx: &JetContext) -> AlgebraAction<Rat> {
    let mut fields = Vec::new();
    for i in 0..3 {
        let mut ch = vec![Expr::zero(); 3];
        ch[i] = Expr::one();
        fields.push(JetVectorField::vertical(ctx, ch).expect("valid characteristic"));
    }
    AlgebraAction { name: "translation".into(), rule: ActionRule::Global(fields) }
}

/// `mu_1: e^i -> q^i_t`, the only component.
pub fn translation_momap() -> MomentumMap<Rat> {
    let mut mu1 = std::collections::BTreeMap::new();
    for i in 0..3 {
        mu1.insert(vec![i], Form::scalar(Expr::var(q(i, 1))));
    }
    MomentumMap { name: "translation".into(), components: vec![CochainData::Global(mu1)] }
}

/// so(3) with constants aligned to the fundamental vector fields of the
/// rotation action: `[e_i, e_j] = -eps_{ijk} e_k`. With this basis the action
/// is a homomorphism, and the homotopy momentum map takes the components of
/// angular momentum exactly as printed.
pub fn rotation_algebra() -> LieAlgebra<Rat> {
    let mut c = vec![vec![vec![Rat::from_i64(0); 3]; 3]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, col) in row.iter_mut().enumerate() {
            for (k, slot) in col.iter_mut().enumerate() {
                *slot = Rat::from_i64(-levi_civita(i, j, k));
            }
        }
    }
    LieAlgebra::new("so3", vec!["e1".into(), "e2".into(), "e3".into()], c, false)
        .expect("so(3) constants satisfy Jacobi")
}

/// Rotation characteristics `Q^i(e_a) = (e_a x q)^i` on the position fields.
pub fn rotation_action(ctx: &JetContext) -> AlgebraAction<Rat> {
    let mut fields = Vec::new();
    for a in 0..3 {
        let mut ch = vec![Expr::zero(); 3];
        for (i, slot) in ch.iter_mut().enumerate() {
            for k in 0..3 {
                let eps = levi_civita(i, a, k);
                if eps != 0 {
                    *slot = slot.add(&Expr::var(q(k, 0)).scale(&Rat::from_i64(eps)));
                }
            }
        }
        fields.push(JetVectorField::vertical(ctx, ch).expect("valid characteristic"));
    }
    AlgebraAction { name: "rotation".into(), rule: ActionRule::Global(fields) }
}

/// Cross product component `(x cross y)_a` of two 3-vectors of expressions.
#[allow(clippy::needless_range_loop)] // index notation mirrors the formula
pub fn cross_component(x: &[Expr], y: &[Expr], a: usize) -> Expr {
    let mut out = Expr::zero();
    for i in 0..3 {
        for j in 0..3 {
            let eps = levi_civita(a, i, j);
            if eps != 0 {
                out = out.add(&x[i].mul(&y[j]).scale(&Rat::from_i64(eps)));
            }
        }
    }
    out
}

/// `mu_1: e^i -> (q x q_t)_i`.
pub fn rotation_momap() -> MomentumMap<Rat> {
    let qs: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 0))).collect();
    let qdots: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1))).collect();
    let mut mu1 = std::collections::BTreeMap::new();
    for a in 0..3 {
        mu1.insert(vec![a], Form::scalar(cross_component(&qs, &qdots, a)));
    }
    MomentumMap { name: "rotation".into(), components: vec![CochainData::Global(mu1)] }
}

/// One-dimensional abelian algebra for time translation.
pub fn time_algebra() -> LieAlgebra<Rat> {
    LieAlgebra::abelian("time", vec!["e".into()], false)
}

/// Time translation: strictly vertical part `-q^i_t d/dq^i` plus the Cartan
/// lift of `d/dt`.
pub fn time_translation_action(ctx: &JetContext) -> AlgebraAction<Rat> {
    let ch: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1)).neg()).collect();
    let field = JetVectorField::vertical(ctx, ch)
        .expect("valid characteristic")
        .with_horizontal(vec![Expr::one()])
        .expect("constant lift");
    AlgebraAction { name: "time_translation".into(), rule: ActionRule::Global(vec![field]) }
}

/// `mu_1 = -(1/2 q_t . q_t + V(q))`, minus the total energy.
pub fn time_translation_momap(potential: Potential) -> MomentumMap<Rat> {
    let mut energy = Expr::zero();
    for i in 0..3 {
        energy = energy.add(&Expr::var(q(i, 1)).pow(2).scale(&Rat::from_fraction(1, 2)));
    }
    match potential {
        Potential::Zero => {}
        Potential::Symbolic => energy = energy.add(&Expr::fun(FunApp::base(0, 3))),
        Potential::Harmonic => {
            for i in 0..3 {
                energy = energy.add(&Expr::var(q(i, 0)).pow(2).scale(&Rat::from_fraction(1, 2)));
            }
        }
        Potential::Quartic => {
            let mut norm2 = Expr::zero();
            for i in 0..3 {
                norm2 = norm2.add(&Expr::var(q(i, 0)).pow(2));
            }
            energy = energy.add(&norm2.pow(2).scale(&Rat::from_fraction(1, 4)));
        }
    }
    let mut mu1 = std::collections::BTreeMap::new();
    mu1.insert(vec![0], Form::scalar(energy.neg()));
    MomentumMap { name: "time_translation".into(), components: vec![CochainData::Global(mu1)] }
}

// ---------------------------------------------------------------------------
// Classical angular momentum on T*R^3, encoded over a 0-dimensional base so
// the total differential is the de Rham differential of the fiber.
// ---------------------------------------------------------------------------

pub fn phase_space_context() -> JetContext {
    JetContext::new(Vec::new(), vec![("q".into(), vec![3]), ("p".into(), vec![3])])
}

fn fiber(i: usize) -> JetVar {
    JetVar::field(i, MultiIndex::zero(0))
}

fn dfiber(i: usize) -> Generator {
    Generator::VerticalField { comp: i, index: MultiIndex::zero(0) }
}

/// The phase-space theory with `omega = v(p_i) ^ v(q^i)` supplied directly.
/// The printed `dq^i ^ dp_i` satisfies the Hamiltonian condition
/// `i_rho omega = -d mu` with `mu = q x p` only up to overall sign; the
/// orientation used here makes both momentum-map relations hold as stated.
pub fn phase_space_theory() -> Theory<Rat> {
    let ctx = phase_space_context();
    let mut omega = Form::zero();
    for i in 0..3 {
        omega.insert_unsorted(vec![dfiber(3 + i), dfiber(i)], Expr::one());
    }
    let mut theory = Theory::new("phase_space", ctx, Expr::zero()).expect("valid theory");
    theory.omega_override = Some(omega);
    theory
}

/// Cotangent lift of the rotation action: `(a x q, a x p)`.
pub fn phase_space_rotation_action(ctx: &JetContext) -> AlgebraAction<Rat> {
    let mut fields = Vec::new();
    for a in 0..3 {
        let mut ch = vec![Expr::zero(); 6];
        for i in 0..3 {
            for k in 0..3 {
                let eps = levi_civita(i, a, k);
                if eps != 0 {
                    ch[i] = ch[i].add(&Expr::var(fiber(k)).scale(&Rat::from_i64(eps)));
                    ch[3 + i] = ch[3 + i].add(&Expr::var(fiber(3 + k)).scale(&Rat::from_i64(eps)));
                }
            }
        }
        fields.push(JetVectorField::vertical(ctx, ch).expect("valid characteristic"));
    }
    AlgebraAction { name: "rotation_lift".into(), rule: ActionRule::Global(fields) }
}

/// `mu: a -> (q x p) . a`, the angular momentum.
pub fn phase_space_momap() -> MomentumMap<Rat> {
    let qs: Vec<Expr> = (0..3).map(|i| Expr::var(fiber(i))).collect();
    let ps: Vec<Expr> = (0..3).map(|i| Expr::var(fiber(3 + i))).collect();
    let mut mu1 = std::collections::BTreeMap::new();
    for a in 0..3 {
        mu1.insert(vec![a], Form::scalar(cross_component(&qs, &ps, a)));
    }
    MomentumMap { name: "angular_momentum".into(), components: vec![CochainData::Global(mu1)] }
}

// ---------------------------------------------------------------------------
// Chern-Simons theory, componentwise over a declared basis with structure
// constants f and invariant symmetric form kappa.
// ---------------------------------------------------------------------------

/// Gauge algebra flavors used by the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeAlgebra {
    /// Two-dimensional abelian algebra, kappa = identity.
    Abelian2,
    /// so(3)-valued with `[e_i,e_j] = eps_{ijk} e_k`, kappa = identity.
    So3,
}

impl GaugeAlgebra {
    pub fn dim(&self) -> usize {
        match self {
            GaugeAlgebra::Abelian2 => 2,
            GaugeAlgebra::So3 => 3,
        }
    }

    /// Structure constants `f^k_{ij}` as exact rationals.
    pub fn f(&self, i: usize, j: usize, k: usize) -> Rat {
        match self {
            GaugeAlgebra::Abelian2 => Rat::from_i64(0),
            GaugeAlgebra::So3 => Rat::from_i64(levi_civita(i, j, k)),
        }
    }

    /// Invariant symmetric form `kappa_{ij}` (identity for both flavors).
    pub fn kappa(&self, i: usize, j: usize) -> Rat {
        if i == j {
            Rat::from_i64(1)
        } else {
            Rat::from_i64(0)
        }
    }

    pub fn algebra(&self) -> LieAlgebra<Rat> {
        let m = self.dim();
        let mut c = vec![vec![vec![Rat::from_i64(0); m]; m]; m];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, col) in row.iter_mut().enumerate() {
                for (k, slot) in col.iter_mut().enumerate() {
                    *slot = self.f(i, j, k);
                }
            }
        }
        let basis = (1..=m).map(|i| format!("e{i}")).collect();
        LieAlgebra::new(format!("gauge{m}"), basis, c, true).expect("valid gauge algebra")
    }
}

/// Context for Chern-Simons: fields `A[m,3]` over a 3-dimensional base with
/// a parameter bundle of fiber dimension m. The momentum-map relations fit
/// at jet order 2; the Noether-primitive verification needs one more.
pub fn cs_context(alg: GaugeAlgebra) -> JetContext {
    let m = alg.dim();
    JetContext::new(
        vec!["x0".into(), "x1".into(), "x2".into()],
        vec![("A".into(), vec![m, 3])],
    )
    .with_params(m)
    .with_jet_order(3)
}

/// Flattened component index of `A^alpha_mu`.
pub fn a_comp(alpha: usize, mu: usize) -> usize {
    alpha * 3 + mu
}

/// The connection as a g-valued horizontal 1-form, componentwise.
pub fn a_form(alg: GaugeAlgebra, ctx: &JetContext) -> Vec<Form> {
    let n = ctx.dim();
    (0..alg.dim())
        .map(|alpha| {
            let mut f = Form::zero();
            for mu in 0..3 {
                let coeff = Expr::var(JetVar::field(a_comp(alpha, mu), MultiIndex::zero(n)));
                f = f.add(
                    &Form::scalar(coeff).wedge(&Form::generator(Generator::Horizontal(mu))),
                );
            }
            f
        })
        .collect()
}

/// The contact part `delta A^alpha = v(A^alpha_mu) ^ d(x^mu)`.
pub fn delta_a_form(alg: GaugeAlgebra, ctx: &JetContext) -> Vec<Form> {
    let n = ctx.dim();
    (0..alg.dim())
        .map(|alpha| {
            let mut f = Form::zero();
            for mu in 0..3 {
                let g = Generator::VerticalField {
                    comp: a_comp(alpha, mu),
                    index: MultiIndex::zero(n),
                };
                f = f.add(
                    &Form::generator(g).wedge(&Form::generator(Generator::Horizontal(mu))),
                );
            }
            f
        })
        .collect()
}

/// A generic parameter section as a g-valued 0-form, and its differential.
pub fn param_form(alg: GaugeAlgebra, ctx: &JetContext, slot: usize) -> Vec<Form> {
    let n = ctx.dim();
    (0..alg.dim())
        .map(|comp| Form::scalar(Expr::var(JetVar::param(slot, comp, MultiIndex::zero(n)))))
        .collect()
}

/// Componentwise wedge with the invariant form: `kappa_{ab} P^a ^ Q^b`.
#[allow(clippy::needless_range_loop)] // index notation mirrors the formula
pub fn wedge_kappa(alg: GaugeAlgebra, p: &[Form], r: &[Form]) -> Form {
    let m = alg.dim();
    let mut out = Form::zero();
    for a in 0..m {
        for b in 0..m {
            let k = alg.kappa(a, b);
            if k.is_zero() {
                continue;
            }
            out = out.add(&p[a].wedge(&r[b]).scale(&k));
        }
    }
    out
}

/// Componentwise bracket: `[P, Q]^c = f^c_{ab} P^a ^ Q^b`.
#[allow(clippy::needless_range_loop)] // index notation mirrors the formula
pub fn wedge_bracket(alg: GaugeAlgebra, p: &[Form], r: &[Form]) -> Vec<Form> {
    let m = alg.dim();
    let mut out = vec![Form::zero(); m];
    for a in 0..m {
        for b in 0..m {
            for (c, slot) in out.iter_mut().enumerate() {
                let f = alg.f(a, b, c);
                if f.is_zero() {
                    continue;
                }
                *slot = slot.add(&p[a].wedge(&r[b]).scale(&f));
            }
        }
    }
    out
}

pub fn d_h_gvalued(forms: &[Form], ctx: &JetContext) -> Vec<Form> {
    forms
        .iter()
        .map(|f| f.d_h(ctx).expect("jet order suffices"))
        .collect()
}

/// Extract the density of a (0, n)-form.
pub fn form_density(form: &Form, ctx: &JetContext) -> Expr {
    let vol_key: Vec<Generator> = (0..ctx.dim()).map(Generator::Horizontal).collect();
    let mut density = Expr::zero();
    for (gens, coeff) in form.terms() {
        assert_eq!(*gens, vol_key, "not a top horizontal form");
        density = density.add(coeff);
    }
    density
}

/// Chern-Simons theory: `L = Tr(dA ^ A) + (2/3) Tr(A ^ A ^ A)` expanded
/// componentwise; the trace of a triple product uses kappa([.,.],.)/2.
pub fn chern_simons_theory(alg: GaugeAlgebra) -> Theory<Rat> {
    let ctx = cs_context(alg);
    let a = a_form(alg, &ctx);
    let da = d_h_gvalued(&a, &ctx);
    let quadratic = wedge_kappa(alg, &da, &a);
    // Tr(A^A^A) = 1/2 kappa([A,A] ^ A).
    let cubic = wedge_kappa(alg, &wedge_bracket(alg, &a, &a), &a).scale(&Rat::from_fraction(1, 2));
    let density_form = quadratic.add(&cubic.scale(&Rat::from_fraction(2, 3)));
    let density = form_density(&density_form, &ctx);
    Theory::new(format!("cs{}", alg.dim()), ctx, density).expect("valid CS theory")
}

/// Curvature `F(A) = dA + 1/2 [A, A]`, componentwise.
pub fn curvature(alg: GaugeAlgebra, ctx: &JetContext) -> Vec<Form> {
    let a = a_form(alg, ctx);
    let da = d_h_gvalued(&a, ctx);
    let aa = wedge_bracket(alg, &a, &a);
    da.iter()
        .zip(&aa)
        .map(|(d, w)| d.add(&w.scale(&Rat::from_fraction(1, 2))))
        .collect()
}

/// Expected `EL = 2 Tr(delta A ^ F(A))`, the trace-expansion oracle.
pub fn cs_expected_el(alg: GaugeAlgebra, ctx: &JetContext) -> Form {
    let delta_a = delta_a_form(alg, ctx);
    let f = curvature(alg, ctx);
    wedge_kappa(alg, &delta_a, &f).scale(&Rat::from_i64(2))
}

/// Expected `gamma = Tr(delta A ^ A)`.
pub fn cs_expected_gamma(alg: GaugeAlgebra, ctx: &JetContext) -> Form {
    let delta_a = delta_a_form(alg, ctx);
    let a = a_form(alg, ctx);
    wedge_kappa(alg, &delta_a, &a)
}

/// Gauge action template `rho(X): A -> dX + [A, X]` over parameter slot 0.
pub fn gauge_action(alg: GaugeAlgebra, ctx: &JetContext) -> AlgebraAction<Rat> {
    let m = alg.dim();
    let n = ctx.dim();
    let mut ch = vec![Expr::zero(); ctx.num_fields()];
    for alpha in 0..m {
        for mu in 0..3 {
            let mut e = Expr::var(JetVar::param(0, alpha, MultiIndex::unit(n, mu)));
            for beta in 0..m {
                for gamma in 0..m {
                    let f = alg.f(beta, gamma, alpha);
                    if f.is_zero() {
                        continue;
                    }
                    let a_jet = Expr::var(JetVar::field(a_comp(beta, mu), MultiIndex::zero(n)));
                    let x = Expr::var(JetVar::param(0, gamma, MultiIndex::zero(n)));
                    e = e.add(&a_jet.mul(&x).scale(&f));
                }
            }
            ch[a_comp(alpha, mu)] = e;
        }
    }
    let template = JetVectorField::vertical(ctx, ch).expect("valid gauge characteristic");
    AlgebraAction { name: format!("gauge{m}_action"), rule: ActionRule::Local(template) }
}

/// Momentum-map components for the gauge symmetry, componentwise:
/// `mu_1(X) = -2 Tr(A ^ dX + A ^ A ^ X)` and `mu_2(X^Y) = 2 Tr(X ^ dY)`.
/// Cochains are alternating, so templates evaluate antisymmetrized; under
/// that convention the relation oracle fixes the cubic component to
/// `mu_3(X^Y^Z) = -kappa(X, [Y,Z])`.
pub fn cs_momap(alg: GaugeAlgebra, ctx: &JetContext) -> MomentumMap<Rat> {
    let a = a_form(alg, ctx);
    let x = param_form(alg, ctx, 0);
    let y = param_form(alg, ctx, 1);
    let z = param_form(alg, ctx, 2);
    let dx = d_h_gvalued(&x, ctx);
    let dy = d_h_gvalued(&y, ctx);

    // mu_1 = -2 [ Tr(A ^ dX) + 1/2 Tr([A,A] ^ X) ].
    let tr_adx = wedge_kappa(alg, &a, &dx);
    let tr_aax = wedge_kappa(alg, &wedge_bracket(alg, &a, &a), &x).scale(&Rat::from_fraction(1, 2));
    let mu1 = tr_adx.add(&tr_aax).scale(&Rat::from_i64(-2));

    // mu_2 = 2 Tr(X ^ dY).
    let mu2 = wedge_kappa(alg, &x, &dy).scale(&Rat::from_i64(2));

    // mu_3 = -kappa(X, [Y, Z]).
    let mu3 = wedge_kappa(alg, &x, &wedge_bracket(alg, &y, &z)).scale(&Rat::from_i64(-1));

    MomentumMap {
        name: format!("gauge{}_mu", alg.dim()),
        components: vec![
            CochainData::Local(mu1),
            CochainData::Local(mu2),
            CochainData::Local(mu3),
        ],
    }
}

/// The standard Noether primitive for the gauge symmetry: `alpha = Tr(A ^ dX)`.
pub fn cs_alpha(alg: GaugeAlgebra, ctx: &JetContext) -> Form {
    let a = a_form(alg, ctx);
    let dx = d_h_gvalued(&param_form(alg, ctx, 0), ctx);
    wedge_kappa(alg, &a, &dx)
}

/// Expected gauge current `j = 2 Tr(A ^ dX + A ^ A ^ X)`.
pub fn cs_expected_current(alg: GaugeAlgebra, ctx: &JetContext) -> Form {
    let a = a_form(alg, ctx);
    let x = param_form(alg, ctx, 0);
    let dx = d_h_gvalued(&x, ctx);
    let tr_adx = wedge_kappa(alg, &a, &dx);
    let tr_aax = wedge_kappa(alg, &wedge_bracket(alg, &a, &a), &x).scale(&Rat::from_fraction(1, 2));
    tr_adx.add(&tr_aax).scale(&Rat::from_i64(2))
}

/// Expected `omega = 2 Tr(delta A ^ F) + Tr(delta A ^ delta A)`.
pub fn cs_expected_omega(alg: GaugeAlgebra, ctx: &JetContext) -> Form {
    let delta_a = delta_a_form(alg, ctx);
    cs_expected_el(alg, ctx).add(&wedge_kappa(alg, &delta_a, &delta_a))
}

/// A vector field we can reuse as "the" generic vertical probe field.
pub fn probe_characteristic(ctx: &JetContext) -> VectorField {
    let mut ch = Vec::new();
    for comp in 0..ctx.num_fields() {
        let e = if ctx.dim() == 0 {
            ScalarExpr::var(JetVar::field(comp, MultiIndex::zero(0)))
        } else {
            ScalarExpr::var(JetVar::field(comp, MultiIndex::zero(ctx.dim()))).pow(2)
        };
        ch.push(e);
    }
    JetVectorField::vertical(ctx, ch).expect("valid probe")
}
