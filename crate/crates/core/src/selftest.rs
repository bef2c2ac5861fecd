//! Seeded randomized property suites: bicomplex identities, Leibniz rules,
//! prolongation brackets, the Euler-operator acyclicity direction, and the
//! cochain complex identities. The CLI `selftest` command runs these; the
//! acceptance suite pins the case counts and runtime.

use crate::algebra::LieAlgebra;
use crate::corpus;
use crate::form::Generator;
use crate::jet::{JetContext, JetVar, MultiIndex};
use crate::obstruction::{d_g, d_x, Cochain};
use crate::scalar::Scalar;
use crate::theory::{euler_operator, FiberComp};
use crate::vector_field::JetVectorField;
use crate::{Expr, Form, Rat, VectorField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Random forms per form-level suite.
    pub form_cases: usize,
    /// Random vertical characteristics for the prolongation suite.
    pub characteristic_cases: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 0, form_cases: 200, characteristic_cases: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

fn contexts() -> Vec<JetContext> {
    vec![
        corpus::mechanics_context(corpus::Potential::Zero).with_jet_order(4),
        JetContext::new(
            vec!["x0".into(), "x1".into()],
            vec![("u".into(), vec![2])],
        )
        .with_jet_order(4),
    ]
}

fn random_multi_index(rng: &mut StdRng, ctx: &JetContext, max_order: u32) -> MultiIndex {
    let mut idx = MultiIndex::zero(ctx.dim());
    if ctx.dim() == 0 {
        return idx;
    }
    let order = rng.gen_range(0..=max_order);
    for _ in 0..order {
        let axis = rng.gen_range(0..ctx.dim());
        idx.0[axis] += 1;
    }
    idx
}

fn random_expr(rng: &mut StdRng, ctx: &JetContext, max_jet_order: u32) -> Expr {
    let mut out = Expr::zero();
    let terms = rng.gen_range(1..=3);
    for _ in 0..terms {
        let num = rng.gen_range(-4i64..=4);
        let den = rng.gen_range(1i64..=3);
        let mut term = Expr::constant(Rat::from_fraction(if num == 0 { 1 } else { num }, den));
        let atoms = rng.gen_range(0..=2);
        for _ in 0..atoms {
            let var = if ctx.dim() > 0 && rng.gen_bool(0.25) {
                JetVar::Base(rng.gen_range(0..ctx.dim()))
            } else {
                JetVar::field(
                    rng.gen_range(0..ctx.num_fields()),
                    random_multi_index(rng, ctx, max_jet_order),
                )
            };
            let power = rng.gen_range(1..=2);
            term = term.mul(&Expr::var(var).pow(power));
        }
        out = out.add(&term);
    }
    out
}

fn random_generator(rng: &mut StdRng, ctx: &JetContext, max_jet_order: u32) -> Generator {
    if ctx.dim() > 0 && rng.gen_bool(0.4) {
        Generator::Horizontal(rng.gen_range(0..ctx.dim()))
    } else {
        Generator::VerticalField {
            comp: rng.gen_range(0..ctx.num_fields()),
            index: random_multi_index(rng, ctx, max_jet_order),
        }
    }
}

/// Random form with at most 5 terms and jet orders leaving room for two
/// differentials under the context's truncation order.
pub fn random_form(rng: &mut StdRng, ctx: &JetContext) -> Form {
    let max_order = ctx.jet_order.saturating_sub(2);
    let mut out = Form::zero();
    let terms = rng.gen_range(1..=5);
    for _ in 0..terms {
        let degree = rng.gen_range(0..=2);
        let mut gens = Vec::new();
        for _ in 0..degree {
            gens.push(random_generator(rng, ctx, max_order));
        }
        out.insert_unsorted(gens, random_expr(rng, ctx, max_order));
    }
    out
}

/// Random strictly vertical characteristic with bounded jet order.
pub fn random_characteristic(rng: &mut StdRng, ctx: &JetContext, max_order: u32) -> VectorField {
    let ch = (0..ctx.num_fields())
        .map(|_| random_expr(rng, ctx, max_order))
        .collect();
    JetVectorField::vertical(ctx, ch).expect("valid characteristic")
}

struct Suite {
    name: String,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite { name: name.into(), cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

/// Run every suite with the given seed; deterministic across runs.
pub fn run_selftest(config: &SelftestConfig) -> Vec<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(config.seed);
    let ctxs = contexts();
    let mut results = Vec::new();

    // normalize o normalize = normalize, via rebuilding from the term list.
    let mut suite = Suite::new("normalize idempotent");
    for case in 0..config.form_cases {
        let ctx = &ctxs[case % ctxs.len()];
        let e = random_expr(&mut rng, ctx, ctx.jet_order);
        let rebuilt = Expr::from_terms(e.terms().map(|(m, c)| (m.clone(), c.clone())));
        suite.record(rebuilt == e, || format!("expr {}", e.display(ctx)));
    }
    results.push(suite.finish());

    // Total-derivative Leibniz rule and commutation.
    let mut suite = Suite::new("total derivative Leibniz and commutation");
    for case in 0..config.form_cases {
        let ctx = &ctxs[case % ctxs.len()];
        if ctx.dim() == 0 {
            continue;
        }
        let a = random_expr(&mut rng, ctx, 1);
        let b = random_expr(&mut rng, ctx, 1);
        let mu = rng.gen_range(0..ctx.dim());
        let leibniz = a
            .mul(&b)
            .total_derivative(mu, ctx)
            .and_then(|lhs| {
                let rhs = a.total_derivative(mu, ctx)?.mul(&b).add(&a.mul(&b.total_derivative(mu, ctx)?));
                Ok(lhs == rhs)
            })
            .unwrap_or(false);
        let nu = rng.gen_range(0..ctx.dim());
        let commute = a
            .total_derivative(mu, ctx)
            .and_then(|d| d.total_derivative(nu, ctx))
            .and_then(|lhs| {
                let rhs = a.total_derivative(nu, ctx)?.total_derivative(mu, ctx)?;
                Ok(lhs == rhs)
            })
            .unwrap_or(false);
        suite.record(leibniz && commute, || format!("exprs {} | {}", a.display(ctx), b.display(ctx)));
    }
    results.push(suite.finish());

    // d_h^2 = d_v^2 = 0 and anticommutation.
    let mut suite = Suite::new("bicomplex differentials");
    for case in 0..config.form_cases {
        let ctx = &ctxs[case % ctxs.len()];
        let f = random_form(&mut rng, ctx);
        let ok = (|| -> crate::Result<bool> {
            let dh2 = f.d_h(ctx)?.d_h(ctx)?;
            let dv2 = f.d_v(ctx).d_v(ctx);
            let anti = f.d_h(ctx)?.d_v(ctx).add(&f.d_v(ctx).d_h(ctx)?);
            Ok(dh2.is_zero() && dv2.is_zero() && anti.is_zero())
        })()
        .unwrap_or(false);
        suite.record(ok, || format!("form with {} terms", f.num_terms()));
    }
    results.push(suite.finish());

    // Wedge graded commutativity on homogeneous factors.
    let mut suite = Suite::new("wedge graded commutativity");
    for case in 0..config.form_cases {
        let ctx = &ctxs[case % ctxs.len()];
        let max_order = ctx.jet_order.saturating_sub(2);
        let da = rng.gen_range(0..=2usize);
        let db = rng.gen_range(0..=2usize);
        let mut a = Form::zero();
        a.insert_unsorted(
            (0..da).map(|_| random_generator(&mut rng, ctx, max_order)).collect(),
            random_expr(&mut rng, ctx, max_order),
        );
        let mut b = Form::zero();
        b.insert_unsorted(
            (0..db).map(|_| random_generator(&mut rng, ctx, max_order)).collect(),
            random_expr(&mut rng, ctx, max_order),
        );
        let lhs = a.wedge(&b);
        let mut rhs = b.wedge(&a);
        if (da * db) % 2 == 1 {
            rhs = rhs.neg();
        }
        // Associativity against a third random factor.
        let c = random_form(&mut rng, ctx);
        let assoc = a.wedge(&b).wedge(&c) == a.wedge(&b.wedge(&c));
        suite.record(lhs == rhs && assoc, || format!("degrees {da} x {db}"));
    }
    results.push(suite.finish());

    // Contraction is a graded derivation over the wedge.
    let mut suite = Suite::new("contraction graded Leibniz");
    for case in 0..config.form_cases {
        let ctx = &ctxs[case % ctxs.len()];
        let max_order = ctx.jet_order.saturating_sub(2);
        let x = random_characteristic(&mut rng, ctx, 1);
        let da = rng.gen_range(0..=2usize);
        let mut a = Form::zero();
        a.insert_unsorted(
            (0..da).map(|_| random_generator(&mut rng, ctx, max_order)).collect(),
            random_expr(&mut rng, ctx, max_order),
        );
        let b = random_form(&mut rng, ctx);
        let ok = (|| -> crate::Result<bool> {
            let lhs = x.contract(&a.wedge(&b), ctx)?;
            let mut second = a.wedge(&x.contract(&b, ctx)?);
            if da % 2 == 1 {
                second = second.neg();
            }
            let rhs = x.contract(&a, ctx)?.wedge(&b).add(&second);
            Ok(lhs == rhs)
        })()
        .unwrap_or(false);
        suite.record(ok, || format!("degree {da} against {} terms", b.num_terms()));
    }
    results.push(suite.finish());

    // [i_{pr Q}, d_h] = 0 for strictly vertical fields.
    let mut suite = Suite::new("vertical contraction anticommutes with d_h");
    for case in 0..config.characteristic_cases {
        let ctx = &ctxs[case % ctxs.len()];
        let x = random_characteristic(&mut rng, ctx, 1);
        let f = random_form(&mut rng, ctx);
        let ok = (|| -> crate::Result<bool> {
            let lhs = x.contract(&f.d_h(ctx)?, ctx)?;
            let rhs = x.contract(&f, ctx)?.d_h(ctx)?;
            Ok(lhs.add(&rhs).is_zero())
        })()
        .unwrap_or(false);
        suite.record(ok, || format!("form with {} terms", f.num_terms()));
    }
    results.push(suite.finish());

    // Lie derivative commutes with the total differential. The identity
    // chains three differentials and a prolongation, so this suite keeps
    // jets shallow: 0-jet characteristics, order <= 1 forms.
    let mut suite = Suite::new("Lie derivative commutes with d_tot");
    for case in 0..(config.form_cases / 4).max(8) {
        let ctx = &ctxs[case % ctxs.len()];
        let x = random_characteristic(&mut rng, ctx, 0);
        let f = {
            let mut f = Form::zero();
            let terms = rng.gen_range(1..=4);
            for _ in 0..terms {
                let degree = rng.gen_range(0..=2);
                let gens = (0..degree).map(|_| random_generator(&mut rng, ctx, 1)).collect();
                f.insert_unsorted(gens, random_expr(&mut rng, ctx, 1));
            }
            f
        };
        let ok = (|| -> crate::Result<bool> {
            let lhs = x.lie_derivative(&f.d_tot(ctx)?, ctx)?;
            let rhs = x.lie_derivative(&f, ctx)?.d_tot(ctx)?;
            Ok(lhs == rhs)
        })()
        .unwrap_or(false);
        suite.record(ok, || format!("form with {} terms", f.num_terms()));
    }
    results.push(suite.finish());

    // Euler operators annihilate total divergences: E(d_h beta) = 0 for
    // random (0, n-1)-forms beta.
    let mut suite = Suite::new("Euler operator annihilates d_h-exact densities");
    for case in 0..(config.form_cases / 4).max(8) {
        let ctx = &ctxs[case % ctxs.len()];
        if ctx.dim() == 0 {
            continue;
        }
        // beta = sum_mu f_mu i_mu vol.
        let mut beta = Form::zero();
        for mu in 0..ctx.dim() {
            beta = beta.add(
                &crate::theory::interior_volume(ctx, mu)
                    .scale_expr(&random_expr(&mut rng, ctx, 1)),
            );
        }
        let ok = (|| -> crate::Result<bool> {
            let d = beta.d_h(ctx)?;
            let density = corpus::form_density(&d, ctx);
            for a in 0..ctx.num_fields() {
                if !euler_operator(&density, FiberComp::Field(a), ctx)?.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        })()
        .unwrap_or(false);
        suite.record(ok, || "divergence density".to_string());
    }
    results.push(suite.finish());

    // Cochain complex identities over so(3) and an abelian algebra.
    let mut suite = Suite::new("cochain complex identities");
    let so3 = corpus::rotation_algebra();
    let abelian = corpus::translation_algebra();
    let mech = &ctxs[0];
    for case in 0..(config.form_cases / 4).max(8) {
        let alg: &LieAlgebra<Rat> = if case % 2 == 0 { &so3 } else { &abelian };
        let arity = rng.gen_range(1..=2usize);
        let mut c = Cochain::zero(arity);
        for tuple in crate::linfty::increasing_tuples(alg.dim(), arity) {
            c.insert_value(tuple, Form::scalar(random_expr(&mut rng, mech, 1)));
        }
        let ok = (|| -> crate::Result<bool> {
            let gg = d_g(&d_g(&c, alg), alg);
            let xx = d_x(&d_x(&c, mech)?, mech)?;
            let anti = d_g(&d_x(&c, mech)?, alg).add(&d_x(&d_g(&c, alg), mech)?);
            Ok(gg.is_zero() && xx.is_zero() && anti.is_zero())
        })()
        .unwrap_or(false);
        suite.record(ok, || format!("arity {arity} cochain"));
    }
    results.push(suite.finish());

    results
}

/// Demonstrate residual reporting under an injected fault: with the
/// contact-rule sign flipped, the differentials stop anticommuting, and the
/// anticommutator witness on a random probe is reported. Both signs keep
/// `d_h^2 = 0`; anticommutation with `d_v` is what pins the convention.
pub fn injected_fault_demo(seed: u64) -> (bool, String) {
    let ctx = corpus::mechanics_context(corpus::Potential::Zero).with_jet_order(4);
    let mut rng = StdRng::seed_from_u64(seed);
    // A probe with guaranteed field dependence plus random noise terms.
    let mut f = Form::scalar(crate::Expr::var(JetVar::field(0, MultiIndex(vec![1]))));
    f = f.add(&{
        let mut noise = Form::zero();
        noise.insert_unsorted(Vec::new(), random_expr(&mut rng, &ctx, 1));
        noise
    });
    // Sign-flipped contact rule: d_h(v(u_I)) = +sum v(u_{I+mu}) ^ d(x^mu).
    let faulty_dh = |form: &Form| -> crate::Result<Form> {
        let mut out = Form::zero();
        for (gens, coeff) in form.terms() {
            for mu in 0..ctx.dim() {
                let dc = coeff.total_derivative(mu, &ctx)?;
                if dc.is_zero() {
                    continue;
                }
                let mut gs = vec![Generator::Horizontal(mu)];
                gs.extend_from_slice(gens);
                out.insert_unsorted(gs, dc);
            }
            for (j, g) in gens.iter().enumerate() {
                let Generator::VerticalField { comp, index } = g else { continue };
                for mu in 0..ctx.dim() {
                    let raised = index.raised(mu, ctx.jet_order)?;
                    let mut gs = Vec::with_capacity(gens.len() + 1);
                    gs.extend_from_slice(&gens[..j]);
                    gs.push(Generator::VerticalField { comp: *comp, index: raised });
                    gs.push(Generator::Horizontal(mu));
                    gs.extend_from_slice(&gens[j + 1..]);
                    let c = if j % 2 == 0 { coeff.clone() } else { coeff.neg() };
                    out.insert_unsorted(gs, c);
                }
            }
        }
        Ok(out)
    };
    let residual = (|| -> crate::Result<Form> {
        let a = faulty_dh(&f.d_v(&ctx))?;
        let b = faulty_dh(&f)?.d_v(&ctx);
        Ok(a.add(&b))
    })()
    .unwrap_or_else(|_| Form::zero());
    let faulted = !residual.is_zero();
    (faulted, crate::print::form_text(&residual, &ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_zero_all_suites_pass() {
        let config = SelftestConfig { seed: 0, form_cases: 40, characteristic_cases: 8 };
        let results = run_selftest(&config);
        for r in &results {
            assert!(r.pass(), "{}: {:?}", r.name, r.first_failure);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let config = SelftestConfig { seed: 42, form_cases: 10, characteristic_cases: 4 };
        let a = run_selftest(&config);
        let b = run_selftest(&config);
        let counts_a: Vec<_> = a.iter().map(|r| (r.cases, r.failures)).collect();
        let counts_b: Vec<_> = b.iter().map(|r| (r.cases, r.failures)).collect();
        assert_eq!(counts_a, counts_b);
    }
}
