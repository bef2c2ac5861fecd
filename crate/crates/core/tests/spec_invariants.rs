//! Cross-module invariants: manifest symmetries preserve omega, the first
//! momentum-map relation coincides with the Hamiltonian condition, pullback
//! intertwines the horizontal and base differentials, and the decomposition
//! d_v L = EL - d_h gamma holds across the whole worked-example corpus.

use jetreduce_core::algebra::basis_section;
use jetreduce_core::corpus::*;
use jetreduce_core::form::Generator;
use jetreduce_core::jet::JetVar;
use jetreduce_core::linfty::{hamiltonian_check, verify_momap, HamiltonianPair};
use jetreduce_core::sample::{pullback_exterior_derivative, pullback_form, FieldSample, Pullback};
use jetreduce_core::scalar::Scalar;
use jetreduce_core::theory::{is_manifest, lagrangian_form};
use jetreduce_core::vector_field::JetVectorField;
use jetreduce_core::{Expr, Form, Rat};

#[test]
fn decomposition_holds_on_the_whole_corpus() {
    let theories = vec![
        particle(Potential::Zero),
        particle(Potential::Symbolic),
        particle(Potential::Harmonic),
        particle(Potential::Quartic),
        chern_simons_theory(GaugeAlgebra::Abelian2),
        chern_simons_theory(GaugeAlgebra::So3),
    ];
    for theory in theories {
        let data = theory.premultisymplectic().unwrap();
        let ctx = &theory.ctx;
        let residual = lagrangian_form(&theory)
            .d_v(ctx)
            .sub(&data.el)
            .add(&data.gamma.d_h(ctx).unwrap());
        assert!(residual.is_zero(), "{}", theory.name);
        assert!(data.omega.d_tot(ctx).unwrap().is_zero(), "{}", theory.name);
    }
}

#[test]
fn manifest_symmetries_preserve_omega() {
    let theory = particle(Potential::Zero);
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;
    // Space translations and time translation are manifest; both must
    // preserve omega exactly.
    let mut fields: Vec<JetVectorField<Rat>> = Vec::new();
    for i in 0..3 {
        let mut ch = vec![Expr::zero(); 3];
        ch[i] = Expr::one();
        fields.push(JetVectorField::vertical(ctx, ch).unwrap());
    }
    let ch: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1)).neg()).collect();
    fields.push(
        JetVectorField::vertical(ctx, ch)
            .unwrap()
            .with_horizontal(vec![Expr::one()])
            .unwrap(),
    );
    for field in &fields {
        assert!(is_manifest(field, &theory).unwrap().manifest);
        assert!(field.lie_derivative(&data.omega, ctx).unwrap().is_zero());
    }
}

#[test]
fn first_relation_is_the_hamiltonian_condition() {
    // verify_momap at arity 1 passes exactly when each (mu_1(a), rho(a))
    // passes hamiltonian_check, for a passing and a failing momentum map.
    let theory = particle(Potential::Harmonic);
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;
    let alg = translation_algebra();
    let action = translation_action(ctx);
    let momap = translation_momap();
    let report = verify_momap(&momap, &action, &alg, &data.omega, ctx).unwrap();
    for (i, entry) in report.entries.iter().filter(|e| e.arity == 1).enumerate() {
        let pair = HamiltonianPair {
            alpha: momap.evaluate(1, &[basis_section(&alg, i)], &alg, ctx).unwrap(),
            chi: action.evaluate(&basis_section(&alg, i), ctx).unwrap(),
        };
        let check = hamiltonian_check(&pair, &data.omega, ctx).unwrap();
        assert_eq!(entry.pass(), check.pass(), "generator {i}");
        // With the harmonic potential the translation map fails both ways.
        assert!(!entry.pass());
    }
}

#[test]
fn pullback_intertwines_differentials() {
    // pullback o d_h = d_M o pullback on horizontal forms, closed phi.
    let ctx = mechanics_context(Potential::Zero);
    let t = Expr::var(JetVar::Base(0));
    let phi = FieldSample::closed(
        "cubic",
        vec![t.pow(3), t.pow(2).scale(&Rat::from_i64(2)), t.clone()],
    )
    .unwrap();
    let samples = vec![
        Form::scalar(Expr::var(q(0, 1)).mul(&Expr::var(q(1, 0)))),
        Form::scalar(Expr::var(q(2, 2)).add(&t.mul(&Expr::var(q(0, 0))))),
    ];
    for f in samples {
        let lhs = match pullback_form(&f.d_h(&ctx).unwrap(), &phi, &ctx).unwrap() {
            Pullback::Symbolic(p) => p,
            _ => unreachable!(),
        };
        let pulled = pullback_form(&f, &phi, &ctx).unwrap();
        let rhs = match pullback_exterior_derivative(&pulled, &ctx).unwrap() {
            Pullback::Symbolic(p) => p,
            _ => unreachable!(),
        };
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bar_map_is_linear() {
    use jetreduce_core::obstruction::bar_map;
    let theory = particle(Potential::Zero);
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;
    let alg = rotation_algebra();
    let action = rotation_action(ctx);
    let beta = data.gamma.clone();
    let omega = data.omega.clone();
    let combined = beta.scale(&Rat::from_i64(3)).add(&omega);
    // bar(3 beta + omega) = 3 bar(beta) + bar(omega), arity by arity.
    let lhs = bar_map(&combined, &action, &alg, ctx).unwrap().total;
    let b1 = bar_map(&beta, &action, &alg, ctx).unwrap().total;
    let b2 = bar_map(&omega, &action, &alg, ctx).unwrap().total;
    let mut rhs = jetreduce_core::obstruction::CochainSum::zero();
    for c in b1.components.values() {
        let scaled = jetreduce_core::obstruction::Cochain {
            arity: c.arity,
            values: c
                .values
                .iter()
                .map(|(t, v)| (t.clone(), v.scale(&Rat::from_i64(3))))
                .collect(),
        };
        rhs.insert(scaled);
    }
    for c in b2.components.values() {
        rhs.insert(c.clone());
    }
    assert!(lhs.sub(&rhs).is_zero());
}

#[test]
fn local_zero_locus_runs_on_gauge_fields() {
    // The gauge conditions evaluate symbolically on generic sections; the
    // zero connection satisfies condition (i) and fails condition (ii)
    // through the dX ^ dY term of delta gamma.
    use jetreduce_core::reduction::{zero_locus_check, Residual, DEFAULT_TOL};
    use jetreduce_core::sample::FieldSample;
    let alg = GaugeAlgebra::Abelian2;
    let theory = chern_simons_theory(alg);
    let gamma = theory.boundary_form().unwrap();
    let ctx = &theory.ctx;
    let lie = alg.algebra();
    let action = gauge_action(alg, ctx);
    let momap = cs_momap(alg, ctx);
    let flat = FieldSample::closed(
        "flat",
        vec![Expr::zero(); ctx.num_fields()],
    )
    .unwrap();
    let report =
        zero_locus_check(&flat, &momap, &action, &lie, &gamma, ctx, DEFAULT_TOL).unwrap();
    for (_, r) in &report.condition_i {
        assert!(matches!(r, Residual::Symbolic(f) if f.is_zero()));
    }
    assert!(report.condition_ii.iter().any(|(_, r)| !r.passes(DEFAULT_TOL)));
}

#[test]
fn sampled_exterior_derivative_matches_symbolic() {
    // d of a pulled-back 1-form over a 2-dimensional base: the sampled
    // route (finite differences with sign-sorted generators) agrees with
    // evaluating the symbolic route on the lattice, away from the boundary.
    use jetreduce_core::jet::JetContext;
    use jetreduce_core::sample::{max_abs_interior, Lattice};
    let ctx = JetContext::new(
        vec!["x0".into(), "x1".into()],
        vec![("u".into(), vec![1])],
    );
    let x0 = Expr::var(JetVar::Base(0));
    let x1 = Expr::var(JetVar::Base(1));
    // f = u * d(x1) with u substituted, u(x) = x0^2 * x1.
    let u = Expr::var(jetreduce_core::jet::JetVar::field(
        0,
        jetreduce_core::jet::MultiIndex(vec![0, 0]),
    ));
    let f = Form::scalar(u).wedge(&Form::generator(Generator::Horizontal(1)));
    let closed = FieldSample::closed("poly", vec![x0.pow(2).mul(&x1)]).unwrap();
    let symbolic = match pullback_exterior_derivative(
        &pullback_form(&f, &closed, &ctx).unwrap(),
        &ctx,
    )
    .unwrap()
    {
        Pullback::Symbolic(p) => p,
        _ => unreachable!(),
    };
    let lattice = Lattice {
        origin: vec![0.0, 0.0],
        spacing: vec![0.02, 0.02],
        shape: vec![51, 51],
    };
    let values: Vec<f64> = lattice
        .indices()
        .iter()
        .map(|i| {
            let p = lattice.point(i);
            p[0] * p[0] * p[1]
        })
        .collect();
    let grid = FieldSample::grid("poly-grid", lattice.clone(), vec![values]).unwrap();
    let sampled = match pullback_exterior_derivative(
        &pullback_form(&f, &grid, &ctx).unwrap(),
        &ctx,
    )
    .unwrap()
    {
        Pullback::Sampled(p) => p,
        _ => unreachable!(),
    };
    for (gens, arr) in &sampled.terms {
        // Evaluate the symbolic coefficient of the same generator list.
        let coeff = symbolic
            .terms()
            .find(|(g, _)| g == &gens)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Expr::zero);
        let diff: Vec<f64> = lattice
            .indices()
            .iter()
            .zip(arr)
            .map(|(idx, v)| {
                let p = lattice.point(idx);
                let expected = coeff
                    .eval_f64(&|var| match var {
                        JetVar::Base(mu) => Some(p[*mu]),
                        _ => None,
                    })
                    .unwrap();
                v - expected
            })
            .collect();
        let err = max_abs_interior(&diff, &lattice, 2);
        assert!(err < 1e-9, "gens {gens:?}: {err}");
    }
}

#[test]
fn injected_fault_produces_a_printable_residual() {
    // Dropping the contact-structure term from d_h breaks d_h^2 = 0; the
    // demo reports the nonzero witness.
    let (faulted, residual) = jetreduce_core::selftest::injected_fault_demo(7);
    assert!(faulted);
    assert_ne!(residual, "0");
    assert!(residual.contains("v("), "{residual}");
}

#[test]
fn gauge_bracket_defect_vanishes() {
    use jetreduce_core::algebra::slot_section;
    let alg = GaugeAlgebra::So3;
    let theory = chern_simons_theory(alg);
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;
    let lie = alg.algebra();
    let action = gauge_action(alg, ctx);
    let momap = cs_momap(alg, ctx);
    let x = slot_section(&lie, ctx, 0);
    let y = slot_section(&lie, ctx, 1);
    let defect = jetreduce_core::linfty::bracket_defect(
        &momap, &x, &y, &action, &lie, &data.omega, ctx,
    )
    .unwrap();
    assert!(defect.is_zero());
    // The trivial contact generator case: pullback of a contact form along
    // any sample is zero, so omega pulls back to zero entirely.
    let t = Expr::var(JetVar::Base(0));
    let mech = particle(Potential::Zero);
    let phi = FieldSample::closed("lin", vec![t.clone(), t.clone(), t]).unwrap();
    let mech_data = mech.premultisymplectic().unwrap();
    match pullback_form(&mech_data.omega, &phi, &mech.ctx).unwrap() {
        Pullback::Symbolic(p) => assert!(p.is_zero()),
        _ => unreachable!(),
    }
}
