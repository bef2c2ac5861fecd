//! Euler-Lagrange data beyond the first-order worked examples: a
//! second-order density over a 1-dimensional base (exercising the recursive
//! index-lowering in the boundary form) and the wave equation over a
//! 2-dimensional base (exercising several horizontal axes at once).

use jetreduce_core::corpus::{dq, q};
use jetreduce_core::form::Generator;
use jetreduce_core::jet::{JetContext, JetVar, MultiIndex};
use jetreduce_core::scalar::Scalar;
use jetreduce_core::theory::{lagrangian_form, volume_form, Theory};
use jetreduce_core::{Expr, Form, Rat};

#[test]
fn second_order_density_boundary_form() {
    // density = 1/2 (q1_tt)^2: EL = q1_tttt v(q1) ^ dt and the recursion
    // produces gamma = q1_tt v(q1_t) - q1_ttt v(q1).
    let ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![1])]).with_jet_order(6);
    let density = Expr::var(q(0, 2)).pow(2).scale(&Rat::from_fraction(1, 2));
    let theory = Theory::new("elastic", ctx, density).unwrap();
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;

    let expected_el = Form::scalar(Expr::var(q(0, 4)))
        .wedge(&Form::generator(dq(0, 0)))
        .wedge(&volume_form(ctx));
    assert_eq!(data.el, expected_el);

    let expected_gamma = Form::scalar(Expr::var(q(0, 2)))
        .wedge(&Form::generator(dq(0, 1)))
        .sub(&Form::scalar(Expr::var(q(0, 3))).wedge(&Form::generator(dq(0, 0))));
    assert_eq!(data.gamma, expected_gamma);

    // The defining identity and closedness, re-checked explicitly.
    let residual = lagrangian_form(&theory)
        .d_v(ctx)
        .sub(&data.el)
        .add(&data.gamma.d_h(ctx).unwrap());
    assert!(residual.is_zero());
    assert!(data.omega.d_tot(ctx).unwrap().is_zero());
}

#[test]
fn wave_equation_over_two_dimensions() {
    // density = 1/2 (u_t^2 - u_x^2) on coordinates (t, x):
    // EL = -(u_tt - u_xx) v(u) ^ dt ^ dx, gamma = u_t v(u) ^ i_t vol + ...
    let ctx = JetContext::new(vec!["t".into(), "x".into()], vec![("u".into(), vec![1])]);
    let u_t = Expr::var(JetVar::field(0, MultiIndex(vec![1, 0])));
    let u_x = Expr::var(JetVar::field(0, MultiIndex(vec![0, 1])));
    let density = u_t
        .pow(2)
        .sub(&u_x.pow(2))
        .scale(&Rat::from_fraction(1, 2));
    let theory = Theory::new("wave", ctx, density).unwrap();
    let data = theory.premultisymplectic().unwrap();
    let ctx = &theory.ctx;

    let u_tt = Expr::var(JetVar::field(0, MultiIndex(vec![2, 0])));
    let u_xx = Expr::var(JetVar::field(0, MultiIndex(vec![0, 2])));
    let expected_el = Form::scalar(u_xx.sub(&u_tt))
        .wedge(&Form::generator(Generator::VerticalField {
            comp: 0,
            index: MultiIndex(vec![0, 0]),
        }))
        .wedge(&volume_form(ctx));
    assert_eq!(data.el, expected_el);

    // Translation in x is a Noether symmetry; its current is the
    // energy-momentum component and conservation holds on the nose.
    let chi = jetreduce_core::vector_field::JetVectorField::vertical(
        ctx,
        vec![Expr::var(JetVar::field(0, MultiIndex(vec![0, 1]))).neg()],
    )
    .unwrap();
    let outcome = jetreduce_core::theory::is_noether_symmetry(&chi, &theory).unwrap();
    assert!(outcome.is_noether());
    let report = jetreduce_core::theory::noether_current(
        &chi,
        &outcome.alpha.unwrap(),
        &data,
        ctx,
    )
    .unwrap();
    assert!(report.conservation_residual.is_zero());
}
