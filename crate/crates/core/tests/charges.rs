//! Charge conservation across time slices: exact for closed-form solutions,
//! and below a drift tolerance for integrator-produced grid fields.

use jetreduce_core::corpus::*;
use jetreduce_core::reduction::{charge, SliceSpec};
use jetreduce_core::sample::{rk4_second_order, FieldSample};
use jetreduce_core::{Expr, Form};

#[test]
fn harmonic_grid_charges_drift_below_tolerance() {
    // q'' = -q (V = 1/2 |q|^2): rotation charges (angular momentum) and the
    // energy current are conserved; relative drift across slices < 1e-4.
    let theory = particle(Potential::Harmonic);
    let ctx = &theory.ctx;
    let accel = |s: &[f64]| -> Vec<f64> { s.iter().map(|x| -x).collect() };
    let (lattice, arrays) =
        rk4_second_order(&accel, &[1.0, 0.3, -0.2], &[0.1, 0.8, 0.4], 0.0, 1e-3, 6000);
    let phi = FieldSample::grid("harmonic-rk4", lattice, arrays).unwrap();

    let qs: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 0))).collect();
    let qd: Vec<Expr> = (0..3).map(|i| Expr::var(q(i, 1))).collect();
    let mut currents: Vec<(String, Form)> = (0..3)
        .map(|a| (format!("L{}", a + 1), Form::scalar(cross_component(&qs, &qd, a))))
        .collect();
    // Energy current of the time-translation symmetry.
    let mut energy = Expr::zero();
    for i in 0..3 {
        energy = energy.add(
            &Expr::var(q(i, 1))
                .pow(2)
                .add(&Expr::var(q(i, 0)).pow(2))
                .scale(&num_rational::BigRational::new(1.into(), 2.into())),
        );
    }
    currents.push(("energy".into(), Form::scalar(energy)));

    let slices = [0.5_f64, 2.0, 3.5, 5.0];
    for (name, current) in &currents {
        let values: Vec<f64> = slices
            .iter()
            .map(|&t| charge(current, &phi, &SliceSpec::at(t), ctx).unwrap())
            .collect();
        let reference = values[0].abs().max(1.0);
        for (i, v) in values.iter().enumerate() {
            let drift = (v - values[0]).abs() / reference;
            assert!(
                drift < 1e-4,
                "{name}: slice {} drift {drift:.3e} (values {values:?})",
                slices[i]
            );
        }
    }
}

#[test]
fn free_particle_charges_slice_independent_symbolically() {
    let theory = particle(Potential::Zero);
    let ctx = &theory.ctx;
    let t = Expr::var(jetreduce_core::jet::JetVar::Base(0));
    let phi = FieldSample::closed(
        "linear",
        vec![
            t.clone().add(&Expr::int(1)),
            t.clone().scale(&num_rational::BigRational::new(2.into(), 1.into())),
            t.scale(&num_rational::BigRational::new((-1).into(), 1.into())),
        ],
    )
    .unwrap();
    for i in 0..3 {
        let current = Form::scalar(Expr::var(q(i, 1)));
        let a = charge(&current, &phi, &SliceSpec::at(-3.0), ctx).unwrap();
        let b = charge(&current, &phi, &SliceSpec::at(7.0), ctx).unwrap();
        assert_eq!(a, b);
    }
}
