//! Shipped example documents, assembled from the worked-example corpus and
//! rendered through the canonical printer. The committed fixture files are
//! golden-tested against these builders.

use crate::resolver::{
    CheckKind, Document, ResolvedAction, ResolvedCheck, ResolvedField, ResolvedMomap,
};
use jetreduce_core::corpus::{self, GaugeAlgebra, Potential};
use jetreduce_core::jet::JetVar;
use jetreduce_core::sample::{FieldSample, Lattice};
use jetreduce_core::scalar::Scalar;
use jetreduce_core::{Expr, Rat};

fn t_var() -> Expr {
    Expr::var(JetVar::Base(0))
}

/// Classical mechanics: the particle theory with a symbolic potential (for
/// the Euler-Lagrange report), the free particle (for translation and
/// rotation symmetry), all three symmetry algebras, actions, momentum maps,
/// field samples, and checks.
pub fn mechanics() -> Document {
    let mut doc = Document::empty();
    let mech = corpus::particle(Potential::Symbolic);
    let mut free = corpus::particle(Potential::Zero);
    free.name = "mech_free".into();
    let mech_ctx = mech.ctx.clone();
    let free_ctx = free.ctx.clone();
    doc.theories.push(mech);
    doc.theories.push(free);

    doc.algebras.push(corpus::translation_algebra());
    doc.algebras.push(corpus::rotation_algebra());
    doc.algebras.push(corpus::time_algebra());

    doc.actions.push(ResolvedAction {
        action: corpus::translation_action(&free_ctx),
        algebra: 0,
        theory: 1,
    });
    doc.actions.push(ResolvedAction {
        action: corpus::rotation_action(&free_ctx),
        algebra: 1,
        theory: 1,
    });
    let mut time_action = corpus::time_translation_action(&mech_ctx);
    time_action.name = "time_trans".into();
    doc.actions.push(ResolvedAction { action: time_action, algebra: 2, theory: 0 });

    let mut trans_mu = corpus::translation_momap();
    trans_mu.name = "trans_mu".into();
    doc.momaps.push(ResolvedMomap { momap: trans_mu, action: 0 });
    let mut rot_mu = corpus::rotation_momap();
    rot_mu.name = "rot_mu".into();
    doc.momaps.push(ResolvedMomap { momap: rot_mu, action: 1 });
    let mut time_mu = corpus::time_translation_momap(Potential::Symbolic);
    time_mu.name = "time_mu".into();
    doc.momaps.push(ResolvedMomap { momap: time_mu, action: 2 });

    let t = t_var();
    doc.fields.push(ResolvedField {
        sample: FieldSample::closed(
            "lin",
            vec![t.clone(), t.scale(&Rat::from_i64(2)), t.scale(&Rat::from_i64(3))],
        )
        .expect("closed sample"),
        theory: 1,
    });
    doc.fields.push(ResolvedField {
        sample: FieldSample::closed("quad", vec![t.pow(2), Expr::zero(), Expr::zero()])
            .expect("closed sample"),
        theory: 1,
    });
    doc.fields.push(ResolvedField {
        sample: FieldSample::closed("radial", vec![t.clone(), t.clone(), t.clone()])
            .expect("closed sample"),
        theory: 1,
    });
    // The unit circle sampled over one period; fails the pair condition for
    // rotations with angular momentum 1 along e3.
    let points = 1001;
    let lattice = Lattice::line(0.0, std::f64::consts::TAU, points);
    let cos: Vec<f64> = lattice.indices().iter().map(|i| lattice.point(i)[0].cos()).collect();
    let sin: Vec<f64> = lattice.indices().iter().map(|i| lattice.point(i)[0].sin()).collect();
    doc.fields.push(ResolvedField {
        sample: FieldSample::grid("circle", lattice, vec![cos, sin, vec![0.0; points]])
            .expect("grid sample"),
        theory: 1,
    });

    doc.checks.push(ResolvedCheck {
        kind: CheckKind::El,
        theory: 0,
        action: None,
        momap: None,
        fields: Vec::new(),
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Symmetry,
        theory: 1,
        action: Some(0),
        momap: None,
        fields: Vec::new(),
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Symmetry,
        theory: 0,
        action: Some(2),
        momap: None,
        fields: Vec::new(),
    });
    for (action, momap, theory) in [(0usize, 0usize, 1usize), (1, 1, 1), (2, 2, 0)] {
        doc.checks.push(ResolvedCheck {
            kind: CheckKind::Momap,
            theory,
            action: Some(action),
            momap: Some(momap),
            fields: Vec::new(),
        });
    }
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::ZeroLocus,
        theory: 1,
        action: Some(0),
        momap: Some(0),
        fields: vec![0, 1],
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::ZeroLocus,
        theory: 1,
        action: Some(1),
        momap: Some(1),
        fields: vec![2, 3],
    });
    doc
}

/// Harmonic oscillator with time translation: constant-energy paths are in
/// the homotopy zero locus, a uniformly moving path is not.
pub fn harmonic() -> Document {
    let mut doc = Document::empty();
    let mut theory = corpus::particle(Potential::Harmonic);
    theory.name = "harm".into();
    let ctx = theory.ctx.clone();
    doc.theories.push(theory);
    doc.algebras.push(corpus::time_algebra());
    let mut action = corpus::time_translation_action(&ctx);
    action.name = "time_trans".into();
    doc.actions.push(ResolvedAction { action, algebra: 0, theory: 0 });
    let mut momap = corpus::time_translation_momap(Potential::Harmonic);
    momap.name = "time_mu".into();
    doc.momaps.push(ResolvedMomap { momap, action: 0 });

    doc.fields.push(ResolvedField {
        sample: FieldSample::closed(
            "rest",
            vec![Expr::int(1), Expr::zero(), Expr::zero()],
        )
        .expect("closed sample"),
        theory: 0,
    });
    doc.fields.push(ResolvedField {
        sample: FieldSample::closed("moving", vec![t_var(), Expr::zero(), Expr::zero()])
            .expect("closed sample"),
        theory: 0,
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Momap,
        theory: 0,
        action: Some(0),
        momap: Some(0),
        fields: Vec::new(),
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::ZeroLocus,
        theory: 0,
        action: Some(0),
        momap: Some(0),
        fields: vec![0, 1],
    });
    doc
}

/// Angular momentum on the classical phase space, encoded over a
/// 0-dimensional base with the symplectic form supplied directly.
pub fn phase_space() -> Document {
    let mut doc = Document::empty();
    let theory = corpus::phase_space_theory();
    let ctx = theory.ctx.clone();
    doc.theories.push(theory);
    doc.algebras.push(corpus::rotation_algebra());
    doc.actions.push(ResolvedAction {
        action: corpus::phase_space_rotation_action(&ctx),
        algebra: 0,
        theory: 0,
    });
    let mut momap = corpus::phase_space_momap();
    momap.name = "angular".into();
    doc.momaps.push(ResolvedMomap { momap, action: 0 });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Momap,
        theory: 0,
        action: Some(0),
        momap: Some(0),
        fields: Vec::new(),
    });
    doc
}

/// Componentwise Chern-Simons theory with its gauge symmetry.
pub fn chern_simons(alg: GaugeAlgebra) -> Document {
    let mut doc = Document::empty();
    let theory = corpus::chern_simons_theory(alg);
    let ctx = theory.ctx.clone();
    doc.theories.push(theory);
    doc.algebras.push(alg.algebra());
    doc.actions.push(ResolvedAction {
        action: corpus::gauge_action(alg, &ctx),
        algebra: 0,
        theory: 0,
    });
    let mut momap = corpus::cs_momap(alg, &ctx).normalized();
    momap.name = format!("gauge{}_mu", alg.dim());
    doc.momaps.push(ResolvedMomap { momap, action: 0 });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::El,
        theory: 0,
        action: None,
        momap: None,
        fields: Vec::new(),
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Symmetry,
        theory: 0,
        action: Some(0),
        momap: None,
        fields: Vec::new(),
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::Momap,
        theory: 0,
        action: Some(0),
        momap: Some(0),
        fields: Vec::new(),
    });
    doc
}

/// A pseudo-random valid document for round-trip fuzzing: one theory with a
/// random polynomial Lagrangian, an abelian algebra with a random action,
/// a first momentum-map component, and a closed-form field.
pub fn fuzz_document(seed: u64) -> Document {
    use jetreduce_core::algebra::{ActionRule, AlgebraAction, LieAlgebra};
    use jetreduce_core::jet::{JetContext, MultiIndex};
    use jetreduce_core::linfty::{CochainData, MomentumMap};
    use jetreduce_core::vector_field::JetVectorField;
    use jetreduce_core::Form;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_poly(rng: &mut StdRng, ctx: &JetContext, max_order: u32) -> Expr {
        let mut out = Expr::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let num = rng.gen_range(-5i64..=5);
            let mut term = Expr::constant(Rat::from_fraction(
                if num == 0 { 1 } else { num },
                rng.gen_range(1i64..=4),
            ));
            for _ in 0..rng.gen_range(0..=2) {
                let v = if ctx.dim() > 0 && rng.gen_bool(0.3) {
                    JetVar::Base(rng.gen_range(0..ctx.dim()))
                } else {
                    let mut idx = MultiIndex::zero(ctx.dim());
                    if ctx.dim() > 0 {
                        let order = rng.gen_range(0..=max_order);
                        for _ in 0..order {
                            idx.0[rng.gen_range(0..ctx.dim())] += 1;
                        }
                    }
                    JetVar::field(rng.gen_range(0..ctx.num_fields()), idx)
                };
                term = term.mul(&Expr::var(v).pow(rng.gen_range(1..=2)));
            }
            out = out.add(&term);
        }
        out
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut doc = Document::empty();
    let n_fields = rng.gen_range(1..=3usize);
    let ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![n_fields])])
        .with_jet_order(4);
    let density = random_poly(&mut rng, &ctx, 1);
    let theory = jetreduce_core::theory::Theory::new("th", ctx.clone(), density)
        .expect("valid random theory");
    doc.theories.push(theory);

    let m = rng.gen_range(1..=3usize);
    let basis = (1..=m).map(|i| format!("e{i}")).collect::<Vec<_>>();
    doc.algebras.push(LieAlgebra::abelian("alg", basis, false));

    let mut fields = Vec::new();
    for _ in 0..m {
        let ch = (0..ctx.num_fields()).map(|_| random_poly(&mut rng, &ctx, 0)).collect();
        fields.push(JetVectorField::vertical(&ctx, ch).expect("valid characteristic"));
    }
    doc.actions.push(ResolvedAction {
        action: AlgebraAction { name: "act".into(), rule: ActionRule::Global(fields) },
        algebra: 0,
        theory: 0,
    });

    let mut mu1 = std::collections::BTreeMap::new();
    for i in 0..m {
        mu1.insert(vec![i], Form::scalar(random_poly(&mut rng, &ctx, 1)));
    }
    doc.momaps.push(ResolvedMomap {
        momap: MomentumMap { name: "mu".into(), components: vec![CochainData::Global(mu1)] }
            .normalized(),
        action: 0,
    });

    let comps = (0..ctx.num_fields())
        .map(|_| {
            let t = Expr::var(JetVar::Base(0));
            t.pow(rng.gen_range(0..=2)).scale(&Rat::from_i64(rng.gen_range(-3i64..=3)))
        })
        .collect();
    doc.fields.push(ResolvedField {
        sample: FieldSample::closed("phi", comps).expect("closed sample"),
        theory: 0,
    });
    doc.checks.push(ResolvedCheck {
        kind: CheckKind::El,
        theory: 0,
        action: None,
        momap: None,
        fields: Vec::new(),
    });
    doc
}

/// All shipped fixtures by file stem.
pub fn all() -> Vec<(&'static str, Document)> {
    vec![
        ("mechanics", mechanics()),
        ("harmonic", harmonic()),
        ("phase_space", phase_space()),
        ("cs_abelian2", chern_simons(GaugeAlgebra::Abelian2)),
        ("cs_so3", chern_simons(GaugeAlgebra::So3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{load, print};

    #[test]
    fn fixtures_round_trip() {
        for (name, doc) in all() {
            let printed = print(&doc);
            let again = load(&printed)
                .unwrap_or_else(|e| panic!("{name}: {}\n---\n{printed}", e.render(&printed)));
            assert_eq!(doc, again, "fixture {name} does not round-trip");
        }
    }
}
