//! Command implementations over a loaded document.

use crate::report::{entry, Report, Status};
use jetreduce_core::algebra::ActionRule;
use jetreduce_core::form::BigradedForm;
use jetreduce_core::jet::SLOT_NAMES;
use jetreduce_core::linfty::verify_momap;
use jetreduce_core::obstruction::check_thm2;
use jetreduce_core::print::{form_latex, form_text};
use jetreduce_core::reduction::{exactness_oracle_n1, zero_locus_check, DEFAULT_TOL};
use jetreduce_core::selftest::{run_selftest, SelftestConfig};
use jetreduce_core::theory::{is_manifest, is_noether_symmetry, noether_current};
use jetreduce_core::vector_field::prolongation_check;
use jetreduce_core::{CoreError, Rat};
use jetreduce_dsl::{CheckKind, Document};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub struct Options {
    pub format: Format,
    pub tol: Option<f64>,
    pub jet_order: Option<u32>,
    pub seed: u64,
}

impl Options {
    fn render(&self, form: &BigradedForm<Rat>, ctx: &jetreduce_core::jet::JetContext) -> String {
        match self.format {
            Format::Latex => form_latex(form, ctx),
            _ => form_text(form, ctx),
        }
    }
}

/// Distinguishes input/usage failures from verification outcomes.
pub enum CommandError {
    /// An internal consistency guard tripped (exit code 3).
    Internal(String),
    /// Bad input or unusable configuration (exit code 2).
    Usage(String),
}

impl From<CoreError> for CommandError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InternalCheck(_) => CommandError::Internal(e.to_string()),
            other => CommandError::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<Report, CommandError>;

fn apply_overrides(doc: &mut Document, opts: &Options) {
    if let Some(order) = opts.jet_order {
        for theory in &mut doc.theories {
            theory.ctx.jet_order = order;
        }
    }
}

fn theories_for(doc: &Document, kind: CheckKind) -> Vec<usize> {
    let from_checks: Vec<usize> = doc
        .checks
        .iter()
        .filter(|c| c.kind == kind)
        .map(|c| c.theory)
        .collect();
    if from_checks.is_empty() && kind == CheckKind::El {
        (0..doc.theories.len()).collect()
    } else {
        from_checks
    }
}

pub fn cmd_el(mut doc: Document, inputs: Vec<String>, opts: &Options) -> CmdResult {
    apply_overrides(&mut doc, opts);
    let mut report = Report::new("el", inputs);
    let mut targets = theories_for(&doc, CheckKind::El);
    targets.dedup();
    for idx in targets {
        let theory = &doc.theories[idx];
        let data = theory.premultisymplectic().map_err(CommandError::from)?;
        let ctx = &theory.ctx;
        let mut e = entry("euler-lagrange", &theory.name, Status::Info);
        e.value = Some(format!("EL = {}", opts.render(&data.el, ctx)));
        report.push(e);
        let mut e = entry("boundary-form", &theory.name, Status::Info);
        e.value = Some(format!("gamma = {}", opts.render(&data.gamma, ctx)));
        report.push(e);
        let mut e = entry("premultisymplectic", &theory.name, Status::Info);
        e.value = Some(format!("omega = {}", opts.render(&data.omega, ctx)));
        report.push(e);
        // d_v L = EL - d_h gamma, re-verified here so the report certifies it.
        let lhs = jetreduce_core::theory::lagrangian_form(theory).d_v(ctx);
        let residual = lhs
            .sub(&data.el)
            .add(&data.gamma.d_h(ctx).map_err(CommandError::from)?);
        let ok = residual.is_zero();
        let mut e = entry(
            "decomposition",
            format!("{}: d_v L = EL - d_h gamma", theory.name),
            if ok { Status::Pass } else { Status::Fail },
        );
        if !ok {
            e.residual = Some(opts.render(&residual, ctx));
        }
        report.push(e);
        let closed = data.omega.d_tot(ctx).map_err(CommandError::from)?;
        report.push(entry(
            "closedness",
            format!("{}: d omega = 0", theory.name),
            if closed.is_zero() { Status::Pass } else { Status::Fail },
        ));
    }
    Ok(report)
}

pub fn cmd_symmetry(mut doc: Document, inputs: Vec<String>, opts: &Options) -> CmdResult {
    apply_overrides(&mut doc, opts);
    let mut report = Report::new("symmetry", inputs);
    let targets: Vec<usize> = {
        let from_checks: Vec<usize> = doc
            .checks
            .iter()
            .filter(|c| c.kind == CheckKind::Symmetry)
            .filter_map(|c| c.action)
            .collect();
        if from_checks.is_empty() {
            (0..doc.actions.len()).collect()
        } else {
            from_checks
        }
    };
    for action_idx in targets {
        let resolved = &doc.actions[action_idx];
        let theory = &doc.theories[resolved.theory];
        let algebra = &doc.algebras[resolved.algebra];
        let ctx = &theory.ctx;
        let data = theory.premultisymplectic().map_err(CommandError::from)?;
        let generators: Vec<(String, jetreduce_core::VectorField)> = match &resolved.action.rule {
            ActionRule::Global(_) => (0..algebra.dim())
                .map(|i| {
                    resolved
                        .action
                        .generator(algebra, ctx, i)
                        .map(|f| (algebra.basis[i].clone(), f))
                })
                .collect::<Result<_, _>>()
                .map_err(CommandError::from)?,
            ActionRule::Local(_) => vec![(
                SLOT_NAMES[0].to_string(),
                resolved.action.generator(algebra, ctx, 0).map_err(CommandError::from)?,
            )],
        };
        let compat = resolved
            .action
            .bracket_compatibility(algebra, ctx)
            .map_err(CommandError::from)?;
        report.push(entry(
            "bracket-compatibility",
            format!("{} with {}", resolved.action.name, algebra.name),
            if compat.is_none() { Status::Pass } else { Status::Fail },
        ));
        for (label, field) in &generators {
            let subject = format!("{}({label})", resolved.action.name);
            let decomposition = prolongation_check(field, ctx).map_err(CommandError::from)?;
            let mut e = entry("decomposition", &subject, Status::Info);
            e.value = Some(decomposition.label().to_string());
            report.push(e);

            // Noether and manifest entries are classifications, not checks:
            // a non-manifest symmetry is a finding, not a failure. The
            // conservation identity of a produced current is a real check.
            let vertical = field.vertical_part(ctx);
            match is_noether_symmetry(&vertical, theory) {
                Ok(outcome) => {
                    if let Some(alpha) = &outcome.alpha {
                        let mut e = entry("noether", &subject, Status::Info);
                        e.value = Some(format!("noether; alpha = {}", opts.render(alpha, ctx)));
                        report.push(e);
                        let current = noether_current(&vertical, alpha, &data, ctx)
                            .map_err(CommandError::from)?;
                        let mut e = entry(
                            "current",
                            &subject,
                            if current.conservation_residual.is_zero() {
                                Status::Pass
                            } else {
                                Status::Fail
                            },
                        );
                        e.value = Some(format!("j = {}", opts.render(&current.current, ctx)));
                        report.push(e);
                    } else {
                        let mut e = entry("noether", &subject, Status::Info);
                        let cert = if outcome.euler_image.is_zero() {
                            format!(
                                "not a Noether symmetry; base remainder {}",
                                opts.render(&outcome.base_remainder, ctx)
                            )
                        } else {
                            format!(
                                "not a Noether symmetry; euler image {}",
                                opts.render(&outcome.euler_image, ctx)
                            )
                        };
                        e.value = Some(cert);
                        report.push(e);
                    }
                }
                Err(CoreError::HomotopyInapplicable(msg)) => {
                    let mut e = entry("noether", &subject, Status::Info);
                    e.value = Some(format!("undetermined: {msg}"));
                    report.push(e);
                }
                Err(other) => return Err(other.into()),
            }

            let manifest = is_manifest(field, theory).map_err(CommandError::from)?;
            let mut e = entry("manifest", &subject, Status::Info);
            e.value = Some(
                if manifest.manifest {
                    "manifest symmetry".to_string()
                } else {
                    format!(
                        "not manifest; Lepage residual {}",
                        opts.render(&manifest.lepage_residual, ctx)
                    )
                },
            );
            report.push(e);
        }
    }
    Ok(report)
}

pub fn cmd_verify_momap(mut doc: Document, inputs: Vec<String>, opts: &Options) -> CmdResult {
    apply_overrides(&mut doc, opts);
    let mut report = Report::new("verify-momap", inputs);
    let targets: Vec<usize> = {
        let from_checks: Vec<usize> = doc
            .checks
            .iter()
            .filter(|c| c.kind == CheckKind::Momap)
            .filter_map(|c| c.momap)
            .collect();
        if from_checks.is_empty() {
            (0..doc.momaps.len()).collect()
        } else {
            from_checks
        }
    };
    for momap_idx in targets {
        let resolved = &doc.momaps[momap_idx];
        let action = &doc.actions[resolved.action];
        let algebra = &doc.algebras[action.algebra];
        let theory = &doc.theories[action.theory];
        let ctx = &theory.ctx;
        let data = theory.premultisymplectic().map_err(CommandError::from)?;
        let relation_report =
            verify_momap(&resolved.momap, &action.action, algebra, &data.omega, ctx)
                .map_err(CommandError::from)?;
        for e in &relation_report.entries {
            let mut item = entry(
                format!("relation-{}", e.arity),
                format!("{}: {}", resolved.momap.name, e.label),
                if e.pass() { Status::Pass } else { Status::Fail },
            );
            if !e.pass() {
                item.residual = Some(opts.render(&e.residual, ctx));
            }
            report.push(item);
        }
        if algebra.local {
            let mut e = entry(
                "obstruction",
                format!("{}: cohomological cross-check", resolved.momap.name),
                Status::Info,
            );
            e.value = Some(
                "skipped: the obstruction complex is evaluated for global-mode algebras".into(),
            );
            report.push(e);
        } else {
            let thm2 = check_thm2(&action.action, algebra, &data.omega, Some(&resolved.momap), ctx)
                .map_err(CommandError::from)?;
            report.push(entry(
                "action-invariance",
                format!("{}: L_rho(a) omega = 0", action.action.name),
                if thm2.action_invariant() { Status::Pass } else { Status::Fail },
            ));
            report.push(entry(
                "obstruction-closedness",
                format!("{}: dbar omegabar = 0", action.action.name),
                if thm2.premultisymplectic() { Status::Pass } else { Status::Fail },
            ));
            report.push(entry(
                "obstruction-primitivity",
                format!("{}: dbar mubar = omegabar", resolved.momap.name),
                match thm2.primitive_ok() {
                    Some(true) => Status::Pass,
                    _ => Status::Fail,
                },
            ));
            let agree = thm2.routes_agree == Some(true);
            report.push(entry(
                "route-agreement",
                format!("{}: relations vs cohomology", resolved.momap.name),
                if agree { Status::Pass } else { Status::Fail },
            ));
        }
    }
    Ok(report)
}

pub fn cmd_zero_locus(mut doc: Document, inputs: Vec<String>, opts: &Options) -> CmdResult {
    apply_overrides(&mut doc, opts);
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let mut report = Report::new("zero-locus", inputs);
    let checks: Vec<(usize, Vec<usize>)> = doc
        .checks
        .iter()
        .filter(|c| c.kind == CheckKind::ZeroLocus)
        .map(|c| (c.momap.expect("resolved zero_locus check"), c.fields.clone()))
        .collect();
    if checks.is_empty() {
        let mut e = entry("classification", "no zero_locus checks in document", Status::Info);
        e.value = Some("empty table".into());
        report.push(e);
        return Ok(report);
    }
    for (momap_idx, field_indices) in checks {
        let resolved = &doc.momaps[momap_idx];
        let action = &doc.actions[resolved.action];
        let algebra = &doc.algebras[action.algebra];
        let theory = &doc.theories[action.theory];
        let ctx = &theory.ctx;
        let gamma = theory.boundary_form().map_err(CommandError::from)?;
        for field_idx in field_indices {
            let sample = &doc.fields[field_idx].sample;
            let membership = zero_locus_check(
                sample,
                &resolved.momap,
                &action.action,
                algebra,
                &gamma,
                ctx,
                tol,
            )
            .map_err(CommandError::from)?;
            for (label, residual) in &membership.condition_i {
                let mut e = entry(
                    "condition-i",
                    format!("{} / {}: {}", resolved.momap.name, sample.label, label),
                    if residual.passes(tol) { Status::Pass } else { Status::Fail },
                );
                if !residual.passes(tol) {
                    e.residual = Some(residual.describe(ctx));
                }
                report.push(e);
            }
            for (label, residual) in &membership.condition_ii {
                let mut e = entry(
                    "condition-ii",
                    format!("{} / {}: {}", resolved.momap.name, sample.label, label),
                    if residual.passes(tol) { Status::Pass } else { Status::Fail },
                );
                if !residual.passes(tol) {
                    e.residual = Some(residual.describe(ctx));
                }
                report.push(e);
            }
            let mut verdict = entry(
                "membership",
                format!("{} in Z({})", sample.label, resolved.momap.name),
                Status::Info,
            );
            verdict.value =
                Some(if membership.pass() { "in the homotopy zero locus" } else { "outside" }.into());
            report.push(verdict);
            // Cross-check against the raw-exactness oracle where it applies.
            if ctx.dim() == 1 && !algebra.local && algebra.is_abelian() && sample.is_closed() {
                let oracle = exactness_oracle_n1(&resolved.momap, sample, algebra, ctx)
                    .map_err(CommandError::from)?;
                report.push(entry(
                    "exactness-oracle",
                    format!("{} / {}", resolved.momap.name, sample.label),
                    if oracle == membership.pass() { Status::Pass } else { Status::Fail },
                ));
            }
        }
    }
    Ok(report)
}

pub fn cmd_selftest(inputs: Vec<String>, opts: &Options) -> CmdResult {
    let config = SelftestConfig {
        seed: opts.seed,
        form_cases: 200,
        characteristic_cases: 20,
    };
    let mut report = Report::new("selftest", inputs);
    for suite in run_selftest(&config) {
        let mut e = entry(
            "property-suite",
            &suite.name,
            if suite.pass() { Status::Pass } else { Status::Fail },
        );
        e.value = Some(format!("{} cases, {} failures", suite.cases, suite.failures));
        if let Some(first) = &suite.first_failure {
            e.residual = Some(first.clone());
        }
        report.push(e);
    }
    Ok(report)
}
