//! Symmetry Lie algebras and their actions on jet space.
//!
//! Global mode: a finite-dimensional algebra with rational structure
//! constants acting through one vector field per basis element.
//!
//! Local mode: the algebra is the space of sections of a trivial bundle
//! `M x g`; elements are generic parameter sections whose jets are
//! independent symbols, the bracket is pointwise through the structure
//! constants, and the action is a template linear in the jets of one
//! designated section slot.

use crate::error::{CoreError, Result};
use crate::expr::ScalarExpr;
use crate::jet::{JetContext, JetVar, MultiIndex, PARAM_SLOTS};
use crate::scalar::Scalar;
use crate::vector_field::JetVectorField;

/// A Lie algebra with basis labels and exact structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<C: Scalar> {
    pub name: String,
    pub basis: Vec<String>,
    /// `constants[i][j][k]` is the `e_k` coefficient of `[e_i, e_j]`.
    pub constants: Vec<Vec<Vec<C>>>,
    /// Whether elements are parameter sections on the base (gauge algebras).
    pub local: bool,
}

impl<C: Scalar> LieAlgebra<C> {
    /// Build and validate: antisymmetry and the Jacobi identity.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        constants: Vec<Vec<Vec<C>>>,
        local: bool,
    ) -> Result<Self> {
        let alg = LieAlgebra { name: name.into(), basis, constants, local };
        alg.validate()?;
        Ok(alg)
    }

    pub fn abelian(name: impl Into<String>, basis: Vec<String>, local: bool) -> Self {
        let m = basis.len();
        LieAlgebra {
            name: name.into(),
            basis,
            constants: vec![vec![vec![C::zero(); m]; m]; m],
            local,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.constants
            .iter()
            .flatten()
            .flatten()
            .all(|c| c.is_zero())
    }

    fn validate(&self) -> Result<()> {
        let m = self.dim();
        if self.constants.len() != m
            || self.constants.iter().any(|r| r.len() != m || r.iter().any(|v| v.len() != m))
        {
            return Err(CoreError::validation("structure constant table has wrong shape"));
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let anti = self.constants[i][j][k].clone() + self.constants[j][i][k].clone();
                    if !anti.is_zero() {
                        return Err(CoreError::validation(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        // Jacobi: [[ei,ej],ek] + [[ej,ek],ei] + [[ek,ei],ej] = 0.
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut total = C::zero();
                        for s in 0..m {
                            total = total
                                + self.constants[i][j][s].clone() * self.constants[s][k][l].clone()
                                + self.constants[j][k][s].clone() * self.constants[s][i][l].clone()
                                + self.constants[k][i][s].clone() * self.constants[s][j][l].clone();
                        }
                        if !total.is_zero() {
                            return Err(CoreError::validation(format!(
                                "Jacobi identity fails at ({i},{j},{k};{l})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Bracket of coefficient vectors: `[x, y]^k = c^k_{ij} x^i y^j`.
    #[allow(clippy::needless_range_loop)] // index notation mirrors the formula
    pub fn bracket_coeffs(&self, x: &[C], y: &[C]) -> Vec<C> {
        let m = self.dim();
        let mut out = vec![C::zero(); m];
        for i in 0..m {
            for j in 0..m {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = slot.clone()
                        + self.constants[i][j][k].clone() * x[i].clone() * y[j].clone();
                }
            }
        }
        out
    }
}

/// An element of the algebra in a form the engine can evaluate cochains on:
/// a vector of scalar-expression components over the basis. Global basis
/// element `e_i` is the i-th unit vector; a local generic section `X` has
/// components `ParamJet(slot, comp, 0)`.
pub type Section<C> = Vec<ScalarExpr<C>>;

/// The unit section for basis element `i`.
pub fn basis_section<C: Scalar>(alg: &LieAlgebra<C>, i: usize) -> Section<C> {
    let mut s = vec![ScalarExpr::zero(); alg.dim()];
    s[i] = ScalarExpr::one();
    s
}

/// The generic parameter section occupying `slot`.
pub fn slot_section<C: Scalar>(alg: &LieAlgebra<C>, ctx: &JetContext, slot: usize) -> Section<C> {
    let n = ctx.dim();
    (0..alg.dim())
        .map(|comp| ScalarExpr::var(JetVar::param(slot, comp, MultiIndex::zero(n))))
        .collect()
}

/// Pointwise bracket of sections via the structure constants.
#[allow(clippy::needless_range_loop)] // index notation mirrors the formula
pub fn bracket_sections<C: Scalar>(
    alg: &LieAlgebra<C>,
    x: &Section<C>,
    y: &Section<C>,
) -> Section<C> {
    let m = alg.dim();
    let mut out = vec![ScalarExpr::zero(); m];
    for i in 0..m {
        for j in 0..m {
            let prod = x[i].mul(&y[j]);
            if prod.is_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate() {
                let c = &alg.constants[i][j][k];
                if c.is_zero() {
                    continue;
                }
                *slot = slot.add(&prod.scale(c));
            }
        }
    }
    out
}

/// Infinitesimal action of the algebra by jet-space vector fields.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionRule<C: Scalar> {
    /// One vector field per basis element.
    Global(Vec<JetVectorField<C>>),
    /// Template over the jets of parameter slot 0; evaluation substitutes
    /// the actual section.
    Local(JetVectorField<C>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraAction<C: Scalar> {
    pub name: String,
    pub rule: ActionRule<C>,
}

/// Substitute the parameter jets of `slot` by total derivatives of the given
/// section components.
pub fn substitute_slot<C: Scalar>(
    e: &ScalarExpr<C>,
    slot: usize,
    section: &Section<C>,
    ctx: &JetContext,
) -> Result<ScalarExpr<C>> {
    // Total derivatives can fail on truncation; capture the first error.
    let failed: std::cell::RefCell<Option<CoreError>> = std::cell::RefCell::new(None);
    let out = e.substitute_vars(&|v| match v {
        JetVar::ParamJet { slot: s, comp, index } if *s == slot => {
            match section[*comp].total_derivative_multi(index, ctx) {
                Ok(expr) => Some(expr),
                Err(err) => {
                    failed.borrow_mut().get_or_insert(err);
                    Some(ScalarExpr::zero())
                }
            }
        }
        _ => None,
    });
    match failed.into_inner() {
        Some(err) => Err(err),
        None => Ok(out),
    }
}

impl<C: Scalar> AlgebraAction<C> {
    /// The vector field attached to an algebra element given as a section.
    pub fn evaluate(
        &self,
        section: &Section<C>,
        ctx: &JetContext,
    ) -> Result<JetVectorField<C>> {
        match &self.rule {
            ActionRule::Global(fields) => {
                let mut out = JetVectorField::zero(ctx);
                for (i, coeff) in section.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    // Global coefficients must be constants.
                    let c = coeff.as_constant().ok_or_else(|| {
                        CoreError::validation("global-mode algebra element must be constant")
                    })?;
                    let mut scaled = fields[i].clone();
                    scaled.characteristic =
                        scaled.characteristic.iter().map(|q| q.scale(&c)).collect();
                    scaled.horizontal = scaled.horizontal.iter().map(|h| h.scale(&c)).collect();
                    out = out.add(&scaled);
                }
                Ok(out)
            }
            ActionRule::Local(template) => {
                let characteristic = template
                    .characteristic
                    .iter()
                    .map(|q| substitute_slot(q, 0, section, ctx))
                    .collect::<Result<Vec<_>>>()?;
                let horizontal = template
                    .horizontal
                    .iter()
                    .map(|h| substitute_slot(h, 0, section, ctx))
                    .collect::<Result<Vec<_>>>()?;
                Ok(JetVectorField { characteristic, horizontal })
            }
        }
    }

    /// The vector field for basis element `i` (global) or the generic
    /// section in `slot` (local).
    pub fn generator(
        &self,
        alg: &LieAlgebra<C>,
        ctx: &JetContext,
        i: usize,
    ) -> Result<JetVectorField<C>> {
        match &self.rule {
            ActionRule::Global(_) => self.evaluate(&basis_section(alg, i), ctx),
            ActionRule::Local(_) => self.evaluate(&slot_section(alg, ctx, i), ctx),
        }
    }

    /// Check `rho([x, y]) = [rho(x), rho(y)]` on basis pairs (global) or on
    /// two generic section slots (local). Returns the offending pair.
    pub fn bracket_compatibility(
        &self,
        alg: &LieAlgebra<C>,
        ctx: &JetContext,
    ) -> Result<Option<(usize, usize)>> {
        let m = match &self.rule {
            ActionRule::Global(fields) => {
                if fields.len() != alg.dim() {
                    return Err(CoreError::validation(
                        "action table does not match algebra dimension",
                    ));
                }
                alg.dim()
            }
            ActionRule::Local(_) => 2.min(PARAM_SLOTS),
        };
        for i in 0..m {
            for j in (i + 1)..m {
                let (xi, xj, bracket_section) = match &self.rule {
                    ActionRule::Global(_) => {
                        let si = basis_section(alg, i);
                        let sj = basis_section(alg, j);
                        let b = bracket_sections(alg, &si, &sj);
                        (self.evaluate(&si, ctx)?, self.evaluate(&sj, ctx)?, b)
                    }
                    ActionRule::Local(_) => {
                        let si = slot_section(alg, ctx, 0);
                        let sj = slot_section(alg, ctx, 1);
                        let b = bracket_sections(alg, &si, &sj);
                        (self.evaluate(&si, ctx)?, self.evaluate(&sj, ctx)?, b)
                    }
                };
                let lhs = self.evaluate(&bracket_section, ctx)?;
                let rhs = xi.bracket(&xj, ctx)?;
                if lhs != rhs {
                    return Ok(Some((i, j)));
                }
            }
            if matches!(self.rule, ActionRule::Local(_)) {
                break;
            }
        }
        Ok(None)
    }
}

/// Chevalley-Eilenberg boundary of a wedge of sections:
/// `d_CE(a_1 ^ ... ^ a_p) = sum_{j<k} (-1)^{j+k} [a_j, a_k] ^ ... (omit j, k)`,
/// 1-based signs. For p = 2 this is `-[a_1, a_2]`, the convention under
/// which a verified momentum map is exactly a primitive of the barred form.
pub fn chevalley_eilenberg_boundary<C: Scalar>(
    alg: &LieAlgebra<C>,
    wedge: &[Section<C>],
) -> Vec<(C, Vec<Section<C>>)> {
    let p = wedge.len();
    let mut out = Vec::new();
    for j in 0..p {
        for k in (j + 1)..p {
            let sign = if (j + 1 + k + 1) % 2 == 0 { C::one() } else { -C::one() };
            let mut terms = Vec::with_capacity(p - 1);
            terms.push(bracket_sections(alg, &wedge[j], &wedge[k]));
            for (l, s) in wedge.iter().enumerate() {
                if l != j && l != k {
                    terms.push(s.clone());
                }
            }
            out.push((sign, terms));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Expr, Rat};

    /// so(3) with the sign matching fundamental vector fields of the left
    /// rotation action: [e_i, e_j] = -eps_{ijk} e_k.
    #[allow(clippy::needless_range_loop)]
    pub fn so3_action_aligned() -> LieAlgebra<Rat> {
        let mut c = vec![vec![vec![Rat::from_i64(0); 3]; 3]; 3];
        let eps = |i: usize, j: usize, k: usize| -> i64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
                (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1,
                _ => 0,
            }
        };
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j][k] = Rat::from_i64(-eps(i, j, k));
                }
            }
        }
        LieAlgebra::new("so3", vec!["e1".into(), "e2".into(), "e3".into()], c, false).unwrap()
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn jacobi_detects_bad_constants() {
        // Antisymmetric but non-Jacobi: [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e1.
        let mut c = vec![vec![vec![Rat::from_i64(0); 3]; 3]; 3];
        c[0][1][2] = Rat::from_i64(1);
        c[1][0][2] = Rat::from_i64(-1);
        c[1][2][0] = Rat::from_i64(1);
        c[2][1][0] = Rat::from_i64(-1);
        c[2][0][0] = Rat::from_i64(1);
        c[0][2][0] = Rat::from_i64(-1);
        let r = LieAlgebra::new("bad", vec!["a".into(), "b".into(), "c".into()], c, false);
        assert!(r.is_err());
    }

    #[test]
    fn so3_bracket_table() {
        let alg = so3_action_aligned();
        let b = alg.bracket_coeffs(
            &[Rat::from_i64(1), Rat::from_i64(0), Rat::from_i64(0)],
            &[Rat::from_i64(0), Rat::from_i64(1), Rat::from_i64(0)],
        );
        assert_eq!(b, vec![Rat::from_i64(0), Rat::from_i64(0), Rat::from_i64(-1)]);
    }

    #[test]
    fn rotation_action_is_bracket_compatible() {
        let ctx = JetContext::new(vec!["t".into()], vec![("q".into(), vec![3])]);
        let alg = so3_action_aligned();
        let eps = |i: usize, j: usize, k: usize| -> i64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
                (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1,
                _ => 0,
            }
        };
        let mut fields = Vec::new();
        for a in 0..3 {
            let mut ch = vec![Expr::zero(); 3];
            for (i, slot) in ch.iter_mut().enumerate() {
                for k in 0..3 {
                    let e = eps(i, a, k);
                    if e != 0 {
                        *slot = slot.add(
                            &Expr::var(JetVar::field(k, MultiIndex(vec![0])))
                                .scale(&Rat::from_i64(e)),
                        );
                    }
                }
            }
            fields.push(JetVectorField::vertical(&ctx, ch).unwrap());
        }
        let action = AlgebraAction { name: "rot".into(), rule: ActionRule::Global(fields) };
        assert_eq!(action.bracket_compatibility(&alg, &ctx).unwrap(), None);
    }

    #[test]
    fn ce_boundary_pair_is_minus_bracket() {
        let alg = so3_action_aligned();
        let x = basis_section(&alg, 0);
        let y = basis_section(&alg, 1);
        let b = chevalley_eilenberg_boundary(&alg, &[x.clone(), y.clone()]);
        assert_eq!(b.len(), 1);
        let (sign, terms) = &b[0];
        assert_eq!(*sign, Rat::from_i64(-1));
        // [e1, e2] = -e3 in the action-aligned algebra.
        assert_eq!(terms[0], {
            let mut s = vec![Expr::zero(); 3];
            s[2] = Expr::int(-1);
            s
        });
    }
}
