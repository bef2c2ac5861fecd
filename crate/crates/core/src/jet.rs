//! Jet coordinates on a truncated jet bundle.
//!
//! A theory fixes a base manifold `R^n` with named coordinates, a list of
//! field components, an optional bundle of symmetry parameters, and a jet
//! truncation order. Everything downstream works with plain index data and
//! looks names up in the [`JetContext`].

use crate::error::{CoreError, Result};
use std::fmt;

/// Number of independent generic parameter sections available in local mode.
/// Relation checks need up to four (arity n+1 = 4 for a 3-dimensional base).
pub const PARAM_SLOTS: usize = 4;

/// Display names of the parameter slots.
pub const SLOT_NAMES: [&str; PARAM_SLOTS] = ["X", "Y", "Z", "W"];

/// Derivative multi-index: exponent vector over the base coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Bump the derivative along `axis`, failing on truncation overflow.
    pub fn raised(&self, axis: usize, max_order: u32) -> Result<Self> {
        let mut v = self.0.clone();
        v[axis] += 1;
        let idx = MultiIndex(v);
        if idx.order() > max_order {
            return Err(CoreError::TruncationOverflow {
                requested: idx.order(),
                max: max_order,
            });
        }
        Ok(idx)
    }

    /// Remove one derivative along `axis`; `None` if there is none.
    pub fn lowered(&self, axis: usize) -> Option<Self> {
        if self.0[axis] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[axis] -= 1;
        Some(MultiIndex(v))
    }

    /// Smallest axis carrying a derivative, if any.
    pub fn first_axis(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    /// The axes listed with multiplicity, ascending. `(1,0,2)` -> `[0,2,2]`.
    pub fn axes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (axis, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                out.push(axis);
            }
        }
        out
    }
}

/// A jet coordinate or base coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetVar {
    /// Base coordinate `x^mu`.
    Base(usize),
    /// Field jet `u^a_I` for flattened field component `a`.
    FieldJet { comp: usize, index: MultiIndex },
    /// Jet of a generic symmetry-parameter section (local mode only).
    ParamJet { slot: usize, comp: usize, index: MultiIndex },
}

impl JetVar {
    pub fn field(comp: usize, index: MultiIndex) -> Self {
        JetVar::FieldJet { comp, index }
    }

    pub fn field0(comp: usize, n: usize) -> Self {
        JetVar::FieldJet { comp, index: MultiIndex::zero(n) }
    }

    pub fn param(slot: usize, comp: usize, index: MultiIndex) -> Self {
        JetVar::ParamJet { slot, comp, index }
    }
}

/// Uninterpreted function symbol applied to declared jet variables, e.g.
/// `V(q1,q2,q3)` with registered partials `V_1`, `V_12`, ... The derivative
/// record counts differentiations per argument slot, so symbols close under
/// further differentiation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunApp {
    /// Index into the context's function declarations.
    pub symbol: usize,
    /// Differentiation multiplicity per argument slot.
    pub der: Vec<u32>,
}

impl FunApp {
    pub fn base(symbol: usize, arity: usize) -> Self {
        FunApp { symbol, der: vec![0; arity] }
    }

    /// The partial derivative symbol with respect to argument slot `arg`.
    pub fn derived(&self, arg: usize) -> Self {
        let mut der = self.der.clone();
        der[arg] += 1;
        FunApp { symbol: self.symbol, der }
    }
}

/// Declaration of an uninterpreted function symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    /// Fixed argument list; partial derivatives are taken per slot.
    pub args: Vec<JetVar>,
}

/// Declaration of one field (or the parameter bundle) as an array of scalar
/// components, e.g. `q[3]` or `A[3,3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGroup {
    pub name: String,
    pub dims: Vec<usize>,
    /// Offset of the group's first component in the flattened table.
    pub offset: usize,
}

impl ComponentGroup {
    pub fn len(&self) -> usize {
        self.dims.iter().product::<usize>().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component name for the flat index within this group: `A[3,3]` offset 0
    /// yields `A11 .. A33` (indices are 1-based, row-major).
    pub fn component_name(&self, local: usize) -> String {
        if self.dims.is_empty() {
            return self.name.clone();
        }
        let mut idx = Vec::with_capacity(self.dims.len());
        let mut rem = local;
        for d in self.dims.iter().rev() {
            idx.push(rem % d + 1);
            rem /= d;
        }
        idx.reverse();
        let digits: String = idx.iter().map(|i| i.to_string()).collect();
        format!("{}{}", self.name, digits)
    }
}

/// Name tables and configuration for one theory's jet bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetContext {
    /// Base coordinate names; the base dimension is `base.len()` (may be 0).
    pub base: Vec<String>,
    pub field_groups: Vec<ComponentGroup>,
    /// Flattened field component names.
    pub fields: Vec<String>,
    /// Fiber dimension of the symmetry-parameter bundle, if declared.
    pub param_dim: Option<usize>,
    pub functions: Vec<FunctionDecl>,
    /// Jet truncation order.
    pub jet_order: u32,
}

pub const DEFAULT_JET_ORDER: u32 = 4;

impl JetContext {
    pub fn new(base: Vec<String>, groups: Vec<(String, Vec<usize>)>) -> Self {
        let mut field_groups = Vec::new();
        let mut fields = Vec::new();
        for (name, dims) in groups {
            let group = ComponentGroup { name, dims, offset: fields.len() };
            for i in 0..group.len() {
                fields.push(group.component_name(i));
            }
            field_groups.push(group);
        }
        JetContext {
            base,
            field_groups,
            fields,
            param_dim: None,
            functions: Vec::new(),
            jet_order: DEFAULT_JET_ORDER,
        }
    }

    pub fn with_params(mut self, dim: usize) -> Self {
        self.param_dim = Some(dim);
        self
    }

    pub fn with_jet_order(mut self, order: u32) -> Self {
        self.jet_order = order;
        self
    }

    /// Register an uninterpreted function; returns its symbol index.
    pub fn declare_function(&mut self, name: impl Into<String>, args: Vec<JetVar>) -> usize {
        self.functions.push(FunctionDecl { name: name.into(), args });
        self.functions.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn num_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn check_var(&self, v: &JetVar) -> Result<()> {
        match v {
            JetVar::Base(mu) => {
                if *mu >= self.dim() {
                    return Err(CoreError::UndeclaredVariable(format!("x{mu}")));
                }
            }
            JetVar::FieldJet { comp, index } => {
                if *comp >= self.fields.len() || index.dim() != self.dim() {
                    return Err(CoreError::UndeclaredVariable(format!("u{comp}")));
                }
                if index.order() > self.jet_order {
                    return Err(CoreError::TruncationOverflow {
                        requested: index.order(),
                        max: self.jet_order,
                    });
                }
            }
            JetVar::ParamJet { slot, comp, index } => {
                let dim = self
                    .param_dim
                    .ok_or_else(|| CoreError::validation("no parameter bundle declared"))?;
                if *slot >= PARAM_SLOTS || *comp >= dim || index.dim() != self.dim() {
                    return Err(CoreError::UndeclaredVariable(format!("param{comp}")));
                }
                if index.order() > self.jet_order {
                    return Err(CoreError::TruncationOverflow {
                        requested: index.order(),
                        max: self.jet_order,
                    });
                }
            }
        }
        Ok(())
    }

    /// Render a jet variable. One-dimensional bases use the `q1_t`, `q1_tt`
    /// spelling; higher-dimensional bases use `A11_d01`.
    pub fn var_name(&self, v: &JetVar) -> String {
        match v {
            JetVar::Base(mu) => self.base[*mu].clone(),
            JetVar::FieldJet { comp, index } => {
                self.jet_name(&self.fields[*comp], index)
            }
            JetVar::ParamJet { slot, comp, index } => {
                let name = format!("{}{}", SLOT_NAMES[*slot], comp + 1);
                self.jet_name(&name, index)
            }
        }
    }

    fn jet_name(&self, stem: &str, index: &MultiIndex) -> String {
        if index.order() == 0 {
            return stem.to_string();
        }
        if self.dim() == 1 {
            let coord = &self.base[0];
            let mut s = format!("{stem}_");
            for _ in 0..index.order() {
                s.push_str(coord);
            }
            s
        } else {
            let digits: String = index.axes().iter().map(|a| a.to_string()).collect();
            format!("{stem}_d{digits}")
        }
    }

    pub fn fun_name(&self, app: &FunApp) -> String {
        let decl = &self.functions[app.symbol];
        let order: u32 = app.der.iter().sum();
        if order == 0 {
            decl.name.clone()
        } else {
            let mut digits = String::new();
            for (slot, &k) in app.der.iter().enumerate() {
                for _ in 0..k {
                    digits.push_str(&(slot + 1).to_string());
                }
            }
            format!("{}_{digits}", decl.name)
        }
    }

    /// Find a flattened field component by name.
    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
