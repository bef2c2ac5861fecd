//! Surface syntax tree, before name resolution.

use crate::diag::Span;
use jetreduce_core::Rat;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceDoc {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Theory(Box<TheoryDecl>),
    Algebra(AlgebraDecl),
    Action(ActionDecl),
    Momap(MomapDecl),
    Field(FieldDecl),
    Check(CheckDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryDecl {
    pub name: String,
    pub span: Span,
    pub base_dim: u64,
    pub coords: Vec<String>,
    pub fields: Vec<(String, Vec<u64>)>,
    pub params: Option<u64>,
    pub jets: Option<u64>,
    pub functions: Vec<(String, Vec<String>)>,
    pub lagrangian: ExprNode,
    pub gamma: Option<FormNode>,
    pub omega: Option<FormNode>,
}

/// One bracket-table row: `[a, b] = linear combination`, by basis name.
pub type BracketRow = (String, String, Vec<(Rat, String)>, Span);

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraDecl {
    pub name: String,
    pub span: Span,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketRow>,
    pub local: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionDecl {
    pub name: String,
    pub span: Span,
    pub algebra: String,
    pub theory: String,
    pub rules: Vec<ActionRuleDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionRuleDecl {
    /// Basis name (global algebras) or a fresh section binder (local).
    pub binder: String,
    pub span: Span,
    /// Vertical characteristic per component name.
    pub vertical: Vec<(String, ExprNode)>,
    /// Horizontal lift per coordinate name.
    pub lift: Vec<(String, ExprNode)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomapDecl {
    pub name: String,
    pub span: Span,
    pub action: String,
    pub components: Vec<MuDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuDecl {
    pub arity: u64,
    pub span: Span,
    /// Wedge pattern of basis names or section binders.
    pub pattern: Vec<String>,
    pub value: FormNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub span: Span,
    pub theory: String,
    pub grid: Option<GridDecl>,
    /// Component assignments: closed-form expressions or sample lists.
    pub components: Vec<(String, ComponentDecl, Span)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDecl {
    pub span: Span,
    /// Per axis: coordinate name, start, end, point count.
    pub axes: Vec<(String, Rat, Rat, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentDecl {
    Closed(ExprNode),
    Samples(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckDecl {
    pub kind: String,
    pub span: Span,
    pub args: Vec<String>,
}

/// Scalar expression syntax.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Number(Rat, Span),
    /// Identifier, possibly a jet spelling; resolved later.
    Ident(String, Span),
    /// Function application `V(q1,q2,q3)`.
    Apply(String, Vec<ExprNode>, Span),
    Neg(Box<ExprNode>),
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    Pow(Box<ExprNode>, i64, Span),
}

impl ExprNode {
    pub fn span(&self) -> Span {
        match self {
            ExprNode::Number(_, s) | ExprNode::Ident(_, s) | ExprNode::Apply(_, _, s) => *s,
            ExprNode::Neg(a) => a.span(),
            ExprNode::Add(a, _) | ExprNode::Sub(a, _) | ExprNode::Mul(a, _) | ExprNode::Div(a, _) => {
                a.span()
            }
            ExprNode::Pow(_, _, s) => *s,
        }
    }
}

/// Differential-form syntax: scalar expressions extended with generators and
/// the wedge product.
#[derive(Debug, Clone, PartialEq)]
pub enum FormNode {
    Scalar(ExprNode),
    /// `d(coord)`.
    Horizontal(String, Span),
    /// `v(jetvar)`.
    Vertical(String, Span),
    Neg(Box<FormNode>),
    Add(Box<FormNode>, Box<FormNode>),
    Sub(Box<FormNode>, Box<FormNode>),
    /// Product; wedge for form factors, scaling for scalars.
    Wedge(Box<FormNode>, Box<FormNode>),
}

impl FormNode {
    pub fn span(&self) -> Span {
        match self {
            FormNode::Scalar(e) => e.span(),
            FormNode::Horizontal(_, s) | FormNode::Vertical(_, s) => *s,
            FormNode::Neg(a) => a.span(),
            FormNode::Add(a, _) | FormNode::Sub(a, _) | FormNode::Wedge(a, _) => a.span(),
        }
    }
}
