//! Recursive-descent parser over the token stream. Grammar:
//!
//! ```text
//! document := decl*
//! decl     := theory | algebra | action | momap | field | check
//! theory   := "theory" NAME "{" "base" INT "coords" "[" names "]" ";"
//!             "fields" fieldspec ("," fieldspec)* ";"
//!             ("params" INT ";")? ("jets" INT ";")?
//!             ("functions" fnspec ("," fnspec)* ";")?
//!             "lagrangian" "=" expr ";"
//!             ("gamma" "=" formexpr ";")? ("omega" "=" formexpr ";")? "}"
//! algebra  := "algebra" NAME "{" "basis" "[" names "]" ";"
//!             ("brackets" "{" ("[" NAME "," NAME "]" "=" linear ";")* "}")?
//!             ("local" ";")? "}"
//! action   := "action" NAME "of" NAME "on" NAME "{" rule+ "}"
//! rule     := NAME "->" vfpart ("+" vfpart)* ";"
//! vfpart   := ("ev" | "lift") "(" NAME "=" expr ("," NAME "=" expr)* ")"
//! momap    := "momap" NAME "for" NAME "{" mu+ "}"
//! mu       := "mu" INT ":" NAME ("^" NAME)* "->" formexpr ";"
//! field    := "field" NAME "on" NAME "{"
//!             ("grid" (NAME "from" num "to" num "n" INT)+ ";")?
//!             (NAME "=" (expr | "[" num,* "]") ";")* "}"
//! check    := "check" NAME "(" NAME ("," NAME)* ")" ";"
//! ```
//!
//! Scalar expressions use `+ - * / ^INT` with rational literals; form
//! expressions add the generators `d(x)` / `v(u)` and the wedge `^^` at
//! multiplication precedence.

use crate::ast::*;
use crate::diag::{Diagnostic, ParseResult, Span};
use crate::lexer::{lex, Tok, Token};
use jetreduce_core::Rat;
use num_traits::{Signed, ToPrimitive, Zero};

fn one() -> Rat {
    use jetreduce_core::scalar::Scalar;
    Rat::from_i64(1)
}

pub fn parse(source: &str) -> ParseResult<SourceDoc> {
    let tokens = lex(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut decls = Vec::new();
    while !p.at_eof() {
        decls.push(p.decl()?);
    }
    Ok(SourceDoc { decls })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> ParseResult<Span> {
        if self.peek() == tok {
            let span = self.span();
            self.bump();
            Ok(span)
        } else {
            Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", self.peek().describe()),
                vec![what.to_string()],
            ))
        }
    }

    fn ident(&mut self, what: &str) -> ParseResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                Ok((name, span))
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec![what.to_string()],
            )),
        }
    }

    fn keyword(&mut self, kw: &str) -> ParseResult<Span> {
        match self.peek().clone() {
            Tok::Ident(name) if name == kw => {
                let span = self.span();
                self.bump();
                Ok(span)
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec![format!("`{kw}`")],
            )),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(name) if name == kw)
    }

    fn integer(&mut self, what: &str) -> ParseResult<(u64, Span)> {
        match self.peek().clone() {
            Tok::Number(r) if r.is_integer() && !r.is_negative() => {
                let span = self.span();
                self.bump();
                let v = r.to_integer().to_u64().ok_or_else(|| {
                    Diagnostic::new(span, "integer out of range")
                })?;
                Ok((v, span))
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec![what.to_string()],
            )),
        }
    }

    fn number(&mut self) -> ParseResult<(Rat, Span)> {
        let negative = if matches!(self.peek(), Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Number(r) => {
                let span = self.span();
                self.bump();
                Ok((if negative { -r } else { r }, span))
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec!["number".to_string()],
            )),
        }
    }

    fn name_list(&mut self) -> ParseResult<Vec<String>> {
        self.expect(&Tok::LBracket, "`[`")?;
        let mut names = Vec::new();
        if !matches!(self.peek(), Tok::RBracket) {
            loop {
                names.push(self.ident("name")?.0);
                if matches!(self.peek(), Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RBracket, "`]`")?;
        Ok(names)
    }

    fn decl(&mut self) -> ParseResult<Decl> {
        match self.peek().clone() {
            Tok::Ident(kw) => match kw.as_str() {
                "theory" => self.theory().map(|t| Decl::Theory(Box::new(t))),
                "algebra" => self.algebra().map(Decl::Algebra),
                "action" => self.action().map(Decl::Action),
                "momap" => self.momap().map(Decl::Momap),
                "field" => self.field().map(Decl::Field),
                "check" => self.check().map(Decl::Check),
                other => Err(Diagnostic::expecting(
                    self.span(),
                    format!("unknown declaration `{other}`"),
                    vec![
                        "`theory`".into(),
                        "`algebra`".into(),
                        "`action`".into(),
                        "`momap`".into(),
                        "`field`".into(),
                        "`check`".into(),
                    ],
                )),
            },
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec!["declaration".into()],
            )),
        }
    }

    fn theory(&mut self) -> ParseResult<TheoryDecl> {
        let span = self.keyword("theory")?;
        let (name, _) = self.ident("theory name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        self.keyword("base")?;
        let (base_dim, _) = self.integer("base dimension")?;
        self.keyword("coords")?;
        let coords = self.name_list()?;
        self.expect(&Tok::Semi, "`;`")?;
        self.keyword("fields")?;
        let mut fields = Vec::new();
        loop {
            let (fname, _) = self.ident("field name")?;
            let mut dims = Vec::new();
            if matches!(self.peek(), Tok::LBracket) {
                self.bump();
                loop {
                    dims.push(self.integer("dimension")?.0);
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RBracket, "`]`")?;
            }
            fields.push((fname, dims));
            if matches!(self.peek(), Tok::Comma) {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(&Tok::Semi, "`;`")?;
        let mut params = None;
        if self.at_keyword("params") {
            self.bump();
            params = Some(self.integer("parameter fiber dimension")?.0);
            self.expect(&Tok::Semi, "`;`")?;
        }
        let mut jets = None;
        if self.at_keyword("jets") {
            self.bump();
            jets = Some(self.integer("jet order")?.0);
            self.expect(&Tok::Semi, "`;`")?;
        }
        let mut functions = Vec::new();
        if self.at_keyword("functions") {
            self.bump();
            loop {
                let (fname, _) = self.ident("function name")?;
                self.expect(&Tok::LParen, "`(`")?;
                let mut args = Vec::new();
                loop {
                    args.push(self.ident("argument")?.0);
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                functions.push((fname, args));
                if matches!(self.peek(), Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(&Tok::Semi, "`;`")?;
        }
        self.keyword("lagrangian")?;
        self.expect(&Tok::Eq, "`=`")?;
        let lagrangian = self.expr()?;
        self.expect(&Tok::Semi, "`;`")?;
        let mut gamma = None;
        if self.at_keyword("gamma") {
            self.bump();
            self.expect(&Tok::Eq, "`=`")?;
            gamma = Some(self.form_expr()?);
            self.expect(&Tok::Semi, "`;`")?;
        }
        let mut omega = None;
        if self.at_keyword("omega") {
            self.bump();
            self.expect(&Tok::Eq, "`=`")?;
            omega = Some(self.form_expr()?);
            self.expect(&Tok::Semi, "`;`")?;
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(TheoryDecl {
            name,
            span,
            base_dim,
            coords,
            fields,
            params,
            jets,
            functions,
            lagrangian,
            gamma,
            omega,
        })
    }

    fn algebra(&mut self) -> ParseResult<AlgebraDecl> {
        let span = self.keyword("algebra")?;
        let (name, _) = self.ident("algebra name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        self.keyword("basis")?;
        let basis = self.name_list()?;
        self.expect(&Tok::Semi, "`;`")?;
        let mut brackets = Vec::new();
        if self.at_keyword("brackets") {
            self.bump();
            self.expect(&Tok::LBrace, "`{`")?;
            while !matches!(self.peek(), Tok::RBrace) {
                let bspan = self.expect(&Tok::LBracket, "`[`")?;
                let (a, _) = self.ident("basis name")?;
                self.expect(&Tok::Comma, "`,`")?;
                let (b, _) = self.ident("basis name")?;
                self.expect(&Tok::RBracket, "`]`")?;
                self.expect(&Tok::Eq, "`=`")?;
                let combo = self.linear_combo()?;
                self.expect(&Tok::Semi, "`;`")?;
                brackets.push((a, b, combo, bspan));
            }
            self.expect(&Tok::RBrace, "`}`")?;
        }
        let mut local = false;
        if self.at_keyword("local") {
            self.bump();
            self.expect(&Tok::Semi, "`;`")?;
            local = true;
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(AlgebraDecl { name, span, basis, brackets, local })
    }

    /// `2*e1 - 1/2*e3 + e2` or `0`.
    fn linear_combo(&mut self) -> ParseResult<Vec<(Rat, String)>> {
        let mut out = Vec::new();
        let mut negate = false;
        loop {
            match self.peek().clone() {
                Tok::Minus => {
                    self.bump();
                    negate = !negate;
                    continue;
                }
                Tok::Number(r) => {
                    let span = self.span();
                    self.bump();
                    let mut coeff = if negate { -r } else { r.clone() };
                    // Optional `/ den` and `* name`.
                    if matches!(self.peek(), Tok::Slash) {
                        self.bump();
                        let (den, dspan) = self.number()?;
                        if den.is_zero() {
                            return Err(Diagnostic::new(dspan, "division by zero"));
                        }
                        coeff /= den;
                    }
                    if matches!(self.peek(), Tok::Star) {
                        self.bump();
                        let (name, _) = self.ident("basis name")?;
                        out.push((coeff, name));
                    } else if coeff.is_zero() {
                        // A literal zero combination.
                    } else {
                        return Err(Diagnostic::new(span, "expected `* basis` after coefficient"));
                    }
                }
                Tok::Ident(name) => {
                    self.bump();
                    let coeff = if negate { -one() } else { one() };
                    out.push((coeff, name));
                }
                other => {
                    return Err(Diagnostic::expecting(
                        self.span(),
                        format!("unexpected {}", other.describe()),
                        vec!["linear combination".into()],
                    ))
                }
            }
            negate = false;
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                }
                Tok::Minus => {
                    self.bump();
                    negate = true;
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn action(&mut self) -> ParseResult<ActionDecl> {
        let span = self.keyword("action")?;
        let (name, _) = self.ident("action name")?;
        self.keyword("of")?;
        let (algebra, _) = self.ident("algebra name")?;
        self.keyword("on")?;
        let (theory, _) = self.ident("theory name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut rules = Vec::new();
        while !matches!(self.peek(), Tok::RBrace) {
            let (binder, bspan) = self.ident("basis element or section binder")?;
            self.expect(&Tok::Arrow, "`->`")?;
            let mut vertical = Vec::new();
            let mut lift = Vec::new();
            loop {
                let (kind, kspan) = self.ident("`ev` or `lift`")?;
                self.expect(&Tok::LParen, "`(`")?;
                let mut entries = Vec::new();
                if !matches!(self.peek(), Tok::RParen) {
                    loop {
                        let (comp, _) = self.ident("component")?;
                        self.expect(&Tok::Eq, "`=`")?;
                        let e = self.expr()?;
                        entries.push((comp, e));
                        if matches!(self.peek(), Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                match kind.as_str() {
                    "ev" => vertical.extend(entries),
                    "lift" => lift.extend(entries),
                    other => {
                        return Err(Diagnostic::expecting(
                            kspan,
                            format!("unknown vector-field part `{other}`"),
                            vec!["`ev`".into(), "`lift`".into()],
                        ))
                    }
                }
                if matches!(self.peek(), Tok::Plus) {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(&Tok::Semi, "`;`")?;
            rules.push(ActionRuleDecl { binder, span: bspan, vertical, lift });
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(ActionDecl { name, span, algebra, theory, rules })
    }

    fn momap(&mut self) -> ParseResult<MomapDecl> {
        let span = self.keyword("momap")?;
        let (name, _) = self.ident("momentum map name")?;
        self.keyword("for")?;
        let (action, _) = self.ident("action name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut components = Vec::new();
        while !matches!(self.peek(), Tok::RBrace) {
            let mspan = self.keyword("mu")?;
            let (arity, _) = self.integer("arity")?;
            self.expect(&Tok::Colon, "`:`")?;
            let mut pattern = vec![self.ident("basis element or binder")?.0];
            while matches!(self.peek(), Tok::Caret) {
                self.bump();
                pattern.push(self.ident("basis element or binder")?.0);
            }
            self.expect(&Tok::Arrow, "`->`")?;
            let value = self.form_expr()?;
            self.expect(&Tok::Semi, "`;`")?;
            components.push(MuDecl { arity, span: mspan, pattern, value });
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(MomapDecl { name, span, action, components })
    }

    fn field(&mut self) -> ParseResult<FieldDecl> {
        let span = self.keyword("field")?;
        let (name, _) = self.ident("field sample name")?;
        self.keyword("on")?;
        let (theory, _) = self.ident("theory name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut grid = None;
        if self.at_keyword("grid") {
            let gspan = self.span();
            self.bump();
            let mut axes = Vec::new();
            loop {
                let (coord, _) = self.ident("coordinate")?;
                self.keyword("from")?;
                let (start, _) = self.number()?;
                self.keyword("to")?;
                let (end, _) = self.number()?;
                self.keyword("n")?;
                let (count, _) = self.integer("point count")?;
                axes.push((coord, start, end, count));
                if matches!(self.peek(), Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(&Tok::Semi, "`;`")?;
            grid = Some(GridDecl { span: gspan, axes });
        }
        let mut components = Vec::new();
        while !matches!(self.peek(), Tok::RBrace) {
            let (comp, cspan) = self.ident("component name")?;
            self.expect(&Tok::Eq, "`=`")?;
            if matches!(self.peek(), Tok::LBracket) {
                self.bump();
                let mut samples = Vec::new();
                if !matches!(self.peek(), Tok::RBracket) {
                    loop {
                        samples.push(self.number()?.0);
                        if matches!(self.peek(), Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RBracket, "`]`")?;
                components.push((comp, ComponentDecl::Samples(samples), cspan));
            } else {
                let e = self.expr()?;
                components.push((comp, ComponentDecl::Closed(e), cspan));
            }
            self.expect(&Tok::Semi, "`;`")?;
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(FieldDecl { name, span, theory, grid, components })
    }

    fn check(&mut self) -> ParseResult<CheckDecl> {
        let span = self.keyword("check")?;
        let (kind, _) = self.ident("check kind")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if !matches!(self.peek(), Tok::RParen) {
            loop {
                args.push(self.ident("argument")?.0);
                if matches!(self.peek(), Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen, "`)`")?;
        self.expect(&Tok::Semi, "`;`")?;
        Ok(CheckDecl { kind, span, args })
    }

    // ----- scalar expressions ---------------------------------------------

    fn expr(&mut self) -> ParseResult<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprNode::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprNode::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> ParseResult<ExprNode> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprNode::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprNode::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> ParseResult<ExprNode> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            let inner = self.unary()?;
            return Ok(ExprNode::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> ParseResult<ExprNode> {
        let base = self.atom()?;
        if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let span = self.span();
            let negative = if matches!(self.peek(), Tok::Minus) {
                self.bump();
                true
            } else {
                false
            };
            match self.peek().clone() {
                Tok::Number(r) if r.is_integer() => {
                    self.bump();
                    let k = r.to_integer().to_i64().ok_or_else(|| {
                        Diagnostic::new(span, "exponent out of range")
                    })?;
                    let k = if negative { -k } else { k };
                    return Ok(ExprNode::Pow(Box::new(base), k, span));
                }
                other => {
                    return Err(Diagnostic::expecting(
                        span,
                        format!("unexpected {}", other.describe()),
                        vec!["integer exponent".into()],
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> ParseResult<ExprNode> {
        match self.peek().clone() {
            Tok::Number(r) => {
                let span = self.span();
                self.bump();
                Ok(ExprNode::Number(r, span))
            }
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                if matches!(self.peek(), Tok::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    if !matches!(self.peek(), Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if matches!(self.peek(), Tok::Comma) {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(ExprNode::Apply(name, args, span))
                } else {
                    Ok(ExprNode::Ident(name, span))
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec!["number".into(), "variable".into(), "`(`".into()],
            )),
        }
    }

    // ----- form expressions -------------------------------------------------

    fn form_expr(&mut self) -> ParseResult<FormNode> {
        let mut lhs = self.form_term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.form_term()?;
                    lhs = FormNode::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.form_term()?;
                    lhs = FormNode::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// Products at this level: `*` and `^^` both wedge (scalars commute);
    /// `/` divides by a constant scalar factor, checked during resolution.
    fn form_term(&mut self) -> ParseResult<FormNode> {
        let mut lhs = self.form_unary()?;
        loop {
            match self.peek() {
                Tok::Star | Tok::Wedge => {
                    self.bump();
                    let rhs = self.form_unary()?;
                    lhs = FormNode::Wedge(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let span = self.span();
                    let rhs = self.form_unary()?;
                    // Division folds into a scalar reciprocal.
                    match rhs {
                        FormNode::Scalar(e) => {
                            lhs = FormNode::Wedge(
                                Box::new(lhs),
                                Box::new(FormNode::Scalar(ExprNode::Div(
                                    Box::new(ExprNode::Number(one(), span)),
                                    Box::new(e),
                                ))),
                            );
                        }
                        _ => {
                            return Err(Diagnostic::new(span, "cannot divide by a form"));
                        }
                    }
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn form_unary(&mut self) -> ParseResult<FormNode> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            let inner = self.form_unary()?;
            return Ok(FormNode::Neg(Box::new(inner)));
        }
        self.form_atom()
    }

    /// A single factor: a generator, a parenthesized form, or one scalar
    /// atom (with optional integer power). Scalar products are handled by
    /// the form-level `*`, so `q1_t*v(q1)` wedges correctly.
    fn form_atom(&mut self) -> ParseResult<FormNode> {
        match self.peek().clone() {
            Tok::Ident(name)
                if (name == "d" || name == "v")
                    && matches!(&self.tokens[self.pos + 1].tok, Tok::LParen) =>
            {
                let span = self.span();
                self.bump();
                self.bump();
                let (var, _) = self.ident("generator variable")?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(if name == "d" {
                    FormNode::Horizontal(var, span)
                } else {
                    FormNode::Vertical(var, span)
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.form_expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                if matches!(self.peek(), Tok::Caret) {
                    // Scalar powers of parenthesized forms only make sense
                    // for scalar contents; resolve via the scalar grammar.
                    return Err(Diagnostic::new(
                        self.span(),
                        "powers of parenthesized forms are not supported; expand the wedge",
                    ));
                }
                Ok(inner)
            }
            Tok::Number(_) | Tok::Ident(_) => {
                let atom = self.power()?;
                Ok(FormNode::Scalar(atom))
            }
            other => Err(Diagnostic::expecting(
                self.span(),
                format!("unexpected {}", other.describe()),
                vec!["form expression".into()],
            )),
        }
    }
}
