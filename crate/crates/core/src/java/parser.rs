//! Recursive-descent parser for the Java subset.
//!
//! Covered: class and method declarations, fields, local variable
//! declarations, assignment, if/else, for/foreach, while, do-while,
//! try/catch/finally, throw, return, break/continue, expression statements,
//! method calls, object creation, and binary/unary/postfix expressions.
//! Generics appear only in type references; lambdas, casts, switch, and
//! non-marker annotations are outside the subset and produce parse errors.
//!
//! Every token, comments included, is attached as a leaf to the production
//! being parsed when it is consumed, so the in-order leaf walk reproduces
//! the token stream.

use super::ast::{Ast, AstChild, AstId, AstKind, AstNode, TokenId};
use super::lexer::{SourceToken, TokenKind, PRIMITIVE_TYPES};
use crate::error::{CoreError, Result};

const MAX_CLASS_DEPTH: usize = 2;

struct Parser<'a> {
    tokens: &'a [SourceToken],
    pos: usize,
    nodes: Vec<AstNode>,
    class_depth: usize,
}

pub fn parse(tokens: &[SourceToken]) -> Result<Ast> {
    let mut p = Parser { tokens, pos: 0, nodes: Vec::new(), class_depth: 0 };
    let root = p.compilation_unit()?;
    Ok(Ast { nodes: p.nodes, root })
}

impl<'a> Parser<'a> {
    // ---- token plumbing ------------------------------------------------

    /// Next significant (non-comment) token, not consumed.
    fn peek(&self) -> Option<&'a SourceToken> {
        self.tokens[self.pos..].iter().find(|t| !t.is_comment())
    }

    /// The n-th significant token ahead (0 = same as peek).
    fn peek_n(&self, n: usize) -> Option<&'a SourceToken> {
        self.tokens[self.pos..].iter().filter(|t| !t.is_comment()).nth(n)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    /// Consumes pending comments plus one significant token into `children`.
    fn bump(&mut self, children: &mut Vec<AstChild>) -> TokenId {
        while self.tokens[self.pos].is_comment() {
            children.push(AstChild::Token(self.pos as TokenId));
            self.pos += 1;
        }
        let id = self.pos as TokenId;
        children.push(AstChild::Token(id));
        self.pos += 1;
        id
    }

    /// Consumes any comments sitting at the cursor into `children`.
    fn drain_comments(&mut self, children: &mut Vec<AstChild>) {
        while self.pos < self.tokens.len() && self.tokens[self.pos].is_comment() {
            children.push(AstChild::Token(self.pos as TokenId));
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> CoreError {
        let (offset, found) = match self.peek() {
            Some(t) => (t.span.0 as usize, format!("`{}`", t.text)),
            None => (self.tokens.last().map_or(0, |t| t.span.1 as usize), "end of file".into()),
        };
        CoreError::Parse { offset, message: format!("{}, found {}", message.into(), found) }
    }

    fn expect(&mut self, text: &str, children: &mut Vec<AstChild>) -> Result<TokenId> {
        if self.at(text) {
            Ok(self.bump(children))
        } else {
            Err(self.error(format!("expected `{}`", text)))
        }
    }

    fn expect_ident(&mut self, children: &mut Vec<AstChild>) -> Result<TokenId> {
        if self.at_ident() {
            Ok(self.bump(children))
        } else {
            Err(self.error("expected identifier"))
        }
    }

    fn finish(&mut self, kind: AstKind, children: Vec<AstChild>) -> AstId {
        let id = self.nodes.len() as AstId;
        self.nodes.push(AstNode { kind, children, synthetic: false });
        id
    }

    fn finish_synthetic(&mut self, kind: AstKind, children: Vec<AstChild>) -> AstId {
        let id = self.finish(kind, children);
        self.nodes[id as usize].synthetic = true;
        id
    }

    // ---- top level -----------------------------------------------------

    fn compilation_unit(&mut self) -> Result<AstId> {
        let mut children = Vec::new();
        if self.at("package") {
            let n = self.package_decl()?;
            children.push(AstChild::Node(n));
        }
        while self.at("import") {
            let n = self.import_decl()?;
            children.push(AstChild::Node(n));
        }
        while self.peek().is_some() {
            let n = self.type_decl()?;
            children.push(AstChild::Node(n));
        }
        self.drain_comments(&mut children);
        Ok(self.finish(AstKind::CompilationUnit, children))
    }

    fn package_decl(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("package", &mut c)?;
        self.qualified_name(&mut c)?;
        self.expect(";", &mut c)?;
        Ok(self.finish(AstKind::PackageDecl, c))
    }

    fn import_decl(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("import", &mut c)?;
        if self.at("static") {
            self.bump(&mut c);
        }
        self.qualified_name(&mut c)?;
        if self.at(".") {
            self.bump(&mut c);
            self.expect("*", &mut c)?;
        }
        self.expect(";", &mut c)?;
        Ok(self.finish(AstKind::ImportDecl, c))
    }

    fn qualified_name(&mut self, c: &mut Vec<AstChild>) -> Result<()> {
        self.expect_ident(c)?;
        while self.at(".") && self.peek_n(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump(c);
            self.expect_ident(c)?;
        }
        Ok(())
    }

    fn modifiers(&mut self, c: &mut Vec<AstChild>) -> Result<()> {
        loop {
            if self.at("@") {
                let mut a = Vec::new();
                self.bump(&mut a);
                self.expect_ident(&mut a)?;
                if self.at("(") {
                    return Err(self.error("only marker annotations are supported"));
                }
                let n = self.finish(AstKind::Annotation, a);
                c.push(AstChild::Node(n));
            } else if self.peek().is_some_and(|t| {
                matches!(
                    t.text.as_str(),
                    "public" | "private" | "protected" | "static" | "final" | "abstract"
                        | "synchronized" | "native" | "transient" | "volatile" | "strictfp"
                )
            }) {
                self.bump(c);
            } else {
                return Ok(());
            }
        }
    }

    fn type_decl(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.modifiers(&mut c)?;
        if !self.at("class") {
            return Err(self.error("expected `class`"));
        }
        self.class_decl(c)
    }

    /// `children` already holds modifiers; cursor is at `class`.
    fn class_decl(&mut self, mut c: Vec<AstChild>) -> Result<AstId> {
        if self.class_depth >= MAX_CLASS_DEPTH {
            return Err(self.error("class nesting deeper than the supported subset"));
        }
        self.class_depth += 1;
        let result = (|| {
            self.expect("class", &mut c)?;
            self.expect_ident(&mut c)?;
            if self.at("extends") {
                self.bump(&mut c);
                let t = self.type_ref()?;
                c.push(AstChild::Node(t));
            }
            if self.at("implements") {
                self.bump(&mut c);
                loop {
                    let t = self.type_ref()?;
                    c.push(AstChild::Node(t));
                    if self.at(",") {
                        self.bump(&mut c);
                    } else {
                        break;
                    }
                }
            }
            let body = self.class_body()?;
            c.push(AstChild::Node(body));
            Ok(self.finish(AstKind::ClassDecl, c))
        })();
        self.class_depth -= 1;
        result
    }

    fn class_body(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("{", &mut c)?;
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.error("expected `}`"));
            }
            let m = self.member()?;
            c.push(AstChild::Node(m));
        }
        self.expect("}", &mut c)?;
        Ok(self.finish(AstKind::ClassBody, c))
    }

    fn member(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.modifiers(&mut c)?;
        if self.at("class") {
            return self.class_decl(c);
        }
        // Constructor: `Name (` with no preceding return type.
        if self.at_ident() && self.peek_n(1).is_some_and(|t| t.text == "(") {
            self.expect_ident(&mut c)?;
            return self.method_rest(c);
        }
        let ty = self.type_ref()?;
        c.push(AstChild::Node(ty));
        if self.peek_n(1).is_some_and(|t| t.text == "(") {
            self.expect_ident(&mut c)?;
            self.method_rest(c)
        } else {
            self.field_rest(c)
        }
    }

    /// Parses from the parameter list onward; `c` holds modifiers/type/name.
    fn method_rest(&mut self, mut c: Vec<AstChild>) -> Result<AstId> {
        let params = self.param_list()?;
        c.push(AstChild::Node(params));
        if self.at("throws") {
            self.bump(&mut c);
            loop {
                let t = self.type_ref()?;
                c.push(AstChild::Node(t));
                if self.at(",") {
                    self.bump(&mut c);
                } else {
                    break;
                }
            }
        }
        if self.at(";") {
            self.bump(&mut c);
        } else {
            let body = self.block()?;
            c.push(AstChild::Node(body));
        }
        Ok(self.finish(AstKind::MethodDecl, c))
    }

    fn field_rest(&mut self, mut c: Vec<AstChild>) -> Result<AstId> {
        loop {
            let d = self.var_declarator()?;
            c.push(AstChild::Node(d));
            if self.at(",") {
                self.bump(&mut c);
            } else {
                break;
            }
        }
        self.expect(";", &mut c)?;
        Ok(self.finish(AstKind::FieldDecl, c))
    }

    fn param_list(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("(", &mut c)?;
        if !self.at(")") {
            loop {
                let p = self.param()?;
                c.push(AstChild::Node(p));
                if self.at(",") {
                    self.bump(&mut c);
                } else {
                    break;
                }
            }
        }
        self.expect(")", &mut c)?;
        Ok(self.finish(AstKind::ParamList, c))
    }

    fn param(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        if self.at("final") {
            self.bump(&mut c);
        }
        let ty = self.type_ref()?;
        c.push(AstChild::Node(ty));
        if self.at("...") {
            self.bump(&mut c);
        }
        self.expect_ident(&mut c)?;
        while self.at("[") {
            self.bump(&mut c);
            self.expect("]", &mut c)?;
        }
        Ok(self.finish(AstKind::Param, c))
    }

    // ---- types ---------------------------------------------------------

    fn type_ref(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        let is_primitive = self.peek().is_some_and(|t| PRIMITIVE_TYPES.contains(&t.text.as_str()));
        if is_primitive {
            self.bump(&mut c);
        } else {
            self.qualified_name(&mut c)?;
            if self.at("<") {
                self.bump(&mut c);
                if self.at(">") {
                    // diamond
                    self.bump(&mut c);
                } else {
                    loop {
                        let t = self.type_ref()?;
                        c.push(AstChild::Node(t));
                        if self.at(",") {
                            self.bump(&mut c);
                        } else {
                            break;
                        }
                    }
                    self.expect(">", &mut c)?;
                }
            }
        }
        while self.at("[") && self.peek_n(1).is_some_and(|t| t.text == "]") {
            self.bump(&mut c);
            self.bump(&mut c);
        }
        Ok(self.finish(AstKind::TypeRef, c))
    }

    /// Significant-token lookahead: does a type reference starting at the
    /// cursor end right before an identifier? Used to tell declarations from
    /// expression statements without consuming anything.
    fn looks_like_decl(&self) -> bool {
        let sig: Vec<&SourceToken> =
            self.tokens[self.pos..].iter().filter(|t| !t.is_comment()).collect();
        let mut i;
        let at = |i: usize, s: &str| sig.get(i).is_some_and(|t| t.text == s);
        let ident = |i: usize| sig.get(i).is_some_and(|t| t.kind == TokenKind::Identifier);

        if sig.get(0).is_some_and(|t| PRIMITIVE_TYPES.contains(&t.text.as_str())) {
            i = 1;
        } else if ident(0) {
            i = 1;
            while at(i, ".") && ident(i + 1) {
                i += 2;
            }
            if at(i, "<") {
                // Skip a balanced generic argument list.
                let mut depth = 0usize;
                loop {
                    match sig.get(i).map(|t| t.text.as_str()) {
                        Some("<") => depth += 1,
                        Some(">") => {
                            depth -= 1;
                            if depth == 0 {
                                i += 1;
                                break;
                            }
                        }
                        Some(">>") => {
                            if depth < 2 {
                                return false;
                            }
                            depth -= 2;
                            if depth == 0 {
                                i += 1;
                                break;
                            }
                        }
                        None => return false,
                        _ => {}
                    }
                    i += 1;
                }
            }
        } else {
            return false;
        }
        while at(i, "[") && at(i + 1, "]") {
            i += 2;
        }
        ident(i)
    }

    // ---- statements ----------------------------------------------------

    fn block(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("{", &mut c)?;
        while !self.at("}") {
            if self.peek().is_none() {
                return Err(self.error("expected `}`"));
            }
            let s = self.statement()?;
            c.push(AstChild::Node(s));
        }
        self.expect("}", &mut c)?;
        Ok(self.finish(AstKind::Block, c))
    }

    /// A statement in branch position: non-block bodies get an implicit
    /// block wrapper so guards and scopes treat them uniformly.
    fn branch_body(&mut self) -> Result<AstId> {
        if self.at("{") {
            self.block()
        } else {
            let s = self.statement()?;
            Ok(self.finish_synthetic(AstKind::Block, vec![AstChild::Node(s)]))
        }
    }

    fn statement(&mut self) -> Result<AstId> {
        let t = self.peek().ok_or_else(|| self.error("expected statement"))?;
        match t.text.as_str() {
            "{" => self.block(),
            ";" => {
                let mut c = Vec::new();
                self.bump(&mut c);
                Ok(self.finish(AstKind::EmptyStmt, c))
            }
            "if" => self.if_stmt(),
            "while" => self.while_stmt(),
            "do" => self.do_while_stmt(),
            "for" => self.for_stmt(),
            "try" => self.try_stmt(),
            "throw" => {
                let mut c = Vec::new();
                self.bump(&mut c);
                let e = self.expression()?;
                c.push(e);
                self.expect(";", &mut c)?;
                Ok(self.finish(AstKind::ThrowStmt, c))
            }
            "return" => {
                let mut c = Vec::new();
                self.bump(&mut c);
                if !self.at(";") {
                    let e = self.expression()?;
                    c.push(e);
                }
                self.expect(";", &mut c)?;
                Ok(self.finish(AstKind::ReturnStmt, c))
            }
            "break" | "continue" => {
                let kind =
                    if t.text == "break" { AstKind::BreakStmt } else { AstKind::ContinueStmt };
                let mut c = Vec::new();
                self.bump(&mut c);
                if self.at_ident() {
                    self.bump(&mut c); // label
                }
                self.expect(";", &mut c)?;
                Ok(self.finish(kind, c))
            }
            "final" => self.local_var_decl(),
            _ if self.looks_like_decl() => self.local_var_decl(),
            _ => {
                let mut c = Vec::new();
                let e = self.expression()?;
                c.push(e);
                self.expect(";", &mut c)?;
                Ok(self.finish(AstKind::ExprStmt, c))
            }
        }
    }

    fn if_stmt(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("if", &mut c)?;
        self.expect("(", &mut c)?;
        let cond = self.expression()?;
        c.push(cond);
        self.expect(")", &mut c)?;
        let then = self.branch_body()?;
        c.push(AstChild::Node(then));
        if self.at("else") {
            self.bump(&mut c);
            let els = if self.at("if") {
                let s = self.if_stmt()?;
                self.finish_synthetic(AstKind::Block, vec![AstChild::Node(s)])
            } else {
                self.branch_body()?
            };
            c.push(AstChild::Node(els));
        }
        Ok(self.finish(AstKind::IfStmt, c))
    }

    fn while_stmt(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("while", &mut c)?;
        self.expect("(", &mut c)?;
        let cond = self.expression()?;
        c.push(cond);
        self.expect(")", &mut c)?;
        let body = self.branch_body()?;
        c.push(AstChild::Node(body));
        Ok(self.finish(AstKind::WhileStmt, c))
    }

    fn do_while_stmt(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("do", &mut c)?;
        let body = self.branch_body()?;
        c.push(AstChild::Node(body));
        self.expect("while", &mut c)?;
        self.expect("(", &mut c)?;
        let cond = self.expression()?;
        c.push(cond);
        self.expect(")", &mut c)?;
        self.expect(";", &mut c)?;
        Ok(self.finish(AstKind::DoWhileStmt, c))
    }

    fn for_stmt(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("for", &mut c)?;
        self.expect("(", &mut c)?;
        if self.foreach_ahead() {
            if self.at("final") {
                self.bump(&mut c);
            }
            let ty = self.type_ref()?;
            c.push(AstChild::Node(ty));
            self.expect_ident(&mut c)?;
            self.expect(":", &mut c)?;
            let iterable = self.expression()?;
            c.push(iterable);
            self.expect(")", &mut c)?;
            let body = self.branch_body()?;
            c.push(AstChild::Node(body));
            return Ok(self.finish(AstKind::ForEachStmt, c));
        }
        // init
        if !self.at(";") {
            if self.at("final") || self.looks_like_decl() {
                let d = self.local_var_decl()?;
                c.push(AstChild::Node(d));
            } else {
                let e = self.expression()?;
                c.push(e);
                self.expect(";", &mut c)?;
            }
        } else {
            self.bump(&mut c);
        }
        // condition
        if !self.at(";") {
            let e = self.expression()?;
            c.push(e);
        }
        self.expect(";", &mut c)?;
        // update
        if !self.at(")") {
            loop {
                let e = self.expression()?;
                c.push(e);
                if self.at(",") {
                    self.bump(&mut c);
                } else {
                    break;
                }
            }
        }
        self.expect(")", &mut c)?;
        let body = self.branch_body()?;
        c.push(AstChild::Node(body));
        Ok(self.finish(AstKind::ForStmt, c))
    }

    /// Lookahead for `for (Type name : ...` without consuming.
    fn foreach_ahead(&self) -> bool {
        let sig: Vec<&SourceToken> =
            self.tokens[self.pos..].iter().filter(|t| !t.is_comment()).collect();
        let mut depth = 0usize;
        for (i, t) in sig.iter().enumerate() {
            match t.text.as_str() {
                "(" | "[" | "<" => depth += 1,
                ")" | "]" | ">" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => return false,
                ":" if depth == 0 => {
                    // Not `::`.
                    return sig.get(i + 1).is_some_and(|n| n.text != ":")
                        && sig.get(i.wrapping_sub(1)).is_some_and(|p| p.text != ":");
                }
                _ => {}
            }
            if t.text == ")" && depth == 0 {
                return false;
            }
        }
        false
    }

    fn try_stmt(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("try", &mut c)?;
        let body = self.block()?;
        c.push(AstChild::Node(body));
        let mut saw_handler = false;
        while self.at("catch") {
            saw_handler = true;
            let mut cc = Vec::new();
            self.expect("catch", &mut cc)?;
            self.expect("(", &mut cc)?;
            if self.at("final") {
                self.bump(&mut cc);
            }
            let ty = self.type_ref()?;
            cc.push(AstChild::Node(ty));
            while self.at("|") {
                self.bump(&mut cc);
                let ty = self.type_ref()?;
                cc.push(AstChild::Node(ty));
            }
            self.expect_ident(&mut cc)?;
            self.expect(")", &mut cc)?;
            let b = self.block()?;
            cc.push(AstChild::Node(b));
            let clause = self.finish(AstKind::CatchClause, cc);
            c.push(AstChild::Node(clause));
        }
        if self.at("finally") {
            saw_handler = true;
            let mut fc = Vec::new();
            self.bump(&mut fc);
            let b = self.block()?;
            fc.push(AstChild::Node(b));
            let clause = self.finish(AstKind::FinallyClause, fc);
            c.push(AstChild::Node(clause));
        }
        if !saw_handler {
            return Err(self.error("expected `catch` or `finally`"));
        }
        Ok(self.finish(AstKind::TryStmt, c))
    }

    fn local_var_decl(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        if self.at("final") {
            self.bump(&mut c);
        }
        let ty = self.type_ref()?;
        c.push(AstChild::Node(ty));
        loop {
            let d = self.var_declarator()?;
            c.push(AstChild::Node(d));
            if self.at(",") {
                self.bump(&mut c);
            } else {
                break;
            }
        }
        self.expect(";", &mut c)?;
        Ok(self.finish(AstKind::LocalVarDecl, c))
    }

    fn var_declarator(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect_ident(&mut c)?;
        while self.at("[") {
            self.bump(&mut c);
            self.expect("]", &mut c)?;
        }
        if self.at("=") {
            self.bump(&mut c);
            let e = self.expression()?;
            c.push(e);
        }
        Ok(self.finish(AstKind::VarDeclarator, c))
    }

    // ---- expressions ---------------------------------------------------

    fn expression(&mut self) -> Result<AstChild> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<AstChild> {
        let lhs = self.binary(0)?;
        let is_assign_op = self.peek().is_some_and(|t| {
            matches!(
                t.text.as_str(),
                "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>="
                    | ">>>="
            )
        });
        if is_assign_op {
            let mut c = vec![lhs];
            self.bump(&mut c);
            let rhs = self.assignment()?;
            c.push(rhs);
            return Ok(AstChild::Node(self.finish(AstKind::Assign, c)));
        }
        Ok(lhs)
    }

    fn binary_level(op: &str) -> Option<u8> {
        Some(match op {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | ">" | "<=" | ">=" | "instanceof" => 7,
            "<<" | ">>" | ">>>" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        })
    }

    fn binary(&mut self, min_level: u8) -> Result<AstChild> {
        let mut lhs = self.unary()?;
        loop {
            let Some(op) = self.peek().map(|t| t.text.clone()) else { break };
            let Some(level) = Self::binary_level(&op) else { break };
            if level < min_level {
                break;
            }
            let mut c = vec![lhs];
            self.bump(&mut c);
            if op == "instanceof" {
                let ty = self.type_ref()?;
                c.push(AstChild::Node(ty));
            } else {
                let rhs = self.binary(level + 1)?;
                c.push(rhs);
            }
            lhs = AstChild::Node(self.finish(AstKind::Binary, c));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<AstChild> {
        if self.peek().is_some_and(|t| matches!(t.text.as_str(), "!" | "~" | "+" | "-" | "++" | "--"))
        {
            let mut c = Vec::new();
            self.bump(&mut c);
            let operand = self.unary()?;
            c.push(operand);
            return Ok(AstChild::Node(self.finish(AstKind::Unary, c)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<AstChild> {
        let mut expr = self.primary()?;
        loop {
            if self.at(".") {
                let mut c = vec![expr];
                self.bump(&mut c);
                self.expect_ident(&mut c)?;
                if self.at("(") {
                    let args = self.arg_list()?;
                    c.push(AstChild::Node(args));
                    expr = AstChild::Node(self.finish(AstKind::Call, c));
                } else {
                    expr = AstChild::Node(self.finish(AstKind::FieldAccess, c));
                }
            } else if self.at("[") {
                let mut c = vec![expr];
                self.bump(&mut c);
                let idx = self.expression()?;
                c.push(idx);
                self.expect("]", &mut c)?;
                expr = AstChild::Node(self.finish(AstKind::ArrayAccess, c));
            } else if self.at("++") || self.at("--") {
                let mut c = vec![expr];
                self.bump(&mut c);
                expr = AstChild::Node(self.finish(AstKind::Postfix, c));
            } else {
                return Ok(expr);
            }
        }
    }

    fn primary(&mut self) -> Result<AstChild> {
        let t = self.peek().ok_or_else(|| self.error("expected expression"))?;
        match t.text.as_str() {
            "(" => {
                let mut c = Vec::new();
                self.bump(&mut c);
                let inner = self.expression()?;
                c.push(inner);
                self.expect(")", &mut c)?;
                Ok(AstChild::Node(self.finish(AstKind::Paren, c)))
            }
            "new" => {
                let mut c = Vec::new();
                self.bump(&mut c);
                let ty = self.type_ref()?;
                c.push(AstChild::Node(ty));
                if self.at("[") {
                    self.bump(&mut c);
                    let len = self.expression()?;
                    c.push(len);
                    self.expect("]", &mut c)?;
                } else {
                    let args = self.arg_list()?;
                    c.push(AstChild::Node(args));
                }
                Ok(AstChild::Node(self.finish(AstKind::NewExpr, c)))
            }
            "this" | "super" => Ok(self.token_leaf()),
            _ => {
                if t.kind == TokenKind::Identifier {
                    // Bare call `name(...)` or a plain name leaf.
                    if self.peek_n(1).is_some_and(|n| n.text == "(") {
                        let mut c = Vec::new();
                        self.expect_ident(&mut c)?;
                        let args = self.arg_list()?;
                        c.push(AstChild::Node(args));
                        return Ok(AstChild::Node(self.finish(AstKind::Call, c)));
                    }
                    return Ok(self.token_leaf());
                }
                if t.kind == TokenKind::Literal
                    || matches!(t.text.as_str(), "true" | "false" | "null")
                {
                    return Ok(self.token_leaf());
                }
                Err(self.error("expected expression"))
            }
        }
    }

    /// A single significant token used directly as an expression leaf. Any
    /// comments sitting in front of it need an owner, so in that rare case
    /// the whole run is wrapped in a synthetic block.
    fn token_leaf(&mut self) -> AstChild {
        let mut c = Vec::new();
        self.bump(&mut c);
        if c.len() == 1 {
            c.remove(0)
        } else {
            AstChild::Node(self.finish_synthetic(AstKind::Block, c))
        }
    }

    fn arg_list(&mut self) -> Result<AstId> {
        let mut c = Vec::new();
        self.expect("(", &mut c)?;
        if !self.at(")") {
            loop {
                let e = self.expression()?;
                c.push(e);
                if self.at(",") {
                    self.bump(&mut c);
                } else {
                    break;
                }
            }
        }
        self.expect(")", &mut c)?;
        Ok(self.finish(AstKind::ArgList, c))
    }
}
