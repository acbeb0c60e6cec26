//! Name resolution and occurrence analysis over the parsed AST.
//!
//! Produces the inputs the graph builder needs: every variable occurrence in
//! textual order (declaration, write, or read), the declared type of each
//! variable, guard conditions enclosing each occurrence, call-site to
//! parameter matches, and return-to-method pairs.

use std::collections::BTreeMap;

use super::ast::{Ast, AstChild, AstId, AstKind, TokenId};
use super::lexer::{SourceToken, TokenKind};

pub type VarId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccKind {
    /// Declaration site: parameter, declarator name, foreach or catch variable.
    Decl,
    /// Assignment target, including compound assignment and ++/--.
    Write,
    Read,
}

#[derive(Debug, Clone, Copy)]
pub struct Occurrence {
    pub token: TokenId,
    pub var: VarId,
    pub kind: OccKind,
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub type_text: String,
}

/// Guard context for one occurrence: the condition expression it sits under
/// and whether it is on the negated (else) side.
#[derive(Debug, Clone, Copy)]
pub struct GuardEdge {
    pub token: TokenId,
    pub condition: AstChild,
    pub negated: bool,
}

#[derive(Debug, Clone)]
pub struct CallMatch {
    /// Root of each argument expression, paired with the matched parameter's
    /// name token.
    pub args: Vec<(AstChild, TokenId)>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReturnSite {
    /// The `return` keyword token.
    pub token: TokenId,
    pub method: AstId,
}

#[derive(Debug, Default)]
pub struct Analysis {
    pub occurrences: Vec<Occurrence>,
    pub vars: Vec<VarInfo>,
    pub guards: Vec<GuardEdge>,
    pub calls: Vec<CallMatch>,
    pub unresolved_calls: usize,
    pub returns: Vec<ReturnSite>,
}

impl Analysis {
    /// Occurrence lookup by token, for passes keyed on individual tokens.
    pub fn occurrence_at(&self, token: TokenId) -> Option<&Occurrence> {
        self.occurrences.iter().find(|o| o.token == token)
    }
}

/// Concatenated token text of a type reference, e.g. `Map<String,int[]>`.
pub fn type_text(ast: &Ast, tokens: &[SourceToken], type_ref: AstId) -> String {
    let mut out = String::new();
    for leaf in ast.leaf_tokens(type_ref) {
        let t = &tokens[leaf as usize];
        if !t.is_comment() {
            out.push_str(&t.text);
        }
    }
    out
}

pub fn analyze(ast: &Ast, tokens: &[SourceToken]) -> Analysis {
    let mut c = Collector {
        ast,
        tokens,
        scopes: vec![BTreeMap::new()],
        out: Analysis::default(),
    };
    c.walk_child(AstChild::Node(ast.root));
    collect_guards(ast, tokens, &mut c.out);
    collect_calls(ast, tokens, &mut c.out);
    collect_returns(ast, tokens, &mut c.out);
    c.out
}

struct Collector<'a> {
    ast: &'a Ast,
    tokens: &'a [SourceToken],
    scopes: Vec<BTreeMap<String, VarId>>,
    out: Analysis,
}

impl<'a> Collector<'a> {
    fn token(&self, id: TokenId) -> &'a SourceToken {
        &self.tokens[id as usize]
    }

    fn is_ident(&self, id: TokenId) -> bool {
        self.token(id).kind == TokenKind::Identifier
    }

    fn resolve(&self, name: &str) -> Option<VarId> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn declare(&mut self, name: &str, type_text: String) -> VarId {
        let id = self.out.vars.len() as VarId;
        self.out.vars.push(VarInfo { name: name.to_string(), type_text });
        self.scopes.last_mut().unwrap().insert(name.to_string(), id);
        id
    }

    fn record(&mut self, token: TokenId, var: VarId, kind: OccKind) {
        self.out.occurrences.push(Occurrence { token, var, kind });
    }

    fn first_type_ref(&self, id: AstId) -> Option<AstId> {
        self.ast.node(id).children.iter().find_map(|c| match c {
            AstChild::Node(n) if self.ast.node(*n).kind == AstKind::TypeRef => Some(*n),
            _ => None,
        })
    }

    fn type_refs(&self, id: AstId) -> Vec<AstId> {
        self.ast
            .node(id)
            .children
            .iter()
            .filter_map(|c| match c {
                AstChild::Node(n) if self.ast.node(*n).kind == AstKind::TypeRef => Some(*n),
                _ => None,
            })
            .collect()
    }

    fn first_ident_token(&self, id: AstId) -> Option<TokenId> {
        self.ast.node(id).children.iter().find_map(|c| match c {
            AstChild::Token(t) if self.is_ident(*t) => Some(*t),
            _ => None,
        })
    }

    // ---- dispatch ------------------------------------------------------

    fn walk_child(&mut self, child: AstChild) {
        match child {
            AstChild::Token(t) => self.read_if_var(t),
            AstChild::Node(n) => match self.ast.node(n).kind {
                AstKind::PackageDecl
                | AstKind::ImportDecl
                | AstKind::Annotation
                | AstKind::TypeRef
                | AstKind::BreakStmt
                | AstKind::ContinueStmt
                | AstKind::EmptyStmt => {}
                AstKind::ClassDecl => self.walk_class(n),
                AstKind::MethodDecl => self.walk_method(n),
                AstKind::Param => self.walk_param(n),
                AstKind::FieldDecl => self.walk_field(n),
                AstKind::LocalVarDecl => self.walk_local_decl(n),
                AstKind::Block => self.walk_scoped(n),
                AstKind::ForStmt => self.walk_scoped(n),
                AstKind::ForEachStmt => self.walk_foreach(n),
                AstKind::CatchClause => self.walk_catch(n),
                AstKind::Assign => self.walk_assign(n),
                AstKind::Unary => self.walk_unary(n),
                AstKind::Postfix => self.walk_postfix(n),
                AstKind::Call => self.walk_call(n),
                AstKind::FieldAccess => self.walk_field_access(n),
                _ => self.walk_all(n),
            },
        }
    }

    fn walk_all(&mut self, n: AstId) {
        for child in self.ast.node(n).children.clone() {
            self.walk_child(child);
        }
    }

    /// Bare identifier in value position: a read if it resolves.
    fn read_if_var(&mut self, t: TokenId) {
        if self.is_ident(t) {
            if let Some(var) = self.resolve(&self.token(t).text) {
                self.record(t, var, OccKind::Read);
            }
        }
    }

    // ---- declarations and scopes ---------------------------------------

    fn walk_class(&mut self, n: AstId) {
        self.scopes.push(BTreeMap::new());
        // Fields are visible throughout the class body, including in members
        // that appear before the declaration.
        if let Some(body) = self.ast.node(n).children.iter().find_map(|c| match c {
            AstChild::Node(b) if self.ast.node(*b).kind == AstKind::ClassBody => Some(*b),
            _ => None,
        }) {
            for member in self.ast.child_nodes(body) {
                if self.ast.node(member).kind == AstKind::FieldDecl {
                    let ty = self
                        .first_type_ref(member)
                        .map(|t| type_text(self.ast, self.tokens, t))
                        .unwrap_or_default();
                    for d in self.ast.child_nodes(member) {
                        if self.ast.node(d).kind == AstKind::VarDeclarator {
                            if let Some(name_tok) = self.first_ident_token(d) {
                                let name = self.token(name_tok).text.clone();
                                self.declare(&name, ty.clone());
                            }
                        }
                    }
                }
            }
        }
        // Skip the class name token; everything else walks normally.
        for child in self.ast.node(n).children.clone() {
            if let AstChild::Token(t) = child {
                if self.is_ident(t) {
                    continue;
                }
            }
            self.walk_child(child);
        }
        self.scopes.pop();
    }

    fn walk_method(&mut self, n: AstId) {
        self.scopes.push(BTreeMap::new());
        for child in self.ast.node(n).children.clone() {
            if let AstChild::Token(t) = child {
                if self.is_ident(t) {
                    continue; // method name
                }
            }
            self.walk_child(child);
        }
        self.scopes.pop();
    }

    fn walk_param(&mut self, n: AstId) {
        let ty = self
            .first_type_ref(n)
            .map(|t| type_text(self.ast, self.tokens, t))
            .unwrap_or_default();
        if let Some(name_tok) = self.first_ident_token(n) {
            let name = self.token(name_tok).text.clone();
            let var = self.declare(&name, ty);
            self.record(name_tok, var, OccKind::Decl);
        }
    }

    fn walk_field(&mut self, n: AstId) {
        for d in self.ast.child_nodes(n) {
            if self.ast.node(d).kind == AstKind::VarDeclarator {
                self.walk_declarator(d, None);
            }
        }
    }

    fn walk_local_decl(&mut self, n: AstId) {
        let ty = self
            .first_type_ref(n)
            .map(|t| type_text(self.ast, self.tokens, t))
            .unwrap_or_default();
        for child in self.ast.node(n).children.clone() {
            if let AstChild::Node(d) = child {
                if self.ast.node(d).kind == AstKind::VarDeclarator {
                    self.walk_declarator(d, Some(ty.clone()));
                }
            }
        }
    }

    /// `declare_type`: Some for locals (declare now), None for fields
    /// (already declared during the class pre-scan).
    fn walk_declarator(&mut self, d: AstId, declare_type: Option<String>) {
        let Some(name_tok) = self.first_ident_token(d) else { return };
        let name = self.token(name_tok).text.clone();
        let var = match declare_type {
            Some(ty) => self.declare(&name, ty),
            None => match self.resolve(&name) {
                Some(v) => v,
                None => return,
            },
        };
        self.record(name_tok, var, OccKind::Decl);
        let mut past_name = false;
        for child in self.ast.node(d).children.clone() {
            match child {
                AstChild::Token(t) if t == name_tok => past_name = true,
                _ if past_name => self.walk_child(child),
                _ => {}
            }
        }
    }

    fn walk_scoped(&mut self, n: AstId) {
        self.scopes.push(BTreeMap::new());
        self.walk_all(n);
        self.scopes.pop();
    }

    fn walk_foreach(&mut self, n: AstId) {
        self.scopes.push(BTreeMap::new());
        let ty = self
            .first_type_ref(n)
            .map(|t| type_text(self.ast, self.tokens, t))
            .unwrap_or_default();
        let name_tok = self.first_ident_token(n);
        if let Some(tok) = name_tok {
            let name = self.token(tok).text.clone();
            let var = self.declare(&name, ty);
            self.record(tok, var, OccKind::Decl);
        }
        for child in self.ast.node(n).children.clone() {
            if let AstChild::Token(t) = child {
                if Some(t) == name_tok {
                    continue;
                }
            }
            self.walk_child(child);
        }
        self.scopes.pop();
    }

    fn walk_catch(&mut self, n: AstId) {
        self.scopes.push(BTreeMap::new());
        let ty = self
            .type_refs(n)
            .iter()
            .map(|&t| type_text(self.ast, self.tokens, t))
            .collect::<Vec<_>>()
            .join("|");
        let name_tok = self.first_ident_token(n);
        if let Some(tok) = name_tok {
            let name = self.token(tok).text.clone();
            let var = self.declare(&name, ty);
            self.record(tok, var, OccKind::Decl);
        }
        for child in self.ast.node(n).children.clone() {
            if let AstChild::Token(t) = child {
                if Some(t) == name_tok {
                    continue;
                }
            }
            self.walk_child(child);
        }
        self.scopes.pop();
    }

    // ---- expressions ---------------------------------------------------

    fn walk_assign(&mut self, n: AstId) {
        let children = self.ast.node(n).children.clone();
        let mut iter = children.into_iter();
        if let Some(lhs) = iter.next() {
            self.walk_lvalue(lhs);
        }
        for child in iter {
            self.walk_child(child);
        }
    }

    /// Assignment target: a bare identifier is a write; through field or
    /// array accesses only the reached sub-expressions are reads.
    fn walk_lvalue(&mut self, child: AstChild) {
        match child {
            AstChild::Token(t) => {
                if self.is_ident(t) {
                    if let Some(var) = self.resolve(&self.token(t).text) {
                        self.record(t, var, OccKind::Write);
                    }
                }
            }
            AstChild::Node(n) => match self.ast.node(n).kind {
                AstKind::Paren => {
                    for c in self.ast.node(n).children.clone() {
                        if matches!(c, AstChild::Node(_)) {
                            self.walk_lvalue(c);
                        }
                    }
                }
                _ => self.walk_child(AstChild::Node(n)),
            },
        }
    }

    fn walk_unary(&mut self, n: AstId) {
        let children = self.ast.node(n).children.clone();
        let mutating = children.iter().any(|c| {
            matches!(c, AstChild::Token(t)
                if matches!(self.token(*t).text.as_str(), "++" | "--"))
        });
        for child in children {
            if mutating {
                self.walk_lvalue(child);
            } else {
                self.walk_child(child);
            }
        }
    }

    fn walk_postfix(&mut self, n: AstId) {
        for child in self.ast.node(n).children.clone() {
            self.walk_lvalue(child);
        }
    }

    fn walk_call(&mut self, n: AstId) {
        let children = self.ast.node(n).children.clone();
        let name_tok = call_name_token(self.ast, self.tokens, n);
        for child in children {
            if let AstChild::Token(t) = child {
                if Some(t) == name_tok {
                    continue;
                }
            }
            self.walk_child(child);
        }
    }

    fn walk_field_access(&mut self, n: AstId) {
        // Last identifier token is the member name; the receiver side walks
        // normally.
        let children = self.ast.node(n).children.clone();
        let member = children.iter().rev().find_map(|c| match c {
            AstChild::Token(t) if self.is_ident(*t) => Some(*t),
            _ => None,
        });
        for child in children {
            if let AstChild::Token(t) = child {
                if Some(t) == member {
                    continue;
                }
            }
            self.walk_child(child);
        }
    }
}

/// The identifier token naming the called method: the last identifier token
/// child before the argument list.
pub fn call_name_token(ast: &Ast, tokens: &[SourceToken], call: AstId) -> Option<TokenId> {
    let children = &ast.node(call).children;
    let arg_idx = children.iter().position(|c| {
        matches!(c, AstChild::Node(n) if ast.node(*n).kind == AstKind::ArgList)
    })?;
    children[..arg_idx].iter().rev().find_map(|c| match c {
        AstChild::Token(t) if tokens[*t as usize].kind == TokenKind::Identifier => Some(*t),
        _ => None,
    })
}

/// Expression roots of a call's arguments, in order.
pub fn call_args(ast: &Ast, tokens: &[SourceToken], call: AstId) -> Vec<AstChild> {
    let Some(arglist) = ast.node(call).children.iter().find_map(|c| match c {
        AstChild::Node(n) if ast.node(*n).kind == AstKind::ArgList => Some(*n),
        _ => None,
    }) else {
        return Vec::new();
    };
    ast.node(arglist)
        .children
        .iter()
        .filter(|c| match c {
            AstChild::Node(_) => true,
            AstChild::Token(t) => {
                let tok = &tokens[*t as usize];
                !tok.is_comment() && !matches!(tok.text.as_str(), "(" | ")" | ",")
            }
        })
        .copied()
        .collect()
}

// ---- guards ------------------------------------------------------------

fn collect_guards(ast: &Ast, tokens: &[SourceToken], out: &mut Analysis) {
    let occ_tokens: std::collections::BTreeSet<TokenId> =
        out.occurrences.iter().map(|o| o.token).collect();
    let mut stack: Vec<(AstChild, bool)> = Vec::new();
    guard_walk(ast, tokens, ast.root, &occ_tokens, &mut stack, &mut out.guards);
}

fn direct_token_pos(ast: &Ast, tokens: &[SourceToken], n: AstId, text: &str) -> Option<usize> {
    ast.node(n).children.iter().position(|c| {
        matches!(c, AstChild::Token(t) if tokens[*t as usize].text == text)
    })
}

fn significant_child_between(
    ast: &Ast,
    tokens: &[SourceToken],
    n: AstId,
    lo: usize,
    hi: usize,
) -> Option<AstChild> {
    ast.node(n).children[lo + 1..hi].iter().copied().find(|c| match c {
        AstChild::Node(_) => true,
        AstChild::Token(t) => !tokens[*t as usize].is_comment(),
    })
}

/// Condition expression of an if/while/do-while: the child between the
/// statement's own parentheses.
pub fn condition_child(ast: &Ast, tokens: &[SourceToken], n: AstId) -> Option<AstChild> {
    let lo = direct_token_pos(ast, tokens, n, "(")?;
    let hi = ast.node(n).children[lo..]
        .iter()
        .position(|c| matches!(c, AstChild::Token(t) if tokens[*t as usize].text == ")"))?
        + lo;
    significant_child_between(ast, tokens, n, lo, hi)
}

/// Condition of a classic for statement, if present: the child between the
/// init terminator and the second header semicolon.
pub fn for_condition_child(ast: &Ast, tokens: &[SourceToken], n: AstId) -> Option<AstChild> {
    let children = &ast.node(n).children;
    let semi_positions: Vec<usize> = children
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            AstChild::Token(t) if tokens[*t as usize].text == ";" => Some(i),
            _ => None,
        })
        .collect();
    let decl_init = children.iter().position(|c| {
        matches!(c, AstChild::Node(d) if ast.node(*d).kind == AstKind::LocalVarDecl)
    });
    let (lo, hi) = match decl_init {
        Some(d) => (d, *semi_positions.first()?),
        None => (*semi_positions.first()?, *semi_positions.get(1)?),
    };
    significant_child_between(ast, tokens, n, lo, hi)
}

/// First node child after the given child position.
fn node_child_after(ast: &Ast, n: AstId, pos: usize) -> Option<AstChild> {
    ast.node(n).children[pos + 1..]
        .iter()
        .copied()
        .find(|c| matches!(c, AstChild::Node(_)))
}

fn guard_walk(
    ast: &Ast,
    tokens: &[SourceToken],
    n: AstId,
    occ_tokens: &std::collections::BTreeSet<TokenId>,
    stack: &mut Vec<(AstChild, bool)>,
    guards: &mut Vec<GuardEdge>,
) {
    let emit_tokens =
        |child: AstChild, stack: &[(AstChild, bool)], guards: &mut Vec<GuardEdge>| {
            if let AstChild::Token(t) = child {
                if occ_tokens.contains(&t) {
                    for &(condition, negated) in stack {
                        guards.push(GuardEdge { token: t, condition, negated });
                    }
                }
            }
        };

    let walk_under = |child: AstChild,
                          stack: &mut Vec<(AstChild, bool)>,
                          guards: &mut Vec<GuardEdge>| match child {
        AstChild::Node(c) => guard_walk(ast, tokens, c, occ_tokens, stack, guards),
        tok => emit_tokens(tok, stack, guards),
    };

    match ast.node(n).kind {
        AstKind::IfStmt => {
            let cond = condition_child(ast, tokens, n);
            if let Some(c) = cond {
                walk_under(c, stack, guards);
            }
            let close = direct_token_pos(ast, tokens, n, ")");
            let then_branch = close.and_then(|p| node_child_after(ast, n, p));
            if let (Some(cond), Some(branch)) = (cond, then_branch) {
                stack.push((cond, false));
                walk_under(branch, stack, guards);
                stack.pop();
            }
            let else_pos = direct_token_pos(ast, tokens, n, "else");
            let else_branch = else_pos.and_then(|p| node_child_after(ast, n, p));
            if let (Some(cond), Some(branch)) = (cond, else_branch) {
                stack.push((cond, true));
                walk_under(branch, stack, guards);
                stack.pop();
            }
        }
        AstKind::WhileStmt | AstKind::DoWhileStmt => {
            let cond = condition_child(ast, tokens, n);
            let body = match ast.node(n).kind {
                AstKind::WhileStmt => direct_token_pos(ast, tokens, n, ")")
                    .and_then(|p| node_child_after(ast, n, p)),
                _ => ast.node(n).children.iter().copied().find(|c| matches!(c, AstChild::Node(_))),
            };
            if let Some(c) = cond {
                walk_under(c, stack, guards);
            }
            if let (Some(cond), Some(b)) = (cond, body) {
                stack.push((cond, false));
                walk_under(b, stack, guards);
                stack.pop();
            }
        }
        AstKind::ForStmt => {
            let cond = for_condition_child(ast, tokens, n);
            let close = direct_token_pos(ast, tokens, n, ")");
            let body = close.and_then(|p| node_child_after(ast, n, p));
            for child in ast.node(n).children.clone() {
                if Some(child) == body {
                    continue;
                }
                walk_under(child, stack, guards);
            }
            if let Some(b) = body {
                if let Some(cond) = cond {
                    stack.push((cond, false));
                    walk_under(b, stack, guards);
                    stack.pop();
                } else {
                    walk_under(b, stack, guards);
                }
            }
        }
        _ => {
            for child in ast.node(n).children.clone() {
                walk_under(child, stack, guards);
            }
        }
    }
}

// ---- calls and returns -------------------------------------------------

fn collect_calls(ast: &Ast, tokens: &[SourceToken], out: &mut Analysis) {
    // Method declarations by (name, arity); the first declaration wins.
    let mut decls: BTreeMap<(String, usize), Vec<TokenId>> = BTreeMap::new();
    for node in &ast.nodes {
        if node.kind != AstKind::MethodDecl {
            continue;
        }
        let Some(name_tok) = node.children.iter().find_map(|c| match c {
            AstChild::Token(t) if tokens[*t as usize].kind == TokenKind::Identifier => Some(*t),
            _ => None,
        }) else {
            continue;
        };
        let Some(params) = node.children.iter().find_map(|c| match c {
            AstChild::Node(p) if ast.node(*p).kind == AstKind::ParamList => Some(*p),
            _ => None,
        }) else {
            continue;
        };
        let param_names: Vec<TokenId> = ast
            .child_nodes(params)
            .into_iter()
            .filter(|&p| ast.node(p).kind == AstKind::Param)
            .filter_map(|p| {
                ast.node(p).children.iter().find_map(|c| match c {
                    AstChild::Token(t)
                        if tokens[*t as usize].kind == TokenKind::Identifier =>
                    {
                        Some(*t)
                    }
                    _ => None,
                })
            })
            .collect();
        let name = tokens[name_tok as usize].text.clone();
        decls.entry((name, param_names.len())).or_insert(param_names);
    }

    for (id, node) in ast.nodes.iter().enumerate() {
        if node.kind != AstKind::Call {
            continue;
        }
        let id = id as AstId;
        let Some(name_tok) = call_name_token(ast, tokens, id) else { continue };
        let args = call_args(ast, tokens, id);
        let key = (tokens[name_tok as usize].text.clone(), args.len());
        match decls.get(&key) {
            Some(params) => {
                let matched: Vec<(AstChild, TokenId)> =
                    args.into_iter().zip(params.iter().copied()).collect();
                out.calls.push(CallMatch { args: matched });
            }
            None => out.unresolved_calls += 1,
        }
    }
}

fn collect_returns(ast: &Ast, tokens: &[SourceToken], out: &mut Analysis) {
    // Arena order is creation order, so for each return statement the
    // innermost enclosing method is found by a containment walk from each
    // method; the subset has no methods nested inside methods.
    for (mid, mnode) in ast.nodes.iter().enumerate() {
        if mnode.kind != AstKind::MethodDecl {
            continue;
        }
        let mut stack: Vec<AstId> = vec![mid as AstId];
        while let Some(cur) = stack.pop() {
            for child in ast.child_nodes(cur) {
                match ast.node(child).kind {
                    AstKind::ReturnStmt => {
                        let kw = ast.node(child).children.iter().find_map(|c| match c {
                            AstChild::Token(t) if tokens[*t as usize].text == "return" => {
                                Some(*t)
                            }
                            _ => None,
                        });
                        if let Some(t) = kw {
                            out.returns.push(ReturnSite { token: t, method: mid as AstId });
                        }
                        stack.push(child);
                    }
                    AstKind::MethodDecl => {}
                    _ => stack.push(child),
                }
            }
        }
    }
}
