//! Syntax tree for the Java subset.
//!
//! The tree is stored as an arena of nodes; leaves reference tokens by index.
//! Every token of the file, comments included, appears as exactly one leaf,
//! so an in-order walk of the leaves reproduces the token stream.

use super::lexer::SourceToken;

pub type AstId = u32;
pub type TokenId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AstChild {
    Node(AstId),
    Token(TokenId),
}

/// Production kinds emitted by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AstKind {
    CompilationUnit,
    PackageDecl,
    ImportDecl,
    Annotation,
    ClassDecl,
    ClassBody,
    FieldDecl,
    MethodDecl,
    ParamList,
    Param,
    Block,
    LocalVarDecl,
    VarDeclarator,
    ExprStmt,
    EmptyStmt,
    IfStmt,
    WhileStmt,
    DoWhileStmt,
    ForStmt,
    ForEachStmt,
    TryStmt,
    CatchClause,
    FinallyClause,
    ThrowStmt,
    ReturnStmt,
    BreakStmt,
    ContinueStmt,
    Assign,
    Binary,
    Unary,
    Postfix,
    Call,
    ArgList,
    FieldAccess,
    ArrayAccess,
    NewExpr,
    Paren,
    TypeRef,
}

#[derive(Debug, Clone)]
pub struct AstNode {
    pub kind: AstKind,
    pub children: Vec<AstChild>,
    /// True for wrapper nodes the parser synthesized (implicit blocks).
    pub synthetic: bool,
}

#[derive(Debug, Clone)]
pub struct Ast {
    pub nodes: Vec<AstNode>,
    pub root: AstId,
}

impl Ast {
    pub fn node(&self, id: AstId) -> &AstNode {
        &self.nodes[id as usize]
    }

    /// Token indices under `id`, in order.
    pub fn leaf_tokens(&self, id: AstId) -> Vec<TokenId> {
        let mut out = Vec::new();
        self.collect_leaves(id, &mut out);
        out
    }

    fn collect_leaves(&self, id: AstId, out: &mut Vec<TokenId>) {
        for child in &self.node(id).children {
            match child {
                AstChild::Token(t) => out.push(*t),
                AstChild::Node(n) => self.collect_leaves(*n, out),
            }
        }
    }

    /// In-order leaf walk of the whole tree.
    pub fn all_leaves(&self) -> Vec<TokenId> {
        self.leaf_tokens(self.root)
    }

    /// Byte span covered by the subtree, if it has any leaves.
    pub fn cover_span(&self, id: AstId, tokens: &[SourceToken]) -> Option<(u32, u32)> {
        let leaves = self.leaf_tokens(id);
        let first = leaves.first()?;
        let last = leaves.last()?;
        Some((tokens[*first as usize].span.0, tokens[*last as usize].span.1))
    }

    /// Ids of direct child nodes (skipping token leaves).
    pub fn child_nodes(&self, id: AstId) -> impl Iterator<Item = AstId> + '_ {
        self.node(id).children.iter().filter_map(|c| match c {
            AstChild::Node(n) => Some(*n),
            AstChild::Token(_) => None,
        })
    }

    /// First direct token child, if any.
    pub fn first_token(&self, id: AstId) -> Option<TokenId> {
        self.node(id).children.iter().find_map(|c| match c {
            AstChild::Token(t) => Some(*t),
            AstChild::Node(_) => None,
        })
    }
}
