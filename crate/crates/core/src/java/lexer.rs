//! Lexer for the supported Java subset.
//!
//! Tokens keep their byte spans so the original file can be reconstructed;
//! comments are emitted as single tokens rather than discarded.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Punct,
    Literal,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceToken {
    pub text: String,
    pub kind: TokenKind,
    pub span: (u32, u32),
}

impl SourceToken {
    pub fn is_comment(&self) -> bool {
        self.kind == TokenKind::Comment
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Primitive type keywords, recognized in type positions.
pub const PRIMITIVE_TYPES: &[&str] =
    &["boolean", "byte", "char", "double", "float", "int", "long", "short", "void"];

// Longest first so e.g. ">>=" wins over ">>" and ">".
const PUNCT: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->", "::", "{", "}", "(", ")", "[",
    "]", ";", ",", ".", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^",
    "%", "@",
];

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    fn err(&self, at: usize, message: impl Into<String>) -> CoreError {
        CoreError::Lex { offset: at, message: message.into() }
    }

    fn lex(&mut self) -> Result<Vec<SourceToken>> {
        let mut tokens = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
                continue;
            }
            let start = self.pos;
            let token = if c == b'/' && self.peek2() == Some(b'/') {
                self.line_comment(start)
            } else if c == b'/' && self.peek2() == Some(b'*') {
                self.block_comment(start)?
            } else if c == b'"' {
                self.string_literal(start)?
            } else if c == b'\'' {
                self.char_literal(start)?
            } else if c.is_ascii_digit() {
                self.number(start)
            } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c >= 0x80 {
                self.word(start)
            } else {
                self.punct(start)?
            };
            tokens.push(token);
        }
        Ok(tokens)
    }

    fn make(&self, start: usize, kind: TokenKind) -> SourceToken {
        SourceToken {
            text: self.src[start..self.pos].to_string(),
            kind,
            span: (start as u32, self.pos as u32),
        }
    }

    fn line_comment(&mut self, start: usize) -> SourceToken {
        while let Some(c) = self.peek() {
            if c == b'\n' {
                break;
            }
            self.pos += 1;
        }
        self.make(start, TokenKind::Comment)
    }

    fn block_comment(&mut self, start: usize) -> Result<SourceToken> {
        self.pos += 2;
        loop {
            match self.peek() {
                None => return Err(self.err(start, "unterminated block comment")),
                Some(b'*') if self.peek2() == Some(b'/') => {
                    self.pos += 2;
                    return Ok(self.make(start, TokenKind::Comment));
                }
                _ => self.pos += 1,
            }
        }
    }

    fn string_literal(&mut self, start: usize) -> Result<SourceToken> {
        self.pos += 1;
        loop {
            match self.peek() {
                None | Some(b'\n') => return Err(self.err(start, "unterminated string literal")),
                Some(b'\\') => self.pos += 2,
                Some(b'"') => {
                    self.pos += 1;
                    return Ok(self.make(start, TokenKind::Literal));
                }
                _ => self.pos += 1,
            }
        }
    }

    fn char_literal(&mut self, start: usize) -> Result<SourceToken> {
        self.pos += 1;
        loop {
            match self.peek() {
                None | Some(b'\n') => return Err(self.err(start, "unterminated char literal")),
                Some(b'\\') => self.pos += 2,
                Some(b'\'') => {
                    self.pos += 1;
                    return Ok(self.make(start, TokenKind::Literal));
                }
                _ => self.pos += 1,
            }
        }
    }

    fn number(&mut self, start: usize) -> SourceToken {
        while let Some(c) = self.peek() {
            // Covers ints, floats, hex, underscores and suffixes (0xFF, 1_000, 2.5f, 1e9).
            if c.is_ascii_alphanumeric() || c == b'.' || c == b'_' {
                if c == b'.' && !matches!(self.peek2(), Some(d) if d.is_ascii_digit()) {
                    break;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
        self.make(start, TokenKind::Literal)
    }

    fn word(&mut self, start: usize) -> SourceToken {
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'$' || c >= 0x80 {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        let kind = if is_keyword(text) { TokenKind::Keyword } else { TokenKind::Identifier };
        self.make(start, kind)
    }

    fn punct(&mut self, start: usize) -> Result<SourceToken> {
        let rest = &self.src[self.pos..];
        for p in PUNCT {
            if rest.starts_with(p) {
                self.pos += p.len();
                return Ok(self.make(start, TokenKind::Punct));
            }
        }
        Err(self.err(start, format!("unexpected character {:?}", rest.chars().next().unwrap())))
    }
}

/// Tokenizes Java source. Whitespace is dropped; everything else survives.
pub fn tokenize(source: &str) -> Result<Vec<SourceToken>> {
    Lexer { src: source, bytes: source.as_bytes(), pos: 0 }.lex()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize(src).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn simple_declaration() {
        assert_eq!(texts("int i;"), vec!["int", "i", ";"]);
    }

    #[test]
    fn line_comment_is_single_token() {
        assert_eq!(texts("i = 9; // done"), vec!["i", "=", "9", ";", "// done"]);
    }

    #[test]
    fn unterminated_string_is_lex_error() {
        let err = tokenize("\"unclosed").unwrap_err();
        assert!(matches!(err, CoreError::Lex { offset: 0, .. }), "{err}");
    }

    #[test]
    fn unterminated_block_comment() {
        assert!(tokenize("/* nope").is_err());
    }

    #[test]
    fn spans_reconstruct_source() {
        let src = "int  x = compute(a,\n\tb); // trailing\n";
        let toks = tokenize(src).unwrap();
        for t in &toks {
            assert_eq!(&src[t.span.0 as usize..t.span.1 as usize], t.text);
        }
        // Gaps between consecutive tokens are pure whitespace.
        let mut prev_end = 0usize;
        for t in &toks {
            assert!(src[prev_end..t.span.0 as usize].chars().all(char::is_whitespace));
            prev_end = t.span.1 as usize;
        }
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(texts("a >= b && c++"), vec!["a", ">=", "b", "&&", "c", "++"]);
    }

    #[test]
    fn string_with_escapes_and_braces() {
        let toks = texts(r#"LOG.info("Args[{}]:{}", argNb, arg);"#);
        // The format string is one literal token, braces and all.
        assert_eq!(toks.len(), 11);
        assert_eq!(toks[4], "\"Args[{}]:{}\"");
    }
}
