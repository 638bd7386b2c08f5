use std::fmt;

use super::diag::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Type,
    Interface,
    Contract,
    Component,
    Publication,
    Architecture,
    Link,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "type" => Keyword::Type,
            "interface" => Keyword::Interface,
            "contract" => Keyword::Contract,
            "component" => Keyword::Component,
            "publication" => Keyword::Publication,
            "architecture" => Keyword::Architecture,
            "link" => Keyword::Link,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Type => "type",
            Keyword::Interface => "interface",
            Keyword::Contract => "contract",
            Keyword::Component => "component",
            Keyword::Publication => "publication",
            Keyword::Architecture => "architecture",
            Keyword::Link => "link",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Question,
    Plus,
    Star,
    Pipe,
    Minus,
    Arrow,
    Subtype,
    /// Characters that start no valid token.
    Error(String),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Keyword(k) => return write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Str(_) => "string",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::Comma => "`,`",
            TokenKind::Question => "`?`",
            TokenKind::Plus => "`+`",
            TokenKind::Star => "`*`",
            TokenKind::Pipe => "`|`",
            TokenKind::Minus => "`-`",
            TokenKind::Arrow => "`->`",
            TokenKind::Subtype => "`<:`",
            TokenKind::Error(text) => return write!(f, "invalid input `{text}`"),
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.text[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            offset: self.offset,
            line: self.line,
            column: self.column,
            len: 0,
        }
    }

    fn close(&self, start: Span) -> Span {
        Span {
            len: self.offset - start.offset,
            ..start
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_invalid(c: char) -> bool {
    !(c.is_whitespace() || is_ident_start(c) || "{}()[];:,?+*|-<\"/".contains(c))
}

/// Splits ADL or protocol text into tokens. Whitespace and `//` comments are
/// skipped; anything unrecognised becomes an [`TokenKind::Error`] token so
/// the parser can report it with a position.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut cur = Cursor {
        text,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = cur.here();
        if c == '/' && cur.peek2() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let kind = if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            let word = &text[start.offset..cur.offset];
            match Keyword::from_word(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c == '"' {
            lex_string(&mut cur)
        } else {
            cur.bump();
            match (c, cur.peek()) {
                ('-', Some('>')) => {
                    cur.bump();
                    TokenKind::Arrow
                }
                ('<', Some(':')) => {
                    cur.bump();
                    TokenKind::Subtype
                }
                ('{', _) => TokenKind::LBrace,
                ('}', _) => TokenKind::RBrace,
                ('(', _) => TokenKind::LParen,
                (')', _) => TokenKind::RParen,
                ('[', _) => TokenKind::LBracket,
                (']', _) => TokenKind::RBracket,
                (';', _) => TokenKind::Semi,
                (':', _) => TokenKind::Colon,
                (',', _) => TokenKind::Comma,
                ('?', _) => TokenKind::Question,
                ('+', _) => TokenKind::Plus,
                ('*', _) => TokenKind::Star,
                ('|', _) => TokenKind::Pipe,
                ('-', _) => TokenKind::Minus,
                _ => {
                    // Group a run of junk into one error token.
                    while cur.peek().is_some_and(is_invalid) {
                        cur.bump();
                    }
                    TokenKind::Error(text[start.offset..cur.offset].to_string())
                }
            }
        };
        tokens.push(Token {
            kind,
            span: cur.close(start),
        });
    }
    tokens
}

fn lex_string(cur: &mut Cursor<'_>) -> TokenKind {
    let start = cur.offset;
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => {
                return TokenKind::Error(cur.text[start..cur.offset].to_string());
            }
            Some('"') => {
                cur.bump();
                return TokenKind::Str(value);
            }
            Some('\\') => {
                cur.bump();
                match cur.bump() {
                    Some('n') => value.push('\n'),
                    Some('t') => value.push('\t'),
                    Some(c @ ('"' | '\\')) => value.push(c),
                    _ => return TokenKind::Error(cur.text[start..cur.offset].to_string()),
                }
            }
            Some(c) => {
                cur.bump();
                value.push(c);
            }
        }
    }
}

/// Quotes `s` so that [`tokenize`] reads it back as the same string.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn smallest_interface() {
        assert_eq!(
            kinds("interface ManageDocuments { }"),
            vec![
                TokenKind::Keyword(Keyword::Interface),
                TokenKind::Ident("ManageDocuments".into()),
                TokenKind::LBrace,
                TokenKind::RBrace,
            ]
        );
    }

    #[test]
    fn junk_is_one_error_token() {
        let toks = tokenize("@@@");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, TokenKind::Error("@@@".into()));
        assert_eq!(toks[0].span.len, 3);
        assert_eq!(toks[0].span.column, 1);
    }

    #[test]
    fn morphism_arrows_and_subtypes() {
        assert_eq!(
            kinds("I1 -ext-> I2 Account <: Party"),
            vec![
                TokenKind::Ident("I1".into()),
                TokenKind::Minus,
                TokenKind::Ident("ext".into()),
                TokenKind::Arrow,
                TokenKind::Ident("I2".into()),
                TokenKind::Ident("Account".into()),
                TokenKind::Subtype,
                TokenKind::Ident("Party".into()),
            ]
        );
    }

    #[test]
    fn comments_and_spans() {
        let toks = tokenize("// header\n  ?viewDocument?setPreference");
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[1].span.line, 2);
        assert_eq!(toks[1].span.column, 4);
        assert_eq!(toks[1].span.len, "viewDocument".len());
    }

    #[test]
    fn strings_round_trip_through_quote() {
        let raw = "a \"quoted\" \\ value\n";
        assert_eq!(kinds(&quote(raw)), vec![TokenKind::Str(raw.into())]);
        assert!(matches!(kinds("\"open")[0], TokenKind::Error(_)));
    }

    #[test]
    fn unicode_junk_keeps_spans_on_char_boundaries() {
        let text = "type é€;";
        for t in tokenize(text) {
            assert!(text.get(t.span.offset..t.span.offset + t.span.len).is_some());
        }
    }
}
