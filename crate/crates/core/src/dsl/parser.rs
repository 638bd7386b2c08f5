use std::collections::BTreeSet;

use super::ast::*;
use super::diag::{Diagnostic, Span};
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::protocol::ProtocolExpr;

const MAX_NESTING: usize = 200;
/// Operands in one flat operator chain; longer chains build trees too deep
/// to walk recursively.
const MAX_CHAIN: usize = 4096;

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: Span,
    open_blocks: Vec<Span>,
    nesting: usize,
}

impl Parser {
    fn new(text: &str, tokens: Vec<Token>) -> Self {
        let end = match tokens.last() {
            Some(t) => Span {
                offset: t.span.offset + t.span.len,
                line: t.span.line,
                column: t.span.column + text[t.span.offset..t.span.offset + t.span.len].chars().count() as u32,
                len: 0,
            },
            None => Span {
                offset: 0,
                line: 1,
                column: 1,
                len: 0,
            },
        };
        Parser {
            tokens,
            pos: 0,
            end,
            open_blocks: Vec::new(),
            nesting: 0,
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map_or(self.end, |t| t.span)
    }

    fn prev_span(&self) -> Span {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map_or(self.end, |t| t.span)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(w)) if w == word)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.at(&TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Span {
        let span = self.span();
        self.pos += 1;
        span
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Diagnostic {
        if self.peek().is_none() {
            if let Some(open) = self.open_blocks.last() {
                return Diagnostic::error("unclosed-block", *open, "unclosed block");
            }
        }
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        let set: BTreeSet<&str> = expected.iter().copied().collect();
        let list: Vec<&str> = set.into_iter().collect();
        let message = if list.len() == 1 {
            format!("expected {}, found {found}", list[0])
        } else {
            format!("expected one of {}, found {found}", list.join(", "))
        };
        Diagnostic::error("syntax", self.span(), message)
    }

    fn expect(&mut self, kind: TokenKind, name: &str) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Span> {
        if self.at_word(word) {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{}`", kw.as_str())]))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                let span = self.bump();
                Ok(Ident { name, span })
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["string"])),
        }
    }

    fn open(&mut self) -> PResult<()> {
        let span = self.expect(TokenKind::LBrace, "`{`")?;
        self.open_blocks.push(span);
        Ok(())
    }

    fn close(&mut self) -> PResult<()> {
        self.expect(TokenKind::RBrace, "`}`")?;
        self.open_blocks.pop();
        Ok(())
    }

    fn block_done(&self) -> bool {
        self.peek().is_none() || self.at(&TokenKind::RBrace)
    }

    fn unit(&mut self) -> PResult<SyntaxTree> {
        let mut declarations = Vec::new();
        while let Some(kind) = self.peek() {
            let decl = match kind {
                TokenKind::Keyword(Keyword::Type) => Decl::Type(self.type_decl()?),
                TokenKind::Keyword(Keyword::Interface) => Decl::Interface(self.interface()?),
                TokenKind::Keyword(Keyword::Contract) => Decl::Contract(self.contract()?),
                TokenKind::Keyword(Keyword::Component) => {
                    self.bump();
                    Decl::Component(self.component_body()?)
                }
                TokenKind::Keyword(Keyword::Publication) => {
                    self.bump();
                    Decl::Publication(self.component_body()?)
                }
                TokenKind::Keyword(Keyword::Architecture) => Decl::Architecture(self.architecture()?),
                TokenKind::Keyword(Keyword::Link) => Decl::Link(self.link()?),
                _ => {
                    return Err(self.error(&[
                        "`type`",
                        "`interface`",
                        "`contract`",
                        "`component`",
                        "`publication`",
                        "`architecture`",
                        "`link`",
                    ]))
                }
            };
            declarations.push(decl);
        }
        Ok(SyntaxTree { declarations })
    }

    fn type_decl(&mut self) -> PResult<TypeDeclNode> {
        let start = self.expect_keyword(Keyword::Type)?;
        let name = self.ident()?;
        let supertype = if self.eat(&TokenKind::Subtype) {
            Some(self.ident()?)
        } else {
            None
        };
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(TypeDeclNode {
            name,
            supertype,
            span: start.to(self.prev_span()),
        })
    }

    fn interface(&mut self) -> PResult<InterfaceNode> {
        let start = self.expect_keyword(Keyword::Interface)?;
        let name = self.ident()?;
        let extends = if self.at_word("extends") {
            self.bump();
            Some(self.ident()?)
        } else {
            None
        };
        self.open()?;
        let mut members = Vec::new();
        while !self.block_done() {
            let is_field = self.at_word("field") && matches!(self.peek_at(1), Some(TokenKind::Ident(_)));
            if is_field {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Colon, "`:`")?;
                let ty = self.ident()?;
                self.expect(TokenKind::Semi, "`;`")?;
                members.push(Member::Field(FieldNode { name, ty }));
            } else {
                members.push(Member::Method(self.method()?));
            }
        }
        self.close()?;
        Ok(InterfaceNode {
            name,
            extends,
            members,
            span: start.to(self.prev_span()),
        })
    }

    fn method(&mut self) -> PResult<MethodNode> {
        let name = self.ident()?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let pname = self.ident()?;
                self.expect(TokenKind::Colon, "`:`")?;
                let ty = self.ident()?;
                params.push(ParamNode { name: pname, ty });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        let ret = if self.eat(&TokenKind::Colon) {
            Some(self.ident()?)
        } else {
            None
        };
        let mut annotations = Vec::new();
        if self.eat(&TokenKind::LBracket) {
            while !self.at(&TokenKind::RBracket) {
                let key_span = self.span();
                let key = match self.peek() {
                    Some(TokenKind::Ident(w)) => AnnotationKey::from_word(w),
                    _ => None,
                };
                let Some(key) = key else {
                    return Err(self.error(&["`guard`", "`pre`", "`post`", "`design`", "`]`"]));
                };
                if annotations.iter().any(|a: &Annotation| a.key == key) {
                    return Err(Diagnostic::error(
                        "duplicate-annotation",
                        key_span,
                        format!("duplicate `{}` annotation", key.as_str()),
                    ));
                }
                self.bump();
                self.expect(TokenKind::Colon, "`:`")?;
                let text = self.string()?;
                annotations.push(Annotation {
                    key,
                    text,
                    span: key_span.to(self.prev_span()),
                });
            }
            self.bump();
        }
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(MethodNode {
            span: name.span.to(self.prev_span()),
            name,
            params,
            ret,
            annotations,
        })
    }

    fn contract(&mut self) -> PResult<ContractNode> {
        let start = self.expect_keyword(Keyword::Contract)?;
        let name = self.ident()?;
        self.expect_word("implements")?;
        let implements = self.ident()?;
        self.open()?;
        let mut init = None;
        if self.at_word("init") {
            self.bump();
            self.open()?;
            init = Some(self.string()?);
            self.close()?;
        }
        let mut methods = Vec::new();
        while self.at_word("method") {
            self.bump();
            methods.push(self.method()?);
        }
        let protocol = if self.at_word("protocol") {
            self.bump();
            Some(self.protocol_block()?)
        } else {
            None
        };
        if !self.at(&TokenKind::RBrace) {
            let mut expected = vec!["`method`", "`protocol`", "`}`"];
            if protocol.is_some() {
                expected = vec!["`}`"];
            } else if init.is_none() && methods.is_empty() {
                expected.push("`init`");
            }
            return Err(self.error(&expected));
        }
        self.close()?;
        Ok(ContractNode {
            name,
            implements,
            init,
            methods,
            protocol,
            span: start.to(self.prev_span()),
        })
    }

    fn component_body(&mut self) -> PResult<ComponentNode> {
        let start = self.prev_span();
        let name = self.ident()?;
        self.open()?;
        self.expect_word("provided")?;
        self.expect_keyword(Keyword::Contract)?;
        let provided = self.ident()?;
        self.eat(&TokenKind::Semi);
        let internal = if self.at_word("internal") {
            self.bump();
            self.expect_keyword(Keyword::Interface)?;
            let i = self.ident()?;
            self.eat(&TokenKind::Semi);
            Some(i)
        } else {
            None
        };
        let required = if self.at_word("required") {
            self.bump();
            let kind = if self.at_keyword(Keyword::Interface) {
                RequiredKind::Interface
            } else if self.at_keyword(Keyword::Contract) {
                RequiredKind::Contract
            } else {
                return Err(self.error(&["`interface`", "`contract`"]));
            };
            self.bump();
            let name = self.ident()?;
            self.eat(&TokenKind::Semi);
            Some(RequiredNode { kind, name })
        } else {
            None
        };
        let causal = if self.at_word("causal") {
            self.bump();
            Some(self.protocol_block()?)
        } else {
            None
        };
        if !self.at(&TokenKind::RBrace) {
            let mut expected = vec!["`}`"];
            if causal.is_none() {
                expected.push("`causal`");
                if required.is_none() {
                    expected.push("`required`");
                    if internal.is_none() {
                        expected.push("`internal`");
                    }
                }
            }
            return Err(self.error(&expected));
        }
        self.close()?;
        Ok(ComponentNode {
            name,
            provided,
            internal,
            required,
            causal,
            span: start.to(self.prev_span()),
        })
    }

    fn architecture(&mut self) -> PResult<ArchNode> {
        let start = self.expect_keyword(Keyword::Architecture)?;
        let kind = if self.at_word("business") {
            ArchKind::Business
        } else if self.at_word("application") {
            ArchKind::Application
        } else {
            return Err(self.error(&["`business`", "`application`"]));
        };
        self.bump();
        let name = self.ident()?;
        self.open()?;
        let mut objects = Vec::new();
        let mut morphisms = Vec::new();
        while !self.block_done() {
            if self.at_word("object") {
                self.bump();
                objects.push(self.ident()?);
                self.expect(TokenKind::Semi, "`;`")?;
            } else if self.at_word("morphism") {
                let mstart = self.bump();
                let src = self.ident()?;
                self.expect(TokenKind::Minus, "`-`")?;
                let kind = self.ident()?;
                self.expect(TokenKind::Arrow, "`->`")?;
                let dst = self.ident()?;
                self.expect(TokenKind::Semi, "`;`")?;
                morphisms.push(MorphismNode {
                    src,
                    kind,
                    dst,
                    span: mstart.to(self.prev_span()),
                });
            } else {
                return Err(self.error(&["`object`", "`morphism`", "`}`"]));
            }
        }
        self.close()?;
        Ok(ArchNode {
            kind,
            name,
            objects,
            morphisms,
            span: start.to(self.prev_span()),
        })
    }

    fn link(&mut self) -> PResult<LinkNode> {
        let start = self.expect_keyword(Keyword::Link)?;
        let name = self.ident()?;
        self.expect_word("from")?;
        let from = self.ident()?;
        self.expect_word("to")?;
        let to = self.ident()?;
        self.open()?;
        let mut maps = Vec::new();
        let mut generators = Vec::new();
        while !self.block_done() {
            let target = if self.at_word("map") {
                &mut maps
            } else if self.at_word("generator") {
                &mut generators
            } else {
                return Err(self.error(&["`map`", "`generator`", "`}`"]));
            };
            self.pos += 1;
            let a = self.ident()?;
            self.expect(TokenKind::Arrow, "`->`")?;
            let b = self.ident()?;
            self.expect(TokenKind::Semi, "`;`")?;
            target.push((a, b));
        }
        self.close()?;
        Ok(LinkNode {
            name,
            from,
            to,
            maps,
            generators,
            span: start.to(self.prev_span()),
        })
    }

    fn protocol_block(&mut self) -> PResult<ProtocolNode> {
        self.open()?;
        let start = self.span();
        let expr = if self.at(&TokenKind::RBrace) {
            ProtocolExpr::Eps
        } else {
            self.proto_expr()?
        };
        let span = if self.at(&TokenKind::RBrace) && self.pos > 0 {
            start.to(self.prev_span())
        } else {
            start
        };
        self.close()?;
        Ok(ProtocolNode { expr, span })
    }

    fn proto_expr(&mut self) -> PResult<ProtocolExpr> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(Diagnostic::error(
                "nesting",
                self.span(),
                "protocol expression nested too deeply",
            ));
        }
        let r = self.proto_shuffle();
        self.nesting -= 1;
        r
    }

    fn chain_limit(&self, items: &[ProtocolExpr]) -> PResult<()> {
        if items.len() > MAX_CHAIN {
            return Err(Diagnostic::error("nesting", self.span(), "protocol expression too long"));
        }
        Ok(())
    }

    fn proto_shuffle(&mut self) -> PResult<ProtocolExpr> {
        let mut items = vec![self.proto_alt()?];
        while self.eat(&TokenKind::Pipe) {
            items.push(self.proto_alt()?);
            self.chain_limit(&items)?;
        }
        Ok(fold_right(items, ProtocolExpr::shuffle))
    }

    fn proto_alt(&mut self) -> PResult<ProtocolExpr> {
        let mut items = vec![self.proto_seq()?];
        while self.eat(&TokenKind::Plus) {
            items.push(self.proto_seq()?);
            self.chain_limit(&items)?;
        }
        Ok(fold_right(items, ProtocolExpr::alt))
    }

    fn proto_seq(&mut self) -> PResult<ProtocolExpr> {
        let mut items = vec![self.proto_rep()?];
        loop {
            let juxtaposed = self.at(&TokenKind::Question) || self.at(&TokenKind::LParen);
            if self.eat(&TokenKind::Semi) || juxtaposed {
                items.push(self.proto_rep()?);
            } else {
                break;
            }
            self.chain_limit(&items)?;
        }
        Ok(fold_right(items, ProtocolExpr::seq))
    }

    fn proto_rep(&mut self) -> PResult<ProtocolExpr> {
        let mut e = self.proto_atom()?;
        let mut stars = 0;
        while self.eat(&TokenKind::Star) {
            stars += 1;
            if stars > MAX_NESTING {
                return Err(Diagnostic::error("nesting", self.prev_span(), "too many repetition operators"));
            }
            e = ProtocolExpr::star(e);
        }
        Ok(e)
    }

    fn proto_atom(&mut self) -> PResult<ProtocolExpr> {
        if self.eat(&TokenKind::Question) {
            return Ok(ProtocolExpr::Ev(self.ident()?.name));
        }
        if self.eat(&TokenKind::LParen) {
            if self.eat(&TokenKind::RParen) {
                return Ok(ProtocolExpr::Eps);
            }
            let e = self.proto_expr()?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(e);
        }
        Err(self.error(&["`?`", "`(`"]))
    }
}

fn fold_right(mut items: Vec<ProtocolExpr>, f: fn(ProtocolExpr, ProtocolExpr) -> ProtocolExpr) -> ProtocolExpr {
    let mut acc = items.pop().expect("at least one operand");
    while let Some(prev) = items.pop() {
        acc = f(prev, acc);
    }
    acc
}

fn lex(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let tokens = tokenize(text);
    let bad: Vec<Diagnostic> = tokens
        .iter()
        .filter_map(|t| match &t.kind {
            TokenKind::Error(s) => Some(Diagnostic::error(
                "bad-token",
                t.span,
                format!("unexpected input `{s}`"),
            )),
            _ => None,
        })
        .collect();
    if bad.is_empty() {
        Ok(tokens)
    } else {
        Err(bad)
    }
}

/// Parses one ADL source text.
pub fn parse_text(text: &str) -> Result<SyntaxTree, Vec<Diagnostic>> {
    let tokens = lex(text)?;
    let mut parser = Parser::new(text, tokens);
    parser.unit().map_err(|d| vec![d])
}

/// Parses a standalone protocol expression. Events outside `alphabet`
/// produce warnings; `None` skips the check. Empty text is the empty word.
pub fn parse_protocol(
    text: &str,
    alphabet: Option<&BTreeSet<String>>,
) -> Result<(ProtocolExpr, Vec<Diagnostic>), Diagnostic> {
    let tokens = lex(text).map_err(|mut d| d.remove(0))?;
    let mut parser = Parser::new(text, tokens);
    if parser.peek().is_none() {
        return Ok((ProtocolExpr::Eps, Vec::new()));
    }
    let expr = parser.proto_expr()?;
    if parser.peek().is_some() {
        return Err(parser.error(&["`|`", "`+`", "`;`", "`*`", "`?`", "`(`", "end of input"]));
    }
    let mut warnings = Vec::new();
    if let Some(alphabet) = alphabet {
        // Re-scan for event spans so the warnings point at the events.
        let toks = &parser.tokens;
        for (i, t) in toks.iter().enumerate() {
            if t.kind != TokenKind::Question {
                continue;
            }
            if let Some(Token {
                kind: TokenKind::Ident(name),
                span,
            }) = toks.get(i + 1)
            {
                if !alphabet.contains(name) {
                    warnings.push(Diagnostic::warning(
                        "unknown-event",
                        *span,
                        format!("event `{name}` does not name a known method"),
                    ));
                }
            }
        }
    }
    Ok((expr, warnings))
}
