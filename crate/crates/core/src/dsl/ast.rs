use super::diag::Span;
use crate::protocol::ProtocolExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntaxTree {
    pub declarations: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Type(TypeDeclNode),
    Interface(InterfaceNode),
    Contract(ContractNode),
    Component(ComponentNode),
    Publication(ComponentNode),
    Architecture(ArchNode),
    Link(LinkNode),
}

impl Decl {
    pub fn name(&self) -> &Ident {
        match self {
            Decl::Type(d) => &d.name,
            Decl::Interface(d) => &d.name,
            Decl::Contract(d) => &d.name,
            Decl::Component(d) | Decl::Publication(d) => &d.name,
            Decl::Architecture(d) => &d.name,
            Decl::Link(d) => &d.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Decl::Type(d) => d.span,
            Decl::Interface(d) => d.span,
            Decl::Contract(d) => d.span,
            Decl::Component(d) | Decl::Publication(d) => d.span,
            Decl::Architecture(d) => d.span,
            Decl::Link(d) => d.span,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Decl::Type(_) => "type",
            Decl::Interface(_) => "interface",
            Decl::Contract(_) => "contract",
            Decl::Component(_) => "component",
            Decl::Publication(_) => "publication",
            Decl::Architecture(_) => "architecture",
            Decl::Link(_) => "link",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDeclNode {
    pub name: Ident,
    pub supertype: Option<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceNode {
    pub name: Ident,
    pub extends: Option<Ident>,
    pub members: Vec<Member>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Field(FieldNode),
    Method(MethodNode),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldNode {
    pub name: Ident,
    pub ty: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamNode {
    pub name: Ident,
    pub ty: Ident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnnotationKey {
    Guard,
    Pre,
    Post,
    Design,
}

impl AnnotationKey {
    pub fn from_word(word: &str) -> Option<Self> {
        Some(match word {
            "guard" => AnnotationKey::Guard,
            "pre" => AnnotationKey::Pre,
            "post" => AnnotationKey::Post,
            "design" => AnnotationKey::Design,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKey::Guard => "guard",
            AnnotationKey::Pre => "pre",
            AnnotationKey::Post => "post",
            AnnotationKey::Design => "design",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub key: AnnotationKey,
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodNode {
    pub name: Ident,
    pub params: Vec<ParamNode>,
    pub ret: Option<Ident>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolNode {
    pub expr: ProtocolExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractNode {
    pub name: Ident,
    pub implements: Ident,
    pub init: Option<String>,
    pub methods: Vec<MethodNode>,
    pub protocol: Option<ProtocolNode>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequiredKind {
    /// `required interface J`: no protocol of its own.
    Interface,
    /// `required contract R`: interface and protocol taken from `R`.
    Contract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequiredNode {
    pub kind: RequiredKind,
    pub name: Ident,
}

/// Body shared by `component` and `publication` declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentNode {
    pub name: Ident,
    pub provided: Ident,
    pub internal: Option<Ident>,
    pub required: Option<RequiredNode>,
    pub causal: Option<ProtocolNode>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArchKind {
    Business,
    Application,
}

impl ArchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArchKind::Business => "business",
            ArchKind::Application => "application",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismNode {
    pub src: Ident,
    pub kind: Ident,
    pub dst: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchNode {
    pub kind: ArchKind,
    pub name: Ident,
    pub objects: Vec<Ident>,
    pub morphisms: Vec<MorphismNode>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkNode {
    pub name: Ident,
    pub from: Ident,
    pub to: Ident,
    pub maps: Vec<(Ident, Ident)>,
    pub generators: Vec<(Ident, Ident)>,
    pub span: Span,
}
