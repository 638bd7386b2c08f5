use std::collections::{BTreeMap, BTreeSet};

use crate::dsl::{ArchNode, LinkNode};
use crate::protocol::ProtocolExpr;

/// Types every unit may use without declaring them.
pub const BUILTIN_TYPES: [&str; 3] = ["Boolean", "Integer", "String"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypeDecl {
    pub name: String,
    pub supertype: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

/// Method declaration: name, ordered typed parameters and an optional
/// return type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodSig {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<String>,
}

impl MethodSig {
    pub fn param_types(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.ty.as_str())
    }
}

impl std::fmt::Display for MethodSig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let params: Vec<String> = self.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
        write!(f, "{}({})", self.name, params.join(", "))?;
        if let Some(ret) = &self.ret {
            write!(f, ": {ret}")?;
        }
        Ok(())
    }
}

/// An interface with its inherited members flattened in: base methods come
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub methods: Vec<MethodSig>,
    pub extends: Option<String>,
}

impl Interface {
    pub fn method(&self, name: &str) -> Option<&MethodSig> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn method_names(&self) -> BTreeSet<String> {
        self.methods.iter().map(|m| m.name.clone()).collect()
    }
}

/// Per-method specification. Texts are opaque.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MethodSpec {
    pub guard: Option<String>,
    pub design: String,
    pub pre: Option<String>,
    pub post: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub name: String,
    pub iface: Interface,
    pub init: String,
    /// One entry per interface method.
    pub phi: BTreeMap<String, MethodSpec>,
    /// `None` when the contract declares no protocol block.
    pub protocol: Option<ProtocolExpr>,
    /// Declared, never verified.
    pub complete: bool,
}

impl Contract {
    /// The declared protocol, or any call order over the interface methods.
    pub fn effective_protocol(&self) -> ProtocolExpr {
        self.protocol
            .clone()
            .unwrap_or_else(|| ProtocolExpr::universal(self.iface.methods.iter().map(|m| m.name.as_str())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralContract {
    pub base: Contract,
    pub private_methods: Vec<(MethodSig, MethodSpec)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub provided: GeneralContract,
    pub required: Option<Interface>,
    /// Protocol of the required side, when given through a required contract.
    pub required_protocol: Option<ProtocolExpr>,
    pub internal: Option<Interface>,
    pub causal: Option<ProtocolExpr>,
}

/// Guard-free contract: interface, unguarded designs and a trace set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationContract {
    pub iface: Interface,
    pub designs: BTreeMap<String, MethodSpec>,
    pub traces: ProtocolExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Publication {
    pub name: String,
    pub provided: PublicationContract,
    pub required: Option<PublicationContract>,
    pub internal: Option<Interface>,
    /// Causal relation over provided and required methods.
    pub causal: ProtocolExpr,
}

impl Publication {
    /// Provided method names.
    pub fn provided_methods(&self) -> BTreeSet<String> {
        self.provided.iface.method_names()
    }

    /// Required method names; empty without a required side.
    pub fn required_methods(&self) -> BTreeSet<String> {
        self.required.as_ref().map(|r| r.iface.method_names()).unwrap_or_default()
    }
}

/// Resolved declarations, keyed by name per declaration kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub types: BTreeMap<String, TypeDecl>,
    pub interfaces: BTreeMap<String, Interface>,
    pub contracts: BTreeMap<String, Contract>,
    pub components: BTreeMap<String, Component>,
    pub publications: BTreeMap<String, Publication>,
    pub architectures: BTreeMap<String, ArchNode>,
    pub links: BTreeMap<String, LinkNode>,
}

impl Model {
    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
            && self.interfaces.is_empty()
            && self.contracts.is_empty()
            && self.components.is_empty()
            && self.publications.is_empty()
            && self.architectures.is_empty()
            && self.links.is_empty()
    }

    pub fn interface(&self, name: &str) -> Option<&Interface> {
        self.interfaces.get(name)
    }

    pub fn contract(&self, name: &str) -> Option<&Contract> {
        self.contracts.get(name)
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.get(name)
    }

    pub fn publication(&self, name: &str) -> Option<&Publication> {
        self.publications.get(name)
    }
}
