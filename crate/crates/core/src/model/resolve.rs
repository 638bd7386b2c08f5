use std::collections::{BTreeMap, BTreeSet};

use super::types::*;
use crate::dsl::*;

struct At<'a, T> {
    path: &'a str,
    node: &'a T,
}

impl<T> Clone for At<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<T> Copy for At<'_, T> {}

struct Resolver<'a> {
    diags: Vec<Diagnostic>,
    types: BTreeMap<String, At<'a, TypeDeclNode>>,
    interfaces: BTreeMap<String, At<'a, InterfaceNode>>,
    contracts: BTreeMap<String, At<'a, ContractNode>>,
    components: BTreeMap<String, At<'a, ComponentNode>>,
    publications: BTreeMap<String, At<'a, ComponentNode>>,
    architectures: BTreeMap<String, At<'a, ArchNode>>,
    links: BTreeMap<String, At<'a, LinkNode>>,
    known_types: BTreeSet<String>,
}

fn insert<'a, T>(
    diags: &mut Vec<Diagnostic>,
    map: &mut BTreeMap<String, At<'a, T>>,
    kind: &str,
    name: &Ident,
    at: At<'a, T>,
) {
    if map.contains_key(&name.name) {
        diags.push(
            Diagnostic::error("duplicate", name.span, format!("duplicate {kind} `{}`", name.name)).with_path(at.path),
        );
    } else {
        map.insert(name.name.clone(), at);
    }
}

impl<'a> Resolver<'a> {
    fn err(&mut self, path: &str, code: &'static str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg).with_path(path));
    }

    fn collect(&mut self, path: &'a str, tree: &'a SyntaxTree) {
        for decl in &tree.declarations {
            let d = &mut self.diags;
            match decl {
                Decl::Type(n) => insert(d, &mut self.types, "type", &n.name, At { path, node: n }),
                Decl::Interface(n) => insert(d, &mut self.interfaces, "interface", &n.name, At { path, node: n }),
                Decl::Contract(n) => insert(d, &mut self.contracts, "contract", &n.name, At { path, node: n }),
                Decl::Component(n) => insert(d, &mut self.components, "component", &n.name, At { path, node: n }),
                Decl::Publication(n) => {
                    insert(d, &mut self.publications, "publication", &n.name, At { path, node: n })
                }
                Decl::Architecture(n) => {
                    insert(d, &mut self.architectures, "architecture", &n.name, At { path, node: n })
                }
                Decl::Link(n) => insert(d, &mut self.links, "link", &n.name, At { path, node: n }),
            }
        }
    }

    fn resolve_types(&mut self, model: &mut Model) {
        let entries: Vec<_> = self.types.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (name, at) in &entries {
            if BUILTIN_TYPES.contains(&name.as_str()) {
                self.err(at.path, "duplicate", at.node.name.span, format!("type `{name}` is built in"));
            }
            if let Some(sup) = &at.node.supertype {
                if !self.known_types.contains(&sup.name) {
                    self.err(at.path, "unbound", sup.span, format!("unknown type `{}`", sup.name));
                }
            }
        }
        // Cycle check along the (single) supertype chain.
        for (name, at) in &entries {
            let mut seen = BTreeSet::from([name.clone()]);
            let mut cur = at.node.supertype.as_ref().map(|s| s.name.clone());
            while let Some(next) = cur {
                if !seen.insert(next.clone()) {
                    if &next == name {
                        self.err(at.path, "cycle", at.node.name.span, format!("type `{name}` is its own supertype"));
                    }
                    break;
                }
                cur = model
                    .types
                    .get(&next)
                    .and_then(|t| t.supertype.clone())
                    .or_else(|| self.types.get(&next).and_then(|t| t.node.supertype.as_ref().map(|s| s.name.clone())));
            }
        }
        for (name, at) in entries {
            model.types.insert(
                name.clone(),
                TypeDecl {
                    name,
                    supertype: at.node.supertype.as_ref().map(|s| s.name.clone()),
                },
            );
        }
    }

    fn check_type(&mut self, path: &str, ty: &Ident) {
        if !self.known_types.contains(&ty.name) {
            self.err(path, "unbound", ty.span, format!("unknown type `{}`", ty.name));
        }
    }

    fn method_sig(&mut self, path: &str, m: &MethodNode) -> MethodSig {
        let mut names = BTreeSet::new();
        for p in &m.params {
            if !names.insert(p.name.name.clone()) {
                self.err(path, "duplicate", p.name.span, format!("duplicate parameter `{}`", p.name.name));
            }
            self.check_type(path, &p.ty);
        }
        if let Some(r) = &m.ret {
            self.check_type(path, r);
        }
        MethodSig {
            name: m.name.name.clone(),
            params: m
                .params
                .iter()
                .map(|p| Param {
                    name: p.name.name.clone(),
                    ty: p.ty.name.clone(),
                })
                .collect(),
            ret: m.ret.as_ref().map(|r| r.name.clone()),
        }
    }

    fn resolve_interfaces(&mut self, model: &mut Model) {
        let names: Vec<String> = self.interfaces.keys().cloned().collect();
        for name in names {
            self.resolve_interface(&name, &mut Vec::new(), model);
        }
    }

    /// Resolves `name` after its base; `stack` detects `extends` cycles.
    fn resolve_interface(&mut self, name: &str, stack: &mut Vec<String>, model: &mut Model) -> bool {
        if model.interfaces.contains_key(name) {
            return true;
        }
        let Some(at) = self.interfaces.get(name).copied() else {
            return false;
        };
        if stack.iter().any(|s| s == name) {
            self.err(at.path, "cycle", at.node.name.span, format!("interface `{name}` extends itself"));
            return false;
        }
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        if let Some(base) = &at.node.extends {
            stack.push(name.to_string());
            let ok = self.resolve_interface(&base.name, stack, model);
            stack.pop();
            if !ok {
                if !self.interfaces.contains_key(&base.name) {
                    self.err(at.path, "unbound", base.span, format!("unknown interface `{}`", base.name));
                }
                return false;
            }
            let b = &model.interfaces[&base.name];
            fields = b.fields.clone();
            methods = b.methods.clone();
        }
        for member in &at.node.members {
            match member {
                Member::Field(f) => {
                    self.check_type(at.path, &f.ty);
                    if fields.iter().any(|(n, _)| *n == f.name.name) {
                        self.err(at.path, "duplicate", f.name.span, format!("duplicate field `{}`", f.name.name));
                    } else {
                        fields.push((f.name.name.clone(), f.ty.name.clone()));
                    }
                }
                Member::Method(m) => {
                    let sig = self.method_sig(at.path, m);
                    if methods.iter().any(|x: &MethodSig| x.name == sig.name) {
                        self.err(at.path, "duplicate", m.name.span, format!("duplicate method `{}`", sig.name));
                    } else {
                        methods.push(sig);
                    }
                }
            }
        }
        model.interfaces.insert(
            name.to_string(),
            Interface {
                name: name.to_string(),
                fields,
                methods,
                extends: at.node.extends.as_ref().map(|b| b.name.clone()),
            },
        );
        true
    }

    fn lookup_interface(&mut self, model: &Model, path: &str, id: &Ident) -> Option<Interface> {
        let found = model.interfaces.get(&id.name).cloned();
        if found.is_none() && !self.interfaces.contains_key(&id.name) {
            self.err(path, "unbound", id.span, format!("unknown interface `{}`", id.name));
        }
        found
    }

    fn check_events(&mut self, path: &str, proto: &ProtocolNode, allowed: &BTreeSet<String>, what: &str) {
        for ev in proto.expr.events() {
            if !allowed.contains(&ev) {
                self.err(
                    path,
                    "unknown-event",
                    proto.span,
                    format!("protocol event `{ev}` is not a method of {what}"),
                );
            }
        }
    }

    fn resolve_contracts(&mut self, model: &mut Model) {
        let entries: Vec<_> = self.contracts.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (name, at) in entries {
            let node = at.node;
            let Some(iface) = self.lookup_interface(model, at.path, &node.implements) else {
                continue;
            };
            let mut phi = BTreeMap::new();
            for m in &node.methods {
                let sig = self.method_sig(at.path, m);
                match iface.method(&sig.name) {
                    None => self.err(
                        at.path,
                        "unbound",
                        m.name.span,
                        format!("method `{}` is not declared by interface `{}`", sig.name, iface.name),
                    ),
                    Some(declared) if *declared != sig => self.err(
                        at.path,
                        "signature",
                        m.span,
                        format!("`{sig}` does not match the interface declaration `{declared}`"),
                    ),
                    Some(_) => {}
                }
                if phi.contains_key(&sig.name) {
                    self.err(at.path, "duplicate", m.name.span, format!("duplicate method `{}`", sig.name));
                    continue;
                }
                phi.insert(sig.name.clone(), method_spec(m));
            }
            for m in &iface.methods {
                phi.entry(m.name.clone()).or_default();
            }
            if let Some(p) = &node.protocol {
                self.check_events(at.path, p, &iface.method_names(), &format!("interface `{}`", iface.name));
            }
            model.contracts.insert(
                name.clone(),
                Contract {
                    name,
                    iface,
                    init: node.init.clone().unwrap_or_default(),
                    phi,
                    protocol: node.protocol.as_ref().map(|p| p.expr.clone()),
                    complete: true,
                },
            );
        }
    }

    fn lookup_contract(&mut self, model: &Model, path: &str, id: &Ident) -> Option<Contract> {
        let found = model.contracts.get(&id.name).cloned();
        if found.is_none() && !self.contracts.contains_key(&id.name) {
            self.err(path, "unbound", id.span, format!("unknown contract `{}`", id.name));
        }
        found
    }

    /// Shared resolution of component and publication bodies.
    fn component_parts(&mut self, model: &Model, at: At<'a, ComponentNode>) -> Option<Component> {
        let node = at.node;
        let provided = self.lookup_contract(model, at.path, &node.provided);
        let internal = match &node.internal {
            Some(i) => Some(self.lookup_interface(model, at.path, i)?),
            None => None,
        };
        let (required, required_protocol) = match &node.required {
            None => (None, None),
            Some(RequiredNode {
                kind: RequiredKind::Interface,
                name,
            }) => (Some(self.lookup_interface(model, at.path, name)?), None),
            Some(RequiredNode {
                kind: RequiredKind::Contract,
                name,
            }) => {
                let c = self.lookup_contract(model, at.path, name)?;
                let proto = c.protocol.clone();
                (Some(c.iface), proto)
            }
        };
        let provided = provided?;
        let p_names = provided.iface.method_names();
        let r_names = required.as_ref().map(Interface::method_names).unwrap_or_default();
        let i_names = internal.as_ref().map(Interface::method_names).unwrap_or_default();
        for (a, b, what) in [
            (&p_names, &r_names, "provided and required"),
            (&p_names, &i_names, "provided and internal"),
            (&r_names, &i_names, "required and internal"),
        ] {
            if let Some(shared) = a.intersection(b).next() {
                self.err(
                    at.path,
                    "overlap",
                    node.name.span,
                    format!("method `{shared}` is both {what} in `{}`", node.name.name),
                );
            }
        }
        if let Some(c) = &node.causal {
            let allowed: BTreeSet<String> = p_names.union(&r_names).cloned().collect();
            self.check_events(at.path, c, &allowed, "the provided or required interfaces");
        }
        let private_methods = internal
            .as_ref()
            .map(|i| i.methods.iter().map(|m| (m.clone(), MethodSpec::default())).collect())
            .unwrap_or_default();
        Some(Component {
            name: node.name.name.clone(),
            provided: GeneralContract {
                base: provided,
                private_methods,
            },
            required,
            required_protocol,
            internal,
            causal: node.causal.as_ref().map(|c| c.expr.clone()),
        })
    }

    fn resolve_components(&mut self, model: &mut Model) {
        let entries: Vec<_> = self.components.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (name, at) in entries {
            if let Some(c) = self.component_parts(model, at) {
                model.components.insert(name, c);
            }
        }
        let entries: Vec<_> = self.publications.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (name, at) in entries {
            let Some(c) = self.component_parts(model, at) else {
                continue;
            };
            let mut guarded: Vec<&str> = c
                .provided
                .base
                .phi
                .iter()
                .filter(|(_, s)| s.guard.is_some())
                .map(|(m, _)| m.as_str())
                .collect();
            if let Some(RequiredNode {
                kind: RequiredKind::Contract,
                name,
            }) = &at.node.required
            {
                if let Some(rc) = model.contracts.get(&name.name) {
                    guarded.extend(rc.phi.iter().filter(|(_, s)| s.guard.is_some()).map(|(m, _)| m.as_str()));
                }
            }
            if !guarded.is_empty() {
                let msg = format!(
                    "publication `{name}` uses guarded method specifications ({}); publications must be guard-free",
                    guarded.join(", ")
                );
                self.err(at.path, "guard", at.node.name.span, msg);
                continue;
            }
            model.publications.insert(name, super::publish::publication_of(&c));
        }
    }

    fn resolve_architectures(&mut self, model: &mut Model) {
        for (name, at) in &self.architectures {
            model.architectures.insert(name.clone(), at.node.clone());
        }
        for (name, at) in &self.links {
            model.links.insert(name.clone(), at.node.clone());
        }
    }
}

fn method_spec(m: &MethodNode) -> MethodSpec {
    let mut spec = MethodSpec::default();
    for a in &m.annotations {
        match a.key {
            AnnotationKey::Guard => spec.guard = Some(a.text.clone()),
            AnnotationKey::Pre => spec.pre = Some(a.text.clone()),
            AnnotationKey::Post => spec.post = Some(a.text.clone()),
            AnnotationKey::Design => spec.design = a.text.clone(),
        }
    }
    spec
}

/// Binds every name reference in the given trees and checks the model
/// invariants. `extra_types` are treated as declared (used to resolve a
/// requirement against a catalog's type declarations).
pub fn resolve_units<'a>(
    units: impl IntoIterator<Item = (&'a str, &'a SyntaxTree)>,
    extra_types: &[TypeDecl],
) -> Result<Model, Vec<Diagnostic>> {
    let mut r = Resolver {
        diags: Vec::new(),
        types: BTreeMap::new(),
        interfaces: BTreeMap::new(),
        contracts: BTreeMap::new(),
        components: BTreeMap::new(),
        publications: BTreeMap::new(),
        architectures: BTreeMap::new(),
        links: BTreeMap::new(),
        known_types: BTreeSet::new(),
    };
    for (path, tree) in units {
        r.collect(path, tree);
    }
    let mut model = Model::default();
    for t in extra_types {
        if !r.types.contains_key(&t.name) {
            model.types.insert(t.name.clone(), t.clone());
        }
    }
    r.known_types = BUILTIN_TYPES
        .iter()
        .map(|s| s.to_string())
        .chain(model.types.keys().cloned())
        .chain(r.types.keys().cloned())
        .collect();
    r.resolve_types(&mut model);
    r.resolve_interfaces(&mut model);
    r.resolve_contracts(&mut model);
    r.resolve_components(&mut model);
    r.resolve_architectures(&mut model);
    for t in extra_types {
        if model.types.get(&t.name) == Some(t) && !r.types.contains_key(&t.name) {
            model.types.remove(&t.name);
        }
    }
    if r.diags.is_empty() {
        Ok(model)
    } else {
        let mut diags = r.diags;
        diags.sort_by(|a, b| (&a.path, a.span.offset, &a.message).cmp(&(&b.path, b.span.offset, &b.message)));
        diags.dedup();
        Err(diags)
    }
}

/// [`resolve_units`] for trees without file paths.
pub fn resolve(trees: &[SyntaxTree]) -> Result<Model, Vec<Diagnostic>> {
    resolve_units(trees.iter().map(|t| ("", t)), &[])
}
