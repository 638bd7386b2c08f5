use std::fmt::Write;

use super::ast::*;
use super::lexer::quote;
use crate::protocol::ProtocolExpr;

/// Canonical text for a syntax tree. Declarations are separated by a blank
/// line; an empty tree prints as the empty string.
pub fn format(tree: &SyntaxTree) -> String {
    let mut out = String::new();
    for (i, decl) in tree.declarations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_decl(&mut out, decl);
    }
    out
}

fn write_decl(out: &mut String, decl: &Decl) {
    match decl {
        Decl::Type(t) => {
            let _ = write!(out, "type {}", t.name.name);
            if let Some(sup) = &t.supertype {
                let _ = write!(out, " <: {}", sup.name);
            }
            out.push_str(";\n");
        }
        Decl::Interface(i) => {
            let _ = write!(out, "interface {}", i.name.name);
            if let Some(base) = &i.extends {
                let _ = write!(out, " extends {}", base.name);
            }
            out.push_str(" {\n");
            for m in &i.members {
                match m {
                    Member::Field(f) => {
                        let _ = writeln!(out, "  field {}: {};", f.name.name, f.ty.name);
                    }
                    Member::Method(m) => {
                        out.push_str("  ");
                        write_method(out, m);
                    }
                }
            }
            out.push_str("}\n");
        }
        Decl::Contract(c) => {
            let _ = writeln!(out, "contract {} implements {} {{", c.name.name, c.implements.name);
            if let Some(init) = &c.init {
                let _ = writeln!(out, "  init {{ {} }}", quote(init));
            }
            for m in &c.methods {
                out.push_str("  method ");
                write_method(out, m);
            }
            if let Some(p) = &c.protocol {
                write_protocol(out, "protocol", &p.expr);
            }
            out.push_str("}\n");
        }
        Decl::Component(c) => write_component(out, "component", c),
        Decl::Publication(c) => write_component(out, "publication", c),
        Decl::Architecture(a) => {
            let _ = writeln!(out, "architecture {} {} {{", a.kind.as_str(), a.name.name);
            for o in &a.objects {
                let _ = writeln!(out, "  object {};", o.name);
            }
            for m in &a.morphisms {
                let _ = writeln!(out, "  morphism {} -{}-> {};", m.src.name, m.kind.name, m.dst.name);
            }
            out.push_str("}\n");
        }
        Decl::Link(l) => {
            let _ = writeln!(out, "link {} from {} to {} {{", l.name.name, l.from.name, l.to.name);
            for (a, b) in &l.maps {
                let _ = writeln!(out, "  map {} -> {};", a.name, b.name);
            }
            for (a, b) in &l.generators {
                let _ = writeln!(out, "  generator {} -> {};", a.name, b.name);
            }
            out.push_str("}\n");
        }
    }
}

fn write_method(out: &mut String, m: &MethodNode) {
    let params: Vec<String> = m
        .params
        .iter()
        .map(|p| format!("{}: {}", p.name.name, p.ty.name))
        .collect();
    let _ = write!(out, "{}({})", m.name.name, params.join(", "));
    if let Some(ret) = &m.ret {
        let _ = write!(out, ": {}", ret.name);
    }
    if !m.annotations.is_empty() {
        let parts: Vec<String> = m
            .annotations
            .iter()
            .map(|a| format!("{}: {}", a.key.as_str(), quote(&a.text)))
            .collect();
        let _ = write!(out, " [{}]", parts.join(" "));
    }
    out.push_str(";\n");
}

fn write_protocol(out: &mut String, keyword: &str, expr: &ProtocolExpr) {
    if *expr == ProtocolExpr::Eps {
        let _ = writeln!(out, "  {keyword} {{ }}");
    } else {
        let _ = writeln!(out, "  {keyword} {{ {expr} }}");
    }
}

fn write_component(out: &mut String, keyword: &str, c: &ComponentNode) {
    let _ = writeln!(out, "{keyword} {} {{", c.name.name);
    let _ = writeln!(out, "  provided contract {};", c.provided.name);
    if let Some(i) = &c.internal {
        let _ = writeln!(out, "  internal interface {};", i.name);
    }
    if let Some(r) = &c.required {
        let kind = match r.kind {
            RequiredKind::Interface => "interface",
            RequiredKind::Contract => "contract",
        };
        let _ = writeln!(out, "  required {kind} {};", r.name.name);
    }
    if let Some(p) = &c.causal {
        write_protocol(out, "causal", &p.expr);
    }
    out.push_str("}\n");
}
