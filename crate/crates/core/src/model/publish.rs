use std::collections::BTreeMap;

use super::types::*;
use crate::protocol::{
    compile, equivalent_bounded, project_bounded, Equivalence, ProtocolError, ProtocolExpr, Trace,
    DEFAULT_STATE_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PublishError {
    #[error("cannot publish `{0}` without protocol")]
    MissingProtocol(String),
}

/// Derives the publication of a component: guards are removed from every
/// provided method specification, the provided protocol becomes the trace
/// set, and the required interface becomes the required contract. Without a
/// declared causal relation, the shuffle of provided and required protocols
/// is used.
pub fn publish(component: &Component) -> Result<Publication, PublishError> {
    if component.provided.base.protocol.is_none() {
        return Err(PublishError::MissingProtocol(component.name.clone()));
    }
    Ok(publication_of(component))
}

/// Like [`publish`], but a missing provided protocol allows any call order.
pub fn publish_or_universal(component: &Component) -> Publication {
    publication_of(component)
}

pub(crate) fn publication_of(component: &Component) -> Publication {
    let contract = &component.provided.base;
    let designs: BTreeMap<String, MethodSpec> = contract
        .phi
        .iter()
        .map(|(m, spec)| {
            (
                m.clone(),
                MethodSpec {
                    guard: None,
                    ..spec.clone()
                },
            )
        })
        .collect();
    let provided = PublicationContract {
        iface: contract.iface.clone(),
        designs,
        traces: contract.effective_protocol(),
    };
    let required = component.required.as_ref().map(|iface| PublicationContract {
        iface: iface.clone(),
        designs: iface.methods.iter().map(|m| (m.name.clone(), MethodSpec::default())).collect(),
        traces: component
            .required_protocol
            .clone()
            .unwrap_or_else(|| ProtocolExpr::universal(iface.methods.iter().map(|m| m.name.as_str()))),
    });
    let causal = component.causal.clone().unwrap_or_else(|| match &required {
        Some(r) => ProtocolExpr::shuffle(provided.traces.clone(), r.traces.clone()),
        None => provided.traces.clone(),
    });
    Publication {
        name: component.name.clone(),
        provided,
        required,
        internal: component.internal.clone(),
        causal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PublicationSide {
    Provided,
    Required,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PublicationVerdict {
    Pass,
    /// The projection of the causal relation onto one side differs from that
    /// side's protocol. `in_causal` tells whether the witness belongs to the
    /// projection (true) or to the side's protocol (false).
    Fail {
        side: PublicationSide,
        witness: Trace,
        in_causal: bool,
    },
}

impl PublicationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PublicationVerdict::Pass)
    }
}

/// Checks that erasing required events from the causal relation yields the
/// provided protocol, and erasing provided events yields the required one.
pub fn validate_publication(publication: &Publication) -> Result<PublicationVerdict, ProtocolError> {
    validate_publication_bounded(publication, DEFAULT_STATE_LIMIT)
}

pub fn validate_publication_bounded(
    publication: &Publication,
    limit: usize,
) -> Result<PublicationVerdict, ProtocolError> {
    let causal = compile(&publication.causal);
    let empty = ProtocolExpr::Eps;
    let sides = [
        (PublicationSide::Provided, publication.provided_methods(), &publication.provided.traces),
        (
            PublicationSide::Required,
            publication.required_methods(),
            publication.required.as_ref().map_or(&empty, |r| &r.traces),
        ),
    ];
    for (side, keep, traces) in sides {
        let projected = project_bounded(&causal, &keep, limit)?;
        if let Equivalence::Differs { trace, accepted_by } =
            equivalent_bounded(&projected, &compile(traces), limit)?
        {
            return Ok(PublicationVerdict::Fail {
                side,
                witness: trace,
                in_causal: accepted_by == crate::protocol::Side::Left,
            });
        }
    }
    Ok(PublicationVerdict::Pass)
}
