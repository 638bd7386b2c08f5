//! Interfaces, contracts, components and publications resolved from syntax
//! trees, plus publication derivation and its projection check.

mod publish;
mod resolve;
mod types;

pub use publish::{
    publish, publish_or_universal, validate_publication, validate_publication_bounded, PublicationSide,
    PublicationVerdict, PublishError,
};
pub use resolve::{resolve, resolve_units};
pub use types::*;
