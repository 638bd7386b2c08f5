//! Matching business requirements against a repository of software
//! components.
//!
//! Architectures are written in a small description language ([`dsl`]),
//! resolved into interfaces, contracts, components and publications
//! ([`model`]), and organised as typed pseudo-categories linked by
//! functor-like mappings ([`category`]). A requirement is matched against
//! the repository in two levels: signatures first ([`sigmatch`]), then trace
//! inclusion between behavior protocols ([`protocol`]). [`matcher`] runs the
//! pipeline and [`repo`] holds the catalog and its compiled index.

pub mod category;
pub mod dsl;
pub mod exec;
pub mod matcher;
pub mod model;
pub mod protocol;
pub mod repo;
pub mod sigmatch;
