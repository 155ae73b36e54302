//! Zero-shot key-value relation extraction from semi-structured web pages.
//!
//! The pipeline: parse HTML into text nodes with absolute XPaths, derive
//! structural features (relative XPaths through the lowest common ancestor,
//! cross-page text popularity), encode pages with a transformer whose
//! attention carries tree-structural bias terms, and score ordered node
//! pairs with a biaffine classifier trained under constrained negative
//! sampling. Training on some verticals and extracting on an unseen one is
//! the intended use.

pub mod checkpoint;
pub mod config;
pub mod corpus;
pub mod dom;
pub mod encoder;
pub mod eval;
pub mod pair;
pub mod params;
pub mod popularity;
pub mod tensor;
pub mod train;
pub mod xpath;
