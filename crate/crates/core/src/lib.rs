//! Model-proportion semantics for default reasoning.
//!
//! Knowledge bases are monadic: unary predicates, individual constants, one
//! shared finite domain. Every question the engine asks (is this rule
//! applicable, how often is its conclusion wrong, how much of the model space
//! does an extension keep) is answered by exact counting of finite models.

pub mod counter;
pub mod engine;
pub mod forge;
pub mod kb;
pub mod lottery;
pub mod oracle;
pub mod sample;

pub use counter::{CountError, ModelCounter, WorldState};
pub use kb::{parse_kb, serialize_kb, Document, KnowledgeBase};
