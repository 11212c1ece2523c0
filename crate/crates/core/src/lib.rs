//! A tree-state machine. The whole state is one labelled tree; every
//! transition replaces a subtree. Terms stored in the tree evaluate when
//! read, programs run either as instruction lists driven by an instruction
//! pointer or as rewrite rules driven by the data, and the `.evo` text
//! format round-trips any state.
//!
//! The core is generic over the leaf type ([`Natural`]); the aliases at the
//! crate root fix it to arbitrary-precision naturals, with `*64` variants
//! over `u64`.

pub mod algebra;
pub mod devices;
pub mod engine;
pub mod error;
pub mod eval;
pub mod scalar;
pub mod templates;
pub mod textio;
pub mod tree;

pub use engine::{Formula, Instruction, Mode, TraceEvent};
pub use error::{Error, Result};
pub use eval::{Stats, DEFAULT_FUEL};
pub use scalar::Natural;
pub use templates::STDLIB;
pub use textio::{parse, print, print_node, ParseError};
pub use tree::{compose, meet, Key, Label, Op, Path, Segment};

/// Arbitrary-precision leaf values.
pub type Nat = num_bigint::BigUint;

pub type Node = tree::Node<Nat>;
pub type StateTree = tree::StateTree<Nat>;
pub type Machine = eval::Machine<Nat>;

pub type Node64 = tree::Node<u64>;
pub type StateTree64 = tree::StateTree<u64>;
pub type Machine64 = eval::Machine<u64>;
