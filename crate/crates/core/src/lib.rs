//! Arithmetic on self-similar groups given by finite automata, nucleus
//! computation, limit-space gluing structures and the synthesis of a
//! contracting group from a gluing structure.

pub mod analysis;
pub mod automata;
pub mod construction;
pub mod corpus;
pub mod error;
pub mod limitspace;
pub mod nucleus;
pub mod par;
pub mod words;

pub use automata::{decide_equal, export_moore, Element, Group, GroupSpec, MooreDiagram, Naming};
pub use error::{Error, Result};
pub use limitspace::{critical_sets, gluing_classes, shift_class, tile_graph, GluingClass, Shifted, TileGraph};
pub use nucleus::{compute_nucleus, is_contracting, Contraction, Nucleus};
pub use par::{Exec, Settings};
pub use words::{normalize, Alphabet, EventuallyPeriodicWord, FiniteWord, Letter};
