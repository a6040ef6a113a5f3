//! Active learning of deterministic word and bottom-up tree automata, both
//! ranked (polynomial functors) and unordered (finite powerset), from a
//! teacher answering membership and equivalence queries.
//!
//! The learner keeps an observation table whose rows are indexed by a
//! subtree-closed set of trees and whose columns are contexts. Closedness
//! and consistency defects are fixed by adding rows and columns; the
//! resulting hypothesis is checked by the teacher, and each counterexample's
//! subtrees are added as new rows.

pub mod automaton;
pub mod cli;
pub mod error;
pub mod format;
pub mod layer;
pub mod learner;
pub mod signature;
pub mod syntax;
pub mod table;
pub mod teacher;
pub mod tree;

pub use automaton::{Automaton, Output, Reachability, State};
pub use error::{Error, Result};
pub use layer::{Layer, Slot};
pub use learner::{learn, LearnConfig, LearnOutcome, LearnTrace, StepKind};
pub use signature::{FunctorSpec, NameSet, RankedAlphabet, Signature, Symbol};
pub use table::{Defect, ObservationTable, Row, Witness};
pub use teacher::{AutomatonTeacher, CachingTeacher, QueryStats, Teacher};
pub use tree::{Context, Tree, TreeKind};
