//! Combinatorial group theory workbench: free groups, Stallings graphs,
//! graphs of groups with cyclic edge groups, and tower experiments.

pub mod constructions;
pub mod dsl;
pub mod gog;
pub mod homs;
pub mod stallings;
pub mod towers;
pub mod words;

pub use gog::{GraphOfGroups, PathWord};
pub use homs::FreeHom;
pub use stallings::SubgroupGraph;
pub use towers::Tower;
pub use words::{Alphabet, ConjugacyCertificate, CyclicWord, Exponent, Letter, Word, WordError};
