//! Exact arithmetic in Heisenberg groups and their products with free
//! abelian groups, together with the constructions used to reduce rational
//! subset membership and submonoid problems to questions about these groups.
//!
//! All integers are arbitrary precision. Searches are bounded and report
//! whether their bound was reached, so a negative answer is never confused
//! with an exhausted budget.

pub mod certificate;
pub mod format;
pub mod gadgets;
pub mod group;
pub mod reductions;
pub mod words;

pub use certificate::{GadgetCertificate, Verdict};
pub use group::{Element, GroupDescriptor, GroupError, HeisenbergElement, QuotientElement};
pub use words::{Alphabet, EnumerationBudget, Word};
