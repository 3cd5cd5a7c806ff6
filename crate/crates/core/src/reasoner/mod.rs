//! `owl:sameAs` equivalence handling and ρDF inference.

mod rhodf;
mod sameas;

pub use rhodf::{rho_df_closure, saturate, RuleCounts, VocabStatements};
pub use sameas::{merge_sameas, EquivalenceClasses};
