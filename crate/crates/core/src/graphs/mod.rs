//! DAGs, conditional-independence statements, d-separation, entailment sets
//! and Markov-equivalence classes.

mod classes;
mod dag;
mod dsep;
mod statement;
mod varset;

pub use classes::{
    entailment_set, equivalence_classes, markov_equivalent, Hypothesis, HypothesisSpace,
};
pub use dag::{check_cap, enumerate_dags, Dag};
pub use dsep::{d_separated, d_separated_sets, reachable};
pub use statement::{statement_universe, CiStatement, StatementSet};
pub use varset::{VarSet, MAX_VARS};

/// Default upper bound on the variable count for exhaustive operations.
pub const DEFAULT_CAP: usize = 4;

/// Environment variable that raises (or lowers) the exhaustive-size cap.
pub const CAP_ENV: &str = "MINLAB_CAP";

/// Current cap: `MINLAB_CAP` if set to a valid integer, else [`DEFAULT_CAP`].
pub fn size_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|c| c.min(MAX_VARS))
        .unwrap_or(DEFAULT_CAP)
}

pub fn parents(g: &Dag, i: usize) -> VarSet {
    g.parents(i)
}

pub fn descendants(g: &Dag, i: usize) -> VarSet {
    g.descendants(i)
}
