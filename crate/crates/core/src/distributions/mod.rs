//! Exact categorical joint distributions, CPT networks, exact
//! conditional-independence checks, total variation distance and
//! perturbations inside TV balls.

mod network;
mod table;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::graphs::{
    check_cap, statement_universe, CiStatement, Dag, HypothesisSpace, StatementSet,
};
use crate::{Error, Result};

pub use network::{joint_of, CptNetwork};
pub use table::{JointTable, VariableSet, SUM_TOLERANCE};

/// Default bound on the factorization residual `|P(u,v,w)P(w) − P(u,w)P(v,w)|`
/// below which a cell counts as factorizing.
pub const CI_TOLERANCE: f64 = 1e-9;

/// Whether `s` holds in `p` at [`CI_TOLERANCE`].
pub fn ci_holds(p: &JointTable, s: &CiStatement) -> bool {
    ci_holds_with(p, s, CI_TOLERANCE)
}

/// Whether every value combination with `P(w) > 0` factorizes within
/// `tolerance`. Cells with `P(w) = 0` hold vacuously.
pub fn ci_holds_with(p: &JointTable, s: &CiStatement, tolerance: f64) -> bool {
    p.factorization_residuals(s)
        .into_iter()
        .all(|(pw, r)| pw <= 0.0 || r.abs() <= tolerance)
}

/// All canonical statements that hold in `p`.
pub fn independence_set(p: &JointTable) -> Result<StatementSet> {
    independence_set_with(p, CI_TOLERANCE)
}

pub fn independence_set_with(p: &JointTable, tolerance: f64) -> Result<StatementSet> {
    check_cap(p.k())?;
    Ok(statement_universe(p.k())
        .into_iter()
        .filter(|s| ci_holds_with(p, s, tolerance))
        .collect())
}

/// Half the L1 distance between two tables over the same variables.
///
/// # Panics
/// If the tables have different cardinalities.
pub fn tv_distance(p: &JointTable, q: &JointTable) -> f64 {
    assert!(p.same_shape(q), "tv_distance on tables of different shape");
    0.5 * p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// The mixture `(1 − λ)p + λq`.
pub fn mix(p: &JointTable, q: &JointTable, lambda: f64) -> Result<JointTable> {
    if !p.same_shape(q) {
        return Err(Error::DimensionMismatch(
            "mixing tables of different shape".into(),
        ));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "mixture weight {lambda} not in [0,1]"
        )));
    }
    let probs = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    JointTable::new(p.vars().clone(), probs)
}

/// A point drawn uniformly from the `n`-simplex (flat Dirichlet).
pub fn random_simplex_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

pub fn random_table<R: Rng + ?Sized>(vars: &VariableSet, rng: &mut R) -> JointTable {
    let probs = random_simplex_point(vars.cell_count(), rng);
    JointTable::new(vars.clone(), probs).expect("simplex points are valid tables")
}

/// A seeded random table mixed into `p`, strictly inside the TV ball of
/// radius `epsilon`.
///
/// The weight is `λ = min(1, 0.9·ε / TV(p, q))`, so the realized distance is
/// `min(TV(p, q), 0.9·ε)`.
pub fn perturb(p: &JointTable, epsilon: f64, rng_seed: u64) -> Result<JointTable> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} not in (0,1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let q = random_table(p.vars(), &mut rng);
    let d = tv_distance(p, &q);
    let lambda = if d > 0.0 {
        (0.9 * epsilon / d).min(1.0)
    } else {
        0.0
    };
    mix(p, &q, lambda)
}

/// Whether `ℐ(g) ⊆ ℐ(p)`.
pub fn is_markov(g: &Dag, p: &JointTable) -> Result<bool> {
    if g.k() != p.k() {
        return Err(Error::DimensionMismatch(format!(
            "graph over {} variables, table over {}",
            g.k(),
            p.k()
        )));
    }
    let space = HypothesisSpace::shared(g.k())?;
    let ig = &space.class_of(g)?.iset;
    let holds = ig.iter().all(|s| ci_holds(p, s));
    Ok(holds)
}

/// A graph together with a distribution it is Markov to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausalState {
    #[serde(rename = "dag")]
    g: Dag,
    #[serde(rename = "table")]
    p: JointTable,
}

impl CausalState {
    pub fn new(g: Dag, p: JointTable) -> Result<Self> {
        if !is_markov(&g, &p)? {
            return Err(Error::NotMarkov);
        }
        Ok(CausalState { g, p })
    }

    pub fn from_network(net: &CptNetwork) -> Self {
        CausalState {
            g: net.dag().clone(),
            p: net.joint_of(),
        }
    }

    pub fn graph(&self) -> &Dag {
        &self.g
    }

    pub fn table(&self) -> &JointTable {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.g.k()
    }
}

impl<'de> Deserialize<'de> for CausalState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dag: Dag,
            table: JointTable,
        }
        let raw = Raw::deserialize(deserializer)?;
        CausalState::new(raw.dag, raw.table).map_err(serde::de::Error::custom)
    }
}
