//! Classification of causal states: Markov, faithful, minimal, u-minimal and
//! quasi-faithful. All predicates scan the full hypothesis space for the
//! state's variable count.

pub mod fixtures;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{independence_set, JointTable};
use crate::graphs::{Dag, Hypothesis, HypothesisSpace, StatementSet};
use crate::{Error, Result};

pub use fixtures::{fixture, fixture_names, fixtures, Fixture};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateClass {
    pub markov: bool,
    pub faithful: bool,
    pub minimal: bool,
    pub u_minimal: bool,
    pub quasi_faithful: bool,
}

/// Everything the predicates need about a distribution, computed once.
#[derive(Debug)]
pub struct DistributionProfile {
    space: Arc<HypothesisSpace>,
    iset: StatementSet,
    fitting: Vec<usize>,
    minimal: Vec<usize>,
}

impl DistributionProfile {
    pub fn new(p: &JointTable) -> Result<Self> {
        let space = HypothesisSpace::shared(p.k())?;
        let iset = independence_set(p)?;
        let fitting: Vec<usize> = space
            .classes()
            .iter()
            .filter(|h| h.iset.is_subset(&iset))
            .map(|h| h.id)
            .collect();
        let minimal = fitting
            .iter()
            .copied()
            .filter(|&a| {
                let ia = &space.classes()[a].iset;
                !fitting
                    .iter()
                    .any(|&b| ia.is_strict_subset(&space.classes()[b].iset))
            })
            .collect();
        Ok(DistributionProfile {
            space,
            iset,
            fitting,
            minimal,
        })
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    /// `ℐ(P)`.
    pub fn iset(&self) -> &StatementSet {
        &self.iset
    }

    /// Classes whose entailment set is contained in `ℐ(P)` (graphs Markov to P).
    pub fn fitting_classes(&self) -> impl Iterator<Item = &Hypothesis> {
        self.fitting.iter().map(|&id| &self.space.classes()[id])
    }

    /// Classes whose graphs are minimal to `P`.
    pub fn minimal_classes(&self) -> impl Iterator<Item = &Hypothesis> {
        self.minimal.iter().map(|&id| &self.space.classes()[id])
    }

    pub fn faithful_class(&self) -> Option<&Hypothesis> {
        self.space.class_with_iset(&self.iset)
    }

    fn class_of(&self, g: &Dag) -> Result<&Hypothesis> {
        self.space.class_of(g)
    }

    fn require_markov(&self, g: &Dag) -> Result<&Hypothesis> {
        let h = self.class_of(g)?;
        if self.fitting.contains(&h.id) {
            Ok(h)
        } else {
            Err(Error::NotMarkov)
        }
    }

    pub fn is_markov(&self, g: &Dag) -> Result<bool> {
        Ok(self.fitting.contains(&self.class_of(g)?.id))
    }

    pub fn is_faithful(&self, g: &Dag) -> Result<bool> {
        Ok(self.require_markov(g)?.iset == self.iset)
    }

    pub fn is_minimal(&self, g: &Dag) -> Result<bool> {
        Ok(self.minimal.contains(&self.require_markov(g)?.id))
    }

    pub fn is_u_minimal(&self, g: &Dag) -> Result<bool> {
        let h = self.require_markov(g)?;
        Ok(self.minimal == [h.id])
    }

    pub fn is_quasi_faithful(&self) -> bool {
        self.faithful_class().is_some()
    }

    /// A graph `g′` with `ℐ(g) ⊂ ℐ(g′) ⊆ ℐ(P)`, preferring one that is itself
    /// minimal; `None` iff `g` is minimal.
    pub fn minimality_witness(&self, g: &Dag) -> Result<Option<Dag>> {
        let ig = &self.require_markov(g)?.iset;
        let pick = |ids: &[usize]| {
            ids.iter()
                .map(|&id| &self.space.classes()[id])
                .filter(|h| ig.is_strict_subset(&h.iset))
                .flat_map(|h| h.members.iter())
                .min()
                .cloned()
        };
        Ok(pick(&self.minimal).or_else(|| pick(&self.fitting)))
    }

    /// A graph minimal to `P` whose entailment set contains `ℐ(g)`: `g`
    /// itself when `g` is minimal.
    pub fn minimal_supergraph(&self, g: &Dag) -> Result<Dag> {
        if self.is_minimal(g)? {
            return Ok(g.clone());
        }
        Ok(self
            .minimality_witness(g)?
            .expect("a non-minimal graph always has a minimal strict superset class"))
    }

    pub fn classify(&self, g: &Dag) -> Result<StateClass> {
        if !self.is_markov(g)? {
            return Ok(StateClass::default());
        }
        let faithful = self.is_faithful(g)?;
        let minimal = self.is_minimal(g)?;
        let u_minimal = self.is_u_minimal(g)?;
        Ok(StateClass {
            markov: true,
            faithful,
            minimal,
            u_minimal,
            quasi_faithful: self.is_quasi_faithful(),
        })
    }
}

fn profile(g: &Dag, p: &JointTable) -> Result<DistributionProfile> {
    if g.k() != p.k() {
        return Err(Error::DimensionMismatch(format!(
            "graph over {} variables, table over {}",
            g.k(),
            p.k()
        )));
    }
    DistributionProfile::new(p)
}

/// `ℐ(g) = ℐ(p)`; errors if `g` is not Markov to `p`.
pub fn is_faithful(g: &Dag, p: &JointTable) -> Result<bool> {
    profile(g, p)?.is_faithful(g)
}

/// No graph `g′` with `ℐ(g) ⊂ ℐ(g′) ⊆ ℐ(p)`; errors if `g` is not Markov to `p`.
pub fn is_minimal(g: &Dag, p: &JointTable) -> Result<bool> {
    profile(g, p)?.is_minimal(g)
}

/// Minimal, and every graph minimal to `p` is Markov equivalent to `g`.
pub fn is_u_minimal(g: &Dag, p: &JointTable) -> Result<bool> {
    profile(g, p)?.is_u_minimal(g)
}

/// Some graph is faithful to `p`.
pub fn is_quasi_faithful(p: &JointTable) -> Result<bool> {
    Ok(DistributionProfile::new(p)?.is_quasi_faithful())
}

pub fn minimality_witness(g: &Dag, p: &JointTable) -> Result<Option<Dag>> {
    profile(g, p)?.minimality_witness(g)
}

/// All five flags; when `g` is not Markov to `p` every flag is false.
pub fn classify(g: &Dag, p: &JointTable) -> Result<StateClass> {
    profile(g, p)?.classify(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::VariableSet;

    #[test]
    fn uniform_empty_graph() {
        let p = JointTable::uniform(VariableSet::binary(3));
        let g = Dag::empty(3);
        assert!(is_faithful(&g, &p).unwrap());
        assert!(is_minimal(&g, &p).unwrap());
        assert!(is_u_minimal(&g, &p).unwrap());
        assert!(is_quasi_faithful(&p).unwrap());
    }

    #[test]
    fn non_markov_is_an_error_but_classify_flags_it() {
        let p = JointTable::from_cards(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let g = Dag::empty(2);
        assert!(matches!(is_faithful(&g, &p), Err(Error::NotMarkov)));
        assert!(matches!(is_minimal(&g, &p), Err(Error::NotMarkov)));
        assert_eq!(classify(&g, &p).unwrap(), StateClass::default());
        assert!(classify(&Dag::empty(3), &p).is_err());
    }

    #[test]
    fn state_class_json() {
        let c = StateClass {
            markov: true,
            ..Default::default()
        };
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"markov":true,"faithful":false,"minimal":false,"u_minimal":false,"quasi_faithful":false}"#
        );
    }
}
