use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::{
    check_cap, d_separated, enumerate_dags, statement_universe, CiStatement, Dag, StatementSet,
};
use crate::{Error, Result};

/// All canonical statements over `g`'s variables that `g` entails.
pub fn entailment_set(g: &Dag) -> Result<StatementSet> {
    check_cap(g.k())?;
    Ok(entailment_in(g, &statement_universe(g.k())))
}

pub(crate) fn entailment_in(g: &Dag, universe: &[CiStatement]) -> StatementSet {
    universe
        .iter()
        .filter(|s| d_separated(g, s))
        .copied()
        .collect()
}

pub fn markov_equivalent(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.k() != g2.k() {
        return Err(Error::DimensionMismatch(format!(
            "graphs over {} and {} variables",
            g1.k(),
            g2.k()
        )));
    }
    Ok(entailment_set(g1)? == entailment_set(g2)?)
}

/// A Markov-equivalence class, identified by its shared entailment set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    /// Position in [`equivalence_classes`] for this variable count.
    pub id: usize,
    pub iset: StatementSet,
    pub members: Vec<Dag>,
}

impl Hypothesis {
    pub fn contains(&self, g: &Dag) -> bool {
        self.members.contains(g)
    }
}

/// Every DAG on `k` variables, partitioned into equivalence classes.
///
/// Classes are listed in order of their first member's position in the DAG
/// enumeration, so class 0 is always the empty-graph class.
#[derive(Debug)]
pub struct HypothesisSpace {
    k: usize,
    universe: Vec<CiStatement>,
    dags: Vec<Dag>,
    classes: Vec<Hypothesis>,
    class_of_dag: HashMap<Dag, usize>,
    class_of_iset: BTreeMap<StatementSet, usize>,
}

impl HypothesisSpace {
    pub fn build(k: usize) -> Result<Self> {
        let dags = enumerate_dags(k)?;
        let universe = statement_universe(k);
        let mut classes: Vec<Hypothesis> = Vec::new();
        let mut class_of_iset = BTreeMap::new();
        let mut class_of_dag = HashMap::with_capacity(dags.len());
        for g in &dags {
            let iset = entailment_in(g, &universe);
            let id = *class_of_iset.entry(iset.clone()).or_insert_with(|| {
                classes.push(Hypothesis {
                    id: classes.len(),
                    iset,
                    members: Vec::new(),
                });
                classes.len() - 1
            });
            classes[id].members.push(g.clone());
            class_of_dag.insert(g.clone(), id);
        }
        Ok(HypothesisSpace {
            k,
            universe,
            dags,
            classes,
            class_of_dag,
            class_of_iset,
        })
    }

    /// Memoized per `k`; the space is immutable once built.
    pub fn shared(k: usize) -> Result<Arc<HypothesisSpace>> {
        static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<HypothesisSpace>>>> = OnceLock::new();
        check_cap(k)?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(space) = cache.lock().expect("cache poisoned").get(&k) {
            return Ok(Arc::clone(space));
        }
        let space = Arc::new(HypothesisSpace::build(k)?);
        let mut guard = cache.lock().expect("cache poisoned");
        Ok(Arc::clone(guard.entry(k).or_insert(space)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn universe(&self) -> &[CiStatement] {
        &self.universe
    }

    pub fn dags(&self) -> &[Dag] {
        &self.dags
    }

    pub fn classes(&self) -> &[Hypothesis] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> Option<&Hypothesis> {
        self.classes.get(id)
    }

    pub fn class_of(&self, g: &Dag) -> Result<&Hypothesis> {
        self.class_of_dag
            .get(g)
            .map(|&id| &self.classes[id])
            .ok_or_else(|| {
                Error::DimensionMismatch(format!("{g:?} is not a graph over {} variables", self.k))
            })
    }

    pub fn class_with_iset(&self, iset: &StatementSet) -> Option<&Hypothesis> {
        self.class_of_iset.get(iset).map(|&id| &self.classes[id])
    }

    /// Class whose entailment set is empty (the complete graphs).
    pub fn complete_class(&self) -> &Hypothesis {
        self.class_with_iset(&StatementSet::new())
            .expect("complete DAGs entail nothing")
    }

    pub fn empty_graph_class(&self) -> &Hypothesis {
        &self.classes[0]
    }
}

/// Partition of [`enumerate_dags`] by entailment-set equality.
pub fn equivalence_classes(k: usize) -> Result<Vec<Hypothesis>> {
    Ok(HypothesisSpace::shared(k)?.classes().to_vec())
}
