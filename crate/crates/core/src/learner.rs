//! Hypothesis orders, the selector `F`, and the learning method `F ∘ T`.
//!
//! An order lists every equivalence class once such that a class whose
//! entailment set strictly contains another's comes first. The selector maps
//! a statement set `S` to the first class in the order whose entailment set
//! fits inside `S`; the learner composes it with the super-test.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::citest::{super_test, TestConfig};
use crate::graphs::{Dag, Hypothesis, HypothesisSpace, StatementSet};
use crate::sampling::Sample;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct HypothesisOrder {
    space: Arc<HypothesisSpace>,
    sequence: Vec<usize>,
}

impl HypothesisOrder {
    /// Checks that `sequence` is a permutation of the class ids satisfying the
    /// superset-first constraint.
    pub fn from_sequence(space: Arc<HypothesisSpace>, sequence: Vec<usize>) -> Result<Self> {
        let n = space.classes().len();
        let mut seen = vec![false; n];
        for &id in &sequence {
            if id >= n || std::mem::replace(&mut seen[id], true) {
                return Err(Error::InvalidArgument(format!(
                    "order is not a permutation of the {n} classes"
                )));
            }
        }
        if sequence.len() != n {
            return Err(Error::InvalidArgument(format!(
                "order lists {} of {n} classes",
                sequence.len()
            )));
        }
        let order = HypothesisOrder { space, sequence };
        if let Some((i, j)) = order.first_violation() {
            return Err(Error::InvalidArgument(format!(
                "class {} at position {j} strictly contains class {} at position {i}",
                order.sequence[j], order.sequence[i]
            )));
        }
        Ok(order)
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn ids(&self) -> &[usize] {
        &self.sequence
    }

    pub fn hypotheses(&self) -> impl Iterator<Item = &Hypothesis> {
        self.sequence.iter().map(|&id| &self.space.classes()[id])
    }

    pub fn position(&self, class_id: usize) -> Option<usize> {
        self.sequence.iter().position(|&id| id == class_id)
    }

    /// First pair `i < j` where `ℐ(G_j) ⊃ ℐ(G_i)`, if any.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        let hs: Vec<&Hypothesis> = self.hypotheses().collect();
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                if hs[i].iset.is_strict_subset(&hs[j].iset) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn default_rank(space: &HypothesisSpace) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..space.classes().len()).collect();
    let keys: Vec<(Reverse<usize>, String)> = space
        .classes()
        .iter()
        .map(|h| (Reverse(h.iset.len()), h.iset.canonical_key()))
        .collect();
    ids.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    ids
}

/// Classes by entailment-set size descending, ties broken by the canonical
/// serialization of the entailment set.
pub fn default_order(k: usize) -> Result<HypothesisOrder> {
    let space = HypothesisSpace::shared(k)?;
    let seq = default_rank(&space);
    HypothesisOrder::from_sequence(space, seq)
}

/// A valid order that places `preferred` before every class whose
/// entailment set is incomparable with it.
///
/// Classes are emitted by repeatedly taking the highest-priority class all of
/// whose strict supersets are already placed; `preferred` and its strict
/// supersets outrank everything else, then the default order applies.
pub fn order_preferring(k: usize, preferred: usize) -> Result<HypothesisOrder> {
    let space = HypothesisSpace::shared(k)?;
    let classes = space.classes();
    let target = classes
        .get(preferred)
        .ok_or_else(|| Error::InvalidArgument(format!("no class {preferred} for k={k}")))?;

    let rank = default_rank(&space);
    let mut pos = vec![0; classes.len()];
    for (r, &id) in rank.iter().enumerate() {
        pos[id] = r;
    }
    let tier = |id: usize| -> usize {
        let h = &classes[id];
        if id == preferred || target.iset.is_strict_subset(&h.iset) {
            0
        } else {
            1
        }
    };

    let mut placed = vec![false; classes.len()];
    let mut seq = Vec::with_capacity(classes.len());
    while seq.len() < classes.len() {
        let next = (0..classes.len())
            .filter(|&id| !placed[id])
            .filter(|&id| {
                (0..classes.len()).all(|other| {
                    placed[other] || !classes[id].iset.is_strict_subset(&classes[other].iset)
                })
            })
            .min_by_key(|&id| (tier(id), pos[id]))
            .expect("strict containment is acyclic, so some class is always ready");
        placed[next] = true;
        seq.push(next);
    }
    HypothesisOrder::from_sequence(space, seq)
}

/// The first hypothesis in `order` whose entailment set is contained in `s`.
pub fn select_f<'a>(order: &'a HypothesisOrder, s: &StatementSet) -> &'a Hypothesis {
    order
        .hypotheses()
        .find(|h| h.iset.is_subset(s))
        .expect("the complete-graph class has an empty entailment set")
}

/// How a learner picks its hypothesis order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum OrderSpec {
    #[default]
    Default,
    Prefer(usize),
}

impl FromStr for OrderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "default" {
            return Ok(OrderSpec::Default);
        }
        if let Some(id) = s.strip_prefix("prefer:") {
            return id
                .trim()
                .parse()
                .map(OrderSpec::Prefer)
                .map_err(|_| Error::Config(format!("bad class id in `{s}`")));
        }
        Err(Error::Config(format!(
            "order must be `default` or `prefer:<class-id>`, got `{s}`"
        )))
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Default => write!(f, "default"),
            OrderSpec::Prefer(id) => write!(f, "prefer:{id}"),
        }
    }
}

impl Serialize for OrderSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrderSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Learner configuration as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub k: usize,
    #[serde(default)]
    pub order: OrderSpec,
    #[serde(default = "one")]
    pub threshold_constant: f64,
}

fn one() -> f64 {
    1.0
}

impl LearnerConfig {
    pub fn build(&self) -> Result<Learner> {
        let order = match self.order {
            OrderSpec::Default => default_order(self.k)?,
            OrderSpec::Prefer(id) => order_preferring(self.k, id)?,
        };
        Ok(Learner::new(
            order,
            TestConfig::new(self.threshold_constant)?,
        ))
    }
}

/// The outcome of one learning run: the accepted statements and the chosen
/// class.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnOutcome {
    pub accepted: StatementSet,
    pub class_id: usize,
}

/// Anything that maps a sample to a hypothesis over a fixed space.
pub trait LearningMethod: Sync {
    fn space(&self) -> &HypothesisSpace;

    fn learn_outcome(&self, sample: &Sample) -> Result<LearnOutcome>;
}

/// `F ∘ T` for a fixed order and test configuration.
#[derive(Clone, Debug)]
pub struct Learner {
    order: HypothesisOrder,
    test: TestConfig,
}

impl Learner {
    pub fn new(order: HypothesisOrder, test: TestConfig) -> Self {
        Learner { order, test }
    }

    pub fn with_default_order(k: usize) -> Result<Self> {
        Ok(Learner::new(default_order(k)?, TestConfig::default()))
    }

    pub fn order(&self) -> &HypothesisOrder {
        &self.order
    }

    pub fn test_config(&self) -> &TestConfig {
        &self.test
    }

    pub fn learn(&self, sample: &Sample) -> Result<&Hypothesis> {
        let out = self.learn_outcome(sample)?;
        Ok(&self.order.space().classes()[out.class_id])
    }

    fn check_sample(&self, sample: &Sample) -> Result<()> {
        if sample.vars().len() != self.order.k() {
            return Err(Error::DimensionMismatch(format!(
                "learner over {} variables, sample over {}",
                self.order.k(),
                sample.vars().len()
            )));
        }
        Ok(())
    }
}

impl LearningMethod for Learner {
    fn space(&self) -> &HypothesisSpace {
        self.order.space()
    }

    fn learn_outcome(&self, sample: &Sample) -> Result<LearnOutcome> {
        self.check_sample(sample)?;
        let out = super_test(sample, self.order.space().universe(), &self.test)?;
        let class_id = select_f(&self.order, &out.s).id;
        Ok(LearnOutcome {
            accepted: out.s,
            class_id,
        })
    }
}

/// Answers `target_class` whenever the accepted set equals `target_iset`
/// exactly, and defers to `base` otherwise.
#[derive(Clone, Debug)]
pub struct PatchedLearner {
    base: Learner,
    target_class: usize,
    target_iset: StatementSet,
}

impl PatchedLearner {
    pub fn target_class(&self) -> usize {
        self.target_class
    }
}

pub fn patched_learner(
    base: Learner,
    target_class: usize,
    target_iset: StatementSet,
) -> Result<PatchedLearner> {
    if base.order.space().class(target_class).is_none() {
        return Err(Error::InvalidArgument(format!("no class {target_class}")));
    }
    if let Some(s) = target_iset
        .iter()
        .find(|s| !base.order.space().universe().contains(s))
    {
        return Err(Error::InvalidArgument(format!(
            "target statement {s} is outside the learner's variables"
        )));
    }
    Ok(PatchedLearner {
        base,
        target_class,
        target_iset,
    })
}

impl LearningMethod for PatchedLearner {
    fn space(&self) -> &HypothesisSpace {
        self.base.space()
    }

    fn learn_outcome(&self, sample: &Sample) -> Result<LearnOutcome> {
        let out = self.base.learn_outcome(sample)?;
        if out.accepted == self.target_iset {
            return Ok(LearnOutcome {
                accepted: out.accepted,
                class_id: self.target_class,
            });
        }
        Ok(out)
    }
}

/// The JSON shape of a learned hypothesis.
#[derive(Clone, Debug, Serialize)]
pub struct LearnedHypothesis<'a> {
    pub class_id: usize,
    pub iset: &'a StatementSet,
    pub member_dags: &'a [Dag],
}

impl<'a> From<&'a Hypothesis> for LearnedHypothesis<'a> {
    fn from(h: &'a Hypothesis) -> Self {
        LearnedHypothesis {
            class_id: h.id,
            iset: &h.iset,
            member_dags: &h.members,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::statement_universe;

    #[test]
    fn two_variable_default_order() {
        let o = default_order(2).unwrap();
        let hs: Vec<_> = o.hypotheses().collect();
        assert_eq!(hs[0].members, vec![Dag::empty(2)]);
        assert_eq!(hs[1].members.len(), 2);
    }

    #[test]
    fn three_variable_default_order() {
        let o = default_order(3).unwrap();
        let hs: Vec<_> = o.hypotheses().collect();
        assert_eq!(hs.len(), 11);
        assert!(hs[0].contains(&Dag::empty(3)));
        assert!(hs[10].contains(&Dag::complete(3)));
        assert!(o.first_violation().is_none());
    }

    #[test]
    fn preferring_the_empty_class_keeps_the_head() {
        let o = order_preferring(3, 0).unwrap();
        assert_eq!(o.ids()[0], default_order(3).unwrap().ids()[0]);
    }

    #[test]
    fn preferred_chain_precedes_collider() {
        let space = HypothesisSpace::shared(3).unwrap();
        let chain = space
            .class_of(&Dag::new(3, &[(0, 1), (1, 2)]).unwrap())
            .unwrap()
            .id;
        let coll = space
            .class_of(&Dag::new(3, &[(0, 1), (2, 1)]).unwrap())
            .unwrap()
            .id;
        let o = order_preferring(3, chain).unwrap();
        assert!(o.position(chain).unwrap() < o.position(coll).unwrap());
        let o = order_preferring(3, coll).unwrap();
        assert!(o.position(coll).unwrap() < o.position(chain).unwrap());
        assert!(order_preferring(3, 99).is_err());
    }

    #[test]
    fn rejects_invalid_sequences() {
        let space = HypothesisSpace::shared(2).unwrap();
        // edge class (ℐ = ∅) ahead of the empty-graph class violates the constraint
        assert!(HypothesisOrder::from_sequence(space.clone(), vec![1, 0]).is_err());
        assert!(HypothesisOrder::from_sequence(space.clone(), vec![0]).is_err());
        assert!(HypothesisOrder::from_sequence(space, vec![0, 0]).is_err());
    }

    #[test]
    fn selector_extremes() {
        let o = default_order(3).unwrap();
        let all: StatementSet = statement_universe(3).into_iter().collect();
        assert!(select_f(&o, &all).contains(&Dag::empty(3)));
        assert!(select_f(&o, &StatementSet::new()).contains(&Dag::complete(3)));
    }

    #[test]
    fn order_spec_parsing() {
        assert_eq!("default".parse::<OrderSpec>().unwrap(), OrderSpec::Default);
        assert_eq!(
            "prefer:4".parse::<OrderSpec>().unwrap(),
            OrderSpec::Prefer(4)
        );
        assert!("prefer:x".parse::<OrderSpec>().is_err());
        assert!("random".parse::<OrderSpec>().is_err());
        let cfg: LearnerConfig =
            serde_json::from_str(r#"{"k":3,"order":"prefer:2","threshold_constant":1.0}"#).unwrap();
        assert_eq!(cfg.order, OrderSpec::Prefer(2));
        assert!(serde_json::from_str::<LearnerConfig>(r#"{"k":3,"bogus":1}"#).is_err());
    }
}
