//! Cross-checks between how a state is classified and how a learner behaves
//! on samples from it.

use serde::Serialize;

use super::{
    curve_from_outcomes, run_convergence, run_trials, ConvergenceCurve, Schedule, TrialPlan,
    HIGH_RATE, LOW_RATE,
};
use crate::citest::TestConfig;
use crate::distributions::{tv_distance, CausalState};
use crate::graphs::StatementSet;
use crate::learner::{LearnerConfig, LearningMethod, OrderSpec};
use crate::states::{DistributionProfile, StateClass};
use crate::{Error, Result};

fn learner(k: usize, order: &OrderSpec, test: &TestConfig) -> Result<crate::learner::Learner> {
    LearnerConfig {
        k,
        order: order.clone(),
        threshold_constant: test.threshold_constant,
    }
    .build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    UMinimal,
    MinimalNotUMinimal,
    NonMinimal,
    NotMarkov,
}

impl Regime {
    fn of(c: &StateClass) -> Regime {
        match (c.markov, c.minimal, c.u_minimal) {
            (false, _, _) => Regime::NotMarkov,
            (true, _, true) => Regime::UMinimal,
            (true, true, false) => Regime::MinimalNotUMinimal,
            (true, false, _) => Regime::NonMinimal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    High,
    Low,
}

impl Expectation {
    fn met_by(self, rate: f64) -> bool {
        match self {
            Expectation::High => rate >= HIGH_RATE,
            Expectation::Low => rate <= LOW_RATE,
        }
    }
}

/// A run of the same state under a specific order.
#[derive(Clone, Debug, Serialize)]
pub struct OrderRun {
    pub order: OrderSpec,
    pub expected: Expectation,
    pub curve: ConvergenceCurve,
    pub met: bool,
}

/// What the non-minimal state was learned as instead of its truth.
#[derive(Clone, Debug, Serialize)]
pub struct Sacrifice {
    pub converged_class: Option<usize>,
    pub contains_true_iset: bool,
    pub minimal_to_p: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateVerdict {
    pub name: String,
    pub classification: StateClass,
    pub regime: Regime,
    pub true_class: usize,
    pub curve: ConvergenceCurve,
    pub trend_ok: bool,
    pub error_decay_ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub order_runs: Vec<OrderRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sacrifice: Option<Sacrifice>,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub order: OrderSpec,
    pub states: Vec<StateVerdict>,
    pub consistent: bool,
}

/// Classifies each state, measures the learner on it, and checks the
/// behavior against the regime: high success on u-minimal states, low on
/// non-minimal ones, and order-dependent success on the rest.
///
/// Minimal but not u-minimal states are rerun under an order preferring
/// their own class (expected high) and under orders preferring each rival
/// minimal class (expected low).
pub fn verify_classification_behavior(
    states: &[(String, CausalState)],
    order: &OrderSpec,
    test: &TestConfig,
    schedule: &Schedule,
) -> Result<ClassificationReport> {
    let mut verdicts = Vec::with_capacity(states.len());
    for (name, state) in states {
        let profile = DistributionProfile::new(state.table())?;
        let classification = profile.classify(state.graph())?;
        let regime = Regime::of(&classification);
        let plan = schedule.plan(state.clone());
        let base = learner(state.k(), order, test)?;
        let curve = run_convergence(&plan, &base)?;
        let true_class = curve.target_class;
        let mut order_runs = Vec::new();
        let mut sacrifice = None;

        let consistent = match regime {
            Regime::NotMarkov => false,
            Regime::UMinimal => {
                Expectation::High.met_by(curve.terminal_rate())
                    && curve.trend_ok()
                    && curve.error_decay_ok()
            }
            Regime::NonMinimal => {
                let converged = curve.terminal().modal_output();
                let true_iset = &profile.space().classes()[true_class].iset;
                let s = Sacrifice {
                    converged_class: converged,
                    contains_true_iset: converged
                        .is_some_and(|c| true_iset.is_subset(&profile.space().classes()[c].iset)),
                    minimal_to_p: converged
                        .is_some_and(|c| profile.minimal_classes().any(|h| h.id == c)),
                };
                let ok = Expectation::Low.met_by(curve.terminal_rate())
                    && s.contains_true_iset
                    && s.minimal_to_p;
                sacrifice = Some(s);
                ok
            }
            Regime::MinimalNotUMinimal => {
                let prefs = std::iter::once((true_class, Expectation::High)).chain(
                    profile
                        .minimal_classes()
                        .filter(|h| h.id != true_class)
                        .map(|h| (h.id, Expectation::Low)),
                );
                for (id, expected) in prefs.collect::<Vec<_>>() {
                    let spec = OrderSpec::Prefer(id);
                    let l = learner(state.k(), &spec, test)?;
                    let c = run_convergence(&plan, &l)?;
                    let met = expected.met_by(c.terminal_rate());
                    order_runs.push(OrderRun {
                        order: spec,
                        expected,
                        curve: c,
                        met,
                    });
                }
                order_runs.iter().all(|r| r.met)
            }
        };
        verdicts.push(StateVerdict {
            name: name.clone(),
            classification,
            regime,
            true_class,
            trend_ok: curve.trend_ok(),
            error_decay_ok: curve.error_decay_ok(),
            curve,
            order_runs,
            sacrifice,
            consistent,
        });
    }
    Ok(ClassificationReport {
        order: order.clone(),
        consistent: verdicts.iter().all(|v| v.consistent),
        states: verdicts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiFaithfulEntry {
    pub name: String,
    pub faithful: bool,
    pub curve: ConvergenceCurve,
    pub high_success: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiFaithfulReport {
    /// States skipped because no graph is faithful to their distribution.
    pub excluded: Vec<String>,
    pub states: Vec<QuasiFaithfulEntry>,
    pub consistent: bool,
}

/// On quasi-faithful states, high terminal success should occur exactly on
/// the faithful ones.
pub fn quasi_faithful_suite(
    states: &[(String, CausalState)],
    order: &OrderSpec,
    test: &TestConfig,
    schedule: &Schedule,
) -> Result<QuasiFaithfulReport> {
    let mut excluded = Vec::new();
    let mut entries = Vec::new();
    for (name, state) in states {
        let profile = DistributionProfile::new(state.table())?;
        if !profile.is_quasi_faithful() {
            excluded.push(name.clone());
            continue;
        }
        let faithful = profile.is_faithful(state.graph())?;
        let curve = run_convergence(
            &schedule.plan(state.clone()),
            &learner(state.k(), order, test)?,
        )?;
        let high_success = curve.terminal_rate() >= HIGH_RATE;
        entries.push(QuasiFaithfulEntry {
            name: name.clone(),
            faithful,
            curve,
            high_success,
            consistent: high_success == faithful,
        });
    }
    Ok(QuasiFaithfulReport {
        excluded,
        consistent: entries.iter().all(|e| e.consistent),
        states: entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlipRun {
    pub preferred: String,
    pub order: OrderSpec,
    /// One curve per state, in input order.
    pub curves: Vec<ConvergenceCurve>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlipReport {
    pub states: Vec<String>,
    pub classes: Vec<usize>,
    pub runs: Vec<FlipRun>,
    pub consistent: bool,
}

/// Two minimal states with different graphs and the same distribution: an
/// order preferring either graph's class converges to that state's truth and
/// away from the other's.
pub fn order_flip(
    pair: &[(String, CausalState)],
    test: &TestConfig,
    schedule: &Schedule,
) -> Result<FlipReport> {
    let [(n1, s1), (n2, s2)] = pair else {
        return Err(Error::Config(
            "the order-flip experiment takes exactly two fixtures".into(),
        ));
    };
    if s1.k() != s2.k()
        || !s1.table().same_shape(s2.table())
        || tv_distance(s1.table(), s2.table()) > 1e-12
    {
        return Err(Error::Precondition(
            "the two states must share one distribution".into(),
        ));
    }
    let profile = DistributionProfile::new(s1.table())?;
    for (n, s) in pair {
        if !profile.is_minimal(s.graph())? {
            return Err(Error::Precondition(format!("state `{n}` is not minimal")));
        }
    }
    let classes = [
        profile.space().class_of(s1.graph())?.id,
        profile.space().class_of(s2.graph())?.id,
    ];
    if classes[0] == classes[1] {
        return Err(Error::Precondition(
            "the two graphs are Markov equivalent".into(),
        ));
    }

    let plan = schedule.plan(s1.clone());
    let mut runs = Vec::new();
    let mut consistent = true;
    for (i, name) in [n1, n2].into_iter().enumerate() {
        let spec = OrderSpec::Prefer(classes[i]);
        let outcomes = run_trials(&plan, &learner(s1.k(), &spec, test)?)?;
        let curves: Vec<ConvergenceCurve> = classes
            .iter()
            .map(|&c| curve_from_outcomes(&plan, c, &outcomes))
            .collect();
        consistent &=
            curves[i].terminal_rate() >= HIGH_RATE && curves[1 - i].terminal_rate() <= LOW_RATE;
        runs.push(FlipRun {
            preferred: name.clone(),
            order: spec,
            curves,
        });
    }
    Ok(FlipReport {
        states: vec![n1.clone(), n2.clone()],
        classes: classes.to_vec(),
        runs,
        consistent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceTrial {
    pub accepted: StatementSet,
    pub output_class: usize,
    /// `ℐ(output) ⊆ S` and no fitting class has a strictly larger set.
    pub relation_holds: bool,
    pub accepted_equals_ip: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub n: usize,
    pub independence_set: StatementSet,
    pub trials: Vec<TraceTrial>,
    pub relation_rate: f64,
    /// Fraction of trials where the relation holds and `S = ℐ(P)`.
    pub exact_rate: f64,
    pub consistent: bool,
}

/// Records the accepted set and output for every trial at the terminal
/// sample size and checks that the output's entailment set fits inside the
/// accepted set maximally.
pub fn acceptance_trace(method: &dyn LearningMethod, plan: &TrialPlan) -> Result<TraceReport> {
    let profile = DistributionProfile::new(plan.state.table())?;
    let n = plan.terminal_n();
    let terminal = TrialPlan {
        n_grid: vec![n],
        ..plan.clone()
    };
    let outcomes = run_trials(&terminal, method)?.pop().unwrap_or_default();
    let classes = method.space().classes();
    let trials: Vec<TraceTrial> = outcomes
        .into_iter()
        .map(|o| {
            let out = &classes[o.class_id].iset;
            let fits = out.is_subset(&o.accepted);
            let maximal = !classes
                .iter()
                .any(|h| h.iset.is_subset(&o.accepted) && out.is_strict_subset(&h.iset));
            TraceTrial {
                accepted_equals_ip: o.accepted == *profile.iset(),
                relation_holds: fits && maximal,
                output_class: o.class_id,
                accepted: o.accepted,
            }
        })
        .collect();
    let total = trials.len() as f64;
    let relation_rate = trials.iter().filter(|t| t.relation_holds).count() as f64 / total;
    let exact_rate = trials
        .iter()
        .filter(|t| t.relation_holds && t.accepted_equals_ip)
        .count() as f64
        / total;
    Ok(TraceReport {
        n,
        independence_set: profile.iset().clone(),
        consistent: relation_rate == 1.0 && exact_rate >= HIGH_RATE,
        trials,
        relation_rate,
        exact_rate,
    })
}
