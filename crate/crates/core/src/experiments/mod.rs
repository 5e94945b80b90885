//! Monte-Carlo convergence experiments.
//!
//! Every trial draws a fresh sample with seed `derive_seed(base, [n, trial])`,
//! so results depend only on the plan and never on scheduling. Convergence is
//! reported as success-rate curves with 95% Wilson intervals; "high" means a
//! terminal rate of at least [`HIGH_RATE`] and "low" at most [`LOW_RATE`].

mod config;
mod replay;
mod suites;
mod uniformity;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{is_markov, CausalState};
use crate::learner::{LearnOutcome, LearningMethod};
use crate::sampling::{derive_seed, draw};
use crate::{Error, Result};

pub use config::{run_config, ExperimentKind, RunConfig, RunOutput, SCHEMA_VERSION};
pub use replay::{nonminimal_replay, ReplayReport};
pub use suites::{
    acceptance_trace, order_flip, quasi_faithful_suite, verify_classification_behavior,
    ClassificationReport, Expectation, FlipReport, FlipRun, OrderRun, QuasiFaithfulEntry,
    QuasiFaithfulReport, Regime, Sacrifice, StateVerdict, TraceReport, TraceTrial,
};
pub use uniformity::{
    uniformity_probe, ProbeCurve, UniformityReport, NO_VIOLATION, UNIFORMITY_RATE, VIOLATION,
};

pub const HIGH_RATE: f64 = 0.95;
pub const LOW_RATE: f64 = 0.05;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Sample sizes, trials per size and base seed, shared by every state in a
/// suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub base_seed: u64,
}

impl Schedule {
    pub fn new(n_grid: Vec<usize>, trials_per_n: usize, base_seed: u64) -> Result<Self> {
        validate_schedule(&n_grid, trials_per_n)?;
        Ok(Schedule {
            n_grid,
            trials_per_n,
            base_seed,
        })
    }

    pub fn plan(&self, state: CausalState) -> TrialPlan {
        TrialPlan {
            state,
            n_grid: self.n_grid.clone(),
            trials_per_n: self.trials_per_n,
            base_seed: self.base_seed,
        }
    }
}

/// A state together with the sampling schedule for it.
#[derive(Clone, Debug, Serialize)]
pub struct TrialPlan {
    pub state: CausalState,
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub base_seed: u64,
}

impl TrialPlan {
    pub fn new(
        state: CausalState,
        n_grid: Vec<usize>,
        trials_per_n: usize,
        base_seed: u64,
    ) -> Result<Self> {
        validate_schedule(&n_grid, trials_per_n)?;
        Ok(TrialPlan {
            state,
            n_grid,
            trials_per_n,
            base_seed,
        })
    }

    pub fn with_state(&self, state: CausalState) -> TrialPlan {
        TrialPlan {
            state,
            ..self.clone()
        }
    }

    pub fn terminal_n(&self) -> usize {
        *self.n_grid.last().expect("validated grid is nonempty")
    }
}

pub(crate) fn validate_schedule(n_grid: &[usize], trials: usize) -> Result<()> {
    if n_grid.is_empty() || n_grid[0] == 0 {
        return Err(Error::Config(
            "n_grid must be nonempty with positive sizes".into(),
        ));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("n_grid must be strictly increasing".into()));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    Ok(())
}

/// `(lo, hi)` of the 95% Wilson score interval.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
    /// How often each class id was output.
    pub outputs: BTreeMap<usize, usize>,
}

impl CurvePoint {
    fn from_outputs(n: usize, target: usize, outputs: &[usize]) -> Self {
        let successes = outputs.iter().filter(|&&c| c == target).count();
        let trials = outputs.len();
        let (lo, hi) = wilson_interval(successes, trials);
        let mut tally = BTreeMap::new();
        for &c in outputs {
            *tally.entry(c).or_insert(0) += 1;
        }
        CurvePoint {
            n,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            lo,
            hi,
            outputs: tally,
        }
    }

    /// The most frequent output, smallest id on ties.
    pub fn modal_output(&self) -> Option<usize> {
        self.outputs
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&c, _)| c)
    }

    pub fn rate_of(&self, class_id: usize) -> f64 {
        self.outputs.get(&class_id).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Success rates for one target class along a sample-size grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceCurve {
    pub target_class: usize,
    pub points: Vec<CurvePoint>,
}

impl ConvergenceCurve {
    pub fn terminal(&self) -> &CurvePoint {
        self.points.last().expect("curves have at least one point")
    }

    pub fn terminal_rate(&self) -> f64 {
        self.terminal().rate
    }

    /// The terminal rate is no lower than the first.
    pub fn trend_ok(&self) -> bool {
        self.terminal_rate() >= self.points[0].rate
    }

    /// Once the error rate drops below one half, each later grid point cuts it
    /// at least in half (or to zero).
    pub fn error_decay_ok(&self) -> bool {
        self.points.windows(2).all(|w| {
            let (a, b) = (1.0 - w[0].rate, 1.0 - w[1].rate);
            a >= 0.5 || b == 0.0 || b <= a / 2.0
        })
    }
}

/// Output class of every trial, grouped by sample size.
pub fn run_trials(plan: &TrialPlan, method: &dyn LearningMethod) -> Result<Vec<Vec<LearnOutcome>>> {
    if method.space().k() != plan.state.k() {
        return Err(Error::DimensionMismatch(format!(
            "learner over {} variables, state over {}",
            method.space().k(),
            plan.state.k()
        )));
    }
    plan.n_grid
        .iter()
        .map(|&n| {
            (0..plan.trials_per_n)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(plan.base_seed, &[n as u64, t as u64]);
                    method.learn_outcome(&draw(plan.state.table(), n, seed))
                })
                .collect()
        })
        .collect()
}

pub(crate) fn curve_from_outcomes(
    plan: &TrialPlan,
    target: usize,
    outcomes: &[Vec<LearnOutcome>],
) -> ConvergenceCurve {
    let points = plan
        .n_grid
        .iter()
        .zip(outcomes)
        .map(|(&n, outs)| {
            let ids: Vec<usize> = outs.iter().map(|o| o.class_id).collect();
            CurvePoint::from_outputs(n, target, &ids)
        })
        .collect();
    ConvergenceCurve {
        target_class: target,
        points,
    }
}

/// Success of `method` at recovering the class of `plan.state`'s graph.
pub fn run_convergence(plan: &TrialPlan, method: &dyn LearningMethod) -> Result<ConvergenceCurve> {
    let target = method.space().class_of(plan.state.graph())?.id;
    run_convergence_for(plan, method, target)
}

/// Like [`run_convergence`] but scoring against an arbitrary class.
pub fn run_convergence_for(
    plan: &TrialPlan,
    method: &dyn LearningMethod,
    target: usize,
) -> Result<ConvergenceCurve> {
    if !is_markov(plan.state.graph(), plan.state.table())? {
        return Err(Error::NotMarkov);
    }
    let outcomes = run_trials(plan, method)?;
    Ok(curve_from_outcomes(plan, target, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::Learner;
    use crate::states::fixture;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-4);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo, hi) = wilson_interval(200, 200);
        assert!(lo > 0.98 && hi == 1.0);
    }

    #[test]
    fn plan_validation() {
        let s = fixture("point_mass").unwrap().state();
        assert!(TrialPlan::new(s.clone(), vec![100, 10], 5, 1).is_err());
        assert!(TrialPlan::new(s.clone(), vec![], 5, 1).is_err());
        assert!(TrialPlan::new(s.clone(), vec![10], 0, 1).is_err());
        assert!(TrialPlan::new(s, vec![10, 100], 1, 1).is_ok());
    }

    #[test]
    fn point_mass_always_succeeds() {
        let plan =
            TrialPlan::new(fixture("point_mass").unwrap().state(), vec![10, 100], 20, 7).unwrap();
        let curve = run_convergence(&plan, &Learner::with_default_order(2).unwrap()).unwrap();
        assert!(curve.points.iter().all(|p| p.rate == 1.0));
        assert!(curve.trend_ok() && curve.error_decay_ok());
    }

    #[test]
    fn convergence_is_deterministic() {
        let plan = TrialPlan::new(
            fixture("generic_chain").unwrap().state(),
            vec![100, 1000],
            16,
            3,
        )
        .unwrap();
        let l = Learner::with_default_order(3).unwrap();
        assert_eq!(
            run_convergence(&plan, &l).unwrap(),
            run_convergence(&plan, &l).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch() {
        let plan = TrialPlan::new(fixture("point_mass").unwrap().state(), vec![10], 2, 1).unwrap();
        assert!(run_convergence(&plan, &Learner::with_default_order(3).unwrap()).is_err());
    }

    #[test]
    fn decay_rule() {
        let mk = |rates: &[f64]| ConvergenceCurve {
            target_class: 0,
            points: rates
                .iter()
                .map(|&r| CurvePoint {
                    n: 1,
                    trials: 100,
                    successes: (r * 100.0) as usize,
                    rate: r,
                    lo: 0.0,
                    hi: 1.0,
                    outputs: BTreeMap::new(),
                })
                .collect(),
        };
        assert!(mk(&[0.2, 0.8, 0.95, 1.0]).error_decay_ok());
        assert!(!mk(&[0.8, 0.85]).error_decay_ok());
        assert!(mk(&[0.2, 0.3]).error_decay_ok());
    }
}
