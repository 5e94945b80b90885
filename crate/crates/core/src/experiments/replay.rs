//! The four-state construction showing that a learner which converges on a
//! minimal state must fail on a non-minimal state sharing its distribution.
//!
//! From a non-minimal `s0 = (G, P)`:
//! `s1 = (G′, P)` with `G′` minimal to `P` and `ℐ(G) ⊂ ℐ(G′)`;
//! `s2 = (G′, P′)` where the learner converges to `G′`'s class;
//! `s3 = (G, P′)`, which is sampled exactly like `s2` but has `G` as truth.

use serde::Serialize;

use super::uniformity::attempt;
use super::{curve_from_outcomes, run_trials, ConvergenceCurve, Schedule, HIGH_RATE};
use crate::distributions::{independence_set, tv_distance, CausalState, CptNetwork, JointTable};
use crate::graphs::Dag;
use crate::learner::LearningMethod;
use crate::sampling::derive_seed;
use crate::states::DistributionProfile;
use crate::{Error, Result};

const REPLAY_STREAM: u64 = 0x4c45_4d35;
const PERTURB_RADIUS: f64 = 0.05;
const ATTEMPTS: u64 = 64;

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub g: Dag,
    pub g_prime: Dag,
    /// Whether `P′` differs from `P`.
    pub perturbed: bool,
    pub p_prime_tv: f64,
    pub s1_curve: ConvergenceCurve,
    pub s2_curve: ConvergenceCurve,
    pub s3_curve: ConvergenceCurve,
    /// Per-sample outputs on `s2` and `s3` agree under shared seeds.
    pub identical_outputs: bool,
    pub s3_truth: usize,
    pub s3_output: Option<usize>,
    pub consistent: bool,
}

/// A distribution near `p` that is faithful to `g_prime`.
fn faithful_neighbor(g_prime: &Dag, p: &JointTable, base_seed: u64) -> Result<JointTable> {
    let net = CptNetwork::from_joint(g_prime.clone(), p)?;
    let target = crate::graphs::entailment_set(g_prime)?;
    for a in 0..ATTEMPTS {
        let seed = derive_seed(base_seed, &[REPLAY_STREAM, a]);
        if let Some(q) = attempt(&net, p, PERTURB_RADIUS, seed)? {
            if independence_set(&q)? == target {
                return Ok(q);
            }
        }
    }
    Err(Error::Precondition(
        "no faithful perturbation found for the minimal graph".into(),
    ))
}

pub fn nonminimal_replay(
    s0: &CausalState,
    method: &dyn LearningMethod,
    schedule: &Schedule,
) -> Result<ReplayReport> {
    let profile = DistributionProfile::new(s0.table())?;
    if profile.is_minimal(s0.graph())? {
        return Err(Error::Precondition("state is minimal".into()));
    }
    let g = s0.graph().clone();
    let g_prime = profile.minimal_supergraph(&g)?;
    let space = method.space();
    let (g_class, gp_class) = (space.class_of(&g)?.id, space.class_of(&g_prime)?.id);

    let s1 = CausalState::new(g_prime.clone(), s0.table().clone())?;
    let plan1 = schedule.plan(s1);
    let s1_curve = curve_from_outcomes(&plan1, gp_class, &run_trials(&plan1, method)?);

    let perturbed = s1_curve.terminal_rate() < HIGH_RATE;
    let p_prime = if perturbed {
        faithful_neighbor(&g_prime, s0.table(), schedule.base_seed)?
    } else {
        s0.table().clone()
    };
    let s2 = CausalState::new(g_prime.clone(), p_prime.clone())?;
    let s3 = CausalState::new(g.clone(), p_prime.clone())?;
    let (plan2, plan3) = (schedule.plan(s2), schedule.plan(s3));
    let out2 = run_trials(&plan2, method)?;
    let out3 = run_trials(&plan3, method)?;
    let s2_curve = curve_from_outcomes(&plan2, gp_class, &out2);
    let s3_curve = curve_from_outcomes(&plan3, g_class, &out3);

    let identical_outputs = out2 == out3;
    let s3_output = s3_curve.terminal().modal_output();
    let consistent = identical_outputs
        && s2_curve.terminal_rate() >= HIGH_RATE
        && s3_output.is_some_and(|c| c != g_class);
    Ok(ReplayReport {
        g,
        g_prime,
        perturbed,
        p_prime_tv: tv_distance(s0.table(), &p_prime),
        s1_curve,
        s2_curve,
        s3_curve,
        identical_outputs,
        s3_truth: g_class,
        s3_output,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::Learner;
    use crate::states::fixture;

    #[test]
    fn refuses_minimal_state() {
        let l = Learner::with_default_order(3).unwrap();
        let schedule = Schedule::new(vec![100], 2, 1).unwrap();
        let err = nonminimal_replay(&fixture("generic_chain").unwrap().state(), &l, &schedule)
            .unwrap_err();
        assert_eq!(err.to_string(), "precondition: state is minimal");
    }

    #[test]
    fn degenerate_edge_replay() {
        let l = Learner::with_default_order(2).unwrap();
        let schedule = Schedule::new(vec![100, 1000, 10_000], 40, 5).unwrap();
        let r =
            nonminimal_replay(&fixture("degenerate_edge").unwrap().state(), &l, &schedule).unwrap();
        assert_eq!(r.g_prime, Dag::empty(2));
        assert!(r.identical_outputs);
        assert!(r.consistent, "{r:?}");
    }
}
