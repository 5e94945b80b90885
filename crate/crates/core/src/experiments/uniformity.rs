//! Success rates over a ball of nearby states inside the center's hypothesis.
//!
//! Probes perturb the center's conditional probability tables rather than its
//! joint table, which keeps every probe Markov to the center graph. A probe is
//! kept only if it lies strictly inside the TV ball and has the center's
//! independence set. A finite probe set can refute uniform convergence but
//! never establish it, so the best verdict is [`NO_VIOLATION`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{run_convergence_for, ConvergenceCurve, Schedule};
use crate::distributions::{
    independence_set, is_markov, random_simplex_point, tv_distance, CausalState, CptNetwork,
    JointTable,
};
use crate::learner::LearningMethod;
use crate::sampling::derive_seed;
use crate::states::DistributionProfile;
use crate::{Error, Result};

pub const NO_VIOLATION: &str = "no violation found";
pub const VIOLATION: &str = "violation found";

/// Worst-case terminal success required for [`NO_VIOLATION`].
pub const UNIFORMITY_RATE: f64 = 0.9;

const PROBE_STREAM: u64 = 0x5052_4f42;
const ATTEMPTS: u64 = 64;
const HALVINGS: usize = 60;
const MAX_SHRINKS: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct ProbeCurve {
    pub probe: usize,
    pub tv: f64,
    pub curve: ConvergenceCurve,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    pub center: CausalState,
    pub center_u_minimal: bool,
    /// Set when the center is not u-minimal and the verdict carries no
    /// expectation.
    pub informational: bool,
    pub epsilon: f64,
    /// Radius actually used after any shrinking.
    pub effective_epsilon: f64,
    pub center_curve: ConvergenceCurve,
    pub probes: Vec<ProbeCurve>,
    pub max_tv: f64,
    pub inf_success_per_n: Vec<(usize, f64)>,
    pub verdict: &'static str,
    pub consistent: bool,
}

fn mixed_network(net: &CptNetwork, lambda: f64, noise: &[Vec<Vec<f64>>]) -> Result<CptNetwork> {
    let cpts = net
        .cpts()
        .iter()
        .zip(noise)
        .map(|(rows, nrows)| {
            rows.iter()
                .zip(nrows)
                .map(|(r, q)| {
                    r.iter()
                        .zip(q)
                        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
                        .collect()
                })
                .collect()
        })
        .collect();
    CptNetwork::new(net.dag().clone(), net.vars().clone(), cpts)
}

/// One probe attempt: random CPT rows mixed in at the largest weight
/// `2^-j` that lands strictly inside the ball.
pub(super) fn attempt(
    net: &CptNetwork,
    center: &JointTable,
    eps: f64,
    seed: u64,
) -> Result<Option<JointTable>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Vec<Vec<f64>>> = net
        .cpts()
        .iter()
        .map(|rows| {
            rows.iter()
                .map(|r| random_simplex_point(r.len(), &mut rng))
                .collect()
        })
        .collect();
    let mut lambda = 1.0;
    for _ in 0..HALVINGS {
        let q = mixed_network(net, lambda, &noise)?.joint_of();
        if tv_distance(center, &q) < eps {
            return Ok(Some(q));
        }
        lambda /= 2.0;
    }
    Ok(None)
}

fn generate_probes(
    center: &CausalState,
    eps: f64,
    count: usize,
    base_seed: u64,
) -> Result<Option<Vec<JointTable>>> {
    let net = CptNetwork::from_joint(center.graph().clone(), center.table())?;
    let target = independence_set(center.table())?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut found = None;
        for a in 0..ATTEMPTS {
            let seed = derive_seed(base_seed, &[PROBE_STREAM, i as u64, a]);
            if let Some(q) = attempt(&net, center.table(), eps, seed)? {
                if is_markov(center.graph(), &q)? && independence_set(&q)? == target {
                    found = Some(q);
                    break;
                }
            }
        }
        match found {
            Some(q) => out.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Measures `method` on `probes` perturbed states within TV distance
/// `epsilon` of `center`, all with the same sampling seeds.
///
/// If no acceptable probe is found, the radius is halved (with a warning)
/// and generation restarts. `epsilon = 0` yields exact copies of the center.
pub fn uniformity_probe(
    center: &CausalState,
    epsilon: f64,
    probes: usize,
    method: &dyn LearningMethod,
    schedule: &Schedule,
) -> Result<UniformityReport> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} not in [0,1]"
        )));
    }
    let profile = DistributionProfile::new(center.table())?;
    let center_u_minimal = profile.is_u_minimal(center.graph())?;
    let target = method.space().class_of(center.graph())?.id;

    let mut eps = epsilon;
    let tables = if eps == 0.0 {
        vec![center.table().clone(); probes]
    } else {
        let mut shrinks = 0;
        loop {
            if let Some(t) = generate_probes(center, eps, probes, schedule.base_seed)? {
                break t;
            }
            shrinks += 1;
            if shrinks > MAX_SHRINKS {
                return Err(Error::Precondition(format!(
                    "no probe inside the hypothesis within TV {eps} of the center"
                )));
            }
            log::warn!(
                "probe generation exhausted at epsilon {eps}; shrinking to {}",
                eps / 2.0
            );
            eps /= 2.0;
        }
    };

    let center_curve = run_convergence_for(&schedule.plan(center.clone()), method, target)?;
    let mut curves = Vec::with_capacity(tables.len());
    for (i, q) in tables.into_iter().enumerate() {
        let tv = tv_distance(center.table(), &q);
        let state = CausalState::new(center.graph().clone(), q)?;
        let curve = run_convergence_for(&schedule.plan(state), method, target)?;
        curves.push(ProbeCurve {
            probe: i,
            tv,
            curve,
        });
    }

    let inf_success_per_n: Vec<(usize, f64)> = schedule
        .n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let worst = curves
                .iter()
                .map(|c| c.curve.points[j].rate)
                .fold(center_curve.points[j].rate, f64::min);
            (n, worst)
        })
        .collect();
    let max_tv = curves.iter().map(|c| c.tv).fold(0.0, f64::max);
    let inside = eps == 0.0 || max_tv < eps;
    let terminal = inf_success_per_n.last().map_or(0.0, |&(_, r)| r);
    let verdict = if terminal >= UNIFORMITY_RATE {
        NO_VIOLATION
    } else {
        VIOLATION
    };

    Ok(UniformityReport {
        center: center.clone(),
        center_u_minimal,
        informational: !center_u_minimal,
        epsilon,
        effective_epsilon: eps,
        center_curve,
        probes: curves,
        max_tv,
        inf_success_per_n,
        verdict,
        consistent: inside && (verdict == NO_VIOLATION || !center_u_minimal),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::Learner;
    use crate::states::fixture;

    #[test]
    fn probes_stay_in_ball_and_hypothesis() {
        let center = fixture("generic_chain").unwrap().state();
        let probes = generate_probes(&center, 0.01, 5, 9).unwrap().unwrap();
        let iset = independence_set(center.table()).unwrap();
        for q in &probes {
            assert!(tv_distance(center.table(), q) < 0.01);
            assert!(tv_distance(center.table(), q) > 0.0);
            assert!(is_markov(center.graph(), q).unwrap());
            assert_eq!(independence_set(q).unwrap(), iset);
        }
    }

    #[test]
    fn zero_radius_reproduces_center() {
        let center = fixture("generic_chain").unwrap().state();
        let schedule = Schedule::new(vec![100, 1000], 10, 4).unwrap();
        let l = Learner::with_default_order(3).unwrap();
        let r = uniformity_probe(&center, 0.0, 3, &l, &schedule).unwrap();
        assert_eq!(r.max_tv, 0.0);
        for p in &r.probes {
            assert_eq!(p.curve, r.center_curve);
        }
        let rates: Vec<f64> = r.center_curve.points.iter().map(|p| p.rate).collect();
        let inf: Vec<f64> = r.inf_success_per_n.iter().map(|&(_, x)| x).collect();
        assert_eq!(rates, inf);
    }
}
