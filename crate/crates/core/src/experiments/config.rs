//! JSON experiment configs and the report files they produce.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    acceptance_trace, nonminimal_replay, order_flip, quasi_faithful_suite, run_convergence,
    uniformity_probe, verify_classification_behavior, ConvergenceCurve, Schedule,
};
use crate::citest::TestConfig;
use crate::distributions::CausalState;
use crate::learner::{LearnerConfig, OrderSpec};
use crate::states::{fixture, fixture_names};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Convergence,
    Classification,
    OrderFlip,
    NonminimalReplay,
    Uniformity,
    QuasiFaithful,
    AcceptanceTrace,
}

fn default_grid() -> Vec<usize> {
    vec![100, 1_000, 10_000]
}

fn default_trials() -> usize {
    200
}

fn default_threshold() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_probes() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixtures: Option<Vec<String>>,
    #[serde(default = "default_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub order: OrderSpec,
    #[serde(default = "default_threshold")]
    pub threshold_constant: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

impl RunConfig {
    /// Parses and validates a config; every experiment needs an explicit seed.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.seed.is_none() {
            return Err(Error::Config("seed missing".into()));
        }
        TestConfig::new(self.threshold_constant)?;
        super::validate_schedule(&self.n_grid, self.trials)
    }

    fn schedule(&self) -> Result<Schedule> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Config("seed missing".into()))?;
        Schedule::new(self.n_grid.clone(), self.trials, seed)
    }

    fn single(&self, default: &str) -> Result<(String, CausalState)> {
        if self.fixtures.is_some() {
            return Err(Error::Config(
                "this experiment takes `fixture`, not `fixtures`".into(),
            ));
        }
        let name = self.fixture.as_deref().unwrap_or(default);
        Ok((name.to_string(), fixture(name)?.state()))
    }

    fn many(&self, default: &[&str]) -> Result<Vec<(String, CausalState)>> {
        if self.fixture.is_some() {
            return Err(Error::Config(
                "this experiment takes `fixtures`, not `fixture`".into(),
            ));
        }
        let names: Vec<String> = match &self.fixtures {
            Some(v) => v.clone(),
            None => default.iter().map(|s| s.to_string()).collect(),
        };
        names
            .into_iter()
            .map(|n| {
                let s = fixture(&n)?.state();
                Ok((n, s))
            })
            .collect()
    }

    fn learner_for(&self, k: usize) -> Result<crate::learner::Learner> {
        LearnerConfig {
            k,
            order: self.order.clone(),
            threshold_constant: self.threshold_constant,
        }
        .build()
    }
}

/// A finished run: the full report, the labelled curves, and whether every
/// consistency verdict passed.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Value,
    pub curves: Vec<(String, ConvergenceCurve)>,
    pub consistent: bool,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Columns `curve, n, trials, successes, rate, lo, hi`.
    pub fn curves_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["curve", "n", "trials", "successes", "rate", "lo", "hi"])?;
        for (label, c) in &self.curves {
            for p in &c.points {
                w.write_record([
                    label.clone(),
                    p.n.to_string(),
                    p.trials.to_string(),
                    p.successes.to_string(),
                    p.rate.to_string(),
                    p.lo.to_string(),
                    p.hi.to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `report.json` and `curves.csv` into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report_json())?;
        fs::write(dir.join("curves.csv"), self.curves_csv()?)?;
        Ok(())
    }
}

const CANCELLATION_PAIR: [&str; 2] = ["cancellation_collider", "cancellation_collider_swapped"];

pub fn run_config(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let schedule = cfg.schedule()?;
    let test = TestConfig::new(cfg.threshold_constant)?;
    let all = fixture_names();
    let mut curves = Vec::new();

    let (result, consistent) = match cfg.experiment {
        ExperimentKind::Convergence => {
            let (name, state) = cfg.single("generic_chain")?;
            let curve =
                run_convergence(&schedule.plan(state.clone()), &cfg.learner_for(state.k())?)?;
            curves.push((name.clone(), curve.clone()));
            (json!({ "fixture": name, "curve": curve }), true)
        }
        ExperimentKind::Classification => {
            let states = cfg.many(&all)?;
            let r = verify_classification_behavior(&states, &cfg.order, &test, &schedule)?;
            for v in &r.states {
                curves.push((v.name.clone(), v.curve.clone()));
                for o in &v.order_runs {
                    curves.push((format!("{}/{}", v.name, o.order), o.curve.clone()));
                }
            }
            (serde_json::to_value(&r)?, r.consistent)
        }
        ExperimentKind::OrderFlip => {
            let states = cfg.many(&CANCELLATION_PAIR)?;
            let r = order_flip(&states, &test, &schedule)?;
            for run in &r.runs {
                for (name, c) in r.states.iter().zip(&run.curves) {
                    curves.push((format!("{}/{name}", run.order), c.clone()));
                }
            }
            (serde_json::to_value(&r)?, r.consistent)
        }
        ExperimentKind::NonminimalReplay => {
            let (name, state) = cfg.single("degenerate_edge")?;
            let r = nonminimal_replay(&state, &cfg.learner_for(state.k())?, &schedule)?;
            curves.push(("s1".into(), r.s1_curve.clone()));
            curves.push(("s2".into(), r.s2_curve.clone()));
            curves.push(("s3".into(), r.s3_curve.clone()));
            (json!({ "fixture": name, "replay": r }), r.consistent)
        }
        ExperimentKind::Uniformity => {
            let (name, state) = cfg.single("generic_chain")?;
            let r = uniformity_probe(
                &state,
                cfg.epsilon,
                cfg.probes,
                &cfg.learner_for(state.k())?,
                &schedule,
            )?;
            curves.push(("center".into(), r.center_curve.clone()));
            for p in &r.probes {
                curves.push((format!("probe{}", p.probe), p.curve.clone()));
            }
            (json!({ "fixture": name, "uniformity": r }), r.consistent)
        }
        ExperimentKind::QuasiFaithful => {
            let states = cfg.many(&all)?;
            let r = quasi_faithful_suite(&states, &cfg.order, &test, &schedule)?;
            for e in &r.states {
                curves.push((e.name.clone(), e.curve.clone()));
            }
            (serde_json::to_value(&r)?, r.consistent)
        }
        ExperimentKind::AcceptanceTrace => {
            let (name, state) = cfg.single("generic_chain")?;
            let r = acceptance_trace(&cfg.learner_for(state.k())?, &schedule.plan(state))?;
            (json!({ "fixture": name, "trace": r }), r.consistent)
        }
    };

    let report = json!({
        "schema": SCHEMA_VERSION,
        "experiment": cfg.experiment,
        "config": cfg,
        "consistent": consistent,
        "result": result,
    });
    Ok(RunOutput {
        report,
        curves,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_required() {
        let err =
            RunConfig::from_json(r#"{"schema":1,"experiment":"classification"}"#).unwrap_err();
        assert!(err.to_string().contains("seed missing"));
    }

    #[test]
    fn unknown_fields_and_schema() {
        assert!(RunConfig::from_json(
            r#"{"schema":1,"experiment":"classification","seed":1,"sed":2}"#
        )
        .is_err());
        assert!(
            RunConfig::from_json(r#"{"schema":2,"experiment":"classification","seed":1}"#).is_err()
        );
        assert!(RunConfig::from_json(r#"{"schema":1,"experiment":"nope","seed":1}"#).is_err());
        let c = RunConfig::from_json(r#"{"schema":1,"experiment":"nonminimal_replay","seed":1}"#)
            .unwrap();
        assert_eq!(c.n_grid, vec![100, 1000, 10000]);
        assert_eq!(c.order, OrderSpec::Default);
    }

    #[test]
    fn replay_on_minimal_state_fails() {
        let c = RunConfig::from_json(
            r#"{"schema":1,"experiment":"nonminimal_replay","seed":1,"fixture":"generic_chain","n_grid":[100],"trials":2}"#,
        )
        .unwrap();
        assert_eq!(
            run_config(&c).unwrap_err().to_string(),
            "precondition: state is minimal"
        );
    }

    #[test]
    fn small_run_is_reproducible() {
        let c = RunConfig::from_json(
            r#"{"schema":1,"experiment":"convergence","seed":3,"fixture":"generic_chain","n_grid":[100,1000],"trials":10}"#,
        )
        .unwrap();
        let a = run_config(&c).unwrap();
        let b = run_config(&c).unwrap();
        assert_eq!(a.report_json(), b.report_json());
        let csv = a.curves_csv().unwrap();
        assert!(csv.starts_with("curve,n,trials,successes,rate,lo,hi\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
