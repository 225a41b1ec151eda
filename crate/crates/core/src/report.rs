//! Randomized exact-check harness shared by the identity, divergence and
//! Lie-algebra suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graded::{random_homogeneous_with, GradedSpace, Supernumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub seed: u64,
    /// Samples per argument-parity pattern.
    pub samples: usize,
    pub max_degree: u32,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { seed: 42, samples: 100, max_degree: 2 }
    }
}

impl CheckParams {
    pub fn with_seed(seed: u64) -> Self {
        CheckParams { seed, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

/// Reports keep at most this many failures; `failure_count` has the total.
pub const MAX_RECORDED_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub spec: String,
    pub seed: u64,
    pub params: CheckParams,
    pub trials: usize,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
    /// Extra measurements that never affect `passed`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(suite: &str, spec: &str, params: CheckParams) -> Self {
        CheckReport {
            suite: suite.to_string(),
            spec: spec.to_string(),
            seed: params.seed,
            params,
            trials: 0,
            failure_count: 0,
            failures: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn push_failure(&mut self, f: Failure) {
        self.failure_count += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(f);
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One comparison inside a trial.
pub struct Comparison {
    pub case: Option<String>,
    pub lhs: Supernumber,
    pub rhs: Supernumber,
}

impl Comparison {
    pub fn new(lhs: Supernumber, rhs: Supernumber) -> Self {
        Comparison { case: None, lhs, rhs }
    }

    pub fn labeled(case: impl Into<String>, lhs: Supernumber, rhs: Supernumber) -> Self {
        Comparison { case: Some(case.into()), lhs, rhs }
    }
}

/// Outcome of a single trial: asserted comparisons plus named boolean
/// observations that are tallied but never fail the report.
#[derive(Default)]
pub struct TrialOutcome {
    pub comparisons: Vec<Comparison>,
    pub observations: Vec<(&'static str, bool)>,
}

impl From<Vec<Comparison>> for TrialOutcome {
    fn from(comparisons: Vec<Comparison>) -> Self {
        TrialOutcome { comparisons, observations: Vec::new() }
    }
}

/// Per-trial generator: ChaCha8 keyed by the master seed, one stream per
/// trial, so parallel and serial runs draw identical inputs.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws homogeneous arguments for a parity pattern.
pub fn draw_args(
    space: &Arc<GradedSpace>,
    parities: &[u8],
    max_degree: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Supernumber>> {
    parities
        .iter()
        .map(|&p| {
            let s = rng.next_u64();
            random_homogeneous_with(space, p, max_degree, &mut crate::graded::rng_from_seed(s))
        })
        .collect()
}

/// All parity patterns of length `n` admissible in `space` (odd entries
/// need a fermionic coordinate).
pub fn parity_patterns(space: &GradedSpace, n: usize) -> Vec<Vec<u8>> {
    let available: &[u8] = if space.n_fermions() > 0 { &[0, 1] } else { &[0] };
    parity_patterns_for(available, n)
}

/// All parity patterns of length `n` whose entries lie in `available`.
pub fn parity_patterns_for(available: &[u8], n: usize) -> Vec<Vec<u8>> {
    (0u32..(1 << n))
        .map(|m| (0..n).map(|i| ((m >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|p| p.iter().all(|b| available.contains(b)))
        .collect()
}

/// Runs `samples` trials for every parity pattern of `n_args` arguments.
///
/// Trial `t` uses stream `t` of the master seed; results are merged in
/// trial order regardless of scheduling.
pub fn run_trials<F>(
    report: &mut CheckReport,
    space: &Arc<GradedSpace>,
    n_args: usize,
    params: &CheckParams,
    body: F,
) -> Result<()>
where
    F: Fn(&[Supernumber], &[u8]) -> Result<TrialOutcome> + Sync,
{
    let patterns = parity_patterns(space, n_args);
    let jobs: Vec<(u64, &Vec<u8>)> = patterns
        .iter()
        .flat_map(|p| (0..params.samples).map(move |s| (s, p)))
        .enumerate()
        .map(|(t, (_, p))| (t as u64, p))
        .collect();
    let outcomes: Vec<Result<(Vec<String>, TrialOutcome)>> = jobs
        .par_iter()
        .map(|(t, pattern)| {
            let mut rng = trial_rng(params.seed, *t);
            let args = draw_args(space, pattern, params.max_degree, &mut rng)?;
            let out = body(&args, pattern)?;
            Ok((args.iter().map(|a| a.to_string()).collect(), out))
        })
        .collect();
    let mut tallies: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
    for o in outcomes {
        let (args, out) = o?;
        report.trials += 1;
        for c in out.comparisons {
            if c.lhs != c.rhs {
                report.push_failure(Failure {
                    args: args.clone(),
                    case: c.case,
                    lhs: c.lhs.to_string(),
                    rhs: c.rhs.to_string(),
                });
            }
        }
        for (k, held) in out.observations {
            let e = tallies.entry(k).or_default();
            e.0 += usize::from(held);
            e.1 += 1;
        }
    }
    for (k, (held, total)) in tallies {
        report.note(k, serde_json::json!({ "held": held, "total": total }));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_cover_all_parities() {
        let s: GradedSpace = "x:b,t:f".parse().unwrap();
        assert_eq!(parity_patterns(&s, 3).len(), 8);
        let b: GradedSpace = "x:b".parse().unwrap();
        assert_eq!(parity_patterns(&b, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn failures_are_capped_but_counted() {
        let mut r = CheckReport::new("t", "s", CheckParams::default());
        for _ in 0..(MAX_RECORDED_FAILURES + 5) {
            r.push_failure(Failure { args: vec![], case: None, lhs: "1".into(), rhs: "0".into() });
        }
        assert_eq!(r.failures.len(), MAX_RECORDED_FAILURES);
        assert_eq!(r.failure_count, MAX_RECORDED_FAILURES + 5);
        assert!(!r.passed());
    }
}
