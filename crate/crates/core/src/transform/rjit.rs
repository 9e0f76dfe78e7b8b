//! Just-in-time scheduling on unrelated machines as a one-job-per-client
//! instance: every job is a client and every machine a day.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Fairness, Instance, Job};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JitJob {
    pub d: u64,
    /// Processing time on each machine.
    pub p: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnrelatedJit {
    pub machines: usize,
    pub jobs: Vec<JitJob>,
}

pub fn parse_unrelated_jit(bytes: &[u8]) -> Result<UnrelatedJit> {
    let input: UnrelatedJit =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("unrelated-machines JSON: {e}")))?;
    for (j, job) in input.jobs.iter().enumerate() {
        if job.p.len() != input.machines {
            return Err(Error::Parse(format!(
                "job {} lists {} processing times for {} machines",
                j + 1,
                job.p.len(),
                input.machines
            )));
        }
        if let Some(i) = job.p.iter().position(|&p| p == 0) {
            return Err(Error::Parse(format!("job {}, machine {}: processing time 0", j + 1, i + 1)));
        }
    }
    Ok(input)
}

/// Day `i` holds every job with its machine-`i` processing time; `k = 1`
/// asks for a machine on which each job runs exactly at its due date. A job
/// too long to finish by its due date on some machine has no job there.
pub fn import_unrelated_jit(input: &UnrelatedJit) -> Result<Instance> {
    let n = input.jobs.len();
    let rows = (0..input.machines)
        .map(|i| {
            input
                .jobs
                .iter()
                .map(|job| (job.p[i] <= job.d).then(|| Job::pd(job.p[i], job.d)))
                .collect()
        })
        .collect();
    Instance::new(n, input.machines, rows, Fairness::Uniform(1), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{solve_exhaustive, SearchBudget};

    fn yes(input: &UnrelatedJit) -> bool {
        let inst = import_unrelated_jit(input).unwrap();
        solve_exhaustive(&inst, &SearchBudget::default()).unwrap().is_yes()
    }

    fn job(d: u64, p: &[u64]) -> JitJob {
        JitJob { d, p: p.to_vec() }
    }

    #[test]
    fn one_machine() {
        assert!(yes(&UnrelatedJit { machines: 1, jobs: vec![job(2, &[2]), job(4, &[2])] }));
        assert!(!yes(&UnrelatedJit { machines: 1, jobs: vec![job(3, &[2]), job(3, &[2])] }));
    }

    #[test]
    fn two_machines() {
        let clique = UnrelatedJit { machines: 2, jobs: vec![job(4, &[3, 3]); 3] };
        assert!(!yes(&clique));
        let mut shrunk = clique.clone();
        shrunk.jobs[2].p[1] = 1;
        shrunk.jobs[1].d = 5;
        shrunk.jobs[1].p = vec![3, 1];
        assert!(yes(&shrunk));
    }

    #[test]
    fn parse_checks_lengths() {
        let ok = br#"{"machines":2,"jobs":[{"d":3,"p":[1,2]}]}"#;
        let inst = import_unrelated_jit(&parse_unrelated_jit(ok).unwrap()).unwrap();
        assert_eq!((inst.n(), inst.m()), (1, 2));
        assert!(parse_unrelated_jit(br#"{"machines":2,"jobs":[{"d":3,"p":[1]}]}"#).is_err());
        assert!(parse_unrelated_jit(br#"{"machines":1,"jobs":[{"d":3,"p":[0]}]}"#).is_err());
    }

    #[test]
    fn overlong_job_is_absent() {
        let inst = import_unrelated_jit(&UnrelatedJit { machines: 1, jobs: vec![job(1, &[2])] }).unwrap();
        assert!(!inst.is_total());
    }
}
