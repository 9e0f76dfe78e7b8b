//! JSON wire formats for instances and schedules.
//!
//! Instance: `{"n":2,"m":1,"k":1,"jobs":[[{"p":1,"d":1},null]]}` with
//! `jobs[i][j]` the job of client `j+1` on day `i+1`; `"machines"` is written
//! only when it differs from 1 and `"k_per_client"` replaces `"k"` for
//! per-client fairness. Schedule: `{"days":[[1,3],[]]}` with 1-based clients.
//! Serialization is compact JSON followed by a newline.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::{Fairness, Instance, Job, Schedule};

#[derive(Serialize)]
struct JobOut {
    p: u64,
    d: u64,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    n: usize,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    machines: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_per_client: Option<&'a [usize]>,
    jobs: Vec<Vec<Option<JobOut>>>,
}

pub fn instance_to_json(inst: &Instance) -> String {
    let (k, k_per_client) = match inst.fairness() {
        Fairness::Uniform(k) => (Some(*k), None),
        Fairness::PerClient(ks) => (None, Some(ks.as_slice())),
    };
    let out = InstanceOut {
        n: inst.n(),
        m: inst.m(),
        machines: (inst.machines() != 1).then_some(inst.machines()),
        k,
        k_per_client,
        jobs: inst
            .jobs()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|j| {
                        j.map(|j| JobOut {
                            p: j.processing_time,
                            d: j.due_date,
                        })
                    })
                    .collect()
            })
            .collect(),
    };
    let mut s = serde_json::to_string(&out).expect("instance serialization");
    s.push('\n');
    s
}

fn field_usize(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or_else(|| Error::Parse(format!("\"{key}\" must be a non-negative integer"))),
    }
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let root: Value =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;
    let n = field_usize(obj, "n")?.ok_or_else(|| Error::Parse("missing \"n\"".into()))?;
    let m = field_usize(obj, "m")?.ok_or_else(|| Error::Parse("missing \"m\"".into()))?;
    let machines = field_usize(obj, "machines")?.unwrap_or(1);
    if machines == 0 {
        return Err(Error::Parse("\"machines\" must be at least 1".into()));
    }

    let fairness = match (obj.get("k"), obj.get("k_per_client")) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse(
                "give either \"k\" or \"k_per_client\", not both".into(),
            ))
        }
        (Some(_), None) => Fairness::Uniform(field_usize(obj, "k")?.unwrap_or(0)),
        (None, Some(v)) => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Parse("\"k_per_client\" must be an array".into()))?;
            if arr.len() != n {
                return Err(Error::Parse(format!(
                    "\"k_per_client\" has {} entries, expected n = {n}",
                    arr.len()
                )));
            }
            let ks = arr
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_u64().map(|x| x as usize).ok_or_else(|| {
                        Error::Parse(format!(
                            "k_per_client entry for client {} must be a non-negative integer",
                            j + 1
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Fairness::PerClient(ks)
        }
        (None, None) => return Err(Error::Parse("missing \"k\" or \"k_per_client\"".into())),
    };

    let rows = obj
        .get("jobs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"jobs\" array".into()))?;
    if rows.len() != m {
        return Err(Error::Parse(format!(
            "\"jobs\" has {} day rows, expected m = {m}",
            rows.len()
        )));
    }
    let mut jobs = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("day {}: row must be an array", i + 1)))?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "day {}: {} entries, expected n = {n}",
                i + 1,
                row.len()
            )));
        }
        let mut parsed = Vec::with_capacity(n);
        for (j, cell) in row.iter().enumerate() {
            let at = || format!("day {}, client {}", i + 1, j + 1);
            if cell.is_null() {
                parsed.push(None);
                continue;
            }
            let cell = cell
                .as_object()
                .ok_or_else(|| Error::Parse(format!("{}: job must be an object or null", at())))?;
            let num = |key: &str| -> Result<u64> {
                let v = cell
                    .get(key)
                    .ok_or_else(|| Error::Parse(format!("{}: missing \"{key}\"", at())))?;
                v.as_u64().ok_or_else(|| {
                    Error::Parse(format!("{}: \"{key}\" must be a non-negative integer", at()))
                })
            };
            let (p, d) = (num("p")?, num("d")?);
            if p == 0 {
                return Err(Error::Parse(format!("{}: processing time must be at least 1", at())));
            }
            if d < p {
                return Err(Error::Parse(format!("{}: due_date < processing_time", at())));
            }
            parsed.push(Some(Job {
                processing_time: p,
                due_date: d,
            }));
        }
        jobs.push(parsed);
    }
    Instance::new(n, m, jobs, fairness, machines).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct ScheduleWire {
    days: Vec<Vec<usize>>,
}

pub fn schedule_to_json(sched: &Schedule) -> String {
    let wire = ScheduleWire {
        days: sched
            .days
            .iter()
            .map(|d| d.iter().map(|c| c + 1).collect())
            .collect(),
    };
    let mut s = serde_json::to_string(&wire).expect("schedule serialization");
    s.push('\n');
    s
}

pub fn parse_schedule(bytes: &[u8]) -> Result<Schedule> {
    let wire: ScheduleWire =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("malformed schedule: {e}")))?;
    let mut days = Vec::with_capacity(wire.days.len());
    for (i, day) in wire.days.into_iter().enumerate() {
        let mut set = Vec::with_capacity(day.len());
        for c in day {
            if c == 0 {
                return Err(Error::Parse(format!(
                    "day {}: client indices are 1-based",
                    i + 1
                )));
            }
            set.push(c - 1);
        }
        days.push(set);
    }
    Ok(Schedule::new(days))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_instance() {
        let inst = parse_instance(br#"{"n":1,"m":1,"k":1,"jobs":[[{"p":1,"d":1}]]}"#).unwrap();
        let job = inst.job(0, 0).unwrap();
        assert_eq!((job.start(), job.end()), (0, 1));
    }

    #[test]
    fn rejects_due_before_processing() {
        let err = parse_instance(br#"{"n":1,"m":1,"k":1,"jobs":[[{"p":3,"d":2}]]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("due_date < processing_time"), "{err}");
        assert!(err.contains("day 1, client 1"), "{err}");
    }

    #[test]
    fn rejects_bad_dimensions_and_negatives() {
        assert!(parse_instance(br#"{"n":2,"m":1,"k":1,"jobs":[[{"p":1,"d":1}]]}"#).is_err());
        let err = parse_instance(br#"{"n":1,"m":1,"k":1,"jobs":[[{"p":-1,"d":1}]]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("non-negative"), "{err}");
        assert!(parse_instance(b"{not json").is_err());
    }

    #[test]
    fn absent_jobs_machines_and_per_client_round_trip() {
        let text = "{\"n\":2,\"m\":1,\"machines\":2,\"k_per_client\":[1,0],\"jobs\":[[{\"p\":1,\"d\":1},null]]}\n";
        let inst = parse_instance(text.as_bytes()).unwrap();
        assert_eq!(inst.machines(), 2);
        assert!(inst.job(0, 1).is_none());
        assert_eq!(instance_to_json(&inst), text);
    }

    #[test]
    fn schedule_round_trip() {
        let s = Schedule::new(vec![vec![2, 0], vec![]]);
        let text = schedule_to_json(&s);
        assert_eq!(text, "{\"days\":[[1,3],[]]}\n");
        assert_eq!(parse_schedule(text.as_bytes()).unwrap(), s);
        assert!(parse_schedule(br#"{"days":[[0]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn instance_round_trip(
            n in 1usize..5, m in 1usize..4, k in 0usize..4,
            cells in prop::collection::vec(prop::option::weighted(0.85, (1u64..6, 0u64..6)), 20),
        ) {
            let jobs = (0..m).map(|i| (0..n).map(|j| {
                cells[(i * n + j) % cells.len()].map(|(p, extra)| Job::pd(p, p + extra))
            }).collect()).collect();
            let inst = Instance::new(n, m, jobs, Fairness::Uniform(k), 1).unwrap();
            let text = instance_to_json(&inst);
            prop_assert_eq!(parse_instance(text.as_bytes()).unwrap(), inst);
        }
    }
}
