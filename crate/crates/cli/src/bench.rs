use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use fairsched::format::parse_instance;
use fairsched::gen::{random_instance_seeded, GenOptions};
use fairsched::specialcase::{solve_any, solve_with, Algorithm, DispatchConfig};
use fairsched::Instance;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Twosat,
    Matching,
    Chromatic,
    Daydue,
    Treewidth,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Suite file with one `<instance path> <algorithm|auto>` per line.
    #[arg(long, conflicts_with = "family")]
    suite: Option<PathBuf>,
    /// Generated family, timed at each of --sizes clients.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, env = "FAIRSCHED_SEED", default_value_t = 0)]
    seed: u64,
    /// Rows timed concurrently. Keep 1 for undisturbed timings.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    label: String,
    algorithm: String,
    n: usize,
    m: usize,
    answer: String,
    median_ms: f64,
    repeats: usize,
}

struct Case {
    label: String,
    /// A suite row whose file cannot be read or parsed carries the error.
    instance: Result<Instance, String>,
    algorithm: Option<Algorithm>,
}

fn family_instance(family: Family, n: usize, m: usize, seed: u64) -> (Instance, Algorithm) {
    let base = GenOptions {
        n,
        m,
        max_p: 8,
        max_d: 4 * n as u64,
        ..Default::default()
    };
    let (opts, alg) = match family {
        Family::Twosat => (GenOptions { k: Some(m - 1), ..base }, Algorithm::TwoSat),
        Family::Matching => (
            GenOptions {
                unit_p: true,
                max_d: (n / 2).max(1) as u64,
                k: Some(m / 2),
                ..base
            },
            Algorithm::Matching,
        ),
        Family::Chromatic => (
            GenOptions {
                day_independent_p: true,
                day_independent_d: true,
                k: Some(2),
                ..base
            },
            Algorithm::Chromatic,
        ),
        Family::Daydue => (
            GenOptions {
                day_independent_d: true,
                max_d: 2 * n as u64,
                k: Some(1),
                ..base
            },
            Algorithm::DayDue,
        ),
        Family::Treewidth => (
            GenOptions {
                max_p: 3,
                max_d: 3 * n as u64,
                k: Some(1),
                ..base
            },
            Algorithm::Treewidth,
        ),
    };
    (random_instance_seeded(&opts, seed), alg)
}

fn load_suite(path: &PathBuf) -> anyhow::Result<Vec<Case>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dir = path.parent().map(PathBuf::from).unwrap_or_default();
    let mut cases = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let file = parts.next().unwrap_or_default();
        let alg = parts.next().unwrap_or("auto");
        let algorithm = match alg {
            "auto" => None,
            name => Some(
                Algorithm::from_name(name).ok_or_else(|| anyhow!("line {}: unknown algorithm {name}", lineno + 1))?,
            ),
        };
        let p = dir.join(file);
        let instance = fs::read(&p)
            .map_err(|e| format!("reading {}: {e}", p.display()))
            .and_then(|bytes| parse_instance(&bytes).map_err(|e| e.to_string()));
        cases.push(Case {
            label: file.to_string(),
            instance,
            algorithm,
        });
    }
    Ok(cases)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Least-squares slope of `ln t` against `ln n`.
fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, t)| *n > 0.0 && *t > 0.0)
        .map(|(n, t)| (n.ln(), t.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn time_case(case: &Case, repeat: usize) -> Row {
    let requested = case.algorithm.map_or("auto".into(), |a| a.to_string());
    let inst = match &case.instance {
        Ok(inst) => inst,
        Err(e) => {
            return Row {
                label: case.label.clone(),
                algorithm: requested,
                n: 0,
                m: 0,
                answer: format!("error: {e}"),
                median_ms: f64::NAN,
                repeats: 0,
            }
        }
    };
    let config = DispatchConfig::default();
    let mut times = Vec::with_capacity(repeat);
    let mut answer = String::new();
    let mut algorithm = requested.clone();
    for _ in 0..repeat {
        let t0 = Instant::now();
        let out = match case.algorithm {
            Some(a) => solve_with(inst, a, &config),
            None => solve_any(inst, &config),
        };
        times.push(t0.elapsed().as_secs_f64() * 1e3);
        match out {
            Ok(o) => {
                answer = format!("{:?}", o.answer).to_lowercase();
                algorithm = o.algorithm.to_string();
            }
            Err(e) => answer = format!("error: {e}"),
        }
    }
    Row {
        label: case.label.clone(),
        algorithm,
        n: inst.n(),
        m: inst.m(),
        answer,
        median_ms: median(times),
        repeats: repeat,
    }
}

pub fn run(args: &BenchArgs) -> anyhow::Result<u8> {
    if args.repeat == 0 {
        bail!("--repeat must be positive");
    }
    let cases = match (&args.suite, args.family) {
        (Some(p), _) => load_suite(p)?,
        (None, Some(f)) => {
            if args.m < 2 {
                bail!("--m must be at least 2");
            }
            args.sizes
                .iter()
                .map(|&n| {
                    let (instance, alg) = family_instance(f, n, args.m, args.seed);
                    Case {
                        label: format!("{}-n{n}", alg.name()),
                        instance: Ok(instance),
                        algorithm: Some(alg),
                    }
                })
                .collect()
        }
        (None, None) => bail!("pass --suite or --family"),
    };

    let jobs = args.jobs.max(1);
    let mut rows: Vec<Row> = Vec::with_capacity(cases.len());
    for chunk in cases.chunks(jobs) {
        let timed: Vec<Row> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk.iter().map(|case| scope.spawn(|| time_case(case, args.repeat))).collect();
            handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
        });
        rows.extend(timed);
    }

    let mut writer: csv::Writer<Box<dyn std::io::Write>> = csv::Writer::from_writer(match &args.out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    });
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush()?;

    let mut by_alg: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows.iter().filter(|r| !r.answer.starts_with("error")) {
        by_alg.entry(&row.algorithm).or_default().push((row.n as f64, row.median_ms));
    }
    for (alg, pts) in by_alg {
        if let Some(s) = log_log_slope(&pts) {
            eprintln!("{alg}: log-log slope {s:.2} over {} sizes", pts.len());
        }
    }
    Ok(0)
}
