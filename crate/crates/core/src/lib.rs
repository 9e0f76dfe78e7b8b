//! Exact solvers, reductions and hardness gadgets for fair repetitive
//! interval scheduling.
//!
//! An instance has `n` clients and `m` days. On every day each client
//! submits a just-in-time job occupying `(d - p, d]`; a schedule picks a
//! conflict-free set of jobs per day, and it is `k`-fair when every client is
//! served on at least `k` days.

pub mod conflict;
pub mod error;
pub mod format;
pub mod gen;
pub mod ilp;
pub mod instance;
pub mod kernels;
pub mod oracle;
pub mod specialcase;
pub mod transform;
pub mod treewidth;

pub use error::{Error, Result};
pub use instance::{
    classify, verify_schedule, ClientId, DayId, Fairness, Instance, InstanceClass, Job, Schedule,
    VerificationReport,
};
pub use specialcase::{Answer, SolverOutcome};
