//! Text exports of the ILP for external solvers.

use std::fmt::Write as _;

use serde::Serialize;

use super::model::{IlpModel, Row};

/// `x_<type>_<clients>` with 1-based indices, `x_<type>_none` for the empty set.
pub fn variable_name(model: &IlpModel, var: usize) -> String {
    let v = &model.variables[var];
    if v.set.is_empty() {
        format!("x_{}_none", v.ty + 1)
    } else {
        let clients: Vec<String> = v.set.iter().map(|c| (c + 1).to_string()).collect();
        format!("x_{}_{}", v.ty + 1, clients.join("_"))
    }
}

fn write_row(out: &mut String, model: &IlpModel, row: &Row, sense: &str) {
    let _ = write!(out, " {}:", row.name);
    if row.vars.is_empty() {
        // LP syntax needs a variable on the left; a zero coefficient keeps
        // the row's meaning.
        let _ = write!(out, " 0 {}", variable_name(model, 0));
    }
    for (i, &v) in row.vars.iter().enumerate() {
        let sep = if i == 0 { " " } else { " + " };
        let _ = write!(out, "{sep}{}", variable_name(model, v));
    }
    let _ = writeln!(out, " {sense} {}", row.rhs);
}

/// CPLEX LP text of the feasibility problem with a zero objective.
pub fn to_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ fair interval scheduling feasibility model\n");
    out.push_str("Minimize\n obj:");
    if !model.variables.is_empty() {
        let _ = write!(out, " 0 {}", variable_name(model, 0));
    }
    out.push_str("\nSubject To\n");
    if !model.variables.is_empty() {
        for row in &model.equalities {
            write_row(&mut out, model, row, "=");
        }
        for row in &model.coverage {
            write_row(&mut out, model, row, ">=");
        }
    }
    out.push_str("Bounds\n");
    for v in 0..model.variables.len() {
        let _ = writeln!(out, " {} >= 0", variable_name(model, v));
    }
    out.push_str("General\n");
    for v in 0..model.variables.len() {
        let _ = writeln!(out, " {}", variable_name(model, v));
    }
    out.push_str("End\n");
    out
}

#[derive(Serialize)]
struct JsonVar {
    name: String,
    #[serde(rename = "type")]
    ty: usize,
    clients: Vec<usize>,
}

#[derive(Serialize)]
struct JsonRow {
    name: String,
    vars: Vec<String>,
    sense: &'static str,
    rhs: u64,
}

#[derive(Serialize)]
struct JsonType {
    days: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct JsonModel {
    n: usize,
    m: usize,
    types: Vec<JsonType>,
    variables: Vec<JsonVar>,
    rows: Vec<JsonRow>,
}

/// JSON dump of variables and rows, 1-based throughout.
pub fn to_json(model: &IlpModel) -> String {
    let row = |r: &Row, sense: &'static str| JsonRow {
        name: r.name.clone(),
        vars: r.vars.iter().map(|&v| variable_name(model, v)).collect(),
        sense,
        rhs: r.rhs,
    };
    let json = JsonModel {
        n: model.n,
        m: model.m,
        types: model
            .types
            .iter()
            .map(|t| JsonType {
                days: t.days.iter().map(|d| d + 1).collect(),
                edges: t.edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
            })
            .collect(),
        variables: (0..model.variables.len())
            .map(|v| JsonVar {
                name: variable_name(model, v),
                ty: model.variables[v].ty + 1,
                clients: model.variables[v].set.iter().map(|c| c + 1).collect(),
            })
            .collect(),
        rows: model
            .equalities
            .iter()
            .map(|r| row(r, "="))
            .chain(model.coverage.iter().map(|r| row(r, ">=")))
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&json).expect("model serialization");
    s.push('\n');
    s
}
