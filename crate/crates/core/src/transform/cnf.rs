//! CNF formulas in DIMACS form and the preprocessing the 3-SAT gadget needs.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Literals use DIMACS numbering: `v` or `-v` for variable `v >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// `assignment[v - 1]` is the value of variable `v`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0))
        })
    }

    /// Occurrences of each variable, index `v - 1`.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for clause in &self.clauses {
            for &lit in clause {
                occ[lit.unsigned_abs() as usize - 1] += 1;
            }
        }
        occ
    }

    /// Every clause has two or three literals over distinct variables and
    /// every variable occurs at most three times.
    pub fn check_promise(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if !(2..=3).contains(&clause.len()) {
                return Err(Error::Promise(format!(
                    "clause {} has {} literals, expected 2 or 3",
                    i + 1,
                    clause.len()
                )));
            }
            let mut vars: Vec<u32> = clause.iter().map(|l| l.unsigned_abs()).collect();
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Promise(format!("clause {} repeats a variable", i + 1)));
            }
        }
        if let Some((v, &count)) = self.occurrences().iter().enumerate().find(|(_, &c)| c > 3) {
            return Err(Error::Promise(format!(
                "variable {} occurs {count} times, at most 3 allowed",
                v + 1
            )));
        }
        Ok(())
    }
}

pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| {
                Error::Parse(format!("line {}: expected `p cnf <vars> <clauses>`", no + 1))
            })?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Parse(format!("line {}: clause before the `p cnf` header", no + 1)));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad literal `{tok}`", no + 1)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(Error::Parse(format!(
                    "line {}: variable {} exceeds the declared {num_vars}",
                    no + 1,
                    lit.unsigned_abs()
                )));
            } else {
                current.push(lit);
            }
        }
    }
    let (num_vars, declared) = header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(Error::Parse(format!(
            "header declares {declared} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(Cnf { num_vars, clauses })
}

pub fn to_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    /// Remaining clauses over the original variable numbering.
    pub formula: Cnf,
    /// Values fixed while eliminating variables of a single polarity.
    pub forced: Vec<Option<bool>>,
}

/// Checks the promise, then repeatedly sets every variable that occurs with
/// one polarity only so that its clauses are satisfied and drops those
/// clauses. Afterwards every variable occurs at most twice per polarity.
pub fn preprocess(cnf: &Cnf) -> Result<Preprocessed> {
    cnf.check_promise()?;
    let mut clauses = cnf.clauses.clone();
    let mut forced = vec![None; cnf.num_vars];
    loop {
        let mut polarity = vec![(false, false); cnf.num_vars];
        for &lit in clauses.iter().flatten() {
            let p = &mut polarity[lit.unsigned_abs() as usize - 1];
            if lit > 0 {
                p.0 = true;
            } else {
                p.1 = true;
            }
        }
        let pure: Vec<i32> = polarity
            .iter()
            .enumerate()
            .filter_map(|(v, &(pos, neg))| match (pos, neg) {
                (true, false) => Some(v as i32 + 1),
                (false, true) => Some(-(v as i32 + 1)),
                _ => None,
            })
            .collect();
        if pure.is_empty() {
            break;
        }
        for &lit in &pure {
            forced[lit.unsigned_abs() as usize - 1] = Some(lit > 0);
        }
        clauses.retain(|c| !c.iter().any(|l| pure.contains(l)));
    }
    Ok(Preprocessed {
        formula: Cnf {
            num_vars: cnf.num_vars,
            clauses,
        },
        forced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![2, 3, -1]]);
        assert_eq!(parse_dimacs(&to_dimacs(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
    }

    #[test]
    fn promise_violations() {
        let one = Cnf { num_vars: 1, clauses: vec![vec![1]] };
        assert!(one.check_promise().unwrap_err().to_string().contains("2 or 3"));
        let rep = Cnf { num_vars: 2, clauses: vec![vec![1, -1]] };
        assert!(rep.check_promise().unwrap_err().to_string().contains("repeats"));
        let many = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]],
        };
        assert!(many.check_promise().unwrap_err().to_string().contains("occurs 4 times"));
    }

    #[test]
    fn pure_variables_cascade() {
        // x2 is pure; dropping its clauses leaves x1 and x3 pure.
        let cnf = Cnf {
            num_vars: 3,
            clauses: vec![vec![1, 3], vec![-1, 2], vec![2, -3, 1]],
        };
        let pre = preprocess(&cnf).unwrap();
        assert!(pre.formula.clauses.is_empty());
        assert_eq!(pre.forced[2], Some(true));
        assert_eq!(pre.forced[1], Some(true));
    }

    #[test]
    fn mixed_polarity_survives() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, -2]],
        };
        let pre = preprocess(&cnf).unwrap();
        assert_eq!(pre.formula, cnf);
        assert_eq!(pre.forced, vec![None, None]);
    }
}
