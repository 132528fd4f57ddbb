//! DIMACS CNF reading and writing.
//!
//! Variables are 1-based in files and 0-based in memory. A planted assignment is
//! carried as a `c planted <bits>` comment, bit `i` being variable `i + 1`. For
//! formulas without clauses the clause width cannot be inferred, so a `c k <k>`
//! comment is written in that case only.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use satdiam::{Assignment, Clause, Formula, Literal, PlantedInstance};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsInstance {
    pub formula: Formula,
    pub planted: Option<Assignment>,
}

impl DimacsInstance {
    /// Fails when no planted assignment is present or it does not satisfy the formula.
    pub fn into_planted(self) -> Result<PlantedInstance> {
        let planted = self
            .planted
            .ok_or_else(|| HarnessError::Config("file carries no planted assignment".into()))?;
        Ok(PlantedInstance::new(self.formula, planted)?)
    }
}

fn to_dimacs(l: &Literal) -> i64 {
    let v = l.var as i64 + 1;
    if l.positive {
        v
    } else {
        -v
    }
}

pub fn write_dimacs<W: Write>(mut w: W, formula: &Formula, planted: Option<&Assignment>) -> Result<()> {
    if let Some(p) = planted {
        if p.n() != formula.n() {
            return Err(satdiam::Error::DimensionMismatch { expected: formula.n(), found: p.n() }.into());
        }
        writeln!(w, "c planted {}", p.to_bitstring())?;
    }
    if formula.m() == 0 {
        writeln!(w, "c k {}", formula.k())?;
    }
    writeln!(w, "p cnf {} {}", formula.n(), formula.m())?;
    for c in formula.clauses() {
        for l in c.literals() {
            write!(w, "{} ", to_dimacs(l))?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

pub fn to_dimacs_string(formula: &Formula, planted: Option<&Assignment>) -> String {
    let mut buf = Vec::new();
    write_dimacs(&mut buf, formula, planted).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn write_dimacs_file(path: impl AsRef<Path>, formula: &Formula, planted: Option<&Assignment>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dimacs(&mut w, formula, planted)?;
    w.flush()?;
    Ok(())
}

pub fn read_dimacs<R: BufRead>(r: R) -> Result<DimacsInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut planted: Option<(usize, String)> = None;
    let mut declared_k: Option<usize> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            let mut words = rest.split_whitespace();
            match words.next() {
                Some("planted") => {
                    let bits = words.next().ok_or_else(|| HarnessError::parse(lineno, "empty planted comment"))?;
                    planted = Some((lineno, bits.to_string()));
                }
                Some("k") => {
                    let k = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| HarnessError::parse(lineno, "malformed width comment"))?;
                    declared_k = Some(k);
                }
                _ => {}
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(HarnessError::parse(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", n, m] => {
                    let n = n.parse().map_err(|_| HarnessError::parse(lineno, "bad variable count"))?;
                    let m = m.parse().map_err(|_| HarnessError::parse(lineno, "bad clause count"))?;
                    header = Some((n, m));
                }
                _ => return Err(HarnessError::parse(lineno, format!("malformed header {trimmed:?}"))),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| HarnessError::parse(lineno, "clause before header"))?;
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| HarnessError::parse(lineno, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                let clause = Clause::new(std::mem::take(&mut current))
                    .map_err(|e| HarnessError::parse(lineno, e.to_string()))?;
                clauses.push(clause);
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(HarnessError::parse(lineno, format!("literal {lit} out of range for {n} variables")));
            }
            current.push(Literal::new(var - 1, lit > 0));
        }
    }

    let (n, m) = header.ok_or_else(|| HarnessError::parse(last_line, "missing header"))?;
    if !current.is_empty() {
        return Err(HarnessError::parse(last_line, "unterminated clause"));
    }
    if clauses.len() != m {
        return Err(HarnessError::parse(
            last_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    let k = match (clauses.first(), declared_k) {
        (Some(c), _) => c.width(),
        (None, Some(k)) => k,
        (None, None) => return Err(HarnessError::parse(last_line, "empty formula without a width comment")),
    };
    if let Some(bad) = clauses.iter().find(|c| c.width() != k) {
        return Err(HarnessError::parse(last_line, format!("clause {bad} has width {} in a {k}-CNF", bad.width())));
    }
    let formula = Formula::new(n, k, clauses)?;
    let planted = match planted {
        Some((line, bits)) => {
            let a: Assignment = bits.parse().map_err(|e: satdiam::Error| HarnessError::parse(line, e.to_string()))?;
            if a.n() != n {
                return Err(HarnessError::parse(line, format!("planted assignment has {} bits, expected {n}", a.n())));
            }
            Some(a)
        }
        None => None,
    };
    Ok(DimacsInstance { formula, planted })
}

pub fn parse_dimacs(s: &str) -> Result<DimacsInstance> {
    read_dimacs(s.as_bytes())
}

pub fn read_dimacs_file(path: impl AsRef<Path>) -> Result<DimacsInstance> {
    read_dimacs(BufReader::new(File::open(path)?))
}
