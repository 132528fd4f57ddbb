//! CSV and JSON emission, with parsers for both.
//!
//! JSON output is wrapped as `{"schema": "satdiam/<command>/v1", "data": ...}`.
//! CSV output has one fixed header per command and no quoting; every field is a
//! number, a boolean or an identifier. Floats use the shortest representation
//! that parses back to the same value.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiments::{CertificateRecord, CertifyReport, CurveReport, DiameterReport, McPlantedReport, ThresholdReport};
use crate::verify::{rational, TinyUniverseReport};

pub fn schema_tag(command: &str) -> String {
    format!("satdiam/{command}/v1")
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    data: T,
}

pub fn to_json<T: Serialize>(command: &str, data: &T) -> Result<String> {
    let env = Envelope { schema: schema_tag(command), data };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

/// Fails when the schema tag is not the one `command` emits.
pub fn from_json<T: DeserializeOwned>(command: &str, text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.schema != schema_tag(command) {
        return Err(HarnessError::Config(format!("schema {:?}, expected {:?}", env.schema, schema_tag(command))));
    }
    Ok(env.data)
}

/// Header and rows of a CSV table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| HarnessError::parse(1, "empty CSV"))?;
        let header: Vec<String> = head.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(HarnessError::parse(i + 1, format!("{} fields, header has {}", row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    /// Fails unless the header is exactly `expected`.
    pub fn expect_header(&self, expected: &[&str]) -> Result<()> {
        if self.header.iter().map(String::as_str).ne(expected.iter().copied()) {
            return Err(HarnessError::parse(1, format!("header {:?}, expected {:?}", self.header, expected)));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn parse_field<T: std::str::FromStr>(table_row: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| HarnessError::parse(table_row + 2, format!("cannot parse field {field:?}")))
}

pub const CURVE_HEADER: [&str; 2] = ["x", "f_star"];

pub fn curve_table(r: &CurveReport) -> Table {
    let mut t = Table::new(&CURVE_HEADER);
    for (x, v) in &r.points {
        t.push(vec![x.to_string(), v.to_string()]);
    }
    t
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let t = Table::parse(text)?;
    t.expect_header(&CURVE_HEADER)?;
    t.rows
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((parse_field(i, &r[0])?, parse_field(i, &r[1])?)))
        .collect()
}

pub const THRESHOLD_HEADER: [&str; 6] = ["k", "eps1", "eps2", "gap", "assumption_margin", "passed"];

pub fn threshold_table(r: &ThresholdReport) -> Table {
    let mut t = Table::new(&THRESHOLD_HEADER);
    t.push(vec![
        r.k.to_string(),
        r.eps1.to_string(),
        r.eps2.to_string(),
        r.gap.to_string(),
        opt(r.assumption_check.margin),
        r.passed.to_string(),
    ]);
    t
}

pub const CERTIFICATE_HEADER: [&str; 5] = ["name", "passed", "worst_x", "margin", "grid_size"];

fn certificate_row(c: &CertificateRecord) -> Vec<String> {
    vec![c.name.clone(), c.passed.to_string(), opt(c.worst_x), opt(c.margin), c.grid_size.to_string()]
}

/// One row per certificate. A theorem report adds a `combined` row whose margin
/// is `target_exponent - combined_exponent`.
pub fn certify_table(r: &CertifyReport) -> Table {
    let mut t = Table::new(&CERTIFICATE_HEADER);
    match r {
        CertifyReport::Single(c) => t.push(certificate_row(c)),
        CertifyReport::Theorem(th) => {
            for c in &th.certificates {
                t.push(certificate_row(c));
            }
            t.push(vec![
                "combined".into(),
                th.combined_ok.to_string(),
                String::new(),
                (th.target_exponent - th.combined_exponent).to_string(),
                "0".into(),
            ]);
        }
    }
    t
}

pub const MC_PLANTED_HEADER: [&str; 5] = ["d", "empirical_mean", "exact", "std_err", "flagged"];

pub fn mc_planted_table(r: &McPlantedReport) -> Table {
    let mut t = Table::new(&MC_PLANTED_HEADER);
    for row in &r.rows {
        t.push(vec![
            row.d.to_string(),
            row.empirical_mean.to_string(),
            row.exact.to_string(),
            row.std_err.to_string(),
            row.flagged.to_string(),
        ]);
    }
    t
}

pub const MC_DIAMETER_HEADER: [&str; 5] = ["trial", "r_max", "r_over_n", "solutions", "tries"];

pub fn mc_diameter_table(r: &DiameterReport) -> Table {
    let mut t = Table::new(&MC_DIAMETER_HEADER);
    for s in &r.samples {
        t.push(vec![
            s.trial.to_string(),
            s.r_max.to_string(),
            (s.r_max as f64 / r.n as f64).to_string(),
            s.solutions.to_string(),
            s.tries.to_string(),
        ]);
    }
    t
}

pub const IDENTITY_HEADER: [&str; 4] = ["d", "u_expected", "f_expected", "t_f_over_2"];

/// Per-distance rows; totals and the histogram are in the JSON form only.
pub fn identity_table(r: &TinyUniverseReport) -> Table {
    let mut t = Table::new(&IDENTITY_HEADER);
    let half = num_rational::BigRational::new(1.into(), 2.into());
    for (d, (u, f)) in r.ordered.u_expected.iter().zip(&r.ordered.f_expected).enumerate() {
        t.push(vec![
            d.to_string(),
            rational::to_string(u),
            rational::to_string(f),
            rational::to_string(&(r.t() * f * &half)),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_curve, ExperimentConfig};

    #[test]
    fn curve_csv_round_trips_bit_exactly() {
        let cfg = ExperimentConfig { k: Some(6), eps: Some(-(2f64.powi(-6))), grid: Some(512), ..Default::default() };
        let rep = run_curve(&cfg).unwrap();
        let text = curve_table(&rep).to_csv();
        assert!(text.starts_with("x,f_star\n"));
        let back = parse_curve_csv(&text).unwrap();
        assert_eq!(back.len(), rep.points.len());
        for (a, b) in back.iter().zip(&rep.points) {
            assert_eq!(a.0.to_bits(), b.0.to_bits());
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
    }

    #[test]
    fn json_checks_schema() {
        let cfg = ExperimentConfig { k: Some(4), c: Some(5.0), grid: Some(16), ..Default::default() };
        let rep = run_curve(&cfg).unwrap();
        let text = to_json("curve", &rep).unwrap();
        assert!(text.contains("\"schema\": \"satdiam/curve/v1\""));
        assert_eq!(from_json::<CurveReport>("curve", &text).unwrap(), rep);
        assert!(from_json::<CurveReport>("thresholds", &text).is_err());
    }

    #[test]
    fn table_parser_rejects_ragged_rows() {
        assert!(Table::parse("a,b\n1,2\n3\n").is_err());
        assert!(Table::parse("").is_err());
        assert!(parse_curve_csv("x,y\n1,2\n").is_err());
    }
}
