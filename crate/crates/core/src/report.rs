//! CSV and JSON encodings of reports.
//!
//! Every float is rounded to 12 significant digits before it is written, and
//! both formats print the rounded value with the same shortest round-trip
//! formatter, so a CSV cell and the matching JSON number always agree.
//! Parsing a serialized payload returns exactly the rounded payload.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::PairJoint;
use crate::error::{Error, Result};
use crate::experiment::{analytic_pair_conditional_entropy_variant, InequalityReport, Method, PairDistribution, PairSource, Variant};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Fixed columns of the inequality CSV, before the ragged `per_step_*` tail.
pub const REPORT_COLUMNS: [&str; 15] = [
    "n",
    "L",
    "policy",
    "rhs_sum",
    "information_target",
    "violated",
    "margin",
    "paper_bound",
    "success_probability",
    "method",
    "variant",
    "oracle_calls",
    "rhs_stderr",
    "full_joint_entropy",
    "classical_baseline",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&round_sig(x)).expect("finite float serializes")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Flat, serializable view of a [`PairDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub n: u32,
    pub k: u64,
    pub variant: Variant,
    pub source: PairSource,
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub conditional_entropy: f64,
    /// Closed-form value of the same conditional entropy.
    pub analytic_conditional_entropy: Option<f64>,
    pub samples: Option<u64>,
    pub stderr: Option<f64>,
}

impl PairRecord {
    pub fn from_distribution(pair: &PairDistribution) -> Self {
        let j = &pair.joint;
        Self {
            n: pair.n,
            k: pair.k,
            variant: pair.variant,
            source: pair.source,
            p00: j.get(0, 0),
            p01: j.get(0, 1),
            p10: j.get(1, 0),
            p11: j.get(1, 1),
            conditional_entropy: pair.conditional_entropy(),
            analytic_conditional_entropy: analytic_pair_conditional_entropy_variant(pair.n, pair.k, pair.variant).ok(),
            samples: pair.samples,
            stderr: pair.stderr,
        }
    }

    pub fn joint(&self) -> Result<PairJoint> {
        PairJoint::binary([[self.p00, self.p01], [self.p10, self.p11]])
    }

    fn canonical(&self) -> Self {
        Self {
            p00: round_sig(self.p00),
            p01: round_sig(self.p01),
            p10: round_sig(self.p10),
            p11: round_sig(self.p11),
            conditional_entropy: round_sig(self.conditional_entropy),
            analytic_conditional_entropy: self.analytic_conditional_entropy.map(round_sig),
            stderr: self.stderr.map(round_sig),
            ..self.clone()
        }
    }
}

fn canonical_report(r: &InequalityReport) -> InequalityReport {
    InequalityReport {
        rhs_sum: round_sig(r.rhs_sum),
        information_target: round_sig(r.information_target),
        margin: round_sig(r.margin),
        paper_bound: r.paper_bound.map(round_sig),
        success_probability: r.success_probability.map(round_sig),
        rhs_stderr: r.rhs_stderr.map(round_sig),
        full_joint_entropy: r.full_joint_entropy.map(round_sig),
        classical_baseline: r.classical_baseline.map(round_sig),
        per_step: r.per_step.iter().copied().map(round_sig).collect(),
        policy: r.policy.clone(),
        ..*r
    }
}

/// What a report file carries.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// One inequality report; a JSON object.
    Report(InequalityReport),
    /// Several inequality reports; a JSON array.
    Sweep(Vec<InequalityReport>),
    /// One pair distribution.
    Pair(PairRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    Report,
    Sweep,
    Pair,
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Report(_) => PayloadKind::Report,
            Payload::Sweep(_) => PayloadKind::Sweep,
            Payload::Pair(_) => PayloadKind::Pair,
        }
    }

    /// The payload with every float rounded to 12 significant digits.
    pub fn canonical(&self) -> Payload {
        match self {
            Payload::Report(r) => Payload::Report(canonical_report(r)),
            Payload::Sweep(rs) => Payload::Sweep(rs.iter().map(canonical_report).collect()),
            Payload::Pair(p) => Payload::Pair(p.canonical()),
        }
    }

    pub fn serialize(&self, format: Format) -> Result<String> {
        let canonical = self.canonical();
        match format {
            Format::Json => {
                let mut text = match &canonical {
                    Payload::Report(r) => serde_json::to_string_pretty(r)?,
                    Payload::Sweep(rs) => serde_json::to_string_pretty(rs)?,
                    Payload::Pair(p) => serde_json::to_string_pretty(p)?,
                };
                text.push('\n');
                Ok(text)
            }
            Format::Csv => match &canonical {
                Payload::Report(r) => reports_to_csv(std::slice::from_ref(r)),
                Payload::Sweep(rs) => reports_to_csv(rs),
                Payload::Pair(p) => pair_to_csv(p),
            },
        }
    }

    pub fn parse(format: Format, kind: PayloadKind, text: &str) -> Result<Payload> {
        match (format, kind) {
            (Format::Json, PayloadKind::Report) => Ok(Payload::Report(serde_json::from_str(text)?)),
            (Format::Json, PayloadKind::Sweep) => Ok(Payload::Sweep(serde_json::from_str(text)?)),
            (Format::Json, PayloadKind::Pair) => Ok(Payload::Pair(serde_json::from_str(text)?)),
            (Format::Csv, PayloadKind::Report) => {
                let mut rows = reports_from_csv(text)?;
                if rows.len() != 1 {
                    return Err(Error::Report(format!("expected one report row, found {}", rows.len())));
                }
                Ok(Payload::Report(rows.remove(0)))
            }
            (Format::Csv, PayloadKind::Sweep) => Ok(Payload::Sweep(reports_from_csv(text)?)),
            (Format::Csv, PayloadKind::Pair) => {
                let mut reader = csv::Reader::from_reader(text.as_bytes());
                let mut rows = reader.deserialize::<PairRecord>().collect::<std::result::Result<Vec<_>, _>>()?;
                if rows.len() != 1 {
                    return Err(Error::Report(format!("expected one pair row, found {}", rows.len())));
                }
                Ok(Payload::Pair(rows.remove(0)))
            }
        }
    }
}

fn enum_label<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn reports_to_csv(reports: &[InequalityReport]) -> Result<String> {
    let width = reports.iter().map(|r| r.per_step.len()).max().unwrap_or(0);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = REPORT_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain((0..width).map(|i| format!("per_step_{i}")))
        .collect();
    writer.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            r.n.to_string(),
            r.iterations.to_string(),
            r.policy.clone(),
            fmt_f64(r.rhs_sum),
            fmt_f64(r.information_target),
            r.violated.to_string(),
            fmt_f64(r.margin),
            fmt_opt(r.paper_bound),
            fmt_opt(r.success_probability),
            enum_label(&r.method),
            enum_label(&r.variant),
            r.oracle_calls.to_string(),
            fmt_opt(r.rhs_stderr),
            fmt_opt(r.full_joint_entropy),
            fmt_opt(r.classical_baseline),
        ];
        row.extend(r.per_step.iter().map(|&x| fmt_f64(x)));
        row.resize(REPORT_COLUMNS.len() + width, String::new());
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
}

fn pair_to_csv(pair: &PairRecord) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["n", "k", "variant", "source", "p00", "p01", "p10", "p11", "conditional_entropy", "analytic_conditional_entropy", "samples", "stderr"])?;
    writer.write_record([
        pair.n.to_string(),
        pair.k.to_string(),
        enum_label(&pair.variant),
        enum_label(&pair.source),
        fmt_f64(pair.p00),
        fmt_f64(pair.p01),
        fmt_f64(pair.p10),
        fmt_f64(pair.p11),
        fmt_f64(pair.conditional_entropy),
        fmt_opt(pair.analytic_conditional_entropy),
        pair.samples.map(|s| s.to_string()).unwrap_or_default(),
        fmt_opt(pair.stderr),
    ])?;
    let bytes = writer.into_inner().map_err(|e| Error::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
}

fn parse_cell<T: std::str::FromStr>(column: &str, cell: &str) -> Result<T> {
    cell.parse().map_err(|_| Error::Report(format!("column {column}: cannot parse `{cell}`")))
}

fn parse_opt(column: &str, cell: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_cell(column, cell).map(Some)
    }
}

fn parse_label<T: for<'de> Deserialize<'de>>(column: &str, cell: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(cell.to_owned())).map_err(|_| Error::Report(format!("column {column}: unknown value `{cell}`")))
}

fn reports_from_csv(text: &str) -> Result<Vec<InequalityReport>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    for (i, expected) in REPORT_COLUMNS.iter().enumerate() {
        if header.get(i) != Some(expected) {
            return Err(Error::Report(format!("column {i} should be `{expected}`, found `{}`", header.get(i).unwrap_or(""))));
        }
    }
    for (i, name) in header.iter().enumerate().skip(REPORT_COLUMNS.len()) {
        if name != format!("per_step_{}", i - REPORT_COLUMNS.len()) {
            return Err(Error::Report(format!("unexpected column `{name}`")));
        }
    }
    let mut reports = Vec::new();
    for record in reader.records() {
        let record = record?;
        let cell = |i: usize| record.get(i).unwrap_or("");
        let per_step = (REPORT_COLUMNS.len()..record.len())
            .map(|i| cell(i))
            .take_while(|c| !c.is_empty())
            .map(|c| parse_cell("per_step", c))
            .collect::<Result<Vec<f64>>>()?;
        reports.push(InequalityReport {
            n: parse_cell("n", cell(0))?,
            iterations: parse_cell("L", cell(1))?,
            policy: cell(2).to_owned(),
            rhs_sum: parse_cell("rhs_sum", cell(3))?,
            information_target: parse_cell("information_target", cell(4))?,
            violated: parse_cell("violated", cell(5))?,
            margin: parse_cell("margin", cell(6))?,
            paper_bound: parse_opt("paper_bound", cell(7))?,
            success_probability: parse_opt("success_probability", cell(8))?,
            method: parse_label::<Method>("method", cell(9))?,
            variant: parse_label::<Variant>("variant", cell(10))?,
            oracle_calls: parse_cell("oracle_calls", cell(11))?,
            rhs_stderr: parse_opt("rhs_stderr", cell(12))?,
            full_joint_entropy: parse_opt("full_joint_entropy", cell(13))?,
            classical_baseline: parse_opt("classical_baseline", cell(14))?,
            per_step,
        });
    }
    Ok(reports)
}

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so a failed run never leaves a partial report behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.partial", file_name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::QuerySchedule;
    use crate::experiment::{classical_report, exact_pair_distribution, quantum_report, sweep, ExperimentConfig, SweepOptions};
    use proptest::prelude::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(2.520_963_259_776_591), 2.520_963_259_78);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.0 / 3.0), 0.333_333_333_333);
        assert_eq!(round_sig(-1.234_567_890_123_4e-20), -1.234_567_890_12e-20);
        assert_eq!(fmt_f64(3.0), "3.0");
    }

    fn sample_sweep() -> Vec<InequalityReport> {
        let mut rows = sweep(3..=5, &SweepOptions::default()).unwrap();
        rows.push(classical_report(&QuerySchedule::new(2, vec![0, 0, 1]).unwrap(), "classical-schedule", None).unwrap());
        rows
    }

    #[test]
    fn sweep_round_trips_in_both_formats() {
        let payload = Payload::Sweep(sample_sweep());
        for format in [Format::Csv, Format::Json] {
            let text = payload.serialize(format).unwrap();
            assert_eq!(Payload::parse(format, PayloadKind::Sweep, &text).unwrap(), payload.canonical());
        }
    }

    #[test]
    fn csv_and_json_carry_identical_numbers() {
        let payload = Payload::Sweep(sample_sweep());
        let from_csv = Payload::parse(Format::Csv, PayloadKind::Sweep, &payload.serialize(Format::Csv).unwrap()).unwrap();
        let from_json = Payload::parse(Format::Json, PayloadKind::Sweep, &payload.serialize(Format::Json).unwrap()).unwrap();
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn csv_header_and_ragged_tail() {
        let text = Payload::Sweep(sample_sweep()).serialize(Format::Csv).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("n,L,policy,rhs_sum,information_target,violated,margin,paper_bound,success_probability,"));
        // n = 5 has L = 6, the widest row
        assert!(header.ends_with(",per_step_5"));
        let first_row = text.lines().nth(1).unwrap();
        assert!(first_row.starts_with("3,3,ceil-sqrt,"));
        assert!(first_row.ends_with(",,,"));
    }

    #[test]
    fn single_report_json_is_an_object() {
        let r = quantum_report(&ExperimentConfig::new(4, 4), "fixed", None).unwrap();
        let text = Payload::Report(r).serialize(Format::Json).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value.is_object());
        assert_eq!(value["L"], 4);
        assert_eq!(value["rhs_sum"], 2.69397094338);
        assert_eq!(value["violated"], true);
        assert_eq!(value["variant"], "standard");
    }

    #[test]
    fn pair_round_trip() {
        let pair = Payload::Pair(PairRecord::from_distribution(&exact_pair_distribution(4, 2, Variant::Standard).unwrap()));
        for format in [Format::Csv, Format::Json] {
            let text = pair.serialize(format).unwrap();
            assert_eq!(Payload::parse(format, PayloadKind::Pair, &text).unwrap(), pair.canonical());
        }
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(Payload::parse(Format::Csv, PayloadKind::Sweep, "n,L,oops\n1,2,3\n").is_err());
        let good = Payload::Sweep(sample_sweep()).serialize(Format::Csv).unwrap();
        let bad = good.replacen("ceil-sqrt", "ceil-sqrt", 1).replacen(",standard,", ",sideways,", 1);
        assert!(Payload::parse(Format::Csv, PayloadKind::Sweep, &bad).is_err());
        assert!(Payload::parse(Format::Csv, PayloadKind::Report, &good).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("tbell-report-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        assert!(write_atomic(&dir.join("missing").join("x.json"), "x").is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn canonical_form_is_a_fixed_point(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let r = round_sig(x);
            prop_assert_eq!(round_sig(r), r);
            let printed: f64 = fmt_f64(x).parse().unwrap();
            prop_assert_eq!(printed, r);
        }
    }
}
