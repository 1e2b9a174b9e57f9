//! Report serialization.
//!
//! JSON documents share one top-level shape (see `schema/report.schema.json`):
//! `command`, `mode`, `parameters`, `branches[]`, `metrics`, `discrepancies[]`,
//! plus optional `states`, `flags`, `bell_convention`, `rows`, `criteria`,
//! `notes`, `seed`. Non-finite metrics serialize as `null`.
//!
//! Single-run CSV output is a long table with the fixed header
//! `section,key,value`; sections appear in the order
//! `parameter`, `metric`, `branch` (key = path, value = joint probability),
//! `flag`, `discrepancy`. Sweep CSV uses one column per field, in the order
//! given by [`crate::sweep::columns`]. Reals in CSV are written with 17
//! significant digits.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::channels::TrajectoryBranch;
use crate::protocols::{PairingReport, TeleportReport, Verdict};
use crate::qstate::{StateVector, BELL_CONVENTION};
use crate::report::{Discrepancy, NormalizationMode, ProtocolReport};
use crate::verify::CriterionResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json|csv)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchEntry {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cond_prob: Option<f64>,
    pub joint_prob: f64,
    /// `[re, im]` pairs; `null` for an impossible branch.
    pub state: Option<StateVector>,
}

impl From<&TrajectoryBranch> for BranchEntry {
    fn from(b: &TrajectoryBranch) -> Self {
        BranchEntry {
            path: b.path_string(),
            cond_prob: Some(b.cond_prob),
            joint_prob: b.joint_prob,
            state: b.state.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Document {
    pub command: String,
    pub mode: NormalizationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub parameters: Map<String, Value>,
    pub branches: Vec<BranchEntry>,
    pub metrics: BTreeMap<String, Option<f64>>,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub states: BTreeMap<String, StateVector>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bell_convention: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Map<String, Value>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<CriterionResult>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Document {
    pub fn new(command: impl Into<String>, mode: NormalizationMode) -> Self {
        Document {
            command: command.into(),
            mode,
            seed: None,
            parameters: Map::new(),
            branches: Vec::new(),
            metrics: BTreeMap::new(),
            discrepancies: Vec::new(),
            states: BTreeMap::new(),
            flags: Vec::new(),
            bell_convention: None,
            rows: None,
            criteria: None,
            notes: Vec::new(),
        }
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), finite(value));
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "key", "value"]).expect("in-memory write");
        for (k, v) in &self.parameters {
            let v = match v {
                Value::Number(n) => n.as_f64().map(fmt_real).unwrap_or_else(|| n.to_string()),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            w.write_record(["parameter", k, &v]).expect("in-memory write");
        }
        for (k, v) in &self.metrics {
            w.write_record(["metric", k, &v.map(fmt_real).unwrap_or_default()])
                .expect("in-memory write");
        }
        for b in &self.branches {
            w.write_record(["branch", &b.path, &fmt_real(b.joint_prob)])
                .expect("in-memory write");
        }
        for f in &self.flags {
            w.write_record(["flag", f, ""]).expect("in-memory write");
        }
        for d in &self.discrepancies {
            w.write_record(["discrepancy", &d.claim, &d.actual]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Protocol report as a document: probabilities, metrics and entanglement
/// measures are merged into one `metrics` map.
pub fn protocol_document(report: &ProtocolReport) -> Document {
    let mut doc = Document::new(report.protocol.clone(), report.mode);
    for (k, v) in &report.parameters {
        doc.param(k, finite(*v));
    }
    doc.branches = report.branches.iter().map(BranchEntry::from).collect();
    for (k, v) in report.probabilities.iter().chain(&report.metrics) {
        doc.metric(k, *v);
    }
    doc.metric("target_fidelity", report.target_fidelity);
    doc.metric("leaf_probability_sum", report.leaf_probability_sum());
    if let Some(c) = report.entanglement.concurrence {
        doc.metric("concurrence", c);
    }
    if let Some(t) = report.entanglement.three_tangle {
        doc.metric("three_tangle", t);
    }
    doc.states = report.states.clone();
    if let Some(s) = &report.final_state {
        doc.states.insert("final".into(), s.clone());
    }
    doc.flags = report.flags.clone();
    doc.discrepancies = report.discrepancies.clone();
    doc
}

fn teleport_header(doc: &mut Document, case: &str, x: f64, s: f64) {
    doc.param("case", case);
    doc.param("x", x);
    doc.param("s", s);
    doc.bell_convention = Some(BELL_CONVENTION);
}

/// One pairing: the sixteen outcomes become branches labelled
/// `<first pair label>,<second pair label>`, carrying Bob's uncorrected qubit.
pub fn teleport_document(report: &TeleportReport) -> Document {
    let mut doc = Document::new("teleport", NormalizationMode::Physical);
    teleport_header(&mut doc, report.case.as_str(), report.x, report.s);
    doc.param("pairing", report.pairing.label());
    doc.param("correction", report.correction);
    doc.param("target", report.target.as_str());
    doc.param(
        "classical_bits",
        format!("{}{}", report.classical_bits[0], report.classical_bits[1]),
    );
    doc.branches = report
        .outcomes
        .iter()
        .map(|o| BranchEntry {
            path: format!("{},{}", o.labels[0].as_str(), o.labels[1].as_str()),
            cond_prob: None,
            joint_prob: o.prob,
            state: o.bob_state.clone(),
        })
        .collect();
    doc.metric("case_parameter", report.parameter);
    doc.metric("sin_alpha", report.sin_alpha);
    doc.metric("cos_alpha", report.cos_alpha);
    doc.metric("total_prob", report.total_prob);
    doc.metric("matching_prob", report.matching_prob);
    doc.metric("bit_prob", report.bit_prob);
    doc.metric("qubit_prob", report.qubit_prob);
    doc.metric("max_fidelity", report.max_fidelity.unwrap_or(f64::NAN));
    doc.metric("min_fidelity", report.min_fidelity.unwrap_or(f64::NAN));
    let mut rows = Vec::new();
    for o in &report.outcomes {
        let mut row = Map::new();
        row.insert("outcome".into(), format!("{},{}", o.labels[0].as_str(), o.labels[1].as_str()).into());
        row.insert("prob".into(), o.prob.into());
        row.insert(
            "class".into(),
            o.class.map(|c| Value::from(c.as_str())).unwrap_or(Value::Null),
        );
        row.insert("matches_pattern".into(), o.matches_pattern.into());
        row.insert("fidelity".into(), o.fidelity.and_then(finite).into());
        rows.push(row);
    }
    doc.rows = Some(rows);
    doc.notes.push(format!("verdict: {}", report.verdict.as_str()));
    if report.verdict == Verdict::NotReproduced {
        doc.discrepancies.push(not_reproduced(
            report.case.as_str(),
            report.x,
            report.s,
            &report.pairing.label(),
            report.max_fidelity.unwrap_or(0.0),
        ));
    }
    doc
}

pub(crate) fn not_reproduced(case: &str, x: f64, s: f64, pairing: &str, best: f64) -> Discrepancy {
    Discrepancy::new(
        format!("Case-{case}: corrected qubit at Bob equals the claimed target"),
        "fidelity ≥ 1 − 1e-9 on matching outcomes",
        format!("best fidelity {best:.12} ({pairing})"),
        format!("x={x}, s={s}"),
    )
}

/// All six pair assignments for one case.
pub fn pairing_document(report: &PairingReport) -> Document {
    let mut doc = Document::new("teleport", NormalizationMode::Physical);
    teleport_header(&mut doc, report.case.as_str(), report.x, report.s);
    doc.param("pairing", "search");
    let best = report.best_row();
    doc.param("best_pairing", best.pairing.label());
    doc.metric("max_fidelity", best.max_fidelity);
    doc.metric("min_fidelity", best.min_fidelity);
    doc.metric("matching_prob", best.matching_prob);
    let rows = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = Map::new();
            row.insert("pairing".into(), r.pairing.label().into());
            row.insert("max_fidelity".into(), r.max_fidelity.into());
            row.insert("min_fidelity".into(), r.min_fidelity.into());
            row.insert("matching_prob".into(), r.matching_prob.into());
            row.insert("total_prob".into(), r.total_prob.into());
            row.insert("best".into(), (i == report.best).into());
            row
        })
        .collect();
    doc.rows = Some(rows);
    doc.notes.push(format!("verdict: {}", report.verdict.as_str()));
    if report.verdict == Verdict::NotReproduced {
        doc.discrepancies.push(not_reproduced(
            report.case.as_str(),
            report.x,
            report.s,
            &best.pairing.label(),
            best.max_fidelity,
        ));
    }
    doc
}

/// Tabular CSV: `columns` header, then each row's values in that order.
pub fn rows_csv(columns: &[&str], rows: &[Map<String, Value>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for row in rows {
        let rec: Vec<String> = columns
            .iter()
            .map(|c| match row.get(*c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::Number(n)) => n.as_f64().map(fmt_real).unwrap_or_default(),
                Some(Value::String(s)) => s.clone(),
                Some(other) => other.to_string(),
            })
            .collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::protect_unknown_qubit;
    use crate::qstate::cr;

    #[test]
    fn protect_document_has_required_keys() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rep = protect_unknown_qubit(cr(h), cr(h), 0.5, 0.0).unwrap();
        let doc = protocol_document(&rep);
        let v: Value = serde_json::from_str(&doc.to_json()).unwrap();
        for key in ["command", "parameters", "branches", "metrics", "mode", "discrepancies"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!((v["metrics"]["success_path_prob"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        // No damping: both jump branches are impossible and stay unextended.
        assert_eq!(v["branches"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn csv_layout_is_fixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rep = protect_unknown_qubit(cr(h), cr(h), 0.5, 0.3).unwrap();
        let csv = protocol_document(&rep).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("section,key,value"));
        let sections: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
        let first_branch = sections.iter().position(|s| *s == "branch").unwrap();
        assert!(sections[..first_branch].iter().all(|s| *s == "parameter" || *s == "metric"));
    }

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_real(f64::NAN), "");
    }
}
