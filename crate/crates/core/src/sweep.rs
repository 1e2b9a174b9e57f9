//! Parameter grids.
//!
//! A grid is `name=start:stop:step[,name=start:stop:step…]` with inclusive
//! stop. Points are visited row-major in declared order (the last axis varies
//! fastest). Points where a protocol is undefined (infeasible post-weak
//! strength, undefined case angle) stay in the table with status `UNDEFINED`.

use std::str::FromStr;

use serde_json::{Map, Value};

use crate::cli::{Inputs, PairingChoice};
use crate::error::{Error, Result};
use crate::output::Document;
use crate::protocols::{search_pairings, teleport_case, TeleportCase};
use crate::report::ProtocolReport;

pub const MAX_POINTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

fn decimals(s: &str) -> Option<usize> {
    if s.contains(['e', 'E']) {
        return None;
    }
    Some(s.split_once('.').map_or(0, |(_, frac)| frac.len()))
}

fn parse_axis(spec: &str) -> Result<Axis> {
    let bad = |why: &str| Error::Config(format!("grid `{spec}`: {why}"));
    let (name, range) = spec.split_once('=').ok_or_else(|| bad("expected name=start:stop:step"))?;
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let [start_s, stop_s, step_s] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    let num = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("not a number"));
    let (start, stop, step) = (num(start_s)?, num(stop_s)?, num(step_s)?);
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("empty dimension (stop < start)"));
    }
    let span = (stop - start) / step;
    if span + 1.0 > MAX_POINTS as f64 {
        return Err(bad("too many points"));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    // Snap to the written precision so 0.1 + 2·0.1 prints as 0.3.
    let places = [start_s, step_s].iter().map(|s| decimals(s)).try_fold(0, |acc, d| d.map(|d| acc.max(d)));
    let values = (0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            match places {
                Some(d) if d <= 15 => format!("{v:.d$}").parse().expect("formatted float"),
                _ => v,
            }
        })
        .collect();
    Ok(Axis {
        name: name.trim().to_string(),
        values,
    })
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut axes: Vec<Axis> = Vec::new();
        for spec in s.split(',').filter(|p| !p.trim().is_empty()) {
            let axis = parse_axis(spec)?;
            if axes.iter().any(|a| a.name == axis.name) {
                return Err(Error::Config(format!("grid axis `{}` given twice", axis.name)));
            }
            axes.push(axis);
        }
        if axes.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        let grid = Grid { axes };
        if grid.len_checked().is_none() {
            return Err(Error::Config(format!("grid exceeds {MAX_POINTS} points")));
        }
        Ok(grid)
    }
}

impl Grid {
    fn len_checked(&self) -> Option<usize> {
        self.axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()))
            .filter(|&n| n <= MAX_POINTS)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in row-major order as `(name, value)` pairs.
    pub fn point(&self, mut index: usize) -> Vec<(&str, f64)> {
        let mut out = vec![("", 0.0); self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            let n = axis.values.len();
            *slot = (axis.name.as_str(), axis.values[index % n]);
            index /= n;
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<(&str, f64)>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepProtocol {
    Protect,
    Bell,
    Wstate,
    Teleport,
}

impl SweepProtocol {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepProtocol::Protect => "protect",
            SweepProtocol::Bell => "bell",
            SweepProtocol::Wstate => "wstate",
            SweepProtocol::Teleport => "teleport",
        }
    }

    /// Names that may appear as grid axes.
    pub fn axes(self) -> &'static [&'static str] {
        match self {
            SweepProtocol::Protect => &["p", "gamma_tau", "r", "p1", "alpha"],
            SweepProtocol::Bell => &["p", "gamma_tau", "r", "p1"],
            SweepProtocol::Wstate => &["clone_angle", "u", "p", "gamma_tau", "r", "p1"],
            SweepProtocol::Teleport => &["x", "s"],
        }
    }
}

impl FromStr for SweepProtocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "protect" => Ok(SweepProtocol::Protect),
            "bell" => Ok(SweepProtocol::Bell),
            "wstate" => Ok(SweepProtocol::Wstate),
            "teleport" => Ok(SweepProtocol::Teleport),
            other => Err(format!("unknown sweep protocol `{other}` (expected protect|bell|wstate|teleport)")),
        }
    }
}

/// Fixed CSV column order per protocol.
pub fn columns(protocol: SweepProtocol) -> &'static [&'static str] {
    match protocol {
        SweepProtocol::Protect => &[
            "p", "gamma_tau", "r", "alpha", "p1", "status", "success_path_prob",
            "expected_success_path_prob", "m2_success_path_prob", "total_success_prob", "fidelity_m1",
            "fidelity_m2", "note",
        ],
        SweepProtocol::Bell => &[
            "p", "gamma_tau", "r", "p1", "status", "m1_outcome", "bell_success_joint", "bell_fidelity",
            "concurrence", "note",
        ],
        SweepProtocol::Wstate => &[
            "clone_angle", "u", "p", "gamma_tau", "r", "p1", "status", "target_fidelity", "fidelity_w1",
            "fidelity_w2", "three_tangle_intermediate", "note",
        ],
        SweepProtocol::Teleport => &[
            "case", "x", "s", "status", "case_parameter", "sin_alpha", "cos_alpha", "pairing",
            "max_fidelity", "min_fidelity", "matching_prob", "verdict", "note",
        ],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Map<String, Value>>,
}

impl Table {
    pub fn undefined_count(&self) -> usize {
        self.rows.iter().filter(|r| r["status"] == "UNDEFINED").count()
    }

    pub fn document(&self, protocol: SweepProtocol, inputs: &Inputs, grid: &Grid) -> Document {
        let mut doc = Document::new("sweep", inputs.mode);
        doc.param("protocol", protocol.as_str());
        let spec: Vec<String> = grid
            .axes
            .iter()
            .map(|a| format!("{}[{}]", a.name, a.values.len()))
            .collect();
        doc.param("grid", spec.join(","));
        doc.metric("points", self.rows.len() as f64);
        doc.metric("undefined_points", self.undefined_count() as f64);
        doc.rows = Some(self.rows.clone());
        doc.notes.push(format!("columns: {}", self.columns.join(",")));
        doc
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

/// Errors that mark a single point undefined rather than failing the sweep.
fn is_pointwise(e: &Error) -> bool {
    matches!(e, Error::InfeasibleP1 { .. } | Error::Undefined(_) | Error::ZeroNorm(_))
}

fn protocol_row(row: &mut Map<String, Value>, report: &ProtocolReport, keys: &[&str]) {
    for key in keys {
        let v = report
            .probabilities
            .get(*key)
            .or_else(|| report.metrics.get(*key))
            .copied()
            .unwrap_or(f64::NAN);
        row.insert((*key).to_string(), num(v));
    }
    row.insert("p1".into(), num(report.parameters["p1"]));
    row.insert("r".into(), num(report.parameters["r"]));
    row.insert("gamma_tau".into(), num(report.parameters["gamma_tau"]));
}

fn evaluate(protocol: SweepProtocol, inputs: &Inputs, row: &mut Map<String, Value>) -> Result<()> {
    match protocol {
        SweepProtocol::Protect => {
            let rep = inputs.protect()?;
            protocol_row(
                row,
                &rep,
                &[
                    "success_path_prob",
                    "expected_success_path_prob",
                    "m2_success_path_prob",
                    "total_success_prob",
                    "fidelity_m1",
                    "fidelity_m2",
                ],
            );
        }
        SweepProtocol::Bell => {
            let rep = inputs.bell()?;
            protocol_row(row, &rep, &["m1_outcome", "bell_success_joint", "bell_fidelity", "concurrence"]);
        }
        SweepProtocol::Wstate => {
            let rep = inputs.wstate()?;
            protocol_row(
                row,
                &rep,
                &["target_fidelity", "fidelity_w1", "fidelity_w2", "three_tangle_intermediate"],
            );
        }
        SweepProtocol::Teleport => {
            let case = inputs
                .case
                .ok_or_else(|| Error::Config("missing required parameter `case`".into()))?;
            let x = inputs.x.ok_or_else(|| Error::Config("missing required parameter `x`".into()))?;
            let s = inputs.s.ok_or_else(|| Error::Config("missing required parameter `s`".into()))?;
            teleport_row(row, case, x, s, inputs.pairing)?;
        }
    }
    Ok(())
}

fn teleport_row(
    row: &mut Map<String, Value>,
    case: TeleportCase,
    x: f64,
    s: f64,
    pairing: PairingChoice,
) -> Result<()> {
    let (pairing, max_f, min_f, matching, verdict, rep) = match pairing {
        PairingChoice::Fixed(p) => {
            let rep = teleport_case(case, x, s, p)?;
            (
                p,
                rep.max_fidelity.unwrap_or(f64::NAN),
                rep.min_fidelity.unwrap_or(f64::NAN),
                rep.matching_prob,
                rep.verdict,
                rep,
            )
        }
        PairingChoice::Search => {
            let search = search_pairings(case, x, s)?;
            let best = search.best_row().clone();
            let rep = teleport_case(case, x, s, best.pairing)?;
            (best.pairing, best.max_fidelity, best.min_fidelity, best.matching_prob, search.verdict, rep)
        }
    };
    row.insert("case_parameter".into(), num(rep.parameter));
    row.insert("sin_alpha".into(), num(rep.sin_alpha));
    row.insert("cos_alpha".into(), num(rep.cos_alpha));
    row.insert("pairing".into(), pairing.label().into());
    row.insert("max_fidelity".into(), num(max_f));
    row.insert("min_fidelity".into(), num(min_f));
    row.insert("matching_prob".into(), num(matching));
    row.insert("verdict".into(), verdict.as_str().into());
    Ok(())
}

/// Evaluate `protocol` at every grid point, starting from `base` and
/// overriding the gridded parameters.
pub fn sweep(protocol: SweepProtocol, base: &Inputs, grid: &Grid) -> Result<Table> {
    let allowed = protocol.axes();
    for axis in &grid.axes {
        if !allowed.contains(&axis.name.as_str()) {
            return Err(Error::Config(format!(
                "`{}` cannot be swept for {} (allowed: {})",
                axis.name,
                protocol.as_str(),
                allowed.join(", ")
            )));
        }
    }
    let columns = columns(protocol);
    let mut rows = Vec::with_capacity(grid.len());
    for point in grid.points() {
        let mut inputs = base.clone();
        let mut row = Map::new();
        for &(name, value) in &point {
            inputs.set(name, value)?;
        }
        if protocol == SweepProtocol::Protect {
            // Sweeping α keeps the input normalized with β = √(1−α²).
            if let Some(a) = point.iter().find(|(n, _)| *n == "alpha").map(|p| p.1) {
                inputs.beta = Some((1.0 - a * a).max(0.0).sqrt());
            }
            row.insert("alpha".into(), num(inputs.alpha.unwrap_or(std::f64::consts::FRAC_1_SQRT_2)));
        }
        for &(name, value) in &point {
            row.insert(name.to_string(), num(value));
        }
        for (name, value) in [
            ("p", inputs.p),
            ("clone_angle", inputs.clone_angle),
            ("u", inputs.u),
            ("x", inputs.x),
            ("s", inputs.s),
        ] {
            if columns.contains(&name) && !row.contains_key(name) {
                row.insert(name.to_string(), value.map(num).unwrap_or(Value::Null));
            }
        }
        if let Some(case) = inputs.case {
            row.insert("case".into(), case.as_str().into());
        }
        match evaluate(protocol, &inputs, &mut row) {
            Ok(()) => {
                row.insert("status".into(), "OK".into());
            }
            Err(e) if is_pointwise(&e) => {
                row.insert("status".into(), "UNDEFINED".into());
                row.insert("note".into(), e.to_string().into());
            }
            Err(e) => return Err(e),
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
