//! Structured results shared by the protocol runners.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::TrajectoryBranch;
use crate::entanglement::EntanglementReport;
use crate::qstate::StateVector;

/// How amplitudes are renormalized after the filtering operators.
///
/// `Paper` renormalizes each sender-side branch of the transmitted qubit
/// separately (the per-branch divisors of the Bell and W-type derivations);
/// `Physical` applies a single global renormalization, which is the linear
/// quantum operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    #[default]
    Paper,
    Physical,
}

impl NormalizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::Paper => "paper",
            NormalizationMode::Physical => "physical",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(NormalizationMode::Paper),
            "physical" => Ok(NormalizationMode::Physical),
            other => Err(format!("unknown mode `{other}` (expected paper|physical)")),
        }
    }
}

/// A published claim that the simulation does not reproduce as stated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub claim: String,
    pub expected: String,
    pub actual: String,
    pub detail: String,
}

impl Discrepancy {
    pub fn new(
        claim: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            claim: claim.into(),
            expected: expected.into(),
            actual: actual.into(),
            detail: detail.into(),
        }
    }
}

/// Result of one protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub mode: NormalizationMode,
    pub parameters: BTreeMap<String, f64>,
    pub branches: Vec<TrajectoryBranch>,
    pub final_state: Option<StateVector>,
    pub target_fidelity: f64,
    pub probabilities: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub entanglement: EntanglementReport,
    /// Named intermediate states (e.g. the jump-branch state).
    pub states: BTreeMap<String, StateVector>,
    pub flags: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
}

impl ProtocolReport {
    pub fn new(protocol: impl Into<String>, mode: NormalizationMode) -> Self {
        Self {
            protocol: protocol.into(),
            mode,
            parameters: BTreeMap::new(),
            branches: Vec::new(),
            final_state: None,
            target_fidelity: 0.0,
            probabilities: BTreeMap::new(),
            metrics: BTreeMap::new(),
            entanglement: EntanglementReport::default(),
            states: BTreeMap::new(),
            flags: Vec::new(),
            discrepancies: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    pub fn prob(&mut self, name: &str, value: f64) {
        self.probabilities.insert(name.to_string(), value);
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn leaf_probability_sum(&self) -> f64 {
        self.branches.iter().map(|b| b.joint_prob).sum()
    }

    /// The leaf whose path label string equals `path`, e.g. `"M1/no-jump/post-pass"`.
    pub fn leaf(&self, path: &str) -> Option<&TrajectoryBranch> {
        self.branches.iter().find(|b| b.path_string() == path)
    }
}
