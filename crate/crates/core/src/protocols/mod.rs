//! The composed procedures: Bell-pair generation across a damping channel,
//! W-type generation via economical cloning, and the non-orthogonal-state
//! teleportation case table.

mod bell;
mod teleport;
mod wstate;

pub use bell::{bell_generate, bell_generate_with, BellParams};
pub use teleport::{
    case_angle, case_parameter, chi_pair, k_param, l_param, pairing_stability, search_pairings, teleport_case,
    AngleRule, BitClass, CaseParameter, PairSplit, Pairing, PairingReport, PairingRow,
    PatternOrder, StabilityReport, Target, TeleportCase, TeleportOutcome, TeleportReport, Verdict,
    BIT_THRESHOLD, REPRODUCED_THRESHOLD,
};
pub use wstate::{economical_clone, w_generate, w_generate_with, WParams};

use crate::error::Result;
use crate::qstate::{apply_op, normalize, tensor, Complex, QubitOperator, StateVector};

/// One sender-side term `r ⊗ φ` of a state about to have its last qubit
/// transmitted: `rest` is the (unnormalized) vector on the kept qubits and
/// `qubit` the transmitted-qubit factor.
#[derive(Clone, Debug)]
pub(crate) struct SplitTerm {
    pub rest: StateVector,
    pub qubit: [Complex; 2],
}

/// Per-branch renormalization: `Σ_j (1/√2) r_j ⊗ N(F φ_j)`, where `N`
/// rescales to unit norm. Terms whose filtered factor vanishes are dropped;
/// the sum is renormalized at the end and the returned flag records whether
/// that changed anything.
pub(crate) fn paper_mode_state(terms: &[SplitTerm], filter: &QubitOperator) -> Result<(StateVector, bool)> {
    let mut acc: Option<StateVector> = None;
    let weight = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for term in terms {
        let phi = StateVector::new(term.qubit.to_vec())?;
        let filtered = apply_op(&phi, filter, &[0])?;
        let Ok((phi, _)) = normalize(&filtered) else {
            continue;
        };
        let piece = tensor(&term.rest, &phi).scaled(weight);
        acc = Some(match acc {
            None => piece,
            Some(sum) => sum.add(&piece)?,
        });
    }
    let sum = acc.ok_or(crate::error::Error::ZeroNorm(0.0))?;
    let drift = (sum.norm_sqr() - 1.0).abs() > crate::qstate::TOL_EXACT;
    Ok((normalize(&sum)?.0, drift))
}
