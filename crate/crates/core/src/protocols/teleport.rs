//! Teleportation of one of two non-orthogonal states through the
//! `(|100⟩ + cos a|010⟩ + sin a|001⟩)/√2` resource.
//!
//! Register layout: `χ1, χ2, W_a, W_b, W_c` on qubits `0..5`; Bob holds
//! qubit 4. Alice measures two disjoint pairs of `{0,1,2,3}` in the Bell
//! basis. Which pairs, and which pattern label goes with which pair, is not
//! fixed by the case table, so both are parameters here.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{
    apply_op, fidelity, normalize, project_bell, tensor, BellLabel, QubitOperator, StateVector,
    BELL_CONVENTION, TOL_EXACT,
};

/// Fidelity to `|0⟩` or `|1⟩` at or above which Bob's qubit counts as a bit.
pub const BIT_THRESHOLD: f64 = 1.0 - 1e-9;
/// Fidelity at or above which a case counts as reproduced.
pub const REPRODUCED_THRESHOLD: f64 = 1.0 - 1e-9;

const DENOMINATOR_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TeleportCase {
    Ia,
    Ib,
    IIa,
    IIb,
    IIIa,
    IIIb,
    IVa,
    IVb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Target {
    #[serde(rename = "chi1")]
    Chi1,
    #[serde(rename = "chi2")]
    Chi2,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Chi1 => "chi1",
            Target::Chi2 => "chi2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseParameter {
    K,
    L,
}

/// How `(sin a, cos a)` is obtained from `K` (or `L`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AngleRule {
    /// `((t²−1)/(t²+1), sign·2t/(t²+1))`.
    Rational { cos_sign: i8 },
    /// `((√(2−t²)+t)/2, (√(2−t²)−t)/2)`.
    RootPlus,
    /// `((t+√(2−t²))/2, (t−√(2−t²))/2)`.
    RootMinus,
}

impl TeleportCase {
    pub const ALL: [TeleportCase; 8] = [
        TeleportCase::Ia,
        TeleportCase::Ib,
        TeleportCase::IIa,
        TeleportCase::IIb,
        TeleportCase::IIIa,
        TeleportCase::IIIb,
        TeleportCase::IVa,
        TeleportCase::IVb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TeleportCase::Ia => "Ia",
            TeleportCase::Ib => "Ib",
            TeleportCase::IIa => "IIa",
            TeleportCase::IIb => "IIb",
            TeleportCase::IIIa => "IIIa",
            TeleportCase::IIIb => "IIIb",
            TeleportCase::IVa => "IVa",
            TeleportCase::IVb => "IVb",
        }
    }

    /// The two accepted outcome pairs.
    pub fn outcome_patterns(self) -> [(BellLabel, BellLabel); 2] {
        use BellLabel::*;
        let (first, second) = match self {
            TeleportCase::Ia | TeleportCase::Ib => (PsiPlus, [PhiPlus, PhiMinus]),
            TeleportCase::IIa | TeleportCase::IIb => (PsiMinus, [PhiPlus, PhiMinus]),
            TeleportCase::IIIa | TeleportCase::IIIb => (PsiPlus, [PsiPlus, PsiMinus]),
            TeleportCase::IVa | TeleportCase::IVb => (PsiMinus, [PsiPlus, PsiMinus]),
        };
        [(first, second[0]), (first, second[1])]
    }

    pub fn classical_bits(self) -> [u8; 2] {
        match self {
            TeleportCase::Ia | TeleportCase::IIIa | TeleportCase::IIIb => [0, 0],
            TeleportCase::Ib => [0, 1],
            TeleportCase::IIa | TeleportCase::IVa | TeleportCase::IVb => [1, 0],
            TeleportCase::IIb => [1, 1],
        }
    }

    pub fn correction(self) -> QubitOperator {
        match self {
            TeleportCase::Ia | TeleportCase::IIIa | TeleportCase::IIIb => QubitOperator::identity(),
            TeleportCase::Ib => QubitOperator::pauli_x(),
            TeleportCase::IIa | TeleportCase::IVa | TeleportCase::IVb => QubitOperator::pauli_z(),
            TeleportCase::IIb => QubitOperator::minus_i_pauli_y(),
        }
    }

    pub fn correction_name(self) -> &'static str {
        match self {
            TeleportCase::Ia | TeleportCase::IIIa | TeleportCase::IIIb => "I",
            TeleportCase::Ib => "X",
            TeleportCase::IIa | TeleportCase::IVa | TeleportCase::IVb => "Z",
            TeleportCase::IIb => "-iY",
        }
    }

    pub fn target(self) -> Target {
        match self {
            TeleportCase::Ia | TeleportCase::IIa | TeleportCase::IIIb | TeleportCase::IVb => Target::Chi1,
            _ => Target::Chi2,
        }
    }

    pub fn parameter(self) -> CaseParameter {
        match self {
            TeleportCase::Ia | TeleportCase::Ib | TeleportCase::IIa | TeleportCase::IIb => CaseParameter::K,
            _ => CaseParameter::L,
        }
    }

    pub fn angle_rule(self) -> AngleRule {
        match self {
            TeleportCase::Ia | TeleportCase::IIIb => AngleRule::Rational { cos_sign: -1 },
            TeleportCase::IIa | TeleportCase::IVb => AngleRule::Rational { cos_sign: 1 },
            TeleportCase::Ib | TeleportCase::IIIa => AngleRule::RootPlus,
            TeleportCase::IIb | TeleportCase::IVa => AngleRule::RootMinus,
        }
    }
}

impl fmt::Display for TeleportCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TeleportCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TeleportCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown case `{s}` (expected Ia..IVb)"))
    }
}

fn check_xs(x: f64, s: f64) -> Result<f64> {
    crate::error::check_unit_interval("x", x)?;
    crate::error::check_unit_interval("s", s)?;
    Ok((1.0 - x * x).max(0.0).sqrt())
}

/// `χ1 = x|0⟩ + y|1⟩`, `χ2 = (sx + y√(1−s²))|0⟩ + (sy − x√(1−s²))|1⟩`.
pub fn chi_pair(x: f64, s: f64) -> Result<(StateVector, StateVector)> {
    let y = check_xs(x, s)?;
    let t = (1.0 - s * s).max(0.0).sqrt();
    Ok((
        StateVector::from_real(&[x, y])?,
        StateVector::from_real(&[s * x + y * t, s * y - x * t])?,
    ))
}

/// `K = x(sx + y√(1−s²)) / (y(sy − x√(1−s²)))`.
pub fn k_param(x: f64, s: f64) -> Result<f64> {
    let y = check_xs(x, s)?;
    let t = (1.0 - s * s).max(0.0).sqrt();
    let den = y * (s * y - x * t);
    if den.abs() <= DENOMINATOR_EPS {
        return Err(Error::Undefined(format!("K denominator vanishes at x={x}, s={s}")));
    }
    Ok(x * (s * x + y * t) / den)
}

/// `L = x(sy − x√(1−s²)) / (y(sx + y√(1−s²)))`.
pub fn l_param(x: f64, s: f64) -> Result<f64> {
    let y = check_xs(x, s)?;
    let t = (1.0 - s * s).max(0.0).sqrt();
    let den = y * (s * x + y * t);
    if den.abs() <= DENOMINATOR_EPS {
        return Err(Error::Undefined(format!("L denominator vanishes at x={x}, s={s}")));
    }
    Ok(x * (s * y - x * t) / den)
}

/// The case parameter (`K` or `L`) at `(x, s)`.
pub fn case_parameter(case: TeleportCase, x: f64, s: f64) -> Result<f64> {
    match case.parameter() {
        CaseParameter::K => k_param(x, s),
        CaseParameter::L => l_param(x, s),
    }
}

/// `(sin a, cos a)` Alice must choose for `case`.
pub fn case_angle(case: TeleportCase, x: f64, s: f64) -> Result<(f64, f64)> {
    let t = case_parameter(case, x, s)?;
    let radicand = || -> Result<f64> {
        let r = 2.0 - t * t;
        if r < 0.0 {
            Err(Error::Undefined(format!(
                "2 − {:?}² = {r} < 0 at x={x}, s={s}",
                case.parameter()
            )))
        } else {
            Ok(r.sqrt())
        }
    };
    Ok(match case.angle_rule() {
        AngleRule::Rational { cos_sign } => {
            let d = t * t + 1.0;
            ((t * t - 1.0) / d, f64::from(cos_sign) * 2.0 * t / d)
        }
        AngleRule::RootPlus => {
            let q = radicand()?;
            ((q + t) / 2.0, (q - t) / 2.0)
        }
        AngleRule::RootMinus => {
            let q = radicand()?;
            ((t + q) / 2.0, (t - q) / 2.0)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PairSplit {
    #[serde(rename = "02-13")]
    P02_13,
    #[serde(rename = "03-12")]
    P03_12,
    #[serde(rename = "01-23")]
    P01_23,
}

impl PairSplit {
    pub const ALL: [PairSplit; 3] = [PairSplit::P02_13, PairSplit::P03_12, PairSplit::P01_23];

    pub fn pairs(self) -> [(usize, usize); 2] {
        match self {
            PairSplit::P02_13 => [(0, 2), (1, 3)],
            PairSplit::P03_12 => [(0, 3), (1, 2)],
            PairSplit::P01_23 => [(0, 1), (2, 3)],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairSplit::P02_13 => "02-13",
            PairSplit::P03_12 => "03-12",
            PairSplit::P01_23 => "01-23",
        }
    }
}

impl FromStr for PairSplit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PairSplit::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pairing `{s}` (expected 02-13|03-12|01-23)"))
    }
}

/// Which measured pair the first pattern label refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternOrder {
    /// First label on the first pair.
    Forward,
    /// First label on the second pair.
    Swapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Pairing {
    pub split: PairSplit,
    pub order: PatternOrder,
}

impl Pairing {
    pub const DEFAULT: Pairing = Pairing {
        split: PairSplit::P02_13,
        order: PatternOrder::Forward,
    };

    pub fn all() -> impl Iterator<Item = Pairing> {
        PairSplit::ALL.into_iter().flat_map(|split| {
            [PatternOrder::Forward, PatternOrder::Swapped]
                .into_iter()
                .map(move |order| Pairing { split, order })
        })
    }

    pub fn label(&self) -> String {
        match self.order {
            PatternOrder::Forward => self.split.as_str().to_string(),
            PatternOrder::Swapped => format!("{}~swapped", self.split.as_str()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BitClass {
    Bit,
    Qubit,
}

impl BitClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BitClass::Bit => "BIT",
            BitClass::Qubit => "QUBIT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportOutcome {
    /// Labels on the first and second measured pair.
    pub labels: [BellLabel; 2],
    pub prob: f64,
    /// Bob's qubit before correction; `None` if the outcome cannot occur.
    pub bob_state: Option<StateVector>,
    pub class: Option<BitClass>,
    pub matches_pattern: bool,
    /// Fidelity of the corrected qubit to the claimed target.
    pub fidelity: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Reproduced,
    NotReproduced,
    Undefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Reproduced => "REPRODUCED",
            Verdict::NotReproduced => "NOT_REPRODUCED",
            Verdict::Undefined => "UNDEFINED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportReport {
    pub case: TeleportCase,
    pub x: f64,
    pub s: f64,
    pub parameter: f64,
    pub sin_alpha: f64,
    pub cos_alpha: f64,
    pub pairing: Pairing,
    pub classical_bits: [u8; 2],
    pub correction: &'static str,
    pub target: Target,
    pub bell_convention: &'static str,
    pub outcomes: Vec<TeleportOutcome>,
    pub total_prob: f64,
    pub matching_prob: f64,
    pub bit_prob: f64,
    pub qubit_prob: f64,
    /// Max / min target fidelity over matching outcomes that can occur.
    pub max_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub verdict: Verdict,
}

/// `(|100⟩ + cos a|010⟩ + sin a|001⟩)/√2`.
pub(crate) fn w2_state(sin_a: f64, cos_a: f64) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = [0.0; 8];
    amps[0b100] = h;
    amps[0b010] = h * cos_a;
    amps[0b001] = h * sin_a;
    StateVector::from_real(&amps).expect("valid resource")
}

fn classify(bob: &StateVector) -> Result<BitClass> {
    let f0 = fidelity(bob, &StateVector::basis(1, 0))?;
    let f1 = fidelity(bob, &StateVector::basis(1, 1))?;
    Ok(if f0.max(f1) >= BIT_THRESHOLD {
        BitClass::Bit
    } else {
        BitClass::Qubit
    })
}

/// Run `case` at `(x, s)` with the given pair assignment, enumerating all
/// sixteen Bell outcome combinations.
pub fn teleport_case(case: TeleportCase, x: f64, s: f64, pairing: Pairing) -> Result<TeleportReport> {
    let (sin_a, cos_a) = case_angle(case, x, s)?;
    let parameter = case_parameter(case, x, s)?;
    let (chi1, chi2) = chi_pair(x, s)?;
    let target = match case.target() {
        Target::Chi1 => chi1.clone(),
        Target::Chi2 => chi2.clone(),
    };
    let composite = tensor(&tensor(&chi1, &chi2), &w2_state(sin_a, cos_a));

    let [first, second] = pairing.split.pairs();
    for (a, b) in [first, second] {
        if a == b || a > 3 || b > 3 {
            return Err(Error::InvalidPairing(format!("{a}{b}")));
        }
    }
    // After removing `first`, qubit q moves down by the number of removed
    // indices below it.
    let shift = |q: usize| q - [first.0, first.1].iter().filter(|&&r| r < q).count();
    let second_shifted = (shift(second.0), shift(second.1));

    let patterns = case.outcome_patterns();
    let correction = case.correction();
    let mut outcomes = Vec::with_capacity(16);
    for l1 in BellLabel::ALL {
        let (p1, rest) = project_bell(&composite, first, l1)?;
        for l2 in BellLabel::ALL {
            let (p2, bob) = match &rest {
                Some(r) => project_bell(r, second_shifted, l2)?,
                None => (0.0, None),
            };
            let prob = p1 * p2;
            let matches_pattern = match pairing.order {
                PatternOrder::Forward => patterns.contains(&(l1, l2)),
                PatternOrder::Swapped => patterns.contains(&(l2, l1)),
            };
            let (class, fid) = match &bob {
                Some(b) => {
                    let class = classify(b)?;
                    let fid = if matches_pattern {
                        let corrected = normalize(&apply_op(b, &correction, &[0])?)?.0;
                        Some(fidelity(&corrected, &target)?)
                    } else {
                        None
                    };
                    (Some(class), fid)
                }
                None => (None, None),
            };
            outcomes.push(TeleportOutcome {
                labels: [l1, l2],
                prob,
                bob_state: bob,
                class,
                matches_pattern,
                fidelity: fid,
            });
        }
    }

    let total_prob = outcomes.iter().map(|o| o.prob).sum();
    let matching_prob = outcomes.iter().filter(|o| o.matches_pattern).map(|o| o.prob).sum();
    let class_prob = |c: BitClass| -> f64 {
        outcomes
            .iter()
            .filter(|o| o.class == Some(c))
            .map(|o| o.prob)
            .sum()
    };
    let fids: Vec<f64> = outcomes.iter().filter_map(|o| o.fidelity).collect();
    let max_fidelity = fids.iter().copied().reduce(f64::max);
    let min_fidelity = fids.iter().copied().reduce(f64::min);
    let verdict = match max_fidelity {
        Some(f) if f >= REPRODUCED_THRESHOLD => Verdict::Reproduced,
        _ => Verdict::NotReproduced,
    };

    Ok(TeleportReport {
        case,
        x,
        s,
        parameter,
        sin_alpha: sin_a,
        cos_alpha: cos_a,
        pairing,
        classical_bits: case.classical_bits(),
        correction: case.correction_name(),
        target: case.target(),
        bell_convention: BELL_CONVENTION,
        bit_prob: class_prob(BitClass::Bit),
        qubit_prob: class_prob(BitClass::Qubit),
        outcomes,
        total_prob,
        matching_prob,
        max_fidelity,
        min_fidelity,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingRow {
    pub pairing: Pairing,
    pub max_fidelity: f64,
    pub min_fidelity: f64,
    pub matching_prob: f64,
    pub total_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub case: TeleportCase,
    pub x: f64,
    pub s: f64,
    pub bell_convention: &'static str,
    pub rows: Vec<PairingRow>,
    /// Index into `rows` of the first row attaining the maximum fidelity.
    pub best: usize,
    pub verdict: Verdict,
}

impl PairingReport {
    pub fn best_row(&self) -> &PairingRow {
        &self.rows[self.best]
    }
}

/// Evaluate every pair split and pattern order; six rows in canonical order.
pub fn search_pairings(case: TeleportCase, x: f64, s: f64) -> Result<PairingReport> {
    let mut rows = Vec::with_capacity(6);
    for pairing in Pairing::all() {
        let rep = teleport_case(case, x, s, pairing)?;
        rows.push(PairingRow {
            pairing,
            max_fidelity: rep.max_fidelity.unwrap_or(0.0),
            min_fidelity: rep.min_fidelity.unwrap_or(0.0),
            matching_prob: rep.matching_prob,
            total_prob: rep.total_prob,
        });
    }
    let mut best = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.max_fidelity > rows[best].max_fidelity + TOL_EXACT {
            best = i;
        }
    }
    let verdict = if rows[best].max_fidelity >= REPRODUCED_THRESHOLD {
        Verdict::Reproduced
    } else {
        Verdict::NotReproduced
    };
    Ok(PairingReport {
        case,
        x,
        s,
        bell_convention: BELL_CONVENTION,
        rows,
        best,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub case: TeleportCase,
    /// `(x, s, best pairing)`; `None` where the case is undefined.
    pub points: Vec<(f64, f64, Option<Pairing>)>,
    pub stable: bool,
}

/// Arg-max pairing over a grid, flagging whether it ever changes.
pub fn pairing_stability(case: TeleportCase, xs: &[f64], ss: &[f64]) -> StabilityReport {
    let mut points = Vec::with_capacity(xs.len() * ss.len());
    for &x in xs {
        for &s in ss {
            let best = search_pairings(case, x, s).ok().map(|r| r.best_row().pairing);
            points.push((x, s, best));
        }
    }
    let mut defined = points.iter().filter_map(|p| p.2);
    let stable = match defined.next() {
        Some(first) => defined.all(|p| p == first),
        None => true,
    };
    StabilityReport { case, points, stable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn chi_pair_examples() {
        let (a, b) = chi_pair(0.3, 1.0).unwrap();
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.amp(0).re, b.amp(0).re, epsilon = 1e-15);

        let (a, b) = chi_pair(FRAC_1_SQRT_2, 0.0).unwrap();
        assert_abs_diff_eq!(a.inner(&b).unwrap().norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.amp(0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b.amp(1).re, -FRAC_1_SQRT_2, epsilon = 1e-15);

        assert!(chi_pair(1.2, 0.5).is_err());
        assert!(chi_pair(0.5, -0.1).is_err());
    }

    #[test]
    fn k_and_l_examples() {
        let h = FRAC_1_SQRT_2;
        assert_abs_diff_eq!(k_param(h, 0.0).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l_param(h, 0.0).unwrap(), -1.0, epsilon = 1e-12);
        let x = 0.6f64;
        let y = 0.8f64;
        assert_abs_diff_eq!(k_param(x, 1.0).unwrap(), x * x / (y * y), epsilon = 1e-12);
        // sy = x√(1−s²) ⇔ s = x.
        assert!(matches!(k_param(0.6, 0.6), Err(Error::Undefined(_))));
        assert!(matches!(k_param(1.0, 0.5), Err(Error::Undefined(_))));
    }

    #[test]
    fn case_angle_examples() {
        // x = 1/√2, s = 1 gives K = 1.
        let h = FRAC_1_SQRT_2;
        assert_abs_diff_eq!(k_param(h, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        let (s, c) = case_angle(TeleportCase::Ia, h, 1.0).unwrap();
        assert_abs_diff_eq!(s, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c, -1.0, epsilon = 1e-12);
        let (s, c) = case_angle(TeleportCase::Ib, h, 1.0).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.0, epsilon = 1e-12);
        // K² > 2 → undefined for the root forms.
        let k = k_param(0.6, 0.7).unwrap();
        assert!(k * k > 2.0);
        assert!(matches!(case_angle(TeleportCase::Ib, 0.6, 0.7), Err(Error::Undefined(_))));
        assert!(case_angle(TeleportCase::Ia, 0.6, 0.7).is_ok());
    }

    #[test]
    fn case_table_metadata() {
        for case in TeleportCase::ALL {
            assert!(case.correction().is_unitary(TOL_EXACT));
            assert_eq!(case.as_str().parse::<TeleportCase>().unwrap(), case);
        }
        assert_eq!(TeleportCase::IIb.classical_bits(), [1, 1]);
        assert_eq!(TeleportCase::IIIb.target(), Target::Chi1);
        assert!("V".parse::<TeleportCase>().is_err());
    }

    #[test]
    fn outcomes_are_complete_and_classified() {
        for case in TeleportCase::ALL {
            for pairing in Pairing::all() {
                let Ok(rep) = teleport_case(case, 0.6, 0.3, pairing) else { continue };
                assert_eq!(rep.outcomes.len(), 16);
                assert_abs_diff_eq!(rep.total_prob, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(rep.bit_prob + rep.qubit_prob, 1.0, epsilon = 1e-12);
                for o in &rep.outcomes {
                    assert_eq!(o.bob_state.is_some(), o.class.is_some());
                }
            }
        }
    }

    #[test]
    fn search_has_six_rows_in_range() {
        let rep = search_pairings(TeleportCase::Ia, 0.6, 0.3).unwrap();
        assert_eq!(rep.rows.len(), 6);
        for row in &rep.rows {
            assert!((0.0..=1.0).contains(&row.max_fidelity));
        }
    }

    #[test]
    fn overlap_one_makes_targets_coincide() {
        let (a, b) = chi_pair(0.35, 1.0).unwrap();
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
    }
}
