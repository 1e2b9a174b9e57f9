//! The acceptance suite behind `qsim verify`.
//!
//! Each criterion returns a [`CriterionResult`]; randomized ensembles draw
//! from a ChaCha generator seeded by the caller, so a given seed always
//! produces the same report. Claims that fail as stated are collected in a
//! `discrepancies` list instead of being reconciled.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::channels::{
    channel_density_oracle, damping_branch, optimal_p1, optimal_p1_w, protect_unknown_qubit, AmplitudeDamping,
};
use crate::entanglement::{residual_tangle, three_tangle};
use crate::error::{Error, Result};
use crate::output::{fmt_real, not_reproduced, rows_csv, Document};
use crate::protocols::{
    bell_generate, case_angle, chi_pair, pairing_stability, search_pairings, w_generate, AngleRule,
    CaseParameter, TeleportCase, Verdict, BIT_THRESHOLD, REPRODUCED_THRESHOLD,
};
use crate::qstate::{
    apply_op, c, cr, fidelity, normalize, BellLabel, Complex, DensityMatrix, QubitOperator, StateVector,
};
use crate::report::{Discrepancy, NormalizationMode};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    pub tolerance: f64,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, name: &str, tolerance: f64) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed: false,
            expected: String::new(),
            actual: String::new(),
            tolerance,
            detail: String::new(),
        }
    }

    fn errored(mut self, e: Error) -> Self {
        self.passed = false;
        self.actual = format!("error: {e}");
        self
    }

    /// One `PASS`/`FAIL` line.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: expected {}, actual {} (tol {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.expected,
            self.actual,
            self.tolerance
        )
    }
}

/// Draws uniform in the unit box then normalizes; rejects near-zero draws.
pub fn random_state(rng: &mut impl Rng, qubits: usize) -> StateVector {
    loop {
        let amps: Vec<Complex> = (0..1usize << qubits)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let raw = StateVector::new(amps).expect("finite");
        if raw.norm_sqr() > 1e-3 {
            return normalize(&raw).expect("nonzero").0;
        }
    }
}

/// Uniformly random unit quaternion as an SU(2) matrix.
pub fn random_su2(rng: &mut impl Rng) -> QubitOperator {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(1e-3..=1.0).contains(&n) {
            continue;
        }
        let [a, b, cc, d] = q.map(|x| x / n);
        return QubitOperator::from_rows(2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)]).expect("2x2");
    }
}

fn run(result: CriterionResult, body: impl FnOnce(&mut CriterionResult) -> Result<()>) -> CriterionResult {
    let mut r = result;
    match body(&mut r) {
        Ok(()) => r,
        Err(e) => r.errored(e),
    }
}

const PROTECT_P: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const PROTECT_GT: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

fn feasible_protect_grid() -> (Vec<(f64, f64)>, usize) {
    let mut grid = Vec::new();
    let mut skipped = 0;
    for p in PROTECT_P {
        for gt in PROTECT_GT {
            if optimal_p1(p, gt).is_ok() {
                grid.push((p, gt));
            } else {
                skipped += 1;
            }
        }
    }
    (grid, skipped)
}

pub fn criterion_1(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(1, "success probability (1-p)e^-gt", 1e-12);
    run(r, |r| {
        let (grid, skipped) = feasible_protect_grid();
        let states: Vec<StateVector> = (0..100).map(|_| random_state(rng, 1)).collect();
        let (mut worst, mut worst_var) = (0.0f64, 0.0f64);
        for &(p, gt) in &grid {
            let expected = (1.0 - p) * (-gt).exp();
            let mut vals = Vec::with_capacity(states.len());
            for s in &states {
                let rep = protect_unknown_qubit(s.amp(0), s.amp(1), p, gt)?;
                vals.push(rep.probabilities["success_path_prob"]);
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            worst_var = worst_var.max(var);
            for v in vals {
                worst = worst.max((v - expected).abs());
            }
        }
        r.passed = !grid.is_empty() && worst <= 1e-12 && worst_var < 1e-20;
        r.expected = "max |P - (1-p)e^-gt| <= 1e-12, variance < 1e-20".into();
        r.actual = format!("max error {worst:.3e}, max variance {worst_var:.3e}");
        r.detail = format!("{} feasible grid points x 100 states; {skipped} infeasible points skipped", grid.len());
        Ok(())
    })
}

pub fn criterion_2(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(2, "state protection on M1 and M2 branches", 1e-12);
    run(r, |r| {
        let (grid, _) = feasible_protect_grid();
        let states: Vec<StateVector> = (0..100).map(|_| random_state(rng, 1)).collect();
        let mut worst = 1.0f64;
        for &(p, gt) in &grid {
            for s in &states {
                let rep = protect_unknown_qubit(s.amp(0), s.amp(1), p, gt)?;
                worst = worst.min(rep.metrics["fidelity_m1"]).min(rep.metrics["fidelity_m2"]);
            }
        }
        r.passed = worst >= 1.0 - 1e-12;
        r.expected = "fidelity >= 1 - 1e-12".into();
        r.actual = format!("min fidelity 1 - {:.3e}", 1.0 - worst);
        r.detail = format!("{} feasible grid points x 100 states, both branches", grid.len());
        Ok(())
    })
}

/// Random feasible `(p, Γτ)` for the Bell protocol.
fn random_feasible(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let p = rng.random_range(0.05..0.95);
        let gt = rng.random_range(0.0..2.0);
        if optimal_p1(p, gt).is_ok() {
            return (p, gt);
        }
    }
}

/// `(α, γ)` with `2α² + 2γ² = 1`, both away from zero, in the given quadrant.
fn random_family(rng: &mut ChaCha8Rng, same_sign: bool) -> (f64, f64) {
    let theta: f64 = rng.random_range(0.02..FRAC_PI_2 - 0.02);
    let (a, g) = (theta.cos() * FRAC_1_SQRT_2, theta.sin() * FRAC_1_SQRT_2);
    let flip = rng.random_bool(0.5);
    match (same_sign, flip) {
        (true, false) => (a, g),
        (true, true) => (-a, -g),
        (false, false) => (a, -g),
        (false, true) => (-a, g),
    }
}

pub fn criterion_3(rng: &mut ChaCha8Rng, ledger: &mut Vec<Discrepancy>) -> CriterionResult {
    let r = CriterionResult::new(3, "Bell generation, paper mode", 1e-12);
    run(r, |r| {
        let (mut fid_err, mut prob_err) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let (a, g) = random_family(rng, true);
            let (p, gt) = random_feasible(rng);
            let rep = bell_generate(cr(a), cr(-a), cr(g), cr(g), p, gt, NormalizationMode::Paper)?;
            fid_err = fid_err.max((1.0 - rep.target_fidelity).abs());
            prob_err = prob_err.max((rep.probabilities["m1_outcome"] - 0.5).abs());
        }
        r.passed = fid_err <= 1e-12 && prob_err <= 1e-12;
        r.expected = "phi+ fidelity 1 and M1 probability 1/2".into();
        r.actual = format!("max fidelity error {fid_err:.3e}, max probability error {prob_err:.3e}");
        r.detail = "100 draws with sign(alpha) = sign(gamma); opposite signs are checked separately".into();

        // Opposite signs: the claim fails (phi- instead of phi+).
        let (mut phi_minus, mut total) = (0usize, 0usize);
        let mut worst_phi_plus = 0.0f64;
        for _ in 0..100 {
            let (a, g) = random_family(rng, false);
            let (p, gt) = random_feasible(rng);
            let rep = bell_generate(cr(a), cr(-a), cr(g), cr(g), p, gt, NormalizationMode::Paper)?;
            let s = rep.final_state.as_ref().expect("paper state");
            total += 1;
            if fidelity(s, &BellLabel::PhiMinus.state())? >= 1.0 - 1e-12 {
                phi_minus += 1;
            }
            worst_phi_plus = worst_phi_plus.max(rep.target_fidelity);
        }
        if phi_minus > 0 {
            ledger.push(Discrepancy::new(
                "beta=-alpha, delta=gamma gives (|00>+|11>)/sqrt2 for real amplitudes",
                "phi+ fidelity 1 for every sign pattern",
                format!("{phi_minus}/{total} opposite-sign draws give phi-; max phi+ fidelity {worst_phi_plus:.3e}"),
                "per-branch renormalization divides by |alpha| and |gamma|, keeping their signs",
            ));
        }
        Ok(())
    })
}

pub fn criterion_4(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(4, "jump branch is a product state", 1e-10);
    run(r, |r| {
        let mut worst_schmidt = 0.0f64;
        let mut worst_conc = 0.0f64;
        let mut cases = vec![(0.5, 0.5, 0.6, 0.5)];
        for _ in 0..50 {
            let same = rng.random_bool(0.5);
            let (a, g) = random_family(rng, same);
            let (p, gt) = random_feasible(rng);
            if gt > 0.0 {
                cases.push((a, g, p, gt));
            }
        }
        for (a, g, p, gt) in cases {
            for mode in [NormalizationMode::Paper, NormalizationMode::Physical] {
                let rep = bell_generate(cr(a), cr(-a), cr(g), cr(g), p, gt, mode)?;
                let s0 = rep.metrics["jump_schmidt_0"];
                let s1 = rep.metrics["jump_schmidt_1"];
                worst_schmidt = worst_schmidt.max((s0 - 1.0).abs()).max(s1.abs());
                worst_conc = worst_conc.max(rep.metrics["jump_concurrence"]);
            }
        }
        r.passed = worst_schmidt <= 1e-10 && worst_conc < 1e-10;
        r.expected = "Schmidt (1, 0), concurrence < 1e-10".into();
        r.actual = format!("max Schmidt deviation {worst_schmidt:.3e}, max concurrence {worst_conc:.3e}");
        r.detail = "both modes, example input plus 50 random family members".into();
        Ok(())
    })
}

pub fn criterion_5(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(5, "trajectory unraveling matches Kraus channel", 1e-12);
    run(r, |r| {
        let mut worst = 0.0f64;
        let rs = [0.0, 0.25, 0.5, 0.75, 1.0];
        for i in 0..200 {
            let psi = random_state(rng, 2);
            let qubit = i % 2;
            for &rv in &rs {
                let branches = damping_branch(&psi, qubit, rv)?;
                let mixture = DensityMatrix::mixture(
                    2,
                    branches
                        .iter()
                        .filter_map(|b| b.state.as_ref().map(|s| (b.joint_prob, s))),
                );
                let oracle = channel_density_oracle(
                    &DensityMatrix::from_pure(&psi),
                    &AmplitudeDamping::from_r(rv)?,
                    qubit,
                )?;
                worst = worst.max(mixture.max_abs_diff(&oracle));
            }
        }
        r.passed = worst <= 1e-12;
        r.expected = "entrywise difference <= 1e-12".into();
        r.actual = format!("max difference {worst:.3e}");
        r.detail = "200 random two-qubit states x r in {0, .25, .5, .75, 1}".into();
        Ok(())
    })
}

const W_ANGLES: usize = 5;
const W_P: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const W_GT: [f64; 3] = [0.1, 0.5, 1.0];

pub fn criterion_6(ledger: &mut Vec<Discrepancy>) -> CriterionResult {
    let r = CriterionResult::new(6, "W-type generation", 1e-9);
    run(r, |r| {
        let angles: Vec<f64> = (0..W_ANGLES).map(|k| k as f64 * PI / 8.0).collect();
        let mut tangle = 0.0f64;
        let (mut w1_err, mut w2_err) = (0.0f64, 0.0f64);
        let (mut points, mut w_points) = (0, 0);
        let mut worst_physical = 1.0f64;
        for &angle in &angles {
            for &p in &W_P {
                for &gt in &W_GT {
                    for u in [0.5, 0.6, 0.8f64] {
                        let v = (1.0 - u * u).sqrt();
                        if optimal_p1_w(p, gt, u, v).is_err() {
                            continue;
                        }
                        points += 1;
                        let rep = w_generate(angle, u, p, gt, NormalizationMode::Paper, false)?;
                        tangle = tangle
                            .max(rep.metrics["three_tangle_intermediate_paper"])
                            .max(rep.metrics.get("three_tangle_intermediate_physical").copied().unwrap_or(0.0));
                    }
                    let h = FRAC_1_SQRT_2;
                    if optimal_p1_w(p, gt, h, h).is_err() {
                        continue;
                    }
                    w_points += 1;
                    let plain = w_generate(angle, h, p, gt, NormalizationMode::Paper, false)?;
                    w1_err = w1_err.max((1.0 - plain.metrics["fidelity_w1"]).abs());
                    let flipped = w_generate(angle, h, p, gt, NormalizationMode::Paper, true)?;
                    w2_err = w2_err.max((1.0 - flipped.metrics["fidelity_w2"]).abs());
                    let physical = w_generate(angle, h, p, gt, NormalizationMode::Physical, false)?;
                    worst_physical = worst_physical.min(physical.metrics["fidelity_w1"]);
                }
            }
        }
        let a_ok = tangle < 1e-9;
        let b_ok = w1_err <= 1e-12;
        let c_ok = w2_err <= 1e-12;
        r.passed = points > 0 && w_points > 0 && a_ok && b_ok && c_ok;
        r.expected = "(a) tangle < 1e-9; (b) W1 fidelity 1 +- 1e-12; (c) W2 fidelity 1 +- 1e-12".into();
        r.actual = format!("(a) {tangle:.3e}; (b) {w1_err:.3e}; (c) {w2_err:.3e}");
        r.detail = format!("{points} feasible (angle, u, p, gt) points; {w_points} points at u = v = 1/sqrt2");
        if worst_physical < 1.0 - 1e-9 {
            ledger.push(Discrepancy::new(
                "u = v = 1/sqrt2 yields (|000> + cos a|110> + sin a|101>)/sqrt2",
                "fidelity 1 under physical normalization",
                format!("min fidelity {worst_physical:.12} over the grid"),
                "holds with per-branch renormalization only",
            ));
        }
        Ok(())
    })
}

fn ghz() -> StateVector {
    let mut a = [0.0; 8];
    a[0] = FRAC_1_SQRT_2;
    a[7] = FRAC_1_SQRT_2;
    StateVector::from_real(&a).expect("ghz")
}

fn w_state() -> StateVector {
    let k = 1.0 / 3f64.sqrt();
    let mut a = [0.0; 8];
    a[1] = k;
    a[2] = k;
    a[4] = k;
    StateVector::from_real(&a).expect("w")
}

pub fn criterion_7(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(7, "three-tangle cross-validation", 1e-8);
    run(r, |r| {
        let mut ckw = 0.0f64;
        for _ in 0..200 {
            let psi = random_state(rng, 3);
            ckw = ckw.max((three_tangle(&psi)? - residual_tangle(&psi)?).abs());
        }
        let ghz_err = (three_tangle(&ghz())? - 1.0).abs();
        let w_err = three_tangle(&w_state())?.abs();
        let mut lu = 0.0f64;
        for _ in 0..100 {
            let psi = random_state(rng, 3);
            let mut moved = psi.clone();
            for q in 0..3 {
                moved = apply_op(&moved, &random_su2(rng), &[q])?;
            }
            lu = lu.max((three_tangle(&psi)? - three_tangle(&moved)?).abs());
        }
        r.passed = ckw <= 1e-8 && ghz_err <= 1e-10 && w_err <= 1e-10 && lu <= 1e-9;
        r.expected = "CKW <= 1e-8, GHZ 1 +- 1e-10, W 0 +- 1e-10, LU <= 1e-9".into();
        r.actual = format!("CKW {ckw:.3e}, GHZ {ghz_err:.3e}, W {w_err:.3e}, LU {lu:.3e}");
        r.detail = "200 random states for CKW; 100 random local-unitary triples".into();
        Ok(())
    })
}

pub fn criterion_8() -> CriterionResult {
    let r = CriterionResult::new(8, "non-orthogonal pair overlap", 1e-12);
    run(r, |r| {
        let mut worst = 0.0f64;
        let mut n = 0;
        for i in 1..=9 {
            for j in 0..=10 {
                let (x, s) = (i as f64 / 10.0, j as f64 / 10.0);
                let (a, b) = chi_pair(x, s)?;
                let overlap = a.inner(&b)?;
                worst = worst
                    .max((overlap - cr(s)).norm())
                    .max((a.norm_sqr() - 1.0).abs())
                    .max((b.norm_sqr() - 1.0).abs());
                n += 1;
            }
        }
        r.passed = worst <= 1e-12;
        r.expected = "|<chi1|chi2> - s| <= 1e-12".into();
        r.actual = format!("max error {worst:.3e}");
        r.detail = format!("{n} grid points");
        Ok(())
    })
}

/// Independent domain test for a case: `Some(true)` when defined, `None`
/// when within 1e-9 of a boundary.
fn case_defined(case: TeleportCase, x: f64, s: f64) -> Option<bool> {
    let y = (1.0 - x * x).sqrt();
    let t = (1.0 - s * s).sqrt();
    let (num, den) = match case.parameter() {
        CaseParameter::K => (x * (s * x + y * t), y * (s * y - x * t)),
        CaseParameter::L => (x * (s * y - x * t), y * (s * x + y * t)),
    };
    if den.abs() < 1e-9 {
        return None;
    }
    let q = num / den;
    match case.angle_rule() {
        AngleRule::Rational { .. } => Some(true),
        AngleRule::RootPlus | AngleRule::RootMinus => {
            let rad = 2.0 - q * q;
            if rad.abs() < 1e-9 {
                None
            } else {
                Some(rad >= 0.0)
            }
        }
    }
}

pub fn criterion_9(rng: &mut ChaCha8Rng) -> CriterionResult {
    let r = CriterionResult::new(9, "case-angle identities and domains", 1e-12);
    run(r, |r| {
        let mut worst = 0.0f64;
        let mut mismatched = Vec::new();
        let (mut defined, mut undefined) = (0usize, 0usize);
        let mut root_cases_without_gap = Vec::new();
        for case in TeleportCase::ALL {
            let before = undefined;
            for _ in 0..1000 {
                let x: f64 = rng.random_range(0.0..1.0);
                let s: f64 = rng.random_range(0.0..1.0);
                let expect = case_defined(case, x, s);
                match case_angle(case, x, s) {
                    Ok((sa, ca)) => {
                        defined += 1;
                        worst = worst.max((sa * sa + ca * ca - 1.0).abs());
                        if expect == Some(false) {
                            mismatched.push(format!("{} at ({x}, {s}) should be undefined", case.as_str()));
                        }
                    }
                    Err(Error::Undefined(_)) => {
                        undefined += 1;
                        if expect == Some(true) {
                            mismatched.push(format!("{} at ({x}, {s}) should be defined", case.as_str()));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            let root = matches!(case.angle_rule(), AngleRule::RootPlus | AngleRule::RootMinus);
            if root && undefined == before {
                root_cases_without_gap.push(case.as_str());
            }
        }
        r.passed = worst <= 1e-12 && mismatched.is_empty() && root_cases_without_gap.is_empty();
        r.expected = "sin^2 + cos^2 = 1 +- 1e-12; undefined exactly off-domain".into();
        r.actual = format!("max error {worst:.3e}; {} domain mismatches", mismatched.len());
        r.detail = format!(
            "8 cases x 1000 samples: {defined} defined, {undefined} undefined{}",
            mismatched.first().map(|m| format!("; first mismatch: {m}")).unwrap_or_default()
        );
        Ok(())
    })
}

pub const TELEPORT_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub fn criterion_10(ledger: &mut Vec<Discrepancy>, notes: &mut Vec<String>) -> CriterionResult {
    let r = CriterionResult::new(10, "teleportation case table harness", 1e-12);
    run(r, |r| {
        let mut nondeterministic = 0;
        let mut completeness = 0.0f64;
        let mut inconsistent = 0;
        let (mut reproduced, mut not_rep, mut undefined) = (0, 0, 0);
        for case in TeleportCase::ALL {
            for &x in &TELEPORT_GRID {
                for &s in &TELEPORT_GRID {
                    let first = search_pairings(case, x, s);
                    let second = search_pairings(case, x, s);
                    if first != second {
                        nondeterministic += 1;
                    }
                    let rep = match first {
                        Ok(rep) => rep,
                        Err(Error::Undefined(_)) => {
                            undefined += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    for row in &rep.rows {
                        completeness = completeness.max((row.total_prob - 1.0).abs());
                    }
                    let best = rep.best_row();
                    let should = best.max_fidelity >= REPRODUCED_THRESHOLD;
                    if should != (rep.verdict == Verdict::Reproduced) {
                        inconsistent += 1;
                    }
                    if rep.verdict == Verdict::Reproduced {
                        reproduced += 1;
                    } else {
                        not_rep += 1;
                        ledger.push(not_reproduced(case.as_str(), x, s, &best.pairing.label(), best.max_fidelity));
                    }
                }
            }
            let stability = pairing_stability(case, &TELEPORT_GRID, &TELEPORT_GRID);
            notes.push(format!(
                "Case-{}: arg-max pairing {} over the 5x5 grid",
                case.as_str(),
                if stability.stable { "stable" } else { "UNSTABLE" }
            ));
        }
        r.passed = nondeterministic == 0 && completeness <= 1e-12 && inconsistent == 0;
        r.expected = "deterministic reports; outcome probabilities sum to 1 +- 1e-12".into();
        r.actual = format!(
            "{nondeterministic} nondeterministic, max completeness error {completeness:.3e}, {inconsistent} verdict inconsistencies"
        );
        r.detail = format!(
            "8 cases x 25 points: {reproduced} REPRODUCED, {not_rep} NOT_REPRODUCED, {undefined} UNDEFINED (BIT threshold {BIT_THRESHOLD})"
        );
        Ok(())
    })
}

/// Max amplitude difference after removing the global phase of `b` against `a`.
pub fn phase_aligned_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = b.inner(a)?;
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { cr(1.0) };
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max))
}

pub fn criterion_11(rng: &mut ChaCha8Rng, ledger: &mut Vec<Discrepancy>) -> CriterionResult {
    let r = CriterionResult::new(11, "Bell generation, physical mode", 1e-10);
    run(r, |r| {
        let (mut dist, mut conc) = (0.0f64, 0.0f64);
        let mut worst_phi_plus = 0.0f64;
        for _ in 0..100 {
            let same = rng.random_bool(0.5);
            let (a, g) = random_family(rng, same);
            let (p, gt) = random_feasible(rng);
            let rep = bell_generate(cr(a), cr(-a), cr(g), cr(g), p, gt, NormalizationMode::Physical)?;
            let out = rep.final_state.as_ref().expect("physical state");
            let n = (a * a + g * g).sqrt();
            let target = StateVector::from_real(&[0.0, a / n, g / n, 0.0])?;
            dist = dist.max(phase_aligned_distance(out, &target)?);
            let expected = 2.0 * (a * g).abs() / (a * a + g * g);
            conc = conc.max((rep.metrics["concurrence"] - expected).abs());
            worst_phi_plus = worst_phi_plus.max(rep.target_fidelity);
        }
        r.passed = dist <= 1e-10 && conc <= 1e-10;
        r.expected = "(alpha|01> + gamma|10>)/N up to phase; concurrence 2|alpha gamma|/(alpha^2+gamma^2)".into();
        r.actual = format!("max amplitude distance {dist:.3e}, max concurrence error {conc:.3e}");
        r.detail = "100 random family members, all sign patterns".into();
        ledger.push(Discrepancy::new(
            "beta=-alpha, delta=gamma gives (|00>+|11>)/sqrt2",
            "phi+ fidelity 1 under physical normalization",
            format!("max phi+ fidelity {worst_phi_plus:.3e}"),
            "the linear pipeline yields alpha|01> + gamma|10>, a psi-type state",
        ));
        Ok(())
    })
}

/// Claims checked on the printed worked examples.
fn example_discrepancies(ledger: &mut Vec<Discrepancy>) {
    if let Ok(rep) = protect_unknown_qubit(cr(0.6), cr(0.8), 0.6, 0.5) {
        ledger.extend(rep.discrepancies);
    }
    if let Ok(rep) = bell_generate(cr(0.5), cr(-0.5), cr(0.5), cr(0.5), 0.6, 0.5, NormalizationMode::Paper) {
        ledger.extend(rep.discrepancies);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionResult>,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&c.line());
            out.push('\n');
        }
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "{passed}/{} criteria passed; {} discrepancies recorded\n",
            self.criteria.len(),
            self.discrepancies.len()
        ));
        out
    }

    pub fn document(&self, seed: u64) -> Document {
        let mut doc = Document::new("verify", NormalizationMode::Paper);
        doc.seed = Some(seed);
        doc.param("seed", seed.to_string());
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        doc.metric("criteria_passed", passed as f64);
        doc.metric("criteria_total", self.criteria.len() as f64);
        doc.criteria = Some(self.criteria.clone());
        doc.discrepancies = self.discrepancies.clone();
        doc.notes = self.notes.clone();
        doc
    }

    pub fn csv(&self) -> String {
        const COLUMNS: [&str; 7] = ["id", "name", "passed", "expected", "actual", "tolerance", "detail"];
        let rows: Vec<Map<String, Value>> = self
            .criteria
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("id".into(), c.id.to_string().into());
                m.insert("name".into(), c.name.clone().into());
                m.insert("passed".into(), c.passed.to_string().into());
                m.insert("expected".into(), c.expected.clone().into());
                m.insert("actual".into(), c.actual.clone().into());
                m.insert("tolerance".into(), fmt_real(c.tolerance).into());
                m.insert("detail".into(), c.detail.clone().into());
                m
            })
            .collect();
        rows_csv(&COLUMNS, &rows)
    }
}

/// Run all criteria with a generator seeded by `seed`.
pub fn run_all(seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = Vec::new();
    let mut notes = Vec::new();
    example_discrepancies(&mut ledger);
    let criteria = vec![
        criterion_1(&mut rng),
        criterion_2(&mut rng),
        criterion_3(&mut rng, &mut ledger),
        criterion_4(&mut rng),
        criterion_5(&mut rng),
        criterion_6(&mut ledger),
        criterion_7(&mut rng),
        criterion_8(),
        criterion_9(&mut rng),
        criterion_10(&mut ledger, &mut notes),
        criterion_11(&mut rng, &mut ledger),
    ];
    notes.push(format!("Bell convention: {}", crate::qstate::BELL_CONVENTION));
    VerifyReport {
        criteria,
        discrepancies: ledger,
        notes,
    }
}
