//! Weak measurements, the amplitude-damping channel, feed-forward operators
//! and the exact jump / no-jump branching engine.
//!
//! Every branching step returns both outcomes with their conditional
//! probability; [`TrajectoryBranch::extend`] chains steps and keeps the
//! joint probability along the path.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::qstate::{
    apply_op, cr, fidelity, normalize, Complex, DensityMatrix, QubitOperator, StateVector,
    TOL_EXACT, ZERO_NORM_SQR,
};
use crate::report::{Discrepancy, NormalizationMode, ProtocolReport};

/// Pre-weak measurement `M1 = diag(√p, √(1−p))`, `M2 = diag(√(1−p), √p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakMeasurement {
    p: f64,
}

impl WeakMeasurement {
    pub fn new(p: f64) -> Result<Self> {
        check_unit_interval("p", p)?;
        Ok(Self { p })
    }

    pub fn strength(&self) -> f64 {
        self.p
    }

    pub fn m1(&self) -> QubitOperator {
        QubitOperator::diag(self.p.sqrt(), (1.0 - self.p).sqrt())
    }

    pub fn m2(&self) -> QubitOperator {
        QubitOperator::diag((1.0 - self.p).sqrt(), self.p.sqrt())
    }

    pub fn operator(&self, outcome: PreOutcome) -> QubitOperator {
        match outcome {
            PreOutcome::M1 => self.m1(),
            PreOutcome::M2 => self.m2(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PreOutcome {
    M1,
    M2,
}

impl PreOutcome {
    pub fn label(self) -> BranchLabel {
        match self {
            PreOutcome::M1 => BranchLabel::M1,
            PreOutcome::M2 => BranchLabel::M2,
        }
    }

    /// Post-weak orientation that undoes the bias of this outcome.
    pub fn post_orientation(self) -> PostOrientation {
        match self {
            PreOutcome::M1 => PostOrientation::SuppressZero,
            PreOutcome::M2 => PostOrientation::SuppressOne,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PostOrientation {
    /// `O = diag(√(1−p1), 1)`.
    SuppressZero,
    /// `O = diag(1, √(1−p1))`.
    SuppressOne,
}

/// Post-weak measurement: pass element `O` and its completion `O'` with
/// `O'†O' = I − O†O`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostWeakMeasurement {
    p1: f64,
    orientation: PostOrientation,
}

impl PostWeakMeasurement {
    pub fn new(p1: f64, orientation: PostOrientation) -> Result<Self> {
        check_unit_interval("p1", p1)?;
        Ok(Self { p1, orientation })
    }

    pub fn strength(&self) -> f64 {
        self.p1
    }

    pub fn pass_op(&self) -> QubitOperator {
        let s = (1.0 - self.p1).sqrt();
        match self.orientation {
            PostOrientation::SuppressZero => QubitOperator::diag(s, 1.0),
            PostOrientation::SuppressOne => QubitOperator::diag(1.0, s),
        }
    }

    pub fn fail_op(&self) -> QubitOperator {
        let s = self.p1.sqrt();
        match self.orientation {
            PostOrientation::SuppressZero => QubitOperator::diag(s, 0.0),
            PostOrientation::SuppressOne => QubitOperator::diag(0.0, s),
        }
    }
}

/// Amplitude damping with `K1 = [[1,0],[0,√(1−r)]]`, `K2 = [[0,√r],[0,0]]`.
///
/// Stored as `r`, the survival factor `1 − r = e^{−Γτ}` and `Γτ` itself, so
/// either parameterization round-trips without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeDamping {
    r: f64,
    survival: f64,
    gamma_tau: f64,
}

impl AmplitudeDamping {
    pub fn from_r(r: f64) -> Result<Self> {
        check_unit_interval("r", r)?;
        Ok(Self {
            r,
            survival: 1.0 - r,
            gamma_tau: -(-r).ln_1p(),
        })
    }

    pub fn from_gamma_tau(gamma_tau: f64) -> Result<Self> {
        if gamma_tau.is_nan() || gamma_tau < 0.0 {
            return Err(Error::Domain {
                name: "gamma_tau",
                value: gamma_tau,
                domain: "[0, ∞)",
            });
        }
        Ok(Self {
            r: -(-gamma_tau).exp_m1(),
            survival: (-gamma_tau).exp(),
            gamma_tau,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `e^{−Γτ} = 1 − r`.
    pub fn survival(&self) -> f64 {
        self.survival
    }

    /// `Γτ = −ln(1 − r)`; infinite at full decay.
    pub fn gamma_tau(&self) -> f64 {
        self.gamma_tau
    }

    pub fn k1(&self) -> QubitOperator {
        QubitOperator::diag(1.0, self.survival.sqrt())
    }

    pub fn k2(&self) -> QubitOperator {
        QubitOperator::from_rows(2, &[cr(0.0), cr(self.r.sqrt()), cr(0.0), cr(0.0)])
            .expect("2x2 Kraus operator")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BranchLabel {
    M1,
    M2,
    #[serde(rename = "no-jump")]
    NoJump,
    #[serde(rename = "jump")]
    Jump,
    #[serde(rename = "post-pass")]
    PostPass,
    #[serde(rename = "post-fail")]
    PostFail,
}

impl BranchLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::M1 => "M1",
            BranchLabel::M2 => "M2",
            BranchLabel::NoJump => "no-jump",
            BranchLabel::Jump => "jump",
            BranchLabel::PostPass => "post-pass",
            BranchLabel::PostFail => "post-fail",
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One path through the measurement / jump tree.
///
/// `state` is `None` when the branch has zero probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryBranch {
    pub path: Vec<BranchLabel>,
    /// Probability of the last step given the parent branch.
    pub cond_prob: f64,
    pub joint_prob: f64,
    pub state: Option<StateVector>,
}

impl TrajectoryBranch {
    pub fn root(state: StateVector) -> Self {
        Self {
            path: Vec::new(),
            cond_prob: 1.0,
            joint_prob: 1.0,
            state: Some(state),
        }
    }

    pub fn path_string(&self) -> String {
        self.path
            .iter()
            .map(|l| l.as_str())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Apply one branching step to this branch. Impossible branches stay as
    /// leaves.
    pub fn extend<F>(&self, step: F) -> Result<Vec<TrajectoryBranch>>
    where
        F: Fn(&StateVector) -> Result<[TrajectoryBranch; 2]>,
    {
        let Some(state) = &self.state else {
            return Ok(vec![self.clone()]);
        };
        let children = step(state)?;
        Ok(children
            .into_iter()
            .map(|child| {
                let mut path = self.path.clone();
                path.extend(child.path);
                TrajectoryBranch {
                    path,
                    cond_prob: child.cond_prob,
                    joint_prob: self.joint_prob * child.cond_prob,
                    state: child.state,
                }
            })
            .collect())
    }

    /// Apply a unitary to the branch state in place.
    pub fn map_unitary(&mut self, op: &QubitOperator, targets: &[usize]) -> Result<()> {
        if let Some(state) = &self.state {
            let (next, _) = normalize(&apply_op(state, op, targets)?)?;
            self.state = Some(next);
        }
        Ok(())
    }
}

/// Extend every branch in `branches` with `step`, keeping order.
pub fn expand<F>(branches: Vec<TrajectoryBranch>, step: F) -> Result<Vec<TrajectoryBranch>>
where
    F: Fn(&StateVector) -> Result<[TrajectoryBranch; 2]>,
{
    let mut out = Vec::with_capacity(branches.len() * 2);
    for b in &branches {
        out.extend(b.extend(&step)?);
    }
    Ok(out)
}

fn require_normalized(state: &StateVector) -> Result<()> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

fn split(
    state: &StateVector,
    qubit: usize,
    outcomes: [(BranchLabel, QubitOperator); 2],
) -> Result<[TrajectoryBranch; 2]> {
    require_normalized(state)?;
    state.check_qubit(qubit)?;
    let make = |(label, op): (BranchLabel, QubitOperator)| -> Result<TrajectoryBranch> {
        let raw = apply_op(state, &op, &[qubit])?;
        let prob = raw.norm_sqr();
        let (cond_prob, next) = if prob < ZERO_NORM_SQR {
            (0.0, None)
        } else {
            (prob.min(1.0), Some(normalize(&raw)?.0))
        };
        Ok(TrajectoryBranch {
            path: vec![label],
            cond_prob,
            joint_prob: cond_prob,
            state: next,
        })
    };
    let [a, b] = outcomes;
    Ok([make(a)?, make(b)?])
}

/// Pre-weak measurement on `qubit`: `[M1 branch, M2 branch]`.
pub fn pre_weak_branch(state: &StateVector, qubit: usize, p: f64) -> Result<[TrajectoryBranch; 2]> {
    let m = WeakMeasurement::new(p)?;
    split(
        state,
        qubit,
        [(BranchLabel::M1, m.m1()), (BranchLabel::M2, m.m2())],
    )
}

/// Amplitude damping on `qubit`: `[no-jump (K1), jump (K2)]`.
pub fn damping_branch(state: &StateVector, qubit: usize, r: f64) -> Result<[TrajectoryBranch; 2]> {
    let ad = AmplitudeDamping::from_r(r)?;
    damping_branch_with(state, qubit, &ad)
}

pub fn damping_branch_with(
    state: &StateVector,
    qubit: usize,
    channel: &AmplitudeDamping,
) -> Result<[TrajectoryBranch; 2]> {
    split(
        state,
        qubit,
        [
            (BranchLabel::NoJump, channel.k1()),
            (BranchLabel::Jump, channel.k2()),
        ],
    )
}

/// Post-weak measurement on `qubit`: `[pass (O), fail (O')]`.
pub fn post_weak_branch(
    state: &StateVector,
    qubit: usize,
    p1: f64,
    orientation: PostOrientation,
) -> Result<[TrajectoryBranch; 2]> {
    let o = PostWeakMeasurement::new(p1, orientation)?;
    split(
        state,
        qubit,
        [
            (BranchLabel::PostPass, o.pass_op()),
            (BranchLabel::PostFail, o.fail_op()),
        ],
    )
}

fn check_feasible(p1: f64) -> Result<f64> {
    if !p1.is_finite() || !(-TOL_EXACT..=1.0 + TOL_EXACT).contains(&p1) {
        return Err(Error::InfeasibleP1 { p1 });
    }
    Ok(p1.clamp(0.0, 1.0))
}

fn check_strength_and_rate(p: f64, gamma_tau: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(0, 1]",
        });
    }
    if gamma_tau.is_nan() || gamma_tau < 0.0 {
        return Err(Error::Domain {
            name: "gamma_tau",
            value: gamma_tau,
            domain: "[0, ∞)",
        });
    }
    Ok(())
}

/// Post-weak strength that restores the input: `1 − (1−p)e^{−Γτ}/p`.
pub fn optimal_p1(p: f64, gamma_tau: f64) -> Result<f64> {
    check_strength_and_rate(p, gamma_tau)?;
    check_feasible(1.0 - (1.0 - p) * (-gamma_tau).exp() / p)
}

/// Post-weak strength for a qubit prepared by the non-maximal Hadamard
/// `(u, v)`: `1 − v²(1−p)e^{−Γτ}/(u²p)`.
pub fn optimal_p1_w(p: f64, gamma_tau: f64, u: f64, v: f64) -> Result<f64> {
    check_strength_and_rate(p, gamma_tau)?;
    if ((u * u + v * v) - 1.0).abs() > TOL_EXACT {
        return Err(Error::Domain {
            name: "u",
            value: u,
            domain: "u² + v² = 1",
        });
    }
    if u.abs() < TOL_EXACT {
        return Err(Error::Domain {
            name: "u",
            value: u,
            domain: "u ≠ 0",
        });
    }
    check_feasible(1.0 - v * v * (1.0 - p) * (-gamma_tau).exp() / (u * u * p))
}

/// `F1 = I` after outcome M1, `F2 = σx` after M2. Both are involutions, so
/// the reversal is the operator itself.
pub fn feed_forward_for(outcome: PreOutcome) -> QubitOperator {
    match outcome {
        PreOutcome::M1 => QubitOperator::identity(),
        PreOutcome::M2 => QubitOperator::pauli_x(),
    }
}

fn embed(op: &QubitOperator, qubit: usize, qubits: usize) -> DMatrix<Complex> {
    let mut full = DMatrix::<Complex>::identity(1, 1);
    for k in 0..qubits {
        let factor = if k == qubit {
            op.matrix().clone()
        } else {
            DMatrix::<Complex>::identity(2, 2)
        };
        full = full.kronecker(&factor);
    }
    full
}

/// `Σ_i K_i ρ K_i†` with the Kraus operators embedded on `qubit`.
pub fn channel_density_oracle(
    rho: &DensityMatrix,
    channel: &AmplitudeDamping,
    qubit: usize,
) -> Result<DensityMatrix> {
    let n = rho.qubit_count();
    if qubit >= n {
        return Err(Error::QubitOutOfRange { index: qubit, qubits: n });
    }
    let mut out = DMatrix::<Complex>::zeros(rho.matrix().nrows(), rho.matrix().ncols());
    for k in [channel.k1(), channel.k2()] {
        let full = embed(&k, qubit, n);
        out += &full * rho.matrix() * full.adjoint();
    }
    DensityMatrix::from_matrix(out)
}

/// Choice of post-weak strength.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum P1Choice {
    /// Use the recovery-optimal value.
    #[default]
    Auto,
    Fixed(f64),
}

impl P1Choice {
    pub(crate) fn resolve(self, auto: impl FnOnce() -> Result<f64>) -> Result<f64> {
        match self {
            P1Choice::Auto => auto(),
            P1Choice::Fixed(p1) => {
                check_unit_interval("p1", p1)?;
                Ok(p1)
            }
        }
    }
}

/// Run the full feed-forward chain on `qubit` for one pre-weak outcome:
/// `F_i`, damping, `F_i⁻¹`, then the post-weak filter oriented for `i`.
/// Input branches are those produced by the pre-weak step.
pub(crate) fn transmit_branch(
    branch: &TrajectoryBranch,
    outcome: PreOutcome,
    qubit: usize,
    channel: &AmplitudeDamping,
    p1: f64,
) -> Result<Vec<TrajectoryBranch>> {
    let ff = feed_forward_for(outcome);
    let mut start = branch.clone();
    start.map_unitary(&ff, &[qubit])?;
    let mut damped = start.extend(|s| damping_branch_with(s, qubit, channel))?;
    for b in &mut damped {
        b.map_unitary(&ff, &[qubit])?;
    }
    expand(damped, |s| {
        post_weak_branch(s, qubit, p1, outcome.post_orientation())
    })
}

/// Full branch tree for sending `qubit` of `state` through the channel with
/// weak-measurement protection; leaves in canonical path order.
pub(crate) fn protection_tree(
    state: &StateVector,
    qubit: usize,
    p: f64,
    channel: &AmplitudeDamping,
    p1: f64,
) -> Result<Vec<TrajectoryBranch>> {
    let root = TrajectoryBranch::root(state.clone());
    let [m1, m2] = root.extend(|s| pre_weak_branch(s, qubit, p))?
        .try_into()
        .expect("two pre-weak outcomes");
    let mut leaves = transmit_branch(&m1, PreOutcome::M1, qubit, channel, p1)?;
    leaves.extend(transmit_branch(&m2, PreOutcome::M2, qubit, channel, p1)?);
    Ok(leaves)
}

/// Protect `α|0⟩ + β|1⟩` through amplitude damping `Γτ` with pre-weak
/// strength `p` and the recovery-optimal post-weak strength.
pub fn protect_unknown_qubit(alpha: Complex, beta: Complex, p: f64, gamma_tau: f64) -> Result<ProtocolReport> {
    let channel = AmplitudeDamping::from_gamma_tau(gamma_tau)?;
    protect_with(alpha, beta, p, &channel, P1Choice::Auto)
}

pub fn protect_with(
    alpha: Complex,
    beta: Complex,
    p: f64,
    channel: &AmplitudeDamping,
    p1: P1Choice,
) -> Result<ProtocolReport> {
    let input = StateVector::qubit(alpha, beta)?;
    require_normalized(&input)?;
    check_unit_interval("p", p)?;
    let survival = channel.survival();
    let p1 = p1.resolve(|| optimal_p1(p, channel.gamma_tau()))?;
    let leaves = protection_tree(&input, 0, p, channel, p1)?;

    let mut report = ProtocolReport::new("protect", NormalizationMode::Physical);
    report.param("alpha_re", alpha.re);
    report.param("alpha_im", alpha.im);
    report.param("beta_re", beta.re);
    report.param("beta_im", beta.im);
    report.param("p", p);
    report.param("r", channel.r());
    report.param("gamma_tau", channel.gamma_tau());
    report.param("p1", p1);

    let b2 = beta.norm_sqr();
    let joint = |path: &str| {
        leaves
            .iter()
            .filter(|l| l.path_string().starts_with(path))
            .map(|l| l.joint_prob)
            .sum::<f64>()
    };
    let n_m1 = joint("M1");
    let m1_jump = joint("M1/jump");
    let m1_no_jump = joint("M1/no-jump");
    report.prob("m1_outcome", n_m1);
    report.prob("m2_outcome", joint("M2"));
    report.prob("m1_no_jump_joint", m1_no_jump);
    report.prob("m1_no_jump_conditional", if n_m1 > 0.0 { m1_no_jump / n_m1 } else { 0.0 });
    report.prob("m1_jump_joint", m1_jump);
    report.prob("m1_jump_conditional", if n_m1 > 0.0 { m1_jump / n_m1 } else { 0.0 });
    // As printed: P^j = N_M1 |β|² r.
    let printed_jump = n_m1 * b2 * channel.r();
    report.prob("m1_jump_as_printed", printed_jump);
    let success_m1 = joint("M1/no-jump/post-pass");
    let success_m2 = joint("M2/no-jump/post-pass");
    report.prob("success_path_prob", success_m1);
    report.prob("m2_success_path_prob", success_m2);
    report.prob("total_success_prob", success_m1 + success_m2);
    report.prob(
        "expected_success_path_prob",
        (1.0 - p) * survival,
    );

    let mut worst: f64 = 1.0;
    for (key, path) in [
        ("fidelity_m1", "M1/no-jump/post-pass"),
        ("fidelity_m2", "M2/no-jump/post-pass"),
    ] {
        let leaf = leaves.iter().find(|l| l.path_string() == path).expect("leaf exists");
        let f = match &leaf.state {
            Some(s) => fidelity(s, &input)?,
            None => f64::NAN,
        };
        if f.is_finite() {
            worst = worst.min(f);
        }
        report.metric(key, f);
    }
    report.target_fidelity = worst;
    report.final_state = leaves
        .iter()
        .find(|l| l.path_string() == "M1/no-jump/post-pass")
        .and_then(|l| l.state.clone());

    if p == 0.0 || p == 1.0 {
        report
            .flags
            .push("degenerate: p ∈ {0,1} makes the pre-weak step projective".into());
    }
    if (printed_jump - m1_jump).abs() > TOL_EXACT {
        report.discrepancies.push(Discrepancy::new(
            "jump probability P^j = N_M1 |β|² (1 − e^{−Γτ})",
            format!("{printed_jump:.12}"),
            format!("{m1_jump:.12}"),
            format!(
                "joint M1∧jump probability is |β|²(1−p)r; conditional on M1 it is |β|²(1−p)r/N_M1 = {:.12}",
                if n_m1 > 0.0 { m1_jump / n_m1 } else { 0.0 }
            ),
        ));
    }
    report.branches = leaves;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::c;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn completeness(ops: &[QubitOperator]) -> f64 {
        let mut sum = DMatrix::<Complex>::zeros(2, 2);
        for op in ops {
            sum += op.matrix().adjoint() * op.matrix();
        }
        (sum - DMatrix::<Complex>::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn operator_sets_are_complete() {
        for &p in &[0.0, 0.13, 0.5, 0.87, 1.0] {
            let m = WeakMeasurement::new(p).unwrap();
            assert!(completeness(&[m.m1(), m.m2()]) < TOL_EXACT);
            let ad = AmplitudeDamping::from_r(p).unwrap();
            assert!(completeness(&[ad.k1(), ad.k2()]) < TOL_EXACT);
            for o in [PostOrientation::SuppressZero, PostOrientation::SuppressOne] {
                let post = PostWeakMeasurement::new(p, o).unwrap();
                assert!(completeness(&[post.pass_op(), post.fail_op()]) < TOL_EXACT);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(WeakMeasurement::new(1.5).is_err());
        assert!(pre_weak_branch(&StateVector::basis(1, 0), 0, -0.1).is_err());
        assert!(damping_branch(&StateVector::basis(1, 0), 0, 2.0).is_err());
        assert!(post_weak_branch(&StateVector::basis(1, 0), 0, 1.1, PostOrientation::SuppressZero).is_err());
        assert!(AmplitudeDamping::from_gamma_tau(-1.0).is_err());
    }

    #[test]
    fn projective_limit_of_pre_weak() {
        let psi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let [m1, m2] = pre_weak_branch(&psi, 0, 1.0).unwrap();
        assert_abs_diff_eq!(m1.cond_prob, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(m1.state.as_ref().unwrap(), &StateVector::basis(1, 0)).unwrap(), 1.0);
        assert_abs_diff_eq!(fidelity(m2.state.as_ref().unwrap(), &StateVector::basis(1, 1)).unwrap(), 1.0);
    }

    #[test]
    fn pre_weak_m1_matches_reduced_state() {
        let (a, b, p) = (0.6, 0.8, 0.7);
        let psi = StateVector::from_real(&[a, b]).unwrap();
        let [m1, _] = pre_weak_branch(&psi, 0, p).unwrap();
        let n_m1 = a * a * p + b * b * (1.0 - p);
        assert_abs_diff_eq!(m1.cond_prob, n_m1, epsilon = 1e-15);
        let s = m1.state.unwrap();
        assert_abs_diff_eq!(s.amp(0).re, a * p.sqrt() / n_m1.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.amp(1).re, b * (1.0 - p).sqrt() / n_m1.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn damping_no_jump_and_jump() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let [nj, j] = damping_branch(&psi, 0, 0.0).unwrap();
        assert_eq!(nj.cond_prob, 1.0);
        assert_eq!(nj.state.unwrap(), psi);
        assert_eq!(j.cond_prob, 0.0);
        assert!(j.state.is_none());

        let (a, b, p, gt) = (0.6, 0.8, 0.7, 0.9f64);
        let ad = AmplitudeDamping::from_gamma_tau(gt).unwrap();
        let root = TrajectoryBranch::root(StateVector::from_real(&[a, b]).unwrap());
        let m1 = root.extend(|s| pre_weak_branch(s, 0, p)).unwrap().remove(0);
        let kids = m1.extend(|s| damping_branch_with(s, 0, &ad)).unwrap();
        let e = (-gt).exp();
        // Joint M1∧jump probability.
        assert_abs_diff_eq!(kids[1].joint_prob, b * b * (1.0 - p) * (1.0 - e), epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(kids[1].state.as_ref().unwrap(), &StateVector::basis(1, 0)).unwrap(), 1.0);
        // No-jump state.
        let p_nj = a * a * p + b * b * (1.0 - p) * e;
        assert_abs_diff_eq!(kids[0].joint_prob, p_nj, epsilon = 1e-15);
        let s = kids[0].state.as_ref().unwrap();
        assert_abs_diff_eq!(s.amp(0).re, a * p.sqrt() / p_nj.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.amp(1).re, b * (1.0 - p).sqrt() * (-gt / 2.0).exp() / p_nj.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn post_weak_pass_and_fail() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let [pass, fail] = post_weak_branch(&psi, 0, 0.0, PostOrientation::SuppressZero).unwrap();
        assert_eq!(pass.cond_prob, 1.0);
        assert_eq!(pass.state.unwrap(), psi);
        assert!(fail.state.is_none());

        let [_, fail] = post_weak_branch(&psi, 0, 0.4, PostOrientation::SuppressZero).unwrap();
        assert_abs_diff_eq!(fail.cond_prob, 0.36 * 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(fail.state.as_ref().unwrap(), &StateVector::basis(1, 0)).unwrap(), 1.0);

        // Joint probability along M1, no-jump, pass.
        let (a, b, p, gt, p1) = (0.6, 0.8, 0.7, 0.3f64, 0.2);
        let ad = AmplitudeDamping::from_gamma_tau(gt).unwrap();
        let leaves = protection_tree(&StateVector::from_real(&[a, b]).unwrap(), 0, p, &ad, p1).unwrap();
        let leaf = leaves.iter().find(|l| l.path_string() == "M1/no-jump/post-pass").unwrap();
        let e = (-gt).exp();
        assert_abs_diff_eq!(leaf.joint_prob, a * a * p * (1.0 - p1) + b * b * (1.0 - p) * e, epsilon = 1e-15);
    }

    #[test]
    fn optimal_p1_values() {
        assert_eq!(optimal_p1(0.5, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(optimal_p1(0.8, LN_2).unwrap(), 0.875, epsilon = 1e-15);
        assert!(matches!(optimal_p1(0.1, 0.0), Err(Error::InfeasibleP1 { .. })));
        assert!(optimal_p1(0.0, 0.0).is_err());

        let h = FRAC_1_SQRT_2;
        for &(p, gt) in &[(0.6, 0.2), (0.9, 1.0), (0.55, 0.05)] {
            assert_abs_diff_eq!(
                optimal_p1_w(p, gt, h, h).unwrap(),
                optimal_p1(p, gt).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(
            optimal_p1_w(0.5, 0.0, 0.8f64.sqrt(), 0.2f64.sqrt()).unwrap(),
            0.75,
            epsilon = 1e-12
        );
        assert!(optimal_p1_w(0.5, 0.0, 0.2f64.sqrt(), 0.8f64.sqrt()).is_err());
        assert!(optimal_p1_w(0.5, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn feed_forward_involutions() {
        assert!(feed_forward_for(PreOutcome::M1).approx_eq(&QubitOperator::identity(), 0.0));
        assert!(feed_forward_for(PreOutcome::M2).approx_eq(&QubitOperator::pauli_x(), 0.0));
        for o in [PreOutcome::M1, PreOutcome::M2] {
            let f = feed_forward_for(o);
            assert!(f.then_after(&f).approx_eq(&QubitOperator::identity(), 0.0));
        }
    }

    #[test]
    fn density_oracle_limits() {
        let psi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let same = channel_density_oracle(&rho, &AmplitudeDamping::from_r(0.0).unwrap(), 0).unwrap();
        assert!(same.max_abs_diff(&rho) < 1e-15);

        let one = DensityMatrix::from_pure(&StateVector::basis(1, 1));
        let decayed = channel_density_oracle(&one, &AmplitudeDamping::from_r(1.0).unwrap(), 0).unwrap();
        assert!(decayed.max_abs_diff(&DensityMatrix::from_pure(&StateVector::basis(1, 0))) < 1e-15);
    }

    #[test]
    fn protect_examples() {
        let h = FRAC_1_SQRT_2;
        let rep = protect_unknown_qubit(cr(h), cr(h), 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(rep.probabilities["success_path_prob"], 0.5, epsilon = 1e-12);
        assert!(rep.target_fidelity >= 1.0 - 1e-12);

        let rep = protect_unknown_qubit(cr(h), cr(h), 0.8, LN_2).unwrap();
        assert_abs_diff_eq!(rep.probabilities["success_path_prob"], 0.1, epsilon = 1e-12);
        assert!(rep.metrics["fidelity_m1"] >= 1.0 - 1e-12);
        assert!(rep.metrics["fidelity_m2"] >= 1.0 - 1e-12);
        assert_abs_diff_eq!(rep.leaf_probability_sum(), 1.0, epsilon = 1e-12);
        assert_eq!(rep.branches.len(), 8);

        // |0⟩ is a fixed point everywhere except the M2 jump leaves, where the
        // reversed σx maps the decayed |0⟩ back to |1⟩.
        let zero = StateVector::basis(1, 0);
        let rep = protect_unknown_qubit(cr(1.0), cr(0.0), 0.7, 0.4).unwrap();
        for leaf in rep.branches.iter().filter(|l| !l.path_string().starts_with("M2/jump")) {
            if let Some(s) = &leaf.state {
                assert_abs_diff_eq!(fidelity(s, &zero).unwrap(), 1.0, epsilon = 1e-12);
            }
        }

        assert!(matches!(
            protect_unknown_qubit(cr(h), cr(h), 0.1, 0.0),
            Err(Error::InfeasibleP1 { .. })
        ));
    }
}
