use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::{
    optimal_p1_w, protection_tree, AmplitudeDamping, P1Choice, PostOrientation,
    PostWeakMeasurement, WeakMeasurement,
};
use crate::entanglement::{three_tangle, EntanglementReport};
use crate::error::{Error, Result};
use crate::qstate::{
    apply_op, cr, fidelity, normalize, tensor, BellLabel, QubitOperator, StateVector, TOL_EIGEN,
    TOL_EXACT,
};
use crate::report::{Discrepancy, NormalizationMode, ProtocolReport};

use super::{paper_mode_state, SplitTerm};

const ALICE: usize = 0;
const BOB: usize = 1;
const CHARLIE: usize = 2;

/// Economical cloning: `|00⟩ → |00⟩`, `|10⟩ → cos a|10⟩ + sin a|01⟩` on
/// `(src, fresh)`, completed on the `|01⟩, |11⟩` sector to a rotation.
pub fn economical_clone(state: &StateVector, src: usize, fresh: usize, angle: f64) -> Result<StateVector> {
    if state.population(fresh, 1)? >= TOL_EXACT {
        return Err(Error::FreshNotBlank(fresh));
    }
    let (s, c) = angle.sin_cos();
    let z = 0.0;
    #[rustfmt::skip]
    let rows = [
        1.0, z, z, z,
        z,   c, s, z,
        z,  -s, c, z,
        z,   z, z, 1.0,
    ];
    let u = QubitOperator::from_rows(4, &rows.map(cr))?;
    apply_op(state, &u, &[src, fresh])
}

#[derive(Clone, Debug)]
pub struct WParams {
    /// Cloning-machine angle.
    pub angle: f64,
    /// Non-maximal Hadamard parameter; `v = √(1 − u²)`.
    pub u: f64,
    pub p: f64,
    pub channel: AmplitudeDamping,
    pub p1: P1Choice,
    pub mode: NormalizationMode,
    /// Apply `σx ⊗ I ⊗ I` at the end.
    pub sigma_x: bool,
}

pub fn w_generate(
    angle: f64,
    u: f64,
    p: f64,
    gamma_tau: f64,
    mode: NormalizationMode,
    apply_ap_sigma_x: bool,
) -> Result<ProtocolReport> {
    w_generate_with(&WParams {
        angle,
        u,
        p,
        channel: AmplitudeDamping::from_gamma_tau(gamma_tau)?,
        p1: P1Choice::Auto,
        mode,
        sigma_x: apply_ap_sigma_x,
    })
}

/// `(|000⟩ + cos a|110⟩ + sin a|101⟩)/√2`, optionally with σx on the first qubit.
fn w1_target(angle: f64, sigma_x: bool) -> StateVector {
    let (s, c) = angle.sin_cos();
    let h = FRAC_1_SQRT_2;
    let mut amps = [0.0; 8];
    let flip = if sigma_x { 0b100 } else { 0 };
    amps[flip] = h;
    amps[0b110 ^ flip] = h * c;
    amps[0b101 ^ flip] = h * s;
    StateVector::from_real(&amps).expect("valid target")
}

/// Post-Hadamard state for general `(u, v)` with the optimal post-weak strength.
fn general_target(angle: f64, u: f64, v: f64, sigma_x: bool) -> Result<StateVector> {
    let (s, c) = angle.sin_cos();
    let h = FRAC_1_SQRT_2;
    let q = (u.powi(4) + v.powi(4)).sqrt();
    let flip = if sigma_x { 0b100 } else { 0 };
    let mut amps = [0.0; 8];
    amps[flip] = h;
    amps[0b110 ^ flip] = h * c;
    amps[0b100 ^ flip] = (v * v - u * u) * s / (2.0 * q);
    amps[0b101 ^ flip] = s / (2.0 * q);
    let n = 0.5 + c * c / 2.0 + ((v * v - u * u).powi(2) + 1.0) * s * s / (4.0 * q * q);
    let raw = StateVector::from_real(&amps)?;
    Ok(raw.scaled(cr(1.0 / n.sqrt())))
}

pub fn w_generate_with(params: &WParams) -> Result<ProtocolReport> {
    let u = params.u;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            name: "u",
            value: u,
            domain: "(0, 1)",
        });
    }
    let v = (1.0 - u * u).sqrt();
    let channel = params.channel;
    let p = params.p;
    let weak = WeakMeasurement::new(p)?;
    let p1 = params.p1.resolve(|| optimal_p1_w(p, channel.gamma_tau(), u, v))?;
    let post = PostWeakMeasurement::new(p1, PostOrientation::SuppressZero)?;
    let (sin_a, cos_a) = params.angle.sin_cos();

    let bell = tensor(&BellLabel::PhiPlus.state(), &StateVector::basis(1, 0));
    let cloned = economical_clone(&bell, BOB, CHARLIE, params.angle)?;
    let nmh = QubitOperator::non_maximal_hadamard(u, v);
    let rotated = apply_op(&cloned, &nmh, &[CHARLIE])?;

    let leaves = protection_tree(&rotated, CHARLIE, p, &channel, p1)?;
    let joint = |prefix: &str| {
        leaves
            .iter()
            .filter(|l| l.path_string().starts_with(prefix))
            .map(|l| l.joint_prob)
            .sum::<f64>()
    };

    // (|00⟩ + cos a|11⟩) ⊗ (u, v)  +  sin a|10⟩ ⊗ (v, −u), overall 1/√2.
    let terms = [
        SplitTerm {
            rest: StateVector::from_real(&[1.0, 0.0, 0.0, cos_a])?,
            qubit: [cr(u), cr(v)],
        },
        SplitTerm {
            rest: StateVector::from_real(&[0.0, 0.0, sin_a, 0.0])?,
            qubit: [cr(v), cr(-u)],
        },
    ];
    let filter = post.pass_op().then_after(&channel.k1()).then_after(&weak.m1());
    let (mid_paper, drift) = paper_mode_state(&terms, &filter)?;
    let mid_physical = leaves
        .iter()
        .find(|l| l.path_string() == "M1/no-jump/post-pass")
        .and_then(|l| l.state.clone());

    let finish = |s: &StateVector| -> Result<StateVector> {
        let mut out = apply_op(s, &QubitOperator::hadamard(), &[CHARLIE])?;
        if params.sigma_x {
            out = apply_op(&out, &QubitOperator::pauli_x(), &[ALICE])?;
        }
        Ok(normalize(&out)?.0)
    };
    let final_paper = finish(&mid_paper)?;
    let final_physical = mid_physical.as_ref().map(finish).transpose()?;

    let mut report = ProtocolReport::new("wstate", params.mode);
    report.param("angle", params.angle);
    report.param("u", u);
    report.param("v", v);
    report.param("p", p);
    report.param("r", channel.r());
    report.param("gamma_tau", channel.gamma_tau());
    report.param("p1", p1);
    report.param("sigma_x", if params.sigma_x { 1.0 } else { 0.0 });

    report.prob("m1_outcome", joint("M1"));
    report.prob("m1_no_jump_joint", joint("M1/no-jump"));
    report.prob("success_joint", joint("M1/no-jump/post-pass"));

    let (mid, fin) = match params.mode {
        NormalizationMode::Paper => (Some(mid_paper.clone()), Some(final_paper.clone())),
        NormalizationMode::Physical => (mid_physical.clone(), final_physical.clone()),
    };

    let target = general_target(params.angle, u, v, params.sigma_x)?;
    let w1 = w1_target(params.angle, false);
    let w2 = w1_target(params.angle, true);
    report.metric("three_tangle_intermediate_paper", three_tangle(&mid_paper)?);
    if let Some(m) = &mid_physical {
        report.metric("three_tangle_intermediate_physical", three_tangle(m)?);
    }
    if let Some(m) = &mid {
        report.metric("three_tangle_intermediate", three_tangle(m)?);
        for (name, idx) in [
            ("u1", 0b000),
            ("u2", 0b001),
            ("u3", 0b110),
            ("u4", 0b111),
            ("u5", 0b100),
            ("u6", 0b101),
        ] {
            report.metric(name, m.amp(idx).re);
        }
    }
    if let Some(f) = &fin {
        let t = fidelity(f, &target)?;
        report.target_fidelity = t;
        report.metric("target_fidelity", t);
        report.metric("fidelity_w1", fidelity(f, &w1)?);
        report.metric("fidelity_w2", fidelity(f, &w2)?);
        report.metric("three_tangle_final", three_tangle(f)?);
        report.entanglement = EntanglementReport::of(f)?;
    }
    report.metric("target_fidelity_paper", fidelity(&final_paper, &target)?);
    if let Some(f) = &final_physical {
        report.metric("target_fidelity_physical", fidelity(f, &target)?);
    }

    report.states.insert("cloned".into(), cloned);
    report.states.insert("rotated".into(), rotated);
    report.states.insert("intermediate_paper".into(), mid_paper.clone());
    report.states.insert("final_paper".into(), final_paper.clone());
    if let Some(m) = &mid_physical {
        report.states.insert("intermediate_physical".into(), m.clone());
    }
    if let Some(f) = &final_physical {
        report.states.insert("final_physical".into(), f.clone());
    }
    report.final_state = fin;

    if drift {
        report
            .flags
            .push("paper-mode branch weights did not sum to 1 and were renormalized".into());
    }
    if params.p1 == P1Choice::Auto {
        let tangle = three_tangle(&mid_paper)?;
        if tangle >= TOL_EIGEN {
            report.discrepancies.push(Discrepancy::new(
                "3-tangle of the no-jump three-qubit state is zero",
                "0",
                format!("{tangle:.3e}"),
                "paper-mode intermediate",
            ));
        }
        let f = fidelity(&final_paper, &target)?;
        if f < 1.0 - TOL_EIGEN {
            report.discrepancies.push(Discrepancy::new(
                "optimal p1 yields the stated W-type state",
                "fidelity 1",
                format!("{f:.12}"),
                "paper-mode final state",
            ));
        }
    }

    report.branches = leaves;
    Ok(report)
}
