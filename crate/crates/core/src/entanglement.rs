//! Concurrence, 3-tangle and Schmidt coefficients.
//!
//! The 3-tangle is the closed-form hyperdeterminant polynomial; the residual
//! tangle `C²_{A(BC)} − C²_{AB} − C²_{AC}` built on the mixed-state
//! concurrence is an independent route to the same number.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{bit_of, c, partial_trace, Complex, DensityMatrix, StateVector};

/// Eigenvalues of `√ρ ρ̃ √ρ` below this are treated as zero.
const EIGEN_CLAMP: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: Option<f64>,
    pub three_tangle: Option<f64>,
    /// Descending Schmidt coefficients across the first-qubit cut.
    pub schmidt_coeffs: Vec<f64>,
}

impl EntanglementReport {
    pub fn of(state: &StateVector) -> Result<Self> {
        let n = state.qubit_count();
        Ok(Self {
            concurrence: if n == 2 { Some(concurrence(state)?) } else { None },
            three_tangle: if n == 3 { Some(three_tangle(state)?) } else { None },
            schmidt_coeffs: if n >= 2 { schmidt(state, &[0])? } else { vec![1.0] },
        })
    }
}

fn require_qubits(state: &StateVector, expected: usize) -> Result<()> {
    if state.qubit_count() != expected {
        return Err(Error::WrongQubitCount {
            expected,
            got: state.qubit_count(),
        });
    }
    Ok(())
}

/// Pure two-qubit concurrence `2|a₀₀a₁₁ − a₀₁a₁₀|`.
pub fn concurrence(state: &StateVector) -> Result<f64> {
    require_qubits(state, 2)?;
    let a = state.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

/// Cayley's hyperdeterminant of the 2×2×2 amplitude tensor.
pub fn hyperdeterminant(state: &StateVector) -> Result<Complex> {
    require_qubits(state, 3)?;
    let a = state.amplitudes();
    let (a000, a001, a010, a011) = (a[0], a[1], a[2], a[3]);
    let (a100, a101, a110, a111) = (a[4], a[5], a[6], a[7]);
    let squares = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let pairs = a000 * a001 * a110 * a111
        + a000 * a010 * a101 * a111
        + a000 * a100 * a011 * a111
        + a001 * a010 * a101 * a110
        + a001 * a100 * a011 * a110
        + a010 * a100 * a011 * a101;
    let quads = a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111;
    Ok(squares - pairs * 2.0 + quads * 4.0)
}

/// `τ = 4|Hdet|`.
pub fn three_tangle(state: &StateVector) -> Result<f64> {
    Ok(4.0 * hyperdeterminant(state)?.norm())
}

/// Singular values of the `part | rest` reshaping, descending.
pub fn schmidt(state: &StateVector, part: &[usize]) -> Result<Vec<f64>> {
    let n = state.qubit_count();
    let mut part: Vec<usize> = part.to_vec();
    part.sort_unstable();
    part.dedup();
    if part.is_empty() || part.len() >= n {
        return Err(Error::InvalidSubset(format!(
            "{part:?} is not a nonempty proper subset of {n} qubits"
        )));
    }
    for &q in &part {
        state.check_qubit(q)?;
    }
    let rest: Vec<usize> = (0..n).filter(|q| !part.contains(q)).collect();
    let sub = |i: usize, qs: &[usize]| qs.iter().fold(0usize, |acc, &q| (acc << 1) | bit_of(i, q, n));
    let mut m = DMatrix::<Complex>::zeros(1 << part.len(), 1 << rest.len());
    for (i, amp) in state.amplitudes().iter().enumerate() {
        m[(sub(i, &part), sub(i, &rest))] = *amp;
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Hermitian square root via eigendecomposition, negative eigenvalues
/// clamped to zero.
fn hermitian_sqrt(m: &DMatrix<Complex>) -> DMatrix<Complex> {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let roots = eig.eigenvalues.map(|e| c(e.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn mixed_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.qubit_count() != 2 {
        return Err(Error::WrongQubitCount {
            expected: 2,
            got: rho.qubit_count(),
        });
    }
    let yy = {
        let z = c(0.0, 0.0);
        DMatrix::from_row_slice(
            4,
            4,
            &[
                z, z, z, c(-1.0, 0.0),
                z, z, c(1.0, 0.0), z,
                z, c(1.0, 0.0), z, z,
                c(-1.0, 0.0), z, z, z,
            ],
        )
    };
    let m = rho.matrix();
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let root = hermitian_sqrt(m);
    let r = &root * tilde * &root;
    let herm = (&r + r.adjoint()) * c(0.5, 0.0);
    let mut lambdas: Vec<f64> = herm
        .symmetric_eigenvalues()
        .iter()
        .map(|&e| if e < EIGEN_CLAMP { 0.0 } else { e.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// CKW residual tangle `C²_{A(BC)} − C²_{AB} − C²_{AC}` of a pure 3-qubit
/// state, with `C²_{A(BC)} = 4 det ρ_A`.
pub fn residual_tangle(state: &StateVector) -> Result<f64> {
    require_qubits(state, 3)?;
    let rho_a = partial_trace(state, &[0])?;
    let det_a = (rho_a.entry(0, 0) * rho_a.entry(1, 1) - rho_a.entry(0, 1) * rho_a.entry(1, 0)).re;
    let c_ab = mixed_concurrence(&partial_trace(state, &[0, 1])?)?;
    let c_ac = mixed_concurrence(&partial_trace(state, &[0, 2])?)?;
    Ok(4.0 * det_a - c_ab * c_ab - c_ac * c_ac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{BellLabel, StateVector};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ghz() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, 0., 0., 0., 0., 0., 0., FRAC_1_SQRT_2]).unwrap()
    }

    fn w() -> StateVector {
        let t = 1.0 / 3f64.sqrt();
        StateVector::from_real(&[0., t, t, 0., t, 0., 0., 0.]).unwrap()
    }

    /// `|⟨ψ|σy⊗σy|ψ*⟩|` written out with explicit Pauli matrices.
    fn wootters_pure(state: &StateVector) -> f64 {
        let y = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let a = state.amplitudes();
        let mut acc = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let op = y[i >> 1][j >> 1] * y[i & 1][j & 1];
                acc += a[i].conj() * op * a[j].conj();
            }
        }
        acc.norm()
    }

    #[test]
    fn concurrence_examples() {
        let bell = BellLabel::PhiPlus.state();
        assert_abs_diff_eq!(wootters_pure(&bell), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence(&bell).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(concurrence(&StateVector::basis(2, 1)).unwrap(), 0.0);
        let prod = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]).unwrap();
        assert_eq!(concurrence(&prod).unwrap(), 0.0);
        assert!(matches!(concurrence(&ghz()), Err(Error::WrongQubitCount { .. })));

        let s = StateVector::new(vec![c(0.1, 0.3), c(-0.5, 0.2), c(0.4, 0.0), c(0.2, -0.633)]).unwrap();
        let (s, _) = crate::qstate::normalize(&s).unwrap();
        assert_abs_diff_eq!(concurrence(&s).unwrap(), wootters_pure(&s), epsilon = 1e-14);
        assert_abs_diff_eq!(
            mixed_concurrence(&DensityMatrix::from_pure(&s)).unwrap(),
            concurrence(&s).unwrap(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn three_tangle_examples() {
        assert_abs_diff_eq!(three_tangle(&ghz()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(residual_tangle(&ghz()).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(three_tangle(&w()).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(residual_tangle(&w()).unwrap(), 0.0, epsilon = 1e-10);
        assert!(three_tangle(&BellLabel::PhiPlus.state()).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let sv = schmidt(&StateVector::basis(2, 2), &[0]).unwrap();
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sv[1], 0.0, epsilon = 1e-15);

        let sv = schmidt(&BellLabel::PsiMinus.state(), &[1]).unwrap();
        assert_abs_diff_eq!(sv[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sv[1], FRAC_1_SQRT_2, epsilon = 1e-15);

        // (|000⟩ + cos a|110⟩ + sin a|101⟩)/√2 across A | BC.
        let a = 0.7f64;
        let h = FRAC_1_SQRT_2;
        let cloned = StateVector::from_real(&[h, 0., 0., 0., 0., h * a.sin(), h * a.cos(), 0.]).unwrap();
        let sv = schmidt(&cloned, &[0]).unwrap();
        assert_abs_diff_eq!(sv[0], h, epsilon = 1e-14);
        assert_abs_diff_eq!(sv[1], h, epsilon = 1e-14);

        assert!(schmidt(&cloned, &[]).is_err());
        assert!(schmidt(&cloned, &[0, 1, 2]).is_err());
    }

    #[test]
    fn report_fields_follow_register_size() {
        let r = EntanglementReport::of(&BellLabel::PhiPlus.state()).unwrap();
        assert!(r.concurrence.is_some() && r.three_tangle.is_none());
        let r = EntanglementReport::of(&ghz()).unwrap();
        assert!(r.concurrence.is_none() && r.three_tangle.is_some());
    }
}
