//! Pure multi-qubit states, small operators and the reduced density matrices
//! used as cross-check oracles.
//!
//! Basis convention: qubit 0 is the leftmost ket symbol and the most
//! significant bit, so index `i = Σ_k b_k · 2^(n-1-k)`.

use std::fmt;

use nalgebra::DMatrix;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Tolerance for exact-algebra identities.
pub const TOL_EXACT: f64 = 1e-12;
/// Tolerance for quantities that pass through eigen or root computations.
pub const TOL_EIGEN: f64 = 1e-9;
/// Squared norm below which a branch is treated as impossible.
pub const ZERO_NORM_SQR: f64 = 1e-24;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

#[inline]
pub(crate) fn bit_of(index: usize, qubit: usize, qubits: usize) -> usize {
    (index >> (qubits - 1 - qubit)) & 1
}

#[inline]
pub(crate) fn mask_of(qubit: usize, qubits: usize) -> usize {
    1 << (qubits - 1 - qubit)
}

fn check_finite(values: &[Complex], what: &'static str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Amplitude vector over `n` qubits.
///
/// A zero-qubit register (a single amplitude) is allowed; it is what is left
/// after measuring every qubit of a register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex>,
    normalized: bool,
}

impl StateVector {
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        check_finite(&amps, "state amplitudes")?;
        let qubits = len.trailing_zeros() as usize;
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        Ok(Self {
            qubits,
            amps,
            normalized: (norm_sqr - 1.0).abs() <= TOL_EXACT,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| cr(x)).collect())
    }

    /// Computational basis state `|index⟩` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex::default(); 1 << qubits];
        amps[index] = cr(1.0);
        Self {
            qubits,
            amps,
            normalized: true,
        }
    }

    /// Single qubit `a|0⟩ + b|1⟩`.
    pub fn qubit(a: Complex, b: Complex) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex {
        self.amps[index]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch(self.qubits, other.qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: Complex) -> StateVector {
        let amps: Vec<Complex> = self.amps.iter().map(|a| a * factor).collect();
        Self::retag(self.qubits, amps)
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch(self.qubits, other.qubits));
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self::retag(self.qubits, amps))
    }

    /// Probability mass on states where `qubit` reads `value`.
    pub fn population(&self, qubit: usize, value: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| bit_of(*i, qubit, self.qubits) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn ket_string(&self, index: usize) -> String {
        (0..self.qubits)
            .map(|k| if bit_of(index, k, self.qubits) == 1 { '1' } else { '0' })
            .collect()
    }

    fn retag(qubits: usize, amps: Vec<Complex>) -> StateVector {
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        StateVector {
            qubits,
            amps,
            normalized: (norm_sqr - 1.0).abs() <= TOL_EXACT,
        }
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            Err(Error::QubitOutOfRange {
                index: qubit,
                qubits: self.qubits,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() < 1e-20 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im.abs() < 1e-15 {
                write!(f, "{:.6}|{}⟩", a.re, self.ket_string(i))?;
            } else {
                write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, self.ket_string(i))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Serialized as a list of `[re, im]` pairs.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.amps.len()))?;
        for a in &self.amps {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// `a ⊗ b`; `a` occupies the leading (most significant) qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    StateVector {
        qubits: a.qubits + b.qubits,
        amps,
        normalized: a.normalized && b.normalized,
    }
}

/// Dense operator on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    matrix: DMatrix<Complex>,
}

impl QubitOperator {
    pub fn from_rows(dim: usize, entries: &[Complex]) -> Result<Self> {
        if !(dim == 2 || dim == 4) || entries.len() != dim * dim {
            return Err(Error::BadLength(entries.len()));
        }
        check_finite(entries, "operator entries")?;
        Ok(Self {
            matrix: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    fn from_2x2(m: [[Complex; 2]; 2]) -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]),
        }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::from_2x2([[cr(a), cr(0.0)], [cr(0.0), cr(b)]])
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn pauli_x() -> Self {
        Self::from_2x2([[cr(0.0), cr(1.0)], [cr(1.0), cr(0.0)]])
    }

    pub fn pauli_y() -> Self {
        Self::from_2x2([[cr(0.0), c(0.0, -1.0)], [c(0.0, 1.0), cr(0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::diag(1.0, -1.0)
    }

    /// `-iσy = [[0,-1],[1,0]]`.
    pub fn minus_i_pauli_y() -> Self {
        Self::from_2x2([[cr(0.0), cr(-1.0)], [cr(1.0), cr(0.0)]])
    }

    pub fn hadamard() -> Self {
        Self::non_maximal_hadamard(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    }

    /// `|0⟩ → u|0⟩ + v|1⟩`, `|1⟩ → v|0⟩ − u|1⟩`.
    pub fn non_maximal_hadamard(u: f64, v: f64) -> Self {
        Self::from_2x2([[cr(u), cr(v)], [cr(v), cr(-u)]])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · rhs`.
    pub fn then_after(&self, rhs: &QubitOperator) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let product = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<Complex>::identity(self.dim(), self.dim());
        (product - id).iter().all(|z| z.norm() <= tol)
    }

    pub fn approx_eq(&self, other: &QubitOperator, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .matrix
                .iter()
                .zip(other.matrix.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Apply `op` to `targets` (first target is the operator's most significant
/// local bit). The result is tagged normalized only if it actually is.
pub fn apply_op(state: &StateVector, op: &QubitOperator, targets: &[usize]) -> Result<StateVector> {
    let arity = op.dim().trailing_zeros() as usize;
    if targets.len() != arity {
        return Err(Error::TargetArity {
            dim: op.dim(),
            targets: targets.len(),
        });
    }
    for (k, &t) in targets.iter().enumerate() {
        state.check_qubit(t)?;
        if targets[..k].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    let n = state.qubits;
    let masks: Vec<usize> = targets.iter().map(|&t| mask_of(t, n)).collect();
    let all_targets: usize = masks.iter().sum();
    let local_index = |local: usize| -> usize {
        masks
            .iter()
            .enumerate()
            .filter(|(k, _)| (local >> (arity - 1 - k)) & 1 == 1)
            .map(|(_, m)| m)
            .sum()
    };
    let offsets: Vec<usize> = (0..op.dim()).map(local_index).collect();

    let mut out = vec![Complex::default(); state.dim()];
    for base in (0..state.dim()).filter(|i| i & all_targets == 0) {
        for (row, &row_off) in offsets.iter().enumerate() {
            let mut acc = Complex::default();
            for (col, &col_off) in offsets.iter().enumerate() {
                acc += op.matrix[(row, col)] * state.amps[base | col_off];
            }
            out[base | row_off] = acc;
        }
    }
    Ok(StateVector::retag(n, out))
}

/// Rescale to unit norm, returning the prior squared norm.
pub fn normalize(state: &StateVector) -> Result<(StateVector, f64)> {
    let norm_sqr = state.norm_sqr();
    if norm_sqr < ZERO_NORM_SQR {
        return Err(Error::ZeroNorm(norm_sqr));
    }
    let scale = 1.0 / norm_sqr.sqrt();
    let amps = state.amps.iter().map(|a| a * scale).collect();
    Ok((
        StateVector {
            qubits: state.qubits,
            amps,
            normalized: true,
        },
        norm_sqr,
    ))
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    for s in [a, b] {
        let n = s.norm_sqr();
        if (n - 1.0).abs() > TOL_EIGEN {
            return Err(Error::NotNormalized(n));
        }
    }
    let overlap = a.inner(b)?.norm_sqr();
    Ok(overlap.clamp(0.0, 1.0))
}

/// Bell basis: `φ± = (|00⟩ ± |11⟩)/√2`, `ψ± = (|01⟩ ± |10⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellLabel {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Amplitudes over the local basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellLabel::PhiPlus => [h, 0.0, 0.0, h],
            BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
            BellLabel::PsiPlus => [0.0, h, h, 0.0],
            BellLabel::PsiMinus => [0.0, h, -h, 0.0],
        }
    }

    pub fn state(self) -> StateVector {
        StateVector::from_real(&self.amplitudes()).expect("Bell vector is well formed")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Human-readable statement of the Bell phase convention; carried in reports.
pub const BELL_CONVENTION: &str = "phi± = (|00⟩ ± |11⟩)/√2, psi± = (|01⟩ ± |10⟩)/√2";

/// Project `pair` onto one Bell vector. Returns the outcome probability and
/// the normalized state of the remaining qubits (in ascending order), or
/// `None` when the outcome cannot occur.
pub fn project_bell(
    state: &StateVector,
    pair: (usize, usize),
    outcome: BellLabel,
) -> Result<(f64, Option<StateVector>)> {
    let (a, b) = pair;
    state.check_qubit(a)?;
    state.check_qubit(b)?;
    if a == b {
        return Err(Error::DuplicateTarget(a));
    }
    let n = state.qubits;
    let rest: Vec<usize> = (0..n).filter(|&q| q != a && q != b).collect();
    let bell = outcome.amplitudes();
    let mut residual = vec![Complex::default(); 1 << rest.len()];
    for (i, amp) in state.amps.iter().enumerate() {
        let local = bit_of(i, a, n) * 2 + bit_of(i, b, n);
        let coeff = bell[local];
        if coeff == 0.0 {
            continue;
        }
        let r = rest
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit_of(i, q, n));
        residual[r] += amp * coeff;
    }
    let residual = StateVector::retag(rest.len(), residual);
    let prob = residual.norm_sqr();
    if prob < ZERO_NORM_SQR {
        return Ok((0.0, None));
    }
    let (residual, _) = normalize(&residual)?;
    Ok((prob, Some(residual)))
}

/// Density matrix over `n` qubits, same basis convention as [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: DMatrix<Complex>,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(&state.amps);
        Self {
            qubits: state.qubits,
            matrix: &v * v.adjoint(),
        }
    }

    /// Wrap a raw matrix after checking shape and finiteness. Physical
    /// validity is checked separately by [`DensityMatrix::is_valid`].
    pub fn from_matrix(matrix: DMatrix<Complex>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::BadLength(dim));
        }
        check_finite(matrix.as_slice(), "density matrix")?;
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture<'a>(qubits: usize, terms: impl IntoIterator<Item = (f64, &'a StateVector)>) -> Self {
        let dim = 1 << qubits;
        let mut matrix = DMatrix::<Complex>::zeros(dim, dim);
        for (w, psi) in terms {
            matrix += DensityMatrix::from_pure(psi).matrix * cr(w);
        }
        Self { qubits, matrix }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> Complex {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * cr(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian within 1e-12, unit trace within 1e-12, eigenvalues ≥ −1e-10.
    pub fn is_valid(&self) -> bool {
        let herm = (&self.matrix - self.matrix.adjoint())
            .iter()
            .all(|z| z.norm() <= TOL_EXACT);
        let tr = self.trace();
        herm && (tr.re - 1.0).abs() <= TOL_EXACT
            && tr.im.abs() <= TOL_EXACT
            && self.eigenvalues().iter().all(|&e| e >= -1e-10)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Reduced density matrix over `keep` (output ordering follows ascending
/// qubit index).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidSubset("keep set is empty".into()));
    }
    let n = state.qubits;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    for w in kept.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidSubset(format!("qubit {} listed twice", w[0])));
        }
    }
    for &q in &kept {
        state.check_qubit(q)?;
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let sub = |i: usize, qs: &[usize]| qs.iter().fold(0usize, |acc, &q| (acc << 1) | bit_of(i, q, n));

    let dim = 1 << kept.len();
    let env = 1 << traced.len();
    // Reshape to a (kept × traced) matrix, then ρ = M M†.
    let mut reshaped = DMatrix::<Complex>::zeros(dim, env);
    for (i, amp) in state.amps.iter().enumerate() {
        reshaped[(sub(i, &kept), sub(i, &traced))] = *amp;
    }
    let matrix = &reshaped * reshaped.adjoint();
    Ok(DensityMatrix {
        qubits: kept.len(),
        matrix,
    })
}
