//! Concurrence, Schmidt coefficients and the three-tangle on familiar states.

use qsim::entanglement::{concurrence, residual_tangle, schmidt, three_tangle};
use qsim::qstate::StateVector;

fn main() -> qsim::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let k = 1.0 / 3f64.sqrt();
    let pairs = [
        ("phi+", StateVector::from_real(&[h, 0.0, 0.0, h])?),
        ("product", StateVector::from_real(&[0.6, 0.8, 0.0, 0.0])?),
        ("partial", StateVector::from_real(&[0.5, -0.5, 0.5, 0.5])?),
    ];
    for (name, s) in &pairs {
        println!("{name:<8} C = {:.6}  schmidt {:?}", concurrence(s)?, schmidt(s, &[0])?);
    }
    let triples = [
        ("GHZ", StateVector::from_real(&[h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h])?),
        ("W", StateVector::from_real(&[0.0, k, k, 0.0, k, 0.0, 0.0, 0.0])?),
    ];
    for (name, s) in &triples {
        println!("{name:<8} tau = {:.6}  residual = {:.6}", three_tangle(s)?, residual_tangle(s)?);
    }
    Ok(())
}
