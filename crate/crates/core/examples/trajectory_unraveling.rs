//! Split a two-qubit state into jump and no-jump branches and check that the
//! weighted mixture equals the damping channel applied to the density matrix.

use qsim::channels::{channel_density_oracle, damping_branch, AmplitudeDamping};
use qsim::qstate::{DensityMatrix, StateVector};

fn main() -> qsim::Result<()> {
    let psi = StateVector::from_real(&[0.5, 0.5, -0.5, 0.5])?;
    for r in [0.0, 0.3, 1.0] {
        let branches = damping_branch(&psi, 1, r)?;
        let mix = DensityMatrix::mixture(
            2,
            branches.iter().filter_map(|b| b.state.as_ref().map(|s| (b.joint_prob, s))),
        );
        let exact = channel_density_oracle(&DensityMatrix::from_pure(&psi), &AmplitudeDamping::from_r(r)?, 1)?;
        println!("r = {r}");
        for b in &branches {
            println!("  {:<8} P = {:.4}", b.path_string(), b.joint_prob);
        }
        println!("  max |mixture - channel| = {:.2e}", mix.max_abs_diff(&exact));
    }
    Ok(())
}
