//! Clone one half of a Bell pair, send it through the protected channel, and
//! rotate into a W-type state. The three-tangle stays zero along the way.

use qsim::protocols::w_generate;
use qsim::NormalizationMode;

fn main() -> qsim::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for flip in [false, true] {
        let report = w_generate(std::f64::consts::PI / 6.0, h, 0.7, 0.3, NormalizationMode::Paper, flip)?;
        println!("sigma_x on first qubit: {flip}");
        println!("  final state        {}", report.final_state.as_ref().expect("final state"));
        println!("  W1 fidelity        {:.12}", report.metrics["fidelity_w1"]);
        println!("  W2 fidelity        {:.12}", report.metrics["fidelity_w2"]);
        println!("  tangle (interm.)   {:.3e}", report.metrics["three_tangle_intermediate"]);
        println!("  tangle (final)     {:.3e}", report.metrics["three_tangle_final"]);
        println!("  success (joint)    {:.6}", report.probabilities["success_joint"]);
    }

    // A non-maximal Hadamard needs a different recovery strength.
    let report = w_generate(0.4, 0.6, 0.7, 0.3, NormalizationMode::Physical, false)?;
    println!("u = 0.6, physical: fidelity {:.6}", report.target_fidelity);
    Ok(())
}
