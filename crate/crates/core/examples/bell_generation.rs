//! Generate a Bell pair from a partially entangled input, in both
//! normalization modes.

use qsim::protocols::bell_generate;
use qsim::qstate::cr;
use qsim::NormalizationMode;

fn main() -> qsim::Result<()> {
    let (p, gamma_tau) = (0.6, 0.5);
    for mode in [NormalizationMode::Paper, NormalizationMode::Physical] {
        let report = bell_generate(cr(0.5), cr(-0.5), cr(0.5), cr(0.5), p, gamma_tau, mode)?;
        println!("[{mode}]");
        println!("  final      {}", report.final_state.as_ref().expect("no-jump branch"));
        println!("  jump       {}", report.states["jump"]);
        for (k, v) in &report.probabilities {
            println!("  P {k:<18} {v:.6}");
        }
        for key in ["bell_fidelity", "concurrence", "jump_concurrence"] {
            if let Some(v) = report.metrics.get(key) {
                println!("  {key:<20} {v:.6}");
            }
        }
        for d in &report.discrepancies {
            println!("  ! {}: expected {}, got {}", d.claim, d.expected, d.actual);
        }
    }
    Ok(())
}
