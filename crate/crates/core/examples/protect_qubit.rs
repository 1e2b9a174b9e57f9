//! Protect an unknown qubit sent through amplitude damping, then compare the
//! heralded success rate against the unprotected channel.
//!
//! cargo run --example protect_qubit -- 0.8 0.5

use qsim::channels::{optimal_p1, protect_unknown_qubit};
use qsim::qstate::c;

fn main() -> qsim::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let p = args.next().unwrap_or(0.8);
    let gamma_tau = args.next().unwrap_or(0.5);

    let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
    let report = protect_unknown_qubit(alpha, beta, p, gamma_tau)?;

    println!("p = {p}, gamma_tau = {gamma_tau}, p1 = {:.6}", optimal_p1(p, gamma_tau)?);
    for leaf in &report.branches {
        let f = leaf.state.as_ref().map(|s| format!("{s}")).unwrap_or_else(|| "-".into());
        println!("{:<28} P = {:.6}  {f}", leaf.path_string(), leaf.joint_prob);
    }
    println!("success probability   {:.6}", report.probabilities["success_path_prob"]);
    println!("(1 - p) e^-gamma_tau  {:.6}", (1.0 - p) * (-gamma_tau).exp());
    println!("target fidelity       {:.15}", report.target_fidelity);
    Ok(())
}
