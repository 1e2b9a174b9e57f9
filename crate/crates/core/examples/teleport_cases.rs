//! Run every teleportation case at one point, then search pair assignments.

use qsim::protocols::{search_pairings, teleport_case, Pairing, TeleportCase};

fn main() {
    let (x, s) = (0.6, 0.3);
    println!("{:<5} {:>9} {:>9} {:>9}  verdict", "case", "P(match)", "max F", "min F");
    for case in TeleportCase::ALL {
        match teleport_case(case, x, s, Pairing::DEFAULT) {
            Ok(r) => println!(
                "{:<5} {:>9.6} {:>9.6} {:>9.6}  {} ({} -> {}, correction {})",
                case.as_str(),
                r.matching_prob,
                r.max_fidelity.unwrap_or(f64::NAN),
                r.min_fidelity.unwrap_or(f64::NAN),
                r.verdict.as_str(),
                r.classical_bits.map(|b| b.to_string()).join(""),
                r.target.as_str(),
                r.correction,
            ),
            Err(e) => println!("{:<5} UNDEFINED: {e}", case.as_str()),
        }
    }

    // On the diagonal x = s, IIIb does not reach its target on any pairing.
    let report = search_pairings(TeleportCase::IIIb, 0.5, 0.5).expect("defined");
    println!("\nIIIb at (0.5, 0.5): {}", report.verdict.as_str());
    for row in &report.rows {
        println!("  {:<12} max F {:.6}", row.pairing.label(), row.max_fidelity);
    }
}
