//! Drive the command surface from code: a small parameter sweep in CSV, then
//! the built-in acceptance checks.

use qsim::cli::run_args;

fn main() {
    let sweep = run_args([
        "qsim", "sweep", "--protocol", "protect", "--grid", "p=0.5:0.9:0.2,gamma_tau=0.1:0.5:0.2", "--format", "csv",
    ]);
    print!("{}", sweep.stdout);

    let verify = run_args(["qsim", "verify", "--seed", "7"]);
    eprint!("{}", verify.stderr);
    std::process::exit(verify.code);
}
