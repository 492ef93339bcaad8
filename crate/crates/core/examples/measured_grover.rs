// Grover's search with the oracle output in its own qubit, measured at two
// successive iterations. Every pair has the same conditional entropy.

use temporal_bell::experiment::{analytic_pair_conditional_entropy, ceil_sqrt_pow2, exact_pair_sequence, Variant};
use temporal_bell::qsim::{run_unmeasured, GroverParams};

fn run() -> temporal_bell::Result<()> {
    let n = 6;
    let params = GroverParams::new(n)?;
    let l = ceil_sqrt_pow2(n);
    println!("n = {n}, theta = {:.6} rad, L = {l}", params.theta());

    for pair in exact_pair_sequence(n, l, Variant::Standard)? {
        let closed = analytic_pair_conditional_entropy(n, pair.k)?;
        println!(
            "k={:>2}  P(00)={:.4} P(01)={:.4} P(10)={:.4} P(11)={:.4}  H={:.9}  closed form {:.9}",
            pair.k,
            pair.joint.get(0, 0),
            pair.joint.get(0, 1),
            pair.joint.get(1, 0),
            pair.joint.get(1, 1),
            pair.conditional_entropy(),
            closed
        );
    }

    let unmeasured = run_unmeasured(n, l)?;
    println!("unmeasured success after {l} iterations: {:.6}", unmeasured.success_probability);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
