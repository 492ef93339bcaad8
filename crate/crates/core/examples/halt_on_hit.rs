// Stopping the run once the first measurement finds the marked item lowers
// every conditional entropy after the first.

use temporal_bell::experiment::{analytic_pair_conditional_entropy_variant, ceil_sqrt_pow2, quantum_rhs_sum, ExperimentConfig, Variant};

fn run() -> temporal_bell::Result<()> {
    let n = 5;
    let l = ceil_sqrt_pow2(n);
    for k in 0..l {
        let standard = analytic_pair_conditional_entropy_variant(n, k, Variant::Standard)?;
        let halted = analytic_pair_conditional_entropy_variant(n, k, Variant::HaltOnHit)?;
        println!("k={k}: standard {standard:.6} halt-on-hit {halted:.6}");
    }
    let base = ExperimentConfig::new(n, l);
    println!(
        "sums at L={l}: standard {:.6}, halt-on-hit {:.6}",
        quantum_rhs_sum(&base)?,
        quantum_rhs_sum(&base.with_variant(Variant::HaltOnHit))?
    );
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
