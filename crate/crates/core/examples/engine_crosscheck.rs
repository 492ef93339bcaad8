// The 4-amplitude subspace engine and the dense state-vector engine produce
// the same measurement statistics on every measured-pair script.

use temporal_bell::experiment::ceil_sqrt_pow2;
use temporal_bell::qsim::{engine_pair_check_marked, measured_pair_script, run_unmeasured, run_unmeasured_on, FullStateVector};

fn run() -> temporal_bell::Result<()> {
    for n in 3..=8 {
        let marked = (1u64 << n) - 3;
        let worst = (0..=ceil_sqrt_pow2(n))
            .map(|k| engine_pair_check_marked(n, marked, &measured_pair_script(k)))
            .try_fold(0.0f64, |acc, tv| tv.map(|tv| acc.max(tv)))?;
        let l = ceil_sqrt_pow2(n);
        let dense = run_unmeasured_on(FullStateVector::initial(n, marked)?, l)?.success_probability;
        let subspace = run_unmeasured(n, l)?.success_probability;
        println!("n={n}: max TV over scripts {worst:.2e}, success dense {dense:.12} subspace {subspace:.12}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
