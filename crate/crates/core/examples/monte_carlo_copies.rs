// Estimate one pair distribution from independent copies of the measured run,
// each copy drawing from its own seeded random stream.

use temporal_bell::experiment::{analytic_pair_conditional_entropy, pair_distribution, ExperimentConfig, Method};

fn run() -> temporal_bell::Result<()> {
    let (n, k) = (4, 2);
    let exact = analytic_pair_conditional_entropy(n, k)?;
    println!("closed form H(A_3|A_2) = {exact:.6}");
    for samples in [1_000, 10_000, 100_000] {
        let config = ExperimentConfig::new(n, 4).with_mode(Method::MonteCarlo).with_samples(samples, 42);
        let pair = pair_distribution(&config, k)?;
        println!("M={samples:>7}: H = {:.6} +/- {:.6}", pair.conditional_entropy(), pair.stderr.unwrap_or(f64::NAN));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
