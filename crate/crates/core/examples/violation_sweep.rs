// Sweep n at L = ceil(sqrt(2^n)): the quantum sum falls below n while the
// classical scan stays above it.

use temporal_bell::experiment::{paper_bound, sweep, SweepOptions};

fn run() -> temporal_bell::Result<()> {
    println!("{:>3} {:>5} {:>10} {:>10} {:>10} {:>10}", "n", "L", "quantum", "bound", "classical", "margin");
    for r in sweep(3..=14, &SweepOptions::default())? {
        let classical = r.classical_baseline.map_or("-".to_string(), |c| format!("{c:.4}"));
        println!("{:>3} {:>5} {:>10.4} {:>10.4} {:>10} {:>10.4}", r.n, r.iterations, r.rhs_sum, paper_bound(r.n)?, classical, r.margin);
        assert!(r.violated);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
