// A deterministic classical search must collect n bits in its oracle answers,
// so the sum of successive conditional entropies never drops below n.

use temporal_bell::classical::{classical_full_joint_entropy, classical_per_step, classical_rhs_sum, classical_success_probability, QuerySchedule};

fn run() -> temporal_bell::Result<()> {
    println!("{:>3} {:>6} {:>10} {:>10} {:>8}", "n", "L", "sum", "H(A)", "success");
    for n in 1..=10 {
        let scan = QuerySchedule::sequential(n)?;
        let sum = classical_rhs_sum(&scan)?;
        let full = classical_full_joint_entropy(&scan);
        println!("{n:>3} {:>6} {sum:>10.5} {:>10.5} {:>8.3}", scan.len(), full.bits, classical_success_probability(&scan));
        assert!(sum >= n as f64);
    }

    // Schedules can also be written by hand; this one stops one query short.
    let short = QuerySchedule::parse("n=3\n# skip the last input\n0\n1\n2\n3\n4\n5\n6\n")?;
    let full = classical_full_joint_entropy(&short);
    println!("\nshort scan: covering={} H(A)={:.5} per-step={:?}", full.covering, full.bits, classical_per_step(&short)?.iter().map(|h| format!("{h:.4}")).collect::<Vec<_>>());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
