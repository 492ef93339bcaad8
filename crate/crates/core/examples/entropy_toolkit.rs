// Entropies of small distributions, and the chain bound that caps the joint
// entropy of a sequence by the sum of its successive conditional entropies.

use temporal_bell::entropy::{binary_entropy, chain_bound_check, conditional_entropy, joint_entropy, shannon_entropy, FullJoint, PairJoint, ProbDist};

fn run() -> temporal_bell::Result<()> {
    let fair_die = ProbDist::new(vec![1.0 / 6.0; 6])?;
    println!("H(fair die)        = {:.6} bits", shannon_entropy(&fair_die));
    println!("H(1/8)             = {:.6} bits", binary_entropy(0.125)?);

    // X is a fair bit, Y copies X but flips with probability 0.1.
    let noisy_copy = PairJoint::binary([[0.45, 0.05], [0.05, 0.45]])?;
    println!("H(X,Y)             = {:.6}", joint_entropy(&noisy_copy));
    println!("H(Y|X)             = {:.6}", conditional_entropy(&noisy_copy));

    // Three bits where each one is a noisy copy of the previous.
    let mut table = vec![0.0; 8];
    for (index, p) in table.iter_mut().enumerate() {
        let bits = [index & 1, (index >> 1) & 1, (index >> 2) & 1];
        *p = 0.5 * [bits[0] ^ bits[1], bits[1] ^ bits[2]].iter().map(|&flip| if flip == 1 { 0.1 } else { 0.9 }).product::<f64>();
    }
    let chain = chain_bound_check(&FullJoint::new(3, table)?)?;
    println!("H(A0,A1,A2) = {:.6} <= {:.6} = H(A0) + H(A1|A0) + H(A2|A1)", chain.lhs, chain.rhs);
    assert!(chain.holds);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
