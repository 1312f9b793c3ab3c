//! Two checks behind the sizing proofs: the exact non-disjunct probability
//! of a transversal design with fixed defective columns, and the variance
//! of the RsSD good-row count.

use grouptest::designs::gen_utdq;
use grouptest::sim::{transversal_prob_check, variance_probe};

fn main() -> grouptest::Result<()> {
    println!("transversal designs, m' = 3, q = 3, d = 2, n = 10");
    for seed in 0..5 {
        let fixed = gen_utdq(2, 3, 3, seed)?;
        let c = transversal_prob_check(&fixed, 10, 2, 10_000, 100 + seed)?;
        println!(
            "  fixed columns {:?}: exact {:.4}, empirical {:.4} ({:+.2} sigma)",
            (0..3).map(|r| fixed.row(r).to_vec()).collect::<Vec<_>>(),
            c.exact,
            c.empirical,
            if c.sigma() > 0.0 {
                (c.empirical - c.exact) / c.sigma()
            } else {
                0.0
            },
        );
    }

    println!("\nRsSD good-row count X");
    for (m, s, d) in [(20, 5, 2), (40, 10, 3), (60, 6, 4)] {
        let v = variance_probe(20, m, s, d, 10_000, 7)?;
        println!(
            "  m = {m}, s = {s}, d = {d}: E[X] ~ {:.3}, Var[X] ~ {:.3}, bound (1 - s/m)^d m = {:.3}",
            v.mean, v.variance, v.bound
        );
    }
    Ok(())
}
