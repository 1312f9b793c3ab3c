//! Leading constants of d ln n per model, with the published values.

use grouptest::theory::{
    compare_with_reference, comparison_csv, rssd_optimal_alpha, table1, table1_csv, utdq_optimal_q,
};

fn main() -> grouptest::Result<()> {
    let rows = table1(10)?;
    print!("{}", table1_csv(&rows));
    println!();
    print!("{}", comparison_csv(&compare_with_reference(&rows)));

    println!("\nlarge d:");
    for d in [20, 50, 100, 200] {
        let (alpha, f) = rssd_optimal_alpha(d);
        let (q, utdq) = utdq_optimal_q(d)?;
        let rssd = 1.0 / (d as f64 * std::f64::consts::LN_2 * f);
        println!(
            "d = {d:>3}: RsSD {rssd:.4} (alpha d = {:.3}), UTDq {utdq:.4} (q = {q}, q/d = {:.3})",
            alpha * d as f64,
            q as f64 / d as f64
        );
    }
    Ok(())
}
