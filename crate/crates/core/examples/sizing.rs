//! Upper and lower test counts for each model.
//!
//! `cargo run --example sizing -- 100000 4 0.05`

use grouptest::designs::{lower_bound_m, upper_bound_m, upper_bound_m_with, Model, SizingOptions};

fn main() -> grouptest::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let delta: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);

    println!("n = {n}, d = {d}, delta = {delta}");
    println!(
        "{:<6} {:>8} {:>14} {:>8}  notes",
        "model", "upper", "param", "lower"
    );
    for model in Model::ALL {
        let up = upper_bound_m(model, n, d, delta)?;
        let lo = lower_bound_m(model, n, d)?;
        let mut notes = Vec::new();
        if let Some(r) = &up.reason {
            notes.push(format!("upper infeasible: {r}"));
        }
        if let Some(r) = &lo.reason {
            notes.push(format!("lower infeasible: {r}"));
        }
        println!(
            "{:<6} {:>8} {:>14} {:>8}  {}",
            model.name(),
            up.m,
            up.param.to_string(),
            lo.m,
            notes.join("; ")
        );
    }

    let exact = upper_bound_m_with(
        Model::Utdq,
        n,
        d,
        delta,
        &SizingOptions {
            q: None,
            exact_utdq: true,
        },
    )?;
    println!(
        "\nUTDq with the exact transversal bound: m = {} ({}), lambda = {:.3}, feasible = {}",
        exact.m,
        exact.param,
        exact.lambda.unwrap_or(f64::NAN),
        exact.feasible
    );
    Ok(())
}
