//! Empirical minimal test counts over growing n and the fitted slope of
//! m* against ln n, per defective.
//!
//! `cargo run --release --example sweep -- rid 2`

use std::str::FromStr;

use grouptest::designs::Model;
use grouptest::sim::{sweep_csv, TrialRunner};

fn main() -> grouptest::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model = args
        .first()
        .map(|s| Model::from_str(s))
        .transpose()?
        .unwrap_or(Model::Rid);
    let d: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);

    let runner = TrialRunner::new(0)?;
    let ns = [1_000, 10_000, 100_000];
    let mut points = Vec::new();
    for n in ns {
        let found = runner.find_min_m(model, n, d, 0.9, 200, 6)?;
        let history: Vec<String> = found
            .probes
            .iter()
            .map(|p| format!("{}{}", p.m, if p.passed { "+" } else { "-" }))
            .collect();
        eprintln!(
            "n = {n}: m* = {} after probes {}",
            found.m_star,
            history.join(" ")
        );
        points.push(grouptest::sim::SweepPoint {
            n,
            m_star: found.m_star,
            target: 0.9,
            trials_per_probe: 200,
        });
    }
    print!("{}", sweep_csv(&points, d));
    Ok(())
}
