//! Seeded Monte Carlo trials.
//!
//! Trial `t` draws its matrix from [`rng::substream`]`(master_seed, t)` and
//! tests the defective set `I = {1, ..., d}`. Counts are summed, so reports
//! do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::bitmat::{or_columns, BitMatrix, DefectiveSet, QaryMatrix};
use crate::decode::{decode_eliminate, good_row_count, is_disjunct};
use crate::designs::{optimal_param, sample_rssd, DesignParam, DesignSpec, Model};
use crate::error::{Error, Result};
use crate::rng;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Probes declare success when the Wilson lower bound clears `target - GUARD_BAND`.
pub const GUARD_BAND: f64 = 0.03;

/// Largest test count [`TrialRunner::find_min_m`] will probe.
pub const MAX_M: usize = 1_000_000;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub spec: DesignSpec,
    pub n: usize,
    pub d: usize,
    pub delta: Option<f64>,
    pub trials: u64,
    pub disjunct_successes: u64,
    pub decode_successes: u64,
    pub master_seed: u64,
    pub wilson_ci_low: f64,
    pub wilson_ci_high: f64,
}

impl TrialReport {
    pub fn frequency(&self) -> f64 {
        self.disjunct_successes as f64 / self.trials as f64
    }

    /// `3·√(p(1-p)/trials)` at the given success probability.
    pub fn three_sigma(&self, p: f64) -> f64 {
        3.0 * (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Serialize)]
struct ReportRow<'a> {
    model: &'a str,
    n: usize,
    m: usize,
    param: String,
    d: usize,
    delta: Option<f64>,
    trials: u64,
    disjunct_successes: u64,
    decode_successes: u64,
    frequency: f64,
    wilson_ci_low: f64,
    wilson_ci_high: f64,
    seed: u64,
}

impl<'a> From<&'a TrialReport> for ReportRow<'a> {
    fn from(r: &'a TrialReport) -> Self {
        ReportRow {
            model: r.spec.model().name(),
            n: r.n,
            m: r.spec.m,
            param: r.spec.param.to_string(),
            d: r.d,
            delta: r.delta,
            trials: r.trials,
            disjunct_successes: r.disjunct_successes,
            decode_successes: r.decode_successes,
            frequency: r.frequency(),
            wilson_ci_low: r.wilson_ci_low,
            wilson_ci_high: r.wilson_ci_high,
            seed: r.master_seed,
        }
    }
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    for row in rows {
        w.serialize(row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

/// CSV with a header and one row per report.
pub fn reports_csv(reports: &[TrialReport]) -> String {
    csv_string(reports.iter().map(ReportRow::from))
}

/// One probed test count during a search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub m: usize,
    pub param: DesignParam,
    pub successes: u64,
    pub trials: u64,
    pub wilson_ci_low: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub m_star: usize,
    pub probes: Vec<Probe>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m_star: usize,
    pub target: f64,
    pub trials_per_probe: u64,
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    m_star: usize,
    target: f64,
    trials_per_probe: u64,
    slope_over_d: Option<f64>,
}

/// Sweep CSV: `n,m_star,target,trials_per_probe,slope_over_d`. The slope
/// column repeats the fitted value, or is empty with fewer than 3 points.
pub fn sweep_csv(points: &[SweepPoint], d: usize) -> String {
    let slope = slope_fit(points, d).ok();
    csv_string(points.iter().map(|p| SweepRow {
        n: p.n,
        m_star: p.m_star,
        target: p.target,
        trials_per_probe: p.trials_per_probe,
        slope_over_d: slope,
    }))
}

/// Worker pool for trials.
pub struct TrialRunner {
    pool: rayon::ThreadPool,
}

impl TrialRunner {
    /// `jobs = 0` uses one thread per core.
    pub fn new(jobs: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot start {jobs} workers: {e}")))?;
        Ok(TrialRunner { pool })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `trials` independent trials of `spec` against `I = {1, ..., d}`.
    pub fn run_trials(
        &self,
        spec: &DesignSpec,
        d: usize,
        trials: u64,
        master_seed: u64,
    ) -> Result<TrialReport> {
        spec.validate()?;
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if d > spec.n {
            return Err(Error::Parameter(format!("d = {d} exceeds n = {}", spec.n)));
        }
        let defectives = DefectiveSet::first(d);
        let outcome = |t: u64| -> Result<(u64, u64)> {
            let mat = spec.generate(&mut rng::substream(master_seed, t))?;
            Ok(trial_outcome(&mat, &defectives))
        };
        let (disjunct, decoded) = self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(outcome)
                .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
        })?;
        let (lo, hi) = wilson_interval(disjunct, trials);
        Ok(TrialReport {
            spec: *spec,
            n: spec.n,
            d,
            delta: None,
            trials,
            disjunct_successes: disjunct,
            decode_successes: decoded,
            master_seed,
            wilson_ci_low: lo,
            wilson_ci_high: hi,
        })
    }

    /// Smallest `m` whose probe passes: exponential bracketing from `m = 1`,
    /// then bisection. Every probe reuses `master_seed`, so probes share
    /// random streams. For UTDq the search runs over `m' = m / q`.
    pub fn find_min_m(
        &self,
        model: Model,
        n: usize,
        d: usize,
        target: f64,
        trials: u64,
        master_seed: u64,
    ) -> Result<SearchResult> {
        if !(0.0..1.0).contains(&target) {
            return Err(Error::Parameter(format!(
                "target = {target} must lie in [0, 1)"
            )));
        }
        if d == 0 || d >= n {
            return Err(Error::Parameter(format!(
                "search needs 1 <= d < n, got n = {n}, d = {d}"
            )));
        }
        let step = match optimal_param(model, n, d, Some(1))? {
            DesignParam::Q(q) => q as usize,
            _ => 1,
        };
        let mut probes = Vec::new();
        let mut probe = |units: usize| -> Result<bool> {
            let m = units * step;
            let param = optimal_param(model, n, d, Some(m))?;
            let report = self.run_trials(&DesignSpec::new(n, m, param)?, d, trials, master_seed)?;
            let passed = report.wilson_ci_low >= target - GUARD_BAND;
            probes.push(Probe {
                m,
                param,
                successes: report.disjunct_successes,
                trials,
                wilson_ci_low: report.wilson_ci_low,
                passed,
            });
            Ok(passed)
        };

        let cap = MAX_M / step;
        let mut lo = 0;
        let mut hi = 1;
        while !probe(hi)? {
            lo = hi;
            if hi >= cap {
                return Err(Error::Infeasible(format!(
                    "no passing test count up to {MAX_M} for {model}, n = {n}, d = {d}, target = {target}"
                )));
            }
            hi = (2 * hi).min(cap);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(SearchResult {
            m_star: hi * step,
            probes,
        })
    }

    /// [`find_min_m`](Self::find_min_m) at each `n`, all under one seed.
    pub fn sweep(
        &self,
        model: Model,
        d: usize,
        ns: &[usize],
        target: f64,
        trials: u64,
        master_seed: u64,
    ) -> Result<Vec<SweepPoint>> {
        ns.iter()
            .map(|&n| {
                let found = self.find_min_m(model, n, d, target, trials, master_seed)?;
                Ok(SweepPoint {
                    n,
                    m_star: found.m_star,
                    target,
                    trials_per_probe: trials,
                })
            })
            .collect()
    }
}

/// `(disjunct, decoded exactly)` as 0/1 counts. The two always agree.
fn trial_outcome(mat: &BitMatrix, defectives: &DefectiveSet) -> (u64, u64) {
    let disjunct = is_disjunct(mat, defectives).expect("I lies inside the matrix");
    let answers = or_columns(mat, defectives).expect("I lies inside the matrix");
    let decoded =
        decode_eliminate(mat, &answers).expect("answer length matches") == defectives.indices();
    assert_eq!(
        disjunct, decoded,
        "elimination decoding disagrees with disjunctness"
    );
    (disjunct as u64, decoded as u64)
}

/// Least-squares slope of `m_star` against `ln n`, divided by `d`.
pub fn slope_fit(points: &[SweepPoint], d: usize) -> Result<f64> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::Parameter(format!(
            "slope fit needs at least 3 distinct n, got {}",
            ns.len()
        )));
    }
    if d == 0 {
        return Err(Error::Parameter("d must be at least 1".into()));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.m_star as f64).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx / d as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceProbe {
    pub mean: f64,
    pub variance: f64,
    /// `(1 - α)^d · m` with `α = s / m`.
    pub bound: f64,
    pub samples: u64,
}

/// Sample mean and variance of the good-row count of `I = {1, ..., d}` over
/// independent RsSD matrices. Sample `k` uses stream `k` under `seed`.
pub fn variance_probe(
    n: usize,
    m: usize,
    s: usize,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<VarianceProbe> {
    if samples < 2 {
        return Err(Error::Parameter("variance needs at least 2 samples".into()));
    }
    if m == 0 || s > m || d == 0 || d > n {
        return Err(Error::Parameter(format!(
            "need m >= 1, s <= m, 1 <= d <= n; got n = {n}, m = {m}, s = {s}, d = {d}"
        )));
    }
    let defectives = DefectiveSet::first(d);
    let xs: Vec<f64> = (0..samples)
        .map(|k| {
            let mat = sample_rssd(&mut rng::substream(seed, k), n, m, s);
            good_row_count(&mat, &defectives).map(|x| x as f64)
        })
        .collect::<Result<_>>()?;
    let k = samples as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let variance = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    let alpha = s as f64 / m as f64;
    Ok(VarianceProbe {
        mean,
        variance,
        bound: (1.0 - alpha).powi(d as i32) * m as f64,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransversalCheck {
    /// Frequency of non-disjunct expansions over fresh draws.
    pub empirical: f64,
    /// `1 - (1 - Π_i |S_i| / q)^{n-d}` from the realized symbol sets.
    pub exact: f64,
    pub trials: u64,
}

impl TransversalCheck {
    /// Binomial standard deviation of `empirical` around `exact`.
    pub fn sigma(&self) -> f64 {
        (self.exact * (1.0 - self.exact) / self.trials as f64).sqrt()
    }
}

/// Holds the first `d` columns of `fixed` and redraws columns `d+1..=n`
/// uniformly each trial, recording how often the expanded matrix fails to be
/// disjunct for `I = {1, ..., d}`.
pub fn transversal_prob_check(
    fixed: &QaryMatrix,
    n: usize,
    d: usize,
    trials: u64,
    seed: u64,
) -> Result<TransversalCheck> {
    if d == 0 || d > fixed.cols() || d > n {
        return Err(Error::Parameter(format!(
            "need 1 <= d <= min(n, columns); got d = {d}, n = {n}, columns = {}",
            fixed.cols()
        )));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let q = fixed.q();
    let rows = fixed.rows();
    let first: Vec<usize> = (0..d).collect();
    let hit: f64 = (0..rows)
        .map(|r| fixed.symbol_count(r, &first) as f64 / q as f64)
        .product();
    let exact = 1.0 - (1.0 - hit).powi((n - d) as i32);

    let defectives = DefectiveSet::first(d);
    let mut failures = 0u64;
    let mut rng = rng::seeded(seed);
    let mut entries = vec![0u32; rows * n];
    for _ in 0..trials {
        let fresh = crate::designs::sample_utdq(&mut rng, n - d, rows, q);
        for r in 0..rows {
            let row = &mut entries[r * n..(r + 1) * n];
            row[..d].copy_from_slice(&fixed.row(r)[..d]);
            row[d..].copy_from_slice(fresh.row(r));
        }
        let mat = QaryMatrix::new(rows, n, q, entries.clone())?.expand();
        if !is_disjunct(&mat, &defectives)? {
            failures += 1;
        }
    }
    Ok(TransversalCheck {
        empirical: failures as f64 / trials as f64,
        exact,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::upper_bound_m;

    fn points(f: impl Fn(f64) -> f64) -> Vec<SweepPoint> {
        [100, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| SweepPoint {
                n,
                m_star: f((n as f64).ln()).round() as usize,
                target: 0.9,
                trials_per_probe: 1,
            })
            .collect()
    }

    #[test]
    fn wilson_matches_hand_values() {
        // 8 of 10: centre (0.8 + 0.19208)/1.38415 = 0.71680
        let (lo, hi) = wilson_interval(8, 10);
        assert!(
            (lo - 0.4902).abs() < 1e-3 && (hi - 0.9433).abs() < 1e-3,
            "{lo} {hi}"
        );
        let (lo, hi) = wilson_interval(0, 50);
        assert!(lo < 1e-15);
        assert!(hi > 0.0 && hi < 0.08);
        assert_eq!(wilson_interval(50, 50).1, 1.0);
    }

    #[test]
    fn slope_of_exact_lines() {
        // m_star = 70k at n = 10^k, i.e. slope 70 / ln 10 in ln n
        let exact: Vec<SweepPoint> = [1u32, 2, 3, 4]
            .iter()
            .map(|&k| SweepPoint {
                n: 10usize.pow(k),
                m_star: 7 * k as usize * 10,
                target: 0.5,
                trials_per_probe: 1,
            })
            .collect();
        let slope = slope_fit(&exact, 1).unwrap();
        assert!((slope - 70.0 / 10f64.ln()).abs() < 1e-9);
        let shifted: Vec<SweepPoint> = exact
            .iter()
            .map(|p| SweepPoint {
                m_star: p.m_star + 40,
                ..p.clone()
            })
            .collect();
        assert!((slope_fit(&shifted, 1).unwrap() - slope).abs() < 1e-9);
        assert!((slope_fit(&exact, 2).unwrap() - slope / 2.0).abs() < 1e-9);
        let approx = slope_fit(&points(|x| 7.0 * x), 1).unwrap();
        assert!((approx - 7.0).abs() < 0.1);
    }

    #[test]
    fn slope_needs_three_distinct_n() {
        let mut p = points(|x| x);
        p.truncate(2);
        assert!(slope_fit(&p, 1).is_err());
        p.push(p[0].clone());
        assert!(slope_fit(&p, 1).is_err());
    }

    #[test]
    fn zero_tests_never_succeed() {
        let runner = TrialRunner::new(2).unwrap();
        let spec = DesignSpec::new(20, 0, DesignParam::P(0.5)).unwrap();
        let r = runner.run_trials(&spec, 2, 50, 1).unwrap();
        assert_eq!(r.disjunct_successes, 0);
        assert_eq!(r.decode_successes, 0);
    }

    #[test]
    fn rid_meets_its_sizing() {
        let sized = upper_bound_m(Model::Rid, 50, 1, 0.1).unwrap();
        let spec = DesignSpec::new(50, sized.m, sized.param).unwrap();
        let runner = TrialRunner::new(0).unwrap();
        let r = runner.run_trials(&spec, 1, 1000, 11).unwrap();
        assert!(
            r.frequency() >= 0.9 - r.three_sigma(0.9),
            "{}",
            r.frequency()
        );
    }

    #[test]
    fn thread_count_does_not_matter() {
        let spec = DesignSpec::new(200, 30, DesignParam::P(0.6)).unwrap();
        let a = TrialRunner::new(1)
            .unwrap()
            .run_trials(&spec, 2, 300, 5)
            .unwrap();
        let b = TrialRunner::new(4)
            .unwrap()
            .run_trials(&spec, 2, 300, 5)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(reports_csv(&[a]), reports_csv(&[b]));
    }

    #[test]
    fn zero_target_floor() {
        let runner = TrialRunner::new(1).unwrap();
        let r = runner.find_min_m(Model::Rid, 100, 2, 0.0, 20, 3).unwrap();
        assert_eq!(r.m_star, 1);
        assert_eq!(r.probes.len(), 1);
    }

    #[test]
    fn search_monotone_in_target() {
        let runner = TrialRunner::new(0).unwrap();
        let hi = runner
            .find_min_m(Model::Rid, 300, 2, 0.9, 100, 9)
            .unwrap()
            .m_star;
        let mid = runner
            .find_min_m(Model::Rid, 300, 2, 0.6, 100, 9)
            .unwrap()
            .m_star;
        let lo = runner
            .find_min_m(Model::Rid, 300, 2, 0.3, 100, 9)
            .unwrap()
            .m_star;
        assert!(lo <= mid && mid <= hi, "{lo} {mid} {hi}");
    }

    #[test]
    fn utdq_search_steps_by_q() {
        let runner = TrialRunner::new(0).unwrap();
        let r = runner.find_min_m(Model::Utdq, 200, 2, 0.8, 100, 2).unwrap();
        let DesignParam::Q(q) = r.probes[0].param else {
            unreachable!()
        };
        assert!(r.probes.iter().all(|p| p.m % q as usize == 0));
        assert_eq!(r.m_star % q as usize, 0);
    }

    #[test]
    fn variance_edge_cases() {
        let v = variance_probe(5, 10, 10, 2, 50, 1).unwrap();
        assert_eq!((v.mean, v.variance, v.bound), (0.0, 0.0, 0.0));
        let v = variance_probe(5, 10, 5, 1, 10_000, 2).unwrap();
        // a single column of weight 5 leaves exactly 5 good rows
        assert_eq!((v.mean, v.variance, v.bound), (5.0, 0.0, 5.0));
    }

    #[test]
    fn transversal_hand_example() {
        let fixed = QaryMatrix::from_rows(2, &[vec![1]]).unwrap();
        let c = transversal_prob_check(&fixed, 2, 1, 4000, 8).unwrap();
        assert!((c.exact - 0.5).abs() < 1e-15);
        assert!((c.empirical - 0.5).abs() <= 3.0 * c.sigma());
        // every symbol present in every row: the other columns are never separated
        let full = QaryMatrix::from_rows(2, &[vec![1, 2], vec![2, 1]]).unwrap();
        let c = transversal_prob_check(&full, 5, 2, 100, 1).unwrap();
        assert_eq!((c.exact, c.empirical), (1.0, 1.0));
    }

    #[test]
    fn report_csv_header() {
        let spec = DesignSpec::new(10, 4, DesignParam::S(1)).unwrap();
        let r = TrialRunner::new(1)
            .unwrap()
            .run_trials(&spec, 1, 10, 0)
            .unwrap();
        let csv = reports_csv(&[r]);
        assert!(csv.starts_with(
            "model,n,m,param,d,delta,trials,disjunct_successes,decode_successes,frequency,wilson_ci_low,wilson_ci_high,seed\nrssd,10,4,s=1,1,,10,"
        ));
    }
}
