use rtmetro::estimation::summarize;
use rtmetro::measures::mean_error_closed;
use rtmetro::{
    run_trials, unbiasedness_report, EnergyBudget, MeasureOrder, ProbeDistribution, TrialPlan,
};

fn plan(alpha: f64, gamma: f64, eps: f64, q: f64, trials: usize, seed: u64) -> TrialPlan {
    let d = ProbeDistribution::from_shape_scale(alpha, gamma).unwrap();
    TrialPlan::new(d, eps, MeasureOrder::new(q).unwrap(), trials, seed, 200).unwrap()
}

#[test]
fn gaussian_run_matches_prediction() {
    let d = ProbeDistribution::from_shape_energy(2.0, EnergyBudget::new(1.0).unwrap()).unwrap();
    let p = TrialPlan::new(d, 0.3, MeasureOrder::new(0.5).unwrap(), 1_000_000, 42, 200).unwrap();
    let r = run_trials(&p).unwrap();
    assert!((r.predicted_mean_error - 0.5).abs() < 1e-12);
    assert!(r.unbiased(), "{r:?}");
    assert!(r.ci_contains(0.5), "{r:?}");
}

#[test]
fn laplace_first_absolute_moment() {
    let r = run_trials(&plan(1.0, 1.0, 0.0, 1.0, 1_000_000, 8)).unwrap();
    assert!(r.ci_contains(0.5), "{r:?}");
    assert!(r.max_abs_deviation > r.empirical_generalized_error);
}

#[test]
fn unbiased_examples() {
    assert!(unbiasedness_report(&plan(2.0, 1.0, 1.5, 0.5, 1_000_000, 1)).unwrap().pass);
    assert!(unbiasedness_report(&plan(0.8, 1.0, -0.2, 0.5, 1_000_000, 2)).unwrap().pass);
}

#[test]
fn three_sigma_rule_pass_rate() {
    let passes = (0..200u64)
        .filter(|&seed| unbiasedness_report(&plan(2.0, 1.0, 0.4, 0.5, 10, seed)).unwrap().pass)
        .count();
    assert!(passes as f64 / 200.0 >= 0.97, "{passes}/200");
}

#[test]
fn report_independent_of_worker_count() {
    let p = plan(1.5, 0.8, -0.3, 0.25, 300_000, 99);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_trials(&p)).unwrap();
    let b = four.install(|| run_trials(&p)).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn error_estimate_converges_with_trials() {
    let p0 = plan(1.5, 1.0, 0.0, 0.25, 1, 0);
    let truth = mean_error_closed(&p0.distribution, p0.order).unwrap().value;
    let median_gap = |trials: usize| {
        let mut gaps: Vec<f64> = (0..20u64)
            .map(|seed| {
                let s = summarize(&TrialPlan { trials, master_seed: 1000 + seed, ..p0 }).unwrap();
                (s.empirical_generalized_error - truth).abs()
            })
            .collect();
        gaps.sort_by(f64::total_cmp);
        0.5 * (gaps[9] + gaps[10])
    };
    let g4 = median_gap(10_000);
    let g5 = median_gap(100_000);
    let g6 = median_gap(1_000_000);
    assert!(g4 > g5 && g5 > g6, "{g4} {g5} {g6}");
}
