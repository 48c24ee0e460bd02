use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rtmetro::measures::fisher_generalized_quadrature;
use rtmetro::{integrate_real_line, EnergyBudget, MeasureOrder, ProbeDistribution, QuadratureSpec};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn densities_are_normalized() {
    let spec = QuadratureSpec::default().with_split_points([0.0]);
    for alpha in [0.6, 0.8, 1.0, 2.0, 5.0, 20.0] {
        for gamma in [0.5, 1.0, 3.0] {
            let d = ProbeDistribution::from_shape_scale(alpha, gamma).unwrap();
            let r = integrate_real_line(|x| d.pdf(x), &spec).unwrap();
            assert!(r.converged);
            assert!((r.value - 1.0).abs() < 1e-8, "alpha {alpha} gamma {gamma}: {}", r.value);
        }
    }
}

#[test]
fn energy_round_trip() {
    for alpha in [0.55, 0.75, 1.0, 2.0, 10.0] {
        for energy in [0.5, 1.0, 4.0] {
            let d = ProbeDistribution::from_shape_energy(alpha, EnergyBudget::new(energy).unwrap())
                .unwrap();
            let got = d.mean_energy_quadrature().unwrap().value;
            assert!(rel(got, energy) < 1e-6, "alpha {alpha} E {energy}: {got}");
            assert!(rel(d.mean_energy().unwrap(), energy) < 1e-12);
        }
    }
}

#[test]
fn energy_is_quarter_fisher_information() {
    let half = MeasureOrder::new(0.5).unwrap();
    for (alpha, gamma) in [(0.6, 1.0), (0.9, 2.0), (1.0, 0.7), (2.0, 1.0), (3.5, 0.4), (12.0, 5.0)] {
        let d = ProbeDistribution::from_shape_scale(alpha, gamma).unwrap();
        let energy = d.mean_energy_quadrature().unwrap().value;
        let fisher = fisher_generalized_quadrature(&d, half).unwrap().value;
        assert!(rel(energy, fisher / 4.0) < 1e-6, "alpha {alpha}: {energy} vs {}", fisher / 4.0);
    }
}

#[test]
fn gaussian_sample_moments() {
    let d = ProbeDistribution::from_shape_scale(2.0, 1.0).unwrap();
    let n = 1_000_000;
    let xs = d.sample(&mut ChaCha8Rng::seed_from_u64(2024), n);
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sigma2: f64 = 0.25;
    assert!(mean.abs() <= 3.0 * (sigma2 / nf).sqrt(), "mean {mean}");
    // Var of the sample variance for a normal: 2σ⁴/n
    assert!((var - sigma2).abs() <= 3.0 * sigma2 * (2.0 / nf).sqrt(), "var {var}");
}

#[test]
fn heavy_shape_sample_mean_is_zero() {
    let d = ProbeDistribution::from_shape_scale(0.7, 1.3).unwrap();
    let n = 1_000_000;
    let xs = d.sample(&mut ChaCha8Rng::seed_from_u64(77), n);
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    assert!(mean.abs() <= 3.0 * (var / nf).sqrt(), "mean {mean}");
}

#[test]
fn laplace_sample_passes_kolmogorov_smirnov() {
    let d = ProbeDistribution::from_shape_scale(1.0, 1.0).unwrap();
    let n = 100_000;
    let mut xs = d.sample(&mut ChaCha8Rng::seed_from_u64(11), n);
    xs.sort_by(f64::total_cmp);
    let cdf = |x: f64| 0.5 * (1.0 + x.signum() * (1.0 - (-2.0 * x.abs()).exp()));
    let nf = n as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max);
    // Asymptotic 1% critical value.
    let critical = 1.628 / nf.sqrt();
    assert!(ks < critical, "KS {ks} >= {critical}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn score_agrees_with_finite_differences(
        alpha in 0.3f64..8.0,
        gamma in 0.3f64..3.0,
        x in prop_oneof![-4.0f64..-0.05, 0.05f64..4.0],
    ) {
        let d = ProbeDistribution::from_shape_scale(alpha, gamma).unwrap();
        let h = 1e-6 * x.abs().max(1.0);
        let fd = (d.log_pdf(x + h) - d.log_pdf(x - h)) / (2.0 * h);
        let exact = d.score(x).unwrap();
        prop_assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "{fd} vs {exact}");
    }

    #[test]
    fn pdf_is_even(alpha in 0.2f64..50.0, gamma in 0.1f64..10.0, x in 0.0f64..20.0) {
        let d = ProbeDistribution::from_shape_scale(alpha, gamma).unwrap();
        prop_assert_eq!(d.pdf(x), d.pdf(-x));
        prop_assert_eq!(d.log_pdf(x) - d.log_pdf(-x), 0.0);
    }
}
