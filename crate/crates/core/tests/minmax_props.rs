use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use trunc_regress::synth::{gen_inc, NoiseModel};
use trunc_regress::{criterion_d, fit, iterate, Dataset, MinMaxConfig, ParamVector};

fn heavy_instance(seed: u64, n: usize, d: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_inc(
        n,
        d,
        10.0,
        &NoiseModel::heavy_tailed(2.01).unwrap(),
        &mut rng,
    )
    .unwrap()
    .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn criterion_is_antisymmetric(seed in any::<u64>(), alpha in 1e-3f64..10.0, lambda in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..30).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..10).map(|_| rng.sample(StandardNormal)).collect();
        let data = Dataset::new(x, y, 3).unwrap();
        let t = ParamVector::new((0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let u = ParamVector::new((0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
        let a = criterion_d(&t, &u, &data, alpha, lambda);
        let b = criterion_d(&u, &t, &data, alpha, lambda);
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert_eq!(criterion_d(&t, &t, &data, alpha, lambda), 0.0);
    }

    #[test]
    fn iterations_terminate_and_nest(seed in any::<u64>(), n in 5usize..80, d in 1usize..4, log_alpha in -8.0f64..0.0) {
        let data = heavy_instance(seed, n, d);
        let alpha = 10f64.powf(log_alpha);
        let res = iterate(&data, alpha, &MinMaxConfig::default()).unwrap();
        prop_assert!(res.trace.len() <= n + 1);
        prop_assert_eq!(res.trace[0].active_set.len(), n);
        for w in res.trace.windows(2) {
            prop_assert!(w[1].active_set.len() < w[0].active_set.len());
            prop_assert!(w[1].active_set.iter().all(|i| w[0].active_set.contains(i)));
        }
        prop_assert_eq!(&res.theta_hat, &res.trace.last().unwrap().theta);
        prop_assert_eq!(res.stopped_at_first_iteration, res.trace.len() == 1);
        // Every accepted iterate beat all earlier ones under the criterion.
        for k in 1..res.trace.len() {
            for j in 0..k {
                prop_assert!(criterion_d(&res.trace[k].theta, &res.trace[j].theta, &data, alpha, 0.0) < 0.0);
            }
        }
    }

    #[test]
    fn fit_is_permutation_invariant(seed in any::<u64>()) {
        let data = heavy_instance(seed, 60, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut perm: Vec<usize> = (0..60).collect();
        for i in (1..60).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let cfg = MinMaxConfig::default();
        let a = fit(&data, &cfg).unwrap();
        let b = fit(&data.permuted(&perm).unwrap(), &cfg).unwrap();
        prop_assert!(a.theta_hat.distance(&b.theta_hat) <= 1e-8 * (1.0 + a.theta_hat.norm()));
        prop_assert_eq!(a.active_set.len(), b.active_set.len());
        prop_assert!((a.alpha_used - b.alpha_used).abs() <= 1e-12 * a.alpha_used);
    }
}

#[test]
fn zero_noise_returns_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (data, truth) = gen_inc(50, 3, 10.0, &NoiseModel::Zero, &mut rng).unwrap();
    let res = fit(&data, &MinMaxConfig::default()).unwrap();
    assert!(res.stopped_at_first_iteration);
    assert!(res.theta_hat.distance(&truth.theta_star) < 1e-9);
    assert_eq!(res.n_removed(50), 0);
}

#[test]
fn gaussian_noise_mostly_returns_least_squares() {
    let cfg = MinMaxConfig::default();
    let mut differs = 0;
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (data, _) = gen_inc(1000, 10, 10.0, &NoiseModel::Gaussian, &mut rng).unwrap();
        let res = fit(&data, &cfg).unwrap();
        if !cfg.same_params(&res.theta_hat, &res.trace[0].theta) {
            differs += 1;
        }
    }
    assert!(differs <= 2, "{differs} of 40 differ");
}
