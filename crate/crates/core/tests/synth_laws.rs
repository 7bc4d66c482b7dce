use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use trunc_regress::synth::{
    gen_hcc, gen_inc, gen_ts, sample_noise, ts_features, ts_regression, ts_theta_star, NoiseModel,
};
use trunc_regress::{solve_ols, ParamVector};

/// Sample mean, variance and the standard error of the variance.
fn moments(model: &NoiseModel, m: usize, seed: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..m).map(|_| sample_noise(model, &mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / m as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / m as f64;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m as f64;
    (mean, var, ((m4 - var * var) / m as f64).sqrt())
}

#[test]
fn gaussian_and_mixture_are_standardized() {
    for (model, seed) in [
        (NoiseModel::Gaussian, 1),
        (NoiseModel::mixture(0.005, 0.1).unwrap(), 2),
        (NoiseModel::mixture(0.005, 0.4).unwrap(), 3),
    ] {
        let (mean, var, se) = moments(&model, 400_000, seed);
        assert!(
            mean.abs() < 4.0 / 400_000f64.sqrt(),
            "{model:?}: mean {mean}"
        );
        assert!((var - 1.0).abs() < 4.0 * se, "{model:?}: var {var} ± {se}");
    }
}

#[test]
fn mixture_atom_has_weight_p() {
    let model = NoiseModel::mixture(0.02, 0.1).unwrap();
    let atom = (0.9f64 / 0.02).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = 200_000;
    let hits = (0..m)
        .filter(|_| sample_noise(&model, &mut rng) == atom)
        .count() as f64
        / m as f64;
    assert!((hits - 0.02).abs() < 4.0 * (0.02 * 0.98 / m as f64).sqrt());
}

#[test]
fn heavy_tail_law() {
    let q = 2.01;
    let model = NoiseModel::heavy_tailed(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 200_000;
    let xs: Vec<f64> = (0..m).map(|_| sample_noise(&model, &mut rng)).collect();
    let phi = Normal::new(0.0, 1.0).unwrap();
    for t in [0.5f64, 1.0, 2.0, 5.0] {
        let want = 2.0 * phi.cdf(t.powf(-q)) - 1.0;
        let got = xs.iter().filter(|x| x.abs() > t).count() as f64 / m as f64;
        let se = (want * (1.0 - want) / m as f64).sqrt();
        assert!((got - want).abs() < 4.0 * se, "t={t}: {got} vs {want}");
    }
    // Symmetric law.
    let pos = xs.iter().filter(|&&x| x > 0.0).count() as f64 / m as f64;
    assert!((pos - 0.5).abs() < 4.0 * (0.25 / m as f64).sqrt());
}

#[test]
fn inc_ols_recovers_theta() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (data, truth) = gen_inc(20_000, 4, 1.0, &NoiseModel::Gaussian, &mut rng).unwrap();
    let all: Vec<usize> = (0..data.len()).collect();
    let t = solve_ols(&data, &all).unwrap();
    assert!(t.distance(&truth.theta_star) < 0.05);
    assert_eq!(truth.theta_star.as_slice(), &[10.0; 4]);
    assert!(truth.excess_risk(&t).unwrap() < 1e-3);
}

#[test]
fn hcc_covariance_matches_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 200_000;
    let d = 3;
    let (data, truth) = gen_hcc(n, d, 10.0, &NoiseModel::Gaussian, &mut rng).unwrap();
    for j in 0..d {
        for k in 0..d {
            let emp = data.rows().map(|x| x[j] * x[k]).sum::<f64>() / n as f64;
            let q = truth.gram.entry(j, k);
            let se = ((truth.gram.entry(j, j) * truth.gram.entry(k, k) + q * q) / n as f64).sqrt();
            assert!((emp - q).abs() < 5.0 * se, "({j},{k}) {emp} vs {q}");
        }
    }
}

#[test]
fn ts_features_are_orthogonal() {
    // Midpoint rule on a fine grid is exact for these trigonometric products.
    let d = 6;
    let m = 4096;
    for j in 0..d {
        for k in 0..d {
            let s: f64 = (0..m)
                .map(|i| {
                    let f = ts_features((i as f64 + 0.5) / m as f64, d);
                    f[j] * f[k]
                })
                .sum::<f64>()
                / m as f64;
            let want = if j == k { 0.5 } else { 0.0 };
            assert!((s - want).abs() < 1e-12, "({j},{k}) {s}");
        }
    }
}

#[test]
fn ts_theta_star_is_projection() {
    // θ*_k = E[φ_k(X) g(X)] / E[φ_k²] with g the regression function.
    let d = 4;
    let m = 200_000;
    let star = ts_theta_star(d);
    for k in 0..d {
        let proj: f64 = (0..m)
            .map(|i| {
                let x = (i as f64 + 0.5) / m as f64;
                ts_features(x, d)[k] * ts_regression(x)
            })
            .sum::<f64>()
            / m as f64
            / 0.5;
        assert!(
            (proj - star[k]).abs() < 1e-6,
            "k={k}: {proj} vs {}",
            star[k]
        );
    }
}

#[test]
fn ts_excess_risk_matches_monte_carlo() {
    let d = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (_, truth) = gen_ts(10, d, 10.0, &NoiseModel::Gaussian, &mut rng).unwrap();
    let theta = ParamVector::new(vec![1.0, -2.0]).unwrap();
    let exact = truth.excess_risk(&theta).unwrap();
    // Noise-free risk difference, estimated on fresh uniform inputs.
    let m = 400_000;
    let mut acc = 0.0;
    for _ in 0..m {
        let x: f64 = rng.random();
        let phi = ts_features(x, d);
        let g = ts_regression(x);
        let a = theta.predict(&phi) - g;
        let b = truth.theta_star.predict(&phi) - g;
        acc += a * a - b * b;
    }
    let mc = acc / m as f64;
    assert!((mc - exact).abs() < 0.02 * exact, "{mc} vs {exact}");
}

#[test]
fn ts_rejects_odd_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    assert!(gen_ts(10, 3, 10.0, &NoiseModel::Gaussian, &mut rng).is_err());
}
