use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trunc_regress::diagnostics::{chi_directions, direction_kurtosis, estimate_constants};
use trunc_regress::gibbs::{default_lambda, draw, posterior, GibbsSpec};
use trunc_regress::solve_ols;
use trunc_regress::synth::{gen_inc, gen_inc_with_theta, NoiseModel};

#[test]
fn draws_follow_posterior_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (data, _) = gen_inc_with_theta(30, 1, 1.0, 0.5, &NoiseModel::Gaussian, &mut rng).unwrap();
    let spec = GibbsSpec::new(vec![(-1.0, 3.0)], 9, default_lambda(0.5, 1.0)).unwrap();
    let post = posterior(&data, &spec).unwrap();
    let w = post.weights();
    let grid = spec.grid();
    let m = 100_000;
    let mut counts = vec![0usize; grid.len()];
    for _ in 0..m {
        let t = draw(&post, &mut rng);
        counts[grid.iter().position(|g| *g == t).unwrap()] += 1;
    }
    for (c, p) in counts.iter().zip(&w) {
        let f = *c as f64 / m as f64;
        assert!(
            (f - p).abs() < 5.0 * (p * (1.0 - p) / m as f64).sqrt() + 1e-9,
            "{f} vs {p}"
        );
    }
}

#[test]
fn mode_is_near_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (data, _) = gen_inc_with_theta(200, 1, 1.0, 0.5, &NoiseModel::Gaussian, &mut rng).unwrap();
    let spec = GibbsSpec::cube(1, -5.0, 5.0, default_lambda(0.5, 1.0)).unwrap();
    let post = posterior(&data, &spec).unwrap();
    let all: Vec<usize> = (0..200).collect();
    let ols = solve_ols(&data, &all).unwrap();
    assert!((post.mode()[0] - ols[0]).abs() <= 3.0 * spec.step(0));
    assert!((post.mean()[0] - ols[0]).abs() <= 3.0 * spec.step(0));
}

#[test]
fn gaussian_design_kurtosis() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (data, truth) = gen_inc(100_000, 1, 10.0, &NoiseModel::Gaussian, &mut rng).unwrap();
    let chi = chi_directions(&data, 4, &mut rng)
        .iter()
        .map(|u| direction_kurtosis(&data, u))
        .fold(0.0, f64::max);
    assert!((chi / 3f64.sqrt() - 1.0).abs() < 0.05, "{chi}");
    let c = estimate_constants(&data, &truth.theta_star, 0.0, 1.0, 4, &mut rng).unwrap();
    assert!((c.kappa_prime / 3f64.sqrt() - 1.0).abs() < 0.05);
    assert!((c.sigma - 10.0).abs() < 0.2);
    assert!((c.eff_dim - 1.0).abs() < 1e-12);
    // For d = 1, φᵀQ⁻¹φ = x²/E x², whose normalized second moment is also √3.
    assert!((c.kappa / 3f64.sqrt() - 1.0).abs() < 0.05);
}
