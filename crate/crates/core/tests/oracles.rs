//! Closed forms checked against quadrature, bisection and Monte-Carlo.

#[path = "support/quadrature.rs"]
mod quadrature;

use hetlab::bmm::{
    beta_abs_distance, bmm_marginal_pdf, optimal_threshold, BetaMixtureParams,
};
use hetlab::gaussian::{
    gaussian_between, gaussian_pool, gaussian_renyi, gaussian_within,
    model_average_pooled_numeric, Covariance, GaussianComponent, GaussianEnsemble, GridSpec,
};
use hetlab::special::{beta_pdf, gen_reg_inc_beta, reg_inc_beta, BetaShape};
use hetlab::Order;
use quadrature::{
    adaptive, beta_abs_distance_by_quadrature, beta_kernel, gaussian_renyi_by_quadrature,
    tanh_sinh_unit,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution as _, Normal};

fn order(q: f64) -> Order {
    Order::new(q).unwrap()
}

fn shape(a: f64, b: f64) -> BetaShape {
    BetaShape::new(a, b).unwrap()
}

#[test]
fn gaussian_closed_form_matches_quadrature() {
    let cases: [&[f64]; 3] = [&[1.0], &[0.3], &[2.0, 0.6, 0.5]];
    for cov in cases {
        let c = if cov.len() == 1 {
            Covariance::diagonal(vec![cov[0]]).unwrap()
        } else {
            Covariance::full(vec![vec![cov[0], cov[1]], vec![cov[1], cov[2]]]).unwrap()
        };
        for q in [0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
            let closed = gaussian_renyi(&c, order(q)).unwrap();
            let numeric = gaussian_renyi_by_quadrature(cov, q);
            assert!(
                (closed - numeric).abs() <= 1e-6 * closed,
                "cov {cov:?} q {q}: {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn uniform_density_heterogeneity_is_its_width() {
    for width in [0.25, 1.0, 3.5] {
        for q in [0.5, 2.0] {
            let integral = adaptive(|_| (1.0 / width as f64).powf(q), 0.0, width, 1e-14);
            let value = integral.powf(1.0 / (1.0 - q));
            assert!((value - width).abs() < 1e-6 * width);
        }
    }
}

#[test]
fn beta_pdf_is_normalized() {
    for (a, b) in [(0.5, 0.5), (1.0, 3.0), (2.0, 2.0), (5.0, 20.0), (20.0, 0.5)] {
        let k = beta_kernel(a, b);
        let z = tanh_sinh_unit(k, 1e-14);
        for x in [0.01, 0.2, 0.5, 0.9] {
            let pdf = beta_pdf(x, shape(a, b)).unwrap();
            assert!((pdf * z - k(x, 1.0 - x)).abs() < 1e-10 * k(x, 1.0 - x), "({a}, {b})");
        }
    }
}

#[test]
fn incomplete_beta_matches_integral_of_density() {
    for (a, b) in [(0.5, 0.5), (2.0, 3.0), (5.0, 20.0), (20.0, 5.0)] {
        let k = beta_kernel(a, b);
        let z = tanh_sinh_unit(k, 1e-14);
        for x in [0.05, 0.3, 0.5, 0.8, 0.97] {
            let part = tanh_sinh_unit(|s, sc| x * k(x * s, sc * x + (1.0 - x)), 1e-14) / z;
            let got = reg_inc_beta(x, shape(a, b)).unwrap();
            assert!((got - part).abs() < 1e-10, "({a}, {b}) at {x}: {got} vs {part}");
        }
        let gen = gen_reg_inc_beta(0.3, 0.8, shape(a, b)).unwrap();
        let diff = reg_inc_beta(0.8, shape(a, b)).unwrap() - reg_inc_beta(0.3, shape(a, b)).unwrap();
        assert!((gen - diff).abs() < 1e-12);
    }
}

#[test]
fn bmm_marginal_integrates_to_one() {
    // shapes bounded at both endpoints, so nodes rounding to 1 carry no mass
    for (t1, t2, t3) in [(0.5, 5.0, 20.0), (0.1, 1.5, 2.0), (0.9, 1.0, 1.0)] {
        let theta = BetaMixtureParams::new(t1, t2, t3).unwrap();
        let pdf = |x: f64| if x < 1.0 { bmm_marginal_pdf(x, &theta).unwrap() } else { 0.0 };
        let total = tanh_sinh_unit(|x, _| pdf(x), 1e-13);
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn threshold_matches_posterior_bisection() {
    for (t1, t2, t3) in [(0.7, 5.0, 20.0), (0.2, 3.0, 1.5), (0.55, 0.5, 8.0)] {
        let theta = BetaMixtureParams::new(t1, t2, t3).unwrap();
        let gap = |x: f64| {
            let (a, b) = theta.shapes();
            (1.0 - t1) * beta_pdf(x, a).unwrap() - t1 * beta_pdf(x, b).unwrap()
        };
        let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
        let lo_sign = gap(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((optimal_threshold(&theta) - 0.5 * (lo + hi)).abs() < 1e-10);
    }
}

#[test]
fn beta_distance_matches_quadrature() {
    for (a, b) in [((1.0, 1.0), (1.0, 1.0)), ((2.0, 2.0), (2.0, 2.0)), ((0.5, 2.0), (5.0, 1.0))] {
        let closed = beta_abs_distance(shape(a.0, a.1), shape(b.0, b.1)).unwrap();
        let numeric = beta_abs_distance_by_quadrature(a, b);
        assert!((closed - numeric).abs() < 1e-6, "{a:?} {b:?}: {closed} vs {numeric}");
    }
}

#[test]
fn beta_distance_matches_monte_carlo() {
    let a = shape(5.0, 20.0);
    let closed = beta_abs_distance(a, a.swapped()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let x = Beta::new(5.0, 20.0).unwrap();
    let y = Beta::new(20.0, 5.0).unwrap();
    let n = 10_000_000usize;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let (u, v): (f64, f64) = (x.sample(&mut rng), y.sample(&mut rng));
        let d = (u - v).abs();
        sum += d;
        sum2 += d * d;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((closed - mean).abs() < 3.0 * se, "{closed} vs {mean} ± {se}");
}

#[test]
fn pooled_moments_match_monte_carlo() {
    let comps = vec![
        GaussianComponent::new(
            vec![0.0, 1.0],
            Covariance::full(vec![vec![1.0, 0.3], vec![0.3, 0.5]]).unwrap(),
        )
        .unwrap(),
        GaussianComponent::new(vec![2.0, -1.0], Covariance::diagonal(vec![0.2, 2.0]).unwrap())
            .unwrap(),
        GaussianComponent::new(vec![-1.0, 0.5], Covariance::diagonal(vec![0.7, 0.1]).unwrap())
            .unwrap(),
    ];
    let weights = vec![0.5, 0.3, 0.2];
    let e = GaussianEnsemble::new(comps.clone(), weights.clone()).unwrap();
    let pool = gaussian_pool(&e).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let pick = rand::distributions::WeightedIndex::new(&weights).unwrap();
    let n = 1_000_000usize;
    let samples: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let c = &comps[pick.sample(&mut rng)];
            let s = c.covariance();
            // 2x2 Cholesky by hand
            let l11 = s.get(0, 0).sqrt();
            let l21 = s.get(1, 0) / l11;
            let l22 = (s.get(1, 1) - l21 * l21).sqrt();
            let (z1, z2): (f64, f64) = (std_normal.sample(&mut rng), std_normal.sample(&mut rng));
            [c.mean()[0] + l11 * z1, c.mean()[1] + l21 * z1 + l22 * z2]
        })
        .collect();
    let nf = n as f64;
    for k in 0..2 {
        let mean = samples.iter().map(|s| s[k]).sum::<f64>() / nf;
        let se = (pool.covariance().get(k, k) / nf).sqrt();
        assert!((mean - pool.mean()[k]).abs() < 3.0 * se, "mean {k}");
    }
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let prods: Vec<f64> = samples
            .iter()
            .map(|s| (s[i] - pool.mean()[i]) * (s[j] - pool.mean()[j]))
            .collect();
        let m = prods.iter().sum::<f64>() / nf;
        let var = prods.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / nf;
        let se = (var / nf).sqrt();
        assert!(
            (m - pool.covariance().get(i, j)).abs() < 3.0 * se,
            "cov ({i}, {j}): {m} vs {}",
            pool.covariance().get(i, j)
        );
    }
}

fn unit_pair(separation: f64) -> GaussianEnsemble {
    let c = || Covariance::diagonal(vec![1.0]).unwrap();
    GaussianEnsemble::with_uniform_weights(vec![
        GaussianComponent::new(vec![0.0], c()).unwrap(),
        GaussianComponent::new(vec![separation], c()).unwrap(),
    ])
    .unwrap()
}

#[test]
fn model_average_between_approaches_two_with_separation() {
    let mut last = 1.0;
    for sep in [0.5, 2.0, 5.0, 10.0, 20.0] {
        let e = unit_pair(sep);
        let pooled = model_average_pooled_numeric(&e, Order::One, GridSpec::for_dim(1)).unwrap();
        let ratio = pooled / gaussian_within(&e, Order::One).unwrap();
        assert!(ratio > last && ratio <= 2.0 + 1e-6, "sep {sep}: {ratio}");
        last = ratio;
    }
    assert!((last - 2.0).abs() < 1e-4);
}

#[test]
fn parametric_between_grows_like_pooled_spread() {
    // moment matching: pooled variance 1 + d^2/4, so the ratio is its root
    for sep in [0.5, 2.0, 10.0] {
        let b = gaussian_between(&unit_pair(sep), Order::One).unwrap();
        assert!((b - (1.0 + sep * sep / 4.0).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn model_average_never_exceeds_parametric_pool() {
    for sep in [0.5, 1.0, 3.0] {
        let e = unit_pair(sep);
        let average = model_average_pooled_numeric(&e, Order::One, GridSpec::for_dim(1)).unwrap();
        let parametric =
            gaussian_renyi(gaussian_pool(&e).unwrap().covariance(), Order::One).unwrap();
        assert!(average <= parametric);
    }
}
