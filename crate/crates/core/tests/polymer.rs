use lgpoly::polymer::{
    ks_distance, log_partition, log_partition_samples, lpp_samples, mc_summary, sample_log_gamma, SimConfig, SiteRng,
};
use lgpoly::special_fn::{digamma_real, polygamma_real};
use statrs::distribution::{ContinuousCDF, Gamma};

fn log_gamma_draws(shape: f64, count: u64, seed: u64) -> Vec<f64> {
    (0..count)
        .map(|k| sample_log_gamma(shape, &mut SiteRng::new(seed, k, 0, 0)))
        .collect()
}

#[test]
fn log_gamma_sampler_moments() {
    for shape in [0.1, 0.5, 1.0, 3.7] {
        let xs = log_gamma_draws(shape, 400_000, 3);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let (m0, v0) = (digamma_real(shape).unwrap(), polygamma_real(1, shape).unwrap());
        assert!(
            (mean - m0).abs() < 5.0 * (v0 / n).sqrt(),
            "shape {shape}: mean {mean} vs {m0}"
        );
        assert!((var / v0 - 1.0).abs() < 0.02, "shape {shape}: var {var} vs {v0}");
    }
}

#[test]
fn gamma_sampler_matches_cdf() {
    for shape in [0.3, 2.0] {
        let mut xs: Vec<f64> = log_gamma_draws(shape, 50_000, 9).into_iter().map(f64::exp).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let dist = Gamma::new(shape, 1.0).unwrap();
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = dist.cdf(x);
                (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic
        assert!(d < 1.63 / n.sqrt(), "shape {shape}: D={d}");
    }
}

#[test]
fn small_temperature_bridges_to_last_passage() {
    // 2θ log(1/G) → Exp(1) as θ → 0, so 2θ log Z_n → LPP time with exponential weights
    let (n, theta, samples) = (4, 0.005, 20_000);
    let lz = log_partition_samples(&SimConfig {
        n,
        theta,
        samples,
        seed: 5,
    })
    .unwrap();
    let scaled: Vec<f64> = lz.iter().map(|z| 2.0 * theta * z).collect();
    let lpp = lpp_samples(n, samples, 6).unwrap();
    let d = ks_distance(&scaled, &lpp);
    assert!(d < 0.04, "KS distance {d}");
}

#[test]
fn samples_are_reproducible_and_order_independent() {
    let cfg = SimConfig {
        n: 12,
        theta: 0.4,
        samples: 64,
        seed: 77,
    };
    let a = log_partition_samples(&cfg).unwrap();
    let b = log_partition_samples(&cfg).unwrap();
    assert_eq!(a, b);
    for (k, v) in a.iter().enumerate() {
        assert_eq!(*v, log_partition(12, 0.4, 77, k as u64));
    }
    let s = mc_summary(&cfg).unwrap();
    assert_eq!(s.samples_used, 64);
    assert!(s.var_log_z > 0.0);
}

#[test]
fn config_guards() {
    let bad = [
        SimConfig {
            n: 0,
            theta: 0.5,
            samples: 10,
            seed: 0,
        },
        SimConfig {
            n: 5000,
            theta: 0.5,
            samples: 10,
            seed: 0,
        },
        SimConfig {
            n: 5,
            theta: 0.0,
            samples: 10,
            seed: 0,
        },
        SimConfig {
            n: 5,
            theta: 0.5,
            samples: 0,
            seed: 0,
        },
    ];
    for cfg in bad {
        assert!(mc_summary(&cfg).is_err(), "{cfg:?}");
    }
}
