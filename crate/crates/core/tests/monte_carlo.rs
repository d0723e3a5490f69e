use fbrate_core::mc::{
    estimate_er, estimate_mean, geometry_from_params, run_chunk, ChunkStats, McConfig, SnrSampler,
};
use fbrate_core::{
    er_auto, mgf, preset, ChannelParams, DerivedParams, ErRequest, Method, Overrides, Preset,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reference() -> ChannelParams {
    ChannelParams::new(2.0, 1.0, 1.0, 0.1, 0.1, 1.0)
}

#[test]
fn rayleigh_expectation() {
    let p = preset(Preset::Rayleigh, Overrides::default()).unwrap();
    let e = estimate_er(&p, 2.0, &McConfig::default()).unwrap();
    assert_eq!(e.n_samples, 1_000_000);
    assert!((e.j_hat - 0.403_652_637_676_805_6).abs() <= 3.0 * e.j_stderr);
}

#[test]
fn reference_expectation_matches_quadrature() {
    let e = estimate_er(&reference(), 2.0, &McConfig::default()).unwrap();
    let q = er_auto(&ErRequest::new(reference(), 2.0).with_method(Method::Quadrature)).unwrap();
    assert!((e.j_hat - q.expectation_j).abs() <= 3.0 * e.j_stderr);
}

#[test]
fn empirical_mgf() {
    for p in [
        reference(),
        ChannelParams::new(3.0, 0.6, 4.0, 0.4, 2.0, 5.0),
    ] {
        let d = DerivedParams::derive(&p).unwrap();
        let stats = estimate_mean(&p, &McConfig::default(), |g| (-g).exp()).unwrap();
        let want = mgf(&p, &d, 1.0).value;
        assert!(
            (stats.mean - want).abs() <= 3.0 * stats.std_error(),
            "{p:?}"
        );
    }
}

#[test]
fn unshadowed_single_cluster_is_exponential() {
    let gbar = 2.5;
    let p = ChannelParams::new(1.0, 1e4, 0.0, 1.0, 1.0, gbar);
    let sampler = SnrSampler::new(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x / gbar).exp();
            (cdf - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - cdf)
        })
        .fold(0.0, f64::max);
    assert!(ks < 1.628 / (n as f64).sqrt(), "KS distance {ks}");
}

#[test]
fn chunk_order_does_not_change_the_estimate() {
    let config = McConfig {
        n_samples: 300_001,
        seed: 9,
        chunk_size: 10_000,
    };
    let sampler = SnrSampler::new(&reference()).unwrap();
    let f = |g: f64| (1.0 + g).powi(-2);
    let mut parts: Vec<(u64, ChunkStats)> = config
        .chunks()
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(|(k, len)| (k, run_chunk(&sampler, config.seed, k, len, &f)))
        .collect();
    parts.sort_by_key(|(k, _)| *k);
    let merged = parts
        .into_iter()
        .map(|(_, s)| s)
        .fold(ChunkStats::default(), ChunkStats::merge);
    let sequential = estimate_mean(&reference(), &config, f).unwrap();
    assert_eq!(merged.mean.to_bits(), sequential.mean.to_bits());
    assert_eq!(merged.m2.to_bits(), sequential.m2.to_bits());
    assert_eq!(merged.count, 300_001);
}

#[test]
fn repeated_runs_are_identical() {
    let config = McConfig {
        n_samples: 50_000,
        ..McConfig::default()
    };
    let a = estimate_er(&reference(), 2.0, &config).unwrap();
    let b = estimate_er(&reference(), 2.0, &config).unwrap();
    assert_eq!(a, b);
    let other = estimate_er(&reference(), 2.0, &McConfig { seed: 43, ..config }).unwrap();
    assert_ne!(a.j_hat, other.j_hat);
}

#[test]
fn rejects_bad_requests() {
    assert!(estimate_er(&reference(), 0.0, &McConfig::default()).is_err());
    let frac = ChannelParams {
        mu: 1.5,
        ..reference()
    };
    assert!(estimate_er(&frac, 2.0, &McConfig::default()).is_err());
}

proptest! {
    #[test]
    fn geometry_round_trip(
        mu in 1u32..8,
        kappa in 0.01f64..20.0,
        eta in 0.01f64..1.0,
        rho2 in 0.01f64..10.0,
    ) {
        let p = ChannelParams::new(mu as f64, 2.0, kappa, eta, rho2, 1.0);
        let g = geometry_from_params(&p).unwrap();
        prop_assert_eq!(g.clusters(), mu as usize);
        prop_assert!((g.kappa() - kappa).abs() <= 1e-12 * kappa);
        prop_assert!((g.eta() - eta).abs() <= 1e-12 * eta);
        prop_assert!((g.rho2().unwrap() - rho2).abs() <= 1e-12 * rho2);
    }
}
