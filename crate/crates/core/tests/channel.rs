use std::f64::consts::PI;

use cedesign::channel::{freq_response, realize_channel, registry, sampled_pdp, sampled_taps, ChannelRealization, FadingSpec};
use cedesign::ofdm::OfdmConfig;
use cedesign::C64;
use statrs::distribution::{ContinuousCDF, Normal};

fn draws(name: &str, n: u64, seed: u64) -> Vec<ChannelRealization> {
    let cfg = OfdmConfig::default();
    let pdp = registry::lookup(name, &cfg).unwrap();
    (0..n)
        .map(|i| realize_channel(&pdp, &FadingSpec::quasi_static(), &cfg, seed * 1_000_003 + i))
        .collect()
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn dc1_path_powers_match_the_table() {
    let cfg = OfdmConfig::default();
    let pdp = registry::lookup("DC1", &cfg).unwrap();
    let reals = draws("DC1", 20_000, 1);
    for (m, &a) in pdp.linear_gains().iter().enumerate() {
        let mean = reals.iter().map(|r| r.gains[m][0].norm_sqr()).sum::<f64>() / reals.len() as f64;
        // |a|^2 is exponential, so the sample mean has relative sd 1/sqrt(n) ~ 0.7%.
        assert!((mean / a - 1.0).abs() < 0.04, "path {m}: {mean} vs {a}");
    }
}

#[test]
fn path_gains_are_complex_gaussian() {
    let cfg = OfdmConfig::default();
    let a0 = registry::lookup("DC1", &cfg).unwrap().linear_gains()[0];
    let reals = draws("DC1", 4000, 2);
    let sd = (a0 / 2.0).sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    // 1% critical value of the one-sample KS statistic.
    let crit = 1.628 / (reals.len() as f64).sqrt();
    for part in [|c: C64| c.re, |c: C64| c.im] {
        let xs = reals.iter().map(|r| part(r.gains[0][0]) / sd).collect();
        let d = ks_statistic(xs, |x| normal.cdf(x));
        assert!(d < crit, "KS {d} >= {crit}");
    }
}

#[test]
fn paths_fade_independently() {
    let reals = draws("EPA", 10_000, 3);
    let n = reals.len() as f64;
    for (i, j) in [(0, 1), (0, 4), (2, 6)] {
        // Normalized cross-correlation of complex gains: sd ~ 1/sqrt(n) = 0.01.
        let (mut cross, mut pi, mut pj) = (C64::new(0.0, 0.0), 0.0, 0.0);
        for r in &reals {
            let (a, b) = (r.gains[i][0], r.gains[j][0]);
            cross += a * b.conj();
            pi += a.norm_sqr();
            pj += b.norm_sqr();
        }
        let rho = cross.norm() / (pi * pj).sqrt();
        assert!(rho < 0.04, "paths {i},{j}: {rho}");
        // Power correlation should vanish too.
        let (mi, mj) = (pi / n, pj / n);
        let cov = reals
            .iter()
            .map(|r| (r.gains[i][0].norm_sqr() - mi) * (r.gains[j][0].norm_sqr() - mj))
            .sum::<f64>()
            / n;
        assert!(cov.abs() / (mi * mj) < 0.05, "paths {i},{j}: power cov {cov}");
    }
}

#[test]
fn monte_carlo_tap_power_matches_sampled_profile() {
    let cfg = OfdmConfig::default();
    let n_f = cfg.n_subcarriers as f64;
    for name in ["EPA", "ETU"] {
        let sp = sampled_pdp(&registry::lookup(name, &cfg).unwrap(), &cfg);
        let reals = draws(name, 20_000, 4);
        let mut acc = vec![0.0; cfg.n_subcarriers];
        for r in &reals {
            for (a, h) in acc.iter_mut().zip(sampled_taps(r, &cfg, 0)) {
                *a += h.norm_sqr() / n_f;
            }
        }
        let total = sp.total();
        for (n, (&a, &p)) in acc.iter().zip(&sp.p).enumerate() {
            if p > 0.01 * total {
                let mc = a / reals.len() as f64;
                assert!((mc / p - 1.0).abs() < 0.03, "{name} tap {n}: {mc} vs {p}");
            }
        }
    }
}

#[test]
fn equal_two_path_channel_has_deep_fades() {
    let cfg = OfdmConfig::default();
    let pdp = registry::lookup("two-path", &cfg).unwrap();
    let taus = pdp.delays_in_samples(&cfg);
    let g = C64::new(0.6, -0.3);
    let real = ChannelRealization::static_paths(taus.clone(), &[g, g], &cfg).unwrap();
    let h = freq_response(&real, &cfg);
    let n_f = cfg.n_subcarriers as f64;
    let mut mags = Vec::new();
    for k in 0..cfg.n_subcarriers {
        let want: C64 = taus
            .iter()
            .map(|&t| g * C64::from_polar(1.0, -2.0 * PI * k as f64 * t / n_f))
            .sum();
        assert!((h[(k, 0)] - want).norm() < 1e-9, "k {k}");
        mags.push(h[(k, 0)].norm_sqr());
    }
    let max = mags.iter().copied().fold(0.0, f64::max);
    let min = mags.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((max - 4.0 * g.norm_sqr()).abs() < 0.05 * max);
    assert!(min < 0.05 * max, "shallowest null {min} vs peak {max}");
}
