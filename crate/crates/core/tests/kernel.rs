mod support;

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use stringency::kernel::{
    central_t_cdf, noncentral_t_cdf, prob_positive, sample_size_for_power, TestSpec,
};
use support::{nct_cdf_quadrature, nct_probe_points};

#[test]
fn noncentral_t_matches_quadrature_on_probe_grid() {
    let mut worst = (0.0, (0.0, 0.0, 0.0));
    for (x, df, ncp) in nct_probe_points() {
        let got = noncentral_t_cdf(x, df, ncp).unwrap();
        let want = nct_cdf_quadrature(x, df, ncp);
        let err = (got - want).abs();
        if err > worst.0 {
            worst = (err, (x, df, ncp));
        }
    }
    assert!(
        worst.0 < 1e-10,
        "worst error {:e} at {:?}",
        worst.0,
        worst.1
    );
}

#[test]
fn noncentral_t_reference_point() {
    let got = noncentral_t_cdf(1.5, 10.0, 1.2).unwrap();
    let want = nct_cdf_quadrature(1.5, 10.0, 1.2);
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn noncentral_t_in_the_power_regime() {
    // the range actually visited by sample-size inversion
    for &(x, df, ncp) in &[
        (1.963, 700.0, 2.78),
        (-1.963, 700.0, 2.78),
        (2.81, 1200.0, 3.64),
        (3.29, 4000.0, 6.64),
        (1.97, 60.0, 0.85),
        (0.5, 0.6, 0.3),
        (2.0, 2.0, -0.7),
    ] {
        let got = noncentral_t_cdf(x, df, ncp).unwrap();
        let want = nct_cdf_quadrature(x, df, ncp);
        assert!(
            (got - want).abs() < 1e-10,
            "({x}, {df}, {ncp}): {got} vs {want}"
        );
    }
}

#[test]
fn zero_ncp_is_central_t() {
    for &df in &[1.0, 2.5, 9.0, 150.0] {
        let st = StudentsT::new(0.0, 1.0, df).unwrap();
        for &x in &[-4.0, -1.1, 0.0, 0.3, 2.7, 8.0] {
            let a = noncentral_t_cdf(x, df, 0.0).unwrap();
            let b = central_t_cdf(x, df).unwrap();
            assert!((a - b).abs() < 1e-14);
            assert!(
                (a - st.cdf(x)).abs() < 1e-10,
                "df {df} x {x}: {a} vs {}",
                st.cdf(x)
            );
        }
    }
}

/// Normal-approximation total sample size for a two-sample test.
fn normal_approx_n(pwr: f64, spec: &TestSpec) -> f64 {
    let z = Normal::new(0.0, 1.0).unwrap();
    let za = z.inverse_cdf(1.0 - spec.alpha / 2.0);
    let zb = z.inverse_cdf(pwr);
    4.0 * spec.sigma.powi(2) * (za + zb).powi(2) / spec.delta.powi(2)
}

#[test]
fn power_near_normal_approximation() {
    let spec = TestSpec::new(0.21, 1.0, 0.05).unwrap();
    let p = prob_positive(712.0, &spec).unwrap();
    assert!((p - 0.80).abs() < 0.005, "{p}");

    // the t-test needs slightly more than the z-test
    for (alpha, expect) in [(0.05, 712.0), (0.005, 1208.0)] {
        let spec = TestSpec::new(0.21, 1.0, alpha).unwrap();
        let n = sample_size_for_power(0.8, &spec).unwrap();
        let approx = normal_approx_n(0.8, &spec);
        assert!((approx - expect).abs() / expect < 0.002, "{approx}");
        assert!(
            n > approx && (n - approx) / approx < 0.01,
            "alpha {alpha}: {n} vs {approx}"
        );
        assert!((prob_positive(n, &spec).unwrap() - 0.8).abs() < 1e-8);
    }
}

#[test]
fn test_size_is_exact() {
    for alpha in [0.001, 0.005, 0.05, 0.1, 0.5] {
        let spec = TestSpec::new(0.0, 1.0, alpha).unwrap();
        for n in [2.5, 4.0, 17.3, 50.0, 1e3, 1e5] {
            let p = prob_positive(n, &spec).unwrap();
            assert!((p - alpha).abs() < 1e-10, "alpha {alpha} n {n}: {p}");
        }
    }
}

#[test]
fn power_increases_with_n_and_delta() {
    let ns: Vec<f64> = (0..60).map(|i| 3.0 * 1.15f64.powi(i)).collect();
    for alpha in [0.005, 0.05] {
        let spec = TestSpec::new(0.21, 1.0, alpha).unwrap();
        let ps: Vec<f64> = ns
            .iter()
            .map(|&n| prob_positive(n, &spec).unwrap())
            .collect();
        assert!(ps.windows(2).all(|w| w[1] >= w[0]));
        assert!(ps.windows(2).take(40).all(|w| w[1] > w[0]));
    }
    let deltas: Vec<f64> = (0..40).map(|i| 0.01 * i as f64).collect();
    let ps: Vec<f64> = deltas
        .iter()
        .map(|&d| prob_positive(300.0, &TestSpec::new(d, 1.0, 0.05).unwrap()).unwrap())
        .collect();
    assert!(ps.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn power_saturates_and_small_n_is_rejected() {
    let spec = TestSpec::new(0.21, 1.0, 0.05).unwrap();
    assert!((prob_positive(1e6, &spec).unwrap() - 1.0).abs() < 1e-6);
    assert!(prob_positive(2.0, &spec).is_err());
    assert!(noncentral_t_cdf(f64::NAN, 5.0, 0.0).is_err());
    assert!((noncentral_t_cdf(0.0, 5.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
}
