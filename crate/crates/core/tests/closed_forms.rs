//! Closed-form throughput expressions against independent quadrature and
//! high-precision reference values.

use std::f64::consts::LN_2;

use xlmimo_core::geometry::CellGeometry;
use xlmimo_core::special::{exp_integral_e1, scaled_exp_integral_e1};
use xlmimo_core::throughput::{
    chi_and_interference_sums, chi_bar, chi_scaling, i_bar, mmwave_se_approx, se_approx,
    se_upper_bound, sub6_se_lower_bound, throughput_asymptote, wrap_throughput, PowerRegime,
    ProtocolConfig, ThroughputScope,
};
use xlmimo_core::transceiver::LinkBudget;
use xlmimo_oracle::{integrate, integrate_to_infinity, kahan_sum, midpoint};

const SPACING: f64 = 0.02;

fn cell() -> CellGeometry {
    CellGeometry::new(70.0, 150.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Values below were computed with mpmath at 40 significant digits.
const CHI_512: f64 = 0.044_383_353_116_768_529_3;
const INTERFERENCE_512: f64 = 3.847_428_434_824_028_831_8e-6;
const CHI_1: f64 = 8.660_682_409_623_826_828_3e-5;
const UPPER_BOUND_K8_SNR100: f64 = 6.638_549_031_046_857_914;

#[test]
fn array_gain_sum_matches_high_precision_reference() {
    let (chi, interference) = chi_and_interference_sums(512, SPACING, &cell()).unwrap();
    assert!(rel(chi, CHI_512) < 1e-12, "{chi}");
    assert!(rel(interference, INTERFERENCE_512) < 1e-12, "{interference}");

    let (chi1, i1) = chi_and_interference_sums(1, SPACING, &cell()).unwrap();
    assert!(rel(chi1, CHI_1) < 1e-13);
    assert!(rel(i1, CHI_1 * CHI_1) < 1e-13);
}

#[test]
fn array_gain_sum_matches_brute_force() {
    let c = cell();
    for n in [2usize, 7, 64, 300] {
        let span = c.r_max * c.r_max - c.r_min * c.r_min;
        let terms: Vec<f64> = (0..n)
            .map(|i| {
                let x = (2.0 * i as f64 - (n as f64 - 1.0)) * SPACING / 2.0;
                let num = (c.r_max - x) * (c.r_max + x);
                let den = (c.r_min - x) * (c.r_min + x);
                (num / den).ln() / span
            })
            .collect();
        let (chi, interference) = chi_and_interference_sums(n, SPACING, &c).unwrap();
        assert!(rel(chi, kahan_sum(terms.iter().cloned())) < 1e-12);
        assert!(rel(interference, kahan_sum(terms.iter().map(|t| t * t))) < 1e-12);
        assert!(interference < chi * chi);
    }
}

#[test]
fn upper_bound_matches_reference() {
    let (chi, _) = chi_and_interference_sums(512, SPACING, &cell()).unwrap();
    let wavelength = 0.04;
    let budget = LinkBudget::new(100.0 / (chi * wavelength * wavelength), 1.0, 8);
    let bound = se_upper_bound(512, SPACING, &cell(), 8, &budget, wavelength).unwrap();
    assert!(rel(bound, UPPER_BOUND_K8_SNR100) < 1e-12, "{bound}");

    let single = se_upper_bound(512, SPACING, &cell(), 1, &budget, wavelength).unwrap();
    assert!(rel(single, 101f64.log2()) < 1e-12);
}

fn chi_bar_integral(n: f64, c: &CellGeometry) -> f64 {
    let (a2, b2) = ((c.r_max / SPACING).powi(2), (c.r_min / SPACING).powi(2));
    let span = c.r_max * c.r_max - c.r_min * c.r_min;
    let f = |m: f64| ((a2 - m * m) / (b2 - m * m)).ln();
    integrate(f, -n / 2.0, n / 2.0, 1e-13, 0.0) / span
}

#[test]
fn chi_bar_matches_quadrature() {
    let c = cell();
    for n in [1.0, 8.0, 64.0, 512.0, 1024.0, 4096.0, 6500.0] {
        let closed = chi_bar(n, SPACING, &c).unwrap();
        assert!(rel(closed, chi_bar_integral(n, &c)) < 1e-9, "N = {n}");
    }
    // dense midpoint rule as a second, cruder oracle
    let (a2, b2) = ((c.r_max / SPACING).powi(2), (c.r_min / SPACING).powi(2));
    let span = c.r_max * c.r_max - c.r_min * c.r_min;
    let mid = midpoint(|m| ((a2 - m * m) / (b2 - m * m)).ln(), -256.0, 256.0, 1_000_000) / span;
    assert!(rel(chi_bar(512.0, SPACING, &c).unwrap(), mid) < 1e-9);
}

#[test]
fn integral_tracks_sum() {
    let c = cell();
    for n in [8usize, 64, 512, 1024] {
        let (chi, _) = chi_and_interference_sums(n, SPACING, &c).unwrap();
        assert!(rel(chi_bar(n as f64, SPACING, &c).unwrap(), chi) <= 0.01, "N = {n}");
    }
}

#[test]
fn i_bar_matches_quadrature() {
    let c = cell();
    let span = c.r_max * c.r_max - c.r_min * c.r_min;
    for n in [0.0, 1.0, 512.0, 1024.0, 6999.0] {
        let shift = n * SPACING / 2.0;
        let oracle = integrate(|r| 2.0 * r / span / (r + shift).powi(2), c.r_min, c.r_max, 1e-14, 0.0);
        assert!(rel(i_bar(n, SPACING, &c).unwrap(), oracle) < 1e-9, "N = {n}");
    }
    assert!(rel(i_bar(0.0, SPACING, &c).unwrap(), 2.0 * (150.0f64 / 70.0).ln() / 17600.0) < 1e-14);
    assert!(i_bar(1024.0, SPACING, &c).unwrap() < i_bar(512.0, SPACING, &c).unwrap());
}

#[test]
fn scaling_forms() {
    let c = cell();
    let s = chi_scaling(SPACING, &c).unwrap();
    assert!(rel(s.linear_coefficient, 2.0 * (150.0f64 / 70.0).ln() / 17600.0) < 1e-14);
    let small = chi_bar(8.0, SPACING, &c).unwrap() / 8.0;
    assert!(rel(small, s.linear_coefficient) < 1e-3);
    let pole = 2.0 * c.r_min / SPACING;
    let near = chi_bar((1.0 - 1e-6) * pole, SPACING, &c).unwrap();
    assert!(rel(near, s.saturation_limit) < 1e-3, "{near} vs {}", s.saturation_limit);
}

#[test]
fn approximation_close_to_bound() {
    let c = cell();
    let budget = LinkBudget::new(1e-18, xlmimo_core::thermal_noise_density(), 8);
    for k in [4usize, 8] {
        let ub = se_upper_bound(512, SPACING, &c, k, &budget, 0.04).unwrap();
        let app = se_approx(512, SPACING, &c, k, &budget, 0.04).unwrap();
        assert!(rel(app, ub) < 0.10, "K = {k}: {app} vs {ub}");
    }
}

#[test]
fn bounds_shrink_with_users() {
    let c = cell();
    let budget = LinkBudget::new(1e-18, xlmimo_core::thermal_noise_density(), 8);
    let mut last_ub = f64::INFINITY;
    let mut last_app = f64::INFINITY;
    for k in 1..=32 {
        let ub = se_upper_bound(256, SPACING, &c, k, &budget, 0.04).unwrap();
        let app = se_approx(256, SPACING, &c, k, &budget, 0.04).unwrap();
        assert!(ub <= last_ub && app <= last_app);
        last_ub = ub;
        last_app = app;
    }
}

#[test]
fn small_signal_expansion() {
    let c = cell();
    let budget = LinkBudget::new(1e-30, 1.0, 4);
    let eff = chi_bar(128.0, SPACING, &c).unwrap() - 3.0 * i_bar(128.0, SPACING, &c).unwrap();
    let linear = budget.snr_density() * 0.04 * 0.04 * eff / LN_2;
    let app = se_approx(128, SPACING, &c, 4, &budget, 0.04).unwrap();
    assert!(rel(app, linear) < 1e-9);
}

#[test]
fn low_power_asymptote_agrees_with_approximation() {
    let c = cell();
    let proto = ProtocolConfig::default();
    let budget = LinkBudget::new(1e-18, xlmimo_core::thermal_noise_density(), 1);
    let asym = throughput_asymptote(PowerRegime::LowPower, 64, 1, &budget, &proto, &c, 0.04).unwrap();
    let se = se_approx(64, SPACING, &c, 1, &budget, 0.04).unwrap();
    let wrapped = wrap_throughput(se, &proto, 1, ThroughputScope::Sum).unwrap();
    assert!(rel(asym, wrapped) < 0.05, "{asym} vs {wrapped}");

    let double = throughput_asymptote(PowerRegime::LowPower, 128, 1, &budget, &proto, &c, 0.04).unwrap();
    assert!(rel(double, 2.0 * asym) < 1e-14);
}

#[test]
fn high_power_asymptote_unit_argument() {
    let c = cell();
    let proto = ProtocolConfig::default();
    let k = 16;
    // choose P so that 2 P N λ² ln(r_max/r_min) / (σ² Δ) = 1 at N = 100
    let arg_per_p = 2.0 * 100.0 * 0.04 * 0.04 * (150.0f64 / 70.0).ln() / 17600.0;
    let budget = LinkBudget::new(1.0 / arg_per_p, 1.0, k);
    let v = throughput_asymptote(PowerRegime::HighPower, 100, k, &budget, &proto, &c, 0.04).unwrap();
    let expect = proto.bandwidth * k as f64 * proto.data_fraction(k);
    assert!(rel(v, expect) < 1e-12);
}

fn sub6_oracle(c_scale: f64, c: &CellGeometry) -> f64 {
    let span = c.r_max * c.r_max - c.r_min * c.r_min;
    integrate(|r| (c_scale / (r * r)).ln_1p() / LN_2 * 2.0 * r / span, c.r_min, c.r_max, 1e-14, 0.0)
}

#[test]
fn sub6_bound_matches_quadrature() {
    let c = CellGeometry::new(70.0, 500.0).unwrap();
    let wavelength = 0.0857;
    // budget chosen so that P λ² (N - K) / σ² = 1e6 m²
    let budget = LinkBudget::new(1e6 / (wavelength * wavelength * 56.0), 1.0, 8);
    let closed = sub6_se_lower_bound(64, 8, &budget, &c, wavelength).unwrap();
    assert!(rel(closed, sub6_oracle(1e6, &c)) < 1e-9, "{closed}");

    let tiny = LinkBudget::new(1e-40, 1.0, 8);
    assert!(sub6_se_lower_bound(64, 8, &tiny, &c, wavelength).unwrap() < 1e-30);
}

#[test]
fn sub6_collapsing_annulus() {
    let c = CellGeometry::new(99.999, 100.0).unwrap();
    let budget = LinkBudget::new(1.0, 1.0, 1);
    let v = sub6_se_lower_bound(2, 1, &budget, &c, 1.0).unwrap();
    assert!((v - (1.0 + 1.0 / 1e4f64).log2()).abs() < 1e-8);
}

fn mmwave_oracle(c_scale: f64, c: &CellGeometry) -> f64 {
    let span = c.r_max * c.r_max - c.r_min * c.r_min;
    let inner = |r: f64| {
        integrate_to_infinity(|g: f64| (c_scale * g / (r * r)).ln_1p() * (-g).exp(), 0.0, 1e-13, 0.0)
    };
    integrate(|r| inner(r) / LN_2 * 2.0 * r / span, c.r_min, c.r_max, 1e-12, 0.0)
}

#[test]
fn mmwave_approximation_matches_two_dimensional_quadrature() {
    let c = cell();
    let wavelength = 0.0107;
    let n = 256;
    // C̄ / r_max² = 1
    let c_scale = c.r_max * c.r_max;
    let budget = LinkBudget::new(c_scale / (wavelength * wavelength * n as f64), 1.0, 16);
    let closed = mmwave_se_approx(n, &budget, &c, wavelength).unwrap();
    assert!(rel(closed, mmwave_oracle(c_scale, &c)) < 1e-6, "{closed}");
    let more = mmwave_se_approx(2 * n, &budget, &c, wavelength).unwrap();
    assert!(more > closed);
}

#[test]
fn mmwave_tiny_snr_vanishes() {
    let c = cell();
    let budget = LinkBudget::new(1e-30, 1.0, 16);
    let v = mmwave_se_approx(256, &budget, &c, 0.0107).unwrap();
    assert!((0.0..1e-20).contains(&v), "{v}");
}

#[test]
fn exponential_integral_matches_quadrature() {
    let mut x = 1e-6;
    while x <= 50.0 {
        let oracle = xlmimo_oracle::exp_integral_e1(x);
        assert!(rel(exp_integral_e1(x).unwrap(), oracle) < 1e-12, "x = {x}");
        assert!(rel(scaled_exp_integral_e1(x).unwrap(), x.exp() * oracle) < 1e-12, "x = {x}");
        x *= 1.37;
    }
    for x in [100.0, 300.0, 700.0] {
        assert!(rel(exp_integral_e1(x).unwrap(), xlmimo_oracle::exp_integral_e1(x)) < 1e-12);
    }
    assert!(exp_integral_e1(2.0).unwrap() < exp_integral_e1(1.0).unwrap());
}

#[test]
fn exponential_integral_reference_points() {
    assert!((exp_integral_e1(1.0).unwrap() - 0.219_383_934_395_520_273_68).abs() < 1e-15);
    let x = 1e-8;
    let v = exp_integral_e1(x).unwrap() + x.ln();
    assert!((v - (-0.577_215_654_901_532_885_61)).abs() < 1e-15);
}
