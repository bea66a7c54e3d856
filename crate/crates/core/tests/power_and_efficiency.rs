//! Power-model scaling laws and energy-efficiency behaviour.

use proptest::prelude::*;
use xlmimo_core::ee::{
    compare_setups, ee_antenna_limit_check, ee_bandwidth_limit, energy_efficiency, knee_point, RateMode,
};
use xlmimo_core::power::{
    coefficients, component_powers, hybrid_component_powers, total_power, CoefficientScheme, HardwareProfile,
    OperatingPoint,
};
use xlmimo_core::scenario::{Scenario, SetupPreset, SystemFamily};
use xlmimo_core::throughput::ProtocolConfig;

fn point(antennas: usize, users: usize, bandwidth: f64) -> OperatingPoint {
    OperatingPoint {
        antennas,
        users,
        tx_power: 1e-18,
        protocol: ProtocolConfig { bandwidth, ..ProtocolConfig::default() },
    }
}

fn total(antennas: usize, users: usize, bandwidth: f64, throughput: f64) -> f64 {
    component_powers(&point(antennas, users, bandwidth), &HardwareProfile::default(), throughput).total
}

#[test]
fn spot_values_of_single_components() {
    let hw = HardwareProfile::default();
    assert!((hw.lna_power(4e8) - 0.668).abs() < 1e-12);
    assert!((hw.adc_power(4e8) / 4.2316e-2 - 1.0).abs() < 1e-3);
    let p = component_powers(&point(512, 16, 4e8), &hw, 0.0);
    assert!((p.ce / 13.98 - 1.0).abs() < 1e-3, "{}", p.ce);
}

#[test]
fn total_is_sum_of_parts() {
    let p = component_powers(&point(300, 12, 1e8), &HardwareProfile::default(), 2e9);
    let sum: f64 = p.parts().iter().sum();
    assert!((p.total - sum).abs() <= 1e-12 * sum);
    assert!(p.amplifiers() + p.converters() + p.baseband() + p.fixed_bs < p.total);
}

#[test]
fn affine_in_bandwidth() {
    // throughput is proportional to B at fixed spectral efficiency
    let f = |b: f64| total(512, 16, b, 20.0 * b);
    for b in [1e7, 4e8, 1e10] {
        let h = b / 2.0;
        let second = f(b + 2.0 * h) - 2.0 * f(b + h) + f(b);
        assert!(second.abs() <= 1e-9 * f(b + 2.0 * h), "B = {b}");
    }
}

#[test]
fn affine_in_antennas_and_quadratic_per_antenna_cost() {
    let f = |n: usize, k: usize| total(n, k, 4e8, 1e9);
    for n in [32, 512, 4000] {
        let second = f(n + 200, 16) - 2.0 * f(n + 100, 16) + f(n, 16);
        assert!(second.abs() <= 1e-9 * f(n + 200, 16));
    }
    let slope = |k: usize| f(1001, k) - f(1000, k);
    for k in [2, 8, 20] {
        let third = slope(k + 3) - 3.0 * slope(k + 2) + 3.0 * slope(k + 1) - slope(k);
        assert!(third.abs() <= 1e-9 * slope(k + 3), "K = {k}");
    }
}

#[test]
fn polynomial_reconciles_with_components() {
    let hw = HardwareProfile::default();
    for n in [16, 64, 512, 2048, 6000] {
        for k in [1, 4, 16, 64] {
            let op = point(n, k, 4e8);
            let thr = 5.0 * 4e8 * k as f64;
            let parts = component_powers(&op, &hw, thr).total;
            let poly = coefficients(CoefficientScheme::XlMimo, &op.protocol, &hw).total(
                n as f64,
                k as f64,
                op.tx_power,
                thr,
            );
            assert!(((poly - parts) / parts).abs() < 1e-3, "N = {n}, K = {k}");
        }
    }
}

#[test]
fn hybrid_with_full_chains_matches_digital_apart_from_phase_shifters() {
    let hw = HardwareProfile::default();
    let op = point(64, 8, 8e8);
    let digital = component_powers(&op, &hw, 1e9);
    let hybrid = hybrid_component_powers(&op, &hw, 64, 1e9);
    assert!((hybrid.adc - digital.adc).abs() < 1e-12 * digital.adc);
    assert!((hybrid.phase_shifters - 64.0 * 64.0 * 0.01).abs() < 1e-12);
    assert!((hybrid.pd - digital.pd).abs() < 1e-9 * digital.pd);
    let fewer = hybrid_component_powers(&op, &hw, 8, 1e9);
    assert!(fewer.converters() < hybrid.converters());
}

#[test]
fn phase_shifter_spot_value() {
    let op = point(256, 16, 8e8);
    let p = hybrid_component_powers(&op, &HardwareProfile::default(), 16, 0.0);
    assert!((p.phase_shifters - 40.96).abs() < 1e-9);
}

#[test]
fn mmwave_total_has_no_polynomial() {
    let s = Scenario::preset(SetupPreset::MmWave);
    let t = total_power(SystemFamily::MmWave, &s.operating_point(), &s.hardware, 1e9);
    assert!(t.polynomial.is_none());
    assert!(t.breakdown.phase_shifters > 0.0);
}

#[test]
fn efficiency_is_throughput_over_power() {
    let e = energy_efficiency(&Scenario::default(), RateMode::ClosedForm).unwrap();
    let expect = e.point.throughput / e.point.power;
    assert!((e.point.ee - expect).abs() <= 1e-12 * expect);
    assert!(e.point.ee > 0.0);
}

#[test]
fn efficiency_grows_with_bandwidth_towards_limit() {
    for k in [16usize, 32, 64] {
        let base = Scenario { users: k, ..Scenario::default() };
        let limit = ee_bandwidth_limit(&base).unwrap();
        let mut last = 0.0;
        for i in 0..20 {
            let b = 10f64.powf(7.0 + 5.0 * i as f64 / 19.0);
            let s = Scenario { protocol: ProtocolConfig { bandwidth: b, ..base.protocol }, ..base.clone() };
            let ee = energy_efficiency(&s, RateMode::ClosedForm).unwrap().point.ee;
            assert!(ee >= last, "K = {k}, B = {b}");
            assert!(ee <= limit);
            last = ee;
        }
        let ratio = last / limit;
        assert!((0.98..=1.0).contains(&ratio), "K = {k}: {ratio}");
    }
}

#[test]
fn bandwidth_limit_rejects_hybrid() {
    assert!(ee_bandwidth_limit(&Scenario::preset(SetupPreset::MmWave)).is_err());
}

#[test]
fn knee_point_reaches_most_of_the_plateau() {
    let s = Scenario::default();
    let knee = knee_point(&s, 0.95).unwrap();
    assert!(knee.antennas > 16.0);
    assert!(knee.in_low_power_regime(), "{}", knee.snr_at_knee);
    let c = coefficients(CoefficientScheme::XlMimo, &s.protocol, &s.hardware);
    let k = s.users as f64;
    let expect = 19.0 * c.antenna_independent(k, s.tx_power) / c.per_antenna(k);
    assert!((knee.antennas - expect).abs() < 1e-9 * expect);
    assert!(knee_point(&s, 1.0).is_err());
}

#[test]
fn antenna_sweep_skips_points_outside_the_domain() {
    let grid: Vec<usize> = (4..=13).map(|e| 1usize << e).collect();
    let report = ee_antenna_limit_check(&Scenario::default(), &grid).unwrap();
    assert_eq!(report.points.len() + report.skipped.len(), grid.len());
    assert!(report.skipped.iter().any(|(n, _)| *n == 8192));
    assert!(report.max_ee() >= report.ee_at(16).unwrap());
}

#[test]
fn setup_comparison_orders_middle_band_first() {
    let setups: Vec<(String, Scenario)> = [SetupPreset::Sub6, SetupPreset::XlMimo, SetupPreset::MmWave]
        .into_iter()
        .map(|p| (format!("{p:?}"), Scenario::preset(p)))
        .collect();
    let grid = [1e-18, 1e-17];
    let rows = compare_setups(&setups, &grid).unwrap();
    assert_eq!(rows.len(), 6);
    for (i, _) in grid.iter().enumerate() {
        let ee = |s: usize| rows[s * grid.len() + i].evaluation.point.ee;
        assert!(ee(1) > ee(0) && ee(1) > ee(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_increases_with_array_and_users(n in 8usize..4096, k in 1usize..32) {
        prop_assert!(total(n + 1, k, 4e8, 1e9) > total(n, k, 4e8, 1e9));
        prop_assert!(total(n, k + 1, 4e8, 1e9) > total(n, k, 4e8, 1e9));
    }

    #[test]
    fn normalized_coefficients_scale_out_bandwidth(b in 1e6f64..1e11, k in 1.0f64..64.0) {
        let hw = HardwareProfile::default();
        let proto = ProtocolConfig { bandwidth: b, ..ProtocolConfig::default() };
        let full = coefficients(CoefficientScheme::XlMimo, &proto, &hw);
        let unit = coefficients(CoefficientScheme::BandwidthNormalized, &proto, &hw);
        for i in 1..3 {
            prop_assert!((full.antenna[i] - unit.antenna[i] * b).abs() <= 1e-12 * full.antenna[i]);
        }
        // constant circuit power only appears in the absolute scheme
        prop_assert!(full.per_antenna(k) > unit.per_antenna(k) * b);
        prop_assert!((full.radiated - unit.radiated * b).abs() <= 1e-12 * full.radiated);
        prop_assert!((full.user_cubic - unit.user_cubic * b).abs() <= 1e-12 * full.user_cubic);
        prop_assert_eq!(unit.fixed, 0.0);
    }
}
