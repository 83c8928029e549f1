mod common;

use common::{relay_fraction_oracle, rsu_fraction_oracle};
use loscov::analytic::QuadratureSettings;
use loscov::montecarlo::{
    batch_means, estimate_area_fraction, paired_gain_estimate, run_sweep, CoverageMode, SimRegion, SimulationConfig,
    SweepAxis, SweepSpec,
};
use loscov::sampling::ScenarioParams;

#[test]
fn disk_and_window_regions_agree() {
    // a 3 km disk is 20 γ from the origin at every edge
    let p = ScenarioParams::from_per_km(5.0, 4.0, 25.0, 100.0, 100.0);
    let window = paired_gain_estimate(&SimulationConfig::new(p, 20_000, 11));
    let mut disk_cfg = SimulationConfig::new(p, 20_000, 12).with_region(SimRegion::Disk);
    disk_cfg.disk_radius = 3_000.0;
    let disk = paired_gain_estimate(&disk_cfg);
    for (a, b) in [(window.rsu, disk.rsu), (window.rsu_relay, disk.rsu_relay)] {
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() < 3.0 * se, "window {} disk {} se {se}", a.mean, b.mean);
    }
}

#[test]
fn window_estimates_match_oracles() {
    let (l, m, g, e) = (3.0, 4.0, 150.0, 200.0);
    let p = ScenarioParams::from_per_km(l, m, 25.0, g, e);
    let est = paired_gain_estimate(&SimulationConfig::new(p, 50_000, 3));
    let t1 = rsu_fraction_oracle(l, m, g, e);
    let t2 = relay_fraction_oracle(l, m, g, e);
    assert!((est.rsu.mean - t1).abs() < 4.0 * est.rsu.std_error, "{} vs {t1}", est.rsu.mean);
    assert!((est.rsu_relay.mean - t2).abs() < 4.0 * est.rsu_relay.std_error, "{} vs {t2}", est.rsu_relay.mean);
}

/// Sample standard deviation of batch means over the binomial standard error
/// of one batch.
fn batch_sd_ratio(p: ScenarioParams, n_batches: u64, batch: u64, seed: u64) -> f64 {
    let means = batch_means(&SimulationConfig::new(p, n_batches * batch, seed), CoverageMode::RsuOnly, n_batches);
    let k = means.len() as f64;
    let avg = means.iter().sum::<f64>() / k;
    let sd = (means.iter().map(|m| (m - avg).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let reported = estimate_area_fraction(&SimulationConfig::new(p, batch, seed), CoverageMode::RsuOnly).std_error;
    sd / reported
}

#[test]
fn std_error_matches_batch_spread() {
    // one 20-batch standard deviation is itself about 16% noisy, so the
    // 20-batch comparison is averaged over independent runs
    let p = ScenarioParams::from_per_km(5.0, 4.0, 25.0, 100.0, 100.0);
    let ratios: Vec<f64> = (0..25).map(|s| batch_sd_ratio(p, 20, 5_000, 1_000 + s)).collect();
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((avg - 1.0).abs() < 0.2, "{ratios:?}");
    let many = batch_sd_ratio(p, 400, 2_000, 21);
    assert!((many - 1.0).abs() < 0.1, "{many}");
}

#[test]
fn batches_partition_the_run() {
    let p = ScenarioParams::from_per_km(5.0, 4.0, 25.0, 100.0, 100.0);
    let cfg = SimulationConfig::new(p, 4_000, 8);
    let means = batch_means(&cfg, CoverageMode::RsuPlusRelay, 4);
    let whole = estimate_area_fraction(&cfg, CoverageMode::RsuPlusRelay).mean;
    assert!((means.iter().sum::<f64>() / 4.0 - whole).abs() < 1e-12);
}

fn sweep(axis: SweepAxis, values: Vec<f64>, n: u64) -> Vec<loscov::montecarlo::SweepRow> {
    let p = ScenarioParams::from_per_km(5.0, 2.0, 25.0, 100.0, 100.0);
    run_sweep(&SweepSpec {
        base: SimulationConfig::new(p, n, 100),
        axis,
        values,
        quadrature: QuadratureSettings::default(),
    })
    .unwrap()
}

#[test]
fn sweep_rows_equal_direct_calls() {
    let rows = sweep(SweepAxis::Gamma, vec![50.0, 150.0], 3_000);
    for (i, row) in rows.iter().enumerate() {
        let mut p = ScenarioParams::from_per_km(5.0, 2.0, 25.0, 100.0, 100.0);
        p.gamma = row.axis_value;
        let direct = paired_gain_estimate(&SimulationConfig::new(p, 3_000, 100 + i as u64));
        assert_eq!(row.mc, direct);
        assert_eq!(row.params, p);
    }
}

#[test]
fn gamma_sweep_is_monotone() {
    let rows = sweep(SweepAxis::Gamma, (1..=12).map(|k| 25.0 * k as f64).collect(), 200);
    for w in rows.windows(2) {
        assert!(w[1].thm1 >= w[0].thm1);
        assert!(w[1].thm2.unwrap() >= w[0].thm2.unwrap());
        assert!(w[1].gamma_err >= w[0].gamma_err);
        assert!(w[1].ratio.unwrap() <= w[0].ratio.unwrap());
    }
}

#[test]
fn wider_roads_gain_less_from_relays() {
    let mut p = ScenarioParams::from_per_km(5.0, 2.0, 25.0, 66.0, 25.0);
    p.gamma = 66.0;
    let rows = run_sweep(&SweepSpec {
        base: SimulationConfig::new(p, 200, 1),
        axis: SweepAxis::Eta,
        values: vec![25.0, 50.0, 100.0],
        quadrature: QuadratureSettings::default(),
    })
    .unwrap();
    let r: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap()).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}
