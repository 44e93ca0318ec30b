use mcmc_certify::models::*;
use mcmc_certify::numerics::RngStream;
use mcmc_certify::regen::*;

// tests/data/pump_reference.py: 64 chains x 1e5 scans, batch means
const PUMP_SUM_PHI_MEAN: f64 = 6.493528;
const PUMP_SUM_PHI_SE: f64 = 0.000687;

#[test]
fn pump_long_run_mean_of_total_rate() {
    let m = PumpModel::from_bundled(0).unwrap();
    let chains = 16u64;
    let (burn, steps, batches) = (1_000usize, 40_000usize, 20usize);
    let per_batch: Vec<f64> = (0..chains)
        .flat_map(|c| {
            let mut rng = RngStream::new(8, streams::SANITY + c);
            let mut x = m.default_start();
            for _ in 0..burn {
                x = m.step(&x, &mut rng);
            }
            let mut out = Vec::new();
            for _ in 0..batches {
                let mut s = 0.0;
                for _ in 0..steps / batches {
                    x = m.step(&x, &mut rng);
                    s += x.phi.iter().sum::<f64>();
                }
                out.push(s / (steps / batches) as f64);
            }
            out
        })
        .collect();
    let k = per_batch.len() as f64;
    let mean = per_batch.iter().sum::<f64>() / k;
    let se = (per_batch.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt();
    let tol = 4.0 * (se * se + PUMP_SUM_PHI_SE * PUMP_SUM_PHI_SE).sqrt();
    assert!((mean - PUMP_SUM_PHI_MEAN).abs() < tol, "{mean} +- {se}");
}

#[test]
fn pump_phi_conditionals() {
    let m = PumpModel::from_bundled(0).unwrap();
    let x = m.default_start();
    let mut rng = RngStream::new(21, 0);
    let n = 50_000;
    let draws: Vec<PumpState> = (0..n).map(|_| m.step(&x, &mut rng)).collect();
    // E(phi_i) = E[(y_i + alpha) / (t_i + r)] with r from the same draws
    for i in [0usize, 5, 9] {
        let d: Vec<f64> = draws
            .iter()
            .map(|s| s.phi[i] - (m.data.y[i] as f64 + m.hyper.alpha_h) / (m.data.t[i] + s.r))
            .collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt(), "component {i}");
    }
}

#[test]
fn pump_split_chain_runs_without_violations() {
    let m = PumpModel::from_bundled(0).unwrap();
    let s = collect_tours(
        &m,
        &m.default_start(),
        &TourConfig {
            chains: 8,
            tours: 20_000,
            burn_in_fraction: 0.1,
        },
        5,
    )
    .unwrap();
    let check = regeneration_rate_check(&s, m.beta());
    assert!(check.passes(3.0), "{check:?}");
}

#[test]
fn pump_data_override_is_honoured() {
    let dir = std::env::temp_dir().join(format!("pump-override-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("pump.csv");
    std::fs::write(&bad, "pump,y,t\n1,5,94.320\n").unwrap();
    assert!(matches!(
        load_pump_data(&bad),
        Err(mcmc_certify::Error::Data(_))
    ));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn contracting_regeneration_rate() {
    let m = ContractingNormals::new(ContractingNormalsParams { c: 0.5, d: 1.7875 }).unwrap();
    let s = collect_tours(
        &m,
        &0.0,
        &TourConfig {
            chains: 8,
            tours: 50_000,
            burn_in_fraction: 0.1,
        },
        13,
    )
    .unwrap();
    let check = regeneration_rate_check(&s, m.beta());
    assert!(check.passes(3.0), "{check:?}");
    assert!(kac_check(&s, 0.0).passes(3.0));
}

#[test]
fn hier_t_regeneration_rate() {
    let m = HierT::new(HierTParams { t: 50, a: 4.3 }).unwrap();
    let s = collect_tours(&m, &0.0, &TourConfig::default(), 14).unwrap();
    let check = regeneration_rate_check(&s, m.beta);
    assert!(check.passes(3.0), "{check:?}");
}

#[test]
fn toy_poly_kac_and_rate() {
    let m = ToyPoly::new(ToyPolyParams::default()).unwrap();
    let s = collect_tours(&m, &1.0, &TourConfig::default(), 15).unwrap();
    assert!(regeneration_rate_check(&s, m.beta()).passes(3.0));
    let k = kac_check(&s, m.theta().unwrap());
    assert!(k.passes(3.0), "{k:?}");
}
