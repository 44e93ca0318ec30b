use mcmc_certify::models::{ContractingNormals, ContractingNormalsParams, HierT, HierTParams};
use mcmc_certify::numerics::{normal_pdf, RngStream};
use mcmc_certify::regen::*;
use mcmc_certify::Error;
use rand_distr::{Distribution, StandardNormal};

/// i.i.d. N(0, 1) draws with J the whole line and beta = 1.
struct Iid {
    constant_f: bool,
}

impl SplitChainModel for Iid {
    type State = f64;
    fn name(&self) -> &'static str {
        "iid"
    }
    fn step(&self, _x: &f64, rng: &mut RngStream) -> f64 {
        StandardNormal.sample(rng)
    }
    fn in_small_set(&self, _x: &f64) -> bool {
        true
    }
    fn beta(&self) -> f64 {
        1.0
    }
    fn transition_density(&self, _x: &f64, y: &f64) -> Option<f64> {
        Some(normal_pdf(*y))
    }
    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(normal_pdf(*y))
    }
    fn drift_v(&self, x: &f64) -> f64 {
        1.0 + x * x
    }
    fn f(&self, x: &f64) -> f64 {
        if self.constant_f {
            2.0
        } else {
            *x
        }
    }
    fn theta(&self) -> Option<f64> {
        Some(if self.constant_f { 2.0 } else { 0.0 })
    }
    fn projection(&self, x: &f64) -> f64 {
        *x
    }
    fn default_start(&self) -> f64 {
        0.0
    }
}

/// Claims a minorization constant the kernel cannot support.
struct Overclaimed;

impl SplitChainModel for Overclaimed {
    type State = f64;
    fn name(&self) -> &'static str {
        "overclaimed"
    }
    fn step(&self, x: &f64, rng: &mut RngStream) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        0.9 * x + z
    }
    fn in_small_set(&self, x: &f64) -> bool {
        x.abs() <= 5.0
    }
    fn beta(&self) -> f64 {
        0.9
    }
    fn transition_density(&self, x: &f64, y: &f64) -> Option<f64> {
        Some(normal_pdf(y - 0.9 * x))
    }
    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(normal_pdf(*y))
    }
    fn drift_v(&self, x: &f64) -> f64 {
        1.0 + x * x
    }
    fn f(&self, x: &f64) -> f64 {
        *x
    }
    fn projection(&self, x: &f64) -> f64 {
        *x
    }
    fn default_start(&self) -> f64 {
        4.0
    }
}

fn small_cfg(tours: usize) -> TourConfig {
    TourConfig {
        chains: 8,
        tours,
        burn_in_fraction: 0.1,
    }
}

#[test]
fn always_regenerating_chain() {
    let m = Iid { constant_f: false };
    let rec = simulate_split(&m, 50, 0.0, 1).unwrap();
    assert!(rec.bells.iter().all(|&b| b));
    assert_eq!(rec.regen_epochs, (1..=51).collect::<Vec<u64>>());
    assert!(rec.blocks.iter().all(|b| b.len == 1));
    assert_eq!(rec.overshoot(), 1);
    let sample = collect_tours(&m, &0.0, &small_cfg(2000), 3).unwrap();
    assert!(sample.tours().all(|t| t.len == 1));
    let c0 = estimate_c0(&sample);
    assert_eq!(c0.value, 0.5);
    assert_eq!(c0.stderr, 0.0);
}

#[test]
fn centred_constant_gives_zero_constants() {
    let m = Iid { constant_f: true };
    let sample = collect_tours(&m, &0.0, &small_cfg(2000), 3).unwrap();
    let s = estimate_sigma_as(&sample, Some(2.0), 1000).unwrap();
    assert_eq!(s.sigma_as_sq.value, 0.0);
    let ft = estimate_c1_c2(&m, &0.0, 2.0, 20, 100, 4).unwrap();
    assert_eq!((ft.c1.value, ft.c2.value), (0.0, 0.0));
    let rmse = estimate_rmse(&m, 10, 50, &0.0, 5, None).unwrap();
    assert_eq!(rmse.value, 0.0);
}

#[test]
fn too_few_blocks() {
    let m = Iid { constant_f: false };
    let sample = collect_tours(&m, &0.0, &small_cfg(100), 3).unwrap();
    assert!(matches!(
        estimate_sigma_as(&sample, Some(0.0), 1000),
        Err(Error::InsufficientData { have: 100, need: 1000 })
    ));
}

#[test]
fn violated_minorization_is_reported() {
    let err = simulate_split(&Overclaimed, 10_000, 4.0, 9).unwrap_err();
    assert!(matches!(err, Error::MinorizationViolated { ratio, .. } if ratio > 1.0));
}

#[test]
fn record_structure() {
    let m = HierT::new(HierTParams { t: 50, a: 4.3 }).unwrap();
    let rec = simulate_split(&m, 500, 0.0, 11).unwrap();
    let n_states = rec.states.len() as u64;
    assert_eq!(*rec.regen_epochs.last().unwrap(), n_states);
    assert!(rec.regen_epochs[rec.r_of_n - 1] > 500);
    assert!(rec.r_of_n == 1 || rec.regen_epochs[rec.r_of_n - 2] <= 500);
    for (i, &b) in rec.bells.iter().enumerate() {
        assert_eq!(b, rec.regen_epochs.contains(&(i as u64 + 1)));
    }
    assert_eq!(rec.first_block.end, rec.regen_epochs[0]);
    let mut at = rec.regen_epochs[0];
    for b in &rec.blocks {
        assert_eq!(b.start, at);
        assert_eq!(b.len, b.end - b.start);
        at = b.end;
    }
    assert_eq!(at, n_states);
    let ids = rec.block_ids();
    assert_eq!(ids[0], 0);
    assert_eq!(ids[rec.regen_epochs[0] as usize], 1);
}

#[test]
fn trajectory_csv_layout() {
    let m = HierT::new(HierTParams { t: 50, a: 4.3 }).unwrap();
    let mut buf = Vec::new();
    let rec = simulate_split(&m, 20, 0.0, 2).unwrap();
    write_trajectory_csv(&m, &rec, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("index,state,bell,block_id\n"));
    assert_eq!(text.lines().count(), rec.states.len() + 1);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let m = ContractingNormals::new(ContractingNormalsParams { c: 0.5, d: 1.7875 }).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let s = collect_tours(&m, &0.0, &small_cfg(5000), 42).unwrap();
                let ft = estimate_c1_c2(&m, &0.0, 0.0, 50, 500, 42).unwrap();
                let r = estimate_rmse(&m, 100, 200, &0.0, 42, None).unwrap();
                (s.per_chain, ft, r)
            })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
}

#[test]
fn hier_t_sigma_matches_closed_form() {
    for t in [5u32, 50, 500] {
        let a = if t == 5 { 2.0 } else { 4.3 };
        let m = HierT::new(HierTParams { t, a }).unwrap();
        let cfg = TourConfig {
            chains: 16,
            tours: 200_000,
            burn_in_fraction: 0.1,
        };
        let s = collect_tours(&m, &0.0, &cfg, 100 + t as u64).unwrap();
        let est = estimate_sigma_as(&s, Some(0.0), 1000).unwrap().sigma_as_sq;
        let want = t as f64 / (t as f64 - 3.0);
        assert!(est.within(want, 3.0), "t = {t}: {} +- {} vs {want}", est.value, est.stderr);
    }
}

#[test]
fn hier_t_rmse_matches_exact() {
    let m = HierT::new(HierTParams { t: 50, a: 4.3 }).unwrap();
    for n in [10u64, 100, 1000] {
        let r = estimate_rmse(&m, n, 10_000, &0.0, 77, None).unwrap();
        let want = mcmc_certify::models::hier_t_exact_mse(50, n, 0.0).unwrap().sqrt();
        assert!(r.within(want, 3.0), "n = {n}: {} +- {} vs {want}", r.value, r.stderr);
    }
}
