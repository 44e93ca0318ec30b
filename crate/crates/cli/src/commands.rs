use mcmc_certify::bounds::{
    combine_mse_bound, confidence_plan, geo_bounds, geo_complementary, optimize_small_set, poly_bounds,
    poly_fill_all, BoundComponents, ConfidencePlan, MomentInputs, DEFAULT_CEILING,
};
use mcmc_certify::models::{
    contracting_exact_plan, ContractingNormals, ContractingNormalsParams, HierT, HierTParams,
    MomentPolicy, PumpModel, StartLaw, ToyPoly,
};
use mcmc_certify::regen::{
    estimate_constants, estimate_rmse, simulate_split, write_trajectory_csv, EstimationConfig,
    SplitChainModel, TourConfig,
};
use mcmc_certify::tables;
use serde_json::{json, Value};

use crate::config::{ConfidenceSpec, Format, ModelSpec, Objective, RunConfig, Task};
use crate::render::{csv, est, sig, text_table, thousands, TABLE_DIGITS};
use crate::CliError;

pub fn dispatch(task: Task, cfg: &RunConfig, seed: u64, format: Format) -> Result<String, CliError> {
    match task {
        Task::Bound => bound(cfg, format),
        Task::Confidence => confidence(cfg, format),
        Task::Simulate => simulate(cfg, seed, format),
        Task::Constants => constants(cfg, seed, format),
        Task::Sweep => sweep(cfg, format),
        Task::Table => table(cfg, seed, format),
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// JSON has no infinities; they become `null`.
fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:w$}  {v}\n")).collect()
}

struct BoundReport {
    components: BoundComponents,
    drift: Value,
    policy: Option<MomentPolicy>,
    warnings: Vec<String>,
}

fn default_policy(spec: &ModelSpec) -> Option<MomentPolicy> {
    match spec {
        ModelSpec::HierT(_) | ModelSpec::ContractingNormals(_) | ModelSpec::ToyPoly(_) => {
            Some(MomentPolicy::KnownPiV)
        }
        _ => None,
    }
}

fn bound_report(cfg: &RunConfig) -> Result<BoundReport, CliError> {
    let spec = cfg.model()?;
    let policy = cfg.policy.or_else(|| default_policy(spec));
    let c0v = cfg.c0_variant.unwrap_or_default();
    let need_policy = || policy.ok_or_else(|| CliError::Config("`policy` is required".into()));
    if cfg.moments.is_some() && !matches!(spec, ModelSpec::Geometric(_) | ModelSpec::Polynomial(_)) {
        return Err(CliError::Config(
            "`moments` applies only to `geometric` and `polynomial` models".into(),
        ));
    }
    Ok(match spec {
        ModelSpec::HierT(p) => {
            let m = HierT::new(*p)?;
            let d = m.drift_params();
            BoundReport {
                components: m.bound_components(need_policy()?, c0v)?,
                warnings: d.warnings(),
                drift: json!(d),
                policy,
            }
        }
        ModelSpec::ContractingNormals(p) => {
            let m = ContractingNormals::new(*p)?;
            BoundReport {
                components: m.bound_components(need_policy()?, c0v)?,
                warnings: m.drift.warnings(),
                drift: json!(m.drift),
                policy,
            }
        }
        ModelSpec::ToyPoly(p) => {
            let m = ToyPoly::new(*p)?;
            BoundReport {
                components: m.bound_components(need_policy()?)?,
                warnings: m.drift.warnings(),
                drift: json!(m.drift),
                policy,
            }
        }
        ModelSpec::Pump(_) => {
            if let Some(MomentPolicy::KnownPiV) = cfg.policy {
                return Err(CliError::Config(
                    "the pump chain has no known pi(V); use a drift-only policy".into(),
                ));
            }
            let d = mcmc_certify::models::pump::reference_drift_constants();
            BoundReport {
                components: PumpModel::bound_components()?,
                warnings: d.warnings(),
                drift: json!(d),
                policy: None,
            }
        }
        ModelSpec::Geometric(p) => {
            p.validate()?;
            let partial = cfg.moments.clone().unwrap_or_else(MomentInputs::new);
            let src = match policy {
                Some(MomentPolicy::DriftOnly(s)) => s,
                Some(MomentPolicy::KnownPiV) if partial.pi_v.is_none() => {
                    return Err(CliError::Config(
                        "policy `known_pi_v` needs `moments.pi_V`".into(),
                    ))
                }
                _ => Default::default(),
            };
            let m = geo_complementary(p, &partial, src)?;
            BoundReport {
                components: geo_bounds(p, &m, c0v)?,
                warnings: p.warnings(),
                drift: json!({ "params": p, "moments": m }),
                policy,
            }
        }
        ModelSpec::Polynomial(p) => {
            let partial = cfg.moments.clone().unwrap_or_else(MomentInputs::new);
            let m = poly_fill_all(p, &partial)?;
            BoundReport {
                components: poly_bounds(p, &m)?,
                warnings: p.warnings(),
                drift: json!({ "params": p, "moments": m }),
                policy,
            }
        }
    })
}

fn plan_from(comp: &BoundComponents, c: &ConfidenceSpec) -> Result<ConfidencePlan, CliError> {
    Ok(confidence_plan(
        |n| combine_mse_bound(comp, n).unwrap_or(f64::INFINITY),
        c.epsilon,
        c.alpha,
        c.ceiling.unwrap_or(DEFAULT_CEILING),
    )?)
}

fn bound(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let r = bound_report(cfg)?;
    let c = &r.components;
    let rmse: Vec<(u64, f64)> = cfg
        .n
        .iter()
        .map(|&n| Ok((n, combine_mse_bound(c, n)?)))
        .collect::<Result<_, mcmc_certify::Error>>()?;
    let plan = cfg.confidence.as_ref().map(|s| plan_from(c, s)).transpose()?;
    Ok(match format {
        Format::Json => to_json(&json!({
            "model": cfg.model()?.name(),
            "inputs": r.drift,
            "policy": r.policy,
            "provenance": c.provenance,
            "components": c,
            "sigma_as": c.sigma_as(),
            "rmse_bounds": rmse.iter().map(|&(n, b)| json!({"n": n, "rmse_bound": b})).collect::<Vec<_>>(),
            "confidence": plan,
            "warnings": r.warnings,
        })),
        Format::Csv => {
            let mut rows = vec![
                vec!["sigma_as".into(), c.sigma_as().to_string()],
                vec!["c0".into(), c.c0.to_string()],
                vec!["c1".into(), c.c1.to_string()],
                vec!["c2".into(), c.c2.to_string()],
            ];
            for (n, b) in &rmse {
                rows.push(vec![format!("rmse_bound_n{n}"), b.to_string()]);
            }
            if let Some(p) = &plan {
                rows.push(vec!["n_min".into(), p.n_min.to_string()]);
            }
            csv(&["quantity", "value"], &rows)
        }
        Format::Text => {
            let mut kv = vec![
                ("provenance", format!("{:?}", c.provenance)),
                ("sigma_as", sig(c.sigma_as(), TABLE_DIGITS)),
                ("C0", sig(c.c0, TABLE_DIGITS)),
                ("C1", sig(c.c1, TABLE_DIGITS)),
                ("C2", sig(c.c2, TABLE_DIGITS)),
            ];
            let labels: Vec<String> = rmse.iter().map(|(n, _)| format!("rmse bound, n = {n}")).collect();
            for ((_, b), l) in rmse.iter().zip(&labels) {
                kv.push((l.as_str(), sig(*b, TABLE_DIGITS)));
            }
            if let Some(p) = &plan {
                kv.push(("n_min", thousands(p.n_min)));
            }
            let mut s = key_values(&kv);
            for w in &r.warnings {
                s.push_str(&format!("warning: {w}\n"));
            }
            s
        }
    })
}

fn confidence(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let spec = cfg
        .confidence
        .as_ref()
        .ok_or_else(|| CliError::Config("`confidence` block is required".into()))?;
    let r = bound_report(cfg)?;
    let plan = plan_from(&r.components, spec)?;
    // the exact law of the average is available for the Gaussian chain
    let exact = match cfg.model()? {
        ModelSpec::ContractingNormals(p) => {
            let start = match cfg.x0 {
                Some(x) => StartLaw::Point(x),
                None => StartLaw::Stationary,
            };
            Some(contracting_exact_plan(p.c, start, spec.epsilon, spec.alpha)?)
        }
        _ => None,
    };
    Ok(match format {
        Format::Json => to_json(&json!({
            "model": cfg.model()?.name(),
            "epsilon": spec.epsilon,
            "alpha": spec.alpha,
            "policy": r.policy,
            "components": r.components,
            "n_min_bound": plan.n_min,
            "n_min_exact": exact,
        })),
        Format::Csv => {
            let mut rows = vec![vec!["bound".to_string(), plan.n_min.to_string()]];
            if let Some(e) = exact {
                rows.push(vec!["exact".into(), e.to_string()]);
            }
            csv(&["method", "n_min"], &rows)
        }
        Format::Text => {
            let mut kv = vec![("n_min (bound)", thousands(plan.n_min))];
            if let Some(e) = exact {
                kv.push(("n_min (exact)", thousands(e)));
            }
            key_values(&kv)
        }
    })
}

/// Runs `$body` with `$m` bound to a simulable model and `$x0` to its start.
macro_rules! with_chain {
    ($cfg:expr, |$m:ident, $x0:ident| $body:expr) => {{
        let cfg: &RunConfig = $cfg;
        match cfg.model()? {
            ModelSpec::HierT(p) => {
                let $m = HierT::new(*p)?;
                let $x0 = cfg.x0.unwrap_or(0.0);
                $body
            }
            ModelSpec::ContractingNormals(p) => {
                let $m = ContractingNormals::new(*p)?;
                let $x0 = cfg.x0.unwrap_or(0.0);
                $body
            }
            ModelSpec::ToyPoly(p) => {
                let $m = ToyPoly::new(*p)?;
                let $x0 = cfg.x0.unwrap_or(1.0);
                $body
            }
            ModelSpec::Pump(p) => {
                if cfg.x0.is_some() {
                    return Err(CliError::Config("`x0` is not supported for the pump chain".into()));
                }
                let data = mcmc_certify::models::load_pump_data(&mcmc_certify::models::pump_data_path())?;
                let $m = PumpModel::new(data, p.hyper, p.component)?;
                let $x0 = $m.default_start();
                $body
            }
            ModelSpec::Geometric(_) | ModelSpec::Polynomial(_) => {
                return Err(CliError::Config(
                    "drift-constant models cannot be simulated; pick a concrete chain".into(),
                ))
            }
        }
    }};
}

fn single_n(cfg: &RunConfig) -> Result<u64, CliError> {
    match cfg.n.as_slice() {
        [n] if *n > 0 => Ok(*n),
        _ => Err(CliError::Config("`n` must hold exactly one positive length".into())),
    }
}

fn simulate(cfg: &RunConfig, seed: u64, format: Format) -> Result<String, CliError> {
    let n = single_n(cfg)?;
    with_chain!(cfg, |m, x0| {
        let rec = simulate_split(&m, n, x0, seed)?;
        Ok(match format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_trajectory_csv(&m, &rec, &mut buf).map_err(|e| CliError::Runtime(e.to_string()))?;
                String::from_utf8(buf).expect("ascii csv")
            }
            Format::Json => to_json(&json!({
                "model": m.name(),
                "n": n,
                "seed": seed,
                "length": rec.states.len(),
                "regen_epochs": rec.regen_epochs,
                "r_of_n": rec.r_of_n,
                "overshoot": rec.overshoot(),
                "theta": rec.theta,
                "theta_is_plug_in": rec.theta_is_plug_in,
                "first_block": rec.first_block,
                "blocks": rec.blocks,
            })),
            Format::Text => key_values(&[
                ("model", m.name().to_string()),
                ("n", n.to_string()),
                ("simulated to", rec.states.len().to_string()),
                ("regenerations", rec.regen_epochs.len().to_string()),
                ("R(n)", rec.r_of_n.to_string()),
                ("overshoot", rec.overshoot().to_string()),
            ]),
        })
    })
}

fn estimation_config(cfg: &RunConfig) -> EstimationConfig {
    let d = EstimationConfig::default();
    EstimationConfig {
        tours: TourConfig {
            chains: cfg.chains.unwrap_or(d.tours.chains),
            tours: cfg.tours.unwrap_or(d.tours.tours),
            ..d.tours
        },
        replicates: cfg.replicates.unwrap_or(d.replicates),
        n_for_c2: cfg.n_for_c2.unwrap_or(d.n_for_c2),
        ..d
    }
}

fn constants(cfg: &RunConfig, seed: u64, format: Format) -> Result<String, CliError> {
    let ec = estimation_config(cfg);
    with_chain!(cfg, |m, x0| {
        let c = estimate_constants(&m, &x0, &ec, seed)?;
        let rmse = cfg
            .n
            .iter()
            .map(|&n| Ok((n, estimate_rmse(&m, n, ec.replicates, &x0, seed, Some(c.theta))?)))
            .collect::<Result<Vec<_>, mcmc_certify::Error>>()?;
        for w in &c.warnings {
            eprintln!("warning: {w}");
        }
        Ok(match format {
            Format::Json => to_json(&json!({
                "model": m.name(),
                "seed": seed,
                "constants": c,
                "sigma_as": c.sigma_as(),
                "rmse": rmse.iter().map(|(n, e)| json!({"n": n, "rmse": e})).collect::<Vec<_>>(),
            })),
            Format::Csv => {
                let mut rows = vec![
                    vec!["sigma_as_sq".into(), c.sigma_as_sq_hat.to_string(), c.se_sigma_as_sq.to_string()],
                    vec!["c0".into(), c.c0_hat.to_string(), c.se_c0.to_string()],
                    vec!["c1".into(), c.c1_hat.to_string(), c.se_c1.to_string()],
                    vec!["c2".into(), c.c2_hat.to_string(), c.se_c2.to_string()],
                ];
                for (n, e) in &rmse {
                    rows.push(vec![format!("rmse_n{n}"), e.value.to_string(), e.stderr.to_string()]);
                }
                csv(&["quantity", "estimate", "stderr"], &rows)
            }
            Format::Text => {
                let e = |v, s| est(&mcmc_certify::regen::Estimate { value: v, stderr: s });
                let mut kv = vec![
                    ("sigma_as", est(&c.sigma_as())),
                    ("C0", e(c.c0_hat, c.se_c0)),
                    ("C1", e(c.c1_hat, c.se_c1)),
                    ("C2", e(c.c2_hat, c.se_c2)),
                ];
                let labels: Vec<String> = rmse.iter().map(|(n, _)| format!("rmse, n = {n}")).collect();
                for ((_, r), l) in rmse.iter().zip(&labels) {
                    kv.push((l.as_str(), est(r)));
                }
                key_values(&kv)
            }
        })
    })
}

fn sweep(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("`sweep` block is required".into()))?;
    if !(s.lo <= s.hi) || s.points == 0 || !s.lo.is_finite() || !s.hi.is_finite() {
        return Err(CliError::Config(format!(
            "empty sweep range [{}, {}] with {} points",
            s.lo, s.hi, s.points
        )));
    }
    let conf = cfg.confidence.unwrap_or(ConfidenceSpec {
        epsilon: 0.1,
        alpha: 0.1,
        ceiling: None,
    });
    let c0v = cfg.c0_variant.unwrap_or_default();
    let drift_only = match cfg.policy {
        Some(MomentPolicy::DriftOnly(src)) => MomentPolicy::DriftOnly(src),
        _ => tables::TABLE_DRIFT_ONLY,
    };
    let policy = match s.objective {
        Objective::SigmaBoundKnownPiV | Objective::NMinKnownPiV => MomentPolicy::KnownPiV,
        _ => drift_only,
    };
    let wants_plan = matches!(s.objective, Objective::NMinKnownPiV | Objective::NMinDriftOnly);
    let objective = |comp: mcmc_certify::Result<BoundComponents>| -> f64 {
        match comp {
            Ok(c) if wants_plan => plan_from(&c, &conf).map(|p| p.n_min as f64).unwrap_or(f64::INFINITY),
            Ok(c) => c.sigma_as(),
            Err(_) => f64::INFINITY,
        }
    };
    let f: Box<dyn Fn(f64) -> f64> = match (cfg.model()?, s.param.as_str()) {
        (ModelSpec::HierT(p), "a") => {
            let t = p.t;
            Box::new(move |a| {
                objective(HierT::new(HierTParams { t, a }).and_then(|m| m.bound_components(policy, c0v)))
            })
        }
        (ModelSpec::ContractingNormals(p), "d") => {
            let c = p.c;
            Box::new(move |d| {
                objective(
                    ContractingNormals::new(ContractingNormalsParams { c, d })
                        .and_then(|m| m.bound_components(policy, c0v)),
                )
            })
        }
        (m, p) => {
            return Err(CliError::Config(format!(
                "model `{}` has no sweepable parameter `{p}` (hier_t: a, contracting_normals: d)",
                m.name()
            )))
        }
    };
    let xs: Vec<f64> = if s.points == 1 || s.lo == s.hi {
        vec![s.lo]
    } else {
        (0..s.points)
            .map(|i| s.lo + (s.hi - s.lo) * i as f64 / (s.points - 1) as f64)
            .collect()
    };
    let rows: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f(x))).collect();
    let minimum = if xs.len() == 1 {
        rows[0]
    } else {
        optimize_small_set(&f, s.lo, s.hi, s.points.max(50))?
    };
    eprintln!("minimum: {}={} value={}", s.param, minimum.0, minimum.1);
    Ok(match format {
        Format::Csv | Format::Text => {
            let body: Vec<Vec<String>> = rows.iter().map(|(x, y)| vec![x.to_string(), y.to_string()]).collect();
            let header = [s.param.as_str(), "objective"];
            if format == Format::Csv {
                csv(&header, &body)
            } else {
                let mut t = text_table(&header, &body);
                t.push_str(&format!("minimum at {} = {}: {}\n", s.param, sig(minimum.0, 5), sig(minimum.1, TABLE_DIGITS)));
                t
            }
        }
        Format::Json => to_json(&json!({
            "param": s.param,
            "objective": format!("{:?}", s.objective),
            "rows": rows.iter().map(|&(x, y)| json!([x, finite_or_null(y)])).collect::<Vec<_>>(),
            "minimum": {"at": minimum.0, "value": finite_or_null(minimum.1)},
        })),
    })
}

fn table(cfg: &RunConfig, seed: u64, format: Format) -> Result<String, CliError> {
    let which = cfg
        .table
        .ok_or_else(|| CliError::Config("`table` (1 to 4) is required".into()))?;
    match which {
        1 => table1(format),
        2 | 3 => table23(which, cfg, seed, format),
        4 => table4(format),
        w => Err(CliError::Config(format!("no table {w}; choose 1 to 4"))),
    }
}

fn render_rows(format: Format, header: &[&str], rows: &[Vec<String>], json: Value) -> String {
    match format {
        Format::Text => text_table(header, rows),
        Format::Csv => csv(header, rows),
        Format::Json => to_json(&json),
    }
}

fn table1(format: Format) -> Result<String, CliError> {
    let rows = tables::table1()?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let s = |x| if format == Format::Csv { format!("{x}") } else { sig(x, TABLE_DIGITS) };
            vec![r.t.to_string(), s(r.sigma_as), s(r.bound_known), s(r.bound_drift)]
        })
        .collect();
    Ok(render_rows(
        format,
        &["t", "sigma_as", "bound (known pi V)", "bound (lambda, K, beta)"],
        &cells,
        json!(rows),
    ))
}

fn table23(which: u8, cfg: &RunConfig, seed: u64, format: Format) -> Result<String, CliError> {
    let ec = estimation_config(cfg);
    let t2 = tables::table2(Some(&ec), seed)?;
    let emp = t2.empirical.as_ref().expect("simulated column requested");
    let raw = format == Format::Csv;
    let s = |x: f64| if raw { format!("{x}") } else { sig(x, TABLE_DIGITS) };
    if which == 2 {
        let e = |v, se| {
            if raw {
                format!("{v},{se}")
            } else {
                est(&mcmc_certify::regen::Estimate { value: v, stderr: se })
            }
        };
        let dash = || if raw { String::new() } else { "--".to_string() };
        let cells = vec![
            vec!["C0".into(), e(emp.c0_hat, emp.se_c0), s(t2.known.c0), s(t2.drift.c0)],
            vec!["C1".into(), e(emp.c1_hat, emp.se_c1), dash(), s(t2.drift.c1)],
            vec!["C2".into(), e(emp.c2_hat, emp.se_c2), dash(), s(t2.drift.c2)],
        ];
        let header: &[&str] = if raw {
            &["constant", "actual", "actual_stderr", "bound_known_pi_v", "bound_drift_only"]
        } else {
            &["constant", "actual", "bound (known pi V)", "bound (lambda, K, beta)"]
        };
        let mut out = render_rows(format, header, &cells, json!(t2));
        if format == Format::Text {
            out.push_str(&format!("a = {}\n", sig(t2.a, 5)));
        }
        return Ok(out);
    }
    let reps = cfg.replicates.unwrap_or(10_000);
    let rows = tables::table3(&t2, Some(reps), seed)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let sim = r.simulated.expect("simulated column requested");
            let sim = if raw { format!("{},{}", sim.value, sim.stderr) } else { est(&sim) };
            vec![
                r.n.to_string(),
                s(r.exact),
                sim,
                s(r.col_a.expect("column (a) requested")),
                s(r.col_b),
                s(r.col_c),
            ]
        })
        .collect();
    let header: &[&str] = if raw {
        &["n", "sqrt_n_rmse_exact", "sqrt_n_rmse_sim", "sqrt_n_rmse_sim_stderr", "a", "b", "c"]
    } else {
        &["n", "sqrt(n) RMSE exact", "sqrt(n) RMSE simulated", "(a)", "(b)", "(c)"]
    };
    Ok(render_rows(format, header, &cells, json!({ "table2": t2, "rows": rows })))
}

fn table4(format: Format) -> Result<String, CliError> {
    let t = tables::table4()?;
    let n = |x: u64| if format == Format::Csv { x.to_string() } else { thousands(x) };
    let cells = vec![vec![n(t.drift_only), n(t.known_pi_v), n(t.reality), n(t.reality_from_zero)]];
    let header: &[&str] = if format == Format::Csv {
        &["bound_drift_only", "bound_known_pi_v", "exact_stationary_start", "exact_from_zero"]
    } else {
        &["bound (lambda, K, beta)", "bound (known pi V)", "exact", "exact from x0 = 0"]
    };
    Ok(render_rows(format, header, &cells, json!(t)))
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::HierT(_) => "hier_t",
            ModelSpec::ContractingNormals(_) => "contracting_normals",
            ModelSpec::Pump(_) => "pump",
            ModelSpec::ToyPoly(_) => "toy_poly",
            ModelSpec::Geometric(_) => "geometric",
            ModelSpec::Polynomial(_) => "polynomial",
        }
    }
}
