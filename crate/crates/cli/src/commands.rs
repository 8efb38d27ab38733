use crate::args::*;
use crate::error::CliError;
use crate::output::{emit, Cell, Table};
use crate::spec::{parse_grid, parse_prior, resolve, Problems, Resolved};
use freqfdr::analysis::{default_tau_grid, empirical_spiky_check, n_alpha_grid, spiky_limits, statistic_gap, HonestyQuery, RateMethod};
use freqfdr::exact::exact_rates_for;
use freqfdr::expansions::{coefficients_for, exp_family_coefficients, median_coefficients, rate_series, CoefficientSet};
use freqfdr::models::{ModelRef, NormalLocation, NormalMean, Parity, Statistic, TestSetup};
use freqfdr::mtsim::{simulate, SimConfig};
use freqfdr::numkernel::QuadratureConfig;
use freqfdr::priors::{lambda_alt, Prior};
use rayon::prelude::*;
use std::sync::Arc;

fn finish(problems: Problems) -> Result<(), CliError> {
    if problems.0.is_empty() {
        Ok(())
    } else {
        Err(CliError::config(problems.0))
    }
}

fn setup_workers(workers: usize) {
    if workers > 0 {
        // only fails if a global pool already exists, which is harmless here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

fn statistic_name(s: Statistic) -> &'static str {
    match s {
        Statistic::MeanUmp => "mean",
        Statistic::Median => "median",
    }
}

const COEFF_COLUMNS: &[&str] = &[
    "statistic", "theta0", "alpha", "parity", "lambda_alt", "a1", "a2", "a3", "at1", "at2", "at3", "c1", "c2", "c3", "d1",
    "d2", "d3",
];

fn coeff_row(r: &Resolved, alpha: f64, c: &CoefficientSet) -> Vec<Cell> {
    let parity = match c.parity {
        Some(Parity::Even) => Cell::from("even"),
        Some(Parity::Odd) => Cell::from("odd"),
        None => Cell::Empty,
    };
    let mut row = vec![statistic_name(r.statistic()).into(), r.theta0.into(), alpha.into(), parity, c.lambda_alt.into()];
    for v in [c.a, c.a_tilde, c.c, c.d] {
        row.extend(v.iter().map(|&x| Cell::from(x)));
    }
    row
}

fn coeff_table(command: &'static str, r: &Resolved, alphas: &[f64], n: u64) -> Result<Table, CliError> {
    let mut t = Table::new(command, COEFF_COLUMNS);
    for &a in alphas {
        let c = coefficients_for(&r.model, &r.prior, r.theta0, a, n)?;
        t.push(coeff_row(r, a, &c));
    }
    Ok(t)
}

pub fn coeffs(args: CoeffsArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    p.alphas("alpha", &args.alpha);
    p.sizes("n", &[args.n]);
    finish(p)?;
    setup_workers(args.io.workers);
    let t = coeff_table("coeffs", &r.unwrap(), &args.alpha, args.n)?;
    emit(&t, args.io.format, args.io.output.as_deref())
}

const RATE_COLUMNS: &[&str] = &[
    "alpha", "n", "delta_exact", "delta_exact_err", "eps_exact", "eps_exact_err", "delta_series", "eps_series",
    "series_clamped", "delta_gap", "eps_gap",
];

fn rate_table(
    command: &'static str,
    r: &Resolved,
    alphas: &[f64],
    ns: &[u64],
    method: MethodArg,
    order: u8,
    quad: &QuadratureConfig,
) -> Result<Table, CliError> {
    let points: Vec<(f64, u64)> = alphas.iter().flat_map(|&a| ns.iter().map(move |&n| (a, n))).collect();
    let rows: Result<Vec<Vec<Cell>>, CliError> = points
        .par_iter()
        .map(|&(alpha, n)| {
            let setup = TestSetup::new(r.statistic(), r.theta0, alpha, n).map_err(|e| CliError::config(vec![e.to_string()]))?;
            let exact = match method {
                MethodArg::Series => None,
                _ => Some(exact_rates_for(&r.model, &r.prior, &setup, quad)?),
            };
            let series = match method {
                MethodArg::Exact => None,
                _ => Some(rate_series(&coefficients_for(&r.model, &r.prior, r.theta0, alpha, n)?, n, order)?),
            };
            let gap = |f: fn(&freqfdr::expansions::RatePair) -> f64| match (&exact, &series) {
                (Some(e), Some(s)) => Cell::from(f(s) - f(e)),
                _ => Cell::Empty,
            };
            Ok(vec![
                alpha.into(),
                n.into(),
                exact.map(|e| e.delta.value).into(),
                exact.and_then(|e| e.delta.error).into(),
                exact.map(|e| e.epsilon.value).into(),
                exact.and_then(|e| e.epsilon.error).into(),
                series.map(|s| s.delta.value).into(),
                series.map(|s| s.epsilon.value).into(),
                series.map(|s| s.delta.clamped || s.epsilon.clamped).into(),
                gap(|p| p.delta.value),
                gap(|p| p.epsilon.value),
            ])
        })
        .collect();
    let mut t = Table::new(command, RATE_COLUMNS);
    rows?.into_iter().for_each(|row| t.push(row));
    Ok(t)
}

pub fn rates(args: RatesArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    p.alphas("alpha", &args.alpha);
    p.sizes("n", &args.n);
    if !(1..=3).contains(&args.order) {
        p.push(format!("order {} must be 1, 2 or 3", args.order));
    }
    let quad = p.quad(args.quad.tol);
    finish(p)?;
    setup_workers(args.io.workers);
    let t = rate_table("rates", &r.unwrap(), &args.alpha, &args.n, args.method, args.order, &quad)?;
    emit(&t, args.io.format, args.io.output.as_deref())
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    let grid = parse_grid(&args.alpha_grid).map_err(|e| p.push(e)).unwrap_or_default();
    if !grid.is_empty() {
        p.alphas("alpha-grid", &grid);
    }
    p.sizes("n", &args.n);
    if !(1..=3).contains(&args.order) {
        p.push(format!("order {} must be 1, 2 or 3", args.order));
    }
    if args.coeffs && args.n.len() > 1 {
        p.push("--coeffs takes a single n".to_string());
    }
    let quad = p.quad(args.quad.tol);
    finish(p)?;
    setup_workers(args.io.workers);
    let r = r.unwrap();
    let t = if args.coeffs {
        coeff_table("sweep", &r, &grid, args.n[0])?
    } else {
        rate_table("sweep", &r, &grid, &args.n, args.method, args.order, &quad)?
    };
    emit(&t, args.io.format, args.io.output.as_deref())
}

pub fn sim(args: SimArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    p.alphas("alpha", &[args.alpha]);
    p.sizes("n", &[args.n]);
    p.sizes("m", &args.m);
    if args.replications == 0 {
        p.push("replications must be at least 1".to_string());
    }
    let quad = p.quad(args.quad.tol);
    finish(p)?;
    let r = r.unwrap();
    let setup = TestSetup::new(r.statistic(), r.theta0, args.alpha, args.n).map_err(|e| CliError::config(vec![e.to_string()]))?;
    let base = SimConfig {
        model: r.model.clone(),
        prior: r.prior.clone(),
        setup,
        m: 1,
        seed: args.seed,
        replications: args.replications,
        workers: args.io.workers,
    };
    let t = if args.summary {
        let exact = exact_rates_for(&r.model, &r.prior, &setup, &quad)?.delta.value;
        let mut t = Table::new(
            "sim",
            &["m", "replications", "fdr_hat", "se_fdr", "delta_hat", "se_delta", "eps_hat", "delta_exact", "gap"],
        );
        for &m in &args.m {
            let res = simulate(&SimConfig { m, ..base.clone() })?;
            t.push(vec![
                m.into(),
                args.replications.into(),
                res.fdr_hat.into(),
                res.se_fdr.into(),
                res.delta_hat.into(),
                res.se_delta.into(),
                res.eps_hat.into(),
                exact.into(),
                (res.fdr_hat - exact).abs().into(),
            ]);
        }
        t
    } else {
        let mut t = Table::new("sim", &["m", "replication", "V", "S", "R", "fdr_hat", "delta_hat", "se"]);
        for &m in &args.m {
            let res = simulate(&SimConfig { m, ..base.clone() })?;
            for rec in &res.per_replication {
                let tl = rec.tally;
                t.push(vec![
                    m.into(),
                    rec.replication.into(),
                    tl.v.into(),
                    tl.s.into(),
                    tl.rejections().into(),
                    tl.fdr().into(),
                    res.delta_hat.into(),
                    tl.fdr_se().into(),
                ]);
            }
        }
        t
    };
    emit(&t, args.io.format, args.io.output.as_deref())
}

pub fn nalpha(args: NalphaArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    p.alphas("alpha", &args.alpha);
    let taus = args.tau.clone().unwrap_or_else(default_tau_grid);
    p.positive("tau", &taus);
    if args.n_max == 0 {
        p.push("n-max must be at least 1".to_string());
    }
    let quad = p.quad(args.quad.tol);
    finish(p)?;
    setup_workers(args.io.workers);
    let r = r.unwrap();
    let mut t = Table::new("nalpha", &["alpha", "tau", "n_alpha_exact", "n_alpha_series", "agree"]);
    for &alpha in &args.alpha {
        let q = HonestyQuery {
            model: r.model.clone(),
            base_prior: r.prior.clone(),
            theta0: r.theta0,
            tau: 1.0,
            alpha,
            method: RateMethod::Exact,
            n_max: args.n_max,
        };
        let exact = match args.method {
            MethodArg::Series => None,
            _ => Some(n_alpha_grid(&q, &taus, &quad)?),
        };
        let series = match args.method {
            MethodArg::Exact => None,
            _ => Some(n_alpha_grid(&HonestyQuery { method: RateMethod::Series3, ..q }, &taus, &quad)?),
        };
        for (i, &tau) in taus.iter().enumerate() {
            let e = exact.as_ref().map(|v| v[i].1);
            let s = series.as_ref().map(|v| v[i].1);
            let agree = match (e, s) {
                (Some(e), Some(s)) => Cell::from(e == s),
                _ => Cell::Empty,
            };
            t.push(vec![alpha.into(), tau.into(), e.flatten().into(), s.flatten().into(), agree]);
        }
    }
    emit(&t, args.io.format, args.io.output.as_deref())
}

pub fn spiky(args: SpikyArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let r = resolve(&args.model, &mut p);
    p.alphas("alpha", &[args.alpha]);
    p.sizes("n", &[args.n]);
    p.positive("tau", &args.tau);
    let quad = p.quad(args.quad.tol);
    finish(p)?;
    setup_workers(args.io.workers);
    let r = r.unwrap();
    let setup = TestSetup::new(r.statistic(), r.theta0, args.alpha, args.n).map_err(|e| CliError::config(vec![e.to_string()]))?;
    let natural: Prior = match &r.model {
        ModelRef::ExpFamily(m) => freqfdr::expansions::natural_prior(m.as_ref(), &r.prior),
        ModelRef::Location(_) => r.prior.clone(),
    };
    let t0 = match &r.model {
        ModelRef::ExpFamily(m) => m.orientation().to_natural(r.theta0),
        ModelRef::Location(_) => r.theta0,
    };
    // the power is continuous, so it equals α on both sides of θ0
    let lambda_null = 1.0 - lambda_alt(&natural, t0)?;
    let lim = spiky_limits(args.alpha, args.alpha, lambda_null).map_err(|e| CliError::runtime(e.to_string()))?;
    let rows = empirical_spiky_check(&r.model, &r.prior, &setup, &args.tau, &quad)?;
    let mut t = Table::new("spiky", &["tau", "delta", "epsilon", "delta_limit_tau0", "eps_limit_tau0"]);
    for row in rows {
        t.push(vec![row.tau.into(), row.delta.into(), row.epsilon.into(), lim.delta_limit_tau0.into(), lim.eps_limit_tau0.into()]);
    }
    emit(&t, args.io.format, args.io.output.as_deref())
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    let mut p = Problems::default();
    let prior = parse_prior(&args.prior).map_err(|e| p.push(e)).ok();
    p.alphas("alpha", &args.alpha);
    p.sizes("n", &args.n);
    if !args.theta0.is_finite() {
        p.push(format!("theta0 {} must be finite", args.theta0));
    }
    let quad = p.quad(args.quad.tol);
    if let Some(pr) = &prior {
        if !(pr.g(args.theta0) > 0.0) {
            p.push(format!("prior '{}' has zero density at theta0 {}", args.prior, args.theta0));
        }
    }
    finish(p)?;
    setup_workers(args.io.workers);
    let prior = prior.unwrap();
    let mean_model = ModelRef::ExpFamily(Arc::new(NormalMean));
    let median_model = ModelRef::Location(Arc::new(NormalLocation));
    let g0 = prior.g(args.theta0);
    let mut t = Table::new(
        "compare",
        &[
            "alpha", "n", "g0", "c1_mean", "c1_median", "c1_gap", "c1_gap_closed_form", "c2_mean", "c2_median", "c2_gap",
            "c2_gap_lower", "delta_exact_mean", "delta_exact_median",
        ],
    );
    for &alpha in &args.alpha {
        let mean = exp_family_coefficients(&NormalMean, &prior, args.theta0, alpha)?;
        let gap = statistic_gap(g0, alpha)?;
        for &n in &args.n {
            let med = median_coefficients(&NormalLocation, &prior, args.theta0, alpha, n)?;
            let sm = TestSetup::new(Statistic::MeanUmp, args.theta0, alpha, n).map_err(|e| CliError::config(vec![e.to_string()]))?;
            let sd = TestSetup { statistic: Statistic::Median, ..sm };
            let dm = exact_rates_for(&mean_model, &prior, &sm, &quad)?.delta.value;
            let dd = exact_rates_for(&median_model, &prior, &sd, &quad)?.delta.value;
            t.push(vec![
                alpha.into(),
                n.into(),
                g0.into(),
                mean.c[0].into(),
                med.c[0].into(),
                (med.c[0] - mean.c[0]).into(),
                gap.c1_gap.into(),
                mean.c[1].into(),
                med.c[1].into(),
                (med.c[1] - mean.c[1]).into(),
                gap.c2_gap_lower.into(),
                dm.into(),
                dd.into(),
            ]);
        }
    }
    emit(&t, args.io.format, args.io.output.as_deref())
}
