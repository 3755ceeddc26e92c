use std::io::Write;

use serde_json::{json, Value};
use tandem_core::asymptotics::{
    auto_window, bottleneck, decay_series, dominant_prefactor, fit_decay_rate, relaxation_time, DEFAULT_FLOOR,
};
use tandem_core::kernels::{noncrossing_prob, KernelValue};
use tandem_core::queueprobs::{
    kt00_sum31, kt00_sum32, kt_equal_rates_to_empty, kt_general, mm1_kt, stationary_empty_prob,
};
use tandem_core::simulator::{simulate_noncrossing, simulate_queue_prob, SimConfig};
use tandem_core::types::EPS_DISTINCT;
use tandem_core::{Hp, QueueState, RateVector, Real, WeylPoint};

use crate::output::{join_ints, num_value, Cell, Table};
use crate::{
    verify, Cli, Command, Failure, Kt00Args, Kt00Method, KtArgs, Precision, RelaxationArgs, SimTarget,
    SimulateArgs,
};

/// Error bound reported for the closed-form single-station path.
const BESSEL_ERROR: f64 = 1e-15;

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Kt00(a) => kt00(a, cli.precision)?.write(cli.format, out)?,
        Command::Kt(a) => kt(a, cli.precision)?.write(cli.format, out)?,
        Command::Relaxation(a) => {
            let report = relaxation(a, cli.precision)?;
            serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Command::Verify(a) => {
            let checks = verify::run(a.suite, a.budget);
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            verify::table(&checks).write(cli.format, out)?;
            out.flush()?;
            if !failed.is_empty() {
                return Err(Failure::Verification(failed.join(", ")));
            }
        }
        Command::Simulate(a) => simulate(a)?.write(cli.format, out)?,
    }
    Ok(())
}

pub fn parse_rates(s: &str) -> Result<RateVector, Failure> {
    Ok(RateVector::parse(s)?)
}

/// A list `1,2,5` or an inclusive range `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |m: &str| Failure::Usage(format!("bad time grid {s:?}: {m}"));
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || !(b >= a) {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(bad("too many points"));
        }
        (0..count).map(|k| a + k as f64 * h).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(bad("times must be positive and finite"));
    }
    Ok(grid)
}

pub fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<i64>()
                .map_err(|_| Failure::Usage(format!("bad {what} {s:?}: expected comma-separated integers")))
        })
        .collect()
}

fn parse_queue(s: &str, what: &str, stations: usize) -> Result<QueueState, Failure> {
    let q = QueueState::new(parse_ints(s, what)?)?;
    if q.len() != stations {
        return Err(Failure::Usage(format!(
            "{what} has {} entries but the rates describe {stations} stations",
            q.len()
        )));
    }
    Ok(q)
}

fn in_precision<F, G>(precision: Precision, double: F, high: G) -> Result<KernelValue<f64>, Failure>
where
    F: FnOnce() -> tandem_core::Result<KernelValue<f64>>,
    G: FnOnce() -> tandem_core::Result<KernelValue<Hp>>,
{
    Ok(match precision {
        Precision::Double => double()?,
        Precision::High => {
            let v = high()?;
            KernelValue {
                value: v.value.to_f64(),
                abs_error: v.abs_error,
            }
        }
    })
}

fn kt00(a: &Kt00Args, precision: Precision) -> Result<Table, Failure> {
    let nu = parse_rates(&a.rates)?;
    let times = parse_grid(&a.t)?;
    let method = match a.method {
        Kt00Method::Thm31 => "thm31",
        Kt00Method::Thm32 => "thm32",
        Kt00Method::Auto if nu.is_stable() && nu.is_distinct(EPS_DISTINCT) => "thm32",
        Kt00Method::Auto if nu.services_distinct(EPS_DISTINCT) => "thm31",
        Kt00Method::Auto => "intertwining",
    };
    let zero = QueueState::zero(nu.stations());
    let mut table = Table::new(&["t", "value", "abs_error", "method"]);
    for t in times {
        let v = match method {
            "thm31" => in_precision(
                precision,
                || kt00_sum31(&t, &nu, a.tol),
                || kt00_sum31(&Hp::from_f64(t), &nu, a.tol),
            )?,
            "thm32" => in_precision(
                precision,
                || kt00_sum32(&t, &nu, a.tol),
                || kt00_sum32(&Hp::from_f64(t), &nu, a.tol),
            )?,
            _ => in_precision(
                precision,
                || kt_general(&zero, &zero, &t, &nu, a.tol),
                || kt_general(&zero, &zero, &Hp::from_f64(t), &nu, a.tol),
            )?,
        };
        table.push(vec![t.into(), v.value.into(), v.abs_error.into(), method.into()]);
    }
    Ok(table)
}

fn kt(a: &KtArgs, precision: Precision) -> Result<Table, Failure> {
    let nu = parse_rates(&a.rates)?;
    let times = parse_grid(&a.t)?;
    let q = parse_queue(&a.q, "q", nu.stations())?;
    let q2 = parse_queue(&a.q2, "q2", nu.stations())?;
    let path = if nu.stations() == 1 {
        "bessel"
    } else if nu.all_equal() && q2.is_zero() {
        "equal-rates"
    } else {
        "intertwining"
    };
    let mut table = Table::new(&["q", "q2", "t", "value", "abs_error", "path"]);
    for t in times {
        let v = match path {
            "bessel" => KernelValue {
                value: mm1_kt(q.values()[0] as u64, q2.values()[0] as u64, t, nu.rate(0), nu.rate(1)),
                abs_error: BESSEL_ERROR,
            },
            "equal-rates" => {
                let rate = &nu.exact()[0];
                in_precision(
                    precision,
                    || kt_equal_rates_to_empty(&q, &t, rate, a.tol),
                    || kt_equal_rates_to_empty(&q, &Hp::from_f64(t), rate, a.tol),
                )?
            }
            _ => in_precision(
                precision,
                || kt_general(&q, &q2, &t, &nu, a.tol),
                || kt_general(&q, &q2, &Hp::from_f64(t), &nu, a.tol),
            )?,
        };
        table.push(vec![
            join_ints(q.values()).into(),
            join_ints(q2.values()).into(),
            t.into(),
            v.value.into(),
            v.abs_error.into(),
            path.into(),
        ]);
    }
    Ok(table)
}

fn relaxation(a: &RelaxationArgs, precision: Precision) -> Result<Value, Failure> {
    let nu = parse_rates(&a.rates)?;
    let tau = relaxation_time(&nu)?;
    let (station, rate) = bottleneck(&nu);
    let dom = dominant_prefactor(&nu)?;
    let pi0: f64 = stationary_empty_prob(&nu)?;
    let sigma: Vec<i64> = dom.sigma.iter().map(|&s| s as i64).collect();
    let mut report = json!({
        "rates": nu.rates().iter().map(|&r| num_value(r)).collect::<Vec<_>>(),
        "relaxation_time": num_value(tau),
        "decay_rate": num_value(1.0 / tau),
        "bottleneck_station": station,
        "bottleneck_rate": num_value(rate),
        "stationary_empty_prob": num_value(pi0),
        "dominant_sigma": sigma,
        "dominant_rates": dom.rates.rates().iter().map(|&r| num_value(r)).collect::<Vec<_>>(),
        "prefactor": num_value(dom.prefactor),
    });
    let Some(grid) = &a.t else {
        return Ok(report);
    };
    let times = parse_grid(grid)?;
    let floor = a.floor.unwrap_or(match precision {
        Precision::Double => DEFAULT_FLOOR,
        Precision::High => 1e-40,
    });
    let (series, dominant) = match precision {
        Precision::Double => diagnostics::<f64>(&nu, &dom.rates, &times, a.tol)?,
        Precision::High => diagnostics::<Hp>(&nu, &dom.rates, &times, a.tol)?,
    };
    let rows: Vec<Value> = series
        .iter()
        .zip(&dominant)
        .map(|(&(t, excess), &p)| {
            let approx = dom.prefactor * p;
            json!({
                "t": num_value(t),
                "excess": num_value(excess),
                "dominant_term": num_value(approx),
                "ratio": num_value(excess / approx),
            })
        })
        .collect();
    let fit = auto_window(&series, floor).and_then(|w| {
        let pts = &series[w];
        Ok((fit_decay_rate(pts, floor)?, pts[0].0, pts[pts.len() - 1].0))
    });
    let obj = report.as_object_mut().expect("object");
    obj.insert("floor".into(), num_value(floor));
    match fit {
        Ok((rate, t0, t1)) => {
            obj.insert("fitted_rate".into(), num_value(rate));
            obj.insert("fit_window".into(), json!([num_value(t0), num_value(t1)]));
            obj.insert("fit_relative_error".into(), num_value((rate * tau - 1.0).abs()));
        }
        Err(e) => {
            obj.insert("fitted_rate".into(), Value::Null);
            obj.insert("fit_window".into(), Value::Null);
            obj.insert("fit_relative_error".into(), Value::Null);
            eprintln!("warning: no decay fit: {e}");
        }
    }
    obj.insert("series".into(), Value::Array(rows));
    Ok(report)
}

type Series = (Vec<(f64, f64)>, Vec<f64>);

fn diagnostics<R: Real>(nu: &RateVector, dominant: &RateVector, times: &[f64], tol: f64) -> Result<Series, Failure> {
    let series = decay_series::<R>(nu, times, tol)?;
    let origin = WeylPoint::zero(nu.len());
    let p = times
        .iter()
        .map(|&t| Ok(noncrossing_prob(&origin, &R::from_f64(t), dominant, tol)?.value.to_f64()))
        .collect::<Result<Vec<f64>, Failure>>()?;
    Ok((series, p))
}

fn simulate(a: &SimulateArgs) -> Result<Table, Failure> {
    let nu = parse_rates(&a.rates)?;
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let cfg = SimConfig::new(nu.clone(), a.seed, a.reps, a.t)?;
    let (target, est) = match a.target {
        SimTarget::Kt => {
            let q = match &a.q {
                Some(s) => parse_queue(s, "q", nu.stations())?,
                None => QueueState::zero(nu.stations()),
            };
            let q2 = match &a.q2 {
                Some(s) => parse_queue(s, "q2", nu.stations())?,
                None => QueueState::zero(nu.stations()),
            };
            let label = format!("kt({};{})", join_ints(q.values()), join_ints(q2.values()));
            (label, simulate_queue_prob(&q, &q2, a.t, &cfg)?)
        }
        SimTarget::Noncross => {
            let x = match &a.x {
                Some(s) => WeylPoint::new(parse_ints(s, "x")?)?,
                None => WeylPoint::zero(nu.len()),
            };
            let label = format!("noncross({})", join_ints(x.coords()));
            (label, simulate_noncrossing(&x, a.t, &cfg)?)
        }
    };
    let mut table = Table::new(&["target", "t", "estimate", "half_width_95", "reps", "seed"]);
    table.push(vec![
        Cell::from(target),
        a.t.into(),
        est.mean.into(),
        est.half_width_95.into(),
        est.replications.into(),
        Cell::Text(a.seed.to_string()),
    ]);
    Ok(table)
}
