//! Named invariant checks with measured residuals.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tandem_core::asymptotics::{
    chamber_infimum, chamber_minimum_numeric, dominant_prefactor, rate_function, relaxation_time,
};
use tandem_core::kernels::{
    cauchy_binet, chamber_box, lambda_kernel, noncrossing_prob, phi_direct, phi_via_intertwining, pi_q,
    pi_q_support, pi_support, lambda_q, LambdaMethod, LambdaTable, PiTable,
};
use tandem_core::queueprobs::{kt00_excess32, kt00_sum31, kt00_sum32, kt_general, mm1_kt, stationary_empty_prob};
use tandem_core::simulator::{
    simulate_noncrossing, simulate_queue_prob, uniformization_distribution, uniformization_kt, CtmcTruncation,
    SimConfig,
};
use tandem_core::symfunc::{complete_homogeneous, elementary, schur, windowed_e, windowed_h, SchurMethod};
use tandem_core::types::permutations;
use tandem_core::{Exact, Hp, QueueState, RateVector, Real, WeylPoint};

use crate::output::{Cell, Table};
use crate::{Budget, Suite};

const SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["suite", "check", "status", "residual", "tolerance", "seconds", "detail"]);
    for c in checks {
        t.push(vec![
            c.suite.into(),
            c.name.clone().into(),
            (if c.passed { "pass" } else { "FAIL" }).into(),
            c.residual.into(),
            c.tolerance.into(),
            Cell::Num(c.seconds),
            c.detail.clone().into(),
        ]);
    }
    t
}

pub fn run(suite: Suite, budget: Budget) -> Vec<Check> {
    let full = budget == Budget::Full;
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        out.extend(identities(full));
    }
    if matches!(suite, Suite::Oracles | Suite::All) {
        out.extend(oracles(full));
    }
    if matches!(suite, Suite::Asymptotics | Suite::All) {
        out.extend(asymptotics(full));
    }
    out
}

type Outcome = Result<(f64, String), String>;

fn check(suite: &'static str, name: &str, tolerance: f64, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (residual, passed, detail) = match f() {
        Ok((r, d)) => (r, r <= tolerance, d),
        Err(e) => (f64::INFINITY, false, e),
    };
    Check {
        suite,
        name: name.to_string(),
        residual,
        tolerance,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Exact check: the residual is the number of mismatches.
fn exact(suite: &'static str, name: &str, f: impl FnOnce() -> Result<(usize, usize, String), String>) -> Check {
    check(suite, name, 0.0, || {
        f().map(|(bad, total, d)| (bad as f64, format!("{total} cases; {d}")))
    })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn random_rational(rng: &mut impl Rng) -> Exact {
    Exact::new(rng.random_range(1i64..=12).into(), rng.random_range(1i64..=6).into())
}

/// Distinct positive rationals.
pub fn random_rates(rng: &mut impl Rng, len: usize) -> Vec<Exact> {
    let mut v: Vec<Exact> = Vec::with_capacity(len);
    while v.len() < len {
        let r = random_rational(rng);
        if !v.contains(&r) {
            v.push(r);
        }
    }
    v
}

/// A decimal rate in `[lo, hi]` with two digits, as text and value.
fn random_decimal(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo..=hi) * 100.0).round() / 100.0
}

fn decimal_rates(rng: &mut impl Rng, len: usize, lo: f64, hi: f64) -> RateVector {
    loop {
        let v: Vec<String> = (0..len).map(|_| format!("{:.2}", random_decimal(rng, lo, hi))).collect();
        if let Ok(nu) = RateVector::parse(&v.join(",")) {
            if nu.is_distinct(1e-3) {
                return nu;
            }
        }
    }
}

fn chamber_points(len: usize, max: i64) -> Vec<Vec<i64>> {
    chamber_box(&vec![0; len], &vec![max; len]).collect()
}

fn identities(full: bool) -> Vec<Check> {
    const S: &str = "identities";
    let vectors = if full { 50 } else { 10 };
    let max_n: i64 = 12;
    let mut out = Vec::new();

    out.push(exact(S, "e-h-orthogonality: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let (mut bad, mut total) = (0, 0);
        for _ in 0..vectors {
            let len = rng.random_range(1..=5);
            let alpha = random_rates(&mut rng, len);
            for n in 1..=max_n {
                let mut s = Exact::from_integer(0.into());
                for r in 0..=n {
                    let term = elementary(r, &alpha) * complete_homogeneous(n - r, &alpha);
                    s = if r % 2 == 0 { s + term } else { s - term };
                }
                total += 1;
                bad += usize::from(s != Exact::from_integer(0.into()));
            }
        }
        Ok((bad, total, format!("{vectors} vectors, n <= {max_n}")))
    }));

    out.push(exact(S, "convolution: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        let (mut bad, mut total) = (0, 0);
        for _ in 0..vectors {
            let n_top = rng.random_range(1..=4usize);
            let alpha = random_rates(&mut rng, n_top + 1);
            for i in 0..=n_top {
                for j in 0..=n_top {
                    for n in 0..=max_n {
                        let mut lhs = Exact::from_integer(0.into());
                        for r in 0..=n {
                            let term = windowed_e(r, i, n_top, &alpha).map_err(err)?
                                * windowed_h(n - r, j, n_top, &alpha).map_err(err)?;
                            lhs = if r % 2 == 0 { lhs + term } else { lhs - term };
                        }
                        let rhs = if j <= i {
                            windowed_h(n, j, i, &alpha).map_err(err)?
                        } else {
                            let e = windowed_e(n, i, j, &alpha).map_err(err)?;
                            if n % 2 == 0 {
                                e
                            } else {
                                -e
                            }
                        };
                        total += 1;
                        bad += usize::from(lhs != rhs);
                    }
                }
            }
        }
        Ok((bad, total, format!("{vectors} vectors, N <= 4, n <= {max_n}")))
    }));

    out.push(exact(S, "schur-gt-vs-det: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
        let (max_len, count) = if full { (5, 20) } else { (4, 4) };
        let (mut bad, mut total) = (0, 0);
        for len in 1..=max_len {
            let shapes = chamber_points(len, 6);
            for _ in 0..count {
                let alpha = random_rates(&mut rng, len);
                for z in &shapes {
                    let z = WeylPoint::new(z.clone()).map_err(err)?;
                    let a: Exact = schur(&z, &alpha, SchurMethod::GtSum).map_err(err)?;
                    let b: Exact = schur(&z, &alpha, SchurMethod::Determinant).map_err(err)?;
                    total += 1;
                    bad += usize::from(a != b);
                }
            }
        }
        Ok((bad, total, format!("z0 <= 6, N <= {}, {count} alphas per N", max_len - 1)))
    }));

    out.push(exact(S, "cauchy-binet: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
        let trials = if full { 30 } else { 8 };
        let mut bad = 0;
        for _ in 0..trials {
            let n = rng.random_range(1..=4usize);
            let len = rng.random_range(1..=6usize);
            let lo = rng.random_range(-3i64..=3);
            let mut f = || -> Vec<Exact> {
                (0..len)
                    .map(|_| Exact::from_integer(rng.random_range(-4i64..=4).into()))
                    .collect()
            };
            let xi: Vec<Vec<Exact>> = (0..n).map(|_| f()).collect();
            let psi: Vec<Vec<Exact>> = (0..n).map(|_| f()).collect();
            let (l, r) = cauchy_binet(&xi, &psi, lo);
            bad += usize::from(l != r);
        }
        Ok((bad, trials, "N <= 3, support width <= 6".into()))
    }));

    out.push(exact(S, "pi-lambda-inverse: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
        let max_len = if full { 4 } else { 3 };
        let (mut bad, mut total) = (0, 0);
        for len in 1..=max_len {
            let rates = random_rates(&mut rng, len);
            let pi = PiTable::new(&rates);
            let points = chamber_points(len, 5);
            let lambda = LambdaTable::new(&rates, 5 + 2 * len + 2);
            let mut rows: HashMap<Vec<i64>, Vec<Exact>> = HashMap::new();
            for d in &points {
                let mut acc = vec![Exact::from_integer(0.into()); points.len()];
                let d_w = WeylPoint::new(d.clone()).map_err(err)?;
                for z in pi_support(&d_w) {
                    let c = pi.eval(d, z.coords());
                    if c == Exact::from_integer(0.into()) {
                        continue;
                    }
                    let row = rows
                        .entry(z.coords().to_vec())
                        .or_insert_with(|| points.iter().map(|d2| lambda.eval(z.coords(), d2)).collect());
                    for (a, l) in acc.iter_mut().zip(row.iter()) {
                        *a += &c * l;
                    }
                }
                for (d2, v) in points.iter().zip(&acc) {
                    let want = Exact::from_integer(i64::from(d == d2).into());
                    total += 1;
                    bad += usize::from(*v != want);
                }
            }
        }
        Ok((bad, total, format!("entries <= 5, N <= {}", max_len - 1)))
    }));

    out.push(exact(S, "lambda-det-vs-gt: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
        let (mut bad, mut total) = (0, 0);
        let max_len = if full { 4 } else { 3 };
        for len in 1..=max_len {
            let nu = RateVector::from_exact(random_rates(&mut rng, len)).map_err(err)?;
            let points = chamber_points(len, 5);
            for _ in 0..if full { 60 } else { 15 } {
                let z = WeylPoint::new(points[rng.random_range(0..points.len())].clone()).map_err(err)?;
                let d = WeylPoint::new(points[rng.random_range(0..points.len())].clone()).map_err(err)?;
                let a: Exact = lambda_kernel(&z, &d, &nu, LambdaMethod::Determinant).map_err(err)?;
                let b: Exact = lambda_kernel(&z, &d, &nu, LambdaMethod::GtSum).map_err(err)?;
                total += 1;
                bad += usize::from(a != b);
            }
        }
        Ok((bad, total, format!("entries <= 5, N <= {}", max_len - 1)))
    }));

    out.push(exact(S, "pi-q-lambda-q-inverse: exact", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
        let (max_stations, max_q) = if full { (3, 4) } else { (2, 3) };
        let (mut bad, mut total) = (0, 0);
        for stations in 1..=max_stations {
            let nu = RateVector::from_exact(random_rates(&mut rng, stations + 1)).map_err(err)?;
            let states: Vec<QueueState> = box_states(stations, max_q);
            for q in &states {
                let terms: Vec<(WeylPoint, Exact)> = pi_q_support(q)
                    .into_iter()
                    .map(|z| pi_q(q, &z, &nu).map(|c| (z, c)))
                    .collect::<Result<_, _>>()
                    .map_err(err)?;
                for q2 in &states {
                    let mut s = Exact::from_integer(0.into());
                    for (z, c) in &terms {
                        if *c != Exact::from_integer(0.into()) {
                            s += c * lambda_q::<Exact>(z, q2, &nu).map_err(err)?;
                        }
                    }
                    total += 1;
                    bad += usize::from(s != Exact::from_integer(i64::from(q == q2).into()));
                }
            }
        }
        Ok((bad, total, format!("entries <= {max_q}, N <= {max_stations}")))
    }));
    out
}

fn box_states(stations: usize, max: i64) -> Vec<QueueState> {
    let mut out = vec![vec![]];
    for _ in 0..stations {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|v| QueueState::new(v).expect("nonnegative")).collect()
}

fn oracles(full: bool) -> Vec<Check> {
    const S: &str = "oracles";
    let mut out = Vec::new();

    let phi_points = if full { 200 } else { 24 };
    out.push(check(S, "phi-direct-vs-intertwining", 1e-8, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
        let mut worst: f64 = 0.0;
        for k in 0..phi_points {
            let len = 2 + k % 3;
            let nu = decimal_rates(&mut rng, len, 0.5, 5.0);
            let t = [0.25, 1.0, 4.0][k % 3];
            let (d, d2) = random_pair(&mut rng, len);
            let a: f64 = phi_direct(&d, &d2, &t, &nu).map_err(err)?;
            let b = phi_via_intertwining(&d, &d2, &t, &nu, 1e-11).map_err(err)?;
            worst = worst.max((a - b.value).abs());
        }
        Ok((worst, format!("{phi_points} points, N <= 3, t in {{0.25, 1, 4}}, rates in [0.5, 5]")))
    }));

    let grid = stable_grid(full);
    out.push(check(S, "thm31-vs-thm32", 2e-8, || {
        let mut worst: f64 = 0.0;
        for (nu, t) in &grid {
            let a = kt00_sum31(t, nu, 1e-12).map_err(err)?;
            let b = kt00_sum32(t, nu, 1e-12).map_err(err)?;
            worst = worst.max((a.value - b.value).abs());
        }
        Ok((worst, format!("{} (rates, t) pairs, N <= 3", grid.len())))
    }));

    let cap = if full { 80 } else { 40 };
    out.push(check(S, "thm32-vs-uniformization", 1e-6, || {
        let mut worst: f64 = 0.0;
        let mut used = 0;
        for (nu, t) in &grid {
            if !full && nu.stations() > 2 {
                continue;
            }
            let q = QueueState::zero(nu.stations());
            let a = kt00_sum32(t, nu, 1e-12).map_err(err)?;
            let b = uniformization_kt(&q, &q, *t, nu, &mut CtmcTruncation::new(cap), 1e-8).map_err(err)?;
            worst = worst.max((a.value - b.value).abs());
            used += 1;
        }
        Ok((worst, format!("{used} pairs, cap {cap}, tol 1e-8")))
    }));

    let reps: u64 = if full { 1_000_000 } else { 100_000 };
    out.push(check(S, "thm32-vs-simulation", 3.0, || {
        let mut worst: f64 = 0.0;
        for (k, (nu, t)) in grid.iter().enumerate().take(if full { grid.len() } else { 4 }) {
            let q = QueueState::zero(nu.stations());
            let a = kt00_sum32(t, nu, 1e-12).map_err(err)?;
            let cfg = SimConfig::new(nu.clone(), SEED + k as u64, reps, *t).map_err(err)?;
            let e = simulate_queue_prob(&q, &q, *t, &cfg).map_err(err)?;
            worst = worst.max(sigmas(e.mean, e.half_width_95, a.value));
        }
        Ok((worst, format!("max deviation in standard errors, {reps} reps")))
    }));

    out.push(check(S, "noncrossing-vs-simulation", 3.0, || {
        let mut worst: f64 = 0.0;
        let cases = [("1,2,3", vec![0, 0, 0], 1.0), ("2,1,1.5", vec![2, 1, 0], 0.5), ("1,1", vec![1, 0], 2.0)];
        for (k, (rates, x, t)) in cases.iter().enumerate() {
            let nu = RateVector::parse(rates).map_err(err)?;
            let x = WeylPoint::new(x.clone()).map_err(err)?;
            let a = noncrossing_prob(&x, t, &nu, 1e-12).map_err(err)?;
            let cfg = SimConfig::new(nu.clone(), SEED + 100 + k as u64, reps, *t).map_err(err)?;
            let e = simulate_noncrossing(&x, *t, &cfg).map_err(err)?;
            worst = worst.max(sigmas(e.mean, e.half_width_95, a.value));
        }
        Ok((worst, format!("max deviation in standard errors, {reps} reps")))
    }));

    out.push(check(S, "mm1-vs-uniformization", 1e-10, || {
        let nu = RateVector::parse("1,2").map_err(err)?;
        let mut worst: f64 = 0.0;
        for t in [0.5, 1.0, 5.0] {
            for q in 0..=5u64 {
                let d = uniformization_distribution(
                    &QueueState::new(vec![q as i64]).map_err(err)?,
                    t,
                    &nu,
                    &mut CtmcTruncation::new(120),
                    1e-13,
                )
                .map_err(err)?;
                for q2 in 0..=5u64 {
                    let u = d.get(&QueueState::new(vec![q2 as i64]).map_err(err)?);
                    worst = worst.max((mm1_kt(q, q2, t, 1.0, 2.0) - u).abs());
                }
            }
        }
        Ok((worst, "rates 1,2; q, q2 <= 5; t in {0.5, 1, 5}".into()))
    }));

    out.push(check(S, "mm1-row-sums", 1e-10, || {
        let mut worst: f64 = 0.0;
        for t in [0.5, 1.0, 5.0] {
            for q in 0..=5u64 {
                let s: f64 = (0..400).map(|q2| mm1_kt(q, q2, t, 1.0, 2.0)).sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        Ok((worst, "rates 1,2; sum over q2 < 400".into()))
    }));

    out.push(check(S, "mm1-stationary", 1e-8, || {
        Ok(((mm1_kt(0, 0, 80.0, 1.0, 2.0) - 0.5).abs(), "k_80(0,0) vs 1/2".into()))
    }));

    out.push(check(S, "kt-general-vs-closed-forms", 1e-9, || {
        let mut worst: f64 = 0.0;
        let nu = RateVector::parse("1,2").map_err(err)?;
        for (a, b) in [(0i64, 0i64), (2, 1), (0, 3)] {
            let v = kt_general(&QueueState::new(vec![a]).map_err(err)?, &QueueState::new(vec![b]).map_err(err)?, &1.0, &nu, 1e-12)
                .map_err(err)?;
            worst = worst.max((v.value - mm1_kt(a as u64, b as u64, 1.0, 1.0, 2.0)).abs());
        }
        for rates in ["1,2,3", "0.5,1.5,4"] {
            let nu = RateVector::parse(rates).map_err(err)?;
            let q = QueueState::zero(2);
            let v = kt_general(&q, &q, &1.0, &nu, 1e-11).map_err(err)?;
            let w = kt00_sum31(&1.0, &nu, 1e-12).map_err(err)?;
            worst = worst.max((v.value - w.value).abs());
        }
        Ok((worst, "N=1 vs Bessel form, N=2 empty-to-empty vs permutation sum".into()))
    }));

    out.push(check(S, "service-rate-symmetry", 1e-10, || {
        let nu = RateVector::parse("1,2,3,5").map_err(err)?;
        let mut values = Vec::new();
        for p in permutations(3) {
            let perm: Vec<usize> = std::iter::once(0).chain(p.iter().map(|k| k + 1)).collect();
            values.push(kt00_sum31(&1.0, &nu.permuted(&perm), 1e-13).map_err(err)?.value);
        }
        Ok((relative_spread(&values), "rates 1,2,3,5 at t=1, all 6 service orders".into()))
    }));
    out
}

fn sigmas(mean: f64, half_width: f64, value: f64) -> f64 {
    let se = half_width / tandem_core::simulator::Z95;
    if se == 0.0 {
        if mean == value {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (mean - value).abs() / se
    }
}

pub fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / max.abs()
}

fn random_pair(rng: &mut impl Rng, len: usize) -> (WeylPoint, WeylPoint) {
    loop {
        let mut d: Vec<i64> = (0..len).map(|_| rng.random_range(0..=3)).collect();
        d.sort_by(|a, b| b.cmp(a));
        let d2: Vec<i64> = d.iter().map(|v| v + rng.random_range(0..=3)).collect();
        if let (Ok(a), Ok(b)) = (WeylPoint::new(d), WeylPoint::new(d2)) {
            return (a, b);
        }
    }
}

fn stable_grid(full: bool) -> Vec<(RateVector, f64)> {
    let rates = ["1,2", "1,2,4", "0.5,1.5,1", "1,4,2,3", "0.7,1.3,2.9,1.9"];
    let times: &[f64] = if full { &[0.3, 1.0, 3.0] } else { &[1.0] };
    rates
        .iter()
        .flat_map(|r| times.iter().map(move |&t| (RateVector::parse(r).expect("valid rates"), t)))
        .collect()
}

fn asymptotics(full: bool) -> Vec<Check> {
    const S: &str = "asymptotics";
    let mut out = Vec::new();
    let target = 1.0 / (3.0 - 2.0 * 2f64.sqrt());

    out.push(check(S, "relaxation-time: 1,4,2,3", 1e-12, || {
        let nu = RateVector::parse("1,4,2,3").map_err(err)?;
        let v = relaxation_time(&nu).map_err(err)?;
        Ok(((v - target).abs() / target, format!("{v} vs 1/(3-2*sqrt 2)")))
    }));

    out.push(check(S, "infimum-vs-relaxation", 1e-12, || {
        let mut worst: f64 = 0.0;
        for r in ["1,4,2,3", "1,2,4", "0.5,1.5,1", "1,1.5"] {
            let nu = RateVector::parse(r).map_err(err)?;
            let inf = chamber_infimum(&nu).map_err(err)?;
            let rate = 1.0 / relaxation_time(&nu).map_err(err)?;
            worst = worst.max((inf.value - rate).abs() / rate);
            if inf.sigma != dominant_prefactor(&nu).map_err(err)?.sigma {
                return Err(format!("{r}: minimizing arrangement differs from the dominant one"));
            }
        }
        Ok((worst, "relative gap, 4 rate vectors".into()))
    }));

    out.push(check(S, "infimum-vs-numeric-minimum", 1e-6, || {
        let mut worst: f64 = 0.0;
        for r in ["1,4,2,3", "1,2,4"] {
            let nu = RateVector::parse(r).map_err(err)?;
            let inf = chamber_infimum(&nu).map_err(err)?;
            let (v, _) = chamber_minimum_numeric(&nu.permuted(&inf.sigma), 1e-10);
            worst = worst.max((v - inf.value).abs() / inf.value);
        }
        Ok((worst, "projected coordinate descent, relative gap".into()))
    }));

    out.push(check(S, "rate-function-convexity", 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 20);
        let nu = RateVector::parse("1,4,2,3").map_err(err)?;
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..6.0)).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..6.0)).collect();
            let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            let excess = rate_function(&m, &nu) - 0.5 * (rate_function(&x, &nu) + rate_function(&y, &nu));
            worst = worst.max(excess - 1e-12);
        }
        Ok((worst.max(0.0), "midpoint inequality on 1000 random pairs".into()))
    }));

    out.push(check(S, "dominant-term-ratio: 1,2,4", 0.1, || {
        let nu = RateVector::parse("1,2,4").map_err(err)?;
        let (t, ratio) = dominant_ratio(&nu).map_err(err)?;
        Ok(((ratio - 1.0).abs(), format!("ratio {ratio:.6} at t = {t}")))
    }));

    if full {
        out.push(check(S, "decay-fit: 1,4,2,3", 0.1, || {
            let nu = RateVector::parse("1,4,2,3").map_err(err)?;
            let times: Vec<f64> = (1..=60).map(|k| 10.0 * k as f64).collect();
            let series = tandem_core::asymptotics::decay_series::<Hp>(&nu, &times, 1e-50).map_err(err)?;
            let report = tandem_core::asymptotics::decay_report(&nu, &series, 1e-40).map_err(err)?;
            Ok((
                (report.fitted_rate - report.analytic_rate).abs() / report.analytic_rate,
                format!(
                    "fitted {:.6} vs {:.6} over t in [{}, {}]",
                    report.fitted_rate, report.analytic_rate, report.fit_window.0, report.fit_window.1
                ),
            ))
        }));
    }
    out
}

/// `|k_t(0,0) − π₀| / (prefactor · P^{σ̄}(T>t))` at the largest `t` on a
/// unit grid where the numerator exceeds `1e−10`.
pub fn dominant_ratio(nu: &RateVector) -> tandem_core::Result<(f64, f64)> {
    let dom = dominant_prefactor(nu)?;
    let _: Exact = stationary_empty_prob(nu)?;
    let origin = WeylPoint::zero(nu.len());
    let tol = 1e-40;
    let excess = |t: f64| -> tandem_core::Result<f64> {
        Ok(kt00_excess32(&Hp::from_f64(t), nu, tol)?.value.abs().to_f64())
    };
    // exponential search then bisection on the integer grid
    let mut lo = 1.0;
    let mut hi = 2.0;
    while excess(hi)? > 1e-10 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if excess(mid)? > 1e-10 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = lo;
    let p = noncrossing_prob(&origin, &Hp::from_f64(t), &dom.rates, tol)?.value.to_f64();
    Ok((t, excess(t)? / (dom.prefactor * p)))
}
