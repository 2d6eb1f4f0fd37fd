//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use durrmeyer_core::analysis::{
    bound_check, convergence_study, dt_constant_trend, voronovskaya_scan, Theorem,
};
use durrmeyer_core::exactnum::{rat, Polynomial};
use durrmeyer_core::moments::errata::{run_errata, test_sequences, ErrataConfig, ErrataLedger};
use durrmeyer_core::moments::{central_moment, operator_monomial, Verdict};
use durrmeyer_core::operators::functions::Smoothness;
use durrmeyer_core::smoothness::{dt_modulus, modulus, DEFAULT_HS, DEFAULT_XS};
use durrmeyer_core::{registry, uniform_grid, FunctionSpec, OperatorSpec, SequencePair};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

const GRID: usize = 1000;
const BOUND_TOL: f64 = 1e-9;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(name: &str) -> FunctionSpec {
    registry::get(name).expect("registered")
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn grid_values(spec: &OperatorSpec, func: &FunctionSpec, grid: &[f64]) -> Result<Vec<f64>, String> {
    spec.prepare(func, None)
        .eval_grid(grid)
        .map_err(|e| format!("{spec}: {e}"))
}

/// Every check named `name` must be confirmed once per `n` in `ns`.
fn all_confirmed(
    ledger: &ErrataLedger,
    name: &str,
    ns: impl Iterator<Item = usize>,
    seq: Option<&str>,
) -> Result<(), String> {
    for n in ns {
        let hits: Vec<_> = ledger
            .by_name(name)
            .filter(|r| r.n == Some(n) && (seq.is_none() || r.sequence.as_deref() == seq))
            .collect();
        ensure(!hits.is_empty(), || {
            format!("{name} missing at n={n} {seq:?}")
        })?;
        if let Some(bad) = hits.iter().find(|r| r.verdict != Verdict::Confirmed) {
            return Err(format!(
                "{name} refuted at n={n} {:?}: residual {}",
                bad.sequence, bad.residual
            ));
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let config = ErrataConfig {
        m1_n: 3..=3,
        recurrence_n: vec![],
        product_n: vec![],
        ..ErrataConfig::default()
    };
    let ledger = run_errata(&config).map_err(|e| e.to_string())?;
    for name in [
        "M2-weights-sum",
        "M2-e2",
        "M2-central-1",
        "M2-central-2",
        "A0-e1",
        "A1-e1",
        "A2-e1",
        "A0-e2",
        "A1-e2",
        "A2-e2",
    ] {
        all_confirmed(&ledger, name, 3..=60, None)?;
    }
    // Independent restatement of the headline identity.
    for n in 3..=60usize {
        let spec = OperatorSpec::m2(n).map_err(|e| e.to_string())?;
        let c = rat(3, ((n + 2) * (n + 3)) as i64);
        let want = Polynomial::from_coeffs(vec![-c.clone(), rat(0, 1), rat(1, 1)]);
        let got = operator_monomial(&spec, 2).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("M2 e2 at n={n}: {got}"))?;
        let central = central_moment(&spec, 2).map_err(|e| e.to_string())?;
        ensure(central == Polynomial::constant(-c), || {
            format!("M2 central-2 at n={n}: {central}")
        })?;
        let first = central_moment(&spec, 1).map_err(|e| e.to_string())?;
        ensure(first.is_zero(), || {
            format!("M2 central-1 at n={n}: {first}")
        })?;
    }
    Ok("10 identity families zero-residual for n in 3..=60".into())
}

fn criterion_2() -> Outcome {
    let config = ErrataConfig {
        m2_n: 3..=3,
        recurrence_n: vec![],
        product_n: vec![],
        ..ErrataConfig::default()
    };
    let ledger = run_errata(&config).map_err(|e| e.to_string())?;
    let classical = SequencePair::classical().to_string();
    let printed = ledger
        .by_name("M1-first-moment-as-printed")
        .find(|r| r.n == Some(5) && r.sequence.as_deref() == Some(classical.as_str()))
        .ok_or("as-printed check at n=5 missing")?;
    ensure(printed.verdict == Verdict::Refuted, || {
        "printed first moment confirmed".into()
    })?;
    for seq in test_sequences() {
        all_confirmed(
            &ledger,
            "M1-first-moment-corrected",
            3..=40,
            Some(&seq.to_string()),
        )?;
    }
    let json = ledger.to_json();
    ensure(
        json.contains("\"refuted\"") && json.contains("\"confirmed\""),
        || "report lacks a verdict".into(),
    )?;
    Ok(format!(
        "printed residual {} at n=5; corrected confirmed for 3 sequences, n in 3..=40",
        printed.residual
    ))
}

fn criterion_3() -> Outcome {
    let grid = uniform_grid(GRID);
    let mut worst: f64 = 0.0;
    for func in registry::all() {
        for n in [5usize, 10, 50] {
            let durr = grid_values(&OperatorSpec::durrmeyer(n).unwrap(), &func, &grid)?;
            let m1 = grid_values(
                &OperatorSpec::m1(n, SequencePair::classical()).unwrap(),
                &func,
                &grid,
            )?;
            let d = sup_diff(&durr, &m1);
            ensure(d <= 1e-12, || {
                format!("M1(1,-1) vs Durrmeyer {} n={n}: {d:e}", func.name)
            })?;
            worst = worst.max(d);
            for seq in test_sequences() {
                let m1 = grid_values(&OperatorSpec::m1(n, seq.clone()).unwrap(), &func, &grid)?;
                let bez = grid_values(
                    &OperatorSpec::bezier(n, seq.clone(), 1.0).unwrap(),
                    &func,
                    &grid,
                )?;
                let d = sup_diff(&m1, &bez);
                ensure(d <= 1e-12, || {
                    format!("Bezier mu=1 vs M1 {seq} {} n={n}: {d:e}", func.name)
                })?;
                worst = worst.max(d);
            }
        }
    }
    Ok(format!("worst sup difference {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in [3usize, 16, 64, 128] {
        let mut specs = vec![
            OperatorSpec::bernstein(n).unwrap(),
            OperatorSpec::durrmeyer(n).unwrap(),
            OperatorSpec::m2(n).unwrap(),
        ];
        for seq in test_sequences() {
            specs.push(OperatorSpec::m1(n, seq.clone()).unwrap());
            specs.push(OperatorSpec::bezier(n, seq, 2.0).unwrap());
        }
        for spec in &specs {
            for j in 0..=6usize {
                let exact = operator_monomial(spec, j).map_err(|e| format!("{spec} e{j}: {e}"))?;
                let func = registry::monomial(j).unwrap();
                let float = grid_values(spec, &func, &xs)?;
                let want: Vec<f64> = xs.iter().map(|&x| exact.eval_f64(x)).collect();
                let d = sup_diff(&float, &want);
                ensure(d <= 1e-10, || format!("{spec} e{j}: {d:e}"))?;
                worst = worst.max(d);
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} operator/monomial pairs, worst {worst:.2e}"
    ))
}

fn criterion_5() -> Outcome {
    let ns = [16usize, 32, 64, 128, 256];
    let sin_pi = f("sin_pi");
    let slope = |spec: OperatorSpec| -> Result<f64, String> {
        Ok(convergence_study(&spec, &sin_pi, &ns, GRID, None)
            .map_err(|e| e.to_string())?
            .slope)
    };
    let m2 = slope(OperatorSpec::m2(16).unwrap())?;
    let durr = slope(OperatorSpec::durrmeyer(16).unwrap())?;
    let m1 = slope(OperatorSpec::m1(16, SequencePair::parse("0", "1").unwrap()).unwrap())?;
    ensure((-2.3..=-1.7).contains(&m2), || format!("M2 slope {m2:.4}"))?;
    ensure((-1.15..=-0.85).contains(&durr), || {
        format!("Durrmeyer slope {durr:.4}")
    })?;
    ensure((-1.15..=-0.85).contains(&m1), || {
        format!("M1(0,1) slope {m1:.4}")
    })?;
    Ok(format!(
        "slopes M2 {m2:.3}, Durrmeyer {durr:.3}, M1(0,1) {m1:.3}"
    ))
}

fn criterion_6() -> Outcome {
    let ns = [3usize, 5, 10, 32, 64, 128, 256, 512];
    let mut worst: f64 = 0.0;
    for i in 1..10 {
        let x = i as f64 / 10.0;
        let r = voronovskaya_scan(&f("e2"), x, &ns, None).map_err(|e| e.to_string())?;
        for row in &r.rows {
            let d = (row.scaled_error + 3.0).abs();
            ensure(d <= 1e-9, || {
                format!("e2 at n={} x={x}: {}", row.n, row.scaled_error)
            })?;
            worst = worst.max(d);
        }
    }
    let r = voronovskaya_scan(&f("expx"), 0.4, &[64, 128, 256, 512], None)
        .map_err(|e| e.to_string())?;
    let target = -1.5 * 0.4f64.exp();
    let devs: Vec<f64> = r
        .rows
        .iter()
        .map(|row| (row.scaled_error - target).abs())
        .collect();
    ensure(devs.windows(2).all(|w| w[1] < w[0]), || {
        format!("expx deviations not decreasing: {devs:?}")
    })?;
    let rel = devs[3] / target.abs();
    ensure(rel < 0.1, || {
        format!("expx final relative deviation {rel:.4}")
    })?;
    Ok(format!(
        "e2 worst {worst:.1e}; expx relative deviation {rel:.4} at n=512"
    ))
}

fn criterion_7() -> Outcome {
    let funcs = [f("e2"), f("abs_mid")];
    let mut lowest = f64::INFINITY;
    let mut checks = 0;
    for func in &funcs {
        for n in [10usize, 50, 100] {
            let mut cases = vec![(Theorem::M2Modulus, OperatorSpec::m2(n).unwrap())];
            for seq in test_sequences() {
                cases.push((Theorem::M1Local, OperatorSpec::m1(n, seq).unwrap()));
            }
            for (theorem, spec) in cases {
                let r = bound_check(theorem, &spec, func, GRID, None).map_err(|e| e.to_string())?;
                ensure(r.min_margin >= -BOUND_TOL, || {
                    format!(
                        "{theorem} {spec} {}: min margin {:e}",
                        func.name, r.min_margin
                    )
                })?;
                lowest = lowest.min(r.min_margin);
                checks += 1;
            }
        }
    }
    let mut worst_ratio: f64 = 0.0;
    for seq in test_sequences() {
        for func in &funcs {
            let trend =
                dt_constant_trend(&seq, func, &[16, 256], None, GRID).map_err(|e| e.to_string())?;
            let ratio = trend[1].1 / trend[0].1;
            ensure(ratio <= 2.0, || {
                format!("C* grows {ratio:.3}x for {seq} {}: {trend:?}", func.name)
            })?;
            worst_ratio = worst_ratio.max(ratio);
        }
    }
    Ok(format!(
        "{checks} bound checks, min margin {lowest:.3}; worst C* ratio {worst_ratio:.3}"
    ))
}

fn criterion_8() -> Outcome {
    let grid = uniform_grid(GRID);
    let mut checks = 0;
    for func in registry::all() {
        let norm = func.sup_norm(200_000);
        for n in [5usize, 10, 50] {
            for seq in test_sequences().into_iter().filter(|s| s.nonnegative_at(n)) {
                let m1 = grid_values(&OperatorSpec::m1(n, seq.clone()).unwrap(), &func, &grid)?;
                let top = m1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                ensure(top <= norm + 1e-9, || {
                    format!("|M1 {}| = {top} > {norm} ({seq}, n={n})", func.name)
                })?;
                for mu in [1.0, 2.0, 3.0] {
                    let b = grid_values(
                        &OperatorSpec::bezier(n, seq.clone(), mu).unwrap(),
                        &func,
                        &grid,
                    )?;
                    let top = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    ensure(top <= mu * norm + 1e-9, || {
                        format!(
                            "|Bezier_{mu} {}| = {top} > {} ({seq}, n={n})",
                            func.name,
                            mu * norm
                        )
                    })?;
                    checks += 1;
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} norm checks"))
}

fn affine(x: f64) -> f64 {
    0.75 - 2.5 * x
}

fn criterion_9() -> Outcome {
    let e1 = f("e1");
    let mut worst: (f64, f64, f64) = (0.0, 0.0, 0.0);
    for delta in [0.01, 0.1, 0.25, 0.5] {
        let w = modulus(&e1, delta, DEFAULT_XS, DEFAULT_HS)
            .map_err(|e| e.to_string())?
            .value;
        ensure((w - delta).abs() <= 1e-6, || {
            format!("omega(e1, {delta}) = {w}")
        })?;
        worst.0 = worst.0.max((w - delta).abs());
    }
    let funcs = [
        FunctionSpec::new("affine", affine, Smoothness::C6),
        e1,
        f("e0"),
    ];
    for func in &funcs {
        for t in [0.1, 0.5, 1.0] {
            let w = dt_modulus(func, t, 2, DEFAULT_XS, DEFAULT_HS)
                .map_err(|e| e.to_string())?
                .value;
            ensure(w <= 1e-12, || {
                format!("order-2 DT modulus of {} at t={t}: {w:e}", func.name)
            })?;
            worst.1 = worst.1.max(w);
        }
    }
    for t in [0.05, 0.1, 0.2, 0.4] {
        let w = dt_modulus(&e1, t, 1, DEFAULT_XS, DEFAULT_HS)
            .map_err(|e| e.to_string())?
            .value;
        ensure((w - t / 2.0).abs() <= 1e-3, || {
            format!("DT order-1 of e1 at t={t}: {w}")
        })?;
        worst.2 = worst.2.max((w - t / 2.0).abs());
    }
    Ok(format!(
        "errors {:.1e} / {:.1e} / {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "exact identity suite",
            criterion_1,
            Some(Duration::from_secs(60)),
        ),
        ("erratum detection", criterion_2, None),
        ("reduction consistency", criterion_3, None),
        ("exact/numeric consistency", criterion_4, None),
        (
            "convergence orders",
            criterion_5,
            Some(Duration::from_secs(120)),
        ),
        ("voronovskaya", criterion_6, None),
        ("bound checks", criterion_7, None),
        ("norm bounds", criterion_8, None),
        ("smoothness", criterion_9, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.1?}, budget {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {} {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name} [{elapsed:.2?}]: {why}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
