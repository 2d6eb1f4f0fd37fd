//! Convergence studies, Voronovskaya scans and pointwise checks of the
//! error bounds, all producing serializable reports.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{from_f64, to_f64};
use crate::moments::central_moment;
use crate::operators::{
    m2_weights, uniform_grid, FunctionSpec, OperatorKind, OperatorSpec, SequencePair,
};
use crate::smoothness::{ModulusKind, ModulusProfile};

pub const DEFAULT_GRID: usize = 1000;
/// Rows with a smaller sup error are left out of slope fits.
pub const FIT_FLOOR: f64 = 1e-13;
/// A bound check passes iff its smallest margin is at least `-PASS_TOLERANCE`.
pub const PASS_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_INTERIOR_MARGIN: f64 = 0.05;
/// Degrees over which the second-moment constant is estimated for `m1_dt`.
pub const B_N_LIST: [usize; 6] = [10, 20, 30, 40, 50, 60];
const B_SAMPLES: usize = 4000;

/// `(max_x |D f(x) − f(x)|, argmax)` over `grid_size + 1` uniform points.
pub fn sup_error(
    spec: &OperatorSpec,
    f: &FunctionSpec,
    grid_size: usize,
    nodes: Option<usize>,
) -> Result<(f64, f64)> {
    if grid_size < 2 {
        return Err(Error::Domain(format!("grid size {grid_size} must be ≥ 2")));
    }
    let grid = uniform_grid(grid_size);
    let values = spec.prepare(f, nodes).eval_grid(&grid)?;
    Ok(grid
        .iter()
        .zip(&values)
        .map(|(&x, v)| ((v - f.eval(x)).abs(), x))
        .fold(
            (-1.0, 0.0),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        ))
}

/// Least-squares line through `(ln n, ln e)` for the rows with `e > 1e-13`.
pub fn fit_power_law(points: &[(usize, f64)]) -> Result<(f64, f64)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > FIT_FLOOR && e.is_finite())
        .map(|&(n, e)| ((n as f64).ln(), e.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} rows above {FIT_FLOOR:e}",
            usable.len()
        )));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all usable rows share one n".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
    pub argmax_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub operator: OperatorKind,
    pub sequence: Option<String>,
    pub mu: Option<f64>,
    pub function: String,
    pub rows: Vec<ConvergenceRow>,
    pub slope: f64,
    pub intercept: f64,
}

fn check_ascending(n_list: &[usize]) -> Result<()> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!(
            "n list {n_list:?} must be strictly ascending"
        )));
    }
    Ok(())
}

/// Rows from an arbitrary error source, fitted in `ln n`.
pub fn convergence_from(
    n_list: &[usize],
    error_at: impl Fn(usize) -> Result<(f64, f64)> + Sync,
) -> Result<(Vec<ConvergenceRow>, f64, f64)> {
    check_ascending(n_list)?;
    let rows: Vec<ConvergenceRow> = n_list
        .par_iter()
        .map(|&n| {
            let (sup_error, argmax_x) = error_at(n)?;
            Ok(ConvergenceRow {
                n,
                sup_error,
                argmax_x,
            })
        })
        .collect::<Result<_>>()?;
    let points: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.sup_error)).collect();
    let (slope, intercept) = fit_power_law(&points)?;
    Ok((rows, slope, intercept))
}

/// Sup errors of `base.with_n(n)` for each `n`, with the fitted slope.
pub fn convergence_study(
    base: &OperatorSpec,
    f: &FunctionSpec,
    n_list: &[usize],
    grid_size: usize,
    nodes: Option<usize>,
) -> Result<ConvergenceReport> {
    let specs = n_list
        .iter()
        .map(|&n| base.with_n(n))
        .collect::<Result<Vec<_>>>()?;
    let (rows, slope, intercept) = convergence_from(n_list, |n| {
        let spec = specs.iter().find(|s| s.n() == n).expect("built above");
        sup_error(spec, f, grid_size, nodes)
    })?;
    let desc = base.descriptor();
    Ok(ConvergenceReport {
        operator: desc.kind,
        sequence: desc.sequence,
        mu: desc.mu,
        function: f.name.to_string(),
        rows,
        slope,
        intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoronovskayaRow {
    pub n: usize,
    pub scaled_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronovskayaReport {
    pub function: String,
    pub x: f64,
    pub rows: Vec<VoronovskayaRow>,
    pub target: f64,
    /// `−(3/2)f'' − 2φ²(1−2x)f''' − (1/2)φ⁴f''''`, when four derivatives exist.
    ///
    /// The scaled third and fourth central moments tend to `−12φ²(1−2x)` and
    /// `−12φ⁴`, so they enter at the same order as the second moment.
    pub extended_target: Option<f64>,
}

/// `(n+2)(n+3)·(D^{M,2}_n f(x) − f(x))` against `−(3/2) f''(x)`.
pub fn voronovskaya_scan(
    f: &FunctionSpec,
    x: f64,
    n_list: &[usize],
    nodes: Option<usize>,
) -> Result<VoronovskayaReport> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (0, 1)")));
    }
    let target = -1.5 * f.derivative(2, x)?;
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let spec = OperatorSpec::m2(n)?;
            let value = spec.prepare(f, nodes).eval(x)?;
            let scale = ((n + 2) * (n + 3)) as f64;
            Ok(VoronovskayaRow {
                n,
                scaled_error: scale * (value - f.eval(x)),
            })
        })
        .collect::<Result<_>>()?;
    let phi2 = x * (1.0 - x);
    let extended_target = match (f.derivative(3, x), f.derivative(4, x)) {
        (Ok(d3), Ok(d4)) => {
            Some(target - 2.0 * phi2 * (1.0 - 2.0 * x) * d3 - 0.5 * phi2 * phi2 * d4)
        }
        _ => None,
    };
    Ok(VoronovskayaReport {
        function: f.name.to_string(),
        x,
        rows,
        target,
        extended_target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Pointwise bound `4(√2+1)·C·ω(f, √δ_n(x))` for the order-one operator.
    M1Local,
    /// `C·ω_φ(f, √(B/(n+2)))` for the order-one operator and its Bézier variant.
    M1Dt,
    /// `2·M_2(x,n)·ω(f, δ_n(x))` for the second-order operator.
    M2Modulus,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::M1Local, Theorem::M1Dt, Theorem::M2Modulus];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::M1Local => "m1_local",
            Theorem::M1Dt => "m1_dt",
            Theorem::M2Modulus => "m2_modulus",
        }
    }

    fn accepts(self, kind: OperatorKind) -> bool {
        match self {
            Theorem::M1Local => kind == OperatorKind::M1,
            Theorem::M1Dt => matches!(kind, OperatorKind::M1 | OperatorKind::Bezier),
            Theorem::M2Modulus => kind == OperatorKind::M2,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown theorem `{s}` (known: m1_local, m1_dt, m2_modulus)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundVerdict {
    Pass,
    Fail,
}

impl fmt::Display for BoundVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundVerdict::Pass => "PASS",
            BoundVerdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Margins at `x = 1/2` computed with each branch of a piecewise `δ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointBranches {
    pub lower_branch_margin: f64,
    pub upper_branch_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub operator: crate::operators::OperatorDescriptor,
    pub function: String,
    pub rows: Vec<BoundRow>,
    pub min_margin: f64,
    pub verdict: BoundVerdict,
    /// Constant multiplying the modulus on the right side.
    pub constant: f64,
    /// Smallest constant making the bound hold on the grid (`m1_dt` only).
    pub best_constant: Option<f64>,
    /// Second-moment constant used for the step (`m1_dt` only).
    pub b_constant: Option<f64>,
    pub midpoint: Option<MidpointBranches>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn assemble(
        theorem: Theorem,
        spec: &OperatorSpec,
        f: &FunctionSpec,
        rows: Vec<BoundRow>,
        constant: f64,
    ) -> Self {
        let min_margin = min_margin(&rows);
        Self {
            theorem,
            operator: spec.descriptor(),
            function: f.name.to_string(),
            verdict: verdict_for(min_margin),
            rows,
            min_margin,
            constant,
            best_constant: None,
            b_constant: None,
            midpoint: None,
            notes: vec![],
        }
    }
}

pub fn min_margin(rows: &[BoundRow]) -> f64 {
    rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
}

pub fn verdict_for(min_margin: f64) -> BoundVerdict {
    if min_margin >= -PASS_TOLERANCE {
        BoundVerdict::Pass
    } else {
        BoundVerdict::Fail
    }
}

/// `(n+2)(n+3)·δ_n(x)` for the order-one local bound, by branch.
fn m1_delta_numerator(n: usize, x: f64, upper_branch: bool) -> f64 {
    let phi2 = x * (1.0 - x);
    let poly = if upper_branch {
        1.0 - 5.0 * x + 7.0 * x * x
    } else {
        3.0 - 9.0 * x + 7.0 * x * x
    };
    poly + n as f64 * phi2
}

/// `(n+2)(n+3)·δ_n²(x)` for the second-order bound, by branch.
fn m2_delta_numerator(n: usize, x: f64, upper_branch: bool) -> f64 {
    let phi2 = x * (1.0 - x);
    let poly = if upper_branch {
        1.0 - 7.0 * x + 12.0 * x * x
    } else {
        6.0 - 17.0 * x + 12.0 * x * x
    };
    poly + n as f64 * phi2
}

/// `√δ_n(x)` for the order-one bound.
pub fn m1_local_step(n: usize, x: f64) -> f64 {
    let d = ((n + 2) * (n + 3)) as f64;
    (m1_delta_numerator(n, x, x > 0.5) / d).max(0.0).sqrt()
}

/// `δ_n(x)` for the second-order bound.
pub fn m2_step(n: usize, x: f64) -> f64 {
    let d = ((n + 2) * (n + 3)) as f64;
    (m2_delta_numerator(n, x, x > 0.5) / d).max(0.0).sqrt()
}

/// `sup_x |a(x, n)| = max(|a0|, |a0 + a1|)`.
pub fn m1_local_constant(seq: &SequencePair, n: usize) -> f64 {
    let (a0, a1) = seq.at_f64(n);
    a0.abs().max((a0 + a1).abs())
}

/// `|D f(x) − f(x)|` on the grid.
fn lhs_rows(
    spec: &OperatorSpec,
    f: &FunctionSpec,
    grid: &[f64],
    nodes: Option<usize>,
) -> Result<Vec<f64>> {
    let values = spec.prepare(f, nodes).eval_grid(grid)?;
    Ok(grid
        .iter()
        .zip(&values)
        .map(|(&x, v)| (v - f.eval(x)).abs())
        .collect())
}

fn rows_from(
    grid: &[f64],
    lhs: &[f64],
    rhs: impl Fn(usize, f64) -> Result<f64>,
) -> Result<Vec<BoundRow>> {
    grid.iter()
        .zip(lhs)
        .enumerate()
        .map(|(i, (&x, &lhs))| {
            let rhs = rhs(i, x)?;
            Ok(BoundRow {
                x,
                lhs,
                rhs,
                margin: rhs - lhs,
            })
        })
        .collect()
}

/// Pointwise check of one error bound on a uniform grid.
pub fn bound_check(
    theorem: Theorem,
    spec: &OperatorSpec,
    f: &FunctionSpec,
    grid_size: usize,
    nodes: Option<usize>,
) -> Result<BoundReport> {
    if !theorem.accepts(spec.kind()) {
        return Err(Error::InvalidPairing {
            theorem: theorem.name().into(),
            kind: spec.kind().name().into(),
        });
    }
    if grid_size < 2 {
        return Err(Error::Domain(format!("grid size {grid_size} must be ≥ 2")));
    }
    let n = spec.n();
    let grid = uniform_grid(grid_size);
    let lhs = lhs_rows(spec, f, &grid, nodes)?;
    match theorem {
        Theorem::M1Local => {
            let seq = spec.seq().expect("m1 carries a sequence");
            let c = 4.0 * (SQRT_2 + 1.0) * m1_local_constant(seq, n);
            let max_step = grid
                .iter()
                .map(|&x| m1_local_step(n, x))
                .fold(0.0, f64::max);
            let profile = ModulusProfile::refined(f, ModulusKind::Classical, max_step)?;
            let rhs_at = |step: f64| -> Result<f64> {
                Ok(if step > 0.0 {
                    c * profile.at(step)?
                } else {
                    0.0
                })
            };
            let rows = rows_from(&grid, &lhs, |_, x| rhs_at(m1_local_step(n, x)))?;
            let mut report = BoundReport::assemble(theorem, spec, f, rows, c);
            let mid_lhs = (spec.prepare(f, nodes).eval(0.5)? - f.eval(0.5)).abs();
            let d = ((n + 2) * (n + 3)) as f64;
            let branch = |upper| rhs_at((m1_delta_numerator(n, 0.5, upper) / d).sqrt());
            report.midpoint = Some(MidpointBranches {
                lower_branch_margin: branch(false)? - mid_lhs,
                upper_branch_margin: branch(true)? - mid_lhs,
            });
            report.notes.push(
                "constant taken as sup_x |a(x,n)| = max(|a0|, |a0+a1|); modulus refined and inflated by 5%"
                    .into(),
            );
            Ok(report)
        }
        Theorem::M2Modulus => {
            let max_step = grid.iter().map(|&x| m2_step(n, x)).fold(0.0, f64::max);
            let profile = ModulusProfile::refined(f, ModulusKind::Classical, max_step)?;
            let m2_sum = |x: f64| m2_weights(n, x).iter().map(|a| a.abs()).sum::<f64>();
            let rhs_at = |x: f64, step: f64| -> Result<f64> {
                Ok(if step > 0.0 {
                    2.0 * m2_sum(x) * profile.at(step)?
                } else {
                    0.0
                })
            };
            let rows = rows_from(&grid, &lhs, |_, x| rhs_at(x, m2_step(n, x)))?;
            let mut report = BoundReport::assemble(theorem, spec, f, rows, 2.0);
            let mid_lhs = (spec.prepare(f, nodes).eval(0.5)? - f.eval(0.5)).abs();
            let d = ((n + 2) * (n + 3)) as f64;
            let branch = |upper| rhs_at(0.5, (m2_delta_numerator(n, 0.5, upper) / d).sqrt());
            report.midpoint = Some(MidpointBranches {
                lower_branch_margin: branch(false)? - mid_lhs,
                upper_branch_margin: branch(true)? - mid_lhs,
            });
            report.notes.push(
                "constant is 2·M_2(x,n) per point; modulus refined and inflated by 5%".into(),
            );
            Ok(report)
        }
        Theorem::M1Dt => {
            let seq = spec.seq().expect("m1 carries a sequence");
            let b = estimate_b_constant(seq, &B_N_LIST, DEFAULT_INTERIOR_MARGIN)?;
            let t = (b / (n + 2) as f64).sqrt();
            let omega = ModulusProfile::refined(f, ModulusKind::DitzianTotik(1), t)?.top();
            let worst = lhs.iter().cloned().fold(0.0, f64::max);
            let best = if omega > 0.0 {
                worst / omega
            } else if worst == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let rows = rows_from(&grid, &lhs, |_, _| Ok(best * omega))?;
            let mut report = BoundReport::assemble(theorem, spec, f, rows, best);
            report.best_constant = Some(best);
            report.b_constant = Some(b);
            report.notes.push(format!(
                "C is the smallest constant that makes the bound hold on the grid; B estimated on x ∈ [{m}, {}] only, the second-moment bound fails at the endpoints",
                1.0 - DEFAULT_INTERIOR_MARGIN,
                m = DEFAULT_INTERIOR_MARGIN
            ));
            Ok(report)
        }
    }
}

/// `C*` for the Ditzian–Totik bound at each `n`.
pub fn dt_constant_trend(
    seq: &SequencePair,
    f: &FunctionSpec,
    n_list: &[usize],
    mu: Option<f64>,
    grid_size: usize,
) -> Result<Vec<(usize, f64)>> {
    n_list
        .iter()
        .map(|&n| {
            let spec = match mu {
                Some(mu) => OperatorSpec::bezier(n, seq.clone(), mu)?,
                None => OperatorSpec::m1(n, seq.clone())?,
            };
            let report = bound_check(Theorem::M1Dt, &spec, f, grid_size, None)?;
            Ok((n, report.best_constant.expect("m1_dt sets it")))
        })
        .collect()
}

/// `sup (n+2)·D((t−x)²; x)/φ²(x)` over `n ∈ n_list` and `x ∈ [m, 1−m]`,
/// with the second central moment taken from the exact engine.
pub fn estimate_b_constant(
    seq: &SequencePair,
    n_list: &[usize],
    interior_margin: f64,
) -> Result<f64> {
    if !(interior_margin > 0.0 && interior_margin < 0.5) {
        return Err(Error::Domain(format!(
            "interior margin {interior_margin} must lie in (0, 1/2)"
        )));
    }
    if n_list.is_empty() {
        return Err(Error::Domain("empty n list".into()));
    }
    let per_n = n_list
        .par_iter()
        .map(|&n| {
            let spec = OperatorSpec::m1(n, seq.clone())?;
            let moment = central_moment(&spec, 2)?;
            // the moment has degree ≤ 2, so evaluate its float coefficients
            let c: Vec<f64> = (0..=2).map(|i| to_f64(&moment.coeff(i))).collect();
            let span = 1.0 - 2.0 * interior_margin;
            Ok((0..=B_SAMPLES)
                .map(|i| interior_margin + span * i as f64 / B_SAMPLES as f64)
                .map(|x| {
                    let m = c[0] + x * (c[1] + x * c[2]);
                    (n + 2) as f64 * m / (x * (1.0 - x))
                })
                .fold(f64::NEG_INFINITY, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_n.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Exact second central moment of the order-one operator at a point.
pub fn m1_second_moment_at(seq: &SequencePair, n: usize, x: f64) -> Result<f64> {
    let spec = OperatorSpec::m1(n, seq.clone())?;
    Ok(to_f64(&central_moment(&spec, 2)?.eval(&from_f64(x))))
}
