//! Weight rows and floating-point evaluation of the five operator families.
//!
//! Every operator has the shape `Σ_k w_k(x)·c_k(f)`. For Bernstein the
//! coefficients are point samples `f(k/n)`; for the Durrmeyer family they
//! are the average values `(n+1)∫ p_{n,k} f` computed by Gauss–Legendre.

pub mod functions;
pub mod sequence;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{check_unit, coefficient_row, default_nodes, fill_basis};
use crate::error::{Error, Result};

pub use functions::{registry, FunctionSpec, Smoothness};
pub use sequence::{AffineInvN, SequencePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Bernstein,
    Durrmeyer,
    M1,
    M2,
    Bezier,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::Bernstein,
        OperatorKind::Durrmeyer,
        OperatorKind::M1,
        OperatorKind::M2,
        OperatorKind::Bezier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Bernstein => "bernstein",
            OperatorKind::Durrmeyer => "durrmeyer",
            OperatorKind::M1 => "m1",
            OperatorKind::M2 => "m2",
            OperatorKind::Bezier => "bezier",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            OperatorKind::M2 => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown operator `{s}` (known: bernstein, durrmeyer, m1, m2, bezier)"
                ))
            })
    }
}

/// Operator kind plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    n: usize,
    seq: Option<SequencePair>,
    mu: f64,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, n: usize, seq: Option<SequencePair>, mu: f64) -> Result<Self> {
        if n < kind.min_n() {
            return Err(Error::Domain(format!(
                "{kind} needs n ≥ {}, got {n}",
                kind.min_n()
            )));
        }
        let seq =
            match kind {
                OperatorKind::M1 | OperatorKind::Bezier => Some(seq.ok_or_else(|| {
                    Error::Domain(format!("{kind} needs a sequence pair (a0, a1)"))
                })?),
                _ => None,
            };
        let mu = if kind == OperatorKind::Bezier {
            if !(mu >= 1.0 && mu.is_finite()) {
                return Err(Error::Domain(format!(
                    "Bézier exponent μ = {mu} must be ≥ 1"
                )));
            }
            mu
        } else {
            1.0
        };
        Ok(Self { kind, n, seq, mu })
    }

    pub fn bernstein(n: usize) -> Result<Self> {
        Self::new(OperatorKind::Bernstein, n, None, 1.0)
    }

    pub fn durrmeyer(n: usize) -> Result<Self> {
        Self::new(OperatorKind::Durrmeyer, n, None, 1.0)
    }

    pub fn m1(n: usize, seq: SequencePair) -> Result<Self> {
        Self::new(OperatorKind::M1, n, Some(seq), 1.0)
    }

    pub fn m2(n: usize) -> Result<Self> {
        Self::new(OperatorKind::M2, n, None, 1.0)
    }

    pub fn bezier(n: usize, seq: SequencePair, mu: f64) -> Result<Self> {
        Self::new(OperatorKind::Bezier, n, Some(seq), mu)
    }

    /// Same kind and parameters at a different degree.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.kind, n, self.seq.clone(), self.mu)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seq(&self) -> Option<&SequencePair> {
        self.seq.as_ref()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor {
            kind: self.kind,
            n: self.n,
            sequence: self.seq.as_ref().map(ToString::to_string),
            mu: (self.kind == OperatorKind::Bezier).then_some(self.mu),
        }
    }

    /// Weight row `w_0(x) .. w_n(x)` for this operator.
    pub fn weight_row(&self, x: f64) -> Result<Vec<f64>> {
        match self.kind {
            OperatorKind::Bernstein | OperatorKind::Durrmeyer => {
                check_unit(x, "x")?;
                let mut row = vec![0.0; self.n + 1];
                fill_basis(self.n, x, &mut row);
                Ok(row)
            }
            OperatorKind::M1 => m1_weight_row(self.n, x, self.seq.as_ref().expect("checked")),
            OperatorKind::M2 => m2_weight_row(self.n, x),
            OperatorKind::Bezier => {
                bezier_weight_row(self.n, x, self.mu, self.seq.as_ref().expect("checked"))
            }
        }
    }

    /// Computes the coefficient vector `c_k(f)` once for repeated evaluation.
    pub fn prepare(&self, f: &FunctionSpec, nodes: Option<usize>) -> PreparedOperator {
        let n = self.n;
        let coeffs = match self.kind {
            OperatorKind::Bernstein => (0..=n).map(|k| f.eval(k as f64 / n as f64)).collect(),
            _ => coefficient_row(n, |u| f.eval(u), nodes.unwrap_or_else(|| default_nodes(n))),
        };
        PreparedOperator {
            spec: self.clone(),
            coeffs,
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}", self.kind, self.n)?;
        if let Some(seq) = &self.seq {
            write!(f, ", seq={seq}")?;
        }
        if self.kind == OperatorKind::Bezier {
            write!(f, ", mu={}", self.mu)?;
        }
        write!(f, ")")
    }
}

/// Serializable summary of an [`OperatorSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub kind: OperatorKind,
    pub n: usize,
    pub sequence: Option<String>,
    pub mu: Option<f64>,
}

/// An operator with its coefficients `c_k(f)` already computed.
#[derive(Debug, Clone)]
pub struct PreparedOperator {
    spec: OperatorSpec,
    coeffs: Vec<f64>,
}

impl PreparedOperator {
    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.spec.n;
        match self.spec.kind {
            OperatorKind::M2 => {
                check_unit(x, "x")?;
                Ok(m2_eval(n, x, &self.coeffs))
            }
            _ => {
                let w = self.spec.weight_row(x)?;
                Ok(w.iter().zip(&self.coeffs).map(|(w, c)| w * c).sum())
            }
        }
    }

    /// Pointwise evaluation, parallel over grid points.
    pub fn eval_grid(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// `D(f; x)` for a single point.
pub fn apply(spec: &OperatorSpec, f: &FunctionSpec, x: f64, nodes: Option<usize>) -> Result<f64> {
    check_unit(x, "x")?;
    spec.prepare(f, nodes).eval(x)
}

/// `D(f; x)` over a grid, sharing one coefficient vector.
pub fn apply_grid(
    spec: &OperatorSpec,
    f: &FunctionSpec,
    grid: &[f64],
    nodes: Option<usize>,
) -> Result<Vec<f64>> {
    if let Some(&bad) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("grid point {bad} is outside [0, 1]")));
    }
    spec.prepare(f, nodes).eval_grid(grid)
}

/// `points + 1` equispaced nodes `i/points`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    (0..=points).map(|i| i as f64 / points as f64).collect()
}

/// Row of `p^{M,1}_{n,k}(x) = a(x,n)·p_{n−1,k}(x) + a(1−x,n)·p_{n−1,k−1}(x)`.
pub fn m1_weight_row(n: usize, x: f64, seq: &SequencePair) -> Result<Vec<f64>> {
    check_unit(x, "x")?;
    if n < 1 {
        return Err(Error::Domain("m1 needs n ≥ 1".into()));
    }
    let (a0, a1) = seq.at_f64(n);
    let left = a0 + a1 * x;
    let right = a0 + a1 * (1.0 - x);
    let mut lower = vec![0.0; n];
    fill_basis(n - 1, x, &mut lower);
    let row = (0..=n)
        .map(|k| {
            let here = if k < n { left * lower[k] } else { 0.0 };
            let prev = if k > 0 { right * lower[k - 1] } else { 0.0 };
            here + prev
        })
        .collect();
    Ok(row)
}

/// `(a_0(x,n), a_1(x,n), a_2(x,n))` for the second-order operator.
pub fn m2_weights(n: usize, x: f64) -> [f64; 3] {
    let c = (n + 8) as f64 * x * (1.0 - x);
    [1.5 - 2.0 * x - c, 2.0 * c, -0.5 + 2.0 * x - c]
}

/// Row of `p^{M,2}_{n,k}(x) = Σ_j a_j(x,n)·p_{n−2,k−j}(x)`.
pub fn m2_weight_row(n: usize, x: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::Domain(format!("m2 needs n ≥ 3, got {n}")));
    }
    check_unit(x, "x")?;
    let a = m2_weights(n, x);
    let mut lower = vec![0.0; n - 1];
    fill_basis(n - 2, x, &mut lower);
    let row = (0..=n)
        .map(|k| {
            (0..3)
                .filter(|&j| k >= j && k - j <= n - 2)
                .map(|j| a[j] * lower[k - j])
                .sum()
        })
        .collect();
    Ok(row)
}

/// `Σ_j a_j A_j` written as `A_0 + a_1(A_1 − A_0) + a_2(A_2 − A_0)`: the
/// weights `a_j` grow like `n` and nearly cancel, while the component
/// differences are `O(1/n)`, so this keeps the rounding at `O(ε)`.
fn m2_eval(n: usize, x: f64, coeffs: &[f64]) -> f64 {
    let a = m2_weights(n, x);
    let mut lower = vec![0.0; n - 1];
    fill_basis(n - 2, x, &mut lower);
    let (mut base, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for (r, p) in lower.iter().enumerate() {
        base += p * coeffs[r];
        d1 += p * (coeffs[r + 1] - coeffs[r]);
        d2 += p * (coeffs[r + 2] - coeffs[r]);
    }
    base + a[1] * d1 + a[2] * d2
}

/// Row of `Q^{(μ)}_{n,k}(x) = J_{n,k}^μ − J_{n,k+1}^μ` with `J_{n,k}` the tail
/// sums of the `p^{M,1}` row.
pub fn bezier_weight_row(n: usize, x: f64, mu: f64, seq: &SequencePair) -> Result<Vec<f64>> {
    if !(mu >= 1.0 && mu.is_finite()) {
        return Err(Error::Domain(format!(
            "Bézier exponent μ = {mu} must be ≥ 1"
        )));
    }
    let row = m1_weight_row(n, x, seq)?;
    let mut tails = vec![0.0; n + 2];
    for k in (0..=n).rev() {
        tails[k] = tails[k + 1] + row[k];
    }
    let integer_mu = mu.fract() == 0.0 && mu <= i32::MAX as f64;
    let powered: Vec<f64> = if integer_mu {
        let e = mu as i32;
        tails.iter().map(|j| j.powi(e)).collect()
    } else {
        const SLACK: f64 = 1e-12;
        tails
            .iter()
            .enumerate()
            .map(|(index, &j)| {
                if !(-SLACK..=1.0 + SLACK).contains(&j) {
                    return Err(Error::BezierBase {
                        index,
                        value: j,
                        mu,
                    });
                }
                Ok(j.clamp(0.0, 1.0).powf(mu))
            })
            .collect::<Result<_>>()?
    };
    Ok((0..=n).map(|k| powered[k] - powered[k + 1]).collect())
}
